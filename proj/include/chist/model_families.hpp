// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Ready-made history families on the built-in models.
 */
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "histories.hpp"

namespace chist {

namespace detail {

inline HistoryFamily family_on(const Model &m, std::string label, std::vector<std::pair<std::size_t, Pdi>> events) {
    return HistoryFamily(std::move(label), m.schedule, ket_projector(m.initial_state, m.space(), "psi0"),
                         std::move(events));
}

inline Pdi detector_pdi(const Model &m, const char *a, const char *b) {
    const std::string sa(a);
    const std::string sb(b);
    return validate_pdi({m.projector(sa + "*_" + sb), m.projector(sa + "_" + sb + "*"),
                         m.projector(sa + "*_" + sb + "*"), m.projector(sa + "_" + sb)});
}

} // namespace detail

/// Unitary family: {[Psi_j], I - [Psi_j]} at t1, t2, t3.
inline HistoryFamily stern_gerlach_unitary_family(const SternGerlachModel &m, std::string label = "Fu") {
    std::vector<std::pair<std::size_t, Pdi>> events;
    for (std::size_t t = 1; t <= 3; ++t) {
        events.emplace_back(t, implicit_pdi(m.projector("psi" + std::to_string(t))));
    }
    return detail::family_on(m, std::move(label), std::move(events));
}

/// Unitary evolution to t2, then the four detector outcomes at t3.
inline HistoryFamily stern_gerlach_detector_family(const SternGerlachModel &m, std::string label = "F1") {
    return detail::family_on(m, std::move(label),
                             {{1, implicit_pdi(m.projector("psi1"))},
                              {2, implicit_pdi(m.projector("psi2"))},
                              {3, detail::detector_pdi(m, "Da", "Db")}});
}

/// Which output beam at t2, then the detector outcomes at t3.
inline HistoryFamily stern_gerlach_path_family(const SternGerlachModel &m, std::string label = "F2") {
    return detail::family_on(m, std::move(label),
                             {{1, implicit_pdi(m.projector("psi1"))},
                              {2, complete_pdi({m.projector("w2a"), m.projector("w2b")}, "I-w2a-w2b")},
                              {3, detail::detector_pdi(m, "Da", "Db")}});
}

/// Spin along z at t1, nothing at t2, detector outcomes at t3.
inline HistoryFamily stern_gerlach_spin_family(const SternGerlachModel &m, std::string label = "F3") {
    return detail::family_on(m, std::move(label),
                             {{1, validate_pdi({m.projector("z+"), m.projector("z-")})},
                              {2, validate_pdi({identity_projector(m.space())})},
                              {3, detail::detector_pdi(m, "Da", "Db")}});
}

/// Slit at t1 and detector outcomes at t3.
inline HistoryFamily crossed_beam_family(const CrossedBeamModel &m, std::string label = "slits") {
    return detail::family_on(m, std::move(label),
                             {{1, complete_pdi({m.projector("A"), m.projector("B")}, "I-A-B")},
                              {3, detail::detector_pdi(m, "Ca", "Cb")}});
}

/// Slit at t1 and output port at t2 with no which-path record: inconsistent.
inline HistoryFamily interference_family(const Model &m, std::string label = "slits") {
    return detail::family_on(m, std::move(label),
                             {{1, complete_pdi({m.projector("A"), m.projector("B")}, "I-A-B")},
                              {2, complete_pdi({m.projector("X_up"), m.projector("X_down")}, "I-X")}});
}

} // namespace chist
