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
 * Framework compatibility and common refinement. Two frameworks may be
 * combined into one description only when their projectors commute (and, for
 * multi-time families, when the merged family is still consistent); every
 * combining operation here either returns a valid result or throws
 * IncompatibilityError.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "histories.hpp"

namespace chist {

struct CompatibilityReport {
    bool compatible = true;
    double worst_commutator = 0.0;
    std::optional<std::pair<std::string, std::string>> offending_pair;
    /// Event time of the offending pair (family comparisons only).
    std::optional<std::size_t> time;
    /// Consistency of the merged family (family comparisons that commute).
    std::optional<ConsistencyReport> merged;

    bool operator==(const CompatibilityReport &) const = default;
};

class IncompatibilityError : public Error {
  public:
    explicit IncompatibilityError(CompatibilityReport report)
        : Error(ErrorKind::Incompatible, message(report)), report_(std::move(report)) {}

    [[nodiscard]] const CompatibilityReport &report() const noexcept { return report_; }

  private:
    static std::string message(const CompatibilityReport &r) {
        std::string s = "incompatible frameworks";
        if (r.offending_pair) {
            s += ": '" + r.offending_pair->first + "' and '" + r.offending_pair->second + "' do not commute";
        }
        return s + " (max |[P,Q]| = " + format_real(r.worst_commutator) + ")";
    }

    CompatibilityReport report_;
};

/// Compatible iff max_{j,k} max|[P_j, Q_k]| <= tol.
inline CompatibilityReport pdis_compatible(const Pdi &p, const Pdi &q, Tolerance tol = {}) {
    if (!(p.space() == q.space())) {
        throw Error(ErrorKind::Space, "pdis_compatible: PDIs live on different spaces");
    }
    CompatibilityReport report;
    std::optional<std::pair<std::string, std::string>> worst;
    for (const auto &pj : p.projectors()) {
        for (const auto &qk : q.projectors()) {
            const double c = commutator(pj.matrix(), qk.matrix()).max_norm();
            if (c > report.worst_commutator) {
                report.worst_commutator = c;
                worst = {pj.label(), qk.label()};
            }
        }
    }
    report.compatible = report.worst_commutator <= tol.eps;
    if (!report.compatible) {
        report.offending_pair = worst;
    }
    return report;
}

/**
 * All nonzero products P_j Q_k (trace > tol). A product equal to one of its
 * factors keeps that factor's label; otherwise it is labeled "P&Q".
 */
inline Pdi common_refinement(const Pdi &p, const Pdi &q, Tolerance tol = {}) {
    auto report = pdis_compatible(p, q, tol);
    if (!report.compatible) {
        throw IncompatibilityError(std::move(report));
    }
    const Tolerance loose(std::max(tol.eps, 1e-9));
    std::vector<Projector> elements;
    for (const auto &pj : p.projectors()) {
        for (const auto &qk : q.projectors()) {
            ComplexMatrix m = pj.matrix() * qk.matrix();
            if (!(m.trace().real() > tol.eps)) {
                continue;
            }
            std::string label;
            if (max_abs_diff(m, pj.matrix()) <= loose.eps) {
                label = pj.label();
            } else if (max_abs_diff(m, qk.matrix()) <= loose.eps) {
                label = qk.label();
            } else {
                label = pj.label() + "&" + qk.label();
            }
            // Symmetrize away rounding so the element is exactly Hermitian.
            m = 0.5 * (m + adjoint(m));
            elements.emplace_back(p.space(), std::move(m), std::move(label), loose);
        }
    }
    return validate_pdi(std::move(elements), loose);
}

namespace detail {

// Walks the two event-time lists in order. At shared times the PDIs are
// refined if they commute; the first non-commuting time is recorded in
// `report` and no merged list is returned.
inline std::optional<std::vector<std::pair<std::size_t, Pdi>>>
merge_events(const HistoryFamily &f, const HistoryFamily &g, Tolerance tol, CompatibilityReport &report) {
    std::vector<std::pair<std::size_t, Pdi>> merged;
    const auto &tf = f.event_times();
    const auto &tg = g.event_times();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < tf.size() || j < tg.size()) {
        if (j == tg.size() || (i < tf.size() && tf[i] < tg[j])) {
            merged.emplace_back(tf[i], f.pdis()[i]);
            ++i;
        } else if (i == tf.size() || tg[j] < tf[i]) {
            merged.emplace_back(tg[j], g.pdis()[j]);
            ++j;
        } else {
            auto r = pdis_compatible(f.pdis()[i], g.pdis()[j], tol);
            if (r.worst_commutator > report.worst_commutator) {
                report.worst_commutator = r.worst_commutator;
                if (!r.compatible) {
                    report.offending_pair = r.offending_pair;
                    report.time = tf[i];
                }
            }
            if (r.compatible) {
                merged.emplace_back(tf[i], common_refinement(f.pdis()[i], g.pdis()[j], tol));
            }
            ++i;
            ++j;
        }
    }
    if (report.offending_pair) {
        report.compatible = false;
        return std::nullopt;
    }
    return merged;
}

inline void require_same_setting(const HistoryFamily &f, const HistoryFamily &g, Tolerance tol) {
    const auto &sf = f.schedule();
    const auto &sg = g.schedule();
    bool same = sf.space() == sg.space() && sf.grid() == sg.grid() && sf.steps().size() == sg.steps().size();
    for (std::size_t k = 0; same && k < sf.steps().size(); ++k) {
        same = max_abs_diff(sf.step(k), sg.step(k)) <= tol.eps;
    }
    if (!same) {
        throw Error(ErrorKind::Validation,
                    "families '" + f.label() + "' and '" + g.label() + "' use different schedules");
    }
    if (max_abs_diff(f.initial().matrix(), g.initial().matrix()) > tol.eps) {
        throw Error(ErrorKind::Validation,
                    "families '" + f.label() + "' and '" + g.label() + "' start from different initial states");
    }
}

} // namespace detail

/**
 * Pointwise commutation at every shared event time, then consistency of the
 * merged family (common refinement at shared times, the lone PDI elsewhere).
 */
inline CompatibilityReport families_compatible(const HistoryFamily &f, const HistoryFamily &g,
                                               const ComplexVector &initial_state, Tolerance tol = {},
                                               double consistency_tol = kConsistencyTolerance) {
    detail::require_same_setting(f, g, tol);
    CompatibilityReport report;
    auto merged = detail::merge_events(f, g, tol, report);
    if (!merged) {
        return report;
    }
    HistoryFamily joint(f.label() + "+" + g.label(), f.schedule(), f.initial(), std::move(*merged));
    report.merged = check_consistency(joint, initial_state, consistency_tol);
    report.compatible = report.merged->consistent;
    return report;
}

/// Merged family of two compatible families, or IncompatibilityError.
inline HistoryFamily merge_families(const HistoryFamily &f, const HistoryFamily &g, const ComplexVector &initial_state,
                                    Tolerance tol = {}, double consistency_tol = kConsistencyTolerance) {
    detail::require_same_setting(f, g, tol);
    CompatibilityReport report;
    auto merged = detail::merge_events(f, g, tol, report);
    if (!merged) {
        throw IncompatibilityError(std::move(report));
    }
    HistoryFamily joint(f.label() + "+" + g.label(), f.schedule(), f.initial(), std::move(*merged));
    report.merged = check_consistency(joint, initial_state, consistency_tol);
    if (!report.merged->consistent) {
        report.compatible = false;
        throw IncompatibilityError(std::move(report));
    }
    return joint;
}

} // namespace chist
