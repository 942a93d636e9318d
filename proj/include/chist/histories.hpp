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
 * Histories, families of histories, chain operators, the decoherence
 * functional and the extended Born rule.
 *
 * A history starts from a pure initial state psi_0 at t_0 (projector
 * [psi_0]) and fixes one projector at each of its event times. Its chain
 * operator is
 *
 *     K = F_n U(t_{n-1} -> t_n) ... F_1 U(t_0 -> t_1) [psi_0]
 *
 * and the decoherence functional of two histories is
 * D(i, j) = <psi_0| K_i^dagger K_j |psi_0>. A family is consistent when every
 * off-diagonal D(i, j) vanishes to tolerance; its history probabilities are
 * then the diagonal entries.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynamics.hpp"

namespace chist {

/// Default tolerance for consistency and zero-probability decisions.
inline constexpr double kConsistencyTolerance = 1e-8;

struct Event {
    std::size_t time; // index into the schedule's grid, >= 1
    Projector projector;
};

struct History {
    Projector initial;
    std::vector<Event> events; // strictly increasing times
    std::string label;
};

inline std::string history_label(const std::vector<Event> &events) {
    std::string s = "(";
    for (std::size_t k = 0; k < events.size(); ++k) {
        if (k > 0) {
            s += ", ";
        }
        s += events[k].projector.label();
    }
    return s + ")";
}

namespace detail {

inline void check_history(const History &h, const UnitarySchedule &schedule) {
    const auto &space = schedule.space();
    if (!(h.initial.space() == space)) {
        throw Error(ErrorKind::Space, "history '" + h.label + "': initial projector is on a different space");
    }
    std::size_t prev = 0;
    for (const auto &e : h.events) {
        if (e.time <= prev || e.time > schedule.last_time()) {
            throw Error(ErrorKind::Index, "history '" + h.label + "': event times must be strictly increasing in [1, " +
                                              std::to_string(schedule.last_time()) + "]");
        }
        if (!(e.projector.space() == space)) {
            throw Error(ErrorKind::Space, "history '" + h.label + "': projector '" + e.projector.label() +
                                              "' is on a different space");
        }
        prev = e.time;
    }
}

inline void require_initial_state(const Projector &initial, const ComplexVector &state) {
    if (state.dim() != initial.space().total_dim()) {
        throw Error(ErrorKind::Dimension, "initial state dimension does not match the space");
    }
    if (std::abs(state.norm_squared() - 1.0) > 1e-10) {
        throw Error(ErrorKind::Normalization, "initial state must be normalized");
    }
    const ComplexVector projected = initial.matrix() * state;
    if ((projected - state).norm() > 1e-8) {
        throw Error(ErrorKind::Validation,
                    "initial state does not lie in the initial projector '" + initial.label() + "'");
    }
}

} // namespace detail

inline ComplexMatrix chain_operator(const History &h, const UnitarySchedule &schedule) {
    detail::check_history(h, schedule);
    ComplexMatrix k = h.initial.matrix();
    std::size_t now = 0;
    for (const auto &e : h.events) {
        k = e.projector.matrix() * (schedule.propagator(now, e.time) * k);
        now = e.time;
    }
    return k;
}

/// K(h)|psi_0>, computed on the vector.
inline ComplexVector chain_state(const History &h, const UnitarySchedule &schedule, const ComplexVector &state) {
    detail::check_history(h, schedule);
    ComplexVector v = h.initial.matrix() * state;
    std::size_t now = 0;
    for (const auto &e : h.events) {
        v = e.projector.matrix() * evolve(v, schedule, now, e.time);
        now = e.time;
    }
    return v;
}

/// ||K(h)|psi_0>||^2.
inline double weight(const History &h, const UnitarySchedule &schedule, const ComplexVector &initial_state) {
    detail::require_initial_state(h.initial, initial_state);
    return chain_state(h, schedule, initial_state).norm_squared();
}

/**
 * Product family: one PDI per event time; the histories are all tuples of
 * PDI elements, earliest time varying slowest. Pruning deactivates PDI
 * elements without touching the stored PDIs.
 */
class HistoryFamily {
  public:
    HistoryFamily(std::string label, UnitarySchedule schedule, Projector initial,
                  std::vector<std::pair<std::size_t, Pdi>> events)
        : label_(std::move(label)), schedule_(std::move(schedule)), initial_(std::move(initial)) {
        const auto &space = schedule_.space();
        if (!(initial_.space() == space)) {
            throw Error(ErrorKind::Space, "family '" + label_ + "': initial projector is on a different space");
        }
        std::size_t prev = 0;
        for (auto &[t, pdi] : events) {
            if (t <= prev || t > schedule_.last_time()) {
                throw Error(ErrorKind::Index, "family '" + label_ + "': event times must be strictly increasing in [1, " +
                                                  std::to_string(schedule_.last_time()) + "]");
            }
            if (!(pdi.space() == space)) {
                throw Error(ErrorKind::Space, "family '" + label_ + "': PDI at t" + std::to_string(t) +
                                                  " is on a different space");
            }
            prev = t;
            times_.push_back(t);
            active_.emplace_back(pdi.size(), true);
            pdis_.push_back(std::move(pdi));
        }
    }

    [[nodiscard]] const std::string &label() const noexcept { return label_; }
    [[nodiscard]] const UnitarySchedule &schedule() const noexcept { return schedule_; }
    [[nodiscard]] const Projector &initial() const noexcept { return initial_; }
    [[nodiscard]] const std::vector<std::size_t> &event_times() const noexcept { return times_; }
    [[nodiscard]] const std::vector<Pdi> &pdis() const noexcept { return pdis_; }
    [[nodiscard]] const std::vector<std::vector<bool>> &active() const noexcept { return active_; }
    [[nodiscard]] double dropped_mass() const noexcept { return dropped_mass_; }
    [[nodiscard]] std::size_t dropped_count() const noexcept { return dropped_count_; }

    /// Position of time index `t` among the event times.
    [[nodiscard]] std::optional<std::size_t> slot(std::size_t t) const {
        for (std::size_t k = 0; k < times_.size(); ++k) {
            if (times_[k] == t) {
                return k;
            }
        }
        return std::nullopt;
    }

    /// Per-slot PDI element indices of every active history, in family order.
    [[nodiscard]] std::vector<std::vector<std::size_t>> choices() const {
        std::vector<std::vector<std::size_t>> out{{}};
        for (std::size_t k = 0; k < pdis_.size(); ++k) {
            std::vector<std::vector<std::size_t>> next;
            for (const auto &prefix : out) {
                for (std::size_t j = 0; j < pdis_[k].size(); ++j) {
                    if (!active_[k][j]) {
                        continue;
                    }
                    auto c = prefix;
                    c.push_back(j);
                    next.push_back(std::move(c));
                }
            }
            out = std::move(next);
        }
        return out;
    }

    [[nodiscard]] History history(const std::vector<std::size_t> &choice) const {
        std::vector<Event> events;
        events.reserve(choice.size());
        for (std::size_t k = 0; k < choice.size(); ++k) {
            events.push_back({times_[k], pdis_[k][choice[k]]});
        }
        std::string label = history_label(events);
        return {initial_, std::move(events), std::move(label)};
    }

    [[nodiscard]] std::vector<History> histories() const {
        std::vector<History> out;
        for (const auto &c : choices()) {
            out.push_back(history(c));
        }
        return out;
    }

    [[nodiscard]] std::size_t size() const {
        std::size_t n = 1;
        for (const auto &a : active_) {
            std::size_t m = 0;
            for (bool b : a) {
                m += b ? 1 : 0;
            }
            n *= m;
        }
        return n;
    }

    friend HistoryFamily prune_zero(const HistoryFamily &family, const ComplexVector &initial_state, double tol);

  private:
    std::string label_;
    UnitarySchedule schedule_;
    Projector initial_;
    std::vector<std::size_t> times_;
    std::vector<Pdi> pdis_;
    std::vector<std::vector<bool>> active_;
    double dropped_mass_ = 0.0;
    std::size_t dropped_count_ = 0;
};

/// K_i|psi_0> for every history of the family, in family order.
inline std::vector<ComplexVector> chain_states(const HistoryFamily &family, const ComplexVector &initial_state) {
    detail::require_initial_state(family.initial(), initial_state);
    // Histories sharing a prefix share its chain state; expand slot by slot.
    std::vector<ComplexVector> level{family.initial().matrix() * initial_state};
    std::size_t now = 0;
    for (std::size_t k = 0; k < family.pdis().size(); ++k) {
        const std::size_t t = family.event_times()[k];
        std::vector<ComplexVector> next;
        for (const auto &v : level) {
            const ComplexVector moved = evolve(v, family.schedule(), now, t);
            for (std::size_t j = 0; j < family.pdis()[k].size(); ++j) {
                if (family.active()[k][j]) {
                    next.push_back(family.pdis()[k][j].matrix() * moved);
                }
            }
        }
        level = std::move(next);
        now = t;
    }
    return level;
}

inline Complex decoherence_functional(const HistoryFamily &family, std::size_t i, std::size_t j,
                                      const ComplexVector &initial_state) {
    const std::size_t n = family.size();
    if (i >= n || j >= n) {
        throw Error(ErrorKind::Index, "history index out of range for family '" + family.label() + "'");
    }
    const auto states = chain_states(family, initial_state);
    return inner(states[i], states[j]);
}

/// Full decoherence matrix, row-major n x n.
inline ComplexMatrix decoherence_matrix(const HistoryFamily &family, const ComplexVector &initial_state) {
    const auto states = chain_states(family, initial_state);
    ComplexMatrix d(states.size(), states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = i; j < states.size(); ++j) {
            const Complex v = inner(states[i], states[j]);
            d(i, j) = v;
            d(j, i) = std::conj(v);
        }
    }
    return d;
}

struct ConsistencyReport {
    std::string family;
    bool consistent = true;
    double worst_off_diagonal = 0.0;
    std::optional<std::pair<std::string, std::string>> offending_pair;
    double tolerance = kConsistencyTolerance;

    bool operator==(const ConsistencyReport &) const = default;
};

class InconsistencyError : public Error {
  public:
    explicit InconsistencyError(ConsistencyReport report)
        : Error(ErrorKind::Inconsistent, message(report)), report_(std::move(report)) {}

    [[nodiscard]] const ConsistencyReport &report() const noexcept { return report_; }

  private:
    static std::string message(const ConsistencyReport &r) {
        std::string s = "family '" + r.family + "' is inconsistent: |D| = " + format_real(r.worst_off_diagonal);
        if (r.offending_pair) {
            s += " between " + r.offending_pair->first + " and " + r.offending_pair->second;
        }
        return s;
    }

    ConsistencyReport report_;
};

/// Medium decoherence: max_{i != j} |D(i, j)| <= tol.
inline ConsistencyReport check_consistency(const HistoryFamily &family, const ComplexVector &initial_state,
                                           double tol = kConsistencyTolerance) {
    const auto states = chain_states(family, initial_state);
    ConsistencyReport report{family.label(), true, 0.0, std::nullopt, tol};
    std::optional<std::pair<std::size_t, std::size_t>> worst;
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double m = std::abs(inner(states[i], states[j]));
            if (m > report.worst_off_diagonal) {
                report.worst_off_diagonal = m;
                worst = {i, j};
            }
        }
    }
    report.consistent = report.worst_off_diagonal <= tol;
    if (worst && !report.consistent) {
        const auto ch = family.choices();
        report.offending_pair = {family.history(ch[worst->first]).label, family.history(ch[worst->second]).label};
    }
    return report;
}

struct WeightTable {
    std::string family;
    std::vector<std::pair<std::string, double>> rows; // history label, probability

    [[nodiscard]] double total() const {
        double s = 0.0;
        for (const auto &r : rows) {
            s += r.second;
        }
        return s;
    }

    [[nodiscard]] std::optional<double> find(const std::string &label) const {
        for (const auto &[l, p] : rows) {
            if (l == label) {
                return p;
            }
        }
        return std::nullopt;
    }
};

/// Extended Born rule; refuses inconsistent families.
inline WeightTable assign_probabilities(const HistoryFamily &family, const ComplexVector &initial_state,
                                        double tol = kConsistencyTolerance) {
    auto report = check_consistency(family, initial_state, tol);
    if (!report.consistent) {
        throw InconsistencyError(std::move(report));
    }
    const auto states = chain_states(family, initial_state);
    const auto ch = family.choices();
    WeightTable table{family.label(), {}};
    for (std::size_t i = 0; i < states.size(); ++i) {
        table.rows.emplace_back(family.history(ch[i]).label, states[i].norm_squared());
    }
    return table;
}

/**
 * Drops every PDI element that occurs only in histories of weight <= tol.
 * Surviving histories keep their weights; the removed mass is recorded.
 */
inline HistoryFamily prune_zero(const HistoryFamily &family, const ComplexVector &initial_state,
                                double tol = kConsistencyTolerance) {
    const auto states = chain_states(family, initial_state);
    const auto ch = family.choices();
    std::vector<std::vector<bool>> supported(family.pdis().size());
    for (std::size_t k = 0; k < family.pdis().size(); ++k) {
        supported[k].assign(family.pdis()[k].size(), false);
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].norm_squared() > tol) {
            for (std::size_t k = 0; k < ch[i].size(); ++k) {
                supported[k][ch[i][k]] = true;
            }
        }
    }
    HistoryFamily out = family;
    for (std::size_t k = 0; k < supported.size(); ++k) {
        for (std::size_t j = 0; j < supported[k].size(); ++j) {
            out.active_[k][j] = out.active_[k][j] && supported[k][j];
        }
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        bool kept = true;
        for (std::size_t k = 0; k < ch[i].size(); ++k) {
            kept = kept && out.active_[k][ch[i][k]];
        }
        if (!kept) {
            out.dropped_mass_ += states[i].norm_squared();
            ++out.dropped_count_;
        }
    }
    return out;
}

/// Implicit framework {P, I - P} for a single property.
inline Pdi implicit_pdi(const Projector &p, Tolerance tol = {}) {
    return complete_pdi({p}, "I-" + p.label(), tol);
}

/// Conjunction of events; each event is a projector at one of the family's
/// event times.
using EventPredicate = std::vector<Event>;

namespace detail {

// Per slot, which PDI elements lie inside the event projector. Elements that
// straddle the event projector make the predicate undefined in this family.
inline std::vector<std::vector<std::optional<bool>>> resolve_predicate(const HistoryFamily &family,
                                                                       const EventPredicate &pred, double tol) {
    std::vector<std::vector<std::optional<bool>>> inside(family.pdis().size());
    for (const auto &e : pred) {
        auto slot = family.slot(e.time);
        if (!slot) {
            throw Error(ErrorKind::Validation, "family '" + family.label() + "' has no event time t" +
                                                   std::to_string(e.time) + " (event '" + e.projector.label() + "')");
        }
        if (!(e.projector.space() == family.schedule().space())) {
            throw Error(ErrorKind::Space, "event '" + e.projector.label() + "' is on a different space");
        }
        const Pdi &pdi = family.pdis()[*slot];
        auto &in = inside[*slot];
        if (in.empty()) {
            in.assign(pdi.size(), true);
        }
        for (std::size_t j = 0; j < pdi.size(); ++j) {
            const ComplexMatrix qf = e.projector.matrix() * pdi[j].matrix();
            if (max_abs_diff(qf, pdi[j].matrix()) <= tol) {
                continue;
            }
            if (qf.max_norm() <= tol) {
                in[j] = false;
                continue;
            }
            throw Error(ErrorKind::Validation, "event '" + e.projector.label() + "@t" + std::to_string(e.time) +
                                                   "' is not in the event algebra of family '" + family.label() +
                                                   "' (it straddles '" + pdi[j].label() + "')");
        }
    }
    return inside;
}

} // namespace detail

/// Pr(event) as the sum of weights of matching histories.
inline double event_probability(const HistoryFamily &family, const EventPredicate &pred,
                                const ComplexVector &initial_state, double tol = kConsistencyTolerance) {
    auto report = check_consistency(family, initial_state, tol);
    if (!report.consistent) {
        throw InconsistencyError(std::move(report));
    }
    const auto inside = detail::resolve_predicate(family, pred, tol);
    const auto states = chain_states(family, initial_state);
    const auto ch = family.choices();
    double p = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < inside.size() && match; ++k) {
            if (!inside[k].empty() && !*inside[k][ch[i][k]]) {
                match = false;
            }
        }
        if (match) {
            p += states[i].norm_squared();
        }
    }
    return p;
}

struct ConditionalResult {
    double probability;       // Pr(target | given)
    double joint;             // Pr(target and given)
    double given_probability; // Pr(given)
};

inline ConditionalResult conditional_detail(const HistoryFamily &family, const EventPredicate &target,
                                            const EventPredicate &given, const ComplexVector &initial_state,
                                            double tol = kConsistencyTolerance) {
    const double pg = event_probability(family, given, initial_state, tol);
    if (!(pg > tol)) {
        throw Error(ErrorKind::UndefinedConditional,
                    "conditioning event has probability " + format_real(pg) + " in family '" +
                        family.label() + "'");
    }
    EventPredicate both = target;
    both.insert(both.end(), given.begin(), given.end());
    const double joint = event_probability(family, both, initial_state, tol);
    return {joint / pg, joint, pg};
}

/// Pr(target | given) within a consistent family.
inline double conditional(const HistoryFamily &family, const EventPredicate &target, const EventPredicate &given,
                          const ComplexVector &initial_state, double tol = kConsistencyTolerance) {
    return conditional_detail(family, target, given, initial_state, tol).probability;
}

} // namespace chist
