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
 * Executes a scenario's queries in declared order. A failing query becomes
 * an error entry; the remaining queries still run.
 */
#pragma once

#include <optional>
#include <string>
#include <variant>

#include "report.hpp"
#include "scenario.hpp"

namespace chist {

struct RunOptions {
    /// Overrides the scenario's consistency tolerance.
    std::optional<double> tolerance;
};

namespace detail {

struct QueryRunner {
    const Scenario &s;
    double tol;

    [[nodiscard]] Tolerance eps() const { return Tolerance(s.tolerances.eps); }

    QueryResult operator()(const ProbsQuery &q) const {
        const HistoryFamily &base = s.family(q.family);
        const HistoryFamily f = q.prune ? prune_zero(base, s.initial_state, tol) : base;
        const WeightTable table = assign_probabilities(f, s.initial_state, tol);
        ProbsResult r{f.label(), q.prune, {}, table.total(), f.dropped_count(), f.dropped_mass()};
        for (const auto &[label, p] : table.rows) {
            r.rows.push_back({label, p});
        }
        return r;
    }
    QueryResult operator()(const ConsistencyQuery &q) const {
        return check_consistency(s.family(q.family), s.initial_state, tol);
    }
    QueryResult operator()(const ConditionalQuery &q) const {
        const auto c = conditional_detail(s.family(q.family), q.target_events, q.given_events, s.initial_state, tol);
        return ConditionalOutcome{q.family, q.target, q.given, c.probability, c.joint, c.given_probability};
    }
    QueryResult operator()(const RefineQuery &q) const {
        const Pdi r = common_refinement(s.pdis.at(q.first), s.pdis.at(q.second), eps());
        RefineResult out{q.first, q.second, r.labels(), {}};
        for (const auto &p : r.projectors()) {
            out.ranks.push_back(p.rank());
        }
        return out;
    }
    QueryResult operator()(const CompatibleQuery &q) const {
        return PdiCompatibility{q.first, q.second, pdis_compatible(s.pdis.at(q.first), s.pdis.at(q.second), eps())};
    }
    QueryResult operator()(const FamiliesCompatibleQuery &q) const {
        return FamilyCompatibility{
            q.first, q.second,
            families_compatible(s.family(q.first), s.family(q.second), s.initial_state, eps(), tol)};
    }
    QueryResult operator()(const SpectrumQuery &q) const {
        const Observable &a = s.observables.at(q.observable);
        std::vector<std::string> labels;
        if (const Json &obs = s.document.at("observables").at(q.observable); obs.contains("labels")) {
            labels = obs.at("labels").get<std::vector<std::string>>();
        }
        const Spectrum sp = pdi_from_observable(a, eps(), s.tolerances.cluster, labels);
        SpectrumResult out{q.observable, sp.pdi.labels(), sp.values, {}};
        for (const auto &p : sp.pdi.projectors()) {
            out.ranks.push_back(p.rank());
        }
        return out;
    }
};

inline std::string query_subject(const Query &q) {
    struct {
        std::string operator()(const ProbsQuery &x) const { return x.family; }
        std::string operator()(const ConsistencyQuery &x) const { return x.family; }
        std::string operator()(const ConditionalQuery &x) const { return x.family; }
        std::string operator()(const RefineQuery &x) const { return x.first + " x " + x.second; }
        std::string operator()(const CompatibleQuery &x) const { return x.first + " x " + x.second; }
        std::string operator()(const FamiliesCompatibleQuery &x) const { return x.first + " x " + x.second; }
        std::string operator()(const SpectrumQuery &x) const { return x.observable; }
    } visitor;
    return std::visit(visitor, q);
}

} // namespace detail

inline Report run(const Scenario &scenario, const RunOptions &options = {}) {
    const double tol = options.tolerance.value_or(scenario.tolerances.consistency);
    if (!(tol > 0.0)) {
        throw Error(ErrorKind::Validation, "tolerance must be positive");
    }
    Report report{scenario.name, scenario.digest, tol, {}};
    const detail::QueryRunner runner{scenario, tol};
    for (std::size_t i = 0; i < scenario.queries.size(); ++i) {
        const Query &q = scenario.queries[i];
        QueryOutcome out{i + 1, query_kind(q), detail::query_subject(q), QueryFailure{}};
        try {
            out.outcome = std::visit(runner, q);
        } catch (const InconsistencyError &e) {
            out.outcome = QueryFailure{e.kind(), e.what(), e.report(), std::nullopt};
        } catch (const IncompatibilityError &e) {
            out.outcome = QueryFailure{e.kind(), e.what(), std::nullopt, e.report()};
        } catch (const Error &e) {
            out.outcome = QueryFailure{e.kind(), e.what(), std::nullopt, std::nullopt};
        }
        report.queries.push_back(std::move(out));
    }
    return report;
}

} // namespace chist
