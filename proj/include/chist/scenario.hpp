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
 * Scenario files: JSON (version 1) describing a space, its dynamics, an
 * initial state, named projectors, observables and PDIs, history families and
 * a list of queries. Everything is validated at load time; a loaded Scenario
 * only fails at query time for reasons that depend on the query itself,
 * such as asking for probabilities in an inconsistent family.
 *
 * Complex numbers are [re, im] pairs (a bare number means im = 0); matrices
 * are row-major nested arrays. See schema/scenario.schema.json.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "frameworks.hpp"

namespace chist {

using Json = nlohmann::json;

inline constexpr int kScenarioVersion = 1;

struct ScenarioTolerances {
    double eps = 1e-10;                         // projector, unitary and PDI checks
    double consistency = kConsistencyTolerance; // decoherence and zero-probability decisions
    double cluster = 1e-9;                      // eigenvalue clustering

    bool operator==(const ScenarioTolerances &) const = default;
};

struct ProbsQuery {
    std::string family;
    bool prune = true;
};
struct ConsistencyQuery {
    std::string family;
};
struct ConditionalQuery {
    std::string family;
    std::string target; // as written, e.g. "z+@t1"
    std::string given;
    EventPredicate target_events;
    EventPredicate given_events;
};
struct RefineQuery {
    std::string first;
    std::string second;
};
struct CompatibleQuery {
    std::string first;
    std::string second;
};
struct FamiliesCompatibleQuery {
    std::string first;
    std::string second;
};
struct SpectrumQuery {
    std::string observable;
};

using Query = std::variant<ProbsQuery, ConsistencyQuery, ConditionalQuery, RefineQuery, CompatibleQuery,
                           FamiliesCompatibleQuery, SpectrumQuery>;

inline const char *query_kind(const Query &q) {
    static constexpr const char *names[] = {"probs",   "consistency",         "conditional", "refine",
                                            "compatible", "families_compatible", "spectrum"};
    return names[q.index()];
}

struct Scenario {
    std::string name;
    ScenarioTolerances tolerances;
    Json document; // as loaded; keys sorted
    std::string digest;
    UnitarySchedule schedule;
    ComplexVector initial_state;
    std::map<std::string, Projector> projectors;
    std::map<std::string, Observable> observables;
    std::map<std::string, Pdi> pdis;
    std::vector<HistoryFamily> families;
    std::vector<Query> queries;

    [[nodiscard]] const HilbertSpace &space() const noexcept { return schedule.space(); }

    [[nodiscard]] const HistoryFamily &family(const std::string &label) const {
        for (const auto &f : families) {
            if (f.label() == label) {
                return f;
            }
        }
        throw Error(ErrorKind::Validation, "unknown family '" + label + "'");
    }
};

/// Compact dump with sorted keys; the input to the digest.
inline std::string canonical_json(const Json &doc) { return doc.dump(); }

inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string scenario_digest(const Json &doc) { return "fnv1a64:" + fnv1a64_hex(canonical_json(doc)); }

namespace detail {

template <class F>
auto in_context(const std::string &context, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const IncompatibilityError &) {
        throw;
    } catch (const Error &e) {
        throw Error(e.kind(), context + ": " + e.what());
    } catch (const Json::exception &e) {
        throw Error(ErrorKind::Validation, context + ": " + e.what());
    }
}

inline const Json &require(const Json &obj, const char *key, const std::string &context) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(ErrorKind::Validation, context + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

inline std::string require_string(const Json &obj, const char *key, const std::string &context) {
    const Json &v = require(obj, key, context);
    if (!v.is_string()) {
        throw Error(ErrorKind::Validation, context + ": field '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

inline std::vector<std::string> string_list(const Json &v, const std::string &context) {
    if (!v.is_array()) {
        throw Error(ErrorKind::Validation, context + ": expected an array of strings");
    }
    std::vector<std::string> out;
    for (const auto &s : v) {
        if (!s.is_string()) {
            throw Error(ErrorKind::Validation, context + ": expected an array of strings");
        }
        out.push_back(s.get<std::string>());
    }
    return out;
}

inline Complex parse_complex(const Json &v, const std::string &context) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw Error(ErrorKind::Validation, context + ": expected a complex number [re, im]");
}

inline ComplexVector parse_vector(const Json &v, const std::string &context) {
    if (!v.is_array()) {
        throw Error(ErrorKind::Validation, context + ": expected an array of complex numbers");
    }
    std::vector<Complex> entries;
    for (const auto &z : v) {
        entries.push_back(parse_complex(z, context));
    }
    return ComplexVector(std::move(entries));
}

inline ComplexMatrix parse_matrix(const Json &v, const std::string &context) {
    if (!v.is_array() || v.empty() || !v[0].is_array()) {
        throw Error(ErrorKind::Validation, context + ": expected a matrix (array of rows)");
    }
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].size();
    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (const auto &row : v) {
        if (!row.is_array() || row.size() != cols) {
            throw Error(ErrorKind::Shape, context + ": matrix rows have different lengths");
        }
        for (const auto &z : row) {
            entries.push_back(parse_complex(z, context));
        }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json vector_json(const ComplexVector &v) {
    Json out = Json::array();
    for (const auto &z : v.entries()) {
        out.push_back(complex_json(z));
    }
    return out;
}

inline Json matrix_json(const ComplexMatrix &m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(complex_json(m(i, j)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

inline ComplexVector parse_state(const Json &spec, const HilbertSpace &space, const std::string &context) {
    if (spec.contains("amplitudes")) {
        auto v = parse_vector(spec.at("amplitudes"), context);
        if (v.dim() != space.total_dim()) {
            throw Error(ErrorKind::Dimension, context + ": expected " + std::to_string(space.total_dim()) +
                                                  " amplitudes, got " + std::to_string(v.dim()));
        }
        return v;
    }
    if (spec.contains("product")) {
        // {subsystem: {basis label: amplitude}}; every subsystem must appear.
        const Json &prod = spec.at("product");
        if (!prod.is_object()) {
            throw Error(ErrorKind::Validation, context + ": 'product' must be an object");
        }
        for (const auto &[name, _] : prod.items()) {
            if (!space.find(name)) {
                throw Error(ErrorKind::Space, context + ": unknown subsystem '" + name + "'");
            }
        }
        std::optional<ComplexVector> out;
        for (const auto &sub : space.subsystems()) {
            if (!prod.contains(sub.name)) {
                throw Error(ErrorKind::Validation, context + ": product state lacks subsystem '" + sub.name + "'");
            }
            const Json &amps = prod.at(sub.name);
            if (!amps.is_object()) {
                throw Error(ErrorKind::Validation, context + ": amplitudes of '" + sub.name + "' must be an object");
            }
            ComplexVector local(sub.dim());
            for (const auto &[label, z] : amps.items()) {
                auto pos = sub.find(label);
                if (!pos) {
                    throw Error(ErrorKind::Space,
                                context + ": unknown basis label '" + label + "' in subsystem '" + sub.name + "'");
                }
                local[*pos] = parse_complex(z, context);
            }
            out = out ? tensor_product(*out, local) : local;
        }
        return *out;
    }
    throw Error(ErrorKind::Validation, context + ": a state needs 'amplitudes' or 'product'");
}

inline std::string describe(const Json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

struct ScenarioBuilder {
    explicit ScenarioBuilder(const Json &d) : doc(d) {}

    const Json &doc;
    ScenarioTolerances tol;
    std::optional<UnitarySchedule> schedule;
    std::optional<ComplexVector> initial_state;
    std::map<std::string, Projector> projectors;
    std::map<std::string, Observable> observables;
    std::map<std::string, Pdi> pdis;
    std::vector<HistoryFamily> families;
    std::vector<Query> queries;
    std::set<std::string> resolving;

    [[nodiscard]] const HilbertSpace &space() const { return schedule->space(); }

    void read_tolerances() {
        if (!doc.contains("tolerances")) {
            return;
        }
        const Json &t = doc.at("tolerances");
        auto read = [&](const char *key, double &slot) {
            if (t.contains(key)) {
                const Json &v = t.at(key);
                if (!v.is_number() || !(v.get<double>() > 0.0)) {
                    throw Error(ErrorKind::Validation, std::string("tolerance '") + key + "' must be a positive number");
                }
                slot = v.get<double>();
            }
        };
        read("eps", tol.eps);
        read("consistency", tol.consistency);
        read("cluster", tol.cluster);
    }

    void read_model() {
        if (doc.contains("model")) {
            for (const char *key : {"space", "steps", "times", "initial_state"}) {
                if (doc.contains(key)) {
                    throw Error(ErrorKind::Validation,
                                std::string("scenario gives both 'model' and '") + key + "'");
                }
            }
            in_context("model", [&] { read_builder(doc.at("model")); });
            return;
        }
        std::vector<Subsystem> subs;
        in_context("space", [&] {
            const Json &s = require(doc, "space", "scenario");
            if (!s.is_array()) {
                throw Error(ErrorKind::Validation, "expected an array of subsystems");
            }
            for (const auto &sub : s) {
                const std::string name = require_string(sub, "name", "subsystem");
                subs.push_back({name, string_list(require(sub, "basis", "subsystem '" + name + "'"),
                                                  "subsystem '" + name + "'")});
            }
        });
        const HilbertSpace space = in_context("space", [&] { return make_space(subs); });
        std::vector<ComplexMatrix> steps;
        in_context("steps", [&] {
            const Json &s = require(doc, "steps", "scenario");
            if (!s.is_array()) {
                throw Error(ErrorKind::Validation, "expected an array of matrices");
            }
            for (std::size_t k = 0; k < s.size(); ++k) {
                steps.push_back(parse_matrix(s[k], "step t" + std::to_string(k) + "->t" + std::to_string(k + 1)));
            }
        });
        TimeGrid grid = in_context("times", [&] {
            if (doc.contains("times")) {
                const Json &t = doc.at("times");
                if (!t.is_array()) {
                    throw Error(ErrorKind::Validation, "expected an array of numbers");
                }
                std::vector<double> times;
                for (const auto &x : t) {
                    if (!x.is_number()) {
                        throw Error(ErrorKind::Validation, "expected an array of numbers");
                    }
                    times.push_back(x.get<double>());
                }
                return TimeGrid(std::move(times));
            }
            return TimeGrid::uniform(steps.size());
        });
        schedule.emplace(in_context("steps", [&] {
            return UnitarySchedule(space, std::move(grid), std::move(steps), Tolerance(tol.eps));
        }));
        initial_state = in_context("initial_state", [&] {
            return parse_state(require(doc, "initial_state", "scenario"), space, "initial_state");
        });
        if (std::abs(initial_state->norm() - 1.0) > tol.eps) {
            throw Error(ErrorKind::Normalization, "initial_state: state is not normalized (norm " +
                                                      format_real(initial_state->norm()) + ")");
        }
    }

    void read_builder(const Json &m) {
        const std::string builder = require_string(m, "builder", "model");
        const Tolerance t(tol.eps);
        auto adopt = [&](Model model) {
            schedule.emplace(std::move(model.schedule));
            initial_state = std::move(model.initial_state);
            projectors = std::move(model.projectors);
        };
        if (builder == "stern_gerlach") {
            const Complex alpha = parse_complex(require(m, "alpha", "model"), "alpha");
            const Complex beta = parse_complex(require(m, "beta", "model"), "beta");
            adopt(build_stern_gerlach(alpha, beta, t));
        } else if (builder == "crossed_beam") {
            adopt(build_crossed_beam(t));
        } else if (builder == "interference") {
            adopt(build_recombining_interferometer(t));
        } else {
            throw Error(ErrorKind::Validation, "unknown builder '" + builder + "'");
        }
    }

    // Projector definitions may reference each other in any order.
    const Projector &projector(const std::string &name) {
        if (auto it = projectors.find(name); it != projectors.end()) {
            return it->second;
        }
        const Json *defs = doc.contains("projectors") ? &doc.at("projectors") : nullptr;
        if (defs == nullptr || !defs->contains(name)) {
            if (name == "I") {
                return projectors.emplace(name, identity_projector(space())).first->second;
            }
            throw Error(ErrorKind::Validation, "unknown projector '" + name + "'");
        }
        if (!resolving.insert(name).second) {
            throw Error(ErrorKind::Validation, "projector '" + name + "' is defined in terms of itself");
        }
        Projector p = in_context("projector '" + name + "'", [&] { return build_projector(name, defs->at(name)); });
        resolving.erase(name);
        return projectors.emplace(name, std::move(p)).first->second;
    }

    Projector build_projector(const std::string &name, const Json &spec) {
        const Tolerance t(tol.eps);
        if (!spec.is_object()) {
            throw Error(ErrorKind::Validation, "expected an object");
        }
        if (spec.contains("ket")) {
            return ket_projector(parse_state(spec.at("ket"), space(), "ket"), space(), name);
        }
        if (spec.contains("basis")) {
            const Json &b = spec.at("basis");
            return local_projector(space(), require_string(b, "subsystem", "basis"),
                                   string_list(require(b, "labels", "basis"), "basis labels"), name);
        }
        if (spec.contains("matrix")) {
            ComplexMatrix m = parse_matrix(spec.at("matrix"), "matrix");
            if (spec.contains("subsystem")) {
                m = embed_operator(m, require_string(spec, "subsystem", "projector"), space());
            }
            return {space(), std::move(m), name, t};
        }
        if (spec.contains("product")) {
            std::vector<Projector> factors;
            for (const auto &f : string_list(spec.at("product"), "product")) {
                factors.push_back(projector(f));
            }
            return product_projector(factors, name, t);
        }
        if (spec.contains("sum")) {
            ComplexMatrix m(space().total_dim(), space().total_dim());
            for (const auto &f : string_list(spec.at("sum"), "sum")) {
                m += projector(f).matrix();
            }
            return {space(), std::move(m), name, t};
        }
        if (spec.contains("complement")) {
            const std::string of = require_string(spec, "complement", "projector");
            return {space(), ComplexMatrix::identity(space().total_dim()) - projector(of).matrix(), name, t};
        }
        throw Error(ErrorKind::Validation, "needs one of 'ket', 'basis', 'matrix', 'product', 'sum', 'complement'");
    }

    void read_projectors() {
        if (!doc.contains("projectors")) {
            return;
        }
        const Json &defs = doc.at("projectors");
        if (!defs.is_object()) {
            throw Error(ErrorKind::Validation, "projectors: expected an object");
        }
        for (const auto &[name, _] : defs.items()) {
            if (projectors.count(name) != 0) {
                throw Error(ErrorKind::Validation, "projector '" + name + "' is already defined by the model");
            }
        }
        for (const auto &[name, _] : defs.items()) {
            projector(name);
        }
    }

    void read_observables() {
        if (!doc.contains("observables")) {
            return;
        }
        const Json &defs = doc.at("observables");
        if (!defs.is_object()) {
            throw Error(ErrorKind::Validation, "observables: expected an object");
        }
        for (const auto &item : defs.items()) {
            const std::string &name = item.key();
            const Json &spec = item.value();
            in_context("observable '" + name + "'", [&] {
                ComplexMatrix m = parse_matrix(require(spec, "matrix", "observable"), "matrix");
                if (spec.contains("subsystem")) {
                    m = embed_operator(m, require_string(spec, "subsystem", "observable"), space());
                }
                observables.emplace(name, Observable(space(), std::move(m), name, Tolerance(tol.eps)));
            });
        }
    }

    std::vector<std::string> observable_labels(const std::string &name) const {
        const Json &spec = doc.at("observables").at(name);
        return spec.contains("labels") ? string_list(spec.at("labels"), "labels") : std::vector<std::string>{};
    }

    // {"pdi": name} | {"projectors": [...], "remainder"?} | {"observable": name} | {"matrices": [...]}
    Pdi build_pdi(const Json &spec) {
        const Tolerance t(tol.eps);
        if (spec.contains("pdi")) {
            const std::string name = require_string(spec, "pdi", "event");
            auto it = pdis.find(name);
            if (it == pdis.end()) {
                throw Error(ErrorKind::Validation, "unknown PDI '" + name + "'");
            }
            return it->second;
        }
        if (spec.contains("projectors")) {
            std::vector<Projector> ps;
            for (const auto &n : string_list(spec.at("projectors"), "projectors")) {
                ps.push_back(projector(n));
            }
            if (spec.contains("remainder")) {
                return complete_pdi(std::move(ps), require_string(spec, "remainder", "pdi"), t);
            }
            if (ps.size() == 1 && ps.front().rank() < space().total_dim()) {
                return implicit_pdi(ps.front(), t);
            }
            return validate_pdi(std::move(ps), t);
        }
        if (spec.contains("observable")) {
            const std::string name = require_string(spec, "observable", "pdi");
            auto it = observables.find(name);
            if (it == observables.end()) {
                throw Error(ErrorKind::Validation, "unknown observable '" + name + "'");
            }
            return pdi_from_observable(it->second, t, tol.cluster, observable_labels(name)).pdi;
        }
        if (spec.contains("matrices")) {
            const Json &ms = spec.at("matrices");
            if (!ms.is_array()) {
                throw Error(ErrorKind::Validation, "'matrices' must be an array");
            }
            std::vector<std::pair<std::string, ComplexMatrix>> elements;
            for (const auto &e : ms) {
                const std::string label = require_string(e, "label", "matrices");
                ComplexMatrix m = parse_matrix(require(e, "matrix", "matrices"), label);
                if (spec.contains("subsystem")) {
                    m = embed_operator(m, require_string(spec, "subsystem", "pdi"), space());
                }
                elements.emplace_back(label, std::move(m));
            }
            return validate_pdi_matrices(space(), elements, t);
        }
        throw Error(ErrorKind::Validation, "needs one of 'pdi', 'projectors', 'observable', 'matrices'");
    }

    void read_pdis() {
        if (!doc.contains("pdis")) {
            return;
        }
        const Json &defs = doc.at("pdis");
        if (!defs.is_object()) {
            throw Error(ErrorKind::Validation, "pdis: expected an object");
        }
        for (const auto &item : defs.items()) {
            const std::string &name = item.key();
            const Json &spec = item.value();
            if (spec.contains("pdi")) {
                throw Error(ErrorKind::Validation, "pdi '" + name + "': a named PDI cannot alias another");
            }
            pdis.emplace(name, in_context("pdi '" + name + "'", [&] { return build_pdi(spec); }));
        }
    }

    void read_families() {
        if (!doc.contains("families")) {
            return;
        }
        const Json &defs = doc.at("families");
        if (!defs.is_array()) {
            throw Error(ErrorKind::Validation, "families: expected an array");
        }
        const Projector init = ket_projector(*initial_state, space(), "psi0");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < defs.size(); ++i) {
            const Json &f = defs[i];
            const std::string name = in_context("family #" + std::to_string(i + 1),
                                                [&] { return require_string(f, "name", "family"); });
            if (!seen.insert(name).second) {
                throw Error(ErrorKind::Validation, "family '" + name + "' is defined twice");
            }
            std::vector<std::pair<std::size_t, Pdi>> events;
            in_context("family '" + name + "'", [&] {
                const Json &evs = require(f, "events", "family");
                if (!evs.is_array()) {
                    throw Error(ErrorKind::Validation, "'events' must be an array");
                }
                for (const auto &e : evs) {
                    const Json &t = require(e, "time", "event");
                    if (!t.is_number_integer() || t.get<long long>() < 1) {
                        throw Error(ErrorKind::Validation, "event 'time' must be a time index >= 1");
                    }
                    const auto time = t.get<std::size_t>();
                    events.emplace_back(time, in_context("event at t" + std::to_string(time),
                                                         [&] { return build_pdi(e); }));
                }
            });
            // HistoryFamily names itself in its own errors.
            families.emplace_back(name, *schedule, init, std::move(events));
        }
    }

    const HistoryFamily &family(const std::string &name) const {
        for (const auto &f : families) {
            if (f.label() == name) {
                return f;
            }
        }
        throw Error(ErrorKind::Validation, "unknown family '" + name + "'");
    }

    // "label@tK" joined by "&"; a label resolves to the family's PDI element
    // at time K first, then to a named projector.
    EventPredicate parse_predicate(const HistoryFamily &f, const std::string &text) {
        static const std::regex part(R"((.+?)@t(\d+)(?:&|$))");
        EventPredicate out;
        std::size_t consumed = 0;
        for (auto it = std::sregex_iterator(text.begin(), text.end(), part); it != std::sregex_iterator(); ++it) {
            if (static_cast<std::size_t>(it->position()) != consumed) {
                break;
            }
            consumed += static_cast<std::size_t>(it->length());
            const std::string label = (*it)[1];
            const std::size_t time = std::stoul((*it)[2]);
            auto slot = f.slot(time);
            if (!slot) {
                throw Error(ErrorKind::Validation,
                            "family '" + f.label() + "' has no event time t" + std::to_string(time));
            }
            const Pdi &pdi = f.pdis()[*slot];
            if (auto j = pdi.find(label)) {
                out.push_back({time, pdi[*j]});
            } else {
                out.push_back({time, projector(label)});
            }
        }
        if (out.empty() || consumed != text.size()) {
            throw Error(ErrorKind::Validation, "malformed event '" + text + "' (expected label@tK, joined by '&')");
        }
        // Straddling events are rejected now rather than at query time.
        (void)resolve_predicate(f, out, tol.consistency);
        return out;
    }

    void read_queries() {
        if (!doc.contains("queries")) {
            return;
        }
        const Json &qs = doc.at("queries");
        if (!qs.is_array()) {
            throw Error(ErrorKind::Validation, "queries: expected an array");
        }
        for (std::size_t i = 0; i < qs.size(); ++i) {
            queries.push_back(in_context("query #" + std::to_string(i + 1), [&] { return read_query(qs[i]); }));
        }
    }

    Query read_query(const Json &q) {
        const std::string kind = require_string(q, "kind", "query");
        auto need_pdi = [&](const char *key) {
            const std::string n = require_string(q, key, "query");
            if (pdis.count(n) == 0) {
                throw Error(ErrorKind::Validation, "unknown PDI '" + n + "'");
            }
            return n;
        };
        if (kind == "probs") {
            ProbsQuery out{family(require_string(q, "family", "query")).label(), true};
            if (q.contains("prune")) {
                if (!q.at("prune").is_boolean()) {
                    throw Error(ErrorKind::Validation, "'prune' must be a boolean");
                }
                out.prune = q.at("prune").get<bool>();
            }
            return out;
        }
        if (kind == "consistency") {
            return ConsistencyQuery{family(require_string(q, "family", "query")).label()};
        }
        if (kind == "conditional") {
            const HistoryFamily &f = family(require_string(q, "family", "query"));
            ConditionalQuery out{f.label(), require_string(q, "target", "query"), require_string(q, "given", "query"),
                                 {}, {}};
            out.target_events = parse_predicate(f, out.target);
            out.given_events = parse_predicate(f, out.given);
            return out;
        }
        if (kind == "refine") {
            return RefineQuery{need_pdi("pdi1"), need_pdi("pdi2")};
        }
        if (kind == "compatible") {
            return CompatibleQuery{need_pdi("pdi1"), need_pdi("pdi2")};
        }
        if (kind == "families_compatible") {
            return FamiliesCompatibleQuery{family(require_string(q, "family1", "query")).label(),
                                           family(require_string(q, "family2", "query")).label()};
        }
        if (kind == "spectrum") {
            const std::string n = require_string(q, "observable", "query");
            if (observables.count(n) == 0) {
                throw Error(ErrorKind::Validation, "unknown observable '" + n + "'");
            }
            return SpectrumQuery{n};
        }
        throw Error(ErrorKind::Validation, "unknown query kind '" + kind + "'");
    }
};

} // namespace detail

/// Validates a parsed scenario document.
inline Scenario parse_scenario(const Json &doc) {
    if (!doc.is_object()) {
        throw Error(ErrorKind::Validation, "scenario must be a JSON object");
    }
    const Json &version = detail::require(doc, "version", "scenario");
    if (!version.is_number_integer() || version.get<int>() != kScenarioVersion) {
        throw Error(ErrorKind::Validation, "unsupported scenario version " + version.dump() + " (expected 1)");
    }
    const std::string name = detail::require_string(doc, "name", "scenario");
    detail::ScenarioBuilder b(doc);
    b.read_tolerances();
    b.read_model();
    b.read_projectors();
    b.read_observables();
    b.read_pdis();
    b.read_families();
    b.read_queries();
    b.projector("I");
    return Scenario{name,
                    b.tol,
                    doc,
                    scenario_digest(doc),
                    std::move(*b.schedule),
                    std::move(*b.initial_state),
                    std::move(b.projectors),
                    std::move(b.observables),
                    std::move(b.pdis),
                    std::move(b.families),
                    std::move(b.queries)};
}

/// Parses JSON text; syntax errors report line and column.
inline Scenario parse_scenario_text(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error &e) {
        std::string msg = e.what();
        // Drop the library's "[json.exception.parse_error.N] " prefix.
        if (auto pos = msg.find("] "); pos != std::string::npos) {
            msg = msg.substr(pos + 2);
        }
        throw Error(ErrorKind::Parse, msg);
    }
    return parse_scenario(doc);
}

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::Io, "error reading '" + path.string() + "'");
    }
    return ss.str();
}

inline Scenario load_scenario(const std::filesystem::path &path) { return parse_scenario_text(read_file(path)); }

/**
 * Self-contained explicit form of a scenario: space, steps, initial state and
 * every projector and PDI as matrices, with the original queries. Reloading
 * it reproduces the scenario without any model builder.
 */
inline Json export_scenario(const Scenario &s) {
    Json doc;
    doc["version"] = kScenarioVersion;
    doc["name"] = s.name;
    doc["tolerances"] = {{"eps", s.tolerances.eps},
                         {"consistency", s.tolerances.consistency},
                         {"cluster", s.tolerances.cluster}};
    Json space = Json::array();
    for (const auto &sub : s.space().subsystems()) {
        space.push_back({{"name", sub.name}, {"basis", sub.basis_labels}});
    }
    doc["space"] = std::move(space);
    doc["times"] = s.schedule.grid().times();
    Json steps = Json::array();
    for (const auto &u : s.schedule.steps()) {
        steps.push_back(detail::matrix_json(u));
    }
    doc["steps"] = std::move(steps);
    doc["initial_state"] = {{"amplitudes", detail::vector_json(s.initial_state)}};
    Json projectors = Json::object();
    for (const auto &[name, p] : s.projectors) {
        projectors[name] = {{"matrix", detail::matrix_json(p.matrix())}};
    }
    doc["projectors"] = std::move(projectors);
    auto pdi_json = [](const Pdi &pdi) {
        Json ms = Json::array();
        for (const auto &p : pdi.projectors()) {
            ms.push_back({{"label", p.label()}, {"matrix", detail::matrix_json(p.matrix())}});
        }
        return Json{{"matrices", std::move(ms)}};
    };
    if (!s.observables.empty()) {
        Json obs = Json::object();
        for (const auto &[name, o] : s.observables) {
            obs[name] = {{"matrix", detail::matrix_json(o.matrix())}};
            const Json &src = s.document.at("observables").at(name);
            if (src.contains("labels")) {
                obs[name]["labels"] = src.at("labels");
            }
        }
        doc["observables"] = std::move(obs);
    }
    if (!s.pdis.empty()) {
        Json pdis = Json::object();
        for (const auto &[name, pdi] : s.pdis) {
            pdis[name] = pdi_json(pdi);
        }
        doc["pdis"] = std::move(pdis);
    }
    Json families = Json::array();
    for (const auto &f : s.families) {
        Json events = Json::array();
        for (std::size_t k = 0; k < f.pdis().size(); ++k) {
            Json e = pdi_json(f.pdis()[k]);
            e["time"] = f.event_times()[k];
            events.push_back(std::move(e));
        }
        families.push_back({{"name", f.label()}, {"events", std::move(events)}});
    }
    doc["families"] = std::move(families);
    doc["queries"] = s.document.contains("queries") ? s.document.at("queries") : Json::array();
    return doc;
}

} // namespace chist
