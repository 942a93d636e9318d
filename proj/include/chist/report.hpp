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
 * Query results and their two renderings: aligned human-readable tables and
 * machine-readable JSON with a fixed key order. The JSON form parses back to
 * an identical Report.
 *
 * Probabilities whose magnitude is at or below the report tolerance are
 * shown as exact 0. The JSON keeps the computed value next to it under
 * "<key>_raw"; the human form adds it in parentheses.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "frameworks.hpp"

namespace chist {

struct WeightRow {
    std::string history;
    double probability;

    bool operator==(const WeightRow &) const = default;
};

struct ProbsResult {
    std::string family;
    bool pruned = false;
    std::vector<WeightRow> rows;
    double total = 0.0;
    std::size_t dropped_count = 0;
    double dropped_mass = 0.0;

    bool operator==(const ProbsResult &) const = default;
};

struct ConditionalOutcome {
    std::string family;
    std::string target;
    std::string given;
    double probability = 0.0;
    double joint = 0.0;
    double given_probability = 0.0;

    bool operator==(const ConditionalOutcome &) const = default;
};

struct RefineResult {
    std::string first;
    std::string second;
    std::vector<std::string> labels;
    std::vector<std::size_t> ranks;

    bool operator==(const RefineResult &) const = default;
};

struct PdiCompatibility {
    std::string first;
    std::string second;
    CompatibilityReport report;

    bool operator==(const PdiCompatibility &) const = default;
};

struct FamilyCompatibility {
    std::string first;
    std::string second;
    CompatibilityReport report;

    bool operator==(const FamilyCompatibility &) const = default;
};

struct SpectrumResult {
    std::string observable;
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<std::size_t> ranks;

    bool operator==(const SpectrumResult &) const = default;
};

using QueryResult = std::variant<ProbsResult, ConsistencyReport, ConditionalOutcome, RefineResult, PdiCompatibility,
                                 FamilyCompatibility, SpectrumResult>;

struct QueryFailure {
    ErrorKind kind = ErrorKind::Validation;
    std::string message;
    std::optional<ConsistencyReport> inconsistency;
    std::optional<CompatibilityReport> incompatibility;

    bool operator==(const QueryFailure &) const = default;
};

struct QueryOutcome {
    std::size_t index = 0; // 1-based position in the scenario
    std::string kind;
    std::string subject; // family, PDI pair or observable the query is about
    std::variant<QueryResult, QueryFailure> outcome;

    [[nodiscard]] bool ok() const noexcept { return outcome.index() == 0; }
    bool operator==(const QueryOutcome &) const = default;
};

struct Report {
    std::string scenario;
    std::string digest;
    double tolerance = kConsistencyTolerance;
    std::vector<QueryOutcome> queries;

    [[nodiscard]] bool ok() const {
        return std::all_of(queries.begin(), queries.end(), [](const QueryOutcome &q) { return q.ok(); });
    }
    bool operator==(const Report &) const = default;
};

inline constexpr int kReportVersion = 1;

namespace detail {

using OJson = nlohmann::ordered_json;

inline bool clamps(double v, double tol) { return v != 0.0 && std::abs(v) <= tol; }

inline void put_probability(OJson &obj, const std::string &key, double v, double tol) {
    if (clamps(v, tol)) {
        obj[key] = 0.0;
        obj[key + "_raw"] = v;
    } else {
        obj[key] = v;
    }
}

inline double get_probability(const OJson &obj, const std::string &key) {
    const std::string raw = key + "_raw";
    return obj.contains(raw) ? obj.at(raw).get<double>() : obj.at(key).get<double>();
}

inline OJson pair_json(const std::optional<std::pair<std::string, std::string>> &p) {
    return p ? OJson::array({p->first, p->second}) : OJson(nullptr);
}

inline std::optional<std::pair<std::string, std::string>> pair_from(const OJson &j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return std::make_pair(j.at(0).get<std::string>(), j.at(1).get<std::string>());
}

inline OJson consistency_json(const ConsistencyReport &r) {
    OJson j;
    j["family"] = r.family;
    j["consistent"] = r.consistent;
    j["worst_off_diagonal"] = r.worst_off_diagonal;
    j["offending_pair"] = pair_json(r.offending_pair);
    j["tolerance"] = r.tolerance;
    return j;
}

inline ConsistencyReport consistency_from(const OJson &j) {
    return {j.at("family").get<std::string>(), j.at("consistent").get<bool>(),
            j.at("worst_off_diagonal").get<double>(), pair_from(j.at("offending_pair")),
            j.at("tolerance").get<double>()};
}

inline OJson compatibility_json(const CompatibilityReport &r) {
    OJson j;
    j["compatible"] = r.compatible;
    j["worst_commutator"] = r.worst_commutator;
    j["offending_pair"] = pair_json(r.offending_pair);
    j["time"] = r.time ? OJson(*r.time) : OJson(nullptr);
    j["merged"] = r.merged ? consistency_json(*r.merged) : OJson(nullptr);
    return j;
}

inline CompatibilityReport compatibility_from(const OJson &j) {
    CompatibilityReport r;
    r.compatible = j.at("compatible").get<bool>();
    r.worst_commutator = j.at("worst_commutator").get<double>();
    r.offending_pair = pair_from(j.at("offending_pair"));
    if (!j.at("time").is_null()) {
        r.time = j.at("time").get<std::size_t>();
    }
    if (!j.at("merged").is_null()) {
        r.merged = consistency_from(j.at("merged"));
    }
    return r;
}

struct ResultToJson {
    double tol;

    OJson operator()(const ProbsResult &r) const {
        OJson j;
        j["family"] = r.family;
        j["pruned"] = r.pruned;
        OJson rows = OJson::array();
        for (const auto &row : r.rows) {
            OJson o;
            o["history"] = row.history;
            put_probability(o, "probability", row.probability, tol);
            rows.push_back(std::move(o));
        }
        j["rows"] = std::move(rows);
        j["total"] = r.total;
        j["dropped_count"] = r.dropped_count;
        j["dropped_mass"] = r.dropped_mass;
        return j;
    }
    OJson operator()(const ConsistencyReport &r) const { return consistency_json(r); }
    OJson operator()(const ConditionalOutcome &r) const {
        OJson j;
        j["family"] = r.family;
        j["target"] = r.target;
        j["given"] = r.given;
        put_probability(j, "probability", r.probability, tol);
        put_probability(j, "joint", r.joint, tol);
        put_probability(j, "given_probability", r.given_probability, tol);
        return j;
    }
    OJson operator()(const RefineResult &r) const {
        OJson j;
        j["pdi1"] = r.first;
        j["pdi2"] = r.second;
        j["labels"] = r.labels;
        j["ranks"] = r.ranks;
        return j;
    }
    OJson operator()(const PdiCompatibility &r) const {
        OJson j;
        j["pdi1"] = r.first;
        j["pdi2"] = r.second;
        j["report"] = compatibility_json(r.report);
        return j;
    }
    OJson operator()(const FamilyCompatibility &r) const {
        OJson j;
        j["family1"] = r.first;
        j["family2"] = r.second;
        j["report"] = compatibility_json(r.report);
        return j;
    }
    OJson operator()(const SpectrumResult &r) const {
        OJson j;
        j["observable"] = r.observable;
        j["labels"] = r.labels;
        j["values"] = r.values;
        j["ranks"] = r.ranks;
        return j;
    }
};

inline QueryResult result_from(const std::string &kind, const OJson &j) {
    if (kind == "probs") {
        ProbsResult r;
        r.family = j.at("family").get<std::string>();
        r.pruned = j.at("pruned").get<bool>();
        for (const auto &row : j.at("rows")) {
            r.rows.push_back({row.at("history").get<std::string>(), get_probability(row, "probability")});
        }
        r.total = j.at("total").get<double>();
        r.dropped_count = j.at("dropped_count").get<std::size_t>();
        r.dropped_mass = j.at("dropped_mass").get<double>();
        return r;
    }
    if (kind == "consistency") {
        return consistency_from(j);
    }
    if (kind == "conditional") {
        return ConditionalOutcome{j.at("family").get<std::string>(), j.at("target").get<std::string>(),
                                  j.at("given").get<std::string>(),  get_probability(j, "probability"),
                                  get_probability(j, "joint"),       get_probability(j, "given_probability")};
    }
    if (kind == "refine") {
        return RefineResult{j.at("pdi1").get<std::string>(), j.at("pdi2").get<std::string>(),
                            j.at("labels").get<std::vector<std::string>>(),
                            j.at("ranks").get<std::vector<std::size_t>>()};
    }
    if (kind == "compatible") {
        return PdiCompatibility{j.at("pdi1").get<std::string>(), j.at("pdi2").get<std::string>(),
                                compatibility_from(j.at("report"))};
    }
    if (kind == "families_compatible") {
        return FamilyCompatibility{j.at("family1").get<std::string>(), j.at("family2").get<std::string>(),
                                   compatibility_from(j.at("report"))};
    }
    if (kind == "spectrum") {
        return SpectrumResult{j.at("observable").get<std::string>(), j.at("labels").get<std::vector<std::string>>(),
                              j.at("values").get<std::vector<double>>(), j.at("ranks").get<std::vector<std::size_t>>()};
    }
    throw Error(ErrorKind::Parse, "report: unknown query kind '" + kind + "'");
}

} // namespace detail

/// Machine-readable report: JSON with a fixed key order, two-space indent.
inline std::string emit_json(const Report &report) {
    using detail::OJson;
    OJson j;
    j["version"] = kReportVersion;
    j["scenario"] = report.scenario;
    j["digest"] = report.digest;
    j["tolerance"] = report.tolerance;
    j["ok"] = report.ok();
    OJson qs = OJson::array();
    for (const auto &q : report.queries) {
        OJson o;
        o["index"] = q.index;
        o["kind"] = q.kind;
        o["subject"] = q.subject;
        if (q.ok()) {
            o["status"] = "ok";
            o["result"] = std::visit(detail::ResultToJson{report.tolerance}, std::get<QueryResult>(q.outcome));
        } else {
            const auto &f = std::get<QueryFailure>(q.outcome);
            o["status"] = "error";
            OJson e;
            e["kind"] = std::string(to_string(f.kind));
            e["message"] = f.message;
            e["inconsistency"] = f.inconsistency ? detail::consistency_json(*f.inconsistency) : OJson(nullptr);
            e["incompatibility"] =
                f.incompatibility ? detail::compatibility_json(*f.incompatibility) : OJson(nullptr);
            o["error"] = std::move(e);
        }
        qs.push_back(std::move(o));
    }
    j["queries"] = std::move(qs);
    return j.dump(2) + "\n";
}

/// Inverse of emit_json.
inline Report parse_report_json(const std::string &text) {
    using detail::OJson;
    try {
        const OJson j = OJson::parse(text);
        if (j.at("version").get<int>() != kReportVersion) {
            throw Error(ErrorKind::Parse, "report: unsupported version");
        }
        Report r;
        r.scenario = j.at("scenario").get<std::string>();
        r.digest = j.at("digest").get<std::string>();
        r.tolerance = j.at("tolerance").get<double>();
        for (const auto &o : j.at("queries")) {
            QueryOutcome q;
            q.index = o.at("index").get<std::size_t>();
            q.kind = o.at("kind").get<std::string>();
            q.subject = o.at("subject").get<std::string>();
            if (o.at("status").get<std::string>() == "ok") {
                q.outcome = detail::result_from(q.kind, o.at("result"));
            } else {
                const OJson &e = o.at("error");
                QueryFailure f;
                if (!error_kind_from_string(e.at("kind").get<std::string>(), f.kind)) {
                    throw Error(ErrorKind::Parse, "report: unknown error kind");
                }
                f.message = e.at("message").get<std::string>();
                if (!e.at("inconsistency").is_null()) {
                    f.inconsistency = detail::consistency_from(e.at("inconsistency"));
                }
                if (!e.at("incompatibility").is_null()) {
                    f.incompatibility = detail::compatibility_from(e.at("incompatibility"));
                }
                q.outcome = std::move(f);
            }
            r.queries.push_back(std::move(q));
        }
        return r;
    } catch (const OJson::exception &e) {
        throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
    }
}

namespace detail {

inline std::string probability_text(double v, double tol) {
    if (clamps(v, tol)) {
        return "0 (raw " + format_real(v) + ")";
    }
    return format_real(v);
}

inline std::string pad(const std::string &s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string pair_text(const std::optional<std::pair<std::string, std::string>> &p) {
    return p ? "'" + p->first + "' / '" + p->second + "'" : std::string("-");
}

inline void compatibility_text(std::string &out, const CompatibilityReport &r) {
    out += "    compatible:        " + std::string(r.compatible ? "yes" : "no") + "\n";
    out += "    max |[P,Q]|:       " + format_real(r.worst_commutator) + "\n";
    if (r.offending_pair) {
        out += "    offending pair:    " + pair_text(r.offending_pair) + "\n";
    }
    if (r.time) {
        out += "    at time:           t" + std::to_string(*r.time) + "\n";
    }
    if (r.merged) {
        out += "    merged consistent: " + std::string(r.merged->consistent ? "yes" : "no") + " (max |D| " +
               format_real(r.merged->worst_off_diagonal) + ")\n";
        if (r.merged->offending_pair) {
            out += "    merged offenders:  " + pair_text(r.merged->offending_pair) + "\n";
        }
    }
}

struct ResultToText {
    double tol;
    std::string &out;

    void operator()(const ProbsResult &r) const {
        std::size_t width = std::string("history").size();
        for (const auto &row : r.rows) {
            width = std::max(width, row.history.size());
        }
        width += 2;
        out += "    " + pad("history", width) + "probability\n";
        for (const auto &row : r.rows) {
            out += "    " + pad(row.history, width) + probability_text(row.probability, tol) + "\n";
        }
        out += "    " + pad("total", width) + format_real(r.total) + "\n";
        if (r.pruned) {
            out += "    pruned " + std::to_string(r.dropped_count) + " zero-weight histories (mass " +
                   format_real(r.dropped_mass) + ")\n";
        }
    }
    void operator()(const ConsistencyReport &r) const {
        out += "    consistent:     " + std::string(r.consistent ? "yes" : "no") + "\n";
        out += "    max |D(i,j)|:   " + format_real(r.worst_off_diagonal) + "\n";
        if (r.offending_pair) {
            out += "    offending pair: " + pair_text(r.offending_pair) + "\n";
        }
    }
    void operator()(const ConditionalOutcome &r) const {
        out += "    Pr(" + r.target + " | " + r.given + ") = " + probability_text(r.probability, tol) + "\n";
        out += "    joint " + probability_text(r.joint, tol) + ", given " +
               probability_text(r.given_probability, tol) + "\n";
    }
    void operator()(const RefineResult &r) const {
        std::size_t width = std::string("element").size();
        for (const auto &l : r.labels) {
            width = std::max(width, l.size());
        }
        width += 2;
        out += "    " + pad("element", width) + "rank\n";
        for (std::size_t k = 0; k < r.labels.size(); ++k) {
            out += "    " + pad(r.labels[k], width) + std::to_string(r.ranks[k]) + "\n";
        }
    }
    void operator()(const PdiCompatibility &r) const { compatibility_text(out, r.report); }
    void operator()(const FamilyCompatibility &r) const { compatibility_text(out, r.report); }
    void operator()(const SpectrumResult &r) const {
        std::size_t width = std::string("element").size();
        for (const auto &l : r.labels) {
            width = std::max(width, l.size());
        }
        width += 2;
        out += "    " + pad("element", width) + pad("eigenvalue", 20) + "rank\n";
        for (std::size_t k = 0; k < r.labels.size(); ++k) {
            out += "    " + pad(r.labels[k], width) + pad(format_real(r.values[k]), 20) +
                   std::to_string(r.ranks[k]) + "\n";
        }
    }
};

} // namespace detail

/// Human-readable report; numbers to 12 significant digits.
inline std::string emit_human(const Report &report) {
    std::string out;
    out += "scenario:  " + report.scenario + "\n";
    out += "digest:    " + report.digest + "\n";
    out += "tolerance: " + format_real(report.tolerance) + "\n";
    out += std::to_string(report.queries.size()) + (report.queries.size() == 1 ? " query" : " queries") + "\n";
    for (const auto &q : report.queries) {
        out += "\n[" + std::to_string(q.index) + "] " + q.kind + " " + q.subject + "\n";
        if (q.ok()) {
            std::visit(detail::ResultToText{report.tolerance, out}, std::get<QueryResult>(q.outcome));
        } else {
            const auto &f = std::get<QueryFailure>(q.outcome);
            out += "    error (" + std::string(to_string(f.kind)) + "): " + f.message + "\n";
        }
    }
    return out;
}

} // namespace chist
