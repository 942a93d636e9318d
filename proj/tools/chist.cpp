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

// chist: validate and run consistent-histories scenarios.
//
// Exit status: 0 success, 1 invalid scenario or usage, 2 a query failed,
// 3 file I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chist/builtin.hpp"
#include "chist/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitQuery = 2;
constexpr int kExitIo = 3;

int exit_code_for(const chist::Error &e) { return e.kind() == chist::ErrorKind::Io ? kExitIo : kExitInvalid; }

int report_error(const chist::Error &e) {
    std::cerr << "error (" << chist::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e);
}

// "RE,IM" or "RE".
chist::Complex parse_amplitude(const std::string &text) {
    const auto comma = text.find(',');
    try {
        std::size_t used = 0;
        const std::string re = text.substr(0, comma);
        const double r = std::stod(re, &used);
        if (used != re.size()) {
            throw std::invalid_argument(text);
        }
        if (comma == std::string::npos) {
            return {r, 0.0};
        }
        const std::string im = text.substr(comma + 1);
        const double i = std::stod(im, &used);
        if (used != im.size()) {
            throw std::invalid_argument(text);
        }
        return {r, i};
    } catch (const std::logic_error &) {
        throw chist::Error(chist::ErrorKind::Validation, "amplitude '" + text + "' is not of the form RE,IM");
    }
}

int run_and_print(const chist::Scenario &scenario, const std::string &format, std::optional<double> tol) {
    const chist::Report report = chist::run(scenario, {tol});
    std::cout << (format == "json" ? chist::emit_json(report) : chist::emit_human(report));
    std::cout.flush();
    return report.ok() ? kExitOk : kExitQuery;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Consistent-histories engine: validate and run scenario files"};
    app.require_subcommand(1);

    std::string file;
    std::string format = "human";
    std::optional<double> tol;

    auto *validate = app.add_subcommand("validate", "Load and validate a scenario file");
    validate->add_option("file", file, "Scenario file (JSON)")->required();

    auto *run = app.add_subcommand("run", "Run every query of a scenario file");
    run->add_option("file", file, "Scenario file (JSON)")->required();

    std::string demo_name;
    std::string alpha_text;
    std::string beta_text;
    std::string export_path;
    auto *demo = app.add_subcommand("demo", "Run a built-in scenario");
    demo->add_option("name", demo_name, "Demo name (see list-demos)")->required();
    demo->add_option("--alpha", alpha_text, "Stern-Gerlach spin-up amplitude RE,IM");
    demo->add_option("--beta", beta_text, "Stern-Gerlach spin-down amplitude RE,IM");
    demo->add_option("--export", export_path, "Write the scenario in explicit form to this file");

    for (auto *sub : {run, demo}) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "json"}));
        sub->add_option("--tol", tol, "Consistency tolerance (overrides the scenario)")
            ->check(CLI::PositiveNumber);
    }

    app.add_subcommand("list-demos", "List the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (app.got_subcommand("list-demos")) {
            for (const auto &d : chist::demos::list()) {
                std::printf("%-15s %s\n", d.name, d.summary);
            }
            return kExitOk;
        }
        if (validate->parsed()) {
            const chist::Scenario s = chist::load_scenario(file);
            auto count = [](std::size_t n, const char *one, const char *many) {
                return std::to_string(n) + " " + (n == 1 ? one : many);
            };
            std::cout << "ok: " << s.name << " (" << count(s.families.size(), "family", "families") << ", "
                      << count(s.queries.size(), "query", "queries") << ", dim " << s.space().total_dim() << ", " << s.digest
                      << ")\n";
            return kExitOk;
        }
        if (run->parsed()) {
            return run_and_print(chist::load_scenario(file), format, tol);
        }
        // demo
        if ((!alpha_text.empty() || !beta_text.empty()) && demo_name != "stern_gerlach") {
            throw chist::Error(chist::ErrorKind::Validation, "--alpha/--beta only apply to the stern_gerlach demo");
        }
        const chist::Complex alpha = alpha_text.empty() ? chist::Complex{0.6} : parse_amplitude(alpha_text);
        const chist::Complex beta = beta_text.empty() ? chist::Complex{0.8} : parse_amplitude(beta_text);
        const chist::Scenario s = chist::parse_scenario(chist::demos::by_name(demo_name, alpha, beta));
        if (!export_path.empty()) {
            std::ofstream out(export_path, std::ios::binary);
            out << chist::export_scenario(s).dump(2) << "\n";
            out.close();
            if (!out) {
                throw chist::Error(chist::ErrorKind::Io, "cannot write '" + export_path + "'");
            }
        }
        return run_and_print(s, format, tol);
    } catch (const chist::Error &e) {
        return report_error(e);
    }
}
