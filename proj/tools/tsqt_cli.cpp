// Copyright 2026 The tsqt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// tsqt: run pre-/post-selected scenarios from the command line.
//
//   tsqt list
//   tsqt run <builtin-name|scenario.json> [--samples N] [--seed S] [--tol T]
//            [--mode gated|ungated] [--format table|json] [--threads K]
//   tsqt dump <builtin-name>
//
// Exit status: 0 all expectations pass, 1 some expectation failed, 2 bad input.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "tsqt/tsqt.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Time-symmetric counterfactual reasoning on small Hilbert spaces"};
    app.require_subcommand(1);

    auto *list = app.add_subcommand("list", "List the built-in scenarios");

    auto *run = app.add_subcommand("run", "Run a built-in scenario or a scenario file");
    std::string target;
    tsqt::ReportOptions opt;
    std::string format = "table";
    run->add_option("scenario", target, "Built-in name or path to a scenario JSON file")->required();
    run->add_option("--samples", opt.samples, "Monte Carlo samples per montecarlo query")
        ->default_val(100000)
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", opt.seed, "Monte Carlo seed")->default_val(0);
    run->add_option("--tol", opt.tolerance, "Tolerance for declared expectations")
        ->default_val(1e-9)
        ->check(CLI::PositiveNumber);
    run->add_option("--mode", opt.mode, "Counterfactual semantics")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, tsqt::GateMode>{{"gated", tsqt::GateMode::Gated}, {"ungated", tsqt::GateMode::Ungated}},
            CLI::ignore_case))
        ->default_str("gated");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}))->default_val("table");
    run->add_option("--threads", opt.threads, "Worker threads for Monte Carlo sampling")->default_val(1)->check(
        CLI::Range(1u, 256u));

    auto *dump = app.add_subcommand("dump", "Print a built-in scenario as JSON");
    std::string dump_name;
    dump->add_option("name", dump_name, "Built-in name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*list) {
            for (const auto &[name, description] : tsqt::list_builtin()) std::cout << name << "  " << description << "\n";
            return 0;
        }
        if (*dump) {
            std::cout << tsqt::save_scenario(tsqt::load_builtin(dump_name));
            return 0;
        }
        const tsqt::Scenario scenario =
            tsqt::is_builtin(target) ? tsqt::load_builtin(target) : tsqt::load_scenario_file(target);
        const tsqt::Report report = tsqt::run_report(scenario, opt);
        std::cout << (format == "json" ? tsqt::render_json(report) : tsqt::render_table(report));
        return report.pass() ? 0 : 1;
    } catch (const tsqt::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
