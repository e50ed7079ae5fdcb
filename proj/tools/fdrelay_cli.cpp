// SPDX-License-Identifier: Apache-2.0
//
// fdrelay: analysis and simulation of multi-pair two-way full-duplex
// amplify-and-forward relaying with large antenna arrays.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Usage:
//   fdrelay run scenario.cfg --out rates.csv
//   fdrelay preset fig4 --trials 20 --seed 7 --threads 4
//   fdrelay preset list

#include "fdrelay/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>

namespace {

int execute(const fdrelay::Scenario& scenario, const fdrelay::RunOptions& options, const std::string& out_path,
            const std::string& report_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = fdrelay::run_scenario(scenario, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (out_path.empty() || out_path == "-") {
        fdrelay::write_csv(std::cout, rows);
    } else {
        std::ofstream out(out_path);
        if (!out) throw fdrelay::ConfigError("cannot write '" + out_path + "'");
        fdrelay::write_csv(out, rows);
    }

    const std::string report = fdrelay::render_report(scenario, rows);
    std::string target = report_path;
    if (target.empty() && !out_path.empty() && out_path != "-") target = out_path + ".report.txt";
    if (target.empty()) {
        std::cerr << report;
    } else {
        std::ofstream rep(target);
        if (!rep) throw fdrelay::ConfigError("cannot write '" + target + "'");
        rep << report;
    }
    std::cerr << "fdrelay: " << scenario.name << ": " << rows.size() << " rows in " << seconds << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-pair two-way full-duplex AF relaying: sweeps, rates and power allocation"};
    app.require_subcommand(1);
    app.fallthrough();  // subcommands accept the global flags

    std::int64_t seed = -1;
    int trials = -1;
    int threads = 1;
    std::string out_path, report_path;
    app.add_option("--seed", seed, "Master seed (overrides scenario.seed)")->check(CLI::NonNegativeNumber);
    app.add_option("--trials", trials, "Monte Carlo trials per drop; 0 emits the CSV header only")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "CSV output path (default stdout)");
    app.add_option("--report", report_path, "Report path (default <out>.report.txt, or stderr)");

    std::string config_path, preset_name;
    auto* run = app.add_subcommand("run", "Run a scenario from a key/value config file");
    run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    auto* pre = app.add_subcommand("preset", "Run a bundled preset (or 'list')");
    pre->add_option("name", preset_name, "Preset name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (pre->parsed() && preset_name == "list") {
            for (const auto& n : fdrelay::preset_names()) std::cout << n << '\n';
            return 0;
        }
        const fdrelay::Scenario scenario =
            run->parsed() ? fdrelay::load_scenario(config_path) : fdrelay::preset(preset_name);
        scenario.validate();

        fdrelay::RunOptions options;
        options.threads = threads;
        if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
        if (trials >= 0) options.trials = trials;
        return execute(scenario, options, out_path, report_path);
    } catch (const std::exception& e) {
        std::cerr << "fdrelay: error: " << e.what() << '\n';
        return 2;
    }
}
