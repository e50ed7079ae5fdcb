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


#include "fdrelay/experiment.hpp"
#include "fdrelay/rates.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace fdrelay;

namespace {

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        parse(text).validate();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string csv(const std::vector<CsvRow>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

const CsvRow* find(const std::vector<CsvRow>& rows, const std::string& metric, const std::string& sweep = "") {
    for (const auto& r : rows)
        if (r.metric == metric && (sweep.empty() || r.sweep_value == sweep)) return &r;
    return nullptr;
}

const char* kSmall = R"(# small mixed scenario
[scenario]
name = small
sweep = system.coherence
values = 20, 40
estimators = ice, cce
profile = geometry
metrics = mc_rate, bound_mc, approx, lower_bound
trials = 12
drops = 3
seed = 5

[system]
pairs = 2
antennas = 16
)";

}  // namespace

TEST_CASE("config parsing and unit conversion") {
    const Scenario s = parse(R"(
# comment line
[scenario]
name = demo          # trailing comment
metrics = approx

[system]
pairs = 3
antennas = 64
user_power = 13
relay_li = 5
user_noise = off
inter_user = -3
coherence = 60
)");
    CHECK(s.name == "demo");
    CHECK(s.get("system.pairs") == "3");
    CHECK(s.get("scenario.power") == "uniform");
    const ScenarioPoint p = s.resolve("", "");
    CHECK(p.config.pairs == 3);
    CHECK(p.config.rx_antennas == 64);
    CHECK(p.config.tx_antennas == 64);
    CHECK(p.config.coherence == 60);
    CHECK(p.config.training == 6);
    CHECK(p.config.composite_training == 3);
    CHECK(p.config.user_power == doctest::Approx(std::pow(10.0, 1.3)));
    CHECK(p.config.pilot_power == doctest::Approx(p.config.user_power));
    CHECK(p.config.relay_power == doctest::Approx(3 * p.config.user_power));
    CHECK(p.config.relay_li == doctest::Approx(std::sqrt(10.0)));
    CHECK(p.config.user_interference(0, 0) == doctest::Approx(std::sqrt(10.0)));
    CHECK(p.config.user_interference(0, 2) == doctest::Approx(std::pow(10.0, -0.3)));
    CHECK(p.config.user_interference(0, 1) == 0.0);
    CHECK(p.config.user_noise == 0.0);
    CHECK(p.config.relay_noise == 1.0);
    CHECK(p.p_s_max == doctest::Approx(p.config.user_power));
    CHECK(p.p_r_max == doctest::Approx(3 * p.config.user_power));
}

TEST_CASE("separate antenna counts and explicit powers") {
    const ScenarioPoint p = parse(R"(
[system]
rx_antennas = 40
tx_antennas = 80
relay_power = 20
pilot_power = 0
self_li = 0
training = 12
)").resolve("", "");
    CHECK(p.config.rx_antennas == 40);
    CHECK(p.config.tx_antennas == 80);
    CHECK(p.config.relay_power == doctest::Approx(100.0));
    CHECK(p.config.pilot_power == doctest::Approx(1.0));
    CHECK(p.config.user_interference(0, 0) == doctest::Approx(1.0));
    CHECK(p.config.training == 12);
}

TEST_CASE("special-eta relay power") {
    const ScenarioPoint p = parse("[scenario]\npower = special-eta\n[system]\ninter_user = 0\n").resolve("", "");
    const double eta = special_scenario_params(p.config).eta;
    CHECK(eta / 5 == doctest::Approx(0.952).epsilon(1e-3));
    CHECK(p.config.relay_power == doctest::Approx(eta * 10.0));
    CHECK(error_of("[scenario]\npower = special-eta\n[system]\nrelay_power = 20\n").find("relay_power") !=
          std::string::npos);
}

TEST_CASE("value lists and ranges") {
    Scenario s = parse("[scenario]\nsweep = system.relay_power\nvalues = 5:25:0.1\n");
    const auto v = s.sweep_values();
    REQUIRE(v.size() == 201);
    CHECK(v.front() == "5");
    CHECK(v[1] == "5.1");
    CHECK(v.back() == "25");
    s.set("scenario.values", "1:8:1");
    CHECK(s.sweep_values().size() == 8);
    s.set("scenario.values", " 3 , 7,11 ");
    CHECK(s.sweep_values() == std::vector<std::string>{"3", "7", "11"});
    s.set("scenario.values", "1:8");
    CHECK_THROWS_AS(s.sweep_values(), ConfigError);
    s.set("scenario.values", "8:1:1");
    CHECK_THROWS_AS(s.sweep_values(), ConfigError);
    s.set("scenario.values", "");
    CHECK_THROWS_AS(s.sweep_values(), ConfigError);
    CHECK(parse("").sweep_values() == std::vector<std::string>{""});
}

TEST_CASE("parse errors carry the line number") {
    CHECK(error_of("[system]\npairs = 2\nbogus = 1\n").find("test.cfg:3:") == 0);
    CHECK(error_of("[system]\npairs = 2\nbogus = 1\n").find("unknown setting 'system.bogus'") != std::string::npos);
    CHECK(error_of("[system]\npairs = 2\npairs = 3\n").find("test.cfg:3: duplicate key") == 0);
    CHECK(error_of("\n[system\n").find("test.cfg:2: malformed section") == 0);
    CHECK(error_of("[]\n").find("test.cfg:1: empty section") == 0);
    CHECK(error_of("[system]\npairs 2\n").find("test.cfg:2: expected key = value") == 0);
    CHECK(error_of("[scenario]\nname = a,b\n").find("test.cfg:2:") == 0);
    CHECK(error_of("[scenario]\n = 4\n").find("missing key") != std::string::npos);
}

TEST_CASE("resolution errors") {
    CHECK(error_of("[system]\npairs = two\n").find("system.pairs") != std::string::npos);
    CHECK(error_of("[system]\npairs = 0\n").find("system.pairs") != std::string::npos);
    CHECK(error_of("[system]\nuser_power = loud\n").find("system.user_power") != std::string::npos);
    CHECK(error_of("[system]\ntraining = 3\n").find("2K") != std::string::npos);
    CHECK(error_of("[system]\ncoherence = 10\n").find("coherence") != std::string::npos);
    CHECK(error_of("[scenario]\nestimators = mmse\n").find("unknown estimator") != std::string::npos);
    CHECK(error_of("[scenario]\npower = greedy\n").find("unknown mode") != std::string::npos);
    CHECK(error_of("[scenario]\nprofile = ring\n").find("unknown profile") != std::string::npos);
    CHECK(error_of("[scenario]\nsic = maybe\n").find("unknown mode") != std::string::npos);
    CHECK(error_of("[scenario]\nmetrics = speed\n").find("unknown metric") != std::string::npos);
    CHECK(error_of("[scenario]\nmetrics = allocation\n").find("sumrate or maxmin") != std::string::npos);
    CHECK(error_of("[scenario]\nmetrics = special\nprofile = geometry\n").find("unit profile") != std::string::npos);
    CHECK(error_of("[scenario]\nmetrics = crossover\n[system]\ncomposite_training = 6\n").find("training / 2") !=
          std::string::npos);
    CHECK(error_of("[scenario]\nseed = -4\n").find("seed") != std::string::npos);
    CHECK(error_of("[scenario]\nper_drop = sometimes\n").find("true or false") != std::string::npos);
    CHECK(error_of("[scenario]\nsweep = scenario.values\nvalues = 1\n").find("cannot sweep") != std::string::npos);
    CHECK(error_of("[scenario]\nsweep = system.nothing\nvalues = 1\n").find("cannot sweep") != std::string::npos);
    CHECK(error_of("[geometry]\nbreakpoint = 0\n").find("geometry") != std::string::npos);
    CHECK(error_of("[allocation]\neps = 0\n").find("eps") != std::string::npos);
    CHECK(error_of("[scenario]\nmetrics = approx\n").empty());
}

TEST_CASE("unit profiles use a single drop") {
    const ScenarioPoint p = parse("[scenario]\ndrops = 50\n").resolve("", "");
    CHECK(p.drops == 1);
    const ScenarioPoint g = parse("[scenario]\ndrops = 50\nprofile = geometry\n").resolve("", "");
    CHECK(g.drops == 50);
}

TEST_CASE("every preset validates") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const Scenario s = preset(name);
        CHECK(s.name == name);
        CHECK_NOTHROW(s.validate());
    }
    CHECK(preset_names().size() == 7);
    try {
        preset("fig9");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown preset 'fig9'") != std::string::npos);
        CHECK(std::string(e.what()).find("fig2") != std::string::npos);
    }
}

TEST_CASE("zero trials give the header only") {
    const std::string out = csv(run_scenario(preset("fig4"), RunOptions{.trials = 0}));
    CHECK(out == std::string(kCsvHeader) + "\n");
    CHECK(std::string(kCsvHeader) == "scenario,sweep_var,sweep_value,metric,value,stderr,seed");
    CHECK(render_report(preset("fig4"), {}).find("no rows") != std::string::npos);
    CHECK_THROWS_AS(run_scenario(preset("fig8"), RunOptions{.trials = -1}), ConfigError);
}

TEST_CASE("runs are reproducible and thread-count independent") {
    const Scenario s = parse(kSmall);
    const std::string one = csv(run_scenario(s, RunOptions{.threads = 1}));
    const std::string again = csv(run_scenario(s, RunOptions{.threads = 1}));
    const std::string three = csv(run_scenario(s, RunOptions{.threads = 3}));
    CHECK(one == again);
    CHECK(one == three);
    const auto other = run_scenario(s, RunOptions{.seed = 6});
    CHECK(csv(other) != one);
    CHECK(other.front().seed == 6);
}

TEST_CASE("rows of a mixed scenario") {
    const auto rows = run_scenario(parse(kSmall));
    // 2 coherence points x (2 mc + 2 bound + 2 approx + 1 lower bound)
    CHECK(rows.size() == 14);
    for (const auto& r : rows) {
        CHECK(r.scenario == "small");
        CHECK(r.sweep_var == "system.coherence");
        CHECK(r.seed == 5);
        CHECK(std::isfinite(r.value));
        CHECK(r.std_error >= 0.0);
    }
    // rates at two coherence intervals differ only by the payload fraction
    for (const char* m : {"mc_rate_ice", "approx_rate_cce", "lower_bound_rate", "bound_mc_rate_ice"}) {
        CAPTURE(m);
        const auto* a = find(rows, m, "20");
        const auto* b = find(rows, m, "40");
        REQUIRE(a);
        REQUIRE(b);
        const double tau = std::string(m).find("cce") != std::string::npos ? 2.0 : 4.0;
        CHECK(a->value / b->value == doctest::Approx((20.0 - tau) / 20.0 / ((40.0 - tau) / 40.0)));
    }
    CHECK(find(rows, "mc_rate_ice", "20")->std_error > 0.0);
}

TEST_CASE("series suffix and unswept scenarios") {
    Scenario s = parse("[scenario]\nseries = system.antennas\nseries_values = 20,40\nmetrics = approx\n");
    const auto rows = run_scenario(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].metric == "approx_rate_ice@antennas=20");
    CHECK(rows[1].metric == "approx_rate_ice@antennas=40");
    CHECK(rows[0].sweep_var == "none");
    CHECK(rows[0].sweep_value == "-");
    CHECK(rows[1].value > rows[0].value);
}

TEST_CASE("allocation scenario rows") {
    Scenario s = preset("fig6");
    s.set("scenario.drops", "3");
    s.set("system.antennas", "50");
    const auto rows = run_scenario(s);
    for (const char* m : {"sum_rate_uniform_median", "sum_rate_opt_median", "sum_rate_gain_median",
                          "objective_monotone", "zero_sinr_stop_count", "outer_iterations",
                          "sum_rate_gain/drop=0", "sum_rate_gain/drop=2"})
        CHECK_MESSAGE(find(rows, m) != nullptr, m);
    CHECK(find(rows, "objective_monotone")->value == 1.0);
    CHECK(find(rows, "sum_rate_gain_median")->value >= 0.0);

    Scenario mm = preset("fig7");
    mm.set("scenario.drops", "2");
    mm.set("scenario.per_drop", "false");
    const auto mrows = run_scenario(mm);
    CHECK(find(mrows, "min_sinr_gain_db_median") != nullptr);
    CHECK(find(mrows, "sinr_spread_max")->value < 1e-3);
    CHECK(find(mrows, "min_sinr_gain_db/drop=0") == nullptr);
}

TEST_CASE("crossover rows") {
    Scenario s = parse(R"(
[scenario]
estimators = ice, cce
metrics = crossover, crossover_mc, approx
trials = 400
[system]
antennas = 50
)");
    const auto rows = run_scenario(s);
    const auto* g = find(rows, "crossover_g");
    const auto* tc = find(rows, "crossover_tc");
    const auto* mc = find(rows, "crossover_mc_tc");
    REQUIRE(g);
    REQUIRE(tc);
    REQUIRE(mc);
    CHECK(tc->value == doctest::Approx(crossover_from_ratio(g->value, 10).coherence));
    CHECK(mc->value == doctest::Approx(tc->value).epsilon(0.1));
    CHECK(find(rows, "xo_full") == nullptr);
}

TEST_CASE("report for the relay power preset") {
    const Scenario s = preset("fig8");
    const auto rows = run_scenario(s);
    const std::string report = render_report(s, rows);
    CHECK(report.find("scenario: fig8") != std::string::npos);
    CHECK(report.find("checks: 2 passed, 0 failed") != std::string::npos);
    CHECK(find(rows, "eta_over_k@user_power=10")->value == doctest::Approx(0.952).epsilon(0.005));
}

TEST_CASE("CSV formatting") {
    std::ostringstream out;
    write_csv(out, {{"a", "system.pairs", "3", "m", 0.1, 1.0 / 3.0, 9}});
    CHECK(out.str() == std::string(kCsvHeader) + "\na,system.pairs,3,m,0.1,0.3333333333,9\n");
}
