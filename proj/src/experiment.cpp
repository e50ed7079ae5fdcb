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

#include "fdrelay/channel.hpp"
#include "fdrelay/power.hpp"
#include "fdrelay/rates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace fdrelay {

namespace {

constexpr std::uint64_t kGeometryStream = 0x6e0;
constexpr std::uint64_t kTrialStream = 0x7a1;

const std::set<std::string> kMetrics = {"mc_rate",   "bound_mc",     "lower_bound", "approx", "approx_sinr",
                                        "crossover", "crossover_mc", "allocation", "special"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v, int lo) {
    const long long x = parse_integer(key, v);
    if (x < lo || x > std::numeric_limits<int>::max())
        throw ConfigError(key + ": must be an integer >= " + std::to_string(lo));
    return int(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string s = lower(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

// dB value, or "off" for an exact zero.
double parse_db(const std::string& key, const std::string& v) {
    if (lower(v) == "off") return 0.0;
    return db_to_linear(parse_double(key, v));
}

// "a, b, c" or "start:stop:step".
std::vector<std::string> expand_values(const std::string& key, const std::string& v) {
    if (v.find(':') == std::string::npos) return split_list(v);
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 3) throw ConfigError(key + ": range must be start:stop:step");
    const double a = parse_double(key, parts[0]), b = parse_double(key, parts[1]), h = parse_double(key, parts[2]);
    if (!(h > 0.0) || b < a) throw ConfigError(key + ": range needs step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (n > 100000) throw ConfigError(key + ": range has too many points");
    std::vector<std::string> out;
    for (long long i = 0; i < n; ++i) out.push_back(format_number(a + double(i) * h));
    return out;
}

std::string key_tail(const std::string& key) {
    const auto dot = key.rfind('.');
    return dot == std::string::npos ? key : key.substr(dot + 1);
}

Estimation parse_estimator(const std::string& v) {
    const std::string s = lower(v);
    if (s == "ice") return Estimation::Individual;
    if (s == "cce") return Estimation::Composite;
    throw ConfigError("scenario.estimators: unknown estimator '" + v + "' (ice, cce)");
}

std::string estimator_tag(Estimation e) { return e == Estimation::Individual ? "ice" : "cce"; }

PowerMode parse_power(const std::string& v) {
    const std::string s = lower(v);
    if (s == "uniform") return PowerMode::Uniform;
    if (s == "sumrate" || s == "sumrate-opt") return PowerMode::SumRate;
    if (s == "maxmin" || s == "maxmin-opt") return PowerMode::MaxMin;
    if (s == "special-eta" || s == "eta") return PowerMode::SpecialEta;
    throw ConfigError("scenario.power: unknown mode '" + v + "' (uniform, sumrate, maxmin, special-eta)");
}

ProfileKind parse_profile(const std::string& v) {
    const std::string s = lower(v);
    if (s == "unit") return ProfileKind::Unit;
    if (s == "geometry") return ProfileKind::Geometry;
    if (s == "pair-geometry") return ProfileKind::PairGeometry;
    throw ConfigError("scenario.profile: unknown profile '" + v + "' (unit, geometry, pair-geometry)");
}

SelfInterference parse_sic(const std::string& v) {
    const std::string s = lower(v);
    if (s == "perfect") return SelfInterference::Perfect;
    if (s == "pair-csi") return SelfInterference::PairCsi;
    if (s == "none") return SelfInterference::None;
    throw ConfigError("scenario.sic: unknown mode '" + v + "' (perfect, pair-csi, none)");
}

bool structural_key(const std::string& key) {
    return key == "scenario.name" || key == "scenario.sweep" || key == "scenario.values" ||
           key == "scenario.series" || key == "scenario.series_values";
}

}  // namespace

const char* to_string(PowerMode mode) {
    switch (mode) {
        case PowerMode::Uniform: return "uniform";
        case PowerMode::SumRate: return "sumrate";
        case PowerMode::MaxMin: return "maxmin";
        case PowerMode::SpecialEta: return "special-eta";
    }
    return "?";
}

const char* to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Unit: return "unit";
        case ProfileKind::Geometry: return "geometry";
        case ProfileKind::PairGeometry: return "pair-geometry";
    }
    return "?";
}

bool ScenarioPoint::wants(const std::string& metric) const {
    return std::find(metrics.begin(), metrics.end(), metric) != metrics.end();
}

const std::map<std::string, std::string>& default_settings() {
    static const std::map<std::string, std::string> defaults = {
        {"scenario.name", "custom"},
        {"scenario.sweep", "none"},
        {"scenario.values", ""},
        {"scenario.series", "none"},
        {"scenario.series_values", ""},
        {"scenario.estimators", "ice"},
        {"scenario.power", "uniform"},
        {"scenario.profile", "unit"},
        {"scenario.beta", "1"},
        {"scenario.metrics", "mc_rate"},
        {"scenario.trials", "1000"},
        {"scenario.drops", "1"},
        {"scenario.seed", "1"},
        {"scenario.sic", "perfect"},
        {"scenario.per_drop", "false"},
        {"system.pairs", "5"},
        {"system.antennas", ""},
        {"system.rx_antennas", "100"},
        {"system.tx_antennas", "100"},
        {"system.coherence", "100"},
        {"system.training", "auto"},
        {"system.composite_training", "auto"},
        {"system.user_power", "10"},
        {"system.pilot_power", "auto"},
        {"system.relay_power", "auto"},
        {"system.user_noise", "0"},
        {"system.relay_noise", "0"},
        {"system.relay_li", "5"},
        {"system.self_li", "auto"},
        {"system.inter_user", "0"},
        {"geometry.max_distance", "500"},
        {"geometry.shadow", "8"},
        {"geometry.breakpoint", "200"},
        {"geometry.exponent", "3.8"},
        {"allocation.user_power_max", "auto"},
        {"allocation.relay_power_max", "auto"},
        {"allocation.eps", "0.001"},
        {"allocation.max_outer", "5"},
    };
    return defaults;
}

std::string Scenario::get(const std::string& key) const {
    if (auto it = settings.find(key); it != settings.end()) return it->second;
    const auto& d = default_settings();
    if (auto it = d.find(key); it != d.end()) return it->second;
    throw ConfigError("unknown setting '" + key + "'");
}

void Scenario::set(const std::string& key, const std::string& value) {
    if (!default_settings().contains(key)) throw ConfigError("unknown setting '" + key + "'");
    if (key == "scenario.name") {
        if (value.empty() || value.find_first_of(",\"\n\r") != std::string::npos)
            throw ConfigError("scenario.name must be nonempty without commas or quotes");
        name = value;
    }
    settings[key] = value;
}

std::vector<std::string> Scenario::sweep_values() const {
    if (sweep_var() == "none") return {""};
    auto v = expand_values("scenario.values", get("scenario.values"));
    if (v.empty()) throw ConfigError("scenario.values: sweep '" + sweep_var() + "' has no values");
    return v;
}

std::vector<std::string> Scenario::series_values() const {
    if (series_var() == "none") return {""};
    auto v = expand_values("scenario.series_values", get("scenario.series_values"));
    if (v.empty()) throw ConfigError("scenario.series_values: series '" + series_var() + "' has no values");
    return v;
}

ScenarioPoint Scenario::resolve(const std::string& series_value, const std::string& sweep_value) const {
    Scenario s = *this;
    for (const auto& [var, value] : {std::pair{series_var(), series_value}, std::pair{sweep_var(), sweep_value}}) {
        if (var == "none") continue;
        if (structural_key(var) || !default_settings().contains(var))
            throw ConfigError("cannot sweep over '" + var + "'");
        s.settings[var] = value;
    }

    ScenarioPoint p;
    SystemConfig& c = p.config;
    c.pairs = parse_int("system.pairs", s.get("system.pairs"), 1);
    if (const std::string n = s.get("system.antennas"); !n.empty()) {
        c.rx_antennas = c.tx_antennas = parse_int("system.antennas", n, 1);
    } else {
        c.rx_antennas = parse_int("system.rx_antennas", s.get("system.rx_antennas"), 1);
        c.tx_antennas = parse_int("system.tx_antennas", s.get("system.tx_antennas"), 1);
    }
    c.coherence = parse_int("system.coherence", s.get("system.coherence"), 1);
    const std::string tr = s.get("system.training"), ctr = s.get("system.composite_training");
    c.training = tr == "auto" ? c.users() : parse_int("system.training", tr, 1);
    c.composite_training = ctr == "auto" ? c.pairs : parse_int("system.composite_training", ctr, 1);
    c.user_power = parse_db("system.user_power", s.get("system.user_power"));
    const std::string pp = s.get("system.pilot_power");
    c.pilot_power = pp == "auto" ? c.user_power : parse_db("system.pilot_power", pp);
    c.user_noise = parse_db("system.user_noise", s.get("system.user_noise"));
    c.relay_noise = parse_db("system.relay_noise", s.get("system.relay_noise"));
    c.relay_li = parse_db("system.relay_li", s.get("system.relay_li"));
    const std::string sl = s.get("system.self_li");
    const double self_li = sl == "auto" ? c.relay_li : parse_db("system.self_li", sl);
    c.user_interference =
        uniform_user_interference(c.pairs, self_li, parse_db("system.inter_user", s.get("system.inter_user")));

    p.power = parse_power(s.get("scenario.power"));
    const std::string pr = s.get("system.relay_power");
    if (p.power == PowerMode::SpecialEta) {
        if (pr != "auto") throw ConfigError("system.relay_power must be auto with power mode special-eta");
        c.relay_power = special_scenario_params(c).eta * c.user_power;
    } else {
        c.relay_power = pr == "auto" ? c.pairs * c.user_power : parse_db("system.relay_power", pr);
    }
    c.validate();

    p.profile = parse_profile(s.get("scenario.profile"));
    p.beta = parse_double("scenario.beta", s.get("scenario.beta"));
    if (!(p.beta > 0.0)) throw ConfigError("scenario.beta must be positive");
    p.geometry.max_distance = parse_double("geometry.max_distance", s.get("geometry.max_distance"));
    p.geometry.shadow_db = parse_double("geometry.shadow", s.get("geometry.shadow"));
    p.geometry.breakpoint = parse_double("geometry.breakpoint", s.get("geometry.breakpoint"));
    p.geometry.exponent = parse_double("geometry.exponent", s.get("geometry.exponent"));
    if (!(p.geometry.max_distance >= 0.0) || !(p.geometry.shadow_db >= 0.0) || !(p.geometry.breakpoint > 0.0))
        throw ConfigError("geometry: need max_distance >= 0, shadow >= 0, breakpoint > 0");

    for (const auto& e : split_list(s.get("scenario.estimators"))) {
        const Estimation est = parse_estimator(e);
        if (std::find(p.estimators.begin(), p.estimators.end(), est) == p.estimators.end())
            p.estimators.push_back(est);
    }
    if (p.estimators.empty()) throw ConfigError("scenario.estimators must list ice and/or cce");
    p.sic = parse_sic(s.get("scenario.sic"));
    for (const auto& m : split_list(s.get("scenario.metrics"))) {
        if (!kMetrics.contains(m)) throw ConfigError("scenario.metrics: unknown metric '" + m + "'");
        if (!p.wants(m)) p.metrics.push_back(m);
    }
    if (p.metrics.empty()) throw ConfigError("scenario.metrics must not be empty");
    if (p.wants("allocation") && p.power != PowerMode::SumRate && p.power != PowerMode::MaxMin)
        throw ConfigError("metric allocation needs power mode sumrate or maxmin");
    if (p.wants("special") && p.profile != ProfileKind::Unit)
        throw ConfigError("metric special needs the unit profile");
    if (p.wants("crossover") && 2 * c.composite_training != c.training)
        throw ConfigError("metric crossover needs composite_training = training / 2");

    p.trials = parse_int("scenario.trials", s.get("scenario.trials"), 0);
    p.drops = parse_int("scenario.drops", s.get("scenario.drops"), 1);
    if (p.profile == ProfileKind::Unit) p.drops = 1;
    const long long seed = parse_integer("scenario.seed", s.get("scenario.seed"));
    if (seed < 0) throw ConfigError("scenario.seed must be nonnegative");
    p.seed = static_cast<std::uint64_t>(seed);
    p.per_drop = parse_bool("scenario.per_drop", s.get("scenario.per_drop"));

    const std::string psm = s.get("allocation.user_power_max"), prm = s.get("allocation.relay_power_max");
    p.p_s_max = psm == "auto" ? c.user_power : parse_db("allocation.user_power_max", psm);
    p.p_r_max = prm == "auto" ? c.pairs * p.p_s_max : parse_db("allocation.relay_power_max", prm);
    if (!(p.p_s_max > 0.0) || !(p.p_r_max > 0.0)) throw ConfigError("allocation: peak powers must be positive");
    p.eps = parse_double("allocation.eps", s.get("allocation.eps"));
    if (!(p.eps > 0.0)) throw ConfigError("allocation.eps must be positive");
    p.max_outer = parse_int("allocation.max_outer", s.get("allocation.max_outer"), 1);
    return p;
}

void Scenario::validate() const {
    for (const auto& sv : series_values())
        for (const auto& v : sweep_values()) resolve(sv, v);
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario s;
    s.name = "custom";
    std::string line, section;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string k = trim(line.substr(0, eq));
        if (k.empty()) throw ConfigError(where + "missing key");
        const std::string key = section.empty() ? k : section + "." + k;
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            s.set(key, trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_scenario(in, path);
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}; }

Scenario preset(const std::string& name) {
    std::map<std::string, std::string> kv;
    if (name == "fig2") {
        kv = {{"scenario.sweep", "system.pairs"},       {"scenario.values", "1:8:1"},
              {"scenario.series", "system.antennas"},   {"scenario.series_values", "50,200"},
              {"scenario.power", "special-eta"},        {"scenario.metrics", "mc_rate,lower_bound,approx"},
              {"scenario.trials", "300"}};
    } else if (name == "fig3") {
        kv = {{"scenario.sweep", "system.antennas"},   {"scenario.values", "10,20,50,100,200,300,400,500"},
              {"scenario.series", "system.relay_li"},  {"scenario.series_values", "5,10"},
              {"scenario.power", "special-eta"},       {"scenario.metrics", "mc_rate,lower_bound,approx"},
              {"scenario.trials", "300"}};
    } else if (name == "fig4") {
        kv = {{"scenario.sweep", "system.coherence"},
              {"scenario.values", "15,20,25,30,40,50,60,80,100"},
              {"scenario.series", "system.antennas"},
              {"scenario.series_values", "50,200,500"},
              {"scenario.profile", "pair-geometry"},
              {"scenario.estimators", "ice,cce"},
              {"scenario.metrics", "approx,bound_mc,crossover,crossover_mc"},
              {"scenario.drops", "200"},
              {"scenario.trials", "50"}};
    } else if (name == "fig5") {
        kv = {{"scenario.sweep", "system.antennas"},   {"scenario.values", "20,50,100,200,300,400,500"},
              {"scenario.series", "scenario.profile"}, {"scenario.series_values", "pair-geometry,geometry"},
              {"system.coherence", "15"},              {"scenario.estimators", "ice,cce"},
              {"scenario.metrics", "mc_rate,approx"},  {"scenario.drops", "100"},
              {"scenario.trials", "20"}};
    } else if (name == "fig6" || name == "fig7") {
        kv = {{"system.antennas", "200"},
              {"scenario.profile", "geometry"},
              {"scenario.power", name == "fig6" ? "sumrate" : "maxmin"},
              {"scenario.metrics", "allocation"},
              {"scenario.drops", "200"},
              {"scenario.trials", "1"},
              {"scenario.per_drop", "true"}};
    } else if (name == "fig8") {
        kv = {{"scenario.sweep", "system.relay_power"}, {"scenario.values", "5:25:0.1"},
              {"scenario.series", "system.user_power"}, {"scenario.series_values", "5,10,15"},
              {"system.antennas", "200"},               {"system.pilot_power", "10"},
              {"scenario.metrics", "approx,approx_sinr,special"},
              {"scenario.trials", "1"}};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    Scenario s;
    s.set("scenario.name", name);
    for (const auto& [k, v] : kv) s.set(k, v);
    return s;
}

namespace {

enum class Agg { Mean, Median, Max, Sum, Hidden };

// Rates are carried as log2 sums tagged with their training length and
// scaled by (T_c - tau)/T_c per point, so one drop evaluation serves every
// coherence interval.
struct Sample {
    std::string metric;
    double value = 0.0;
    double se = 0.0;
    Agg agg = Agg::Mean;
    int training = -1;
};

using DropResult = std::vector<Sample>;

LargeScaleProfile draw_profile(const ScenarioPoint& p, int drop) {
    const int K = p.config.pairs;
    LargeScaleProfile prof;
    if (p.profile == ProfileKind::Unit) {
        prof = uniform_profile(K, p.beta);
    } else {
        Rng rng(derive_seed(derive_seed(p.seed, kGeometryStream), static_cast<std::uint64_t>(drop)));
        std::uniform_real_distribution<double> where(0.0, p.geometry.max_distance);
        const GeometryParams& g = p.geometry;
        if (p.profile == ProfileKind::Geometry) {
            std::vector<double> d(static_cast<std::size_t>(2 * K));
            for (auto& x : d) x = where(rng);
            prof = large_scale_from_geometry(d, g.shadow_db, g.breakpoint, g.exponent, rng);
        } else {
            // both users of a pair share one distance and one shadowing draw
            std::vector<double> d(static_cast<std::size_t>(K));
            for (auto& x : d) x = where(rng);
            std::normal_distribution<double> shadow(0.0, 1.0);
            prof.beta_u.resize(2 * K);
            for (int m = 0; m < K; ++m) {
                const double b =
                    path_loss_gain(d[std::size_t(m)], g.shadow_db * shadow(rng), g.breakpoint, g.exponent);
                prof.beta_u(2 * m) = prof.beta_u(2 * m + 1) = b;
            }
            prof.beta_d = prof.beta_u;
        }
    }
    return estimated_large_scale(std::move(prof), p.config);
}

double log2_sum(const Eigen::VectorXd& sinr) { return (1.0 + sinr.array()).log().sum() / std::log(2.0); }

DropResult evaluate_drop(const ScenarioPoint& p, int drop) {
    const SystemConfig& c = p.config;
    const LargeScaleProfile prof = draw_profile(p, drop);
    const std::uint64_t seed = derive_seed(derive_seed(p.seed, kTrialStream), static_cast<std::uint64_t>(drop));
    DropResult out;

    if (p.wants("mc_rate")) {
        for (const Estimation e : p.estimators) {
            const int tau = c.training_length(e);
            const RateEstimate r = ergodic_sum_rate_mc(c, prof, e, p.sic, p.trials, seed);
            const double frac = double(c.coherence - tau) / double(c.coherence);
            out.push_back({"mc_rate_" + estimator_tag(e), r.mean / frac, r.std_error / frac, Agg::Mean, tau});
        }
    }
    if (p.wants("bound_mc") || p.wants("crossover_mc")) {
        std::map<Estimation, double> logsum;
        for (const Estimation e : {Estimation::Individual, Estimation::Composite}) {
            const bool listed = std::find(p.estimators.begin(), p.estimators.end(), e) != p.estimators.end();
            if (!p.wants("crossover_mc") && !listed) continue;
            logsum[e] = log2_sum(bound_sinr_mc(c, prof, e, std::max(p.trials, 2), seed));
            if (p.wants("bound_mc") && listed)
                out.push_back({"bound_mc_rate_" + estimator_tag(e), logsum[e], 0.0, Agg::Mean, c.training_length(e)});
        }
        if (p.wants("crossover_mc")) {
            out.push_back({"xo_mc_ice", logsum[Estimation::Individual], 0.0, Agg::Hidden});
            out.push_back({"xo_mc_cce", logsum[Estimation::Composite], 0.0, Agg::Hidden});
        }
    }
    if (p.wants("lower_bound"))
        out.push_back({"lower_bound_rate", log2_sum(lower_bound_sinr_exact(prof, c)), 0.0, Agg::Mean, c.training});
    if (p.wants("approx") || p.wants("approx_sinr")) {
        for (const Estimation e : p.estimators) {
            const Eigen::VectorXd g = approx_sinr_values(prof, c, e);
            if (p.wants("approx"))
                out.push_back({"approx_rate_" + estimator_tag(e), log2_sum(g), 0.0, Agg::Mean, c.training_length(e)});
            if (p.wants("approx_sinr"))
                out.push_back({"approx_min_sinr_" + estimator_tag(e) + "_db", linear_to_db(g.minCoeff())});
        }
    }
    if (p.wants("crossover")) {
        const Eigen::VectorXd g = approx_sinr_values(prof, c, Estimation::Individual);
        out.push_back({"xo_full", log2_sum(g), 0.0, Agg::Hidden});
        out.push_back({"xo_half", log2_sum(g / 2.0), 0.0, Agg::Hidden});
    }
    if (p.wants("special")) {
        const SpecialAllocation s = special_scenario_allocation(prof, c, p.p_s_max);
        out.push_back({"eta", s.eta});
        out.push_back({"eta_over_k", s.eta / c.pairs});
        out.push_back({"relay_power_eta_db", linear_to_db(s.P_R)});
        out.push_back({"relay_power_exact_db", linear_to_db(s.P_R_exact)});
    }
    if (p.wants("allocation")) {
        const PowerCoefficients co = power_coefficients(prof, c);
        const auto uniform =
            PowerAllocation::uniform(c.users(), c.user_power, c.relay_power, p.p_s_max, p.p_r_max);
        const Eigen::VectorXd g0 = sinr_with_powers(co, uniform, c);
        if (p.power == PowerMode::SumRate) {
            const SumRateResult r = maximize_sum_rate(co, c, p.p_s_max, p.p_r_max, p.eps, p.max_outer);
            const double r0 = log2_sum(g0), r1 = log2_sum(r.sinr);
            const auto& h = r.objective_history;
            const bool monotone = std::is_sorted(h.begin(), h.end());
            out.push_back({"sum_rate_uniform", r0, 0.0, Agg::Median, c.training});
            out.push_back({"sum_rate_opt", r1, 0.0, Agg::Median, c.training});
            out.push_back({"sum_rate_gain", r1 - r0, 0.0, Agg::Median, c.training});
            out.push_back({"objective_monotone", monotone ? 1.0 : 0.0, 0.0, Agg::Mean});
            out.push_back({"zero_sinr_stop", r.status == SumRateStatus::ZeroSinr ? 1.0 : 0.0, 0.0, Agg::Sum});
            out.push_back({"outer_iterations", double(r.iterations), 0.0, Agg::Mean});
        } else {
            const MaxMinResult r = max_min_fairness(co, c, p.p_s_max, p.p_r_max);
            const double lo = linear_to_db(g0.minCoeff()), hi = linear_to_db(r.min_sinr);
            out.push_back({"min_sinr_uniform_db", lo, 0.0, Agg::Median});
            out.push_back({"min_sinr_opt_db", hi, 0.0, Agg::Median});
            out.push_back({"min_sinr_gain_db", hi - lo, 0.0, Agg::Median});
            out.push_back({"sinr_spread", (r.sinr.maxCoeff() - r.sinr.minCoeff()) / r.sinr.minCoeff(), 0.0,
                           Agg::Max});
            out.push_back({"relay_power_opt_db", linear_to_db(r.alloc.P_R), 0.0, Agg::Median});
        }
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PointRow {
    std::string metric;
    double value = 0.0;
    double se = 0.0;
};

std::vector<PointRow> aggregate(const ScenarioPoint& p, const std::vector<DropResult>& drops) {
    std::vector<PointRow> out;
    if (drops.empty()) return out;
    const SystemConfig& c = p.config;
    const std::size_t D = drops.size();
    auto scale = [&](const Sample& s) {
        return s.training < 0 ? 1.0 : double(c.coherence - s.training) / double(c.coherence);
    };
    std::map<std::string, double> hidden;
    for (std::size_t i = 0; i < drops.front().size(); ++i) {
        const Sample& first = drops.front()[i];
        const double f = scale(first);
        std::vector<double> v(D);
        for (std::size_t d = 0; d < D; ++d) v[d] = f * drops[d][i].value;
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= double(D);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double spread_se = D > 1 ? std::sqrt(ss / double(D - 1) / double(D)) : 0.0;
        switch (first.agg) {
            case Agg::Mean: out.push_back({first.metric, mean, D > 1 ? spread_se : f * first.se}); break;
            // asymptotic standard error of a sample median under normality
            case Agg::Median: out.push_back({first.metric + "_median", median(v), 1.2533 * spread_se}); break;
            case Agg::Max: out.push_back({first.metric + "_max", *std::max_element(v.begin(), v.end()), 0.0}); break;
            case Agg::Sum: out.push_back({first.metric + "_count", mean * double(D), 0.0}); break;
            case Agg::Hidden: hidden[first.metric] = mean * double(D); break;
        }
    }
    if (p.wants("crossover")) {
        const double g = hidden.at("xo_full") / hidden.at("xo_half");
        out.push_back({"crossover_g", g, 0.0});
        out.push_back({"crossover_tc", crossover_from_ratio(g, c.training).coherence, 0.0});
    }
    if (p.wants("crossover_mc")) {
        // R^c(T) = R(T) at T = (tau L - tau_c L_c) / (L - L_c)
        const double li = hidden.at("xo_mc_ice"), lc = hidden.at("xo_mc_cce");
        const double tc = li > lc ? (c.training * li - c.composite_training * lc) / (li - lc)
                                  : std::numeric_limits<double>::quiet_NaN();
        out.push_back({"crossover_mc_g", li / lc, 0.0});
        out.push_back({"crossover_mc_tc", tc, 0.0});
    }
    if (p.per_drop) {
        for (std::size_t d = 0; d < D; ++d)
            for (const Sample& s : drops[d])
                if (s.agg != Agg::Hidden)
                    out.push_back({s.metric + "/drop=" + std::to_string(d), scale(s) * s.value, scale(s) * s.se});
    }
    return out;
}

// Settings of a point with the coherence interval removed; points sharing
// this key share their drop evaluations.
std::string drop_key(const Scenario& s, const std::string& series, const std::string& sweep) {
    std::map<std::string, std::string> kv = default_settings();
    for (const auto& [k, v] : s.settings) kv[k] = v;
    if (s.series_var() != "none") kv[s.series_var()] = series;
    if (s.sweep_var() != "none") kv[s.sweep_var()] = sweep;
    kv.erase("system.coherence");
    std::string key;
    for (const auto& [k, v] : kv) key += k + '=' + v + '\n';
    return key;
}

}  // namespace

std::vector<CsvRow> run_scenario(const Scenario& scenario, const RunOptions& options) {
    Scenario s = scenario;
    if (options.trials) {
        if (*options.trials < 0) throw ConfigError("--trials must be >= 0");
        s.set("scenario.trials", std::to_string(*options.trials));
    }
    if (options.seed) s.set("scenario.seed", std::to_string(*options.seed));

    struct Point {
        std::string series, sweep;
        ScenarioPoint spec;
        std::size_t group;
    };
    std::vector<Point> points;
    std::map<std::string, std::size_t> groups;
    std::vector<std::size_t> group_leader;
    for (const auto& sv : s.series_values())
        for (const auto& v : s.sweep_values()) {
            const auto [it, fresh] = groups.emplace(drop_key(s, sv, v), groups.size());
            if (fresh) group_leader.push_back(points.size());
            points.push_back({sv, v, s.resolve(sv, v), it->second});
        }
    if (points.empty() || points.front().spec.trials == 0) return {};

    struct Task {
        std::size_t group;
        int drop;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<DropResult>> results(group_leader.size());
    for (std::size_t g = 0; g < group_leader.size(); ++g) {
        const int drops = points[group_leader[g]].spec.drops;
        results[g].resize(std::size_t(drops));
        for (int d = 0; d < drops; ++d) tasks.push_back({g, d});
    }
    std::vector<std::exception_ptr> errors(tasks.size());
    auto work = [&](std::size_t t) {
        try {
            const Task& task = tasks[t];
            const ScenarioPoint& spec = points[group_leader[task.group]].spec;
            results[task.group][std::size_t(task.drop)] = evaluate_drop(spec, task.drop);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    const int workers = std::clamp(options.threads, 1, int(std::max<std::size_t>(tasks.size(), 1)));
    if (workers == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) work(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < tasks.size(); t = next++) work(t);
            });
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const std::string sweep_var = s.sweep_var(), series_var = s.series_var();
    std::vector<CsvRow> rows;
    for (const Point& pt : points) {
        const std::string suffix = series_var == "none" ? "" : "@" + key_tail(series_var) + "=" + pt.series;
        for (const PointRow& r : aggregate(pt.spec, results[pt.group]))
            rows.push_back({s.name, sweep_var, sweep_var == "none" ? "-" : pt.sweep, r.metric + suffix, r.value,
                            r.se, pt.spec.seed});
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << kCsvHeader << '\n';
    for (const CsvRow& r : rows)
        out << r.scenario << ',' << r.sweep_var << ',' << r.sweep_value << ',' << r.metric << ','
            << format_number(r.value) << ',' << format_number(r.std_error) << ',' << r.seed << '\n';
}

}  // namespace fdrelay
