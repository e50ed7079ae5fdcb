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

#ifndef FDRELAY_EXPERIMENT_HPP
#define FDRELAY_EXPERIMENT_HPP

#include "fdrelay/config.hpp"
#include "fdrelay/relay.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdrelay {

enum class PowerMode { Uniform, SumRate, MaxMin, SpecialEta };
enum class ProfileKind { Unit, Geometry, PairGeometry };

const char* to_string(PowerMode mode);
const char* to_string(ProfileKind kind);

struct GeometryParams {
    double max_distance = 500.0;  // users uniform in [0, max_distance]
    double shadow_db = 8.0;
    double breakpoint = 200.0;
    double exponent = 3.8;
};

/// Fully resolved parameters of one sweep point, powers in linear scale.
struct ScenarioPoint {
    SystemConfig config;
    ProfileKind profile = ProfileKind::Unit;
    double beta = 1.0;
    GeometryParams geometry;
    std::vector<Estimation> estimators;
    PowerMode power = PowerMode::Uniform;
    SelfInterference sic = SelfInterference::Perfect;
    std::vector<std::string> metrics;
    int trials = 1000;
    int drops = 1;
    std::uint64_t seed = 1;
    double p_s_max = 0.0;
    double p_r_max = 0.0;
    double eps = 1e-3;
    int max_outer = 5;
    bool per_drop = false;

    bool wants(const std::string& metric) const;
};

/// A named set of "section.key" -> value settings. The sweep and series
/// variables are ordinary keys whose values are overridden per point.
struct Scenario {
    std::string name;
    std::map<std::string, std::string> settings;

    std::string get(const std::string& key) const;
    std::string sweep_var() const { return get("scenario.sweep"); }
    std::vector<std::string> sweep_values() const;
    std::string series_var() const { return get("scenario.series"); }
    std::vector<std::string> series_values() const;

    /// Throws ConfigError on unknown keys or invalid values.
    void set(const std::string& key, const std::string& value);
    ScenarioPoint resolve(const std::string& series_value, const std::string& sweep_value) const;
    /// Resolves every point.
    void validate() const;
};

/// Every recognised key with its default value.
const std::map<std::string, std::string>& default_settings();

/// Plain-text "key = value" lines; "[section]" prefixes following keys;
/// '#' starts a comment. Throws ConfigError with the line number.
Scenario parse_scenario(std::istream& in, const std::string& origin = "<input>");
Scenario load_scenario(const std::string& path);

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

struct CsvRow {
    std::string scenario;
    std::string sweep_var;
    std::string sweep_value;
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

struct RunOptions {
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

/// One row per sweep point per metric, in sweep order. Zero trials yield
/// no rows.
std::vector<CsvRow> run_scenario(const Scenario& scenario, const RunOptions& options = {});

inline constexpr const char* kCsvHeader = "scenario,sweep_var,sweep_value,metric,value,stderr,seed";

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

/// Plain-text summary with the checks that apply to the scenario.
std::string render_report(const Scenario& scenario, const std::vector<CsvRow>& rows);

}  // namespace fdrelay

#endif  // FDRELAY_EXPERIMENT_HPP
