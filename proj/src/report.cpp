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

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>

namespace fdrelay {

namespace {

class Report {
public:
    explicit Report(const std::vector<CsvRow>& rows) : rows_(rows) {}

    std::optional<double> value(const std::string& metric, const std::string& sweep_value = {}) const {
        for (const CsvRow& r : rows_)
            if (r.metric == metric && (sweep_value.empty() || r.sweep_value == sweep_value)) return r.value;
        return std::nullopt;
    }

    /// Sweep value with the largest value of `metric`.
    std::optional<std::string> argmax(const std::string& metric) const {
        std::optional<std::string> best;
        double top = -HUGE_VAL;
        for (const CsvRow& r : rows_)
            if (r.metric == metric && r.value > top) {
                top = r.value;
                best = r.sweep_value;
            }
        return best;
    }

    std::vector<std::string> sweep_points(const std::string& metric) const {
        std::vector<std::string> out;
        for (const CsvRow& r : rows_)
            if (r.metric == metric) out.push_back(r.sweep_value);
        return out;
    }

    void line(const std::string& text) { out_ << text << '\n'; }

    void check(const std::string& label, std::optional<double> v, double expected, double tol) {
        if (!v) {
            missing(label);
            return;
        }
        const bool ok = std::abs(*v - expected) <= tol;
        ++(ok ? passed_ : failed_);
        out_ << fmt("  %-44s %10.4g  expected %.4g +- %.3g  %s\n", label.c_str(), *v, expected, tol,
                    ok ? "PASS" : "FAIL");
    }

    void check_below(const std::string& label, std::optional<double> v, double limit) {
        if (!v) {
            missing(label);
            return;
        }
        const bool ok = *v < limit;
        ++(ok ? passed_ : failed_);
        out_ << fmt("  %-44s %10.4g  expected < %.3g  %s\n", label.c_str(), *v, limit, ok ? "PASS" : "FAIL");
    }

    void check_true(const std::string& label, bool ok, const std::string& detail) {
        ++(ok ? passed_ : failed_);
        out_ << fmt("  %-44s %s  %s\n", label.c_str(), detail.c_str(), ok ? "PASS" : "FAIL");
    }

    std::string finish() {
        if (passed_ + failed_ > 0) out_ << fmt("checks: %d passed, %d failed\n", passed_, failed_);
        return out_.str();
    }

    static std::string fmt(const char* f, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

private:
    void missing(const std::string& label) {
        ++failed_;
        out_ << "  " << label << ": no data  FAIL\n";
    }

    const std::vector<CsvRow>& rows_;
    std::ostringstream out_;
    int passed_ = 0, failed_ = 0;
};

double relative_gap(std::optional<double> a, std::optional<double> b) {
    if (!a || !b || *b == 0.0) return HUGE_VAL;
    return std::abs(*a - *b) / std::abs(*b);
}

void fig2(Report& r) {
    for (const char* n : {"50", "200"}) {
        const std::string tag = std::string("@antennas=") + n;
        const auto peak = r.argmax("mc_rate_ice" + tag);
        const auto ks = r.sweep_points("mc_rate_ice" + tag);
        const bool interior = peak && !ks.empty() && *peak != ks.front() && *peak != ks.back();
        if (std::string(n) == "50")
            r.check_true("N=50: simulated rate rises then falls in K", interior, "peak K=" + peak.value_or("?"));
        else
            r.line("  N=200: simulated rate peaks at K=" + peak.value_or("?"));
        const double gap = relative_gap(r.value("lower_bound_rate" + tag, "5"), r.value("mc_rate_ice" + tag, "5"));
        r.check_below(std::string("N=") + n + ", K=5: (mc - bound)/mc", gap, 0.05);
    }
}

void fig3(Report& r) {
    r.check_below("N=500, LI=5 dB: |approx - bound|/bound",
                  relative_gap(r.value("approx_rate_ice@relay_li=5", "500"),
                               r.value("lower_bound_rate@relay_li=5", "500")),
                  0.01);
    const auto a = r.value("approx_rate_ice@relay_li=10", "10");
    const auto m = r.value("mc_rate_ice@relay_li=10", "10");
    r.check("N=10, LI=10 dB: approx - mc [bits/s/Hz]", a && m ? std::optional(*a - *m) : std::nullopt, 0.85,
            0.3);
}

void fig4(Report& r, const std::string& first) {
    const std::pair<const char*, double> expected[] = {{"50", 21.2}, {"200", 25.4}, {"500", 29.1}};
    for (const auto& [n, tc] : expected) {
        const std::string tag = std::string("@antennas=") + n;
        const auto ana = r.value("crossover_tc" + tag, first);
        r.check(std::string("N=") + n + ": crossover T_c", ana, tc, 0.5);
        const auto sim = r.value("crossover_mc_tc" + tag, first);
        if (ana && sim)
            r.check(std::string("N=") + n + ": simulated crossover T_c", sim, *ana, 2.0);
    }
}

void fig5(Report& r, const std::vector<std::string>& points) {
    for (const char* profile : {"pair-geometry", "geometry"}) {
        const std::string tag = std::string("@profile=") + profile;
        const bool want_cce = std::string(profile) == "pair-geometry";
        int agree = 0, total = 0;
        for (const auto& p : points) {
            const auto ice = r.value("mc_rate_ice" + tag, p), cce = r.value("mc_rate_cce" + tag, p);
            if (!ice || !cce) continue;
            ++total;
            if ((*cce > *ice) == want_cce) ++agree;
        }
        r.check_true(std::string(profile) + (want_cce ? ": CCE > ICE" : ": CCE < ICE") + " at T_c=15",
                     total > 0 && agree == total, std::to_string(agree) + "/" + std::to_string(total) + " points");
    }
}

void fig6(Report& r) {
    r.check("median sum-rate gain [bits/s/Hz]", r.value("sum_rate_gain_median"), 1.9, 0.5);
    r.check("fraction of runs with monotone objective", r.value("objective_monotone"), 1.0, 0.0);
}

void fig7(Report& r) {
    r.check("median min-SINR gain [dB]", r.value("min_sinr_gain_db_median"), 31.0, 5.0);
    r.check_below("largest relative SINR spread", r.value("sinr_spread_max"), 1e-3);
}

void fig8(Report& r) {
    const std::string tag = "@user_power=10";
    r.check("eta / K", r.value("eta_over_k" + tag), 0.952, 0.005);
    const auto peak = r.argmax("approx_min_sinr_ice_db" + tag);
    const auto eta_db = r.value("relay_power_eta_db" + tag);
    if (peak && eta_db) {
        const double ratio = std::pow(10.0, (std::stod(*peak) - *eta_db) / 10.0);
        r.check("P_S=10 dB: SINR-maximising P_R / (eta P_S)", ratio, 1.0, 0.05);
    } else {
        r.check("P_S=10 dB: SINR-maximising P_R / (eta P_S)", std::nullopt, 1.0, 0.05);
    }
}

}  // namespace

std::string render_report(const Scenario& scenario, const std::vector<CsvRow>& rows) {
    Report r(rows);
    std::set<std::string> points, metrics;
    for (const CsvRow& row : rows) {
        points.insert(row.sweep_value);
        metrics.insert(row.metric);
    }
    r.line("scenario: " + scenario.name);
    r.line("sweep: " + scenario.sweep_var() + " (" + std::to_string(points.size()) + " points)");
    if (scenario.series_var() != "none") r.line("series: " + scenario.series_var());
    r.line("rows: " + std::to_string(rows.size()));
    if (rows.empty()) {
        r.line("no rows (zero trials)");
        return r.finish();
    }
    r.line("checks:");
    const auto sweep = scenario.sweep_values();
    const std::string& n = scenario.name;
    if (n == "fig2") fig2(r);
    else if (n == "fig3") fig3(r);
    else if (n == "fig4") fig4(r, sweep.front());
    else if (n == "fig5") fig5(r, sweep);
    else if (n == "fig6") fig6(r);
    else if (n == "fig7") fig7(r);
    else if (n == "fig8") fig8(r);
    else r.line("  none defined for this scenario");
    return r.finish();
}

}  // namespace fdrelay
