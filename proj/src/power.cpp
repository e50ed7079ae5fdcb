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

#include "fdrelay/power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fdrelay {

namespace {

// GP bounds on SINR-like variables; a value pinned at the floor is a zero
constexpr double kSinrFloor = 1e-30;
constexpr double kSinrCeil = 1e12;

double product_one_plus(const Eigen::VectorXd& g) { return (1.0 + g.array()).prod(); }

void add_term(Posynomial& p, double coef, Monomial m) {
    if (coef > 0.0) p += Posynomial(Monomial(coef) * m);
}

void check_bounds(double p_s_max, double p_r_max) {
    if (!(p_s_max > 0.0) || !(p_r_max > 0.0)) throw ConfigError("peak powers must be positive");
}

}  // namespace

PowerAllocation PowerAllocation::uniform(int users, double p_s, double p_r, double p_s_max, double p_r_max) {
    PowerAllocation a;
    a.P = Eigen::VectorXd::Constant(users, p_s);
    a.P_R = p_r;
    a.P_S_max = p_s_max;
    a.P_R_max = p_r_max;
    return a;
}

PowerCoefficients power_coefficients(const LargeScaleProfile& p, const SystemConfig& config) {
    if (p.users() != config.users() || p.beta_u_hat.size() != p.users())
        throw ConfigError("profile incomplete for this configuration");
    if ((p.beta_u.array() <= 0).any() || (p.beta_d.array() <= 0).any())
        throw ConfigError("large-scale coefficients must be positive");
    const Eigen::Index users = p.users();
    const double kappa = config.kappa();
    PowerCoefficients t;
    t.a.resize(users, users);
    t.b.resize(users);
    t.c.resize(users, users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const Eigen::Index kp = partner(k);
        const double bu = p.beta_u(kp), bd = p.beta_d(k);
        t.b(k) = kappa * p.beta_u_hat(kp) / (bu * bu);
        for (Eigen::Index j = 0; j < users; ++j) {
            const double buj = p.beta_u(j);
            const double dhat = p.beta_d_hat(partner(j));
            t.a(k, j) = kappa * buj * p.beta_u_hat(kp) / (bu * bu) + dhat * buj * buj / (bd * bu * bu);
            t.c(k, j) = dhat * buj * buj / (bd * bd * bu * bu);
        }
    }
    return t;
}

Eigen::VectorXd sinr_with_powers(const PowerCoefficients& co, const PowerAllocation& alloc,
                                 const SystemConfig& config) {
    const Eigen::Index users = co.users();
    if (alloc.P.size() != users || config.users() != users) throw ConfigError("allocation does not match 2K");
    Eigen::VectorXd g(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const double desired = alloc.P(partner(k)) * config.tx_antennas;
        if (desired <= 0.0) {
            g(k) = 0.0;
            continue;
        }
        double mp = 0.0;
        for (Eigen::Index j = 0; j < users; ++j)
            if (j != k) mp += alloc.P(j) * co.a(k, j);
        const double relay = (alloc.P_R * config.relay_li + config.relay_noise) * co.b(k);
        const double cs = alloc.P.dot(co.c.row(k).transpose());
        const double user_side = alloc.P.dot(config.user_interference.row(k).transpose());
        double fwd = 0.0;
        if (cs > 0.0) {
            if (!(alloc.P_R > 0.0)) {
                g(k) = 0.0;
                continue;
            }
            fwd = cs * (user_side + config.user_noise) / alloc.P_R;
        }
        const double den = mp + relay + fwd;
        g(k) = den > 0.0 ? desired / den : kSinrCeil;
    }
    return g;
}

PowerVariables add_power_variables(GeometricProgram& gp, int users, double p_s_max, double p_r_max,
                                   double floor) {
    check_bounds(p_s_max, p_r_max);
    PowerVariables v;
    for (int i = 0; i < users; ++i)
        v.P.push_back(gp.add_variable(floor * p_s_max, p_s_max, "P" + std::to_string(i)));
    v.P_R = gp.add_variable(floor * p_r_max, p_r_max, "P_R");
    return v;
}

Posynomial inverse_sinr_posynomial(const PowerCoefficients& co, const SystemConfig& config,
                                   const PowerVariables& v, Eigen::Index k) {
    const Eigen::Index users = co.users();
    auto P = [&](Eigen::Index i) { return Monomial::variable(v.P[static_cast<std::size_t>(i)]); };
    const Monomial pr = Monomial::variable(v.P_R);
    const Monomial inv_pr = Monomial::variable(v.P_R, -1.0);

    Posynomial f;
    for (Eigen::Index j = 0; j < users; ++j)
        if (j != k) add_term(f, co.a(k, j), P(j));
    add_term(f, config.relay_li * co.b(k), pr);
    add_term(f, config.relay_noise * co.b(k), Monomial());
    for (Eigen::Index i = 0; i < users; ++i) {
        const double c = co.c(k, i);
        if (c <= 0.0) continue;
        for (Eigen::Index j = 0; j < users; ++j)
            add_term(f, c * config.user_interference(k, j), P(i) * P(j) * inv_pr);
        add_term(f, c * config.user_noise, P(i) * inv_pr);
    }
    f *= Monomial(1.0 / config.tx_antennas) * Monomial::variable(v.P[static_cast<std::size_t>(partner(k))], -1.0);
    return f;
}

SumRateResult maximize_sum_rate(const PowerCoefficients& co, const SystemConfig& config, double p_s_max,
                                double p_r_max, double eps, int max_outer) {
    check_bounds(p_s_max, p_r_max);
    if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
    const int users = static_cast<int>(co.users());
    SumRateResult r;
    r.alloc = PowerAllocation::uniform(users, p_s_max, std::min(config.pairs * p_s_max, p_r_max), p_s_max, p_r_max);
    r.sinr = sinr_with_powers(co, r.alloc, config);
    r.objective_history.push_back(product_one_plus(r.sinr));
    if ((r.sinr.array() <= 0.0).any()) {
        r.status = SumRateStatus::ZeroSinr;
        r.reported_initializer = true;
        return r;
    }

    Eigen::VectorXd gamma_hat = r.sinr;
    for (int it = 1; it <= max_outer; ++it) {
        GeometricProgram gp;
        const PowerVariables v = add_power_variables(gp, users, p_s_max, p_r_max);
        std::vector<int> gam;
        Monomial objective;
        for (int k = 0; k < users; ++k) {
            gam.push_back(gp.add_variable(kSinrFloor, kSinrCeil, "gamma" + std::to_string(k)));
            const double gh = gamma_hat(k);
            const double nu = gh / (1.0 + gh);
            // lambda = gh^-nu (1 + gh)
            objective *= Monomial::from_log(std::log1p(gh) - nu * std::log(gh)) * Monomial::variable(gam.back(), nu);
        }
        gp.maximize(objective);
        for (int k = 0; k < users; ++k) {
            Posynomial f = inverse_sinr_posynomial(co, config, v, k);
            if (f.empty()) continue;
            gp.add_constraint(f * Monomial::variable(gam[static_cast<std::size_t>(k)]));
        }
        const GpSolution sol = solve_gp(gp, 1e-9);
        if (sol.status != GpStatus::Optimal)
            throw AllocationError(std::string("sum-rate GP failed at iteration ") + std::to_string(it) + ": " +
                                  to_string(sol.status));
        r.iterations = it;

        Eigen::VectorXd gamma_star(users);
        for (int k = 0; k < users; ++k) gamma_star(k) = sol.values(gam[static_cast<std::size_t>(k)]);
        if (!gamma_star.allFinite()) throw AllocationError("sum-rate GP returned a non-finite SINR");
        // a SINR pinned at its floor is a zero: the solution is kept, but
        // the monomial approximation cannot be formed around it
        const bool zero = (gamma_star.array() <= 2.0 * kSinrFloor).any();

        PowerAllocation next = r.alloc;
        for (int i = 0; i < users; ++i) next.P(i) = sol.values(v.P[static_cast<std::size_t>(i)]);
        next.P_R = sol.values(v.P_R);
        const Eigen::VectorXd next_sinr = sinr_with_powers(co, next, config);
        const double value = product_one_plus(next_sinr);
        // a step can only lose ground through solver tolerance; keep the
        // better point and stop
        if (value < r.objective_history.back()) {
            r.status = SumRateStatus::Converged;
            return r;
        }
        r.alloc = next;
        r.sinr = next_sinr;
        r.objective_history.push_back(value);

        if (zero) {
            r.status = SumRateStatus::ZeroSinr;
            return r;
        }
        const double change = (gamma_hat - gamma_star).cwiseAbs().maxCoeff();
        gamma_hat = next_sinr;
        if (change <= eps) {
            r.status = SumRateStatus::Converged;
            return r;
        }
    }
    r.status = SumRateStatus::IterationLimit;
    return r;
}

MaxMinResult max_min_fairness(const PowerCoefficients& co, const SystemConfig& config, double p_s_max,
                              double p_r_max, double tol) {
    check_bounds(p_s_max, p_r_max);
    const int users = static_cast<int>(co.users());
    GeometricProgram gp;
    const PowerVariables v = add_power_variables(gp, users, p_s_max, p_r_max);
    const int t = gp.add_variable(kSinrFloor, kSinrCeil, "t");
    gp.maximize(Monomial::variable(t));
    for (int k = 0; k < users; ++k) {
        Posynomial f = inverse_sinr_posynomial(co, config, v, k);
        if (!f.empty()) gp.add_constraint(f * Monomial::variable(t));
    }
    const GpSolution sol = solve_gp(gp, tol);
    if (sol.status != GpStatus::Optimal)
        throw AllocationError(std::string("max-min GP failed: ") + to_string(sol.status));
    MaxMinResult r;
    r.alloc = PowerAllocation::uniform(users, 0.0, sol.values(v.P_R), p_s_max, p_r_max);
    for (int i = 0; i < users; ++i) r.alloc.P(i) = sol.values(v.P[static_cast<std::size_t>(i)]);
    r.sinr = sinr_with_powers(co, r.alloc, config);
    r.min_sinr = r.sinr.minCoeff();
    r.slack = sol.values(t);
    return r;
}

SpecialAllocation special_scenario_allocation(const LargeScaleProfile& p, const SystemConfig& config,
                                              double p_s_max) {
    if (p.users() != config.users() || p.beta_u_hat.size() != p.users())
        throw ConfigError("profile incomplete for this configuration");
    if (!(p_s_max > 0.0)) throw ConfigError("peak user power must be positive");
    const double beta = p.beta_u(0), beta_hat = p.beta_u_hat(0);
    auto equal = [](const Eigen::VectorXd& x, double v) {
        return ((x.array() - v).abs() <= 1e-12 * std::abs(v)).all();
    };
    if (!(beta > 0.0) || !equal(p.beta_u, beta) || !equal(p.beta_d, beta) || !equal(p.beta_u_hat, beta_hat) ||
        !equal(p.beta_d_hat, beta_hat))
        throw ConfigError("special-scenario allocation needs equal large-scale coefficients");
    const Eigen::Index users = config.users();
    const double li = config.user_interference(0, 0);
    const double iu = config.pairs > 1 ? config.user_interference(0, 2) : 0.0;
    for (Eigen::Index k = 0; k < users; ++k)
        for (Eigen::Index i = 0; i < users; ++i) {
            if (!same_side(k, i)) continue;
            const double want = i == k ? li : iu;
            if (std::abs(config.user_interference(k, i) - want) > 1e-12 * std::max(1.0, want))
                throw ConfigError("special-scenario allocation needs uniform interference levels");
        }
    if (!(config.relay_li > 0.0)) throw ConfigError("special-scenario allocation needs relay loop interference > 0");

    const double K = config.pairs;
    const double mu = beta_hat / (beta * beta);
    const double b = config.kappa() * beta_hat / (beta * beta);
    SpecialAllocation s;
    s.delta = (li + (K - 1.0) * iu) / K;
    s.eta = K * std::sqrt(2.0 * s.delta / (config.relay_li * config.kappa()));
    s.P_S = p_s_max;
    s.P_R = s.eta * p_s_max;
    s.P_R_exact = std::sqrt(2.0 * K * mu * p_s_max * (K * s.delta * p_s_max + config.user_noise) / (config.relay_li * b));
    return s;
}

}  // namespace fdrelay
