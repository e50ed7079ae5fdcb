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

#include "fdrelay/rates.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <string>
#include <thread>

namespace fdrelay {

std::vector<SinrBreakdown> approx_sinr(const LargeScaleProfile& p, const SystemConfig& c, Estimation mode,
                                       ApproxOptions options) {
    if (p.users() != c.users() || !p.has_estimates()) throw ConfigError("profile incomplete for this configuration");
    const DeltaTerms d = delta_terms_closed_form(p, c, mode, options);
    const double kappa = c.kappa();
    const double nt = c.tx_antennas;
    const Eigen::Index users = c.users();
    const double relay_floor = c.relay_power * c.relay_li;

    std::vector<SinrBreakdown> out(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k) {
        const Eigen::Index kp = partner(k);
        const double bd = p.beta_d(k), bu = p.beta_u(kp);
        const double scale = 1.0 / (bd * bd * bu * bu);
        SinrBreakdown& s = out[static_cast<std::size_t>(k)];
        double uhat, delta3;
        if (mode == Estimation::Individual) {
            uhat = p.beta_u_hat(kp);
            delta3 = d.delta3;
            s.A = kappa * uhat / bu + p.beta_d_hat(k) / bd;
            for (Eigen::Index j = 0; j < users; ++j) {
                if (j == k || j == kp) continue;
                s.MP += kappa * p.beta_u(j) * uhat / (bu * bu) +
                        p.beta_d_hat(partner(j)) * p.beta_u(j) * p.beta_u(j) / (bd * bu * bu);
            }
        } else {
            const Eigen::Index m = pair_of(k);
            uhat = p.beta_uc_hat(m);
            delta3 = d.delta3_c;
            s.A = kappa * uhat / bu + p.beta_dc_hat(m) / bd;
            for (Eigen::Index n = 0; n < p.pairs(); ++n) {
                if (n == m) continue;
                const double b1 = p.beta_u(2 * n), b2 = p.beta_u(2 * n + 1);
                s.MP += kappa * uhat * (b1 + b2) / (bu * bu) + p.beta_dc_hat(n) * (b1 * b1 + b2 * b2) / (bd * bu * bu);
            }
        }
        s.LIR = relay_floor / c.user_power * kappa * uhat / (bu * bu);
        s.NR = c.relay_noise / c.user_power * kappa * uhat / (bu * bu);
        s.MU = scale * delta3 * c.user_interference_sum(k);
        s.AN = c.user_noise / c.user_power * scale * delta3;
        const double den = s.denominator();
        s.sinr = den > 0.0 ? std::min(nt / den, kSinrCap) : kSinrCap;
        s.theta = s.sinr / nt;
    }
    return out;
}

Eigen::VectorXd approx_sinr_values(const LargeScaleProfile& p, const SystemConfig& c, Estimation mode,
                                   ApproxOptions options) {
    const auto terms = approx_sinr(p, c, mode, options);
    Eigen::VectorXd v(static_cast<Eigen::Index>(terms.size()));
    for (std::size_t k = 0; k < terms.size(); ++k) v(static_cast<Eigen::Index>(k)) = terms[k].sinr;
    return v;
}

Eigen::VectorXd lower_bound_sinr_exact(const LargeScaleProfile& p, const SystemConfig& c) {
    if (p.users() != c.users() || !p.has_estimates()) throw ConfigError("profile incomplete for this configuration");
    const double alpha = amplification_factor(delta_terms_closed_form(p, c, Estimation::Individual), c);
    const double a2 = alpha * alpha;
    const double ps = c.user_power;
    const Eigen::Index users = c.users();
    Eigen::VectorXd sinr(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const Eigen::Index kp = partner(k);
        const double mean = GainMoments::mean(p, c, k);
        double cross = 0.0;
        for (Eigen::Index j = 0; j < users; ++j)
            if (j != k && j != kp) cross += GainMoments::cross_power(p, c, k, j);
        const double den = ps * GainMoments::variance(p, c, k) + ps * cross +
                           (c.relay_power * c.relay_li + c.relay_noise) * GainMoments::row_power(p, c, k) +
                           (ps * c.user_interference_sum(k) + c.user_noise) / a2;
        sinr(k) = den > 0.0 ? std::min(ps * mean * mean / den, kSinrCap) : kSinrCap;
    }
    return sinr;
}

double sum_rate_from_sinrs(const Eigen::Ref<const Eigen::VectorXd>& sinrs, int coherence, int training) {
    if (training >= coherence) throw std::domain_error("training length must be shorter than the coherence interval");
    if (training < 0) throw std::domain_error("training length must be nonnegative");
    const double frac = double(coherence - training) / double(coherence);
    return frac * (1.0 + sinrs.array()).log().sum() / std::log(2.0);
}

RateEstimate ergodic_sum_rate_mc(const SystemConfig& config, const LargeScaleProfile& profile, Estimation mode,
                                 SelfInterference sic, int n_trials, std::uint64_t seed, int threads) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (profile.users() != config.users() || !profile.has_estimates())
        throw ConfigError("profile incomplete for this configuration");
    const int training = config.training_length(mode);
    if (training >= config.coherence) return {0.0, 0.0, n_trials};

    const double alpha = amplification_factor(delta_terms_closed_form(profile, config, mode), config);
    const DrawOptions light{.loop_channel = false, .user_side = false};
    std::vector<double> log_sum(static_cast<std::size_t>(n_trials));

    auto run_trial = [&](int t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        auto ch = draw_channels<double>(config, profile, rng, light);
        train(ch, config, mode, rng);
        const Eigen::VectorXd sinr = instantaneous_sinr(ch, alpha, config, profile, sic);
        log_sum[static_cast<std::size_t>(t)] = (1.0 + sinr.array()).log().sum() / std::log(2.0);
    };

    const int workers = std::clamp(threads, 1, n_trials);
    if (workers == 1) {
        for (int t = 0; t < n_trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int t = next++; t < n_trials; t = next++) run_trial(t);
            });
    }

    const double frac = double(config.coherence - training) / double(config.coherence);
    double sum = 0.0;
    for (double v : log_sum) sum += v;
    const double mean = sum / n_trials;
    double ss = 0.0;
    for (double v : log_sum) ss += (v - mean) * (v - mean);
    RateEstimate r;
    r.trials = n_trials;
    r.mean = frac * mean;
    r.std_error = n_trials > 1 ? frac * std::sqrt(ss / (n_trials - 1) / n_trials) : 0.0;
    return r;
}

Eigen::VectorXd bound_sinr_mc(const SystemConfig& config, const LargeScaleProfile& profile, Estimation mode,
                              int n_trials, std::uint64_t seed) {
    if (n_trials < 2) throw std::invalid_argument("bound_sinr_mc needs n_trials >= 2");
    if (profile.users() != config.users() || !profile.has_estimates())
        throw ConfigError("profile incomplete for this configuration");
    const double alpha = amplification_factor(delta_terms_closed_form(profile, config, mode), config);
    const DrawOptions light{.loop_channel = false, .user_side = false};
    const Eigen::Index users = config.users();
    Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(users);
    Eigen::VectorXd second = Eigen::VectorXd::Zero(users), cross = second, row = second;
    for (int t = 0; t < n_trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        auto ch = draw_channels<double>(config, profile, rng, light);
        train(ch, config, mode, rng);
        const auto g = effective_gains(ch);
        for (Eigen::Index k = 0; k < users; ++k) {
            const Eigen::Index kp = partner(k);
            mean(k) += g.E(k, kp);
            second(k) += std::norm(g.E(k, kp));
            for (Eigen::Index j = 0; j < users; ++j)
                if (j != k && j != kp) cross(k) += std::norm(g.E(k, j));
        }
        row += g.row_power;
    }
    const double n = n_trials;
    const double a2 = alpha * alpha, ps = config.user_power;
    const double relay_floor = config.relay_power * config.relay_li + config.relay_noise;
    Eigen::VectorXd sinr(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const std::complex<double> m = mean(k) / n;
        const double var = std::max(0.0, (second(k) - n * std::norm(m)) / (n - 1.0));
        // unbiased estimate of |E[gain]|^2
        const double desired = std::max(0.0, std::norm(m) - var / n);
        const double den = a2 * ps * (var + cross(k) / n) + a2 * relay_floor * row(k) / n +
                           ps * config.user_interference_sum(k) + config.user_noise;
        sinr(k) = den > 0.0 ? std::min(a2 * ps * desired / den, kSinrCap) : (desired > 0.0 ? kSinrCap : 0.0);
    }
    return sinr;
}

Crossover crossover_from_ratio(double g, double training) {
    if (!(g > 1.0) || !std::isfinite(g)) throw std::domain_error("crossover needs a rate ratio g > 1");
    return {g, (1.0 + 1.0 / (2.0 * (g - 1.0))) * training};
}

Crossover crossover_coherence_interval(const Eigen::Ref<const Eigen::VectorXd>& gamma_ice, double training) {
    if (gamma_ice.size() == 0 || (gamma_ice.array() <= 0.0).any())
        throw std::domain_error("crossover needs strictly positive SINRs");
    const double full = (1.0 + gamma_ice.array()).log().sum();
    const double half = (1.0 + 0.5 * gamma_ice.array()).log().sum();
    return crossover_from_ratio(full / half, training);
}

GRatio g_ratio_of_Nt(const Eigen::Ref<const Eigen::VectorXd>& theta, double tx_antennas) {
    if (theta.size() == 0 || (theta.array() <= 0.0).any()) throw std::domain_error("theta must be positive");
    const Eigen::ArrayXd x = theta.array() * tx_antennas;
    GRatio g;
    g.exact = (1.0 + x).log().sum() / (1.0 + 0.5 * x).log().sum();
    const double mean_log_theta = theta.array().log().mean() / std::log(2.0);
    g.approx = 1.0 + 1.0 / (std::log2(tx_antennas) + mean_log_theta - 1.0);
    return g;
}

SpecialScenarioParams special_scenario_params(const SystemConfig& c, double beta, double beta_hat) {
    if (c.users() < 1 || c.user_interference.rows() != c.users()) throw ConfigError("configuration incomplete");
    if (!(beta > 0.0)) throw std::domain_error("large-scale coefficient must be positive");
    const double li = c.user_interference(0, 0);
    const double iu = c.pairs > 1 ? c.user_interference(0, 2) : 0.0;
    SpecialScenarioParams s;
    s.a = 3.0 * c.relay_li + 4.0;
    s.b = 2.0 - 3.0 * c.user_noise / c.user_power;
    s.xi_S = c.user_power / c.user_noise;
    s.mu = beta_hat / (beta * beta);
    s.b_coef = c.kappa() * beta_hat / (beta * beta);
    s.delta = (li + (c.pairs - 1) * iu) / c.pairs;
    s.eta = c.pairs * std::sqrt(2.0 * s.delta / (c.relay_li * c.kappa()));
    return s;
}

double special_scenario_sinr(const SpecialScenarioParams& s, int pairs, double tx_antennas) {
    const double den = s.a * pairs - s.b;
    if (!(den > 0.0)) throw std::domain_error("aK - b must be positive");
    return tx_antennas / den;
}

double pair_count_residual(const SpecialScenarioParams& s, double k, double n) {
    const double x = s.a * k - s.b;
    return std::log1p(n / x) - n * s.a * k / ((x + n) * x);
}

double solve_pair_count(const SpecialScenarioParams& s, double n, double lo, double hi) {
    lo = std::max(lo, s.b / s.a + 1e-9);
    double flo = pair_count_residual(s, lo, n);
    const double fhi = pair_count_residual(s, hi, n);
    if (!(lo < hi) || flo * fhi > 0.0)
        throw NoRootError("stationarity condition has no root for K in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] at N_t = " + std::to_string(n) +
                          "; the rate without training overhead is monotone in K");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = pair_count_residual(s, mid, n);
        if (std::abs(fm) < 1e-9 && hi - lo < 1e-9) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PairCountRelation best_pair_count_relation(const SpecialScenarioParams& s, double n, int coherence, int max_pairs) {
    if (max_pairs < 1) throw std::invalid_argument("max_pairs must be >= 1");
    PairCountRelation r;
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_pairs; ++k) {
        const double x = s.a * k - s.b;
        if (!(x > 0.0)) continue;
        PairCountRow row;
        row.pairs = k;
        row.required_tx = x * std::exp(s.a * k / x);
        row.slope = s.a * (s.a * k - 2.0 * s.b) / x * std::exp(s.a * k / x);
        if (!(row.required_tx > prev) || !(row.slope > 0.0))
            throw std::logic_error("required antenna count is not increasing in K");
        prev = row.required_tx;
        r.table.push_back(row);

        const int training = 2 * k;
        if (training >= coherence) continue;
        const double rate = double(coherence - training) / coherence * 2.0 * k * std::log2(1.0 + n / x);
        if (rate > r.best_rate_with_overhead) {
            r.best_rate_with_overhead = rate;
            r.best_pairs_with_overhead = k;
        }
    }
    return r;
}

}  // namespace fdrelay
