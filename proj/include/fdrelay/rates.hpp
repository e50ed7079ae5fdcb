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

#ifndef FDRELAY_RATES_HPP
#define FDRELAY_RATES_HPP

#include "fdrelay/relay.hpp"

#include <cstdint>
#include <vector>

namespace fdrelay {

/// Large-array SINR of one user split into its denominator terms:
/// sinr = N_t / (A + MP + LIR + NR + MU + AN), theta = sinr / N_t.
struct SinrBreakdown {
    double A = 0.0;    // deviation of the instantaneous from the mean effective channel
    double MP = 0.0;   // inter-pair interference
    double LIR = 0.0;  // relay loop interference
    double NR = 0.0;   // relay noise
    double MU = 0.0;   // self-LI and inter-user interference at the user
    double AN = 0.0;   // user noise
    double sinr = 0.0;
    double theta = 0.0;

    double denominator() const { return A + MP + LIR + NR + MU + AN; }
};

/// Closed-form large-array SINR for every user, under individual or
/// composite estimation. Intended for N_r >> 2K.
std::vector<SinrBreakdown> approx_sinr(const LargeScaleProfile& profile, const SystemConfig& config,
                                       Estimation mode, ApproxOptions options = {});

/// The sinr fields of approx_sinr() as a vector.
Eigen::VectorXd approx_sinr_values(const LargeScaleProfile& profile, const SystemConfig& config, Estimation mode,
                                   ApproxOptions options = {});

/// Statistical-CSI lower-bound SINR at finite N_r, N_t (individual
/// estimation, MRC/MRT, self-interference removed). Every finite-size
/// moment term is kept.
Eigen::VectorXd lower_bound_sinr_exact(const LargeScaleProfile& profile, const SystemConfig& config);

/// (T_c - tau)/T_c * sum_k log2(1 + sinr_k).
double sum_rate_from_sinrs(const Eigen::Ref<const Eigen::VectorXd>& sinrs, int coherence, int training);

struct RateEstimate {
    double mean = 0.0;       // bits/s/Hz
    double std_error = 0.0;  // standard error of the mean
    int trials = 0;
};

/// Monte Carlo ergodic sum rate with instantaneous channels and LS
/// estimates. Trial t draws from derive_seed(seed, t), so the result does
/// not depend on the thread count.
RateEstimate ergodic_sum_rate_mc(const SystemConfig& config, const LargeScaleProfile& profile, Estimation mode,
                                 SelfInterference sic, int n_trials, std::uint64_t seed, int threads = 1);

/// Coherence interval at which individual and composite estimation give the
/// same rate in a symmetric system with tau_c = tau/2.
/// Bound SINR with the gain moments (mean and variance of the desired gain,
/// cross-pair powers, relay-row power) replaced by sample moments over
/// n_trials >= 2 channel and estimate draws. The self term is removed.
Eigen::VectorXd bound_sinr_mc(const SystemConfig& config, const LargeScaleProfile& profile, Estimation mode,
                              int n_trials, std::uint64_t seed);

struct Crossover {
    double g = 0.0;
    double coherence = 0.0;  // T_c^E
};

/// g = sum log2(1+gamma_k) / sum log2(1+gamma_k/2), T_c^E = (1 + 1/(2(g-1))) tau.
Crossover crossover_coherence_interval(const Eigen::Ref<const Eigen::VectorXd>& gamma_ice, double training);

/// Same with g supplied as a ratio of rate sums, e.g. averaged over drops or
/// measured by simulation. Requires g > 1.
Crossover crossover_from_ratio(double g, double training);

/// Corollary-style g as a function of N_t for fixed theta_k.
struct GRatio {
    double exact = 0.0;
    double approx = 0.0;  // 1 + 1/(log2 N_t + mean(log2 theta) - 1)
};

GRatio g_ratio_of_Nt(const Eigen::Ref<const Eigen::VectorXd>& theta, double tx_antennas);

/// Constants of the equal-coefficient scenario.
struct SpecialScenarioParams {
    double a = 0.0;       // 3 sigma^2_LI + 4
    double b = 0.0;       // 2 - 3 sigma^2_n / P_S
    double xi_S = 0.0;    // P_S / sigma^2_n
    double mu = 0.0;      // beta_hat / beta^2
    double delta = 0.0;   // (sigma^2_LI + (K-1) sigma^2_IU) / K
    double b_coef = 0.0;  // kappa beta_hat / beta^2
    double eta = 0.0;     // K sqrt(2 delta / (sigma^2_LI kappa))
};

/// delta uses the user self-LI level and the inter-user level of `config`;
/// a and eta use the relay loop-interference level. beta and beta_hat are
/// the common coefficients.
SpecialScenarioParams special_scenario_params(const SystemConfig& config, double beta = 1.0,
                                              double beta_hat = 1.0);

/// gamma = N_t / (aK - b).
double special_scenario_sinr(const SpecialScenarioParams& s, int pairs, double tx_antennas);

/// Thrown when the stationarity condition has no root in the bracket.
class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PairCountRow {
    int pairs = 0;
    double required_tx = 0.0;  // N_t ~ (aK - b) exp(aK / (aK - b))
    double slope = 0.0;        // dN_t/dK
};

struct PairCountRelation {
    std::vector<PairCountRow> table;
    /// Integer K maximising 2K log2(1 + N_t/(aK-b)) with tau = 2K overhead.
    int best_pairs_with_overhead = 0;
    double best_rate_with_overhead = 0.0;
};

/// ln(1 + N/(aK-b)) - N aK / ((aK-b+N)(aK-b)); zero at the stationary K.
double pair_count_residual(const SpecialScenarioParams& s, double pairs, double tx_antennas);

/// Bisection on the residual over [k_lo, k_hi] to |residual| < 1e-9.
/// Throws NoRootError when the residual does not change sign.
double solve_pair_count(const SpecialScenarioParams& s, double tx_antennas, double k_lo = 1.0, double k_hi = 200.0);

/// Table of the approximate relation for K = 1..max_pairs, checking that
/// the required N_t increases with K, plus the integer optimum of the rate
/// with training overhead at `tx_antennas` and coherence T_c.
PairCountRelation best_pair_count_relation(const SpecialScenarioParams& s, double tx_antennas, int coherence,
                                           int max_pairs = 20);

}  // namespace fdrelay

#endif  // FDRELAY_RATES_HPP
