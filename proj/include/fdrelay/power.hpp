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

#ifndef FDRELAY_POWER_HPP
#define FDRELAY_POWER_HPP

#include "fdrelay/config.hpp"
#include "fdrelay/gp.hpp"

#include <vector>

namespace fdrelay {

/// Per-user powers P_i and relay power P_R under peak constraints.
struct PowerAllocation {
    Eigen::VectorXd P;
    double P_R = 0.0;
    double P_S_max = 0.0;
    double P_R_max = 0.0;

    /// Every user at P_S_max, relay at P_R.
    static PowerAllocation uniform(int users, double p_s, double p_r, double p_s_max, double p_r_max);
};

/// Large-scale constants of the per-user-power SINR model:
/// a(k,j) = kappa beta_uj beta_hat_uk' / beta_uk'^2 + beta_hat_dj' beta_uj^2 / (beta_dk beta_uk'^2),
/// b(k)   = kappa beta_hat_uk' / beta_uk'^2,
/// c(k,i) = beta_hat_di' beta_ui^2 / (beta_dk^2 beta_uk'^2).
struct PowerCoefficients {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::MatrixXd c;

    Eigen::Index users() const { return b.size(); }
};

PowerCoefficients power_coefficients(const LargeScaleProfile& profile, const SystemConfig& config);

/// gamma_k = P_k' N_t / (sum_{j!=k} P_j a_kj + (P_R sigma^2_LI + sigma^2_nr) b_k
///           + (1/P_R) sum_i P_i c_ki (sum_{i in U_k} P_i sigma^2_ki + sigma^2_n)).
/// A user whose partner is silent gets zero.
Eigen::VectorXd sinr_with_powers(const PowerCoefficients& coeffs, const PowerAllocation& alloc,
                                 const SystemConfig& config);

/// Variable ids of a power-allocation GP.
struct PowerVariables {
    std::vector<int> P;
    int P_R = -1;
};

/// Adds P_i in [floor P_S_max, P_S_max] and P_R in [floor P_R_max, P_R_max].
PowerVariables add_power_variables(GeometricProgram& gp, int users, double p_s_max, double p_r_max,
                                   double floor = 1e-8);

/// f_k = 1/gamma_k as a posynomial in the power variables.
Posynomial inverse_sinr_posynomial(const PowerCoefficients& coeffs, const SystemConfig& config,
                                   const PowerVariables& vars, Eigen::Index k);

enum class SumRateStatus { Converged, IterationLimit, ZeroSinr };

inline const char* to_string(SumRateStatus s) {
    switch (s) {
        case SumRateStatus::Converged: return "converged";
        case SumRateStatus::IterationLimit: return "iteration-limit";
        case SumRateStatus::ZeroSinr: return "zero-sinr";
    }
    return "?";
}

struct SumRateResult {
    PowerAllocation alloc;
    Eigen::VectorXd sinr;
    /// prod_k (1 + gamma_k) at the initial point and after each GP solve.
    std::vector<double> objective_history;
    int iterations = 0;
    SumRateStatus status = SumRateStatus::IterationLimit;
    /// True when the zero-SINR guard fired before any GP step was accepted
    /// and the initial allocation is reported.
    bool reported_initializer = false;
};

/// Thrown when a GP solve inside an allocation procedure fails.
class AllocationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Successive monomial approximation of prod (1 + gamma_k): starts from
/// P_k = P_S_max, P_R = K P_S_max (clipped to P_R_max), solves the GP with
/// lambda_k gamma_k^{nu_k} around the current SINRs and stops when
/// max_k |gamma_hat_k - gamma_k*| <= eps, on a zero SINR, or after max_outer
/// GP solves.
SumRateResult maximize_sum_rate(const PowerCoefficients& coeffs, const SystemConfig& config, double p_s_max,
                                double p_r_max, double eps = 1e-3, int max_outer = 5);

struct MaxMinResult {
    PowerAllocation alloc;
    Eigen::VectorXd sinr;
    double min_sinr = 0.0;
    double slack = 0.0;  // t at the optimum
};

/// maximize t s.t. t f_k(P, P_R) <= 1 for all k.
MaxMinResult max_min_fairness(const PowerCoefficients& coeffs, const SystemConfig& config, double p_s_max,
                              double p_r_max, double tol = 1e-9);

struct SpecialAllocation {
    double P_S = 0.0;
    double P_R = 0.0;        // eta * P_S_max
    double eta = 0.0;
    double delta = 0.0;
    double P_R_exact = 0.0;  // stationary point before the large-power approximation
};

/// Closed-form max-min allocation when every large-scale coefficient is the
/// same and the interference levels are uniform. Throws ConfigError
/// otherwise.
SpecialAllocation special_scenario_allocation(const LargeScaleProfile& profile, const SystemConfig& config,
                                              double p_s_max);

}  // namespace fdrelay

#endif  // FDRELAY_POWER_HPP
