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

#ifndef FDRELAY_CONFIG_HPP
#define FDRELAY_CONFIG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace fdrelay {

/// Thrown when a system configuration violates a structural requirement
/// (pilot length too short, dimension mismatch, negative power...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pilot scheme: orthogonal per-user pilots or one shared pilot per pair.
enum class Estimation { Individual, Composite };

inline const char* to_string(Estimation mode) {
    return mode == Estimation::Individual ? "ICE" : "CCE";
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Users are indexed 0..2K-1; pair m holds users 2m and 2m+1.
inline Eigen::Index partner(Eigen::Index k) { return k ^ 1; }
inline Eigen::Index pair_of(Eigen::Index k) { return k / 2; }
/// Users on the same side of the relay hear each other (self-LI and
/// inter-user interference).
inline bool same_side(Eigen::Index k, Eigen::Index i) { return (k % 2) == (i % 2); }

/// All scalar system parameters, linear units.
struct SystemConfig {
    int pairs = 5;               // K
    int rx_antennas = 100;       // N_r
    int tx_antennas = 100;       // N_t
    double user_power = 10.0;    // P_S
    double relay_power = 50.0;   // P_R
    double pilot_power = 10.0;   // P_p, per pilot symbol
    int coherence = 100;         // T_c
    int training = 10;           // tau (ICE)
    int composite_training = 5;  // tau_c (CCE)
    double user_noise = 1.0;     // sigma^2_n
    double relay_noise = 1.0;    // sigma^2_nr
    double relay_li = 1.0;       // sigma^2_LI
    /// sigma^2_{k,i}, 2K x 2K. Diagonal is self-LI, same-side off-diagonal
    /// entries are inter-user levels, cross-side entries must be zero.
    Eigen::MatrixXd user_interference;

    int users() const { return 2 * pairs; }
    double kappa() const { return double(tx_antennas) / double(rx_antennas); }
    int training_length(Estimation mode) const {
        return mode == Estimation::Individual ? training : composite_training;
    }
    /// Sum over i in U_k of sigma^2_{k,i}.
    double user_interference_sum(Eigen::Index k) const { return user_interference.row(k).sum(); }

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Equal self-LI on the diagonal and equal inter-user level elsewhere on
/// the same side.
Eigen::MatrixXd uniform_user_interference(int pairs, double self_li, double inter_user);

/// Defaults used throughout the numerical study: K=5, T_c=100, tau=2K,
/// tau_c=K, unit noise, 5 dB loop interference, unit inter-user level,
/// P_S=P_p=10 dB, P_R=K*P_S.
SystemConfig default_config(int pairs = 5, int antennas = 100);

/// Large-scale fading, true and estimated. Per-user vectors have length 2K,
/// composite (per-pair) vectors length K.
struct LargeScaleProfile {
    Eigen::VectorXd beta_u, beta_d;
    Eigen::VectorXd beta_u_hat, beta_d_hat;
    Eigen::VectorXd beta_uc_hat, beta_dc_hat;

    Eigen::Index users() const { return beta_u.size(); }
    Eigen::Index pairs() const { return beta_u.size() / 2; }
    bool has_estimates() const {
        return beta_u_hat.size() == beta_u.size() && beta_uc_hat.size() == pairs();
    }
};

/// Profile with the same coefficient for every user, uplink and downlink.
LargeScaleProfile uniform_profile(int pairs, double beta = 1.0);

/// Fills the estimated coefficients for both pilot schemes:
/// beta_hat = beta + sigma^2_nr / (tau P_p) per user, and
/// beta_c_hat = beta_{2n} + beta_{2n+1} + sigma^2_nr / (tau_c P_p) per pair.
LargeScaleProfile estimated_large_scale(LargeScaleProfile profile, const SystemConfig& config);

/// Perfect-CSI profile: estimates equal to the true coefficients.
LargeScaleProfile with_perfect_estimates(LargeScaleProfile profile);

}  // namespace fdrelay

#endif  // FDRELAY_CONFIG_HPP
