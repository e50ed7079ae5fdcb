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

#include "fdrelay/config.hpp"

namespace fdrelay {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void SystemConfig::validate() const {
    require(pairs >= 1, "pairs must be >= 1");
    require(rx_antennas >= 1 && tx_antennas >= 1, "antenna counts must be >= 1");
    require(coherence >= 1, "coherence interval must be >= 1");
    require(training >= users(), "individual training length must be >= 2K");
    require(composite_training >= pairs, "composite training length must be >= K");
    require(training < coherence, "training length must be shorter than the coherence interval");
    require(composite_training < coherence,
            "composite training length must be shorter than the coherence interval");
    require(user_power >= 0 && relay_power >= 0 && pilot_power >= 0, "powers must be nonnegative");
    require(user_noise >= 0 && relay_noise >= 0, "noise variances must be nonnegative");
    require(relay_li >= 0, "relay loop interference must be nonnegative");
    require(user_interference.rows() == users() && user_interference.cols() == users(),
            "user interference matrix must be 2K x 2K");
    for (Eigen::Index k = 0; k < users(); ++k) {
        for (Eigen::Index i = 0; i < users(); ++i) {
            const double v = user_interference(k, i);
            require(v >= 0, "user interference levels must be nonnegative");
            require(same_side(k, i) || v == 0.0,
                    "user interference only couples users on the same side");
        }
    }
}

Eigen::MatrixXd uniform_user_interference(int pairs, double self_li, double inter_user) {
    const Eigen::Index n = 2 * pairs;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            if (same_side(k, i)) m(k, i) = (i == k) ? self_li : inter_user;
    return m;
}

SystemConfig default_config(int pairs, int antennas) {
    SystemConfig c;
    c.pairs = pairs;
    c.rx_antennas = antennas;
    c.tx_antennas = antennas;
    c.user_power = db_to_linear(10.0);
    c.pilot_power = db_to_linear(10.0);
    c.relay_power = pairs * c.user_power;
    c.coherence = 100;
    c.training = 2 * pairs;
    c.composite_training = pairs;
    c.user_noise = 1.0;
    c.relay_noise = 1.0;
    c.relay_li = db_to_linear(5.0);
    c.user_interference = uniform_user_interference(pairs, c.relay_li, 1.0);
    return c;
}

LargeScaleProfile uniform_profile(int pairs, double beta) {
    LargeScaleProfile p;
    p.beta_u = Eigen::VectorXd::Constant(2 * pairs, beta);
    p.beta_d = p.beta_u;
    return p;
}

LargeScaleProfile estimated_large_scale(LargeScaleProfile p, const SystemConfig& config) {
    if (p.beta_u.size() != config.users() || p.beta_d.size() != config.users())
        throw ConfigError("profile size does not match 2K");
    const double err = config.relay_noise / (config.training * config.pilot_power);
    const double err_c = config.relay_noise / (config.composite_training * config.pilot_power);
    p.beta_u_hat = p.beta_u.array() + err;
    p.beta_d_hat = p.beta_d.array() + err;
    p.beta_uc_hat.resize(config.pairs);
    p.beta_dc_hat.resize(config.pairs);
    for (Eigen::Index n = 0; n < config.pairs; ++n) {
        p.beta_uc_hat(n) = p.beta_u(2 * n) + p.beta_u(2 * n + 1) + err_c;
        p.beta_dc_hat(n) = p.beta_d(2 * n) + p.beta_d(2 * n + 1) + err_c;
    }
    return p;
}

LargeScaleProfile with_perfect_estimates(LargeScaleProfile p) {
    const Eigen::Index pairs = p.pairs();
    p.beta_u_hat = p.beta_u;
    p.beta_d_hat = p.beta_d;
    p.beta_uc_hat.resize(pairs);
    p.beta_dc_hat.resize(pairs);
    for (Eigen::Index n = 0; n < pairs; ++n) {
        p.beta_uc_hat(n) = p.beta_u(2 * n) + p.beta_u(2 * n + 1);
        p.beta_dc_hat(n) = p.beta_d(2 * n) + p.beta_d(2 * n + 1);
    }
    return p;
}

}  // namespace fdrelay
