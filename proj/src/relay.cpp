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

#include "fdrelay/relay.hpp"

namespace fdrelay {

namespace {

void require_estimates(const LargeScaleProfile& p, const SystemConfig& c) {
    if (p.users() != c.users()) throw ConfigError("profile does not match 2K");
    if (!p.has_estimates()) throw ConfigError("profile has no estimated coefficients");
}

// sum_i beta_hat_di * beta_hat_ui'
double cross_estimate_sum(const LargeScaleProfile& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.users(); ++i) s += p.beta_d_hat(i) * p.beta_u_hat(partner(i));
    return s;
}

}  // namespace

DeltaTerms delta_terms_closed_form(const LargeScaleProfile& p, const SystemConfig& c, Estimation mode,
                                   ApproxOptions options) {
    const double nt = c.tx_antennas;
    const double nr = c.rx_antennas;
    DeltaTerms d;
    if (c.pairs == 0 || p.users() == 0) return d;
    require_estimates(p, c);
    const double sum_bu = p.beta_u.sum();
    const double power_ratio = c.user_power / c.relay_power;

    double s3 = 0.0, s3_corr = 0.0;
    for (Eigen::Index i = 0; i < p.users(); ++i) {
        s3 += p.beta_d_hat(i) * p.beta_u(partner(i)) * p.beta_u(partner(i));
        s3_corr += p.beta_d_hat(i) * p.beta_u_hat(partner(i));
    }
    double s3c = 0.0, s3c_corr = 0.0;
    for (Eigen::Index n = 0; n < p.pairs(); ++n) {
        const double sq = p.beta_u(2 * n) * p.beta_u(2 * n) + p.beta_u(2 * n + 1) * p.beta_u(2 * n + 1);
        s3c += p.beta_dc_hat(n) * sq;
        s3c_corr += p.beta_dc_hat(n) * p.beta_uc_hat(n);
    }
    d.delta3 = power_ratio * s3;
    d.delta3_c = power_ratio * s3c;
    if (options.power_scaling) {
        d.delta3 += c.relay_noise / (nr * c.relay_power) * s3_corr;
        d.delta3_c += c.relay_noise / (nr * c.relay_power) * s3c_corr;
    }

    if (mode == Estimation::Individual) {
        for (Eigen::Index i = 0; i < p.users(); ++i) {
            const Eigen::Index ip = partner(i);
            d.delta1 += p.beta_d_hat(i) * (nr * nr * p.beta_u(ip) * p.beta_u(ip) + nr * p.beta_u_hat(ip) * sum_bu);
        }
        d.delta1 *= nt;
        d.delta2 = nt * nr * s3_corr;
    } else {
        for (Eigen::Index n = 0; n < p.pairs(); ++n) {
            const double sq = p.beta_u(2 * n) * p.beta_u(2 * n) + p.beta_u(2 * n + 1) * p.beta_u(2 * n + 1);
            d.delta1 += p.beta_dc_hat(n) * (nr * nr * sq + nr * p.beta_uc_hat(n) * sum_bu);
        }
        d.delta1 *= nt;
        d.delta2 = nt * nr * s3c_corr;
    }
    return d;
}

double amplification_factor(const DeltaTerms& d, const SystemConfig& c) {
    const double den = c.user_power * d.delta1 + (c.relay_power * c.relay_li + c.relay_noise) * d.delta2;
    if (!(den > 0.0)) throw std::domain_error("degenerate configuration: amplification denominator is zero");
    return std::sqrt(c.relay_power / den);
}

double GainMoments::mean(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k) {
    return double(c.tx_antennas) * c.rx_antennas * p.beta_d(k) * p.beta_u(partner(k));
}

double GainMoments::variance(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k) {
    require_estimates(p, c);
    const double nt = c.tx_antennas, nr = c.rx_antennas;
    const Eigen::Index kp = partner(k);
    const double bd = p.beta_d(k), bu = p.beta_u(kp);
    return nt * nt * nr * bd * bd * bu * p.beta_u_hat(kp) + nt * nr * nr * bd * p.beta_d_hat(k) * bu * bu +
           nt * nr * bd * bu * cross_estimate_sum(p);
}

double GainMoments::cross_power(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k, Eigen::Index j) {
    require_estimates(p, c);
    const double nt = c.tx_antennas, nr = c.rx_antennas;
    const Eigen::Index kp = partner(k);
    const double bd = p.beta_d(k), buj = p.beta_u(j);
    return nt * nt * nr * bd * bd * buj * p.beta_u_hat(kp) + nt * nr * nr * bd * p.beta_d_hat(partner(j)) * buj * buj +
           nt * nr * bd * buj * cross_estimate_sum(p);
}

double GainMoments::row_power(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k) {
    require_estimates(p, c);
    const double nt = c.tx_antennas, nr = c.rx_antennas;
    const double bd = p.beta_d(k);
    return nt * nt * nr * bd * bd * p.beta_u_hat(partner(k)) + nt * nr * bd * cross_estimate_sum(p);
}

}  // namespace fdrelay
