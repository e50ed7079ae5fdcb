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

#ifndef FDRELAY_CHANNEL_HPP
#define FDRELAY_CHANNEL_HPP

#include "fdrelay/config.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <span>

namespace fdrelay {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; maps (master seed, stream index) to an independent
/// seed so trials can run in any order and still be reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// i.i.d. CN(0, variance) entries; real and imaginary parts are independent
/// N(0, variance/2). Zero variance yields an exact zero matrix.
template <typename Scalar, typename Gen>
CMatrix<Scalar> complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Gen& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    CMatrix<Scalar> m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            m(i, j) = std::complex<Scalar>(Scalar(s * re), Scalar(s * im));
        }
    return m;
}

/// Path loss with log-normal shadowing: 10^(shadow_db/10) / (1 + (d/d0)^l).
double path_loss_gain(double distance, double shadow_db, double breakpoint, double exponent);

/// True large-scale coefficients from user distances, drawing
/// omega_i ~ N(0, shadow_std_db^2). Downlink equals uplink. Estimated
/// coefficients are left empty; see estimated_large_scale().
LargeScaleProfile large_scale_from_geometry(std::span<const double> distances, double shadow_std_db,
                                            double breakpoint, double exponent, Rng& rng);

/// One realisation of every random channel plus, once the training phase has
/// run, the LS estimates. Estimate shapes: 2K columns (ICE) or K (CCE).
template <typename Scalar>
struct ChannelSet {
    CMatrix<Scalar> G;      // N_r x 2K uplink
    CMatrix<Scalar> F;      // N_t x 2K downlink
    CMatrix<Scalar> G_rr;   // N_r x N_t relay loop channel
    CMatrix<Scalar> Omega;  // 2K x 2K, zero across sides
    CMatrix<Scalar> G_hat;
    CMatrix<Scalar> F_hat;
    Estimation mode = Estimation::Individual;

    bool has_estimates() const { return G_hat.size() > 0 && F_hat.size() > 0; }
};

struct DrawOptions {
    /// The relay loop matrix is N_r x N_t; Monte Carlo rate estimation only
    /// needs its statistical power and skips it.
    bool loop_channel = true;
    bool user_side = true;
};

/// G = H_u D_u^{1/2}, F = H_d D_d^{1/2}, G_rr ~ CN(0, sigma^2_LI),
/// Omega(k,i) ~ CN(0, sigma^2_{k,i}).
template <typename Scalar = double>
ChannelSet<Scalar> draw_channels(const SystemConfig& config, const LargeScaleProfile& profile, Rng& rng,
                                 DrawOptions options = {}) {
    const Eigen::Index users = config.users();
    if (profile.beta_u.size() != users || profile.beta_d.size() != users)
        throw ConfigError("profile dimension does not match the configuration");
    if ((profile.beta_u.array() < 0).any() || (profile.beta_d.array() < 0).any())
        throw ConfigError("large-scale coefficients must be nonnegative");

    ChannelSet<Scalar> ch;
    ch.G = complex_gaussian<Scalar>(config.rx_antennas, users, 1.0, rng);
    ch.F = complex_gaussian<Scalar>(config.tx_antennas, users, 1.0, rng);
    for (Eigen::Index k = 0; k < users; ++k) {
        ch.G.col(k) *= Scalar(std::sqrt(profile.beta_u(k)));
        ch.F.col(k) *= Scalar(std::sqrt(profile.beta_d(k)));
    }
    if (options.loop_channel)
        ch.G_rr = complex_gaussian<Scalar>(config.rx_antennas, config.tx_antennas, config.relay_li, rng);
    if (options.user_side) {
        ch.Omega = complex_gaussian<Scalar>(users, users, 1.0, rng);
        for (Eigen::Index k = 0; k < users; ++k)
            for (Eigen::Index i = 0; i < users; ++i)
                ch.Omega(k, i) *= Scalar(std::sqrt(config.user_interference(k, i)));
    }
    return ch;
}

/// Pair-summed channel columns: column n is col(2n) + col(2n+1).
template <typename Derived>
auto pair_sum(const Eigen::MatrixBase<Derived>& m) {
    using Plain = typename Derived::PlainObject;
    Plain out(m.rows(), m.cols() / 2);
    for (Eigen::Index n = 0; n < out.cols(); ++n) out.col(n) = m.col(2 * n) + m.col(2 * n + 1);
    return out;
}

}  // namespace fdrelay

#endif  // FDRELAY_CHANNEL_HPP
