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

#ifndef FDRELAY_RELAY_HPP
#define FDRELAY_RELAY_HPP

#include "fdrelay/channel.hpp"
#include "fdrelay/pilots.hpp"

#include <limits>
#include <stdexcept>

namespace fdrelay {

/// How the self-interference f_k^T W g_k forwarded back to S_k is handled.
enum class SelfInterference {
    Perfect,  // removed entirely
    PairCsi,  // large-array approximation subtracted, residual is interference
    None,     // kept as interference
};

inline const char* to_string(SelfInterference s) {
    switch (s) {
        case SelfInterference::Perfect: return "perfect";
        case SelfInterference::PairCsi: return "pair-csi";
        case SelfInterference::None: return "none";
    }
    return "?";
}

/// SINR reported when the interference-plus-noise power is exactly zero.
inline constexpr double kSinrCap = 1e12;

template <typename Scalar>
struct RelayWeights {
    CMatrix<Scalar> W;  // N_t x N_r
    double alpha = 0.0;
    Estimation mode = Estimation::Individual;
};

/// Pair-exchange permutation blockdiag([0 1; 1 0], ...).
template <typename Scalar = double>
CMatrix<Scalar> pair_exchange(Eigen::Index users) {
    CMatrix<Scalar> T = CMatrix<Scalar>::Zero(users, users);
    for (Eigen::Index i = 0; i < users; ++i) T(i, partner(i)) = Scalar(1);
    return T;
}

/// MRC/MRT relay matrix: F_hat^* T G_hat^H (ICE) or F_hat_c^* G_hat_c^H (CCE).
template <typename Scalar>
CMatrix<Scalar> mrc_mrt(const CMatrix<Scalar>& G_hat, const CMatrix<Scalar>& F_hat, Estimation mode) {
    if (G_hat.cols() != F_hat.cols()) throw ConfigError("uplink and downlink estimates disagree on user count");
    if (mode == Estimation::Individual) {
        if (G_hat.cols() % 2 != 0) throw ConfigError("individual estimates need 2K columns");
        return F_hat.conjugate() * pair_exchange<Scalar>(G_hat.cols()) * G_hat.adjoint();
    }
    return F_hat.conjugate() * G_hat.adjoint();
}

/// Expectations that fix the amplification factor, plus the Delta_3 terms of
/// the large-array SINR approximations.
struct DeltaTerms {
    double delta1 = 0.0;   // E Tr(W G G^H W^H)
    double delta2 = 0.0;   // E Tr(W W^H)
    double delta3 = 0.0;   // individual-estimation Delta_3
    double delta3_c = 0.0; // composite-estimation Delta_3
};

struct ApproxOptions {
    /// Adds the sigma^2_nr/(N_r P_R) correction to Delta_3 that survives when
    /// P_S = E_S/N_r and P_R = E_R/N_t.
    bool power_scaling = false;
};

DeltaTerms delta_terms_closed_form(const LargeScaleProfile& profile, const SystemConfig& config, Estimation mode,
                                   ApproxOptions options = {});

/// alpha = sqrt(P_R / (P_S Delta_1 + (P_R sigma^2_LI + sigma^2_nr) Delta_2)).
double amplification_factor(const DeltaTerms& deltas, const SystemConfig& config);

/// Closed-form moments of the effective gain f_k^T W g_j under individual
/// estimation and MRC/MRT, for finite antenna counts.
struct GainMoments {
    static double mean(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k);
    static double variance(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k);
    /// E|f_k^T W g_j|^2 for j != k, k'.
    static double cross_power(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k, Eigen::Index j);
    /// E||f_k^T W||^2.
    static double row_power(const LargeScaleProfile& p, const SystemConfig& c, Eigen::Index k);
};

/// Effective gains E(k, j) = f_k^T W g_j and row powers ||f_k^T W||^2 for one
/// realisation.
template <typename Scalar>
struct EffectiveGains {
    CMatrix<Scalar> E;
    Eigen::VectorXd row_power;
};

/// Builds the gains through 2K x 2K Gram products without forming W, which
/// keeps the cost at O(N K^2) per realisation.
template <typename Scalar>
EffectiveGains<Scalar> effective_gains(const ChannelSet<Scalar>& ch) {
    if (!ch.has_estimates()) throw ConfigError("channel set has no estimates");
    const Eigen::Index users = ch.G.cols();
    const CMatrix<Scalar> mix = ch.mode == Estimation::Individual ? pair_exchange<Scalar>(users)
                                                                  : CMatrix<Scalar>::Identity(users / 2, users / 2);
    if (ch.G_hat.cols() != mix.rows()) throw ConfigError("estimate shape does not match the pilot scheme");
    const CMatrix<Scalar> AT = (ch.F.transpose() * ch.F_hat.conjugate()) * mix;  // 2K x cols
    const CMatrix<Scalar> B = ch.G_hat.adjoint() * ch.G;
    const CMatrix<Scalar> C = ch.G_hat.adjoint() * ch.G_hat;
    EffectiveGains<Scalar> out;
    out.E.noalias() = AT * B;
    out.row_power = (AT * C).cwiseProduct(AT.conjugate()).rowwise().sum().real().template cast<double>();
    return out;
}

/// Same quantities from an explicit relay matrix.
template <typename Scalar>
EffectiveGains<Scalar> effective_gains(const ChannelSet<Scalar>& ch, const CMatrix<Scalar>& W) {
    if (W.rows() != ch.F.rows() || W.cols() != ch.G.rows()) throw ConfigError("relay matrix dimension mismatch");
    const CMatrix<Scalar> FW = ch.F.transpose() * W;
    EffectiveGains<Scalar> out;
    out.E.noalias() = FW * ch.G;
    out.row_power = FW.rowwise().squaredNorm().template cast<double>();
    return out;
}

/// Per-user received SINR for one realisation with a fixed-gain relay.
/// Relay loop interference and user-side interference enter through their
/// powers (Gaussian worst case).
template <typename Scalar>
Eigen::VectorXd sinr_from_gains(const EffectiveGains<Scalar>& g, const ChannelSet<Scalar>& ch, double alpha,
                                const SystemConfig& config, const LargeScaleProfile& profile,
                                SelfInterference sic) {
    const Eigen::Index users = config.users();
    if (g.E.rows() != users || g.E.cols() != users) throw ConfigError("gain matrix does not match 2K");
    const double a2 = alpha * alpha;
    const double ps = config.user_power;
    const double relay_floor = config.relay_power * config.relay_li + config.relay_noise;
    Eigen::VectorXd sinr(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const Eigen::Index kp = partner(k);
        const double desired = a2 * ps * std::norm(std::complex<double>(g.E(k, kp)));
        double interference = 0.0;
        for (Eigen::Index j = 0; j < users; ++j)
            if (j != k && j != kp) interference += std::norm(std::complex<double>(g.E(k, j)));
        interference *= a2 * ps;

        const std::complex<double> self(g.E(k, k));
        switch (sic) {
            case SelfInterference::Perfect: break;
            case SelfInterference::None: interference += a2 * ps * std::norm(self); break;
            case SelfInterference::PairCsi: {
                std::complex<double> estimate;
                if (ch.mode == Estimation::Individual) {
                    const std::complex<double> gg(ch.G_hat.col(kp).dot(ch.G.col(k)));
                    const std::complex<double> ff(ch.F_hat.col(kp).dot(ch.F.col(k)));
                    estimate = double(ch.F.col(k).squaredNorm()) * gg + ff * double(ch.G.col(k).squaredNorm());
                } else {
                    estimate = double(config.tx_antennas) * config.rx_antennas * profile.beta_d(k) * profile.beta_u(k);
                }
                interference += a2 * ps * std::norm(self - estimate);
                break;
            }
        }
        const double noise = a2 * relay_floor * g.row_power(k) + ps * config.user_interference_sum(k) +
                             config.user_noise;
        const double den = interference + noise;
        if (den <= 0.0) {
            sinr(k) = desired > 0.0 ? kSinrCap : 0.0;
        } else {
            sinr(k) = std::min(desired / den, kSinrCap);
        }
    }
    return sinr;
}

template <typename Scalar>
Eigen::VectorXd instantaneous_sinr(const ChannelSet<Scalar>& ch, double alpha, const SystemConfig& config,
                                   const LargeScaleProfile& profile, SelfInterference sic) {
    return sinr_from_gains(effective_gains(ch), ch, alpha, config, profile, sic);
}

template <typename Scalar>
Eigen::VectorXd instantaneous_sinr(const ChannelSet<Scalar>& ch, const RelayWeights<Scalar>& weights,
                                   const SystemConfig& config, const LargeScaleProfile& profile,
                                   SelfInterference sic) {
    if (weights.mode != ch.mode) throw ConfigError("relay weights were built for a different pilot scheme");
    return sinr_from_gains(effective_gains(ch, weights.W), ch, weights.alpha, config, profile, sic);
}

/// Monte Carlo Delta_1, Delta_2 over fresh channels and estimates. The
/// Delta_3 fields are deterministic in the profile and copied from the
/// closed form.
template <typename Scalar = double>
DeltaTerms delta_terms_empirical(const SystemConfig& config, const LargeScaleProfile& profile, Estimation mode,
                                 int n_trials, Rng& rng) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    const DrawOptions light{.loop_channel = false, .user_side = false};
    const Eigen::Index users = config.users();
    const CMatrix<Scalar> mix = mode == Estimation::Individual ? pair_exchange<Scalar>(users)
                                                               : CMatrix<Scalar>::Identity(users / 2, users / 2);
    double sum1 = 0.0, sum2 = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        auto ch = draw_channels<Scalar>(config, profile, rng, light);
        train(ch, config, mode, rng);
        // Tr(W G G^H W^H) = Tr(B^H M^H D M B), Tr(W W^H) = Tr(M C M^H D)
        // with D = F_hat^T F_hat^*, B = G_hat^H G, C = G_hat^H G_hat.
        const CMatrix<Scalar> D = ch.F_hat.transpose() * ch.F_hat.conjugate();
        const CMatrix<Scalar> MB = mix * (ch.G_hat.adjoint() * ch.G);
        const CMatrix<Scalar> C = ch.G_hat.adjoint() * ch.G_hat;
        sum1 += double(std::real((MB.adjoint() * D * MB).trace()));
        sum2 += double(std::real((mix * C * mix.adjoint() * D).trace()));
    }
    DeltaTerms out = delta_terms_closed_form(profile, config, mode);
    out.delta1 = sum1 / n_trials;
    out.delta2 = sum2 / n_trials;
    return out;
}

}  // namespace fdrelay

#endif  // FDRELAY_RELAY_HPP
