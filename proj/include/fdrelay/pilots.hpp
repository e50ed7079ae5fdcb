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

#ifndef FDRELAY_PILOTS_HPP
#define FDRELAY_PILOTS_HPP

#include "fdrelay/channel.hpp"

#include <numbers>

namespace fdrelay {

/// Pilot matrix with orthonormal rows: 2K x tau (ICE) or K x tau_c (CCE).
template <typename Scalar>
struct PilotBook {
    CMatrix<Scalar> Phi;
    Estimation mode = Estimation::Individual;

    Eigen::Index sequences() const { return Phi.rows(); }
    Eigen::Index length() const { return Phi.cols(); }
};

/// Rows of the normalised length-L DFT matrix. Any L >= rows works.
template <typename Scalar = double>
PilotBook<Scalar> make_pilot_book(Estimation mode, Eigen::Index rows, Eigen::Index length) {
    if (length < rows) throw ConfigError("pilot length shorter than the number of orthogonal sequences");
    PilotBook<Scalar> book;
    book.mode = mode;
    book.Phi.resize(rows, length);
    const double norm = 1.0 / std::sqrt(double(length));
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index n = 0; n < length; ++n) {
            const double phase = -2.0 * std::numbers::pi * double(r * n) / double(length);
            book.Phi(r, n) = std::complex<Scalar>(Scalar(norm * std::cos(phase)), Scalar(norm * std::sin(phase)));
        }
    return book;
}

template <typename Scalar = double>
PilotBook<Scalar> make_pilot_book(Estimation mode, const SystemConfig& config) {
    return mode == Estimation::Individual ? make_pilot_book<Scalar>(mode, config.users(), config.training)
                                          : make_pilot_book<Scalar>(mode, config.pairs, config.composite_training);
}

/// Pilot observations at the receive (Y_r) and transmit (Y_t) arrays.
template <typename Scalar>
struct ReceivedPilots {
    CMatrix<Scalar> Y_r;
    CMatrix<Scalar> Y_t;
    Estimation mode = Estimation::Individual;
};

/// Y_r = sqrt(tau P_p) G Phi + Z_r (ICE) or sqrt(tau_c P_p) (G_1+G_2) Phi_c + Z_r
/// (CCE), with caller-supplied noise; likewise for Y_t with F.
template <typename Scalar>
ReceivedPilots<Scalar> simulate_pilot_phase(const SystemConfig& config, const ChannelSet<Scalar>& channels,
                                            const PilotBook<Scalar>& pilots, const CMatrix<Scalar>& noise_r,
                                            const CMatrix<Scalar>& noise_t) {
    const Eigen::Index needed = pilots.mode == Estimation::Individual ? config.users() : config.pairs;
    if (pilots.sequences() != needed) throw ConfigError("pilot book does not match the pilot scheme");
    if (pilots.length() < needed) throw ConfigError("pilot sequences too short for orthogonality");
    const Scalar gain = Scalar(std::sqrt(double(pilots.length()) * config.pilot_power));
    ReceivedPilots<Scalar> rx;
    rx.mode = pilots.mode;
    if (pilots.mode == Estimation::Individual) {
        rx.Y_r.noalias() = gain * channels.G * pilots.Phi;
        rx.Y_t.noalias() = gain * channels.F * pilots.Phi;
    } else {
        rx.Y_r.noalias() = gain * pair_sum(channels.G) * pilots.Phi;
        rx.Y_t.noalias() = gain * pair_sum(channels.F) * pilots.Phi;
    }
    if (noise_r.rows() != rx.Y_r.rows() || noise_r.cols() != rx.Y_r.cols() || noise_t.rows() != rx.Y_t.rows() ||
        noise_t.cols() != rx.Y_t.cols())
        throw ConfigError("pilot noise dimension mismatch");
    rx.Y_r += noise_r;
    rx.Y_t += noise_t;
    return rx;
}

/// Same, drawing the noise entries CN(0, sigma^2_nr).
template <typename Scalar>
ReceivedPilots<Scalar> simulate_pilot_phase(const SystemConfig& config, const ChannelSet<Scalar>& channels,
                                            const PilotBook<Scalar>& pilots, Rng& rng) {
    const auto nr = complex_gaussian<Scalar>(channels.G.rows(), pilots.length(), config.relay_noise, rng);
    const auto nt = complex_gaussian<Scalar>(channels.F.rows(), pilots.length(), config.relay_noise, rng);
    return simulate_pilot_phase(config, channels, pilots, nr, nt);
}

template <typename Scalar>
struct ChannelEstimates {
    CMatrix<Scalar> G_hat;
    CMatrix<Scalar> F_hat;
};

/// Least-squares estimate: Y Phi^H / sqrt(tau P_p).
template <typename Scalar>
ChannelEstimates<Scalar> ls_estimate(const ReceivedPilots<Scalar>& rx, const PilotBook<Scalar>& pilots,
                                     double pilot_power) {
    if (rx.Y_r.cols() != pilots.length() || rx.Y_t.cols() != pilots.length())
        throw ConfigError("received pilot length does not match the pilot book");
    if (!(pilot_power > 0)) throw ConfigError("pilot power must be positive for LS estimation");
    const Scalar scale = Scalar(1.0 / std::sqrt(double(pilots.length()) * pilot_power));
    ChannelEstimates<Scalar> est;
    est.G_hat.noalias() = scale * rx.Y_r * pilots.Phi.adjoint();
    est.F_hat.noalias() = scale * rx.Y_t * pilots.Phi.adjoint();
    return est;
}

/// Runs the full training phase for `mode` and stores the estimates.
template <typename Scalar>
void train(ChannelSet<Scalar>& channels, const SystemConfig& config, Estimation mode, Rng& rng) {
    const auto pilots = make_pilot_book<Scalar>(mode, config);
    const auto rx = simulate_pilot_phase(config, channels, pilots, rng);
    auto est = ls_estimate(rx, pilots, config.pilot_power);
    channels.G_hat = std::move(est.G_hat);
    channels.F_hat = std::move(est.F_hat);
    channels.mode = mode;
}

}  // namespace fdrelay

#endif  // FDRELAY_PILOTS_HPP
