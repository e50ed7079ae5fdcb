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

#include "fdrelay/channel.hpp"

#include <stdexcept>

namespace fdrelay {

double path_loss_gain(double distance, double shadow_db, double breakpoint, double exponent) {
    if (!(breakpoint > 0.0)) throw std::domain_error("path loss breakpoint must be positive");
    if (!(distance >= 0.0) || !std::isfinite(distance))
        throw std::domain_error("distance must be finite and nonnegative");
    return db_to_linear(shadow_db) / (1.0 + std::pow(distance / breakpoint, exponent));
}

LargeScaleProfile large_scale_from_geometry(std::span<const double> distances, double shadow_std_db,
                                            double breakpoint, double exponent, Rng& rng) {
    if (distances.size() % 2 != 0) throw ConfigError("need an even number of users");
    std::normal_distribution<double> shadow(0.0, 1.0);
    LargeScaleProfile p;
    p.beta_u.resize(static_cast<Eigen::Index>(distances.size()));
    for (std::size_t i = 0; i < distances.size(); ++i) {
        // always consume a draw so sigma=0 and sigma>0 share the stream layout
        const double omega = shadow_std_db * shadow(rng);
        p.beta_u(static_cast<Eigen::Index>(i)) = path_loss_gain(distances[i], omega, breakpoint, exponent);
    }
    p.beta_d = p.beta_u;
    return p;
}

}  // namespace fdrelay
