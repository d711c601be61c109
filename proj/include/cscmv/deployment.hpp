// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cscmv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cscmv {

/// Path-loss compensation of the uplink. Distances in meters, powers in W.
struct PowerControlParams {
    double alpha = 4.0;     // path-loss exponent
    double beta = 4.0;      // compensated part of the exponent, in [0, alpha]
    double r_ref = 10.0;    // reference distance
    double p_ref = 1.0;     // received power at r_ref
    double obo_ref = 30.0;  // back-off at r_ref, dB
    double obo_min = 30.0;  // smallest back-off meeting the emission mask, dB
    double noise_power = 0.01;

    void validate() const;
    double target_snr_db() const;
};

/// Distance up to which the compensation fits inside the back-off budget:
/// r_ref * 10^((obo_ref - obo_min) / (10 beta)). std::domain_error for beta = 0.
double coverage_radius(const PowerControlParams& pc);

/// Received power as the piecewise compensation law states it:
/// (d/r_ref)^(beta-alpha) p_ref below r_p and (r_p/r_ref)^(beta-alpha) p_ref
/// from r_p on.
double received_power(const PowerControlParams& pc, double r_p, double d);

/// Received power when the transmit power stops growing at r_p: the device
/// sends (min(d, r_p)/r_ref)^beta and the link loses (d/r_ref)^alpha. Equal
/// to received_power() below r_p; decays as d^-alpha beyond.
double clamped_received_power(const PowerControlParams& pc, double r_p, double d);

struct SnrPoint {
    double distance_m = 0.0;
    double snr_db = 0.0;
};

/// Uplink SNR over `distances` with the coverage radius implied by
/// `obo_min_db` (overrides pc.obo_min).
std::vector<SnrPoint> snr_vs_distance(PowerControlParams pc, double obo_min_db, std::span<const double> distances);

enum class RadialLayout {
    uniform_radius, // d ~ U[r_min, r_max]
    // first half of the devices uniform in radius on [r_min, r_max/sqrt2],
    // second half on [r_max/sqrt2, r_max]
    equal_halves,
};

struct Deployment {
    std::vector<double> distances;
    double r_min = 0.0;
    double r_max = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return distances.size(); }
    std::size_t count_within(double radius) const;
};

Deployment sample_deployment(std::size_t devices, double r_min, double r_max, RadialLayout layout,
                             std::uint64_t seed);

} // namespace cscmv
