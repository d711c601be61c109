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

#include "cscmv/deployment.hpp"
#include "cscmv/common.hpp"
#include "cscmv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cscmv {

void PowerControlParams::validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("path-loss exponent must be non-negative");
    if (!(beta >= 0.0 && beta <= alpha)) throw ConfigError("beta must lie in [0, alpha]");
    if (!(r_ref > 0.0)) throw ConfigError("r_ref must be positive");
    if (!(p_ref > 0.0)) throw ConfigError("p_ref must be positive");
    if (!(obo_min <= obo_ref)) throw ConfigError("obo_min must not exceed obo_ref");
    if (!(noise_power >= 0.0)) throw ConfigError("noise power must be non-negative");
}

double PowerControlParams::target_snr_db() const { return linear_to_db(p_ref / noise_power); }

double coverage_radius(const PowerControlParams& pc) {
    pc.validate();
    if (pc.beta == 0.0) throw std::domain_error("coverage radius undefined without path-loss compensation");
    return pc.r_ref * std::pow(10.0, (pc.obo_ref - pc.obo_min) / (10.0 * pc.beta));
}

double received_power(const PowerControlParams& pc, double r_p, double d) {
    if (!(d >= 0.0)) throw std::domain_error("distance must be non-negative");
    const double r = d < r_p ? d : r_p;
    return std::pow(r / pc.r_ref, pc.beta - pc.alpha) * pc.p_ref;
}

double clamped_received_power(const PowerControlParams& pc, double r_p, double d) {
    if (!(d >= 0.0)) throw std::domain_error("distance must be non-negative");
    if (d < r_p) return received_power(pc, r_p, d);
    return std::pow(r_p / pc.r_ref, pc.beta) * std::pow(d / pc.r_ref, -pc.alpha) * pc.p_ref;
}

std::vector<SnrPoint> snr_vs_distance(PowerControlParams pc, double obo_min_db, std::span<const double> distances) {
    pc.obo_min = obo_min_db;
    const double r_p = coverage_radius(pc);
    std::vector<SnrPoint> out;
    out.reserve(distances.size());
    for (double d : distances) out.push_back({d, linear_to_db(clamped_received_power(pc, r_p, d) / pc.noise_power)});
    return out;
}

std::size_t Deployment::count_within(double radius) const {
    return static_cast<std::size_t>(std::count_if(distances.begin(), distances.end(), [&](double d) { return d < radius; }));
}

Deployment sample_deployment(std::size_t devices, double r_min, double r_max, RadialLayout layout,
                             std::uint64_t seed) {
    if (!(r_min >= 0.0 && r_min <= r_max)) throw ConfigError("deployment needs 0 <= r_min <= r_max");
    Deployment dep;
    dep.r_min = r_min;
    dep.r_max = r_max;
    dep.seed = seed;
    dep.distances.resize(devices);
    const double boundary = std::max(r_min, r_max / std::sqrt(2.0));
    for (std::size_t k = 0; k < devices; ++k) {
        auto rng = make_rng(RngKey{seed, 0, k, DrawKind::deployment, 0});
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double lo = r_min;
        double hi = r_max;
        if (layout == RadialLayout::equal_halves) {
            if (k < devices / 2)
                hi = boundary;
            else
                lo = boundary;
        }
        dep.distances[k] = lo + u * (hi - lo);
    }
    return dep;
}

} // namespace cscmv
