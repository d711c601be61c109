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

#include "cscmv/oac.hpp"
#include "cscmv/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cscmv {

int votes_per_block(int num_bins, int guard_bins) {
    if (guard_bins < 0) throw std::invalid_argument("guard bins must be non-negative");
    return num_bins / (2 + 2 * guard_bins);
}

int guard_for_votes(int num_bins, int votes) {
    if (votes < 1 || 2 * votes > num_bins) throw InfeasibleError("cannot place that many votes per block");
    return (num_bins / votes - 2) / 2;
}

VotePlan build_vote_plan(std::size_t gradients, int num_bins, int guard_bins) {
    const int mv = votes_per_block(num_bins, guard_bins);
    if (mv < 1) throw InfeasibleError("guard of " + std::to_string(guard_bins) + " bins leaves no room for a vote");
    VotePlan p;
    p.gradients = gradients;
    p.num_bins = num_bins;
    p.guard_bins = guard_bins;
    p.votes_per_block = mv;
    p.blocks = (gradients + static_cast<std::size_t>(mv) - 1) / static_cast<std::size_t>(mv);
    return p;
}

Complex vote_symbol(const RngKey& device_key, std::size_t gradient) {
    const std::uint64_t bits = mix_key(device_key.with_index(gradient));
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return std::polar(1.0, 2.0 * std::numbers::pi * u);
}

std::vector<BinVector> encode_csc(const VotePlan& plan, const VoteVector& votes, const RngKey& device_key) {
    if (votes.size() != plan.gradients) throw FramingError("encode_csc: vote count does not match the plan");
    std::vector<BinVector> blocks(plan.blocks, BinVector(static_cast<std::size_t>(plan.num_bins)));
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const VoteResource r = votes[i] >= 0 ? plan.positive(i) : plan.negative(i);
        blocks[r.block][static_cast<std::size_t>(plan.group_start(r.group))] = vote_symbol(device_key, i);
    }
    return blocks;
}

DetectorReport detect_mv(const VotePlan& plan, std::span<const BinVector> blocks) {
    if (blocks.size() != plan.blocks) throw FramingError("detect_mv: block count does not match the plan");
    for (const auto& b : blocks)
        if (b.size() != static_cast<std::size_t>(plan.num_bins)) throw FramingError("detect_mv: block length mismatch");
    auto energy = [&](VoteResource r) {
        const auto& b = blocks[r.block];
        double e = 0.0;
        const int start = plan.group_start(r.group);
        for (int j = start; j < start + plan.group_width(); ++j) e += std::norm(b[static_cast<std::size_t>(j)]);
        return e;
    };
    DetectorReport rep;
    rep.mv.resize(plan.gradients);
    rep.margins.resize(plan.gradients);
    for (std::size_t i = 0; i < plan.gradients; ++i) {
        const double delta = energy(plan.positive(i)) - energy(plan.negative(i));
        rep.margins[i] = delta;
        rep.mv[i] = sign_of(delta);
    }
    return rep;
}

ComplexVector circulant_kernel(const WaveformConfig& cfg, const FdssVector& f, std::span<const Complex> response) {
    const auto m = static_cast<std::size_t>(cfg.num_bins);
    if (response.size() != m || f.coeffs.size() != m) throw FramingError("circulant_kernel: length mismatch");
    ComplexVector v(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < m; ++k) v[k] = std::norm(f.coeffs[k]) * response[k] * scale;
    return idft(v);
}

void accumulate_csc(const VotePlan& plan, const VoteVector& votes, const RngKey& device_key,
                    std::span<const Complex> kernel, double amplitude, std::vector<BinVector>& blocks) {
    const auto m = static_cast<std::size_t>(plan.num_bins);
    if (votes.size() != plan.gradients || kernel.size() != m || blocks.size() != plan.blocks)
        throw FramingError("accumulate_csc: size mismatch");
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const VoteResource r = votes[i] >= 0 ? plan.positive(i) : plan.negative(i);
        const auto start = static_cast<std::size_t>(plan.group_start(r.group));
        const Complex a = amplitude * vote_symbol(device_key, i);
        auto& out = blocks[r.block];
        for (std::size_t n = 0; n < m; ++n) out[(start + n) % m] += a * kernel[n];
    }
}

BinVector despread_noise(const WaveformConfig& cfg, const FdssVector& f, double noise_power, const RngKey& key) {
    const auto m = static_cast<std::size_t>(cfg.num_bins);
    ComplexVector z(m);
    if (noise_power > 0.0) {
        auto rng = make_rng(key);
        std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
        for (std::size_t k = 0; k < m; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            z[k] = std::conj(f.coeffs[k]) * Complex(re, im);
        }
    }
    return idft(z);
}

std::size_t obda_blocks(std::size_t gradients, int num_bins) {
    const auto per_block = 2 * static_cast<std::size_t>(num_bins);
    return (gradients + per_block - 1) / per_block;
}

std::vector<BinVector> encode_obda(const VoteVector& votes, std::span<const Complex> response, double threshold,
                                   int num_bins) {
    const auto m = static_cast<std::size_t>(num_bins);
    if (response.size() != m) throw FramingError("encode_obda: channel response length mismatch");
    if (!(threshold >= 0.0)) throw std::invalid_argument("tci threshold must be non-negative");
    double mean_gain = 0.0;
    for (const auto& h : response) mean_gain += std::norm(h);
    const double cutoff = threshold * std::sqrt(mean_gain / static_cast<double>(m));
    const std::size_t blocks = obda_blocks(votes.size(), num_bins);
    std::vector<BinVector> out(blocks, BinVector(m));
    const double r2 = 1.0 / std::sqrt(2.0);
    for (std::size_t p = 0; 2 * p < votes.size(); ++p) {
        const std::size_t k = p % m;
        const Complex h = response[k];
        if (std::abs(h) < cutoff || std::abs(h) == 0.0) continue;
        const double re = votes[2 * p] >= 0 ? 1.0 : -1.0;
        const double im = 2 * p + 1 < votes.size() ? (votes[2 * p + 1] >= 0 ? 1.0 : -1.0) : 0.0;
        out[p / m][k] = Complex(re * r2, im * r2) / h;
    }
    return out;
}

VoteVector decode_obda(std::span<const BinVector> received, std::size_t gradients) {
    VoteVector mv(gradients, 1);
    for (std::size_t i = 0; i < gradients; ++i) {
        const std::size_t p = i / 2;
        if (received.empty()) break;
        const std::size_t m = received.front().size();
        const std::size_t b = p / m;
        if (b >= received.size()) throw FramingError("decode_obda: not enough received blocks");
        const Complex v = received[b][p % m];
        mv[i] = sign_of(i % 2 == 0 ? v.real() : v.imag());
    }
    return mv;
}

} // namespace cscmv
