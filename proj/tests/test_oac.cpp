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

#include "cscmv/channel.hpp"
#include "cscmv/learn.hpp"
#include "cscmv/numerics.hpp"
#include "cscmv/oac.hpp"
#include "cscmv/waveform.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace cscmv;

namespace {

VoteVector random_votes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    VoteVector v(n);
    for (auto& x : v) x = (rng() & 1) ? 1 : -1;
    return v;
}

// y[n] = sum_j x[j] c[(n - j) mod M]
BinVector circular_convolve(const BinVector& x, const ComplexVector& c) {
    const std::size_t m = x.size();
    BinVector y(m);
    for (std::size_t n = 0; n < m; ++n)
        for (std::size_t j = 0; j < m; ++j) y[n] += x[j] * c[(n + m - j) % m];
    return y;
}

} // namespace

TEST_SUITE("oac") {

TEST_CASE("vote plan sizing") {
    CHECK(votes_per_block(54, 12) == 2);
    CHECK(votes_per_block(54, 5) == 4);
    CHECK(votes_per_block(54, 0) == 27);
    CHECK(guard_for_votes(54, 1) == 26);
    CHECK(guard_for_votes(54, 2) == 12);
    CHECK(guard_for_votes(54, 4) == 5);
    CHECK(build_vote_plan(123090, 54, 12).blocks == 61545);
    CHECK(build_vote_plan(123090, 54, 5).blocks == 30773);
    CHECK_THROWS_AS(build_vote_plan(10, 54, 27), InfeasibleError);
    CHECK_THROWS_AS(votes_per_block(54, -1), std::invalid_argument);
    CHECK_THROWS_AS(guard_for_votes(54, 28), InfeasibleError);
}

TEST_CASE("groups are disjoint and each vote lights exactly one bin") {
    const VotePlan plan = build_vote_plan(9, 54, 5);
    std::set<std::pair<std::size_t, int>> used;
    for (std::size_t i = 0; i < plan.gradients; ++i) {
        for (const auto r : {plan.positive(i), plan.negative(i)}) {
            CHECK(used.insert({r.block, r.group}).second);
            CHECK(plan.group_start(r.group) + plan.group_width() <= plan.num_bins);
        }
    }
    const auto votes = random_votes(plan.gradients, 3);
    const RngKey key{5, 1, 2, DrawKind::symbols, 0};
    const auto blocks = encode_csc(plan, votes, key);
    REQUIRE(blocks.size() == 3);
    std::size_t active = 0;
    for (const auto& b : blocks)
        for (const auto& x : b)
            if (x != Complex{}) {
                ++active;
                CHECK(std::abs(x) == doctest::Approx(1.0));
            }
    CHECK(active == plan.gradients);
    for (std::size_t i = 0; i < plan.gradients; ++i) {
        const auto r = votes[i] > 0 ? plan.positive(i) : plan.negative(i);
        CHECK(blocks[r.block][static_cast<std::size_t>(plan.group_start(r.group))] == vote_symbol(key, i));
    }
    CHECK_THROWS_AS(encode_csc(plan, VoteVector(8, 1), key), FramingError);
}

TEST_CASE("vote symbols depend on the device key") {
    const RngKey a{1, 0, 0, DrawKind::symbols, 0};
    const RngKey b{1, 0, 1, DrawKind::symbols, 0};
    CHECK(vote_symbol(a, 0) == vote_symbol(a, 0));
    CHECK(vote_symbol(a, 0) != vote_symbol(b, 0));
    CHECK(vote_symbol(a, 0) != vote_symbol(a, 1));
}

TEST_CASE("empty blocks decide +1 with zero margin") {
    const VotePlan plan = build_vote_plan(4, 54, 12);
    const std::vector<BinVector> zeros(plan.blocks, BinVector(54));
    const auto rep = detect_mv(plan, zeros);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(rep.mv[i] == 1);
        CHECK(rep.margins[i] == 0.0);
    }
    CHECK_THROWS_AS(detect_mv(plan, std::vector<BinVector>(1, BinVector(54))), FramingError);
    CHECK_THROWS_AS(detect_mv(plan, std::vector<BinVector>(2, BinVector(53))), FramingError);
}

TEST_CASE("circulant kernel matches the waveform chain") {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        BinVector s(54);
        for (auto& x : s) x = {n(rng), n(rng)};
        const auto ch = draw_epa(cfg.sample_rate, RngKey{3, static_cast<std::uint64_t>(trial), 0, DrawKind::channel, 0});
        const SyncError sync{trial % 9};
        const auto chain = despread(cfg, f, propagate(ch, sync, spread(cfg, f, s)));
        const auto kernel = circulant_kernel(cfg, f, ch.frequency_response(cfg, sync.offset));
        const auto fast = circular_convolve(s, kernel);
        for (std::size_t k = 0; k < 54; ++k) CHECK(std::abs(chain[k] - fast[k]) < 1e-9);

        std::vector<BinVector> acc(1, BinVector(54));
        const VotePlan plan = build_vote_plan(2, 54, 12);
        const VoteVector votes = {1, -1};
        const RngKey key{4, 0, 0, DrawKind::symbols, 0};
        accumulate_csc(plan, votes, key, kernel, 1.5, acc);
        const auto direct = circular_convolve(encode_csc(plan, votes, key).front(), kernel);
        for (std::size_t k = 0; k < 54; ++k) CHECK(std::abs(acc[0][k] - 1.5 * direct[k]) < 1e-12);
    }
}

TEST_CASE("a pure delay multiplies the kernel spectrum by a phase ramp") {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    ChannelRealization unit;
    unit.taps = {{0, {1.0, 0.0}}};
    const auto k0 = dft(circulant_kernel(cfg, f, unit.frequency_response(cfg, 0)));
    for (int d = 1; d <= 14; ++d) {
        const auto kd = dft(circulant_kernel(cfg, f, unit.frequency_response(cfg, d)));
        for (int k = 0; k < 54; ++k) {
            const double j = cfg.bin_frequency(k);
            const auto ku = static_cast<std::size_t>(k);
            CHECK(std::abs(kd[ku] - k0[ku] * std::polar(1.0, -2.0 * std::numbers::pi * j * d / 64.0)) < 1e-12);
        }
    }
}

TEST_CASE("delayed chirps keep most energy in their group") {
    // The chirp's bin-domain response is not confined to the guard: a
    // delay shifts it by d*M/N bins and leaves sidelobes outside. Detection
    // still only needs the active group to dominate the opposite one.
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    const VotePlan plan = build_vote_plan(1, 54, 12);
    ChannelRealization unit;
    unit.taps = {{0, {1.0, 0.0}}};
    for (int d = 0; d <= 10; ++d) {
        const auto kernel = circulant_kernel(cfg, f, unit.frequency_response(cfg, d));
        std::vector<BinVector> rx(1, BinVector(54));
        accumulate_csc(plan, {1}, RngKey{}, kernel, 1.0, rx);
        double in = 0.0, total = 0.0;
        for (int j = 0; j < 54; ++j) {
            const double e = std::norm(rx[0][static_cast<std::size_t>(j)]);
            total += e;
            if (j < plan.group_width()) in += e;
        }
        CHECK(10.0 * std::log10((total - in) / total) < -8.0);
        const auto rep = detect_mv(plan, rx);
        CHECK(rep.mv[0] == 1);
        CHECK(rep.margins[0] > 0.5 * total);
    }
}

TEST_CASE("single device round trip is exact over fading and admissible sync") {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    const VotePlan plan = build_vote_plan(2, 54, 12);
    int errors = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto votes = random_votes(2, t);
        const auto ch = draw_epa(cfg.sample_rate, RngKey{21, t, 0, DrawKind::channel, 0});
        const auto sync = draw_sync_error(4, RngKey{21, t, 0, DrawKind::sync, 0});
        const RngKey key{21, t, 0, DrawKind::symbols, 0};
        const auto rx = despread(cfg, f, propagate(ch, sync, spread(cfg, f, encode_csc(plan, votes, key).front())));
        const std::vector<BinVector> blocks{rx};
        if (detect_mv(plan, blocks).mv != votes) ++errors;
    }
    CHECK(errors == 0);
}

TEST_CASE("multi-device expected margin follows the majority") {
    // Brute force: average the detector margin over every QPSK phase
    // assignment, which cancels the cross terms exactly.
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    const VotePlan plan = build_vote_plan(1, 54, 12);
    ChannelRealization unit;
    unit.taps = {{0, {1.0, 0.0}}};
    const auto kernel = circulant_kernel(cfg, f, unit.frequency_response(cfg, 0));
    const Complex qpsk[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double single_margin = 0.0;
    {
        BinVector tx(54);
        tx[0] = 1.0;
        const std::vector<BinVector> rx{circular_convolve(tx, kernel)};
        single_margin = detect_mv(plan, rx).margins[0];
    }
    for (std::size_t devices = 1; devices <= 4; ++devices) {
        for (unsigned pattern = 0; pattern < (1u << devices); ++pattern) {
            std::vector<VoteVector> votes(devices);
            for (std::size_t k = 0; k < devices; ++k) votes[k] = {(pattern >> k) & 1 ? 1 : -1};
            double mean_margin = 0.0;
            unsigned combos = 1u << (2 * devices);
            for (unsigned c = 0; c < combos; ++c) {
                BinVector tx(54);
                for (std::size_t k = 0; k < devices; ++k) {
                    const auto r = votes[k][0] > 0 ? plan.positive(0) : plan.negative(0);
                    tx[static_cast<std::size_t>(plan.group_start(r.group))] += qpsk[(c >> (2 * k)) & 3];
                }
                const std::vector<BinVector> rx{circular_convolve(tx, kernel)};
                mean_margin += detect_mv(plan, rx).margins[0];
            }
            mean_margin /= combos;
            int sum = 0;
            for (const auto& v : votes) sum += v[0];
            const VoteVector mv = ideal_mv(votes);
            CHECK(sign_of(mean_margin) == mv[0]);
            // A tie is decided by the small asymmetric leakage between the
            // two groups, not by either vote's main lobe.
            if (sum == 0) CHECK(std::abs(mean_margin) < 0.25 * single_margin);
        }
    }
}

TEST_CASE("despread noise has the expected power") {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    double acc = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t)
        for (const auto& z : despread_noise(cfg, f, 0.5, RngKey{1, 0, 0, DrawKind::noise, static_cast<std::uint64_t>(t)}))
            acc += std::norm(z);
    // E|z|^2 per bin = noise_power * sum|f|^2 / M = noise_power
    CHECK(acc / (trials * 54.0) == doctest::Approx(0.5).epsilon(0.02));
    for (const auto& z : despread_noise(cfg, f, 0.0, RngKey{})) CHECK(z == Complex{});
}

TEST_CASE("OBDA single device recovers its votes on kept subcarriers") {
    const WaveformConfig cfg;
    const auto ch = draw_epa(cfg.sample_rate, RngKey{2, 0, 0, DrawKind::channel, 0});
    const auto h = ch.frequency_response(cfg, 3);
    const auto votes = random_votes(150, 8);
    const auto tx = encode_obda(votes, h, 0.3, 54);
    REQUIRE(tx.size() == obda_blocks(150, 54));
    CHECK(tx.size() == 2);
    std::vector<BinVector> rx = tx;
    for (auto& b : rx)
        for (std::size_t k = 0; k < 54; ++k) b[k] *= h[k];
    const auto mv = decode_obda(rx, 150);
    double rms = 0.0;
    for (const auto& x : h) rms += std::norm(x);
    rms = std::sqrt(rms / 54.0);
    for (std::size_t i = 0; i < 150; ++i) {
        const std::size_t k = (i / 2) % 54;
        if (std::abs(h[k]) >= 0.3 * rms) {
            CHECK(mv[i] == votes[i]);
            CHECK(std::abs(rx[i / 108][k]) == doctest::Approx(1.0));
        } else {
            CHECK(mv[i] == 1);
        }
    }
}

TEST_CASE("OBDA sums aligned votes and mutes faded subcarriers") {
    ComplexVector h(54, Complex(0.5, 0.5));
    h[7] = Complex(0.01, 0.0);
    const std::vector<VoteVector> votes = {VoteVector(108, 1), VoteVector(108, 1), VoteVector(108, -1)};
    std::vector<BinVector> rx(1, BinVector(54));
    for (const auto& v : votes) {
        const auto tx = encode_obda(v, h, 0.3, 54);
        CHECK(tx[0][7] == Complex{});
        for (std::size_t k = 0; k < 54; ++k) rx[0][k] += h[k] * tx[0][k];
    }
    const auto mv = decode_obda(rx, 108);
    for (std::size_t i = 0; i < 108; ++i) CHECK(mv[i] == 1);
    CHECK(std::abs(rx[0][0] - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-12);
    CHECK_THROWS_AS(encode_obda(votes[0], ComplexVector(53), 0.3, 54), FramingError);
}

}
