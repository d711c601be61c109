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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cscmv {

PowerDelayProfile PowerDelayProfile::epa() {
    return {{0.0, 30e-9, 70e-9, 90e-9, 110e-9, 190e-9, 410e-9}, {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8}};
}

double PowerDelayProfile::max_excess_delay() const {
    return delays_s.empty() ? 0.0 : *std::max_element(delays_s.begin(), delays_s.end());
}

double PowerDelayProfile::rms_delay_spread() const {
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < delays_s.size(); ++i) {
        const double w = db_to_linear(powers_db[i]);
        p += w;
        m1 += w * delays_s[i];
        m2 += w * delays_s[i] * delays_s[i];
    }
    m1 /= p;
    m2 /= p;
    return std::sqrt(m2 - m1 * m1);
}

int ChannelRealization::max_delay() const {
    int d = 0;
    for (const auto& t : taps) d = std::max(d, t.delay);
    return d;
}

double ChannelRealization::total_power() const {
    double p = 0.0;
    for (const auto& t : taps) p += std::norm(t.gain);
    return p;
}

ComplexVector ChannelRealization::frequency_response(const WaveformConfig& cfg, int extra_delay) const {
    ComplexVector h(static_cast<std::size_t>(cfg.num_bins));
    for (int k = 0; k < cfg.num_bins; ++k) {
        const double j = cfg.bin_frequency(k);
        Complex acc{};
        for (const auto& t : taps)
            acc += t.gain * std::polar(1.0, -2.0 * std::numbers::pi * j * (t.delay + extra_delay) / cfg.fft_size);
        h[static_cast<std::size_t>(k)] = acc;
    }
    return h;
}

ChannelRealization draw_fading(const PowerDelayProfile& profile, double sample_rate, const RngKey& key) {
    double total = 0.0;
    for (double p : profile.powers_db) total += db_to_linear(p);
    auto rng = make_rng(key);
    std::normal_distribution<double> normal(0.0, 1.0);
    ChannelRealization ch;
    for (std::size_t i = 0; i < profile.delays_s.size(); ++i) {
        const double power = db_to_linear(profile.powers_db[i]) / total;
        const double sd = std::sqrt(power / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        const Complex g(sd * re, sd * im);
        const int delay = static_cast<int>(std::lround(profile.delays_s[i] * sample_rate));
        auto it = std::find_if(ch.taps.begin(), ch.taps.end(), [&](const Tap& t) { return t.delay == delay; });
        if (it != ch.taps.end())
            it->gain += g;
        else
            ch.taps.push_back({delay, g});
    }
    return ch;
}

ChannelRealization draw_epa(double sample_rate, const RngKey& key) {
    static const PowerDelayProfile profile = PowerDelayProfile::epa();
    return draw_fading(profile, sample_rate, key);
}

SyncError draw_sync_error(int max_offset, const RngKey& key) {
    if (max_offset <= 0) return {0};
    auto rng = make_rng(key);
    std::uniform_int_distribution<int> dist(0, max_offset);
    return {dist(rng)};
}

ComplexSignal propagate(const ChannelRealization& channel, SyncError sync, const ComplexSignal& tx) {
    ComplexSignal out;
    out.sample_period = tx.sample_period;
    out.samples.assign(tx.size(), Complex{});
    const auto n = static_cast<std::ptrdiff_t>(tx.size());
    for (const auto& t : channel.taps) {
        const std::ptrdiff_t d = t.delay + sync.offset;
        for (std::ptrdiff_t i = d; i < n; ++i) out.samples[static_cast<std::size_t>(i)] += t.gain * tx.samples[static_cast<std::size_t>(i - d)];
    }
    return out;
}

ComplexSignal superpose(std::span<const WeightedSignal> signals, double noise_power, const RngKey& noise_key) {
    if (signals.empty()) throw std::invalid_argument("superpose: need at least one signal");
    const std::size_t len = signals.front().signal->size();
    ComplexSignal out;
    out.sample_period = signals.front().signal->sample_period;
    out.samples.assign(len, Complex{});
    for (const auto& ws : signals) {
        if (ws.signal->size() != len) throw FramingError("superpose: signals differ in length");
        const double a = std::sqrt(ws.power);
        for (std::size_t i = 0; i < len; ++i) out.samples[i] += a * ws.signal->samples[i];
    }
    if (noise_power > 0.0) {
        auto rng = make_rng(noise_key);
        std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
        for (auto& v : out.samples) {
            const double re = normal(rng);
            const double im = normal(rng);
            v += Complex(re, im);
        }
    }
    return out;
}

std::optional<int> min_guard_bins(const WaveformConfig& cfg, double t_chn, double t_sync) {
    if (t_chn < 0.0 || t_sync < 0.0) throw std::invalid_argument("min_guard_bins: durations must be non-negative");
    const double per_bin = cfg.symbol_duration() / cfg.num_bins;
    const double needed = t_chn + t_sync;
    // tolerate rounding when the requirement is an exact multiple of a bin
    const int guard = static_cast<int>(std::ceil(needed / per_bin - 1e-9));
    if (cfg.num_bins / (2 + 2 * guard) < 1) return std::nullopt;
    return guard;
}

} // namespace cscmv
