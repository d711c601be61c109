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

#include "cscmv/waveform.hpp"
#include "cscmv/numerics.hpp"

#include <cmath>
#include <numbers>

namespace cscmv {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> rising_edge(int len) {
    std::vector<double> w(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / len));
    return w;
}

void check_bins(const WaveformConfig& cfg, std::size_t n) {
    if (n != static_cast<std::size_t>(cfg.num_bins))
        throw FramingError("expected " + std::to_string(cfg.num_bins) + " bins, got " + std::to_string(n));
}

ComplexVector receive_subcarriers(const WaveformConfig& cfg, const ComplexSignal& r) {
    if (r.size() != static_cast<std::size_t>(cfg.symbol_length()))
        throw FramingError("expected one symbol of " + std::to_string(cfg.symbol_length()) + " samples, got " +
                           std::to_string(r.size()));
    std::span<const Complex> body(r.samples.data() + cfg.cp_len, static_cast<std::size_t>(cfg.fft_size));
    return dft(body);
}

} // namespace

void WaveformConfig::validate() const {
    if (num_bins <= 0) throw ConfigError("num_bins must be positive");
    if (fft_size < num_bins) throw ConfigError("fft_size must be at least num_bins");
    if (!(sweep_cycles > 0.0) || !std::isfinite(sweep_cycles)) throw ConfigError("sweep_cycles must be positive");
    if (highest_freq - lowest_freq + 1 != num_bins) throw ConfigError("highest_freq - lowest_freq + 1 must equal num_bins");
    if (lowest_freq > -sweep_cycles / 2.0) throw ConfigError("lowest_freq must not exceed -sweep_cycles/2");
    if (highest_freq < sweep_cycles / 2.0) throw ConfigError("highest_freq must be at least sweep_cycles/2");
    if (cp_len < 0 || cp_len >= fft_size) throw ConfigError("cp_len must lie in [0, fft_size)");
    if (window_rolloff < 0 || window_rolloff > cp_len) throw ConfigError("window_rolloff must lie in [0, cp_len]");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (2 * lowest_freq < -fft_size || 2 * highest_freq >= fft_size) throw ConfigError("occupied band exceeds the IDFT grid");
}

WaveformConfig WaveformConfig::oversampled(int factor) const {
    if (factor < 1) throw std::invalid_argument("oversampling factor must be >= 1");
    WaveformConfig c = *this;
    c.fft_size *= factor;
    c.cp_len *= factor;
    c.window_rolloff *= factor;
    c.sample_rate *= factor;
    return c;
}

int WaveformConfig::bin_frequency(int k) const {
    // the unique frequency in [lowest_freq, highest_freq] congruent to k mod M
    int j = (k - lowest_freq) % num_bins;
    if (j < 0) j += num_bins;
    return lowest_freq + j;
}

int WaveformConfig::subcarrier_index(int k) const {
    const int j = bin_frequency(k);
    return ((j % fft_size) + fft_size) % fft_size;
}

FdssVector build_fdss(const WaveformConfig& cfg) {
    if (!(cfg.sweep_cycles > 0.0)) throw std::invalid_argument("build_fdss: sweep must be positive");
    // The Fresnel form is written for the angular sweep (radians per symbol).
    const double sweep = 2.0 * kPi * cfg.sweep_cycles;
    const double root = std::sqrt(kPi * sweep);
    FdssVector f;
    f.coeffs.resize(static_cast<std::size_t>(cfg.num_bins));
    double energy = 0.0;
    for (int k = 0; k < cfg.num_bins; ++k) {
        const double j = cfg.bin_frequency(k);
        const double a = (sweep / 2.0 + 2.0 * kPi * j) / root;
        const double b = (sweep / 2.0 - 2.0 * kPi * j) / root;
        const FresnelPair fa = fresnel(a);
        const FresnelPair fb = fresnel(b);
        const double w = 2.0 * kPi * j;
        const Complex gamma = std::sqrt(kPi / sweep) * std::polar(1.0, -w * w / (2.0 * sweep) - kPi * j);
        const Complex v = gamma * Complex(fa.c + fb.c, fa.s + fb.s);
        f.coeffs[static_cast<std::size_t>(k)] = v;
        energy += std::norm(v);
    }
    const double scale = std::sqrt(cfg.num_bins / energy);
    for (auto& v : f.coeffs) v *= scale;
    return f;
}

FdssVector flat_fdss(const WaveformConfig& cfg) {
    return FdssVector{ComplexVector(static_cast<std::size_t>(cfg.num_bins), Complex(1.0, 0.0))};
}

ComplexSignal synthesize_symbol(const WaveformConfig& cfg, std::span<const Complex> subcarriers) {
    if (subcarriers.size() != static_cast<std::size_t>(cfg.fft_size))
        throw FramingError("synthesize_symbol: expected fft_size subcarriers");
    const ComplexVector body = idft(subcarriers);
    const auto n = static_cast<std::size_t>(cfg.fft_size);
    const auto cp = static_cast<std::size_t>(cfg.cp_len);
    ComplexSignal out;
    out.sample_period = 1.0 / cfg.sample_rate;
    out.samples.resize(cp + n);
    for (std::size_t i = 0; i < cp; ++i) out.samples[i] = body[n - cp + i];
    for (std::size_t i = 0; i < n; ++i) out.samples[cp + i] = body[i];
    const auto rise = rising_edge(cfg.window_rolloff);
    for (std::size_t i = 0; i < rise.size(); ++i) out.samples[i] *= rise[i];
    return out;
}

ComplexSignal spread(const WaveformConfig& cfg, const FdssVector& f, std::span<const Complex> s) {
    check_bins(cfg, s.size());
    check_bins(cfg, f.coeffs.size());
    const ComplexVector precoded = dft(s);
    ComplexVector grid(static_cast<std::size_t>(cfg.fft_size));
    for (int k = 0; k < cfg.num_bins; ++k)
        grid[static_cast<std::size_t>(cfg.subcarrier_index(k))] = f.coeffs[static_cast<std::size_t>(k)] * precoded[static_cast<std::size_t>(k)];
    return synthesize_symbol(cfg, grid);
}

BinVector despread(const WaveformConfig& cfg, const FdssVector& f, const ComplexSignal& r) {
    check_bins(cfg, f.coeffs.size());
    const ComplexVector grid = receive_subcarriers(cfg, r);
    ComplexVector shaped(static_cast<std::size_t>(cfg.num_bins));
    for (int k = 0; k < cfg.num_bins; ++k)
        shaped[static_cast<std::size_t>(k)] =
            std::conj(f.coeffs[static_cast<std::size_t>(k)]) * grid[static_cast<std::size_t>(cfg.subcarrier_index(k))];
    return idft(shaped);
}

ComplexSignal modulate_ofdm(const WaveformConfig& cfg, std::span<const Complex> x) {
    check_bins(cfg, x.size());
    ComplexVector grid(static_cast<std::size_t>(cfg.fft_size));
    for (int k = 0; k < cfg.num_bins; ++k) grid[static_cast<std::size_t>(cfg.subcarrier_index(k))] = x[static_cast<std::size_t>(k)];
    return synthesize_symbol(cfg, grid);
}

BinVector demodulate_ofdm(const WaveformConfig& cfg, const ComplexSignal& r) {
    const ComplexVector grid = receive_subcarriers(cfg, r);
    BinVector out(static_cast<std::size_t>(cfg.num_bins));
    for (int k = 0; k < cfg.num_bins; ++k) out[static_cast<std::size_t>(k)] = grid[static_cast<std::size_t>(cfg.subcarrier_index(k))];
    return out;
}

ComplexSignal overlap_add(const WaveformConfig& cfg, std::span<const ComplexSignal> symbols) {
    const auto len = static_cast<std::size_t>(cfg.symbol_length());
    const auto cp = static_cast<std::size_t>(cfg.cp_len);
    const auto ro = static_cast<std::size_t>(cfg.window_rolloff);
    const auto rise = rising_edge(cfg.window_rolloff);
    ComplexSignal out;
    out.sample_period = 1.0 / cfg.sample_rate;
    out.samples.assign(symbols.size() * len + ro, Complex{});
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const auto& sym = symbols[s].samples;
        if (sym.size() != len) throw FramingError("overlap_add: symbol length mismatch");
        const std::size_t base = s * len;
        for (std::size_t i = 0; i < len; ++i) out.samples[base + i] += sym[i];
        // cyclic suffix: continuation of the body start, tapered down
        for (std::size_t i = 0; i < ro; ++i) out.samples[base + len + i] += sym[cp + i] * rise[ro - 1 - i];
    }
    return out;
}

ComplexSignal symbol_body(const WaveformConfig& cfg, const ComplexSignal& symbol) {
    if (symbol.size() != static_cast<std::size_t>(cfg.symbol_length())) throw FramingError("symbol_body: length mismatch");
    ComplexSignal out;
    out.sample_period = symbol.sample_period;
    out.samples.assign(symbol.samples.begin() + cfg.cp_len, symbol.samples.end());
    return out;
}

} // namespace cscmv
