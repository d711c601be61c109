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

#include "cscmv/common.hpp"

#include <span>

namespace cscmv {

/// Numerology of the DFT-spread-OFDM chirp transmitter.
///
/// `sweep_cycles` is the frequency sweep of one chirp in subcarrier spacings
/// (cycles per symbol). The occupied band spans frequencies
/// `lowest_freq .. lowest_freq + num_bins - 1` (in subcarrier spacings),
/// centered on DC by default.
struct WaveformConfig {
    int num_bins = 54;
    int fft_size = 64;
    double sweep_cycles = 46.0;
    int lowest_freq = -27;
    int highest_freq = 26;
    int cp_len = 16;
    double sample_rate = 15.36e6;
    int window_rolloff = 2;

    void validate() const;

    double symbol_duration() const { return fft_size / sample_rate; }
    double subcarrier_spacing() const { return sample_rate / fft_size; }
    int symbol_length() const { return cp_len + fft_size; }

    // Same waveform sampled `factor` times faster (zero-padded IDFT).
    WaveformConfig oversampled(int factor) const;

    // Subcarrier frequency (in spacings) carried by DFT-precoder output k.
    int bin_frequency(int k) const;
    // Index on the IDFT grid for DFT-precoder output k.
    int subcarrier_index(int k) const;

    bool operator==(const WaveformConfig&) const = default;
};

/// Frequency-domain spectral shaping coefficients, one per precoder output
/// (index k, frequency `bin_frequency(k)`), normalized so sum |f|^2 = M.
struct FdssVector {
    ComplexVector coeffs;
};

using BinVector = ComplexVector;

/// Fresnel-integral FDSS that turns every DFT-s-OFDM bin into a linear chirp
/// sweeping `sweep_cycles` subcarriers over the symbol. Throws
/// std::invalid_argument when the sweep is not positive.
FdssVector build_fdss(const WaveformConfig& cfg);

// All-ones shaping; spread() then reduces to plain DFT-s-OFDM.
FdssVector flat_fdss(const WaveformConfig& cfg);

/// One DFT-s-OFDM symbol: IDFT_N * M_f * diag(f) * DFT_M * s, cyclic prefix
/// prepended, raised-cosine rise over the first `window_rolloff` samples.
/// Output length is cp_len + fft_size.
ComplexSignal spread(const WaveformConfig& cfg, const FdssVector& f, std::span<const Complex> s);

/// Inverse chain: drop CP, DFT_N, pick the occupied subcarriers, multiply by
/// conj(f), IDFT_M. Throws FramingError unless `r` holds exactly one symbol.
BinVector despread(const WaveformConfig& cfg, const FdssVector& f, const ComplexSignal& r);

// Plain OFDM on the same subcarriers (no precoder, no shaping).
ComplexSignal modulate_ofdm(const WaveformConfig& cfg, std::span<const Complex> x);
BinVector demodulate_ofdm(const WaveformConfig& cfg, const ComplexSignal& r);

// Occupied-subcarrier vector (length fft_size) -> windowed CP symbol.
ComplexSignal synthesize_symbol(const WaveformConfig& cfg, std::span<const Complex> subcarriers);

/// Concatenates symbols produced by spread()/modulate_ofdm() into a stream.
/// Each symbol's raised-cosine tail (a cyclic suffix over window_rolloff
/// samples) is overlap-added onto the start of the next one, so the stream
/// is `count * symbol_length + window_rolloff` samples long.
ComplexSignal overlap_add(const WaveformConfig& cfg, std::span<const ComplexSignal> symbols);

// The fft_size samples after the cyclic prefix.
ComplexSignal symbol_body(const WaveformConfig& cfg, const ComplexSignal& symbol);

} // namespace cscmv
