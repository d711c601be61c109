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
#include "cscmv/rng.hpp"
#include "cscmv/waveform.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cscmv {

struct PowerDelayProfile {
    std::vector<double> delays_s;
    std::vector<double> powers_db;

    // ITU Extended Pedestrian A.
    static PowerDelayProfile epa();

    double max_excess_delay() const;
    // Continuous-time RMS delay spread of the profile.
    double rms_delay_spread() const;
};

struct Tap {
    int delay = 0; // samples
    Complex gain;
};

/// One multipath realization: taps on the sample grid, constant over a round.
struct ChannelRealization {
    std::vector<Tap> taps;

    int max_delay() const;
    double total_power() const;
    /// Frequency response on the occupied subcarriers, ordered like the
    /// DFT-precoder outputs, including an extra pure delay of `extra_delay`
    /// samples (a time-synchronization offset).
    ComplexVector frequency_response(const WaveformConfig& cfg, int extra_delay = 0) const;
};

struct SyncError {
    int offset = 0; // samples
};

/// Rayleigh taps with the profile's powers, delays snapped to the nearest
/// sample at `sample_rate`, average total power normalized to one. Taps that
/// land on the same sample are merged.
ChannelRealization draw_fading(const PowerDelayProfile& profile, double sample_rate, const RngKey& key);
ChannelRealization draw_epa(double sample_rate, const RngKey& key);

// Uniform integer offset in [0, max_offset].
SyncError draw_sync_error(int max_offset, const RngKey& key);

/// Linear convolution with the tap line plus the sync delay, truncated to
/// the length of `tx` (the receiver's window starts where `tx` starts).
ComplexSignal propagate(const ChannelRealization& channel, SyncError sync, const ComplexSignal& tx);

struct WeightedSignal {
    const ComplexSignal* signal = nullptr;
    double power = 1.0; // received power scale, W
};

/// sum_k sqrt(P_k) x_k + CN(0, noise_power) per sample. Throws FramingError on
/// unequal lengths.
ComplexSignal superpose(std::span<const WeightedSignal> signals, double noise_power, const RngKey& noise_key);

/// Smallest guard M_g with M_g * T_s / M >= t_chn + t_sync; empty when the
/// guard would leave no room for a single vote.
std::optional<int> min_guard_bins(const WaveformConfig& cfg, double t_chn, double t_sync);

} // namespace cscmv
