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

#include "cscmv/deployment.hpp"
#include "cscmv/learn.hpp"
#include "cscmv/oac.hpp"
#include "cscmv/waveform.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace cscmv {

enum class PhyKind { ideal, csc_mv, obda };

/// Uplink used to aggregate the votes of one round.
struct PhyConfig {
    PhyKind kind = PhyKind::ideal;
    int votes_per_block = 2;     // csc_mv
    int guard_bins = -1;         // csc_mv; negative picks the largest guard for votes_per_block
    WaveformConfig waveform;
    std::optional<double> snr_db = 20.0; // target SNR at the server; empty for a noiseless link
    bool fading = true;          // EPA taps; otherwise a flat unit channel
    int max_sync_offset = 4;     // samples
    double tci_threshold = 0.3;  // obda
    PowerControlParams power;    // power.obo_min fixes the coverage radius
    bool time_domain = false;    // run the full waveform chain instead of the bin-domain shortcut

    void validate() const;
    int resolved_guard() const;
    double noise_power() const;
};

/// The server's estimate of the majority vote for one round. Votes are one
/// vector per device; distances (meters) set each device's received power
/// through the clamped power-control law. Channels, sync offsets, symbols and
/// noise are keyed by (seed, round, device).
VoteVector aggregate_votes(const PhyConfig& phy, std::span<const VoteVector> votes, std::span<const double> distances,
                           std::uint64_t seed, std::size_t round);

struct FederatedTask {
    MlpShape shape;
    std::vector<LocalDataset> locals;
    Dataset test;
    std::size_t batch_size = 32;
    unsigned threads = 1;
};

/// One round: local gradients, sign votes, uplink aggregation, update, and a
/// history record (per-device local loss, mean train loss, test accuracy).
TrainState run_round(TrainState state, const FederatedTask& task, const PhyConfig& phy, std::uint64_t seed);

} // namespace cscmv
