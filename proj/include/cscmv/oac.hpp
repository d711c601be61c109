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

#include <cstddef>
#include <span>
#include <vector>

namespace cscmv {

// Entries are +1 or -1.
using VoteVector = std::vector<int>;

struct VoteResource {
    std::size_t block = 0;
    int group = 0; // in [0, 2 * votes_per_block)
};

/// Placement of q votes on S DFT-s-OFDM blocks. Gradient i (0-based) lives in
/// block i / M_v; its "+1" chirp uses group 2u and its "-1" chirp group 2u+1,
/// u = i mod M_v. A group starts at bin group * (1 + M_g) and spans 1 + M_g
/// bins (the active bin followed by M_g idle guard bins).
struct VotePlan {
    std::size_t gradients = 0;
    int num_bins = 0;
    int guard_bins = 0;
    int votes_per_block = 0;
    std::size_t blocks = 0;

    VoteResource positive(std::size_t i) const { return {i / votes_per_block, 2 * static_cast<int>(i % votes_per_block)}; }
    VoteResource negative(std::size_t i) const { return {i / votes_per_block, 2 * static_cast<int>(i % votes_per_block) + 1}; }
    int group_start(int group) const { return group * (1 + guard_bins); }
    int group_width() const { return 1 + guard_bins; }
};

// floor(M / (2 + 2 M_g)).
int votes_per_block(int num_bins, int guard_bins);
// Largest guard that still carries `votes` votes per block.
int guard_for_votes(int num_bins, int votes);

/// Throws InfeasibleError when the guard leaves no room for a vote.
VotePlan build_vote_plan(std::size_t gradients, int num_bins, int guard_bins);

/// Unit-modulus symbol r_{k,i} for gradient i, keyed by (seed, round, device).
Complex vote_symbol(const RngKey& device_key, std::size_t gradient);

/// One active bin per vote: r_{k,i} on the "+" group's first bin when the
/// vote is +1, on the "-" group's first bin otherwise.
std::vector<BinVector> encode_csc(const VotePlan& plan, const VoteVector& votes, const RngKey& device_key);

struct DetectorReport {
    VoteVector mv;
    std::vector<double> margins; // E+ - E-
};

/// Non-coherent energy detector over the 1 + M_g bins of each group.
DetectorReport detect_mv(const VotePlan& plan, std::span<const BinVector> blocks);

/// Bin-domain response of despread(channel(spread(.))) when the cyclic prefix
/// absorbs the channel: the operator F^H diag(|f|^2 H) F, which is circulant;
/// returns its first column.
ComplexVector circulant_kernel(const WaveformConfig& cfg, const FdssVector& f, std::span<const Complex> response);

/// Adds amplitude * (kernel circularly convolved with the encoded blocks) for
/// one device, without materializing its transmit signal.
void accumulate_csc(const VotePlan& plan, const VoteVector& votes, const RngKey& device_key,
                    std::span<const Complex> kernel, double amplitude, std::vector<BinVector>& blocks);

// despread() applied to one symbol of CN(0, noise_power) white noise.
BinVector despread_noise(const WaveformConfig& cfg, const FdssVector& f, double noise_power, const RngKey& key);

// ---- OBDA baseline ------------------------------------------------------

// Two votes per subcarrier (QPSK), num_bins subcarriers per OFDM symbol.
std::size_t obda_blocks(std::size_t gradients, int num_bins);

/// QPSK symbols (v_{2p} + j v_{2p+1}) / sqrt(2) on subcarrier p, each
/// pre-multiplied by 1 / h when |h| >= threshold * rms(|h|) over the band
/// and muted otherwise, so that every device arrives with the same
/// amplitude. There is no per-symbol power renormalization: it would undo
/// the amplitude alignment the sum relies on.
std::vector<BinVector> encode_obda(const VoteVector& votes, std::span<const Complex> response, double threshold,
                                   int num_bins);

// Signs of the real/imaginary parts of the aggregated subcarriers.
VoteVector decode_obda(std::span<const BinVector> received, std::size_t gradients);

} // namespace cscmv
