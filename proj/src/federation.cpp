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

#include "cscmv/federation.hpp"
#include "cscmv/channel.hpp"
#include "cscmv/parallel.hpp"

#include <cmath>
#include <random>

namespace cscmv {

void PhyConfig::validate() const {
    waveform.validate();
    power.validate();
    if (kind == PhyKind::csc_mv) {
        if (votes_per_block < 1) throw ConfigError("votes_per_block must be at least 1");
        if (cscmv::votes_per_block(waveform.num_bins, resolved_guard()) < votes_per_block)
            throw ConfigError("guard too wide for the requested votes per block");
    }
    if (max_sync_offset < 0) throw ConfigError("max_sync_offset must be non-negative");
    if (!(tci_threshold > 0.0)) throw ConfigError("tci threshold must be positive");
}

int PhyConfig::resolved_guard() const {
    return guard_bins >= 0 ? guard_bins : guard_for_votes(waveform.num_bins, votes_per_block);
}

double PhyConfig::noise_power() const { return snr_db ? power.p_ref * db_to_linear(-*snr_db) : 0.0; }

namespace {

struct Link {
    ChannelRealization channel;
    SyncError sync;
    double power = 1.0; // received power scale
};

Link draw_link(const PhyConfig& phy, double r_p, double distance, std::uint64_t seed, std::size_t round,
               std::size_t device) {
    Link link;
    if (phy.fading)
        link.channel = draw_epa(phy.waveform.sample_rate, RngKey{seed, round, device, DrawKind::channel, 0});
    else
        link.channel.taps = {Tap{0, Complex(1.0, 0.0)}};
    link.sync = draw_sync_error(phy.max_sync_offset, RngKey{seed, round, device, DrawKind::sync, 0});
    link.power = clamped_received_power(phy.power, r_p, distance);
    return link;
}

RngKey symbol_key(std::uint64_t seed, std::size_t round, std::size_t device) {
    return RngKey{seed, round, device, DrawKind::symbols, 0};
}

RngKey noise_key(std::uint64_t seed, std::size_t round, std::size_t block) {
    return RngKey{seed, round, 0, DrawKind::noise, block};
}

VoteVector aggregate_csc(const PhyConfig& phy, std::span<const VoteVector> votes, std::span<const Link> links,
                         std::uint64_t seed, std::size_t round) {
    const WaveformConfig& cfg = phy.waveform;
    const std::size_t q = votes.front().size();
    const VotePlan plan = build_vote_plan(q, cfg.num_bins, phy.resolved_guard());
    const FdssVector f = build_fdss(cfg);
    const double sigma2 = phy.noise_power();
    // unit mean power per transmit sample
    const double tx_gain = std::sqrt(static_cast<double>(cfg.fft_size) / plan.votes_per_block);
    std::vector<BinVector> rx(plan.blocks, BinVector(static_cast<std::size_t>(cfg.num_bins)));

    if (!phy.time_domain) {
        for (std::size_t k = 0; k < votes.size(); ++k) {
            const auto response = links[k].channel.frequency_response(cfg, links[k].sync.offset);
            const auto kernel = circulant_kernel(cfg, f, response);
            accumulate_csc(plan, votes[k], symbol_key(seed, round, k), kernel,
                           std::sqrt(links[k].power) * tx_gain, rx);
        }
        if (sigma2 > 0.0)
            for (std::size_t b = 0; b < plan.blocks; ++b) {
                const auto z = despread_noise(cfg, f, sigma2, noise_key(seed, round, b));
                for (std::size_t j = 0; j < z.size(); ++j) rx[b][j] += z[j];
            }
        return detect_mv(plan, rx).mv;
    }

    std::vector<std::vector<BinVector>> tx(votes.size());
    for (std::size_t k = 0; k < votes.size(); ++k) tx[k] = encode_csc(plan, votes[k], symbol_key(seed, round, k));
    std::vector<ComplexSignal> arrived(votes.size());
    std::vector<WeightedSignal> weighted(votes.size());
    for (std::size_t b = 0; b < plan.blocks; ++b) {
        for (std::size_t k = 0; k < votes.size(); ++k) {
            ComplexSignal sym = spread(cfg, f, tx[k][b]);
            for (auto& x : sym.samples) x *= tx_gain;
            arrived[k] = propagate(links[k].channel, links[k].sync, sym);
            weighted[k] = {&arrived[k], links[k].power};
        }
        rx[b] = despread(cfg, f, superpose(weighted, sigma2, noise_key(seed, round, b)));
    }
    return detect_mv(plan, rx).mv;
}

VoteVector aggregate_obda(const PhyConfig& phy, std::span<const VoteVector> votes, std::span<const Link> links,
                          std::uint64_t seed, std::size_t round) {
    const WaveformConfig& cfg = phy.waveform;
    const std::size_t q = votes.front().size();
    const auto m = static_cast<std::size_t>(cfg.num_bins);
    const std::size_t blocks = obda_blocks(q, cfg.num_bins);
    const double sigma2 = phy.noise_power();
    const double tx_gain = std::sqrt(static_cast<double>(cfg.fft_size) / static_cast<double>(m));
    std::vector<BinVector> rx(blocks, BinVector(m));

    std::vector<std::vector<BinVector>> tx(votes.size());
    std::vector<ComplexVector> response(votes.size());
    for (std::size_t k = 0; k < votes.size(); ++k) {
        // the device pre-inverts its effective channel, timing offset included
        response[k] = links[k].channel.frequency_response(cfg, links[k].sync.offset);
        tx[k] = encode_obda(votes[k], response[k], phy.tci_threshold, cfg.num_bins);
    }

    if (!phy.time_domain) {
        for (std::size_t k = 0; k < votes.size(); ++k) {
            const double a = std::sqrt(links[k].power) * tx_gain;
            for (std::size_t b = 0; b < blocks; ++b)
                for (std::size_t j = 0; j < m; ++j) rx[b][j] += a * response[k][j] * tx[k][b][j];
        }
        if (sigma2 > 0.0) {
            std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
            for (std::size_t b = 0; b < blocks; ++b) {
                auto rng = make_rng(noise_key(seed, round, b));
                for (std::size_t j = 0; j < m; ++j) {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    rx[b][j] += Complex(re, im);
                }
            }
        }
        return decode_obda(rx, q);
    }

    std::vector<ComplexSignal> arrived(votes.size());
    std::vector<WeightedSignal> weighted(votes.size());
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t k = 0; k < votes.size(); ++k) {
            ComplexSignal sym = modulate_ofdm(cfg, tx[k][b]);
            for (auto& x : sym.samples) x *= tx_gain;
            arrived[k] = propagate(links[k].channel, links[k].sync, sym);
            weighted[k] = {&arrived[k], links[k].power};
        }
        rx[b] = demodulate_ofdm(cfg, superpose(weighted, sigma2, noise_key(seed, round, b)));
    }
    return decode_obda(rx, q);
}

} // namespace

VoteVector aggregate_votes(const PhyConfig& phy, std::span<const VoteVector> votes, std::span<const double> distances,
                           std::uint64_t seed, std::size_t round) {
    if (votes.empty()) throw std::invalid_argument("aggregate_votes: no devices");
    if (phy.kind == PhyKind::ideal) return ideal_mv(votes);
    phy.validate();
    if (distances.size() != votes.size()) throw ConfigError("one distance per device is required");
    for (const auto& v : votes)
        if (v.size() != votes.front().size()) throw FramingError("vote vectors differ in length");
    const double r_p = coverage_radius(phy.power);
    std::vector<Link> links(votes.size());
    for (std::size_t k = 0; k < votes.size(); ++k) links[k] = draw_link(phy, r_p, distances[k], seed, round, k);
    return phy.kind == PhyKind::csc_mv ? aggregate_csc(phy, votes, links, seed, round)
                                       : aggregate_obda(phy, votes, links, seed, round);
}

TrainState run_round(TrainState state, const FederatedTask& task, const PhyConfig& phy, std::uint64_t seed) {
    const std::size_t k = task.locals.size();
    if (k == 0) throw ConfigError("no devices");
    if (state.w.size() != task.shape.parameter_count()) throw ConfigError("model and parameter vector disagree");
    const std::size_t round = state.round;

    std::vector<VoteVector> votes(k);
    parallel_for(k, task.threads, [&](std::size_t d) {
        const MlpObjective objective(task.shape, task.locals[d].data);
        const std::size_t batch = std::min(task.batch_size, task.locals[d].data.size());
        votes[d] = sign_votes(local_gradient(objective, state.w, batch, RngKey{seed, round, d, DrawKind::batch, 0}));
    });

    std::vector<double> distances(k);
    for (std::size_t d = 0; d < k; ++d) distances[d] = task.locals[d].distance;
    const VoteVector mv = aggregate_votes(phy, votes, distances, seed, round);
    state = apply_update(std::move(state), mv);

    RoundRecord rec;
    rec.round = state.round;
    rec.local_losses.resize(k);
    parallel_for(k, task.threads,
                 [&](std::size_t d) { rec.local_losses[d] = mean_loss(task.shape, state.w, task.locals[d].data); });
    double weighted = 0.0;
    std::size_t samples = 0;
    for (std::size_t d = 0; d < k; ++d) {
        weighted += rec.local_losses[d] * static_cast<double>(task.locals[d].data.size());
        samples += task.locals[d].data.size();
    }
    rec.train_loss = weighted / static_cast<double>(samples);
    rec.test_accuracy = evaluate(task.shape, state.w, task.test);
    state.history.push_back(std::move(rec));
    return state;
}

} // namespace cscmv
