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

#include <doctest.h>

#include <random>

using namespace cscmv;

namespace {

std::vector<VoteVector> random_votes(std::size_t devices, std::size_t q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<VoteVector> v(devices, VoteVector(q));
    for (auto& d : v)
        for (auto& x : d) x = (rng() & 1) ? 1 : -1;
    return v;
}

PhyConfig phy_of(PhyKind kind) {
    PhyConfig p;
    p.kind = kind;
    p.power.obo_min = kind == PhyKind::obda ? 10.5 : 3.3;
    return p;
}

double error_rate(const VoteVector& a, const VoteVector& b) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return static_cast<double>(e) / static_cast<double>(a.size());
}

} // namespace

TEST_SUITE("federation") {

TEST_CASE("ideal link returns the exact majority") {
    const auto votes = random_votes(7, 100, 1);
    const std::vector<double> d(7, 20.0);
    CHECK(aggregate_votes(phy_of(PhyKind::ideal), votes, d, 1, 0) == ideal_mv(votes));
}

TEST_CASE("noiseless single-device CSC link is transparent") {
    for (bool td : {false, true}) {
        PhyConfig phy = phy_of(PhyKind::csc_mv);
        phy.snr_db.reset();
        phy.time_domain = td;
        for (std::size_t round = 0; round < 20; ++round) {
            const auto votes = random_votes(1, 37, round);
            const std::vector<double> d = {45.0};
            CHECK(aggregate_votes(phy, votes, d, 3, round) == votes[0]);
        }
    }
}

TEST_CASE("bin-domain shortcut equals the waveform chain") {
    for (PhyKind kind : {PhyKind::csc_mv, PhyKind::obda}) {
        PhyConfig fast = phy_of(kind);
        fast.snr_db.reset();
        PhyConfig slow = fast;
        slow.time_domain = true;
        const std::vector<double> d = {12.0, 25.0, 33.0, 41.0, 49.0};
        for (std::size_t round = 0; round < 5; ++round) {
            const auto votes = random_votes(5, 250, 100 + round);
            CHECK(aggregate_votes(fast, votes, d, 8, round) == aggregate_votes(slow, votes, d, 8, round));
        }
    }
    PhyConfig four = phy_of(PhyKind::csc_mv);
    four.votes_per_block = 4;
    four.snr_db.reset();
    PhyConfig four_td = four;
    four_td.time_domain = true;
    const auto votes = random_votes(3, 64, 5);
    const std::vector<double> d = {15.0, 30.0, 45.0};
    CHECK(aggregate_votes(four, votes, d, 2, 0) == aggregate_votes(four_td, votes, d, 2, 0));
}

TEST_CASE("OBDA degrades beyond its coverage radius") {
    const PhyConfig phy = phy_of(PhyKind::obda);
    double near = 0.0, far = 0.0;
    for (std::size_t round = 0; round < 20; ++round) {
        const auto votes = random_votes(1, 1080, round);
        near += error_rate(aggregate_votes(phy, votes, std::vector<double>{15.0}, 4, round), votes[0]);
        far += error_rate(aggregate_votes(phy, votes, std::vector<double>{80.0}, 4, round), votes[0]);
    }
    CHECK(far > near + 0.02);
}

TEST_CASE("input validation") {
    const auto votes = random_votes(2, 10, 1);
    CHECK_THROWS_AS(aggregate_votes(phy_of(PhyKind::csc_mv), votes, std::vector<double>{1.0}, 1, 0), ConfigError);
    CHECK_THROWS_AS(aggregate_votes(phy_of(PhyKind::csc_mv), {}, {}, 1, 0), std::invalid_argument);
    std::vector<VoteVector> ragged = {VoteVector(10, 1), VoteVector(9, 1)};
    CHECK_THROWS_AS(aggregate_votes(phy_of(PhyKind::obda), ragged, std::vector<double>{1.0, 2.0}, 1, 0), FramingError);
    PhyConfig bad = phy_of(PhyKind::csc_mv);
    bad.votes_per_block = 4;
    bad.guard_bins = 12;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("training rounds are deterministic across thread counts") {
    const Dataset data = synthetic_digits(200, 3);
    const auto dep = sample_deployment(4, 10.0, 50.0, RadialLayout::uniform_radius, 3);
    FederatedTask task;
    task.locals = partition_dataset(data, dep, DataMode::homogeneous, 3);
    task.test = synthetic_digits(100, 3, 1000);
    task.batch_size = 16;
    TrainState a;
    a.w = init_parameters(task.shape, 3);
    a.eta = 0.01;
    TrainState b = a;
    const PhyConfig phy = phy_of(PhyKind::csc_mv);
    for (int r = 0; r < 3; ++r) {
        task.threads = 1;
        a = run_round(std::move(a), task, phy, 3);
        task.threads = 3;
        b = run_round(std::move(b), task, phy, 3);
    }
    CHECK(a.w == b.w);
    CHECK(a.round == 3);
    REQUIRE(a.history.size() == 3);
    CHECK(a.history.back().local_losses == b.history.back().local_losses);
    CHECK(a.history.back().test_accuracy == b.history.back().test_accuracy);
}

}
