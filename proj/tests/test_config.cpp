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

#include "cscmv/config.hpp"
#include "cscmv/experiments.hpp"

#include <doctest.h>

using namespace cscmv;

TEST_SUITE("config") {

TEST_CASE("defaults survive a serialize/parse round trip") {
    ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.training.eta = 0.02;
    cfg.schemes = {"ideal", "csc_mv2"};
    const auto text = serialize_config(cfg);
    CHECK(parse_config(text) == cfg);
    CHECK(parse_config("{}") == ExperimentConfig{});
}

TEST_CASE("partial configs override only what they name") {
    const auto cfg = parse_config(R"({"seed": 7, "waveform": {"cp_len": 20}, "deployment": {"obo_min_db": {"obda": 9.0}}})");
    CHECK(cfg.seed == 7u);
    CHECK(cfg.waveform.cp_len == 20);
    CHECK(cfg.waveform.fft_size == 64);
    CHECK(cfg.obo_min_for("obda") == 9.0);
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"sead": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"waveform": {"bins": 54}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schemes": ["csc_mvx"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"waveform": {"num_bins": 80}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"seed": "one"})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"threads": 0})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig{}.require_seed(), ConfigError);
    CHECK_THROWS_AS(run_command("coverage", ExperimentConfig{}), ConfigError);
    ExperimentConfig seeded;
    seeded.seed = 1;
    CHECK_THROWS_AS(run_command("nope", seeded), ConfigError);
}

TEST_CASE("commands are independent of the thread count") {
    ExperimentConfig cfg = parse_config(R"({
        "seed": 5,
        "metrics": {"pmepr_symbols": 60, "aclr_symbols": 40, "obo_step_db": 10.0},
        "deployment": {"devices": 4},
        "training": {"rounds": 2, "samples_per_device": 20, "test_samples": 40},
        "schemes": ["ideal", "csc_mv2", "obda"]
    })");
    for (const char* name : {"pmepr", "cm", "aclr", "coverage", "snr-distance", "train", "waveform-dump", "bound"}) {
        cfg.threads = 1;
        const auto one = run_command(name, cfg);
        cfg.threads = 3;
        const auto three = run_command(name, cfg);
        CHECK_MESSAGE(one.files == three.files, name);
        CHECK(!one.files.empty());
    }
}

}
