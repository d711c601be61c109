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
#include "cscmv/rf.hpp"
#include "cscmv/waveform.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cscmv {

struct MetricsSection {
    int oversampling = 4;
    std::size_t pmepr_symbols = 10000;
    std::size_t aclr_symbols = 4000;
    std::size_t welch_segment = 1024;
    double tci_threshold = 0.3;
    int symbols_per_channel = 1;
    double aclr_target_db = -22.0;
    double obo_start_db = 0.0;
    double obo_stop_db = 30.0;
    double obo_step_db = 0.5;
    bool operator==(const MetricsSection&) const = default;
};

struct DeploymentSection {
    std::size_t devices = 50;
    double r_min = 10.0;
    double r_max = 50.0;
    double alpha = 4.0;
    double beta = 4.0;
    double r_ref = 10.0;
    double p_ref = 1.0;
    double obo_ref = 30.0;
    // Back-off floor per scheme name; sets each scheme's coverage radius.
    std::map<std::string, double> obo_min_db = {{"obda", 10.5}, {"csc_mv1", 0.0}, {"csc_mv2", 3.3}, {"csc_mv4", 4.4}};
    double distance_step = 0.5;
    bool operator==(const DeploymentSection&) const = default;
};

struct TrainingSection {
    std::size_t rounds = 200;
    DataMode mode = DataMode::homogeneous;
    std::size_t seeds = 1;                // runs seed, seed+1, ...
    std::size_t samples_per_device = 100;
    std::size_t test_samples = 1000;
    std::size_t batch_size = 32;
    std::size_t hidden = 32;
    std::optional<double> eta;            // default: 1/sqrt(lipschitz q n_b)
    double lipschitz = 1.0;
    std::string dataset = "synthetic";    // or "idx"
    std::string idx_train_images;
    std::string idx_train_labels;
    std::string idx_test_images;
    std::string idx_test_labels;
    std::size_t idx_side = 28;
    bool synthetic_fallback = true;
    bool fading = true;
    int max_sync_offset = 4;
    bool operator==(const TrainingSection&) const = default;
};

struct BoundSection {
    double lipschitz = 1.0;      // per coordinate
    double sigma = 1.0;          // per coordinate
    std::size_t parameters = 2410;
    double gamma = 1.0;
    double f_star = 0.0;
    double initial_loss = 2.3;
    std::vector<double> rounds = {50, 100, 200, 400, 800};
    bool operator==(const BoundSection&) const = default;
};

/// Everything a CLI command needs. Every stochastic output is a function of
/// (config, seed) alone.
struct ExperimentConfig {
    std::optional<std::uint64_t> seed;
    WaveformConfig waveform;
    RappPa pa;
    MetricsSection metrics;
    DeploymentSection deployment;
    TrainingSection training;
    BoundSection bound;
    std::vector<std::string> schemes = {"csc_mv1", "csc_mv2", "csc_mv4", "obda"};
    std::vector<double> snr_db = {20.0};
    std::string output_dir = "out";
    unsigned threads = 1;

    // ConfigError on any inconsistency. The seed is checked by require_seed().
    void validate() const;
    std::uint64_t require_seed() const;
    PowerControlParams power_control(double obo_min) const;
    double obo_min_for(const std::string& scheme) const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// JSON text. Unknown keys are rejected; missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace cscmv
