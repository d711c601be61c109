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

#include "cscmv/config.hpp"
#include "cscmv/federation.hpp"
#include "cscmv/rf.hpp"

#include <map>
#include <optional>
#include <string>

namespace cscmv {

/// Files a command produces (name -> contents) and its exit status:
/// 0 on success, 3 when a solve had no feasible answer.
struct CommandOutput {
    std::map<std::string, std::string> files;
    int status = 0;
};

EnsembleConfig ensemble_config(const ExperimentConfig& cfg);

/// Uplink for a scheme name ("ideal", "obda", "csc_mv<votes>") with the
/// configured coverage radius and an optional target SNR (empty: noiseless).
PhyConfig phy_for(const ExperimentConfig& cfg, const std::string& scheme, std::optional<double> snr_db);

struct TrainingRun {
    std::string phy;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    Deployment deployment;
    TrainState state;
};

/// Training and test sets for one seed: the IDX files when configured
/// (downsampled to 8x8), otherwise synthetic digits.
std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg, std::uint64_t seed);

TrainingRun run_training(const ExperimentConfig& cfg, const std::string& phy, std::optional<double> snr_db,
                         std::uint64_t seed);

CommandOutput cmd_pmepr(const ExperimentConfig& cfg);
CommandOutput cmd_cm(const ExperimentConfig& cfg);
CommandOutput cmd_aclr(const ExperimentConfig& cfg);
CommandOutput cmd_coverage(const ExperimentConfig& cfg);
CommandOutput cmd_snr_distance(const ExperimentConfig& cfg);
CommandOutput cmd_train(const ExperimentConfig& cfg);
CommandOutput cmd_waveform_dump(const ExperimentConfig& cfg);
CommandOutput cmd_bound(const ExperimentConfig& cfg);

// Dispatch by subcommand name; ConfigError for an unknown name.
CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg);

} // namespace cscmv
