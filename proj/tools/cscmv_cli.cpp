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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string scheme;
    std::string snr_list;
    unsigned threads = 0;
};

std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cscmv::ConfigError("--snr-db expects a comma-separated list of numbers, got '" + text + "'");
        }
    }
    if (out.empty()) throw cscmv::ConfigError("--snr-db list is empty");
    return out;
}

cscmv::ExperimentConfig effective_config(const Options& o) {
    cscmv::ExperimentConfig cfg = o.config_path.empty() ? cscmv::ExperimentConfig{} : cscmv::load_config(o.config_path);
    if (o.seed) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (!o.scheme.empty()) cfg.schemes = {o.scheme};
    if (!o.snr_list.empty()) cfg.snr_db = parse_snr_list(o.snr_list);
    if (o.threads > 0) cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

void write_outputs(const std::string& dir, const cscmv::CommandOutput& out) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, contents] : out.files) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << contents;
        std::cout << path.string() << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chirp-based over-the-air majority-vote simulator"};
    app.require_subcommand(1);
    Options opts;
    std::string chosen;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"pmepr", "PMEPR distributions per scheme"},
        {"cm", "cubic-metric distributions per scheme"},
        {"aclr", "ACLR versus output back-off per scheme"},
        {"coverage", "smallest back-off meeting the ACLR target and the resulting coverage radius"},
        {"snr-distance", "uplink SNR versus link distance"},
        {"train", "federated signSGD-MV training runs"},
        {"waveform-dump", "one transmit symbol, the shaping vector and the stream spectrum"},
        {"bound", "convergence bound over rounds and SNR"},
        {"show-config", "print the effective configuration as JSON"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config_path, "JSON configuration file");
        sub->add_option("--seed", opts.seed, "global seed (overrides the config)");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--scheme", opts.scheme, "single scheme: ideal, obda or csc_mv<votes>");
        sub->add_option("--snr-db", opts.snr_list, "comma-separated SNR points in dB");
        sub->add_option("--threads", opts.threads, "worker threads (outputs do not depend on it)");
        sub->callback([&chosen, n = name] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        const cscmv::ExperimentConfig cfg = effective_config(opts);
        if (chosen == "show-config") {
            std::cout << cscmv::serialize_config(cfg);
            return 0;
        }
        const cscmv::CommandOutput out = cscmv::run_command(chosen, cfg);
        write_outputs(cfg.output_dir, out);
        if (out.status == kInfeasible) std::cerr << "error: at least one solve was infeasible\n";
        return out.status;
    } catch (const cscmv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const cscmv::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
