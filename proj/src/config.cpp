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

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cscmv {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were used so leftovers can
// be reported as typos.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        used_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }

    template <class T>
    void get(const char* key, std::optional<T>& out) {
        used_.insert(key);
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        T v{};
        get(key, v);
        out = v;
    }

    Section child(const char* key) {
        used_.insert(key);
        static const json empty = json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, path_ + "." + key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!used_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string mode_name(DataMode m) { return m == DataMode::homogeneous ? "homogeneous" : "heterogeneous"; }

DataMode parse_mode(const std::string& s) {
    if (s == "homogeneous") return DataMode::homogeneous;
    if (s == "heterogeneous") return DataMode::heterogeneous;
    throw ConfigError("training.mode must be homogeneous or heterogeneous");
}

std::string reference_name(BackoffReference r) { return r == BackoffReference::output ? "output" : "input"; }

BackoffReference parse_reference(const std::string& s) {
    if (s == "output") return BackoffReference::output;
    if (s == "input") return BackoffReference::input;
    throw ConfigError("pa.backoff_reference must be output or input");
}

} // namespace

void ExperimentConfig::validate() const {
    waveform.validate();
    RappPa probe = pa;
    probe.validate();
    if (metrics.oversampling < 1) throw ConfigError("metrics.oversampling must be at least 1");
    if (metrics.pmepr_symbols == 0 || metrics.aclr_symbols == 0) throw ConfigError("metrics symbol counts must be positive");
    if (metrics.welch_segment < 2 || metrics.welch_segment % 2) throw ConfigError("metrics.welch_segment must be even");
    if (!(metrics.tci_threshold > 0.0)) throw ConfigError("metrics.tci_threshold must be positive");
    if (metrics.symbols_per_channel < 1) throw ConfigError("metrics.symbols_per_channel must be positive");
    if (!(metrics.obo_step_db > 0.0) || !(metrics.obo_start_db <= metrics.obo_stop_db))
        throw ConfigError("metrics OBO sweep is empty");
    if (deployment.devices == 0) throw ConfigError("deployment.devices must be positive");
    if (!(deployment.r_min >= 0.0 && deployment.r_min < deployment.r_max))
        throw ConfigError("deployment needs 0 <= r_min < r_max");
    if (!(deployment.distance_step > 0.0)) throw ConfigError("deployment.distance_step must be positive");
    for (const auto& [name, obo] : deployment.obo_min_db) {
        Scheme::parse(name);
        power_control(obo).validate();
    }
    power_control(deployment.obo_ref).validate();
    if (training.rounds == 0 || training.seeds == 0) throw ConfigError("training rounds and seeds must be positive");
    if (training.batch_size == 0 || training.hidden == 0) throw ConfigError("training batch and hidden size must be positive");
    if (training.samples_per_device == 0 || training.test_samples == 0) throw ConfigError("training sample counts must be positive");
    if (training.eta && !(*training.eta > 0.0)) throw ConfigError("training.eta must be positive");
    if (!(training.lipschitz > 0.0)) throw ConfigError("training.lipschitz must be positive");
    if (training.dataset != "synthetic" && training.dataset != "idx") throw ConfigError("training.dataset must be synthetic or idx");
    if (training.max_sync_offset < 0) throw ConfigError("training.max_sync_offset must be non-negative");
    if (!(bound.gamma > 0.0) || bound.parameters == 0 || bound.rounds.empty())
        throw ConfigError("bound section needs gamma > 0, parameters > 0 and at least one round count");
    if (schemes.empty()) throw ConfigError("at least one scheme is required");
    for (const auto& s : schemes)
        if (s != "ideal") Scheme::parse(s);
    if (snr_db.empty()) throw ConfigError("at least one SNR point is required");
    if (threads == 0) throw ConfigError("threads must be positive");
}

std::uint64_t ExperimentConfig::require_seed() const {
    if (!seed) throw ConfigError("a seed is required (config \"seed\" or --seed)");
    return *seed;
}

PowerControlParams ExperimentConfig::power_control(double obo_min) const {
    PowerControlParams pc;
    pc.alpha = deployment.alpha;
    pc.beta = deployment.beta;
    pc.r_ref = deployment.r_ref;
    pc.p_ref = deployment.p_ref;
    pc.obo_ref = deployment.obo_ref;
    pc.obo_min = obo_min;
    pc.noise_power = 0.0;
    return pc;
}

double ExperimentConfig::obo_min_for(const std::string& scheme) const {
    const auto it = deployment.obo_min_db.find(scheme);
    if (it == deployment.obo_min_db.end())
        throw ConfigError("deployment.obo_min_db has no entry for scheme " + scheme);
    return it->second;
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    Section top(root, "config");
    top.get("seed", c.seed);
    {
        Section s = top.child("waveform");
        auto& w = c.waveform;
        s.get("num_bins", w.num_bins);
        s.get("fft_size", w.fft_size);
        s.get("sweep_cycles", w.sweep_cycles);
        s.get("lowest_freq", w.lowest_freq);
        s.get("highest_freq", w.highest_freq);
        s.get("cp_len", w.cp_len);
        s.get("sample_rate", w.sample_rate);
        s.get("window_rolloff", w.window_rolloff);
        s.finish();
    }
    {
        Section s = top.child("pa");
        s.get("sat_amplitude", c.pa.sat_amplitude);
        s.get("smoothness", c.pa.smoothness);
        std::string ref = reference_name(c.pa.reference);
        s.get("backoff_reference", ref);
        c.pa.reference = parse_reference(ref);
        s.finish();
    }
    {
        Section s = top.child("metrics");
        auto& m = c.metrics;
        s.get("oversampling", m.oversampling);
        s.get("pmepr_symbols", m.pmepr_symbols);
        s.get("aclr_symbols", m.aclr_symbols);
        s.get("welch_segment", m.welch_segment);
        s.get("tci_threshold", m.tci_threshold);
        s.get("symbols_per_channel", m.symbols_per_channel);
        s.get("aclr_target_db", m.aclr_target_db);
        s.get("obo_start_db", m.obo_start_db);
        s.get("obo_stop_db", m.obo_stop_db);
        s.get("obo_step_db", m.obo_step_db);
        s.finish();
    }
    {
        Section s = top.child("deployment");
        auto& d = c.deployment;
        s.get("devices", d.devices);
        s.get("r_min", d.r_min);
        s.get("r_max", d.r_max);
        s.get("alpha", d.alpha);
        s.get("beta", d.beta);
        s.get("r_ref", d.r_ref);
        s.get("p_ref", d.p_ref);
        s.get("obo_ref", d.obo_ref);
        s.get("obo_min_db", d.obo_min_db);
        s.get("distance_step", d.distance_step);
        s.finish();
    }
    {
        Section s = top.child("training");
        auto& t = c.training;
        s.get("rounds", t.rounds);
        std::string mode = mode_name(t.mode);
        s.get("mode", mode);
        t.mode = parse_mode(mode);
        s.get("seeds", t.seeds);
        s.get("samples_per_device", t.samples_per_device);
        s.get("test_samples", t.test_samples);
        s.get("batch_size", t.batch_size);
        s.get("hidden", t.hidden);
        s.get("eta", t.eta);
        s.get("lipschitz", t.lipschitz);
        s.get("dataset", t.dataset);
        s.get("idx_train_images", t.idx_train_images);
        s.get("idx_train_labels", t.idx_train_labels);
        s.get("idx_test_images", t.idx_test_images);
        s.get("idx_test_labels", t.idx_test_labels);
        s.get("idx_side", t.idx_side);
        s.get("synthetic_fallback", t.synthetic_fallback);
        s.get("fading", t.fading);
        s.get("max_sync_offset", t.max_sync_offset);
        s.finish();
    }
    {
        Section s = top.child("bound");
        auto& b = c.bound;
        s.get("lipschitz", b.lipschitz);
        s.get("sigma", b.sigma);
        s.get("parameters", b.parameters);
        s.get("gamma", b.gamma);
        s.get("f_star", b.f_star);
        s.get("initial_loss", b.initial_loss);
        s.get("rounds", b.rounds);
        s.finish();
    }
    top.get("schemes", c.schemes);
    top.get("snr_db", c.snr_db);
    top.get("output_dir", c.output_dir);
    top.get("threads", c.threads);
    top.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    const auto& w = c.waveform;
    j["waveform"] = {{"num_bins", w.num_bins},       {"fft_size", w.fft_size},   {"sweep_cycles", w.sweep_cycles},
                     {"lowest_freq", w.lowest_freq}, {"highest_freq", w.highest_freq}, {"cp_len", w.cp_len},
                     {"sample_rate", w.sample_rate}, {"window_rolloff", w.window_rolloff}};
    j["pa"] = {{"sat_amplitude", c.pa.sat_amplitude},
               {"smoothness", c.pa.smoothness},
               {"backoff_reference", reference_name(c.pa.reference)}};
    const auto& m = c.metrics;
    j["metrics"] = {{"oversampling", m.oversampling},   {"pmepr_symbols", m.pmepr_symbols},
                    {"aclr_symbols", m.aclr_symbols},   {"welch_segment", m.welch_segment},
                    {"tci_threshold", m.tci_threshold}, {"symbols_per_channel", m.symbols_per_channel},
                    {"aclr_target_db", m.aclr_target_db}, {"obo_start_db", m.obo_start_db},
                    {"obo_stop_db", m.obo_stop_db},     {"obo_step_db", m.obo_step_db}};
    const auto& d = c.deployment;
    j["deployment"] = {{"devices", d.devices}, {"r_min", d.r_min},   {"r_max", d.r_max},
                       {"alpha", d.alpha},     {"beta", d.beta},     {"r_ref", d.r_ref},
                       {"p_ref", d.p_ref},     {"obo_ref", d.obo_ref}, {"obo_min_db", d.obo_min_db},
                       {"distance_step", d.distance_step}};
    const auto& t = c.training;
    j["training"] = {{"rounds", t.rounds},
                     {"mode", mode_name(t.mode)},
                     {"seeds", t.seeds},
                     {"samples_per_device", t.samples_per_device},
                     {"test_samples", t.test_samples},
                     {"batch_size", t.batch_size},
                     {"hidden", t.hidden},
                     {"eta", t.eta ? json(*t.eta) : json(nullptr)},
                     {"lipschitz", t.lipschitz},
                     {"dataset", t.dataset},
                     {"idx_train_images", t.idx_train_images},
                     {"idx_train_labels", t.idx_train_labels},
                     {"idx_test_images", t.idx_test_images},
                     {"idx_test_labels", t.idx_test_labels},
                     {"idx_side", t.idx_side},
                     {"synthetic_fallback", t.synthetic_fallback},
                     {"fading", t.fading},
                     {"max_sync_offset", t.max_sync_offset}};
    const auto& b = c.bound;
    j["bound"] = {{"lipschitz", b.lipschitz}, {"sigma", b.sigma},           {"parameters", b.parameters},
                  {"gamma", b.gamma},         {"f_star", b.f_star},         {"initial_loss", b.initial_loss},
                  {"rounds", b.rounds}};
    j["schemes"] = c.schemes;
    j["snr_db"] = c.snr_db;
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

} // namespace cscmv
