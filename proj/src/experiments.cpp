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

#include "cscmv/experiments.hpp"
#include "cscmv/numerics.hpp"
#include "cscmv/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cscmv {

using nlohmann::json;

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<Scheme> metric_schemes(const ExperimentConfig& cfg) {
    std::vector<Scheme> out;
    for (const auto& s : cfg.schemes)
        if (s != "ideal") out.push_back(Scheme::parse(s));
    if (out.empty()) throw ConfigError("no transmit scheme selected");
    return out;
}

std::vector<double> obo_grid(const MetricsSection& m) {
    const auto steps = static_cast<std::size_t>(std::floor((m.obo_stop_db - m.obo_start_db) / m.obo_step_db + 1e-9));
    std::vector<double> g;
    for (std::size_t i = 0; i <= steps; ++i) g.push_back(m.obo_start_db + static_cast<double>(i) * m.obo_step_db);
    return g;
}

template <class Make>
CommandOutput distribution_command(const ExperimentConfig& cfg, const std::string& metric, Make make) {
    const std::uint64_t seed = cfg.require_seed();
    const EnsembleConfig ens = ensemble_config(cfg);
    std::ostringstream csv;
    csv << "scheme,percentile," << metric << "_db\n";
    json summary = json::object();
    for (const auto& scheme : metric_schemes(cfg)) {
        const MetricDistribution d = make(scheme, ens, cfg.metrics.pmepr_symbols, seed);
        for (int i = 0; i <= 1000; ++i) {
            const double p = i / 10.0;
            csv << scheme.name() << ',' << num(p) << ',' << num(d.percentile(p)) << '\n';
        }
        summary[scheme.name()] = {{"median_db", d.median()}, {"p99_9_db", d.percentile(99.9)}, {"symbols", d.size()}};
    }
    CommandOutput out;
    out.files[metric + ".csv"] = csv.str();
    out.files[metric + "_summary.json"] = summary.dump(2) + "\n";
    return out;
}

} // namespace

EnsembleConfig ensemble_config(const ExperimentConfig& cfg) {
    EnsembleConfig e;
    e.waveform = cfg.waveform;
    e.oversampling = cfg.metrics.oversampling;
    e.tci_threshold = cfg.metrics.tci_threshold;
    e.symbols_per_channel = cfg.metrics.symbols_per_channel;
    e.threads = cfg.threads;
    return e;
}

PhyConfig phy_for(const ExperimentConfig& cfg, const std::string& scheme, std::optional<double> snr_db) {
    PhyConfig phy;
    phy.waveform = cfg.waveform;
    phy.snr_db = snr_db;
    phy.fading = cfg.training.fading;
    phy.max_sync_offset = cfg.training.max_sync_offset;
    phy.tci_threshold = cfg.metrics.tci_threshold;
    if (scheme == "ideal") {
        phy.kind = PhyKind::ideal;
        phy.power = cfg.power_control(cfg.deployment.obo_ref);
        return phy;
    }
    const Scheme s = Scheme::parse(scheme);
    phy.kind = s.kind == SchemeKind::obda ? PhyKind::obda : PhyKind::csc_mv;
    if (s.kind == SchemeKind::csc_mv) phy.votes_per_block = s.votes_per_block;
    phy.power = cfg.power_control(cfg.obo_min_for(scheme));
    phy.validate();
    return phy;
}

std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto& t = cfg.training;
    const std::size_t train_count = t.samples_per_device * cfg.deployment.devices;
    if (t.dataset == "idx") {
        try {
            Dataset train = read_idx(t.idx_train_images, t.idx_train_labels);
            Dataset test = read_idx(t.idx_test_images, t.idx_test_labels);
            if (train.features != 64) train = downsample_images(train, t.idx_side, 8);
            if (test.features != 64) test = downsample_images(test, t.idx_side, 8);
            auto head = [](const Dataset& d, std::size_t n) {
                std::vector<std::size_t> idx(std::min(n, d.size()));
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                return d.subset(idx);
            };
            return {head(train, train_count), head(test, t.test_samples)};
        } catch (const ConfigError&) {
            if (!t.synthetic_fallback) throw;
        }
    }
    // the test stream starts far beyond any training index
    return {synthetic_digits(train_count, seed), synthetic_digits(t.test_samples, seed, std::uint64_t{1} << 40)};
}

TrainingRun run_training(const ExperimentConfig& cfg, const std::string& phy_name, std::optional<double> snr_db,
                         std::uint64_t seed) {
    cfg.validate();
    const auto& t = cfg.training;
    const PhyConfig phy = phy_for(cfg, phy_name, snr_db);
    auto [train, test] = load_datasets(cfg, seed);

    TrainingRun run;
    run.phy = phy_name;
    run.snr_db = snr_db;
    run.seed = seed;
    const RadialLayout layout = t.mode == DataMode::heterogeneous ? RadialLayout::equal_halves : RadialLayout::uniform_radius;
    run.deployment = sample_deployment(cfg.deployment.devices, cfg.deployment.r_min, cfg.deployment.r_max, layout, seed);

    FederatedTask task;
    task.shape = MlpShape{train.features, t.hidden, 10};
    task.locals = partition_dataset(train, run.deployment, t.mode, seed);
    task.test = std::move(test);
    task.batch_size = t.batch_size;
    task.threads = 1;

    run.state.w = init_parameters(task.shape, seed);
    run.state.eta = t.eta ? *t.eta : default_learning_rate(task.shape.parameter_count(), t.batch_size, t.lipschitz);
    for (std::size_t r = 0; r < t.rounds; ++r) run.state = run_round(std::move(run.state), task, phy, seed);
    return run;
}

CommandOutput cmd_pmepr(const ExperimentConfig& cfg) { return distribution_command(cfg, "pmepr", pmepr_distribution); }

CommandOutput cmd_cm(const ExperimentConfig& cfg) { return distribution_command(cfg, "cm", cm_distribution); }

CommandOutput cmd_aclr(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    const EnsembleConfig ens = ensemble_config(cfg);
    const WaveformConfig os = cfg.waveform.oversampled(cfg.metrics.oversampling);
    const auto grid = obo_grid(cfg.metrics);
    std::ostringstream csv;
    csv << "scheme,obo_db,aclr_db\n";
    json summary = json::object();
    for (const auto& scheme : metric_schemes(cfg)) {
        const ComplexSignal stream = ensemble_stream(scheme, ens, cfg.metrics.aclr_symbols, seed);
        const auto sweep = aclr_sweep(stream, cfg.pa, occupied_band(os), grid, cfg.threads, cfg.metrics.welch_segment);
        double floor = INFINITY;
        std::optional<double> first_ok;
        for (const auto& p : sweep) {
            csv << scheme.name() << ',' << num(p.obo_db) << ',' << num(p.aclr_db) << '\n';
            floor = std::min(floor, p.aclr_db);
            if (!first_ok && p.aclr_db <= cfg.metrics.aclr_target_db) first_ok = p.obo_db;
        }
        summary[scheme.name()] = {{"floor_db", floor},
                                  {"first_grid_obo_meeting_target_db", first_ok ? json(*first_ok) : json(nullptr)}};
    }
    CommandOutput out;
    out.files["aclr.csv"] = csv.str();
    out.files["aclr_summary.json"] = summary.dump(2) + "\n";
    return out;
}

CommandOutput cmd_coverage(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    const EnsembleConfig ens = ensemble_config(cfg);
    const WaveformConfig os = cfg.waveform.oversampled(cfg.metrics.oversampling);
    const auto schemes = metric_schemes(cfg);
    std::vector<std::optional<double>> obo(schemes.size());
    parallel_for(schemes.size(), cfg.threads, [&](std::size_t i) {
        EnsembleConfig single = ens;
        single.threads = 1;
        const ComplexSignal stream = ensemble_stream(schemes[i], single, cfg.metrics.aclr_symbols, seed);
        obo[i] = obo_for_aclr(stream, cfg.pa, occupied_band(os), cfg.metrics.aclr_target_db, cfg.metrics.obo_start_db,
                              cfg.metrics.obo_stop_db, 0.1, cfg.metrics.welch_segment);
    });
    CommandOutput out;
    std::ostringstream csv;
    csv << "scheme,obo_min_db,r_p_m\n";
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        csv << schemes[i].name() << ',';
        if (!obo[i] || *obo[i] > cfg.deployment.obo_ref) {
            csv << (obo[i] ? num(*obo[i]) : std::string("infeasible")) << ",infeasible\n";
            out.status = 3;
            continue;
        }
        csv << num(*obo[i]) << ',' << num(coverage_radius(cfg.power_control(*obo[i]))) << '\n';
    }
    out.files["coverage.csv"] = csv.str();
    return out;
}

CommandOutput cmd_snr_distance(const ExperimentConfig& cfg) {
    std::vector<double> grid;
    const auto& d = cfg.deployment;
    for (std::size_t i = 0;; ++i) {
        const double r = d.r_min + static_cast<double>(i) * d.distance_step;
        if (r > d.r_max + 1e-9) break;
        grid.push_back(r);
    }
    std::ostringstream csv;
    csv << "scheme,snr_target_db,distance_m,snr_db\n";
    for (const auto& name : cfg.schemes) {
        if (name == "ideal") continue;
        for (double target : cfg.snr_db) {
            PowerControlParams pc = cfg.power_control(cfg.obo_min_for(name));
            pc.noise_power = pc.p_ref * db_to_linear(-target);
            for (const auto& p : snr_vs_distance(pc, pc.obo_min, grid))
                csv << name << ',' << num(target) << ',' << num(p.distance_m) << ',' << num(p.snr_db) << '\n';
        }
    }
    CommandOutput out;
    out.files["snr_distance.csv"] = csv.str();
    return out;
}

CommandOutput cmd_train(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    struct Job {
        std::string phy;
        std::optional<double> snr;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& name : cfg.schemes) {
        if (name == "ideal") {
            for (std::size_t s = 0; s < cfg.training.seeds; ++s) jobs.push_back({name, std::nullopt, seed + s});
            continue;
        }
        for (double snr : cfg.snr_db)
            for (std::size_t s = 0; s < cfg.training.seeds; ++s) jobs.push_back({name, snr, seed + s});
    }
    std::vector<TrainingRun> runs(jobs.size());
    parallel_for(jobs.size(), cfg.threads,
                 [&](std::size_t i) { runs[i] = run_training(cfg, jobs[i].phy, jobs[i].snr, jobs[i].seed); });

    std::ostringstream history;
    std::ostringstream losses;
    history << "round,train_loss,test_accuracy,phy,seed,snr_db\n";
    losses << "phy,snr_db,seed,device,distance_m,loss\n";
    json summary = json::object();
    const double boundary = cfg.deployment.r_max / std::sqrt(2.0);
    for (const auto& run : runs) {
        const std::string snr = run.snr_db ? num(*run.snr_db) : std::string("none");
        for (const auto& rec : run.state.history)
            history << rec.round << ',' << num(rec.train_loss) << ',' << num(rec.test_accuracy) << ',' << run.phy << ','
                    << run.seed << ',' << snr << '\n';
        double near = 0.0;
        double far = 0.0;
        std::size_t n_near = 0;
        std::size_t n_far = 0;
        const auto dl = loss_by_distance(run.state, run.deployment);
        for (std::size_t k = 0; k < dl.size(); ++k) {
            losses << run.phy << ',' << snr << ',' << run.seed << ',' << k << ',' << num(dl[k].distance_m) << ','
                   << num(dl[k].loss) << '\n';
            (dl[k].distance_m <= boundary ? near : far) += dl[k].loss;
            ++(dl[k].distance_m <= boundary ? n_near : n_far);
        }
        const std::string key = run.phy + "@" + snr;
        auto& entry = summary[key];
        entry["final_accuracy"].push_back(run.state.history.back().test_accuracy);
        entry["near_loss"].push_back(n_near ? near / static_cast<double>(n_near) : 0.0);
        entry["far_loss"].push_back(n_far ? far / static_cast<double>(n_far) : 0.0);
    }
    for (auto& [key, entry] : summary.items()) {
        double acc = 0.0;
        for (const auto& a : entry["final_accuracy"]) acc += a.get<double>();
        entry["mean_final_accuracy"] = acc / static_cast<double>(entry["final_accuracy"].size());
    }
    CommandOutput out;
    out.files["history.csv"] = history.str();
    out.files["loss_by_distance.csv"] = losses.str();
    out.files["train_summary.json"] = summary.dump(2) + "\n";
    return out;
}

CommandOutput cmd_waveform_dump(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    const EnsembleConfig ens = ensemble_config(cfg);
    CommandOutput out;

    const FdssVector f = build_fdss(cfg.waveform);
    std::ostringstream fdss;
    fdss << "k,frequency_bin,re,im,magnitude_db\n";
    for (int k = 0; k < cfg.waveform.num_bins; ++k) {
        const Complex c = f.coeffs[static_cast<std::size_t>(k)];
        fdss << k << ',' << cfg.waveform.bin_frequency(k) << ',' << num(c.real()) << ',' << num(c.imag()) << ','
             << num(20.0 * std::log10(std::abs(c) + 1e-300)) << '\n';
    }
    out.files["fdss.csv"] = fdss.str();

    for (const auto& scheme : metric_schemes(cfg)) {
        const auto symbols = symbol_ensemble(scheme, ens, 1, seed);
        std::ostringstream wave;
        wave << "sample,time_s,re,im\n";
        const auto& s = symbols.front();
        for (std::size_t i = 0; i < s.size(); ++i)
            wave << i << ',' << num(static_cast<double>(i) * s.sample_period) << ',' << num(s.samples[i].real()) << ','
                 << num(s.samples[i].imag()) << '\n';
        out.files["waveform_" + scheme.name() + ".csv"] = wave.str();

        const ComplexSignal stream = ensemble_stream(scheme, ens, cfg.metrics.aclr_symbols, seed);
        std::ostringstream psd;
        psd << "frequency_hz,psd_dbw_hz\n";
        for (const auto& bin : power_spectrum(stream, cfg.metrics.welch_segment))
            psd << num(bin.frequency_hz) << ',' << num(10.0 * std::log10(bin.density + 1e-300)) << '\n';
        out.files["spectrum_" + scheme.name() + ".csv"] = psd.str();
    }
    return out;
}

CommandOutput cmd_bound(const ExperimentConfig& cfg) {
    const auto& b = cfg.bound;
    std::ostringstream csv;
    csv << "scheme,snr_db,xi,devices,n_rounds,bound\n";
    for (const auto& name : cfg.schemes) {
        if (name == "ideal" || name == "obda") continue;
        const Scheme s = Scheme::parse(name);
        const int guard = guard_for_votes(cfg.waveform.num_bins, s.votes_per_block);
        for (double snr : cfg.snr_db)
            for (double n : b.rounds) {
                BoundParams p;
                p.lipschitz.assign(b.parameters, b.lipschitz);
                p.sigma.assign(b.parameters, b.sigma);
                p.f_star = b.f_star;
                p.gamma = b.gamma;
                p.devices = cfg.deployment.devices;
                p.xi = db_to_linear(snr) / (1.0 + guard);
                p.n_rounds = n;
                p.initial_loss = b.initial_loss;
                csv << name << ',' << num(snr) << ',' << num(p.xi) << ',' << p.devices << ',' << num(n) << ','
                    << num(convergence_bound(p)) << '\n';
            }
    }
    CommandOutput out;
    out.files["bound.csv"] = csv.str();
    return out;
}

CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "pmepr") return cmd_pmepr(cfg);
    if (name == "cm") return cmd_cm(cfg);
    if (name == "aclr") return cmd_aclr(cfg);
    if (name == "coverage") return cmd_coverage(cfg);
    if (name == "snr-distance") return cmd_snr_distance(cfg);
    if (name == "train") return cmd_train(cfg);
    if (name == "waveform-dump") return cmd_waveform_dump(cfg);
    if (name == "bound") return cmd_bound(cfg);
    throw ConfigError("unknown command " + name);
}

} // namespace cscmv
