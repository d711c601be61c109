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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "cscmv/channel.hpp"
#include "cscmv/config.hpp"
#include "cscmv/deployment.hpp"
#include "cscmv/experiments.hpp"
#include "cscmv/learn.hpp"
#include "cscmv/numerics.hpp"
#include "cscmv/oac.hpp"
#include "cscmv/rf.hpp"
#include "cscmv/waveform.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace cscmv;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

ComplexVector random_bins(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

VoteVector random_votes(std::size_t n, std::mt19937_64& rng) {
    VoteVector v(n);
    for (auto& x : v) x = (rng() & 1) ? 1 : -1;
    return v;
}

BinVector circular_convolve(const BinVector& x, const ComplexVector& c) {
    const std::size_t m = x.size();
    BinVector y(m);
    for (std::size_t n = 0; n < m; ++n)
        for (std::size_t j = 0; j < m; ++j) y[n] += x[j] * c[(n + m - j) % m];
    return y;
}

void criterion_1(Verdict& v) {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_bins(54, rng);
        const auto got = despread(cfg, f, spread(cfg, f, s));
        auto x = dft(s);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] *= std::norm(f.coeffs[k]);
        const auto want = idft(x);
        for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    }
    v.require(worst <= 1e-9, "identity error " + std::to_string(worst));

    const auto os = cfg.oversampled(8);
    const auto fo = build_fdss(os);
    ComplexVector s(54);
    s[0] = 1.0;
    const auto body = symbol_body(os, spread(os, fo, s));
    const std::size_t n = body.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double count = 0;
    for (std::size_t i = n / 10; i < 9 * n / 10; ++i) {
        const double dphi = std::arg(body.samples[i + 1] * std::conj(body.samples[i]));
        const double hz = dphi / (2.0 * std::numbers::pi) * os.sample_rate;
        const double t = (static_cast<double>(i) + 0.5) * body.sample_period;
        sx += t;
        sy += hz;
        sxx += t * t;
        sxy += t * hz;
        count += 1.0;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double expected = cfg.sweep_cycles * cfg.subcarrier_spacing() / cfg.symbol_duration();
    const double rel = std::abs(slope / expected - 1.0);
    v.detail << "max identity error " << worst << ", chirp slope " << slope << " Hz/s vs " << expected << " ("
             << 100.0 * rel << "% off)";
    v.require(rel <= 0.05, "slope");
}

void criterion_2(Verdict& v) {
    EnsembleConfig cfg;
    const std::size_t count = 10000;
    const auto obda = pmepr_distribution(Scheme::obda(), cfg, count, 1);
    const std::pair<int, double> targets[] = {{1, 2.0}, {2, 3.0}, {4, 6.0}};
    v.detail << "p99.9 PMEPR:";
    for (const auto& [mv, target] : targets) {
        const auto d = pmepr_distribution(Scheme::csc(mv), cfg, count, 1);
        const double p = d.percentile(99.9);
        v.detail << " csc_mv" << mv << "=" << std::setprecision(3) << p;
        v.require(std::abs(p - target) <= 1.0, "csc_mv" + std::to_string(mv) + " p99.9");
        bool dominated = true;
        for (double q = 0.0; q <= 100.0; q += 0.1) dominated = dominated && obda.percentile(q) >= d.percentile(q);
        v.require(dominated, "OBDA does not dominate csc_mv" + std::to_string(mv));
    }
    v.detail << " obda=" << obda.percentile(99.9) << " dB";
}

void criterion_3(Verdict& v) {
    const ExperimentConfig defaults;
    EnsembleConfig cfg;
    const Band band = occupied_band(cfg.waveform);
    std::vector<double> obos;
    for (double o = 0.0; o <= 30.0 + 1e-9; o += 0.5) obos.push_back(o);
    struct Target {
        Scheme scheme;
        double floor_db;
        double obo_db;
    };
    const Target targets[] = {{Scheme::obda(), -23.0, 10.5}, {Scheme::csc(2), -28.2, 3.3}, {Scheme::csc(4), -28.2, 4.4}};
    v.detail << std::setprecision(4);
    for (const auto& t : targets) {
        const auto stream = ensemble_stream(t.scheme, cfg, defaults.metrics.aclr_symbols, 1);
        double floor_db = 1e9;
        for (const auto& p : aclr_sweep(stream, RappPa{}, band, obos)) floor_db = std::min(floor_db, p.aclr_db);
        const auto obo = obo_for_aclr(stream, RappPa{}, band, -22.0, 0.0, 30.0, 0.05);
        v.detail << t.scheme.name() << ": floor " << floor_db << " dB, OBO_min "
                 << (obo ? std::to_string(*obo) : std::string("none")) << " dB; ";
        v.require(std::abs(floor_db - t.floor_db) <= 1.5, t.scheme.name() + " floor");
        v.require(obo && std::abs(*obo - t.obo_db) <= 1.5, t.scheme.name() + " OBO_min");
    }
}

void criterion_4(Verdict& v) {
    PowerControlParams pc;
    pc.obo_ref = 30.0;
    pc.beta = 4.0;
    pc.r_ref = 10.0;
    pc.obo_min = 10.5;
    const double r = coverage_radius(pc);
    v.detail << std::setprecision(5) << "r_P(obda) = " << r << " m";
    v.require(std::abs(r - 30.73) <= 0.1, "obda radius");
    pc.obo_min = 3.3;
    const double r2 = coverage_radius(pc);
    pc.obo_min = 4.4;
    const double r4 = coverage_radius(pc);
    v.detail << ", r_P(csc_mv2) = " << r2 << " m, r_P(csc_mv4) = " << r4 << " m from the same formula";
}

void criterion_5(Verdict& v) {
    const double rms = PowerDelayProfile::epa().rms_delay_spread() * 1e9;
    v.detail << std::setprecision(4) << "EPA RMS delay spread " << rms << " ns";
    v.require(std::abs(rms - 43.1) <= 1.0, "delay spread");
}

void criterion_6(Verdict& v) {
    const WaveformConfig cfg;
    const FdssVector f = build_fdss(cfg);
    const VotePlan plan = build_vote_plan(2, cfg.num_bins, guard_for_votes(cfg.num_bins, 2));
    std::mt19937_64 rng(6);
    int errors = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto votes = random_votes(2, rng);
        const auto ch = draw_epa(cfg.sample_rate, RngKey{6, t, 0, DrawKind::channel, 0});
        // admissible: delay spread plus offset inside both the prefix and the guard
        const int limit = std::min(cfg.cp_len - cfg.window_rolloff - ch.max_delay(), 4);
        const auto sync = draw_sync_error(limit, RngKey{6, t, 0, DrawKind::sync, 0});
        const auto tx = encode_csc(plan, votes, RngKey{6, t, 0, DrawKind::symbols, 0});
        const std::vector<BinVector> rx{despread(cfg, f, propagate(ch, sync, spread(cfg, f, tx.front())))};
        errors += detect_mv(plan, rx).mv != votes;
    }
    v.detail << "single-device errors " << errors << "/1000";
    v.require(errors == 0, "single-device round trip");

    const VotePlan one = build_vote_plan(1, cfg.num_bins, guard_for_votes(cfg.num_bins, 2));
    ChannelRealization unit;
    unit.taps = {{0, {1.0, 0.0}}};
    const auto kernel = circulant_kernel(cfg, f, unit.frequency_response(cfg));
    const Complex qpsk[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    int patterns = 0, mismatches = 0;
    for (std::size_t k = 1; k <= 4; ++k)
        for (unsigned pattern = 0; pattern < (1u << k); ++pattern) {
            std::vector<VoteVector> votes(k);
            for (std::size_t d = 0; d < k; ++d) votes[d] = {(pattern >> d) & 1 ? 1 : -1};
            double margin = 0.0;
            const unsigned combos = 1u << (2 * k);
            for (unsigned c = 0; c < combos; ++c) {
                BinVector tx(54);
                for (std::size_t d = 0; d < k; ++d) {
                    const auto r = votes[d][0] > 0 ? one.positive(0) : one.negative(0);
                    tx[static_cast<std::size_t>(one.group_start(r.group))] += qpsk[(c >> (2 * d)) & 3];
                }
                const std::vector<BinVector> rx{circular_convolve(tx, kernel)};
                margin += detect_mv(one, rx).margins[0];
            }
            margin /= combos;
            const bool ok = sign_of(margin) == ideal_mv(votes)[0];
            ++patterns;
            mismatches += !ok;
        }
    v.detail << ", expected-margin sign mismatches " << mismatches << "/" << patterns << " patterns (K <= 4)";
    v.require(mismatches == 0, "multi-device expected margin");
}

struct TrainOutcome {
    double accuracy = 0.0;
    double near_loss = 0.0;
    double far_loss = 0.0;
};

TrainOutcome train_average(const ExperimentConfig& cfg, const std::string& phy, std::optional<double> snr) {
    TrainOutcome out;
    const double boundary = cfg.deployment.r_max / std::sqrt(2.0);
    const std::size_t seeds = cfg.training.seeds;
    for (std::size_t s = 0; s < seeds; ++s) {
        const auto run = run_training(cfg, phy, snr, *cfg.seed + s);
        out.accuracy += run.state.history.back().test_accuracy / static_cast<double>(seeds);
        double near = 0.0, far = 0.0;
        std::size_t n_near = 0, n_far = 0;
        for (const auto& p : loss_by_distance(run.state, run.deployment)) {
            if (p.distance_m <= boundary) {
                near += p.loss;
                ++n_near;
            } else {
                far += p.loss;
                ++n_far;
            }
        }
        if (n_near) out.near_loss += near / static_cast<double>(n_near) / static_cast<double>(seeds);
        if (n_far) out.far_loss += far / static_cast<double>(n_far) / static_cast<double>(seeds);
    }
    return out;
}

ExperimentConfig learning_config(DataMode mode) {
    ExperimentConfig cfg;
    cfg.seed = 1;
    cfg.deployment.devices = 20;
    cfg.training.rounds = 200;
    cfg.training.seeds = 5;
    cfg.training.mode = mode;
    cfg.validate();
    return cfg;
}

void criterion_7(Verdict& v) {
    const auto cfg = learning_config(DataMode::homogeneous);
    const auto ideal = train_average(cfg, "ideal", std::nullopt);
    const auto csc = train_average(cfg, "csc_mv2", 20.0);
    v.detail << std::setprecision(4) << "mean final accuracy: ideal " << ideal.accuracy << ", csc_mv2@20dB "
             << csc.accuracy;
    v.require(csc.accuracy >= ideal.accuracy - 0.03, "within 3 points of ideal");
}

void criterion_8(Verdict& v) {
    const auto cfg = learning_config(DataMode::heterogeneous);
    const auto csc = train_average(cfg, "csc_mv2", 20.0);
    const auto obda = train_average(cfg, "obda", 20.0);
    v.detail << std::setprecision(4) << "mean final accuracy: csc_mv2 " << csc.accuracy << ", obda " << obda.accuracy
             << "; obda local loss near " << obda.near_loss << ", far " << obda.far_loss;
    v.require(csc.accuracy >= obda.accuracy + 0.05, "csc ahead by 5 points");
    v.require(obda.far_loss > obda.near_loss, "obda far loss above near loss");
}

void criterion_9(Verdict& v) {
    BoundParams p;
    p.lipschitz.assign(2410, 1.0);
    p.sigma.assign(2410, 1.0);
    p.devices = 50;
    p.xi = 10.0;
    p.initial_loss = 2.3;
    p.n_rounds = 100.0;
    const double b1 = convergence_bound(p);
    p.n_rounds = 400.0;
    const double b4 = convergence_bound(p);
    v.require(std::abs(b4 - 0.5 * b1) <= 1e-12 * b1, "1/sqrt(N) scaling");
    const double a_inf = bound_noise_factor(1e300, 50, 2.0);
    v.require(std::abs(a_inf - 1.0 / std::sqrt(2.0)) <= 1e-15, "xi limit");
    bool mono = true;
    double prev = 1e300;
    for (double xi : {0.1, 1.0, 10.0, 100.0}) {
        p.xi = xi;
        mono = mono && convergence_bound(p) < prev;
        prev = convergence_bound(p);
    }
    prev = 1e300;
    for (std::size_t k : {1, 5, 50}) {
        p.devices = k;
        mono = mono && convergence_bound(p) < prev;
        prev = convergence_bound(p);
    }
    prev = 0.0;
    for (double s : {0.1, 1.0, 3.0}) {
        p.sigma.assign(2410, s);
        mono = mono && convergence_bound(p) > prev;
        prev = convergence_bound(p);
    }
    v.require(mono, "monotonicity");
    v.detail << "N x4 ratio " << b4 / b1 << ", a(xi -> inf, gamma = 2) = " << a_inf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return files;
}

void criterion_10(Verdict& v, const std::string& cli, const fs::path& workdir) {
    const fs::path root = workdir / "determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path config = root / "config.json";
    std::ofstream(config) << R"({
  "metrics": {"pmepr_symbols": 200, "aclr_symbols": 200, "obo_step_db": 5.0},
  "deployment": {"devices": 6},
  "training": {"rounds": 3, "samples_per_device": 30, "test_samples": 100, "seeds": 2},
  "schemes": ["ideal", "csc_mv1", "csc_mv2", "csc_mv4", "obda"],
  "snr_db": [10, 20]
})";
    const char* commands[] = {"pmepr", "cm", "aclr", "coverage", "snr-distance",
                              "train", "waveform-dump", "bound", "show-config"};
    int checked = 0;
    for (const char* cmd : commands) {
        std::map<std::string, std::string> reference;
        int run = 0;
        for (unsigned threads : {1u, 1u, 3u}) {
            const fs::path dir = root / cmd / ("run" + std::to_string(run));
            fs::create_directories(dir);
            const std::string line = "cd \"" + dir.string() + "\" && \"" + cli + "\" " + cmd + " --config \"" +
                                     config.string() + "\" --seed 7 --out out --threads " + std::to_string(threads) +
                                     " > stdout.txt 2> stderr.txt";
            const int rc = std::system(line.c_str());
            v.require(rc == 0, std::string(cmd) + " exited with " + std::to_string(rc));
            auto files = snapshot(dir);
            files.erase("stderr.txt");
            if (std::string(cmd) == "show-config") {
                // the echoed config names the requested thread count
                auto& text = files["stdout.txt"];
                const auto at = text.find("\"threads\": ");
                if (at != std::string::npos) text.erase(at, text.find('\n', at) - at);
            }
            if (run == 0)
                reference = files;
            else
                v.require(files == reference, std::string(cmd) + " output differs (threads " + std::to_string(threads) + ")");
            ++run;
        }
        v.require(reference.size() >= 1, std::string(cmd) + " wrote nothing");
        ++checked;
    }
    v.detail << checked << " commands, 3 runs each (threads 1, 1, 3), outputs compared byte for byte";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string cli;
    std::string workdir = "acceptance_out";
    std::vector<int> only;
    app.add_option("--cli", cli, "path to the cscmv executable")->required();
    app.add_option("--workdir", workdir, "scratch directory");
    app.add_option("--only", only, "run just these criteria");
    CLI11_PARSE(app, argc, argv);
    // commands run from per-run directories
    cli = fs::absolute(cli).string();
    workdir = fs::absolute(workdir).string();
    fs::create_directories(workdir);

    const std::vector<std::function<void(Verdict&)>> criteria = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9,
        [&](Verdict& v) { criterion_10(v, cli, workdir); },
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i](v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  (" << std::fixed
                  << std::setprecision(1) << secs << " s) " << std::defaultfloat << v.detail.str() << std::endl;
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
