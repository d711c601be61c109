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

#include "cscmv/rf.hpp"
#include "cscmv/channel.hpp"
#include "cscmv/numerics.hpp"
#include "cscmv/oac.hpp"
#include "cscmv/parallel.hpp"
#include "cscmv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cscmv {

namespace {

// |rapp(x)|^2 / sat^2 as a function of r = |x|^2 / sat^2.
double rapp_power_ratio(double r, double p) {
    if (p == 3.0) return r / std::cbrt(1.0 + r * r * r);
    return r / std::pow(1.0 + std::pow(r, p), 1.0 / p);
}

double require_power(const ComplexSignal& sig) {
    const double p = sig.mean_power();
    if (!(p > 0.0) || !std::isfinite(p)) throw std::domain_error("signal has zero or non-finite power");
    return p;
}

constexpr double kRcmRefDb = 1.52;
constexpr double kSlopeFactor = 1.52;

} // namespace

void RappPa::validate() const {
    if (!(sat_amplitude > 0.0)) throw ConfigError("PA saturation amplitude must be positive");
    if (!(smoothness > 0.0)) throw ConfigError("PA smoothness must be positive");
    if (!std::isfinite(obo_db)) throw ConfigError("PA back-off must be finite");
}

Complex RappPa::amplify(Complex x) const {
    const double a = std::abs(x);
    if (a == 0.0) return x;
    const double r = (a / sat_amplitude) * (a / sat_amplitude);
    return x * std::sqrt(rapp_power_ratio(r, smoothness) / r);
}

ComplexSignal apply_pa(const RappPa& pa, const ComplexSignal& sig) {
    pa.validate();
    const double in_power = require_power(sig);
    const double sat2 = pa.sat_amplitude * pa.sat_amplitude;
    const double target = sat2 * db_to_linear(-pa.obo_db);
    double gain2 = target / in_power; // power gain applied before the amplifier
    if (pa.reference == BackoffReference::output) {
        std::vector<double> r(sig.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(sig.samples[i]) / sat2;
        auto out_power = [&](double g2) {
            double acc = 0.0;
            for (double v : r) acc += rapp_power_ratio(g2 * v, pa.smoothness);
            return sat2 * acc / static_cast<double>(r.size());
        };
        // log output power is increasing and nearly linear in log drive;
        // Illinois regula falsi on that curve
        auto err = [&](double lg) { return std::log(out_power(std::exp(lg)) / target); };
        double lo = std::log(target / in_power) - 1.0;
        double hi = lo + 40.0;
        double flo = err(lo);
        while (flo > 0.0) flo = err(lo -= 10.0);
        double fhi = err(hi);
        if (fhi < 0.0) {
            gain2 = std::exp(hi);
        } else {
            int side = 0;
            double x = hi;
            for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                x = (lo * fhi - hi * flo) / (fhi - flo);
                const double fx = err(x);
                if (std::abs(fx) < 1e-12) break;
                if (fx < 0.0) {
                    lo = x;
                    flo = fx;
                    if (side == -1) fhi *= 0.5;
                    side = -1;
                } else {
                    hi = x;
                    fhi = fx;
                    if (side == 1) flo *= 0.5;
                    side = 1;
                }
            }
            gain2 = std::exp(x);
        }
    }
    const double g = std::sqrt(gain2);
    ComplexSignal out{ComplexVector(sig.size()), sig.sample_period};
    for (std::size_t i = 0; i < sig.size(); ++i) out.samples[i] = pa.amplify(g * sig.samples[i]);
    return out;
}

double pmepr_db(const ComplexSignal& sig) {
    const double mean = require_power(sig);
    return linear_to_db(sig.peak_power() / mean);
}

double cubic_metric_db(const ComplexSignal& sig) {
    const double mean = require_power(sig);
    double acc = 0.0;
    for (const auto& x : sig.samples) {
        const double v2 = std::norm(x) / mean;
        acc += v2 * v2 * v2;
    }
    const double rcm = 20.0 * std::log10(std::sqrt(acc / static_cast<double>(sig.size())));
    return (rcm - kRcmRefDb) / kSlopeFactor;
}

Band occupied_band(const WaveformConfig& cfg) {
    const double df = cfg.subcarrier_spacing();
    return {(cfg.lowest_freq - 0.5) * df, (cfg.highest_freq + 0.5) * df};
}

double aclr_db(const ComplexSignal& sig, Band inband, std::size_t segment_len) {
    const double nyquist = 0.5 * sig.sample_rate();
    if (!(inband.low_hz < inband.high_hz)) throw std::invalid_argument("aclr: empty band");
    if (inband.low_hz < -nyquist || inband.high_hz > nyquist) throw std::invalid_argument("aclr: band exceeds Nyquist");
    double in = 0.0;
    double out = 0.0;
    for (const auto& bin : power_spectrum(sig, segment_len)) {
        if (bin.frequency_hz >= inband.low_hz && bin.frequency_hz <= inband.high_hz)
            in += bin.density;
        else
            out += bin.density;
    }
    if (!(in > 0.0)) throw std::domain_error("aclr: no in-band power");
    return linear_to_db(out / in);
}

MetricDistribution::MetricDistribution(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("empty metric distribution");
    std::sort(values_.begin(), values_.end());
}

double MetricDistribution::percentile(double p) const {
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile outside [0, 100]");
    const double pos = p / 100.0 * static_cast<double>(values_.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= values_.size()) return values_.back();
    const double t = pos - static_cast<double>(i);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

std::string Scheme::name() const {
    return kind == SchemeKind::obda ? std::string("obda") : "csc_mv" + std::to_string(votes_per_block);
}

Scheme Scheme::parse(const std::string& name) {
    if (name == "obda") return obda();
    const std::string prefix = "csc_mv";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        const std::string digits = name.substr(prefix.size());
        if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
            digits.size() < 4) {
            const int v = std::stoi(digits);
            if (v >= 1) return csc(v);
        }
    }
    throw ConfigError("unknown scheme '" + name + "' (expected obda or csc_mv<votes>)");
}

void EnsembleConfig::validate() const {
    waveform.validate();
    if (oversampling < 1) throw ConfigError("oversampling must be at least 1");
    if (!(tci_threshold > 0.0)) throw ConfigError("tci threshold must be positive");
    if (symbols_per_channel < 1) throw ConfigError("symbols_per_channel must be at least 1");
}

std::vector<ComplexSignal> symbol_ensemble(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                           std::uint64_t seed) {
    cfg.validate();
    const WaveformConfig base = cfg.waveform;
    const WaveformConfig os = base.oversampled(cfg.oversampling);
    const auto m = static_cast<std::size_t>(base.num_bins);
    std::vector<ComplexSignal> out(count);

    if (scheme.kind == SchemeKind::csc_mv) {
        const FdssVector f = build_fdss(os);
        const VotePlan plan =
            build_vote_plan(static_cast<std::size_t>(scheme.votes_per_block), base.num_bins,
                            guard_for_votes(base.num_bins, scheme.votes_per_block));
        parallel_for(count, cfg.threads, [&](std::size_t t) {
            const RngKey key{seed, t, 0, DrawKind::ensemble, 0};
            auto rng = make_rng(key.with_index(1));
            VoteVector votes(plan.gradients);
            for (auto& v : votes) v = (rng() >> 63) ? 1 : -1;
            const auto blocks = encode_csc(plan, votes, RngKey{seed, t, 0, DrawKind::symbols, 0});
            out[t] = spread(os, f, blocks.front());
        });
    } else {
        const double fs = base.sample_rate;
        parallel_for(count, cfg.threads, [&](std::size_t t) {
            const auto period = static_cast<std::uint64_t>(t / static_cast<std::size_t>(cfg.symbols_per_channel));
            const auto channel = draw_epa(fs, RngKey{seed, period, 0, DrawKind::channel, 0});
            const auto response = channel.frequency_response(base);
            auto rng = make_rng(RngKey{seed, t, 0, DrawKind::ensemble, 1});
            VoteVector votes(2 * m);
            for (auto& v : votes) v = (rng() >> 63) ? 1 : -1;
            const auto blocks = encode_obda(votes, response, cfg.tci_threshold, base.num_bins);
            out[t] = modulate_ofdm(os, blocks.front());
        });
    }
    return out;
}

ComplexSignal ensemble_stream(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count, std::uint64_t seed) {
    const auto symbols = symbol_ensemble(scheme, cfg, count, seed);
    return overlap_add(cfg.waveform.oversampled(cfg.oversampling), symbols);
}

namespace {

template <class Metric>
MetricDistribution per_symbol(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count, std::uint64_t seed,
                              Metric metric) {
    const auto symbols = symbol_ensemble(scheme, cfg, count, seed);
    const WaveformConfig os = cfg.waveform.oversampled(cfg.oversampling);
    std::vector<double> values(count);
    for (std::size_t t = 0; t < count; ++t) values[t] = metric(symbol_body(os, symbols[t]));
    return MetricDistribution(std::move(values));
}

} // namespace

MetricDistribution pmepr_distribution(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                      std::uint64_t seed) {
    return per_symbol(scheme, cfg, count, seed, [](const ComplexSignal& s) { return pmepr_db(s); });
}

MetricDistribution cm_distribution(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                   std::uint64_t seed) {
    return per_symbol(scheme, cfg, count, seed, [](const ComplexSignal& s) { return cubic_metric_db(s); });
}

std::vector<AclrPoint> aclr_sweep(const ComplexSignal& stream, RappPa pa, Band inband, std::span<const double> obos_db,
                                  unsigned threads, std::size_t segment_len) {
    std::vector<AclrPoint> out(obos_db.size());
    parallel_for(obos_db.size(), threads, [&](std::size_t i) {
        RappPa probe = pa;
        probe.obo_db = obos_db[i];
        out[i] = {obos_db[i], aclr_db(apply_pa(probe, stream), inband, segment_len)};
    });
    return out;
}

std::optional<double> obo_for_aclr(const ComplexSignal& stream, RappPa pa, Band inband, double target_db, double lo,
                                   double hi, double tolerance_db, std::size_t segment_len) {
    if (!(lo <= hi) || !(tolerance_db > 0.0)) throw std::invalid_argument("obo_for_aclr: bad search interval");
    auto meets = [&](double obo) {
        pa.obo_db = obo;
        return aclr_db(apply_pa(pa, stream), inband, segment_len) <= target_db;
    };
    if (!meets(hi)) return std::nullopt;
    if (meets(lo)) return lo;
    while (hi - lo > tolerance_db) {
        const double mid = 0.5 * (lo + hi);
        (meets(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace cscmv
