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

#include "cscmv/common.hpp"
#include "cscmv/waveform.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cscmv {

/// Which power the back-off is measured against saturation with.
/// `output`: 10 log10(sat^2 / mean|y|^2) after the amplifier (the usual OBO).
/// `input`: 10 log10(sat^2 / mean|x|^2) of the drive signal.
enum class BackoffReference { output, input };

/// Memoryless Rapp amplifier with unit small-signal gain.
struct RappPa {
    double sat_amplitude = 1.0;
    double smoothness = 3.0;
    double obo_db = 0.0;
    BackoffReference reference = BackoffReference::output;

    void validate() const;
    // AM/AM only; phase preserved.
    Complex amplify(Complex x) const;

    bool operator==(const RappPa&) const = default;
};

/// Scales `sig` to the configured back-off and amplifies it. For an output
/// reference the drive gain is solved by regula falsi; back-offs the amplifier
/// cannot reach (close to 0 dB) leave it driven hard into saturation.
ComplexSignal apply_pa(const RappPa& pa, const ComplexSignal& sig);

// 10 log10(max|x|^2 / mean|x|^2); std::domain_error on zero power.
double pmepr_db(const ComplexSignal& sig);
// 3GPP cubic metric with RCM_ref = K_s = 1.52 dB; std::domain_error on zero power.
double cubic_metric_db(const ComplexSignal& sig);

struct Band {
    double low_hz = 0.0;
    double high_hz = 0.0;
};

// Occupied subcarriers including half a spacing on either side.
Band occupied_band(const WaveformConfig& cfg);

/// Power outside `inband` over power inside it, from a Welch spectrum.
/// Throws std::invalid_argument when the band exceeds Nyquist.
double aclr_db(const ComplexSignal& sig, Band inband, std::size_t segment_len = 1024);

/// Sorted sample of a per-symbol metric in dB.
class MetricDistribution {
public:
    explicit MetricDistribution(std::vector<double> values);
    // Linear interpolation between order statistics, p in [0, 100].
    double percentile(double p) const;
    double median() const { return percentile(50.0); }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

enum class SchemeKind { csc_mv, obda };

struct Scheme {
    SchemeKind kind = SchemeKind::csc_mv;
    int votes_per_block = 1; // csc_mv only

    static Scheme csc(int votes) { return {SchemeKind::csc_mv, votes}; }
    static Scheme obda() { return {SchemeKind::obda, 0}; }
    std::string name() const;
    static Scheme parse(const std::string& name); // "obda", "csc_mv1", "csc_mv2", ...
    bool operator==(const Scheme&) const = default;
};

/// Traffic model for the transmit-signal metrics: random vote signs and
/// unit-circle symbols per symbol; OBDA symbols carry QPSK with truncated
/// channel inversion against an EPA channel redrawn every
/// `symbols_per_channel` symbols.
struct EnsembleConfig {
    WaveformConfig waveform;
    int oversampling = 4;
    double tci_threshold = 0.3;
    int symbols_per_channel = 1;
    unsigned threads = 1;

    void validate() const;
};

/// `count` transmit symbols (cyclic prefix included) at the oversampled rate.
std::vector<ComplexSignal> symbol_ensemble(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                           std::uint64_t seed);
// The same symbols overlap-added into one stream.
ComplexSignal ensemble_stream(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count, std::uint64_t seed);

// Per-symbol metrics over the symbol bodies (cyclic prefix excluded).
MetricDistribution pmepr_distribution(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                      std::uint64_t seed);
MetricDistribution cm_distribution(const Scheme& scheme, const EnsembleConfig& cfg, std::size_t count,
                                   std::uint64_t seed);

struct AclrPoint {
    double obo_db = 0.0;
    double aclr_db = 0.0;
};

std::vector<AclrPoint> aclr_sweep(const ComplexSignal& stream, RappPa pa, Band inband, std::span<const double> obos_db,
                                  unsigned threads = 1, std::size_t segment_len = 1024);

/// Smallest back-off in [lo, hi] whose ACLR meets `target_db`, by bisection
/// down to `tolerance_db`. Empty when even `hi` misses the target.
std::optional<double> obo_for_aclr(const ComplexSignal& stream, RappPa pa, Band inband, double target_db,
                                   double lo = 0.0, double hi = 30.0, double tolerance_db = 0.1,
                                   std::size_t segment_len = 1024);

} // namespace cscmv
