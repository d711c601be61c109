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

#include "cscmv/numerics.hpp"
#include "cscmv/rng.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace cscmv {

double ComplexSignal::mean_power() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    return acc / static_cast<double>(samples.size());
}

double ComplexSignal::peak_power() const {
    double peak = 0.0;
    for (const auto& v : samples) peak = std::max(peak, std::norm(v));
    return peak;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::uint64_t mix_key(const RngKey& key) {
    // splitmix64 finalizer folded over the key fields
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(key.seed);
    h = mix(h ^ key.round);
    h = mix(h ^ key.device);
    h = mix(h ^ static_cast<std::uint64_t>(key.kind));
    h = mix(h ^ key.index);
    return h;
}

namespace {

constexpr double kPi = std::numbers::pi;

FresnelPair fresnel_series(double x) {
    const double t = kPi * x * x / 2.0;
    const double t2 = t * t;
    // C = x * sum (-1)^n t^(2n) / ((2n)! (4n+1)), S = x * sum (-1)^n t^(2n+1) / ((2n+1)! (4n+3))
    double c = 0.0;
    double s = 0.0;
    double term_c = 1.0; // t^(2n) / (2n)!
    double term_s = t;   // t^(2n+1) / (2n+1)!
    for (int n = 0; n < 60; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const double dc = sign * term_c / (4.0 * n + 1.0);
        const double ds = sign * term_s / (4.0 * n + 3.0);
        c += dc;
        s += ds;
        if (std::abs(dc) < 1e-17 * std::abs(c) && std::abs(ds) < 1e-17 * std::abs(s)) break;
        term_c *= t2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
        term_s *= t2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    }
    return {x * c, x * s};
}

FresnelPair fresnel_continued_fraction(double ax) {
    const double pix2 = kPi * ax * ax;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    Complex b(1.0, -pix2);
    Complex cc = 1.0 / tiny;
    Complex d = 1.0 / b;
    Complex h = d;
    double n = -1.0;
    for (int k = 2; k < 200; ++k) {
        n += 2.0;
        const double a = -n * (n + 1.0);
        b += 4.0;
        d = 1.0 / (a * d + b);
        cc = b + a / cc;
        const Complex del = cc * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    h *= Complex(ax, -ax);
    const Complex cs = Complex(0.5, 0.5) * (1.0 - Complex(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
    return {cs.real(), cs.imag()};
}

// FFTW plans are created once per (length, direction) and reused through the
// new-array execute interface, which is safe to call concurrently.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int direction) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, direction);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<Complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), direction,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

ComplexVector transform(std::span<const Complex> x, int direction) {
    const int n = static_cast<int>(x.size());
    ComplexVector in(x.begin(), x.end());
    ComplexVector out(x.size());
    if (n == 0) return out;
    fftw_plan p = PlanCache::instance().get(n, direction);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace

FresnelPair fresnel(double x) {
    if (!std::isfinite(x)) throw std::domain_error("fresnel: argument must be finite");
    const double ax = std::abs(x);
    FresnelPair r = ax <= 1.6 ? fresnel_series(ax) : fresnel_continued_fraction(ax);
    if (x < 0.0) {
        r.c = -r.c;
        r.s = -r.s;
    }
    return r;
}

ComplexVector dft(std::span<const Complex> x) { return transform(x, FFTW_FORWARD); }
ComplexVector idft(std::span<const Complex> x) { return transform(x, FFTW_BACKWARD); }

std::vector<SpectrumBin> power_spectrum(const ComplexSignal& sig, std::size_t segment_len) {
    if (segment_len < 2 || segment_len % 2 != 0)
        throw std::invalid_argument("power_spectrum: segment length must be a positive even number");
    if (sig.size() < segment_len)
        throw std::invalid_argument("power_spectrum: segment longer than the signal");
    if (sig.sample_period <= 0.0) throw std::invalid_argument("power_spectrum: sample period must be positive");

    const std::size_t len = segment_len;
    const std::size_t hop = len / 2;
    std::vector<double> window(len);
    double window_energy = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        window[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(len));
        window_energy += window[n] * window[n];
    }

    const std::size_t segments = (sig.size() - len) / hop + 1;
    std::vector<double> acc(len, 0.0);
    ComplexVector seg(len);
    for (std::size_t s = 0; s < segments; ++s) {
        for (std::size_t n = 0; n < len; ++n) seg[n] = sig.samples[s * hop + n] * window[n];
        // dft() is orthonormal, so |X|^2 already carries the 1/len factor
        const ComplexVector psd = dft(seg);
        for (std::size_t k = 0; k < len; ++k) acc[k] += std::norm(psd[k]);
    }

    const double fs = sig.sample_rate();
    const double scale = static_cast<double>(len) / (fs * window_energy * static_cast<double>(segments));
    std::vector<SpectrumBin> out(len);
    for (std::size_t i = 0; i < len; ++i) {
        // fftshift: output index i holds frequency (i - len/2) * fs / len
        const std::size_t k = (i + len / 2) % len;
        out[i].frequency_hz = (static_cast<double>(i) - static_cast<double>(len / 2)) * fs / static_cast<double>(len);
        out[i].density = acc[k] * scale;
    }
    return out;
}

} // namespace cscmv
