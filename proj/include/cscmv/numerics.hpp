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

#include <span>
#include <vector>

namespace cscmv {

struct FresnelPair {
    double c = 0.0;
    double s = 0.0;
};

/// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt and
/// S(x) = int_0^x sin(pi t^2 / 2) dt.
///
/// Power series for |x| <= 1.6; beyond that the complementary integral is
/// evaluated through its continued fraction (modified Lentz). Absolute error
/// is below 1e-14 over the real line. Throws std::domain_error for
/// non-finite input.
FresnelPair fresnel(double x);

// Orthonormal DFT/IDFT (1/sqrt(n) on both directions), any length.
ComplexVector dft(std::span<const Complex> x);
ComplexVector idft(std::span<const Complex> x);

struct SpectrumBin {
    double frequency_hz = 0.0;
    double density = 0.0; // W/Hz
};

/// Averaged periodogram (Welch): Hann taper, 50% overlap, two-sided,
/// frequencies ascending from -fs/2. Summing density * (fs / segment_len)
/// gives the mean power of the signal.
std::vector<SpectrumBin> power_spectrum(const ComplexSignal& sig, std::size_t segment_len);

} // namespace cscmv
