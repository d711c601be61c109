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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cscmv {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// Thrown when a sequence does not have the length a stage expects.
class FramingError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A solve or plan has no admissible answer for the requested parameters.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Complex baseband samples at a fixed sample period.
struct ComplexSignal {
    ComplexVector samples;
    double sample_period = 0.0;

    std::size_t size() const { return samples.size(); }
    double sample_rate() const { return 1.0 / sample_period; }
    double mean_power() const;
    double peak_power() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

// sign(x) with sign(0) = +1.
inline int sign_of(double x) { return x < 0.0 ? -1 : 1; }

} // namespace cscmv
