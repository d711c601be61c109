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

#include <cstdint>
#include <random>

namespace cscmv {

// Every stochastic draw is keyed by where it happens, never by call order,
// so results do not depend on evaluation order or thread count.
enum class DrawKind : std::uint64_t {
    channel = 1,
    sync = 2,
    symbols = 3,
    noise = 4,
    batch = 5,
    deployment = 6,
    model_init = 7,
    dataset = 8,
    ensemble = 9,
    votes = 10,
};

struct RngKey {
    std::uint64_t seed = 0;
    std::uint64_t round = 0;
    std::uint64_t device = 0;
    DrawKind kind = DrawKind::ensemble;
    std::uint64_t index = 0;

    RngKey with_index(std::uint64_t i) const {
        RngKey k = *this;
        k.index = i;
        return k;
    }
};

std::uint64_t mix_key(const RngKey& key);

inline std::mt19937_64 make_rng(const RngKey& key) { return std::mt19937_64(mix_key(key)); }

} // namespace cscmv
