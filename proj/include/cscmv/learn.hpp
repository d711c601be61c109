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

#include "cscmv/deployment.hpp"
#include "cscmv/oac.hpp"
#include "cscmv/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cscmv {

/// Labeled feature vectors, row-major.
struct Dataset {
    std::size_t features = 0;
    std::vector<double> x;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * features, features}; }
    void push_back(std::span<const double> features_row, int label);
    Dataset subset(std::span<const std::size_t> indices) const;
};

/// Noisy, slightly shifted 8x8 renderings of a 5x7 digit font; labels cycle
/// 0..9 so every class has count/10 samples (+1 for the first count%10).
/// Sample n is drawn from stream first_index + n, so disjoint index ranges
/// give independent sets.
Dataset synthetic_digits(std::size_t count, std::uint64_t seed, std::uint64_t first_index = 0);

/// Reads an IDX image file (magic 0x803) and label file (magic 0x801).
/// Pixels are scaled to [0, 1]. Throws ConfigError on malformed input.
Dataset read_idx(const std::string& images_path, const std::string& labels_path);

// Block-averages side_in x side_in images down to side_out x side_out.
Dataset downsample_images(const Dataset& data, std::size_t side_in, std::size_t side_out);

/// Differentiable empirical loss over indexed samples.
class Objective {
public:
    virtual ~Objective() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::size_t sample_count() const = 0;
    // Mean loss over `batch`; its gradient is written to `grad`.
    virtual double loss_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                                     std::vector<double>& grad) const = 0;
    double loss(std::span<const double> w, std::span<const std::size_t> batch) const;
};

// 0.5 * ||w - w*||^2 for every sample.
class QuadraticObjective final : public Objective {
public:
    QuadraticObjective(std::vector<double> optimum, std::size_t samples);
    std::size_t dimension() const override { return optimum_.size(); }
    std::size_t sample_count() const override { return samples_; }
    double loss_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                             std::vector<double>& grad) const override;

private:
    std::vector<double> optimum_;
    std::size_t samples_;
};

/// inputs -> hidden (tanh) -> classes, softmax cross-entropy. Parameters are
/// laid out as W1 (hidden x inputs), b1, W2 (classes x hidden), b2.
struct MlpShape {
    std::size_t inputs = 64;
    std::size_t hidden = 32;
    std::size_t classes = 10;

    std::size_t parameter_count() const { return hidden * inputs + hidden + classes * hidden + classes; }
    bool operator==(const MlpShape&) const = default;
};

// Xavier-uniform weights, zero biases.
std::vector<double> init_parameters(const MlpShape& shape, std::uint64_t seed);

class MlpObjective final : public Objective {
public:
    MlpObjective(MlpShape shape, const Dataset& data);
    std::size_t dimension() const override { return shape_.parameter_count(); }
    std::size_t sample_count() const override { return data_->size(); }
    double loss_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                             std::vector<double>& grad) const override;

private:
    MlpShape shape_;
    const Dataset* data_;
};

int predict(const MlpShape& shape, std::span<const double> w, std::span<const double> x);
// Top-1 accuracy in [0, 1].
double evaluate(const MlpShape& shape, std::span<const double> w, const Dataset& test);
// Mean cross-entropy over the whole dataset.
double mean_loss(const MlpShape& shape, std::span<const double> w, const Dataset& data);

/// Mean gradient over `batch_size` samples drawn without replacement. The
/// whole dataset in index order when batch_size equals its size.
/// ConfigError for an empty objective or an oversized batch.
std::vector<double> local_gradient(const Objective& objective, std::span<const double> w, std::size_t batch_size,
                                   const RngKey& key);

VoteVector sign_votes(std::span<const double> gradient);

/// Element-wise sign of the vote sum (ties go to +1).
VoteVector ideal_mv(std::span<const VoteVector> votes);

struct RoundRecord {
    std::size_t round = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    std::vector<double> local_losses; // one per device
};

struct TrainState {
    std::vector<double> w;
    double eta = 0.0;
    std::size_t round = 0;
    std::vector<RoundRecord> history;
};

// w <- w - eta * mv; round advanced.
TrainState apply_update(TrainState state, const VoteVector& mv);

enum class DataMode { homogeneous, heterogeneous };

struct LocalDataset {
    Dataset data;
    double distance = 0.0;
    std::vector<int> labels;
};

/// Homogeneous: every label dealt round-robin over all devices.
/// Heterogeneous: devices within r_max/sqrt2 share labels 0-4, the rest
/// share 5-9. The local sets partition the input exactly.
std::vector<LocalDataset> partition_dataset(const Dataset& data, const Deployment& deployment, DataMode mode,
                                            std::uint64_t seed);

/// Learning rate 1/sqrt(||L||_1 n_b) for L = lipschitz * ones(q).
double default_learning_rate(std::size_t parameters, std::size_t batch_size, double lipschitz = 1.0);

/// Constants of the signSGD-MV convergence bound. `n_rounds` counts
/// communication rounds; it is unrelated to the IDFT size.
struct BoundParams {
    std::vector<double> lipschitz; // L, one per coordinate
    std::vector<double> sigma;     // per-coordinate gradient-noise bound
    double f_star = 0.0;
    double gamma = 1.0;
    std::size_t devices = 1;       // K
    double xi = 1.0;               // E_s / ((1 + M_g) noise power)
    double n_rounds = 1.0;
    double initial_loss = 0.0;
};

/// Upper bound on the mean l1 gradient norm after n_rounds rounds:
/// (a sqrt(|L|_1) (F0 - F* + gamma/2) + 2 sqrt(2 gamma)/3 |sigma|_1) / sqrt(N)
/// with a = (1 + 2/(xi K)) / sqrt(gamma). std::domain_error for xi <= 0,
/// K = 0, gamma <= 0 or negative entries.
double convergence_bound(const BoundParams& p);
// The coefficient a above.
double bound_noise_factor(double xi, std::size_t devices, double gamma);

struct DistanceLoss {
    double distance_m = 0.0;
    double loss = 0.0;
};

// Last recorded per-device loss paired with each device's distance.
std::vector<DistanceLoss> loss_by_distance(const TrainState& state, const Deployment& deployment);

} // namespace cscmv
