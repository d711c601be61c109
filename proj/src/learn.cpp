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

#include "cscmv/learn.hpp"
#include "cscmv/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace cscmv {

void Dataset::push_back(std::span<const double> features_row, int label) {
    if (features == 0 && y.empty()) features = features_row.size();
    if (features_row.size() != features) throw FramingError("dataset row has the wrong width");
    x.insert(x.end(), features_row.begin(), features_row.end());
    y.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features = features;
    out.x.reserve(indices.size() * features);
    out.y.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(row(i), y.at(i));
    return out;
}

namespace {

// 5x7 glyphs, one string of 35 cells per digit, row by row.
constexpr std::array<const char*, 10> kGlyphs = {
    "01110100011001110101110011000101110", "00100011000010000100001000010001110",
    "01110100010000100010001000100011111", "11111000100010000010000011000101110",
    "00010001100101010010111110001000010", "11111100001111000001000011000101110",
    "00110010001000011110100011000101110", "11111000010001000100010000100001000",
    "01110100011000101110100011000101110", "01110100011000101111000010001001100",
};

constexpr std::size_t kSide = 8;

} // namespace

Dataset synthetic_digits(std::size_t count, std::uint64_t seed, std::uint64_t first_index) {
    Dataset out;
    out.features = kSide * kSide;
    out.x.reserve(count * out.features);
    out.y.reserve(count);
    std::vector<double> img(kSide * kSide);
    for (std::size_t n = 0; n < count; ++n) {
        const int label = static_cast<int>(n % 10);
        auto rng = make_rng(RngKey{seed, 0, 0, DrawKind::dataset, first_index + n});
        // one pixel of jitter around the centered glyph
        std::uniform_int_distribution<int> dx(1, 2);
        std::uniform_int_distribution<int> dy(0, 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, 0.15);
        const int ox = dx(rng);
        const int oy = dy(rng);
        const double ink = 0.6 + 0.4 * unit(rng);
        std::fill(img.begin(), img.end(), 0.0);
        for (int r = 0; r < 7; ++r)
            for (int c = 0; c < 5; ++c)
                if (kGlyphs[static_cast<std::size_t>(label)][r * 5 + c] == '1' && unit(rng) >= 0.05)
                    img[static_cast<std::size_t>((oy + r) * static_cast<int>(kSide) + ox + c)] = ink;
        for (auto& v : img) {
            if (unit(rng) < 0.02) v = ink;
            v += noise(rng);
        }
        out.push_back(img, label);
    }
    return out;
}

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct IdxArray {
    std::vector<std::size_t> dims;
    std::size_t offset = 0;
};

IdxArray parse_idx_header(const std::vector<unsigned char>& bytes, unsigned expected_dims, const std::string& path) {
    if (bytes.size() < 4 || bytes[0] != 0 || bytes[1] != 0 || bytes[2] != 0x08 || bytes[3] != expected_dims)
        throw ConfigError(path + ": not an unsigned-byte IDX file with " + std::to_string(expected_dims) + " dims");
    IdxArray a;
    a.offset = 4 + 4 * static_cast<std::size_t>(expected_dims);
    if (bytes.size() < a.offset) throw ConfigError(path + ": truncated IDX header");
    std::size_t total = 1;
    for (unsigned d = 0; d < expected_dims; ++d) {
        std::size_t v = 0;
        for (int b = 0; b < 4; ++b) v = (v << 8) | bytes[4 + 4 * d + static_cast<unsigned>(b)];
        a.dims.push_back(v);
        total *= v;
    }
    if (bytes.size() != a.offset + total) throw ConfigError(path + ": IDX payload size does not match its header");
    return a;
}

} // namespace

Dataset read_idx(const std::string& images_path, const std::string& labels_path) {
    const auto images = read_file(images_path);
    const auto labels = read_file(labels_path);
    const IdxArray ih = parse_idx_header(images, 3, images_path);
    const IdxArray lh = parse_idx_header(labels, 1, labels_path);
    if (ih.dims[0] != lh.dims[0]) throw ConfigError("IDX image and label counts differ");
    Dataset out;
    out.features = ih.dims[1] * ih.dims[2];
    std::vector<double> row(out.features);
    for (std::size_t n = 0; n < ih.dims[0]; ++n) {
        for (std::size_t p = 0; p < out.features; ++p) row[p] = images[ih.offset + n * out.features + p] / 255.0;
        const int label = labels[lh.offset + n];
        if (label > 9) throw ConfigError("IDX label outside 0..9");
        out.push_back(row, label);
    }
    return out;
}

Dataset downsample_images(const Dataset& data, std::size_t side_in, std::size_t side_out) {
    if (side_in * side_in != data.features || side_out == 0 || side_out > side_in)
        throw ConfigError("downsample: image side does not match the dataset");
    Dataset out;
    out.features = side_out * side_out;
    std::vector<double> row(out.features);
    std::vector<double> weight(out.features);
    for (std::size_t n = 0; n < data.size(); ++n) {
        std::fill(row.begin(), row.end(), 0.0);
        std::fill(weight.begin(), weight.end(), 0.0);
        const auto src = data.row(n);
        for (std::size_t r = 0; r < side_in; ++r)
            for (std::size_t c = 0; c < side_in; ++c) {
                const std::size_t o = (r * side_out / side_in) * side_out + c * side_out / side_in;
                row[o] += src[r * side_in + c];
                weight[o] += 1.0;
            }
        for (std::size_t o = 0; o < out.features; ++o) row[o] /= weight[o];
        out.push_back(row, data.y[n]);
    }
    return out;
}

double Objective::loss(std::span<const double> w, std::span<const std::size_t> batch) const {
    std::vector<double> scratch;
    return loss_and_gradient(w, batch, scratch);
}

QuadraticObjective::QuadraticObjective(std::vector<double> optimum, std::size_t samples)
    : optimum_(std::move(optimum)), samples_(samples) {}

double QuadraticObjective::loss_and_gradient(std::span<const double> w, std::span<const std::size_t>,
                                             std::vector<double>& grad) const {
    if (w.size() != optimum_.size()) throw FramingError("quadratic objective: dimension mismatch");
    grad.resize(w.size());
    double l = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        grad[i] = w[i] - optimum_[i];
        l += 0.5 * grad[i] * grad[i];
    }
    return l;
}

std::vector<double> init_parameters(const MlpShape& shape, std::uint64_t seed) {
    std::vector<double> w(shape.parameter_count(), 0.0);
    auto rng = make_rng(RngKey{seed, 0, 0, DrawKind::model_init, 0});
    const double a1 = std::sqrt(6.0 / static_cast<double>(shape.inputs + shape.hidden));
    const double a2 = std::sqrt(6.0 / static_cast<double>(shape.hidden + shape.classes));
    std::uniform_real_distribution<double> u1(-a1, a1);
    std::uniform_real_distribution<double> u2(-a2, a2);
    const std::size_t w1 = shape.hidden * shape.inputs;
    const std::size_t w2 = w1 + shape.hidden;
    for (std::size_t i = 0; i < w1; ++i) w[i] = u1(rng);
    for (std::size_t i = 0; i < shape.classes * shape.hidden; ++i) w[w2 + i] = u2(rng);
    return w;
}

namespace {

struct MlpView {
    const double* w1;
    const double* b1;
    const double* w2;
    const double* b2;
};

MlpView view(const MlpShape& s, std::span<const double> w) {
    if (w.size() != s.parameter_count()) throw FramingError("parameter vector does not match the MLP shape");
    const double* p = w.data();
    return {p, p + s.hidden * s.inputs, p + s.hidden * s.inputs + s.hidden,
            p + s.hidden * s.inputs + s.hidden + s.classes * s.hidden};
}

// Hidden activations and softmax probabilities; returns -log p[label].
double forward(const MlpShape& s, const MlpView& v, std::span<const double> x, int label, std::vector<double>& h,
               std::vector<double>& p) {
    h.resize(s.hidden);
    p.resize(s.classes);
    for (std::size_t j = 0; j < s.hidden; ++j) {
        double a = v.b1[j];
        const double* row = v.w1 + j * s.inputs;
        for (std::size_t i = 0; i < s.inputs; ++i) a += row[i] * x[i];
        h[j] = std::tanh(a);
    }
    double zmax = -INFINITY;
    for (std::size_t c = 0; c < s.classes; ++c) {
        double z = v.b2[c];
        const double* row = v.w2 + c * s.hidden;
        for (std::size_t j = 0; j < s.hidden; ++j) z += row[j] * h[j];
        p[c] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0.0;
    for (auto& z : p) sum += (z = std::exp(z - zmax));
    for (auto& z : p) z /= sum;
    if (label < 0) return 0.0;
    return -std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
}

} // namespace

MlpObjective::MlpObjective(MlpShape shape, const Dataset& data) : shape_(shape), data_(&data) {
    if (data.size() > 0 && data.features != shape.inputs) throw ConfigError("dataset width does not match the MLP");
}

double MlpObjective::loss_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                                       std::vector<double>& grad) const {
    const MlpShape& s = shape_;
    const MlpView v = view(s, w);
    grad.assign(w.size(), 0.0);
    double* g1 = grad.data();
    double* gb1 = g1 + s.hidden * s.inputs;
    double* g2 = gb1 + s.hidden;
    double* gb2 = g2 + s.classes * s.hidden;
    std::vector<double> h;
    std::vector<double> p;
    std::vector<double> dh(s.hidden);
    double total = 0.0;
    for (std::size_t n : batch) {
        const auto x = data_->row(n);
        const int y = data_->y[n];
        total += forward(s, v, x, y, h, p);
        p[static_cast<std::size_t>(y)] -= 1.0; // dL/dz
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t c = 0; c < s.classes; ++c) {
            gb2[c] += p[c];
            const double* row = v.w2 + c * s.hidden;
            double* grow = g2 + c * s.hidden;
            for (std::size_t j = 0; j < s.hidden; ++j) {
                grow[j] += p[c] * h[j];
                dh[j] += p[c] * row[j];
            }
        }
        for (std::size_t j = 0; j < s.hidden; ++j) {
            const double da = dh[j] * (1.0 - h[j] * h[j]);
            gb1[j] += da;
            double* grow = g1 + j * s.inputs;
            for (std::size_t i = 0; i < s.inputs; ++i) grow[i] += da * x[i];
        }
    }
    const double scale = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (auto& g : grad) g *= scale;
    return total * scale;
}

int predict(const MlpShape& shape, std::span<const double> w, std::span<const double> x) {
    std::vector<double> h;
    std::vector<double> p;
    forward(shape, view(shape, w), x, -1, h, p);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double evaluate(const MlpShape& shape, std::span<const double> w, const Dataset& test) {
    if (test.size() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t n = 0; n < test.size(); ++n) hits += predict(shape, w, test.row(n)) == test.y[n];
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double mean_loss(const MlpShape& shape, std::span<const double> w, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    const MlpView v = view(shape, w);
    std::vector<double> h;
    std::vector<double> p;
    double total = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) total += forward(shape, v, data.row(n), data.y[n], h, p);
    return total / static_cast<double>(data.size());
}

std::vector<double> local_gradient(const Objective& objective, std::span<const double> w, std::size_t batch_size,
                                   const RngKey& key) {
    const std::size_t n = objective.sample_count();
    if (n == 0) throw ConfigError("local dataset is empty");
    if (batch_size == 0 || batch_size > n) throw ConfigError("batch size must lie in [1, local dataset size]");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (batch_size < n) {
        auto rng = make_rng(key);
        for (std::size_t i = 0; i < batch_size; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(batch_size);
    }
    std::vector<double> grad;
    objective.loss_and_gradient(w, idx, grad);
    return grad;
}

VoteVector sign_votes(std::span<const double> gradient) {
    VoteVector v(gradient.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = sign_of(gradient[i]);
    return v;
}

VoteVector ideal_mv(std::span<const VoteVector> votes) {
    if (votes.empty()) throw std::invalid_argument("majority vote over zero devices");
    const std::size_t q = votes.front().size();
    std::vector<long> sum(q, 0);
    for (const auto& v : votes) {
        if (v.size() != q) throw FramingError("vote vectors differ in length");
        for (std::size_t i = 0; i < q; ++i) sum[i] += v[i];
    }
    VoteVector mv(q);
    for (std::size_t i = 0; i < q; ++i) mv[i] = sum[i] < 0 ? -1 : 1;
    return mv;
}

TrainState apply_update(TrainState state, const VoteVector& mv) {
    if (mv.size() != state.w.size()) throw FramingError("majority vote length does not match the model");
    for (std::size_t i = 0; i < mv.size(); ++i) state.w[i] -= state.eta * mv[i];
    ++state.round;
    return state;
}

std::vector<LocalDataset> partition_dataset(const Dataset& data, const Deployment& deployment, DataMode mode,
                                            std::uint64_t seed) {
    const std::size_t k = deployment.size();
    if (k == 0) throw ConfigError("no devices to partition over");
    if (data.size() < k) throw ConfigError("fewer samples than devices");
    std::array<std::vector<std::size_t>, 10> by_label;
    for (std::size_t n = 0; n < data.size(); ++n) {
        if (data.y[n] < 0 || data.y[n] > 9) throw ConfigError("labels must lie in 0..9");
        by_label[static_cast<std::size_t>(data.y[n])].push_back(n);
    }
    for (std::size_t l = 0; l < 10; ++l) {
        auto rng = make_rng(RngKey{seed, 0, l, DrawKind::dataset, 1});
        std::shuffle(by_label[l].begin(), by_label[l].end(), rng);
    }

    std::vector<std::vector<std::size_t>> members(k);
    std::vector<LocalDataset> out(k);
    auto deal = [&](const std::vector<std::size_t>& devices, int first_label, int last_label) {
        if (devices.empty()) throw ConfigError("a label group has no devices to hold it");
        std::size_t turn = 0;
        for (int l = first_label; l <= last_label; ++l)
            for (std::size_t n : by_label[static_cast<std::size_t>(l)]) members[devices[turn++ % devices.size()]].push_back(n);
        for (std::size_t d : devices) {
            out[d].labels.resize(static_cast<std::size_t>(last_label - first_label + 1));
            std::iota(out[d].labels.begin(), out[d].labels.end(), first_label);
        }
    };
    if (mode == DataMode::homogeneous) {
        std::vector<std::size_t> all(k);
        std::iota(all.begin(), all.end(), std::size_t{0});
        deal(all, 0, 9);
    } else {
        const double boundary = deployment.r_max / std::sqrt(2.0);
        std::vector<std::size_t> inner;
        std::vector<std::size_t> outer;
        for (std::size_t d = 0; d < k; ++d) (deployment.distances[d] <= boundary ? inner : outer).push_back(d);
        deal(inner, 0, 4);
        deal(outer, 5, 9);
    }
    for (std::size_t d = 0; d < k; ++d) {
        std::sort(members[d].begin(), members[d].end());
        if (members[d].empty()) throw ConfigError("a device received no samples");
        out[d].data = data.subset(members[d]);
        out[d].distance = deployment.distances[d];
    }
    return out;
}

double default_learning_rate(std::size_t parameters, std::size_t batch_size, double lipschitz) {
    if (parameters == 0 || batch_size == 0 || !(lipschitz > 0.0)) throw ConfigError("learning-rate inputs must be positive");
    return 1.0 / std::sqrt(lipschitz * static_cast<double>(parameters) * static_cast<double>(batch_size));
}

double bound_noise_factor(double xi, std::size_t devices, double gamma) {
    if (!(xi > 0.0)) throw std::domain_error("effective SNR must be positive");
    if (devices == 0) throw std::domain_error("bound needs at least one device");
    if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
    return (1.0 + 2.0 / (xi * static_cast<double>(devices))) / std::sqrt(gamma);
}

double convergence_bound(const BoundParams& p) {
    const double a = bound_noise_factor(p.xi, p.devices, p.gamma);
    if (!(p.n_rounds > 0.0)) throw std::domain_error("round count must be positive");
    double l1 = 0.0;
    for (double v : p.lipschitz) {
        if (!(v >= 0.0)) throw std::domain_error("smoothness constants must be non-negative");
        l1 += v;
    }
    double s1 = 0.0;
    for (double v : p.sigma) {
        if (!(v >= 0.0)) throw std::domain_error("variance bounds must be non-negative");
        s1 += v;
    }
    const double first = a * std::sqrt(l1) * (p.initial_loss - p.f_star + p.gamma / 2.0);
    const double second = 2.0 * std::sqrt(2.0 * p.gamma) / 3.0 * s1;
    return (first + second) / std::sqrt(p.n_rounds);
}

std::vector<DistanceLoss> loss_by_distance(const TrainState& state, const Deployment& deployment) {
    std::vector<DistanceLoss> out;
    if (state.history.empty()) return out;
    const auto& losses = state.history.back().local_losses;
    if (losses.size() != deployment.size()) throw FramingError("history and deployment disagree on device count");
    for (std::size_t k = 0; k < losses.size(); ++k) out.push_back({deployment.distances[k], losses[k]});
    return out;
}

} // namespace cscmv
