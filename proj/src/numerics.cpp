// SPDX-License-Identifier: Apache-2.0
//
// uavchan - generative channel modeling for mmWave UAV-to-ground links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "uavchan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavchan {

// ---------------------------------------------------------------- Rng -----

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    state_[0] = splitmix64(seed);
    state_[1] = splitmix64(state_[0]);
    if (state_[0] == 0 && state_[1] == 0)
        state_[1] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Rng::next_u64() {
    // xoroshiro128++
    std::uint64_t s0 = state_[0];
    std::uint64_t s1 = state_[1];
    std::uint64_t result = rotl(s0 + s1, 17) + s0;
    s1 ^= s0;
    state_[0] = rotl(s0, 49) ^ s1 ^ (s1 << 21);
    state_[1] = rotl(s1, 28);
    return result;
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("next_below: n must be positive");
    return next_u64() % n;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

Rng Rng::substream(std::uint64_t index) const {
    std::uint64_t mixed = splitmix64(seed_) ^ splitmix64(index * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    return Rng(mixed);
}

// ------------------------------------------------------- MinMaxScaler -----

MinMaxScaler MinMaxScaler::fit(const std::vector<std::vector<double>>& data,
                               const std::vector<double>* pinned_lower) {
    if (data.empty())
        throw std::invalid_argument("MinMaxScaler::fit: empty data");
    std::size_t dim = data.front().size();
    if (dim == 0)
        throw std::invalid_argument("MinMaxScaler::fit: zero-dimensional data");
    MinMaxScaler s;
    s.lower_ = data.front();
    s.upper_ = data.front();
    for (const auto& row : data) {
        if (row.size() != dim)
            throw std::invalid_argument("MinMaxScaler::fit: inconsistent dimensions");
        for (std::size_t j = 0; j < dim; ++j) {
            s.lower_[j] = std::min(s.lower_[j], row[j]);
            s.upper_[j] = std::max(s.upper_[j], row[j]);
        }
    }
    if (pinned_lower) {
        if (pinned_lower->size() != dim)
            throw std::invalid_argument("MinMaxScaler::fit: pin dimension mismatch");
        for (std::size_t j = 0; j < dim; ++j) {
            s.lower_[j] = (*pinned_lower)[j];
            s.upper_[j] = std::max(s.upper_[j], s.lower_[j]);
        }
    }
    return s;
}

MinMaxScaler MinMaxScaler::from_limits(std::vector<double> lower, std::vector<double> upper) {
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("MinMaxScaler::from_limits: bad limit shapes");
    for (std::size_t j = 0; j < lower.size(); ++j)
        if (upper[j] < lower[j])
            throw std::invalid_argument("MinMaxScaler::from_limits: upper < lower");
    MinMaxScaler s;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

double MinMaxScaler::apply1(int component, double x) const {
    if (!fitted())
        throw std::logic_error("MinMaxScaler: not fitted");
    double lo = lower_[component];
    double hi = upper_[component];
    if (hi == lo)
        return 0.0; // degenerate component
    return (x - lo) / (hi - lo);
}

double MinMaxScaler::invert1(int component, double y) const {
    if (!fitted())
        throw std::logic_error("MinMaxScaler: not fitted");
    double lo = lower_[component];
    double hi = upper_[component];
    return lo + y * (hi - lo);
}

std::vector<double> MinMaxScaler::apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("MinMaxScaler::apply: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = apply1(static_cast<int>(j), x[j]);
    return out;
}

std::vector<double> MinMaxScaler::invert(std::span<const double> y) const {
    if (static_cast<int>(y.size()) != dimension())
        throw std::invalid_argument("MinMaxScaler::invert: dimension mismatch");
    std::vector<double> out(y.size());
    for (std::size_t j = 0; j < y.size(); ++j)
        out[j] = invert1(static_cast<int>(j), y[j]);
    return out;
}

// ------------------------------------------------------------ DenseNet ----

namespace {

// Y = X * W^T + b, with X [B x I] and W [O x I] row-major. The weight matrix
// is transposed into scratch so the hot loop runs axpy-style over contiguous
// memory (vectorizes without FP reassociation).
void linear_forward(const Matrix& X, const std::vector<double>& W, const std::vector<double>& b,
                    int n_in, int n_out, Matrix& Y, std::vector<double>& wt) {
    wt.resize(static_cast<std::size_t>(n_in) * n_out);
    for (int o = 0; o < n_out; ++o)
        for (int i = 0; i < n_in; ++i)
            wt[static_cast<std::size_t>(i) * n_out + o] = W[static_cast<std::size_t>(o) * n_in + i];

    Y = Matrix(X.rows, n_out);
    for (int r = 0; r < X.rows; ++r) {
        double* y = Y.row(r);
        const double* x = X.row(r);
        std::copy(b.begin(), b.end(), y);
        for (int i = 0; i < n_in; ++i) {
            double a = x[i];
            const double* wrow = wt.data() + static_cast<std::size_t>(i) * n_out;
            for (int o = 0; o < n_out; ++o)
                y[o] += a * wrow[o];
        }
    }
}

void relu_in_place(Matrix& m) {
    for (double& x : m.v)
        x = x > 0.0 ? x : 0.0;
}

} // namespace

void softmax_in_place(std::span<double> logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& x : logits) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : logits)
        x /= sum;
}

DenseNet DenseNet::create(std::vector<int> sizes, OutputActivation out_act, Rng& rng) {
    if (sizes.size() < 2)
        throw std::invalid_argument("DenseNet::create: need at least input and output layers");
    for (int s : sizes)
        if (s <= 0)
            throw std::invalid_argument("DenseNet::create: layer sizes must be positive");
    DenseNet net;
    net.layer_sizes = std::move(sizes);
    net.output_activation = out_act;
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        int n_in = net.layer_sizes[l];
        int n_out = net.layer_sizes[l + 1];
        double bound = std::sqrt(1.0 / n_in);
        std::vector<double> w(static_cast<std::size_t>(n_in) * n_out);
        for (double& x : w)
            x = (2.0 * rng.uniform() - 1.0) * bound;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(n_out, 0.0);
    }
    return net;
}

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

Matrix DenseNet::forward_batch(const Matrix& X, ForwardCache& cache) const {
    if (X.cols != input_size())
        throw std::invalid_argument("DenseNet::forward: input width mismatch");
    cache.input = X;
    cache.pre.assign(layer_count(), Matrix{});
    cache.post.assign(layer_count(), Matrix{});

    std::vector<double> scratch;
    const Matrix* current = &X;
    for (int l = 0; l < layer_count(); ++l) {
        int n_in = layer_sizes[l];
        int n_out = layer_sizes[l + 1];
        linear_forward(*current, weights[l], biases[l], n_in, n_out, cache.pre[l], scratch);
        cache.post[l] = cache.pre[l];
        if (l + 1 < layer_count()) {
            relu_in_place(cache.post[l]);
        } else if (output_activation == OutputActivation::Softmax) {
            for (int r = 0; r < cache.post[l].rows; ++r)
                softmax_in_place(std::span<double>(cache.post[l].row(r), n_out));
        }
        current = &cache.post[l];
    }
    return cache.post.back();
}

Matrix DenseNet::forward_batch(const Matrix& X) const {
    ForwardCache cache;
    return forward_batch(X, cache);
}

std::vector<double> DenseNet::forward(std::span<const double> input) const {
    Matrix X(1, static_cast<int>(input.size()));
    std::copy(input.begin(), input.end(), X.v.begin());
    Matrix Y = forward_batch(X);
    return Y.v;
}

DenseNet::Gradients DenseNet::zero_gradients() const {
    Gradients g;
    for (int l = 0; l < layer_count(); ++l) {
        g.dweights.emplace_back(weights[l].size(), 0.0);
        g.dbiases.emplace_back(biases[l].size(), 0.0);
    }
    return g;
}

void DenseNet::Gradients::scale(double s) {
    for (auto& blk : dweights)
        for (double& x : blk)
            x *= s;
    for (auto& blk : dbiases)
        for (double& x : blk)
            x *= s;
}

void DenseNet::Gradients::accumulate(const Gradients& other) {
    for (std::size_t l = 0; l < dweights.size(); ++l) {
        for (std::size_t j = 0; j < dweights[l].size(); ++j)
            dweights[l][j] += other.dweights[l][j];
        for (std::size_t j = 0; j < dbiases[l].size(); ++j)
            dbiases[l][j] += other.dbiases[l][j];
    }
}

DenseNet::Gradients DenseNet::backward(const ForwardCache& cache, const Matrix& loss_grad,
                                       Matrix* d_input) const {
    int last = layer_count() - 1;
    if (loss_grad.cols != layer_sizes.back() || loss_grad.rows != cache.input.rows)
        throw std::invalid_argument("DenseNet::backward: loss gradient shape mismatch");

    Gradients grads = zero_gradients();

    // Delta at the last pre-activation.
    Matrix delta(loss_grad.rows, loss_grad.cols);
    if (output_activation == OutputActivation::Softmax) {
        const Matrix& probs = cache.post[last];
        for (int r = 0; r < loss_grad.rows; ++r) {
            const double* g = loss_grad.row(r);
            const double* p = probs.row(r);
            double gp = 0.0;
            for (int j = 0; j < loss_grad.cols; ++j)
                gp += g[j] * p[j];
            double* d = delta.row(r);
            for (int j = 0; j < loss_grad.cols; ++j)
                d[j] = p[j] * (g[j] - gp);
        }
    } else {
        delta = loss_grad;
    }

    for (int l = last; l >= 0; --l) {
        int n_in = layer_sizes[l];
        int n_out = layer_sizes[l + 1];
        const Matrix& act_in = (l == 0) ? cache.input : cache.post[l - 1];

        // Parameter gradients, summed over the batch.
        std::vector<double>& dW = grads.dweights[l];
        std::vector<double>& db = grads.dbiases[l];
        for (int r = 0; r < delta.rows; ++r) {
            const double* d = delta.row(r);
            const double* a = act_in.row(r);
            for (int o = 0; o < n_out; ++o) {
                double dv = d[o];
                db[o] += dv;
                double* dwrow = dW.data() + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i)
                    dwrow[i] += dv * a[i];
            }
        }

        if (l == 0 && !d_input)
            break;

        // Gradient w.r.t. the layer input.
        Matrix dprev(delta.rows, n_in);
        for (int r = 0; r < delta.rows; ++r) {
            const double* d = delta.row(r);
            double* dp = dprev.row(r);
            for (int o = 0; o < n_out; ++o) {
                double dv = d[o];
                const double* wrow = weights[l].data() + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i)
                    dp[i] += dv * wrow[i];
            }
        }

        if (l == 0) {
            *d_input = std::move(dprev);
            break;
        }

        // Through the hidden ReLU.
        const Matrix& pre_prev = cache.pre[l - 1];
        for (std::size_t j = 0; j < dprev.v.size(); ++j)
            if (pre_prev.v[j] <= 0.0)
                dprev.v[j] = 0.0;
        delta = std::move(dprev);
    }
    return grads;
}

std::vector<std::span<double>> parameter_blocks(DenseNet& net) {
    std::vector<std::span<double>> blocks;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        blocks.emplace_back(net.weights[l]);
        blocks.emplace_back(net.biases[l]);
    }
    return blocks;
}

std::vector<std::span<const double>> parameter_blocks(const DenseNet& net) {
    std::vector<std::span<const double>> blocks;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        blocks.emplace_back(net.weights[l]);
        blocks.emplace_back(net.biases[l]);
    }
    return blocks;
}

std::vector<std::span<double>> gradient_blocks(DenseNet::Gradients& g) {
    std::vector<std::span<double>> blocks;
    for (std::size_t l = 0; l < g.dweights.size(); ++l) {
        blocks.emplace_back(g.dweights[l]);
        blocks.emplace_back(g.dbiases[l]);
    }
    return blocks;
}

std::vector<std::span<const double>> gradient_blocks(const DenseNet::Gradients& g) {
    std::vector<std::span<const double>> blocks;
    for (std::size_t l = 0; l < g.dweights.size(); ++l) {
        blocks.emplace_back(g.dweights[l]);
        blocks.emplace_back(g.dbiases[l]);
    }
    return blocks;
}

// ---------------------------------------------------------------- Adam ----

AdamState AdamState::make(double lr, const std::vector<std::span<const double>>& params) {
    AdamState s;
    s.learning_rate = lr;
    for (const auto& blk : params) {
        s.m.emplace_back(blk.size(), 0.0);
        s.v.emplace_back(blk.size(), 0.0);
    }
    return s;
}

void AdamState::update(const std::vector<std::span<double>>& params,
                       const std::vector<std::span<const double>>& grads) {
    if (params.size() != m.size() || grads.size() != m.size())
        throw std::invalid_argument("AdamState::update: block count mismatch");
    ++step;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = grads[b];
        if (p.size() != m[b].size() || g.size() != m[b].size())
            throw std::invalid_argument("AdamState::update: block shape mismatch");
        double* mb = m[b].data();
        double* vb = v[b].data();
        for (std::size_t j = 0; j < p.size(); ++j) {
            mb[j] = beta1 * mb[j] + (1.0 - beta1) * g[j];
            vb[j] = beta2 * vb[j] + (1.0 - beta2) * g[j] * g[j];
            double mhat = mb[j] / bc1;
            double vhat = vb[j] / bc2;
            p[j] -= learning_rate * mhat / (std::sqrt(vhat) + epsilon);
        }
    }
}

double cross_entropy(std::span<const double> probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size()))
        throw std::invalid_argument("cross_entropy: label out of range");
    double p = std::max(probs[label], 1e-12);
    return -std::log(p);
}

} // namespace uavchan
