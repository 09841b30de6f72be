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

#ifndef UAVCHAN_NUMERICS_HPP
#define UAVCHAN_NUMERICS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace uavchan {

// Deterministic random stream: identical seeds produce identical draws on
// every platform (xoroshiro128++ core plus explicit output transforms; no
// reliance on implementation-defined std distributions).
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    std::uint64_t next_below(std::uint64_t n); // uniform in [0, n)
    double uniform();                          // uniform in [0, 1)
    double normal();                           // standard normal (Box-Muller)

    // Independent stream keyed by (seed, index); used for per-link draws so
    // batch generation is order-independent and reproducible.
    Rng substream(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t state_[2]; // mt19937_64 is heavyweight; use xoshiro-style core
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Dense row-major matrix of doubles, rows = samples for batched NN math.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// Componentwise min-max scaler. Limits map to [0, 1]; out-of-range inputs
// extrapolate linearly. Degenerate components (upper == lower) map to 0 and
// invert back to the pinned value.
class MinMaxScaler {
  public:
    MinMaxScaler() = default;

    // Limits are componentwise min/max of the data; components listed in
    // pinned_lower use the pin as the lower limit instead.
    static MinMaxScaler fit(const std::vector<std::vector<double>>& data,
                            const std::vector<double>* pinned_lower = nullptr);
    static MinMaxScaler from_limits(std::vector<double> lower, std::vector<double> upper);

    bool fitted() const { return !lower_.empty(); }
    int dimension() const { return static_cast<int>(lower_.size()); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> invert(std::span<const double> y) const;
    double apply1(int component, double x) const;
    double invert1(int component, double y) const;

  private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

enum class OutputActivation { Linear, Softmax };

// Fully connected network with ReLU hidden layers. Weights are row-major
// [n_out x n_in] per layer, biases one vector per layer.
struct DenseNet {
    std::vector<int> layer_sizes;
    OutputActivation output_activation = OutputActivation::Linear;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    // Fan-in scaled uniform initialization, seed-deterministic. Biases zero.
    static DenseNet create(std::vector<int> sizes, OutputActivation out_act, Rng& rng);

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
    std::size_t parameter_count() const;

    std::vector<double> forward(std::span<const double> input) const;

    // Batched forward; X is [batch x input_size], result [batch x output_size].
    Matrix forward_batch(const Matrix& X) const;

    struct ForwardCache {
        Matrix input;
        std::vector<Matrix> pre;  // pre-activation per layer
        std::vector<Matrix> post; // post-activation per layer
    };
    Matrix forward_batch(const Matrix& X, ForwardCache& cache) const;

    struct Gradients {
        std::vector<std::vector<double>> dweights;
        std::vector<std::vector<double>> dbiases;

        void scale(double s);
        void accumulate(const Gradients& other);
    };
    Gradients zero_gradients() const;

    // Backpropagates dL/d(output) through the cached forward pass. For a
    // Softmax head, loss_grad is dL/d(probabilities). The summed (not
    // averaged) gradient over the batch is returned; d_input, when non-null,
    // receives dL/d(input) per sample.
    Gradients backward(const ForwardCache& cache, const Matrix& loss_grad,
                       Matrix* d_input = nullptr) const;
};

// Standard Adam with bias correction over an arbitrary list of parameter
// blocks. Single-writer: one state per set of trained parameters.
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    static AdamState make(double lr, const std::vector<std::span<const double>>& params);
    void update(const std::vector<std::span<double>>& params,
                const std::vector<std::span<const double>>& grads);
};

// Convenience views over a DenseNet's parameters (weights then biases, layer
// by layer), matching the block order used by AdamState.
std::vector<std::span<double>> parameter_blocks(DenseNet& net);
std::vector<std::span<const double>> parameter_blocks(const DenseNet& net);
std::vector<std::span<double>> gradient_blocks(DenseNet::Gradients& g);
std::vector<std::span<const double>> gradient_blocks(const DenseNet::Gradients& g);

// -log(probs[label]) with a 1e-12 floor on the probability.
double cross_entropy(std::span<const double> probs, int label);

// Mean loss per epoch, recorded by the training loops.
struct TrainCurve {
    std::vector<double> epoch_loss;
};

// Numerically stable softmax (max-shifted), in place.
void softmax_in_place(std::span<double> logits);

} // namespace uavchan

#endif // UAVCHAN_NUMERICS_HPP
