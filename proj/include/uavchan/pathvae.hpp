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

#ifndef UAVCHAN_PATHVAE_HPP
#define UAVCHAN_PATHVAE_HPP

#include <array>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/numerics.hpp"
#include "uavchan/pathcodec.hpp"

namespace uavchan {

// Second generative stage: conditional VAE over the normalized path vector.

constexpr int kPathConditionDim = 5;
constexpr int kLatentDim = 20;
constexpr double kLogVarClampLo = -10.0;
constexpr double kLogVarClampHi = 3.0;

// Pre-scale condition: [c_one, d3D, 10*log10(d3D), dz, s] with s = 1 for
// LOS, 0 for NLOS. NoLink links never reach this stage.
std::array<double, kPathConditionDim> path_condition_prescale(const LinkCondition& u,
                                                              LinkState s);

struct VaeModel {
    DenseNet encoder;          // 125 -> 200 -> 80 -> 40 (20 means + 20 log-variances)
    DenseNet decoder;          // 25 -> 80 -> 200 -> 240 (120 means + 120 log-variances)
    MinMaxScaler cond_scaler;  // over the 5 pre-scale condition components
    int latent_dim = kLatentDim;

    bool trained() const { return cond_scaler.fitted() && !decoder.weights.empty(); }
};

// Applies the fitted condition scaler to the pre-scale vector.
std::vector<double> transform_path_condition(const VaeModel& model, const LinkCondition& u,
                                             LinkState s);

struct GaussianParams {
    std::vector<double> mu;
    std::vector<double> logvar;
};

// Encoder forward: splits the 40 outputs into latent means/log-variances.
GaussianParams encode(const VaeModel& model, std::span<const double> v_path,
                      std::span<const double> y);

// z = mu + exp(logvar/2) .* eps
std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> logvar,
                                   std::span<const double> eps);

// Decoder forward: splits the 240 outputs into output means/log-variances;
// log-variances are clamped to [-10, 3].
GaussianParams decode(const VaeModel& model, std::span<const double> v_path,
                      std::span<const double> z);

// y = mu_y + exp(logvar_y/2) .* z_out with (mu_y, logvar_y) = decode(v, z_nlos).
PathVector sample_y(const VaeModel& model, std::span<const double> v_path,
                    std::span<const double> z_nlos, std::span<const double> z_out);

// Negative ELBO for one data point at latent sample z = mu_z + sigma_z.*eps:
//   0.5 * sum_j [ (y_j - mu_y_j)^2 * exp(-logvar_y_j) + logvar_y_j + log(2*pi) ]
// + 0.5 * sum_i [ mu_z_i^2 + exp(logvar_z_i) - logvar_z_i - 1 ]
double elbo_loss(const VaeModel& model, std::span<const double> v_path,
                 std::span<const double> y, std::span<const double> eps);

struct VaeTrainConfig {
    int epochs = 10000; // sized for very large datasets; typical runs override
    int batch_size = 100;
    double learning_rate = 1e-4;
    std::uint64_t seed = 1;
};

// Jointly trains encoder and decoder with Adam on the mean negative ELBO over
// all non-NoLink training links. Codec scalers must already be fitted; the
// condition scaler is fitted here on the eligible training conditions.
VaeModel train_vae(const Dataset& train, const CodecScalers& codec, const VaeTrainConfig& cfg,
                   TrainCurve* curve = nullptr);

// Loss and parameter gradients of the single-point negative ELBO through the
// reparameterization; the route the training loop takes, exposed so tests can
// check it against finite differences.
struct VaeGradients {
    double loss = 0.0;
    DenseNet::Gradients encoder;
    DenseNet::Gradients decoder;
};
VaeGradients vae_elbo_gradients(const VaeModel& model, std::span<const double> v_path,
                                std::span<const double> y, std::span<const double> eps);

} // namespace uavchan

#endif // UAVCHAN_PATHVAE_HPP
