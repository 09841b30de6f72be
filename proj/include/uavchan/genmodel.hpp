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

#ifndef UAVCHAN_GENMODEL_HPP
#define UAVCHAN_GENMODEL_HPP

#include <string>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/linkstate.hpp"
#include "uavchan/pathcodec.hpp"
#include "uavchan/pathvae.hpp"

namespace uavchan {

// Composition of both stages into x = g(u, z), plus persistence.

constexpr const char* kModelFormat = "uavchan-model";
constexpr int kModelFormatVersion = 1;

struct GenerativeModel {
    LinkStateModel link_state;
    VaeModel vae;
    CodecScalers codec;
    double absent_eps = 0.01;
    double carrier_hz = kDefaultCarrierHz;
    std::string env_id;

    bool trained() const { return link_state.trained() && vae.trained() && codec.fitted(); }
};

// Latent randomness consumed by one link: a uniform state-sampling scalar, a
// 20-dim Gaussian VAE latent, and a 120-dim Gaussian output-noise vector.
struct LatentDraw {
    double z_state = 0.0;
    std::array<double, kLatentDim> z_nlos{};
    std::array<double, kPathVectorDim> z_out{};

    static LatentDraw from_rng(Rng& rng);
};

struct GenerativeTrainConfig {
    LinkStateTrainConfig link_state;
    VaeTrainConfig vae;
};

// Fits codec scalers, trains both stages, and composes the model.
GenerativeModel train_generative_model(const Dataset& train, const GenerativeTrainConfig& cfg,
                                       TrainCurve* link_state_curve = nullptr,
                                       TrainCurve* vae_curve = nullptr);

// Pure function of (model, u, draw). For a LOS draw, path 0 is exactly the
// geometric LOS path (Friis loss, d3D/c delay).
PathSet generate_link(const GenerativeModel& model, const LinkCondition& u,
                      const LatentDraw& draw);

// One independent, index-keyed latent draw per condition; output order
// matches input order. Same seed reproduces the batch exactly.
std::vector<PathSet> generate_batch(const GenerativeModel& model,
                                    const std::vector<LinkCondition>& conditions,
                                    std::uint64_t seed);

// Versioned JSON persistence. load(save(m)) reproduces generation bit for
// bit given equal draws; malformed files and unknown versions are refused.
void save_model(const GenerativeModel& model, const std::string& path);
GenerativeModel load_model(const std::string& path);

} // namespace uavchan

#endif // UAVCHAN_GENMODEL_HPP
