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

#ifndef UAVCHAN_LINKSTATE_HPP
#define UAVCHAN_LINKSTATE_HPP

#include <array>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/numerics.hpp"

namespace uavchan {

// First generative stage: classify the link state from the condition and
// sample it with one uniform draw.

constexpr int kStateConditionDim = 5; // 3C-1 with C = 2 gNB types

// Pre-scale condition transform:
//   [c_one, d3D*1{Standard}, dz*1{Standard}, d3D*1{Dedicated}, dz*1{Dedicated}]
// with c_one = 0 for Standard, 1 for Dedicated. The per-type slots let the
// first NN layer behave differently per gNB type.
std::array<double, kStateConditionDim> transform_state_condition(const LinkCondition& u);

struct LinkStateModel {
    DenseNet classifier;  // 5 -> 25 -> 10 -> 3, softmax head
    MinMaxScaler scaler;  // over the 5 pre-scale components

    bool trained() const { return scaler.fitted() && !classifier.weights.empty(); }
};

struct LinkStateTrainConfig {
    int epochs = 50;
    int batch_size = 100;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
};

// Fits the scaler on the training transforms, then trains the classifier
// with Adam on cross entropy. Labels come from derive_link_state on the
// stored paths, never from a separate column.
LinkStateModel train_link_state(const Dataset& train, const LinkStateTrainConfig& cfg,
                                TrainCurve* curve = nullptr);

// Probability 3-vector in the fixed order (LOS, NLOS, NoLink).
std::array<double, 3> predict_state_probs(const LinkStateModel& model, const LinkCondition& u);

// Inverse-CDF sampling over the fixed order; intervals are left-closed,
// right-open, so the map is total on z in [0, 1].
LinkState sample_state(const std::array<double, 3>& probs, double z_state);

struct PlosBin {
    double d2d_center_m = 0.0;
    long n_links = 0;
    long n_los = 0;
    double p_los = 0.0;
    bool empty = true;
};

struct PlosCurve {
    double bin_width_m = 0.0;
    std::vector<PlosBin> standard;
    std::vector<PlosBin> dedicated;
};

// Per-bin LOS fraction over horizontal distance, split by gNB type. Empty
// bins are flagged and carry no estimate.
PlosCurve empirical_plos_curve(const Dataset& data, double bin_width_m);

} // namespace uavchan

#endif // UAVCHAN_LINKSTATE_HPP
