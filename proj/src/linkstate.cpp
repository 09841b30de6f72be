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

#include "uavchan/linkstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavchan {

std::array<double, kStateConditionDim> transform_state_condition(const LinkCondition& u) {
    double d3d = u.d3d();
    if (d3d <= 0.0)
        throw std::invalid_argument("transform_state_condition: zero displacement");
    double c_one = (u.gnb_type == GnbType::Dedicated) ? 1.0 : 0.0;
    std::array<double, kStateConditionDim> out{c_one, 0.0, 0.0, 0.0, 0.0};
    if (u.gnb_type == GnbType::Standard) {
        out[1] = d3d;
        out[2] = u.dz_m;
    } else {
        out[3] = d3d;
        out[4] = u.dz_m;
    }
    return out;
}

namespace {

int state_label(LinkState s) {
    switch (s) {
    case LinkState::Los:
        return 0;
    case LinkState::Nlos:
        return 1;
    default:
        return 2;
    }
}

} // namespace

LinkStateModel train_link_state(const Dataset& train, const LinkStateTrainConfig& cfg,
                                TrainCurve* curve) {
    if (train.records.empty())
        throw std::invalid_argument("train_link_state: empty dataset");
    if (cfg.epochs <= 0 || cfg.batch_size <= 0)
        throw std::invalid_argument("train_link_state: bad epochs/batch size");

    const std::size_t n = train.records.size();
    std::vector<std::vector<double>> prescale(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto t = transform_state_condition(train.records[i].condition);
        prescale[i].assign(t.begin(), t.end());
        labels[i] = state_label(derive_link_state(train.records[i].paths));
    }

    LinkStateModel model;
    model.scaler = MinMaxScaler::fit(prescale);

    Rng rng(cfg.seed);
    model.classifier = DenseNet::create({kStateConditionDim, 25, 10, 3},
                                        OutputActivation::Softmax, rng);

    // Pre-scaled inputs, computed once.
    Matrix X(static_cast<int>(n), kStateConditionDim);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = model.scaler.apply(prescale[i]);
        std::copy(v.begin(), v.end(), X.row(static_cast<int>(i)));
    }

    AdamState adam = AdamState::make(cfg.learning_rate, parameter_blocks(
                                                            std::as_const(model.classifier)));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::size_t bsz = std::min<std::size_t>(cfg.batch_size, n - start);
            Matrix xb(static_cast<int>(bsz), kStateConditionDim);
            std::vector<int> yb(bsz);
            for (std::size_t r = 0; r < bsz; ++r) {
                std::size_t idx = order[start + r];
                std::copy(X.row(static_cast<int>(idx)), X.row(static_cast<int>(idx)) + kStateConditionDim,
                          xb.row(static_cast<int>(r)));
                yb[r] = labels[idx];
            }

            DenseNet::ForwardCache cache;
            Matrix probs = model.classifier.forward_batch(xb, cache);

            Matrix loss_grad(probs.rows, probs.cols);
            for (int r = 0; r < probs.rows; ++r) {
                const double* p = probs.row(r);
                epoch_loss += cross_entropy(std::span<const double>(p, 3), yb[r]);
                double pf = std::max(p[yb[r]], 1e-12);
                loss_grad.at(r, yb[r]) = -1.0 / (pf * static_cast<double>(bsz));
            }

            auto grads = model.classifier.backward(cache, loss_grad);
            adam.update(parameter_blocks(model.classifier), gradient_blocks(std::as_const(grads)));
        }
        if (curve)
            curve->epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    }
    return model;
}

std::array<double, 3> predict_state_probs(const LinkStateModel& model, const LinkCondition& u) {
    if (!model.trained())
        throw std::logic_error("predict_state_probs: model not trained");
    auto t = transform_state_condition(u);
    auto v = model.scaler.apply(t);
    auto out = model.classifier.forward(v);
    return {out[0], out[1], out[2]};
}

LinkState sample_state(const std::array<double, 3>& probs, double z_state) {
    if (z_state < probs[0])
        return LinkState::Los;
    if (z_state < probs[0] + probs[1])
        return LinkState::Nlos;
    return LinkState::NoLink;
}

PlosCurve empirical_plos_curve(const Dataset& data, double bin_width_m) {
    if (data.records.empty())
        throw std::invalid_argument("empirical_plos_curve: empty dataset");
    if (bin_width_m <= 0.0)
        throw std::invalid_argument("empirical_plos_curve: bin width must be positive");

    PlosCurve curve;
    curve.bin_width_m = bin_width_m;
    auto accumulate = [&](std::vector<PlosBin>& bins, const LinkRecord& rec) {
        double d2d = rec.condition.d2d();
        std::size_t bin = static_cast<std::size_t>(d2d / bin_width_m);
        if (bins.size() <= bin)
            bins.resize(bin + 1);
        PlosBin& b = bins[bin];
        b.empty = false;
        ++b.n_links;
        if (derive_link_state(rec.paths) == LinkState::Los)
            ++b.n_los;
    };
    for (const auto& rec : data.records)
        accumulate(rec.condition.gnb_type == GnbType::Standard ? curve.standard : curve.dedicated,
                   rec);
    auto finalize = [&](std::vector<PlosBin>& bins) {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            bins[i].d2d_center_m = (static_cast<double>(i) + 0.5) * bin_width_m;
            if (bins[i].n_links > 0)
                bins[i].p_los = static_cast<double>(bins[i].n_los) / bins[i].n_links;
        }
    };
    finalize(curve.standard);
    finalize(curve.dedicated);
    return curve;
}

} // namespace uavchan
