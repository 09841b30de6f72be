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

#include "uavchan/pathvae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavchan {

namespace {
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
constexpr int kEncoderOut = 2 * kLatentDim;      // 40
constexpr int kDecoderOut = 2 * kPathVectorDim;  // 240
constexpr int kEncoderIn = kPathConditionDim + kPathVectorDim; // 125
constexpr int kDecoderIn = kPathConditionDim + kLatentDim;     // 25
} // namespace

std::array<double, kPathConditionDim> path_condition_prescale(const LinkCondition& u,
                                                              LinkState s) {
    if (s == LinkState::NoLink)
        throw std::invalid_argument("path_condition_prescale: NoLink links carry no paths");
    double d3d = u.d3d();
    if (d3d <= 0.0)
        throw std::invalid_argument("path_condition_prescale: zero displacement");
    double c_one = (u.gnb_type == GnbType::Dedicated) ? 1.0 : 0.0;
    return {c_one, d3d, 10.0 * std::log10(d3d), u.dz_m, s == LinkState::Los ? 1.0 : 0.0};
}

std::vector<double> transform_path_condition(const VaeModel& model, const LinkCondition& u,
                                             LinkState s) {
    auto pre = path_condition_prescale(u, s);
    return model.cond_scaler.apply(pre);
}

GaussianParams encode(const VaeModel& model, std::span<const double> v_path,
                      std::span<const double> y) {
    if (static_cast<int>(v_path.size()) != kPathConditionDim ||
        static_cast<int>(y.size()) != kPathVectorDim)
        throw std::invalid_argument("encode: input dimension mismatch");
    std::vector<double> in;
    in.reserve(kEncoderIn);
    in.insert(in.end(), v_path.begin(), v_path.end());
    in.insert(in.end(), y.begin(), y.end());
    auto out = model.encoder.forward(in);
    GaussianParams p;
    p.mu.assign(out.begin(), out.begin() + kLatentDim);
    p.logvar.assign(out.begin() + kLatentDim, out.end());
    return p;
}

std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> logvar,
                                   std::span<const double> eps) {
    if (mu.size() != logvar.size() || mu.size() != eps.size())
        throw std::invalid_argument("reparameterize: shape mismatch");
    std::vector<double> z(mu.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
    return z;
}

GaussianParams decode(const VaeModel& model, std::span<const double> v_path,
                      std::span<const double> z) {
    if (static_cast<int>(v_path.size()) != kPathConditionDim ||
        static_cast<int>(z.size()) != kLatentDim)
        throw std::invalid_argument("decode: input dimension mismatch");
    std::vector<double> in;
    in.reserve(kDecoderIn);
    in.insert(in.end(), v_path.begin(), v_path.end());
    in.insert(in.end(), z.begin(), z.end());
    auto out = model.decoder.forward(in);
    GaussianParams p;
    p.mu.assign(out.begin(), out.begin() + kPathVectorDim);
    p.logvar.resize(kPathVectorDim);
    for (int j = 0; j < kPathVectorDim; ++j)
        p.logvar[j] = std::clamp(out[kPathVectorDim + j], kLogVarClampLo, kLogVarClampHi);
    return p;
}

PathVector sample_y(const VaeModel& model, std::span<const double> v_path,
                    std::span<const double> z_nlos, std::span<const double> z_out) {
    if (static_cast<int>(z_out.size()) != kPathVectorDim)
        throw std::invalid_argument("sample_y: z_out must have 120 entries");
    GaussianParams p = decode(model, v_path, z_nlos);
    PathVector y{};
    for (int j = 0; j < kPathVectorDim; ++j)
        y[j] = p.mu[j] + std::exp(0.5 * p.logvar[j]) * z_out[j];
    return y;
}

double elbo_loss(const VaeModel& model, std::span<const double> v_path,
                 std::span<const double> y, std::span<const double> eps) {
    GaussianParams post = encode(model, v_path, y);
    auto z = reparameterize(post.mu, post.logvar, eps);
    GaussianParams out = decode(model, v_path, z);

    double recon = 0.0;
    for (int j = 0; j < kPathVectorDim; ++j) {
        double r = y[j] - out.mu[j];
        recon += r * r * std::exp(-out.logvar[j]) + out.logvar[j] + kLog2Pi;
    }
    double kl = 0.0;
    for (int i = 0; i < kLatentDim; ++i)
        kl += post.mu[i] * post.mu[i] + std::exp(post.logvar[i]) - post.logvar[i] - 1.0;
    return 0.5 * recon + 0.5 * kl;
}

namespace {

// Shared gradient core: one batched forward/backward pass of the negative
// ELBO. Gradients are scaled by inv_b (summed loss is returned unscaled).
double vae_batch_gradients(const VaeModel& model, const Matrix& enc_in, const Matrix& vb,
                           const Matrix& yb, const Matrix& eps, double inv_b,
                           DenseNet::Gradients& enc_grads, DenseNet::Gradients& dec_grads) {
    const int B = enc_in.rows;

    DenseNet::ForwardCache enc_cache;
    Matrix enc_out = model.encoder.forward_batch(enc_in, enc_cache);

    Matrix dec_in(B, kDecoderIn);
    for (int r = 0; r < B; ++r) {
        const double* eo = enc_out.row(r);
        double* di = dec_in.row(r);
        std::copy(vb.row(r), vb.row(r) + kPathConditionDim, di);
        for (int i = 0; i < kLatentDim; ++i)
            di[kPathConditionDim + i] = eo[i] + std::exp(0.5 * eo[kLatentDim + i]) * eps.at(r, i);
    }

    DenseNet::ForwardCache dec_cache;
    Matrix dec_out = model.decoder.forward_batch(dec_in, dec_cache);

    // Reconstruction term and its gradient w.r.t. the decoder output.
    Matrix dec_grad(B, kDecoderOut);
    double batch_loss = 0.0;
    for (int r = 0; r < B; ++r) {
        const double* o = dec_out.row(r);
        const double* y = yb.row(r);
        double* g = dec_grad.row(r);
        for (int j = 0; j < kPathVectorDim; ++j) {
            double raw_lv = o[kPathVectorDim + j];
            double lv = std::clamp(raw_lv, kLogVarClampLo, kLogVarClampHi);
            double res = y[j] - o[j];
            double inv_var = std::exp(-lv);
            batch_loss += 0.5 * (res * res * inv_var + lv + kLog2Pi);
            g[j] = -res * inv_var * inv_b;
            double dlv = 0.5 * (1.0 - res * res * inv_var);
            // The clamp acts as a hard stop for the gradient.
            g[kPathVectorDim + j] =
                (raw_lv > kLogVarClampLo && raw_lv < kLogVarClampHi) ? dlv * inv_b : 0.0;
        }
    }

    Matrix dec_din(B, kDecoderIn);
    dec_grads = model.decoder.backward(dec_cache, dec_grad, &dec_din);

    // Gradient w.r.t. the encoder output: chain through z and add the KL term.
    Matrix enc_grad(B, kEncoderOut);
    for (int r = 0; r < B; ++r) {
        const double* eo = enc_out.row(r);
        const double* dz = dec_din.row(r) + kPathConditionDim;
        double* g = enc_grad.row(r);
        for (int i = 0; i < kLatentDim; ++i) {
            double mu = eo[i];
            double lv = eo[kLatentDim + i];
            double sigma = std::exp(0.5 * lv);
            batch_loss += 0.5 * (mu * mu + std::exp(lv) - lv - 1.0);
            g[i] = dz[i] + mu * inv_b;
            g[kLatentDim + i] =
                dz[i] * 0.5 * sigma * eps.at(r, i) + 0.5 * (std::exp(lv) - 1.0) * inv_b;
        }
    }

    enc_grads = model.encoder.backward(enc_cache, enc_grad);
    return batch_loss;
}

} // namespace

VaeGradients vae_elbo_gradients(const VaeModel& model, std::span<const double> v_path,
                                std::span<const double> y, std::span<const double> eps) {
    if (static_cast<int>(v_path.size()) != kPathConditionDim ||
        static_cast<int>(y.size()) != kPathVectorDim ||
        static_cast<int>(eps.size()) != kLatentDim)
        throw std::invalid_argument("vae_elbo_gradients: input dimension mismatch");
    Matrix enc_in(1, kEncoderIn), vb(1, kPathConditionDim), yb(1, kPathVectorDim),
        eps_m(1, kLatentDim);
    std::copy(v_path.begin(), v_path.end(), enc_in.row(0));
    std::copy(y.begin(), y.end(), enc_in.row(0) + kPathConditionDim);
    std::copy(v_path.begin(), v_path.end(), vb.row(0));
    std::copy(y.begin(), y.end(), yb.row(0));
    std::copy(eps.begin(), eps.end(), eps_m.row(0));

    VaeGradients out;
    out.loss = vae_batch_gradients(model, enc_in, vb, yb, eps_m, 1.0, out.encoder, out.decoder);
    return out;
}

VaeModel train_vae(const Dataset& train, const CodecScalers& codec, const VaeTrainConfig& cfg,
                   TrainCurve* curve) {
    if (!codec.fitted())
        throw std::invalid_argument("train_vae: codec scalers not fitted");
    if (cfg.epochs <= 0 || cfg.batch_size <= 0)
        throw std::invalid_argument("train_vae: bad epochs/batch size");

    // Eligible links: LOS or NLOS (NoLink links carry no path targets).
    std::vector<std::size_t> eligible;
    std::vector<LinkState> states;
    for (std::size_t i = 0; i < train.records.size(); ++i) {
        LinkState s = derive_link_state(train.records[i].paths);
        if (s != LinkState::NoLink) {
            eligible.push_back(i);
            states.push_back(s);
        }
    }
    const std::size_t n = eligible.size();
    if (n == 0)
        throw std::invalid_argument("train_vae: no LOS/NLOS links in the training data");

    std::vector<std::vector<double>> cond_prescale(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto pre = path_condition_prescale(train.records[eligible[j]].condition, states[j]);
        cond_prescale[j].assign(pre.begin(), pre.end());
    }

    VaeModel model;
    model.cond_scaler = MinMaxScaler::fit(cond_prescale);

    Rng rng(cfg.seed);
    model.encoder = DenseNet::create({kEncoderIn, 200, 80, kEncoderOut},
                                     OutputActivation::Linear, rng);
    model.decoder = DenseNet::create({kDecoderIn, 80, 200, kDecoderOut},
                                     OutputActivation::Linear, rng);

    // Precompute scaled conditions and encoded targets.
    Matrix V(static_cast<int>(n), kPathConditionDim);
    Matrix Y(static_cast<int>(n), kPathVectorDim);
    for (std::size_t j = 0; j < n; ++j) {
        auto v = model.cond_scaler.apply(cond_prescale[j]);
        std::copy(v.begin(), v.end(), V.row(static_cast<int>(j)));
        const LinkRecord& rec = train.records[eligible[j]];
        PathVector y = encode_nlos(strip_los(rec.paths), rec.condition.displacement(),
                                   train.carrier_hz, codec);
        std::copy(y.begin(), y.end(), Y.row(static_cast<int>(j)));
    }

    // One Adam state over encoder + decoder parameters.
    auto all_params_const = [&]() {
        auto blocks = parameter_blocks(std::as_const(model.encoder));
        auto dec = parameter_blocks(std::as_const(model.decoder));
        blocks.insert(blocks.end(), dec.begin(), dec.end());
        return blocks;
    };
    auto all_params = [&]() {
        auto blocks = parameter_blocks(model.encoder);
        auto dec = parameter_blocks(model.decoder);
        blocks.insert(blocks.end(), dec.begin(), dec.end());
        return blocks;
    };
    AdamState adam = AdamState::make(cfg.learning_rate, all_params_const());

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const int B = static_cast<int>(std::min<std::size_t>(cfg.batch_size, n - start));
            const double inv_b = 1.0 / B;

            Matrix enc_in(B, kEncoderIn);
            Matrix vb(B, kPathConditionDim);
            Matrix yb(B, kPathVectorDim);
            for (int r = 0; r < B; ++r) {
                std::size_t idx = order[start + r];
                const double* v = V.row(static_cast<int>(idx));
                const double* y = Y.row(static_cast<int>(idx));
                std::copy(v, v + kPathConditionDim, vb.row(r));
                std::copy(y, y + kPathVectorDim, yb.row(r));
                std::copy(v, v + kPathConditionDim, enc_in.row(r));
                std::copy(y, y + kPathVectorDim, enc_in.row(r) + kPathConditionDim);
            }

            // One ELBO sample per datum per step.
            Matrix eps(B, kLatentDim);
            for (double& e : eps.v)
                e = rng.normal();

            DenseNet::Gradients enc_grads, dec_grads;
            double batch_loss =
                vae_batch_gradients(model, enc_in, vb, yb, eps, inv_b, enc_grads, dec_grads);

            auto grad_blocks = gradient_blocks(std::as_const(enc_grads));
            auto dec_blocks = gradient_blocks(std::as_const(dec_grads));
            grad_blocks.insert(grad_blocks.end(), dec_blocks.begin(), dec_blocks.end());
            adam.update(all_params(), grad_blocks);

            epoch_loss += batch_loss;
        }
        if (curve)
            curve->epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    }
    return model;
}

} // namespace uavchan
