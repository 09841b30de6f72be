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

#include "uavchan/gpp_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <stdexcept>

#include <json.hpp>

#include "uavchan/metrics.hpp"

namespace uavchan {

using nlohmann::json;

namespace {

constexpr double kLowHighSplitM = 22.5; // UAV height separating the two regimes
constexpr double kMinP1 = 1e-2;         // decay-scale floor keeping the exponent finite
constexpr double kProbClip = 1e-7;      // BCE probability clip

void check_height(double h_m) {
    if (!(h_m >= 1.5 && h_m <= 300.0))
        throw std::invalid_argument("UAV height " + std::to_string(h_m) +
                                    " m outside the [1.5, 300] m validity range");
}

} // namespace

std::array<double, 6> Alpha3GPP::values() const {
    std::array<double, 6> v;
    for (int i = 0; i < 6; ++i)
        v[i] = multipliers[i] * kAlphaNominal[i];
    return v;
}

double plos_3gpp(const GppCondition& cond, const Alpha3GPP& alpha) {
    check_height(cond.h_m);
    auto a = alpha.values();
    double d = cond.d2d_m;
    double p;
    if (cond.h_m <= kLowHighSplitM) {
        if (d <= a[0])
            return 1.0;
        p = a[0] / d + std::exp(-d / a[1]) * (1.0 - a[0] / d);
    } else {
        double log_h = std::log10(cond.h_m);
        double p1 = std::max(a[2] * log_h + a[3], kMinP1);
        double d1 = std::max(a[4] * log_h + a[5], a[0]);
        if (d <= d1)
            return 1.0;
        p = d1 / d + std::exp(-d / p1) * (1.0 - d1 / d);
    }
    return std::clamp(p, 0.0, 1.0);
}

std::array<double, 6> plos_3gpp_grad_alpha(const GppCondition& cond, const Alpha3GPP& alpha) {
    check_height(cond.h_m);
    auto a = alpha.values();
    double d = cond.d2d_m;
    std::array<double, 6> g{};
    if (cond.h_m <= kLowHighSplitM) {
        if (d <= a[0])
            return g; // constant branch
        double e = std::exp(-d / a[1]);
        g[0] = (1.0 - e) / d;
        g[1] = e * (d / (a[1] * a[1])) * (1.0 - a[0] / d);
    } else {
        double log_h = std::log10(cond.h_m);
        double p1_raw = a[2] * log_h + a[3];
        double p1 = std::max(p1_raw, kMinP1);
        double d1_raw = a[4] * log_h + a[5];
        double d1 = std::max(d1_raw, a[0]);
        if (d <= d1)
            return g;
        double e = std::exp(-d / p1);
        double dp_dd1 = (1.0 - e) / d;
        double dp_dp1 = e * (d / (p1 * p1)) * (1.0 - d1 / d);
        if (p1_raw > kMinP1) {
            g[2] = dp_dp1 * log_h;
            g[3] = dp_dp1;
        }
        if (d1_raw >= a[0]) {
            g[4] = dp_dd1 * log_h;
            g[5] = dp_dd1;
        } else {
            g[0] = dp_dd1;
        }
    }
    return g;
}

GppCondition gpp_condition_from_link(const LinkCondition& u, const GppFitConfig& cfg) {
    GppCondition c;
    c.h_gnb_m = (u.gnb_type == GnbType::Standard) ? cfg.gnb_height_standard_m
                                                  : cfg.gnb_height_dedicated_m;
    c.h_m = c.h_gnb_m + u.dz_m;
    c.d2d_m = u.d2d();
    return c;
}

namespace {

struct FitSample {
    GppCondition cond;
    double label = 0.0; // y for BCE, target dB for MSE
    LinkState state = LinkState::Los;
};

bool keep_type(GnbType t, GppFitConfig::Filter f) {
    switch (f) {
    case GppFitConfig::Filter::StandardOnly:
        return t == GnbType::Standard;
    case GppFitConfig::Filter::DedicatedOnly:
        return t == GnbType::Dedicated;
    default:
        return true;
    }
}

bool height_valid(double h_m) {
    return h_m >= 1.5 && h_m <= 300.0;
}

template <typename Step>
void run_minibatch_fit(const std::vector<FitSample>& samples, const GppFitConfig& cfg,
                       std::size_t n_params, std::vector<double>& multipliers,
                       const Step& step_grad, TrainCurve* curve) {
    Rng rng(cfg.seed);
    std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
    long step = 0;

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t bsz = std::min<std::size_t>(cfg.batch_size, order.size() - start);
            std::vector<double> grad(n_params, 0.0);
            double batch_loss = 0.0;
            for (std::size_t r = 0; r < bsz; ++r)
                batch_loss += step_grad(samples[order[start + r]], grad);
            epoch_loss += batch_loss;
            double inv_b = 1.0 / static_cast<double>(bsz);

            // Adam with bias correction, then the multiplicative clamp.
            ++step;
            double bc1 = 1.0 - std::pow(0.9, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(0.999, static_cast<double>(step));
            for (std::size_t j = 0; j < n_params; ++j) {
                double g = grad[j] * inv_b;
                m[j] = 0.9 * m[j] + 0.1 * g;
                v[j] = 0.999 * v[j] + 0.001 * g * g;
                double mhat = m[j] / bc1;
                double vhat = v[j] / bc2;
                multipliers[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + 1e-8);
                multipliers[j] = std::clamp(multipliers[j], cfg.multiplier_lo, cfg.multiplier_hi);
            }
        }
        if (curve)
            curve->epoch_loss.push_back(epoch_loss / static_cast<double>(samples.size()));
    }
}

} // namespace

Alpha3GPP fit_plos(const Dataset& train, const GppFitConfig& cfg, TrainCurve* curve) {
    std::vector<FitSample> samples;
    for (const auto& rec : train.records) {
        if (!keep_type(rec.condition.gnb_type, cfg.filter))
            continue;
        GppCondition c = gpp_condition_from_link(rec.condition, cfg);
        if (!height_valid(c.h_m))
            continue;
        FitSample s;
        s.cond = c;
        s.label = derive_link_state(rec.paths) == LinkState::Los ? 1.0 : 0.0;
        samples.push_back(s);
    }
    if (samples.empty())
        throw std::invalid_argument("fit_plos: no usable links after filtering");

    Alpha3GPP alpha;
    std::vector<double> w(alpha.multipliers.begin(), alpha.multipliers.end());

    auto step_grad = [&](const FitSample& s, std::vector<double>& grad) {
        Alpha3GPP cur;
        std::copy(w.begin(), w.end(), cur.multipliers.begin());
        double p = plos_3gpp(s.cond, cur);
        double pc = std::clamp(p, kProbClip, 1.0 - kProbClip);
        double loss = -(s.label * std::log(pc) + (1.0 - s.label) * std::log(1.0 - pc));
        double dl_dp = -s.label / pc + (1.0 - s.label) / (1.0 - pc);
        auto dp = plos_3gpp_grad_alpha(s.cond, cur);
        for (int j = 0; j < 6; ++j)
            grad[j] += dl_dp * dp[j] * kAlphaNominal[j];
        return loss;
    };
    run_minibatch_fit(samples, cfg, 6, w, step_grad, curve);

    std::copy(w.begin(), w.end(), alpha.multipliers.begin());
    return alpha;
}

// Nominal path-loss coefficient table: the 3GPP UMi street-canyon and UMi-AV
// constants (TR 38.901 Table 7.4.1-1, TR 36.777 Table B-1). Layout:
//   street canyon, 1.5 <= h <= 22.5 m (breakpoint d_BP = 4(h_gNB-1)(h-1)f/c):
//     [0] 32.4  LOS intercept          [1] 21.0  LOS log10(d3D), d2D <= d_BP
//     [2] 20.0  LOS log10(f_GHz)       [3] 40.0  LOS log10(d3D), d2D > d_BP
//     [4] 9.5   LOS breakpoint term    [5] 22.4  NLOS intercept
//     [6] 35.3  NLOS log10(d3D)        [7] 21.3  NLOS log10(f_GHz)
//     [8] 0.3   NLOS height term (h - 1.5)
//   high altitude, 22.5 < h <= 300 m:
//     [9] 30.9  LOS intercept          [10] 22.25 LOS log10(d3D) base slope
//     [11] 0.5  LOS height coupling    [12] 20.0  LOS log10(f_GHz)
//     [13] 32.4 NLOS intercept         [14] 43.2  NLOS log10(d3D) base slope
//     [15] 7.6  NLOS height coupling   [16] 20.0  NLOS log10(f_GHz)
const std::array<double, kBetaCount> kBetaNominal = {
    32.4, 21.0, 20.0, 40.0, 9.5, 22.4, 35.3, 21.3, 0.3,
    30.9, 22.25, 0.5, 20.0, 32.4, 43.2, 7.6, 20.0,
};

std::array<double, kBetaCount> Beta3GPP::values() const {
    std::array<double, kBetaCount> v;
    for (int i = 0; i < kBetaCount; ++i)
        v[i] = multipliers[i] * kBetaNominal[i];
    return v;
}

namespace {

// Evaluates the path loss and, when grad != nullptr, accumulates d(PL)/d(beta)
// with all branch and max selections treated as constants.
double pathloss_eval(const GppCondition& cond, LinkState s, const Beta3GPP& beta, double f_hz,
                     std::array<double, kBetaCount>* grad) {
    check_height(cond.h_m);
    if (s == LinkState::NoLink)
        throw std::invalid_argument("pathloss_3gpp: state must be LOS or NLOS");
    if (f_hz <= 0.0)
        throw std::invalid_argument("pathloss_3gpp: frequency must be positive");

    auto b = beta.values();
    double d3d = std::max(cond.d3d(), 1.0);
    double log_d = std::log10(d3d);
    double log_f = std::log10(f_hz / 1e9);
    double h = cond.h_m;

    if (grad)
        grad->fill(0.0);

    double pl_los;
    std::array<double, kBetaCount> g_los{};
    double pl_nlos_only = 0.0;
    std::array<double, kBetaCount> g_nlos{};

    if (h <= kLowHighSplitM) {
        double h_eff = std::max(h - 1.0, 0.1);
        double h_gnb_eff = std::max(cond.h_gnb_m - 1.0, 0.1);
        double d_bp = 4.0 * h_gnb_eff * h_eff * f_hz / kSpeedOfLight;
        if (cond.d2d_m <= d_bp) {
            pl_los = b[0] + b[1] * log_d + b[2] * log_f;
            g_los[0] = 1.0;
            g_los[1] = log_d;
            g_los[2] = log_f;
        } else {
            double hb = cond.h_gnb_m - h;
            double corr = std::log10(d_bp * d_bp + hb * hb);
            pl_los = b[0] + b[3] * log_d + b[2] * log_f - b[4] * corr;
            g_los[0] = 1.0;
            g_los[3] = log_d;
            g_los[2] = log_f;
            g_los[4] = -corr;
        }
        pl_nlos_only = b[5] + b[6] * log_d + b[7] * log_f - b[8] * (h - 1.5);
        g_nlos[5] = 1.0;
        g_nlos[6] = log_d;
        g_nlos[7] = log_f;
        g_nlos[8] = -(h - 1.5);
    } else {
        double log_h = std::log10(h);
        pl_los = b[9] + (b[10] - b[11] * log_h) * log_d + b[12] * log_f;
        g_los[9] = 1.0;
        g_los[10] = log_d;
        g_los[11] = -log_h * log_d;
        g_los[12] = log_f;
        pl_nlos_only = b[13] + (b[14] - b[15] * log_h) * log_d + b[16] * log_f;
        g_nlos[13] = 1.0;
        g_nlos[14] = log_d;
        g_nlos[15] = -log_h * log_d;
        g_nlos[16] = log_f;
    }

    if (s == LinkState::Los) {
        if (grad)
            *grad = g_los;
        return pl_los;
    }
    // NLOS is floored at the LOS prediction; the gradient follows the active side.
    if (pl_los >= pl_nlos_only) {
        if (grad)
            *grad = g_los;
        return pl_los;
    }
    if (grad)
        *grad = g_nlos;
    return pl_nlos_only;
}

} // namespace

double pathloss_3gpp(const GppCondition& cond, LinkState s, const Beta3GPP& beta, double f_hz) {
    return pathloss_eval(cond, s, beta, f_hz, nullptr);
}

std::array<double, kBetaCount> pathloss_3gpp_grad_beta(const GppCondition& cond, LinkState s,
                                                       const Beta3GPP& beta, double f_hz) {
    std::array<double, kBetaCount> g{};
    pathloss_eval(cond, s, beta, f_hz, &g);
    return g;
}

Beta3GPP fit_pathloss(const Dataset& train, const GppFitConfig& cfg, PathlossTarget target,
                      TrainCurve* curve) {
    OmniMode mode = (target == PathlossTarget::OmniPowerSum) ? OmniMode::PowerSum
                                                             : OmniMode::StrongestPath;
    std::vector<FitSample> samples;
    for (const auto& rec : train.records) {
        if (!keep_type(rec.condition.gnb_type, cfg.filter))
            continue;
        LinkState s = derive_link_state(rec.paths);
        if (s == LinkState::NoLink)
            continue;
        GppCondition c = gpp_condition_from_link(rec.condition, cfg);
        if (!height_valid(c.h_m))
            continue;
        FitSample fs;
        fs.cond = c;
        fs.state = s;
        fs.label = omni_pathloss(rec.paths, mode);
        samples.push_back(fs);
    }
    if (samples.empty())
        throw std::invalid_argument("fit_pathloss: no usable links after filtering");

    Beta3GPP beta;
    std::vector<double> w(beta.multipliers.begin(), beta.multipliers.end());

    auto step_grad = [&](const FitSample& s, std::vector<double>& grad) {
        Beta3GPP cur;
        std::copy(w.begin(), w.end(), cur.multipliers.begin());
        std::array<double, kBetaCount> dpl{};
        double pl = pathloss_eval(s.cond, s.state, cur, train.carrier_hz, &dpl);
        double res = pl - s.label;
        for (int j = 0; j < kBetaCount; ++j)
            grad[j] += 2.0 * res * dpl[j] * kBetaNominal[j];
        return res * res;
    };
    run_minibatch_fit(samples, cfg, kBetaCount, w, step_grad, curve);

    std::copy(w.begin(), w.end(), beta.multipliers.begin());
    return beta;
}

// ------------------------------------------------------- persistence ------

namespace {

constexpr const char* kParamsFormat = "uavchan-3gpp-params";
constexpr int kParamsVersion = 1;

json params_to_json(const char* which, std::span<const double> nominal,
                    std::span<const double> multipliers) {
    std::vector<double> fitted(nominal.size());
    for (std::size_t i = 0; i < nominal.size(); ++i)
        fitted[i] = nominal[i] * multipliers[i];
    return json{
        {"format", kParamsFormat},
        {"version", kParamsVersion},
        {"which", which},
        {"nominal", std::vector<double>(nominal.begin(), nominal.end())},
        {"multipliers", std::vector<double>(multipliers.begin(), multipliers.end())},
        {"fitted", fitted},
        {"note", "nominal values transcribed from the closed-form UMi/UMi-AV tables; "
                 "fitted = nominal * multiplier, multipliers clamped to [0.01, 10]"},
    };
}

json load_params_json(const std::string& path, const char* which, std::size_t expect) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open parameter file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed parameter file '" + path + "': " + e.what());
    }
    if (!j.contains("format") || j.at("format").get<std::string>() != kParamsFormat)
        throw std::runtime_error("'" + path + "' is not a " + std::string(kParamsFormat) +
                                 " document");
    if (j.at("version").get<int>() != kParamsVersion)
        throw std::runtime_error("unsupported parameter file version in '" + path + "'");
    if (j.at("which").get<std::string>() != which)
        throw std::runtime_error("parameter file '" + path + "' holds '" +
                                 j.at("which").get<std::string>() + "', expected '" + which +
                                 "'");
    auto mult = j.at("multipliers").get<std::vector<double>>();
    if (mult.size() != expect)
        throw std::runtime_error("parameter file '" + path + "' has wrong multiplier count");
    return j;
}

} // namespace

void save_alpha(const Alpha3GPP& alpha, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << params_to_json("plos", kAlphaNominal, alpha.multipliers).dump(1) << '\n';
}

Alpha3GPP load_alpha(const std::string& path) {
    json j = load_params_json(path, "plos", 6);
    Alpha3GPP a;
    auto mult = j.at("multipliers").get<std::vector<double>>();
    std::copy(mult.begin(), mult.end(), a.multipliers.begin());
    return a;
}

void save_beta(const Beta3GPP& beta, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << params_to_json("pathloss", kBetaNominal, beta.multipliers).dump(1) << '\n';
}

Beta3GPP load_beta(const std::string& path) {
    json j = load_params_json(path, "pathloss", kBetaCount);
    Beta3GPP b;
    auto mult = j.at("multipliers").get<std::vector<double>>();
    std::copy(mult.begin(), mult.end(), b.multipliers.begin());
    return b;
}

} // namespace uavchan
