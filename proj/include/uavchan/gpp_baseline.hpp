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

#ifndef UAVCHAN_GPP_BASELINE_HPP
#define UAVCHAN_GPP_BASELINE_HPP

#include <array>
#include <string>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/numerics.hpp"

namespace uavchan {

// Closed-form UMi-AV LOS-probability and path-loss baselines, nominal and
// refit to data. Parameters are optimized as multipliers of the nominal
// values, clamped to [0.01, 10].

// Condition input of the closed-form models: [log10(h), d2D, h, h_gNB] with
// h the UAV height above ground and h_gNB the gNB height.
struct GppCondition {
    double h_m = 0.0;
    double d2d_m = 0.0;
    double h_gnb_m = 0.0;

    double dz() const { return h_m - h_gnb_m; }
    double d3d() const { return std::sqrt(d2d_m * d2d_m + dz() * dz()); }
};

constexpr std::array<double, 6> kAlphaNominal = {18.0, 36.0, 294.05, -432.94, 233.98, -0.95};

struct Alpha3GPP {
    std::array<double, 6> multipliers{1, 1, 1, 1, 1, 1};

    std::array<double, 6> values() const;
    static Alpha3GPP nominal() { return {}; }
};

// LOS probability. Heights in [1.5, 22.5] m use the low branch, heights in
// (22.5, 300] m the high branch with p1 = a3*log10(h)+a4 and
// d1 = max(a5*log10(h)+a6, a1). Result clipped to [0, 1].
double plos_3gpp(const GppCondition& cond, const Alpha3GPP& alpha);

// d(P_LOS)/d(alpha_i) with branch selections treated as constants
// (subgradient at the boundaries). Used by the BCE refit.
std::array<double, 6> plos_3gpp_grad_alpha(const GppCondition& cond, const Alpha3GPP& alpha);

struct GppFitConfig {
    int epochs = 50;
    int batch_size = 128;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    double multiplier_lo = 0.01;
    double multiplier_hi = 10.0;
    // Heights used to build the condition inputs from link displacements.
    double gnb_height_standard_m = 2.0;
    double gnb_height_dedicated_m = 30.0;
    // Optional gNB-type restriction (the benchmark methodology uses standard
    // gNBs only; All keeps everything).
    enum class Filter { All, StandardOnly, DedicatedOnly };
    Filter filter = Filter::All;
};

GppCondition gpp_condition_from_link(const LinkCondition& u, const GppFitConfig& cfg);

// Refits the P_LOS multipliers by minimizing the mean binary cross entropy
// with Adam; multipliers are clamped after every step. Labels: 1 iff LOS
// (NoLink counts as non-LOS).
Alpha3GPP fit_plos(const Dataset& train, const GppFitConfig& cfg, TrainCurve* curve = nullptr);

// Path-loss coefficient table. The nominal values are transcribed constants
// of the UMi street-canyon (h <= 22.5 m) and UMi-AV high-altitude
// (22.5 < h <= 300 m) formulas; 17 coefficients in total.
constexpr int kBetaCount = 17;
extern const std::array<double, kBetaCount> kBetaNominal;

struct Beta3GPP {
    std::array<double, kBetaCount> multipliers;

    Beta3GPP() { multipliers.fill(1.0); }
    std::array<double, kBetaCount> values() const;
    static Beta3GPP nominal() { return {}; }
};

// Predicted path loss in dB at carrier f_hz for state s in {LOS, NLOS}.
// NLOS is floored at the LOS prediction by construction.
double pathloss_3gpp(const GppCondition& cond, LinkState s, const Beta3GPP& beta, double f_hz);

// d(PL)/d(beta_i) with branch and max selections treated as constants.
std::array<double, kBetaCount> pathloss_3gpp_grad_beta(const GppCondition& cond, LinkState s,
                                                       const Beta3GPP& beta, double f_hz);

// Per-link scalar path-loss target for the refit.
enum class PathlossTarget { OmniPowerSum, StrongestPath };

// Refits the path-loss multipliers by minimizing the mean squared error in
// dB^2 over non-NoLink links.
Beta3GPP fit_pathloss(const Dataset& train, const GppFitConfig& cfg,
                      PathlossTarget target = PathlossTarget::OmniPowerSum,
                      TrainCurve* curve = nullptr);

// Fitted-parameter persistence (small JSON document with nominal values,
// multipliers, and a provenance note).
void save_alpha(const Alpha3GPP& alpha, const std::string& path);
Alpha3GPP load_alpha(const std::string& path);
void save_beta(const Beta3GPP& beta, const std::string& path);
Beta3GPP load_beta(const std::string& path);

} // namespace uavchan

#endif // UAVCHAN_GPP_BASELINE_HPP
