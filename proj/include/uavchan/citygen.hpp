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

#ifndef UAVCHAN_CITYGEN_HPP
#define UAVCHAN_CITYGEN_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/gpp_baseline.hpp"

namespace uavchan {

// Synthetic city oracle: a dataset generator whose statistics are known in
// closed form, standing in for ray-traced data. The LOS-probability family
// deliberately reuses the closed-form baseline so refits have an
// exact-recovery target.

struct OracleConfig {
    std::string env_id = "oracle";
    double carrier_hz = kDefaultCarrierHz;

    // P_LOS parameters per gNB type (plos_3gpp alphas). Standard gNBs sit at
    // street level and lose LOS quickly; dedicated rooftop gNBs keep it.
    std::array<double, 6> plos_alpha_standard = {18.0, 36.0, 100.0, -100.0, 50.0, -20.0};
    std::array<double, 6> plos_alpha_dedicated = {18.0, 36.0, 294.05, -432.94, 233.98, -0.95};

    // NoLink probability conditional on not-LOS, ramping beyond a range
    // cutoff: min(max_frac, max(0, (d3D - cutoff)/ramp)).
    double nolink_cutoff_m = 150.0;
    double nolink_ramp_m = 600.0;
    double nolink_max_frac = 0.6;

    // Per-path NLOS loss law: intercept + 10*exponent*log10(d3D) + N(0, sigma),
    // clamped to stay a physical margin above Friis and below the 200 dB floor.
    double nlos_intercept_db = 72.0;
    double nlos_exponent = 2.9;
    double nlos_shadow_sigma_db = 8.0;

    // NLOS path count: Poisson(mean), truncated to [1, 19] for NLOS links and
    // [0, 19] for LOS links.
    double nlos_path_count_mean = 6.0;

    // Angular offsets around the LOS direction: Laplacian with scale
    // max(min_deg, scale0 * exp(-d3D / decay_m)) — spread narrows with range.
    double angle_scale0_deg = 55.0;
    double angle_decay_m = 250.0;
    double angle_min_deg = 4.0;

    // Excess delay: exponential with this mean.
    double excess_delay_mean_s = 200e-9;

    // Geometry. UAV altitudes and per-type gNB heights in meters.
    std::array<double, 4> uav_altitudes_m = {30.0, 60.0, 90.0, 120.0};
    double gnb_height_standard_m = 2.0;
    double gnb_height_dedicated_m = 30.0;
    double d2d_min_m = 10.0;
    double d2d_max_m = 500.0;
    double dedicated_fraction = 0.5;
};

// Analytic ground truths used by the acceptance tests.
double oracle_plos(const OracleConfig& cfg, GnbType type, double d2d_m, double uav_alt_m);
double oracle_p_nolink_given_not_los(const OracleConfig& cfg, double d3d_m);
double oracle_angle_scale_deg(const OracleConfig& cfg, double d3d_m);

// Seed-deterministic generation of n_links records.
Dataset generate_city(const OracleConfig& cfg, std::size_t n_links, std::uint64_t seed);

// Seeded shuffle then split; the two parts are disjoint and exhaustive.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction = 0.75,
                                  std::uint64_t seed = 1);

// Dataset CSV schema: a "# carrier_hz=..." comment line, the pinned header
//   env_id,gnb_type,dx_m,dy_m,dz_m,
//   loss_db_k,aoa_az_deg_k,aoa_el_deg_k,aod_az_deg_k,aod_el_deg_k,delay_ns_k
//   (for k = 1..20), los
// and one row per link. Delays are nanoseconds on disk, seconds in memory;
// numbers are written with 9 significant digits.
extern const std::string kDatasetCsvHeader;

void write_dataset(const Dataset& data, const std::string& path);
Dataset read_dataset(const std::string& path);

// Conditions-only CSV (gnb_type,dx_m,dy_m,dz_m), used by batch generation.
std::vector<LinkCondition> read_conditions(const std::string& path);
void write_conditions(const std::vector<LinkCondition>& conds, const std::string& path);

} // namespace uavchan

#endif // UAVCHAN_CITYGEN_HPP
