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

#ifndef UAVCHAN_AIRSIM_HPP
#define UAVCHAN_AIRSIM_HPP

#include <limits>
#include <string>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/genmodel.hpp"

namespace uavchan {

// Link-budget SNR with uniform planar arrays and the single-cell median-SNR
// map experiment.

// One panel orientation (sector boresight) in global angles.
struct SectorOrientation {
    double az_deg = 0.0;
    double el_deg = 0.0; // from zenith: 0 = up, 180 = down
};

struct ArrayConfig {
    int rows = 4;
    int cols = 4;
    double spacing_wl = 0.5;          // element spacing in wavelengths
    double hpbw_az_deg = 90.0;        // element half-power beamwidth, azimuth cut
    double hpbw_el_deg = 90.0;        // element half-power beamwidth, elevation cut
    double front_to_back_db = 30.0;   // attenuation floor
    std::vector<SectorOrientation> sectors;

    int element_count() const { return rows * cols; }

    static ArrayConfig uav_panel();          // 4x4, facing straight down
    static ArrayConfig gnb_standard();       // 8x8, 3 sectors downtilted 100 deg
    static ArrayConfig gnb_dedicated();      // 8x8, single sector facing up
};

struct LinkBudget {
    double carrier_hz = 28e9;
    double bandwidth_hz = 400e6;
    double tx_power_dbm = 23.0;
    double losses_db = 6.0; // noise figure and implementation losses

    // -174 dBm/Hz + 10*log10(B) + losses
    double noise_power_dbm() const;
};

// Element gain relative to the boresight peak:
//   -min(12*(dTheta/hpbw_el)^2 + 12*(dPhi/hpbw_az)^2, front_to_back)
// For pole-pointing boresights (straight up/down), the pattern falls back to
// the rotationally symmetric off-axis form in the elevation beamwidth.
double element_gain_db(const ArrayConfig& cfg, const SectorOrientation& boresight,
                       const Vec3& direction);

// Conjugate-steered UPA power gain toward path_direction: array factor
// |sum_n exp(j*k*r_n.(u_path - u_steer))|^2 / N in dB plus the element gain
// toward the path.
double beamforming_gain_db(const ArrayConfig& cfg, const SectorOrientation& boresight,
                           const Vec3& steer_direction, const Vec3& path_direction);

constexpr double kSnrNoLinkSentinel = -std::numeric_limits<double>::infinity();

// Local-average SNR of one link: both arrays steer at the strongest
// element-weighted path (standard gNBs evaluate all 3 sectors and keep the
// best), received power sums non-coherently over paths. NoLink returns the
// -inf sentinel.
double link_snr_db(const PathSet& paths, const LinkBudget& budget, const ArrayConfig& uav,
                   const ArrayConfig& gnb);

struct SnrMapConfig {
    GnbType gnb_type = GnbType::Dedicated;
    double x_min_m = 0.0;
    double x_max_m = 500.0;
    double x_step_m = 20.0;
    double z_min_m = 0.0;
    double z_max_m = 130.0;
    double z_step_m = 10.0;
    int n_realizations = 100;
    std::uint64_t seed = 1;
    double nolink_floor_db = -40.0; // sentinel mapping used inside the median
    double gnb_height_standard_m = 2.0;
    double gnb_height_dedicated_m = 30.0;
    LinkBudget budget;
};

struct SnrMap {
    std::vector<double> x_m;
    std::vector<double> z_m;
    // median_db[i_z][i_x]
    std::vector<std::vector<double>> median_db;
    SnrMapConfig config;
};

// Median local-average SNR over a UAV position grid; the gNB sits at
// (0, 0, h). Per grid point, n_realizations links are generated from
// index-keyed substreams; NoLink realizations enter the median at the
// documented floor.
SnrMap snr_map(const GenerativeModel& model, const SnrMapConfig& cfg);

// CSV export (x_m, z_m, median_snr_db) plus a JSON metadata sidecar with the
// budget, grid, seed and floor.
void write_snr_map(const SnrMap& map, const std::string& csv_path,
                   const std::string& meta_path);

} // namespace uavchan

#endif // UAVCHAN_AIRSIM_HPP
