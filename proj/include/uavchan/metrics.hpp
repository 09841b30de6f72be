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

#ifndef UAVCHAN_METRICS_HPP
#define UAVCHAN_METRICS_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "uavchan/domain.hpp"

namespace uavchan {

// Evaluation statistics for intra- and inter-environment comparisons.

enum class OmniMode { PowerSum, StrongestPath };

// Omnidirectional path loss of one link: -10*log10(sum_k 10^(-loss_k/10))
// over present paths (total received power with unit-gain antennas), or the
// strongest path's loss under OmniMode::StrongestPath. Throws on NoLink sets.
double omni_pathloss(const PathSet& paths, OmniMode mode = OmniMode::PowerSum);

// Sorted empirical sample set.
struct CdfSamples {
    std::vector<double> values; // ascending

    static CdfSamples from(std::vector<double> v);
    std::size_t size() const { return values.size(); }
};

// Wasserstein-1 distance as the integrated absolute difference of the two
// piecewise-constant empirical CDFs over the merged support. For equal
// sample counts this equals the mean absolute difference of sorted pairs
// (cross-checked by an independent oracle in the tests).
double wasserstein1(const CdfSamples& p, const CdfSamples& q);

struct GridSpec {
    double d2d_bin_m = 20.0;
    double dz_bin_m = 5.0;
};

struct PlosGridCell {
    GnbType type = GnbType::Standard;
    double d2d_lo_m = 0.0;
    double dz_lo_m = 0.0;
    long n_links = 0;
    double empirical = 0.0;
    double model = 0.0;
};

struct PlosGridReport {
    std::vector<PlosGridCell> cells; // nonempty bins only
    double mae = 0.0;
};

// Model P_LOS evaluated at (d2D, dz, type), typically a closure over a
// trained predictor or a closed-form baseline.
using PlosFn = std::function<double(double d2d_m, double dz_m, GnbType type)>;

// Bins the test links by (type, d2D, dz), compares the per-bin empirical LOS
// fraction against the model probability at the bin center, and reports the
// MAE over nonempty bins. Links with no paths count as non-LOS.
PlosGridReport plos_grid_mae(const PlosFn& model_probs, const Dataset& test,
                             const GridSpec& grid);

// Raw relative-angle observations: for every link, every present path within
// threshold_db of the strongest path contributes its four angles relative to
// the LOS direction (computed from the displacement even when blocked).
struct AngleSamples {
    // indexed [angle][observation]; angle order: aoa_az, aoa_el, aod_az, aod_el
    std::array<std::vector<double>, 4> rel_angle_deg;
    std::array<std::vector<double>, 4> d3d_m;
};

constexpr std::array<const char*, 4> kAngleNames = {"aoa_az", "aoa_el", "aod_az", "aod_el"};

AngleSamples relative_angle_samples(const Dataset& data, double threshold_db = 30.0);

struct AngularHistogram {
    std::vector<double> d3d_edges_m;    // size n_dist + 1
    std::vector<double> angle_edges_deg; // size n_angle + 1
    // normalized per distance bin: [angle_kind][dist_bin][angle_bin]
    std::array<std::vector<std::vector<double>>, 4> density;
};

// 2D histograms (relative angle x distance) for each of the four angles,
// column-normalized so each nonempty distance bin sums to 1.
AngularHistogram angular_distribution(const Dataset& data, double threshold_db = 30.0,
                                      double d3d_bin_m = 100.0, double angle_bin_deg = 5.0);

// Interquartile range of the relative angle per distance bin, computed from
// the raw samples of one angle kind. Bins with fewer than min_count
// observations report NaN.
std::vector<double> angular_iqr_by_distance(const AngleSamples& samples, int angle_kind,
                                            const std::vector<double>& d3d_edges_m,
                                            int min_count = 10);

// Two-column text export (value, cumulative fraction), sorted ascending.
void export_cdf(const CdfSamples& samples, const std::string& path);
CdfSamples import_cdf(const std::string& path);

} // namespace uavchan

#endif // UAVCHAN_METRICS_HPP
