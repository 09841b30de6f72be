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

#ifndef UAVCHAN_PATHCODEC_HPP
#define UAVCHAN_PATHCODEC_HPP

#include <array>
#include <vector>

#include "uavchan/domain.hpp"
#include "uavchan/numerics.hpp"

namespace uavchan {

// Bidirectional map between raw NLOS path parameters and the normalized
// 120-vector consumed by the VAE, plus the deterministic LOS path.

constexpr int kPathVectorDim = kMaxPaths * kParamsPerPath; // 120

// Layout of the normalized vector: 20 path-major blocks of
//   [gain, rel_aoa_az, rel_aoa_el, rel_aod_az, rel_aod_el, excess_delay].
// Gains and delays land in [0,1] for encoded real data, relative angles in
// [-1,1] (180 degrees maps to one unit).
using PathVector = std::array<double, kPathVectorDim>;

// Deterministic LOS path quantities for a displacement d (gNB -> UAV).
// Departure looks along -d, arrival along +d; tau = d3D / c; loss is Friis.
struct LosGeometry {
    double phi_tx_deg = 0.0;   // departure azimuth at the UAV
    double theta_tx_deg = 0.0; // departure elevation at the UAV, from zenith
    double phi_rx_deg = 0.0;   // arrival azimuth at the gNB
    double theta_rx_deg = 0.0; // arrival elevation at the gNB, from zenith
    double tau_los_s = 0.0;
    double loss_los_db = 0.0;
};

LosGeometry los_geometry(const Vec3& d, double f_hz);

// Free-space loss 20*log10(4*pi*d*f/c) in dB.
double friis_loss(double d3d_m, double f_hz);

// Scalers for the two fitted quantities. Angle normalization is a fixed
// 1/180 scale and is not fitted.
struct CodecScalers {
    MinMaxScaler gain;  // excess path gain 200 - loss_db, lower pinned at 0
    MinMaxScaler delay; // excess delay vs the LOS delay, lower pinned at 0

    bool fitted() const { return gain.fitted() && delay.fitted(); }
};

// Fits gain/delay limits on the training split only. Gains and excess delays
// are collected from every NLOS path of every non-NoLink link; excess delays
// are clamped at 0 before fitting (diffraction-induced early arrivals are
// folded to zero excess).
CodecScalers fit_codec_scalers(const Dataset& train);

// Returns a copy of paths with any LOS entry removed and the rest compacted.
PathSet strip_los(const PathSet& paths);

// Encodes the NLOS paths of one link: gain = scaled(200 - loss), angles
// rotated relative to the LOS direction (computed from d even when the LOS
// path itself is blocked) and scaled by 1/180 with wrap into (-180, 180],
// excess delay = scaled(max(0, delay - tau_los)). Absent slots are all-zero.
// Precondition: paths contains no LOS entry.
PathVector encode_nlos(const PathSet& paths, const Vec3& d, double f_hz,
                       const CodecScalers& scalers);

// Inverts encode_nlos. Gains/delays are clipped to [0,1] and relative angles
// to [-1,1] before inversion; blocks with gain <= absent_eps decode to absent
// slots. Azimuths re-wrap into (-180,180], elevations reflect into [0,180].
PathSet decode_nlos(const PathVector& y, const Vec3& d, double f_hz,
                    const CodecScalers& scalers, double absent_eps = 0.01);

// Composes the full path set for a sampled state: prepends the deterministic
// LOS entry for LOS links (dropping the weakest NLOS path if all 20 slots are
// taken), passes NLOS through, and returns an all-absent set for NoLink.
// Precondition: nlos contains no LOS entry.
PathSet assemble_full_pathset(const PathSet& nlos, LinkState state, const Vec3& d, double f_hz);

} // namespace uavchan

#endif // UAVCHAN_PATHCODEC_HPP
