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

#include "uavchan/pathcodec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavchan {

double friis_loss(double d3d_m, double f_hz) {
    if (d3d_m <= 0.0 || f_hz <= 0.0)
        throw std::invalid_argument("friis_loss: distance and frequency must be positive");
    return 20.0 * std::log10(4.0 * std::numbers::pi * d3d_m * f_hz / kSpeedOfLight);
}

LosGeometry los_geometry(const Vec3& d, double f_hz) {
    double d3d = d.norm();
    if (d3d <= 0.0)
        throw std::invalid_argument("los_geometry: zero displacement");
    LosGeometry g;
    // d points from the gNB to the UAV: departure at the UAV looks along -d,
    // arrival at the gNB along +d.
    angles_from_direction(-d, g.phi_tx_deg, g.theta_tx_deg);
    angles_from_direction(d, g.phi_rx_deg, g.theta_rx_deg);
    g.tau_los_s = d3d / kSpeedOfLight;
    g.loss_los_db = friis_loss(d3d, f_hz);
    return g;
}

CodecScalers fit_codec_scalers(const Dataset& train) {
    std::vector<std::vector<double>> gains;
    std::vector<std::vector<double>> delays;
    for (const auto& rec : train.records) {
        LosGeometry geo;
        bool have_geo = false;
        for (const auto& e : rec.paths.entries) {
            if (!e.present() || e.is_los)
                continue;
            if (!have_geo) {
                geo = los_geometry(rec.condition.displacement(), train.carrier_hz);
                have_geo = true;
            }
            gains.push_back({kAbsentLossDb - e.loss_db});
            delays.push_back({std::max(0.0, e.delay_s - geo.tau_los_s)});
        }
    }
    if (gains.empty())
        throw std::invalid_argument("fit_codec_scalers: training data has no NLOS paths");
    std::vector<double> pin{0.0};
    CodecScalers s;
    s.gain = MinMaxScaler::fit(gains, &pin);
    s.delay = MinMaxScaler::fit(delays, &pin);
    return s;
}

PathSet strip_los(const PathSet& paths) {
    PathSet out;
    int j = 0;
    for (const auto& e : paths.entries)
        if (e.present() && !e.is_los)
            out.entries[j++] = e;
    return out;
}

PathVector encode_nlos(const PathSet& paths, const Vec3& d, double f_hz,
                       const CodecScalers& scalers) {
    if (!scalers.fitted())
        throw std::logic_error("encode_nlos: scalers not fitted");
    LosGeometry geo = los_geometry(d, f_hz); // reference even when LOS is blocked

    PathVector y{};
    int slot = 0;
    for (const auto& e : paths.entries) {
        if (!e.present())
            continue;
        if (e.is_los)
            throw std::invalid_argument("encode_nlos: LOS entry must be removed first");
        double* blk = y.data() + static_cast<std::size_t>(slot) * kParamsPerPath;
        blk[0] = scalers.gain.apply1(0, kAbsentLossDb - e.loss_db);
        blk[1] = wrap_azimuth_deg(e.aoa_az_deg - geo.phi_rx_deg) / 180.0;
        blk[2] = wrap_azimuth_deg(e.aoa_el_deg - geo.theta_rx_deg) / 180.0;
        blk[3] = wrap_azimuth_deg(e.aod_az_deg - geo.phi_tx_deg) / 180.0;
        blk[4] = wrap_azimuth_deg(e.aod_el_deg - geo.theta_tx_deg) / 180.0;
        blk[5] = scalers.delay.apply1(0, std::max(0.0, e.delay_s - geo.tau_los_s));
        ++slot;
    }
    return y;
}

PathSet decode_nlos(const PathVector& y, const Vec3& d, double f_hz,
                    const CodecScalers& scalers, double absent_eps) {
    if (!scalers.fitted())
        throw std::logic_error("decode_nlos: scalers not fitted");
    LosGeometry geo = los_geometry(d, f_hz);

    PathSet out;
    int slot = 0;
    for (int k = 0; k < kMaxPaths; ++k) {
        const double* blk = y.data() + static_cast<std::size_t>(k) * kParamsPerPath;
        double gain = std::clamp(blk[0], 0.0, 1.0);
        if (gain <= absent_eps)
            continue; // generated noise around zero stays absent
        PathEntry e;
        e.loss_db = kAbsentLossDb - scalers.gain.invert1(0, gain);
        e.aoa_az_deg = wrap_azimuth_deg(geo.phi_rx_deg + std::clamp(blk[1], -1.0, 1.0) * 180.0);
        e.aoa_el_deg = wrap_elevation_deg(geo.theta_rx_deg + std::clamp(blk[2], -1.0, 1.0) * 180.0);
        e.aod_az_deg = wrap_azimuth_deg(geo.phi_tx_deg + std::clamp(blk[3], -1.0, 1.0) * 180.0);
        e.aod_el_deg = wrap_elevation_deg(geo.theta_tx_deg + std::clamp(blk[4], -1.0, 1.0) * 180.0);
        e.delay_s = geo.tau_los_s + scalers.delay.invert1(0, std::clamp(blk[5], 0.0, 1.0));
        e.is_los = false;
        out.entries[slot++] = e;
    }
    return out;
}

PathSet assemble_full_pathset(const PathSet& nlos, LinkState state, const Vec3& d, double f_hz) {
    if (nlos.has_los())
        throw std::invalid_argument("assemble_full_pathset: nlos input carries a LOS entry");

    if (state == LinkState::NoLink)
        return PathSet{};

    PathSet compacted = nlos;
    compacted.compact();

    if (state == LinkState::Nlos)
        return compacted;

    LosGeometry geo = los_geometry(d, f_hz);
    PathEntry los;
    los.loss_db = geo.loss_los_db;
    los.aoa_az_deg = geo.phi_rx_deg;
    los.aoa_el_deg = geo.theta_rx_deg;
    los.aod_az_deg = geo.phi_tx_deg;
    los.aod_el_deg = geo.theta_tx_deg;
    los.delay_s = geo.tau_los_s;
    los.is_los = true;

    // If all 20 slots are occupied, drop the weakest NLOS path.
    int n = compacted.present_count();
    if (n == kMaxPaths) {
        int weakest = 0;
        for (int k = 1; k < kMaxPaths; ++k)
            if (compacted.entries[k].loss_db > compacted.entries[weakest].loss_db)
                weakest = k;
        for (int k = weakest; k + 1 < kMaxPaths; ++k)
            compacted.entries[k] = compacted.entries[k + 1];
        compacted.entries[kMaxPaths - 1] = PathEntry{};
        --n;
    }

    PathSet out;
    out.entries[0] = los;
    for (int k = 0; k < n; ++k)
        out.entries[k + 1] = compacted.entries[k];
    return out;
}

} // namespace uavchan
