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

#include "uavchan/airsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace uavchan {

using nlohmann::json;

ArrayConfig ArrayConfig::uav_panel() {
    ArrayConfig c;
    c.rows = 4;
    c.cols = 4;
    c.sectors = {{0.0, 180.0}}; // facing straight down, lower-hemisphere coverage
    return c;
}

ArrayConfig ArrayConfig::gnb_standard() {
    ArrayConfig c;
    c.rows = 8;
    c.cols = 8;
    c.hpbw_az_deg = 90.0; // per-sector beamwidth
    c.hpbw_el_deg = 65.0;
    // 3 sectors, downtilted 100 degrees from vertical.
    c.sectors = {{0.0, 100.0}, {120.0, 100.0}, {-120.0, 100.0}};
    return c;
}

ArrayConfig ArrayConfig::gnb_dedicated() {
    ArrayConfig c;
    c.rows = 8;
    c.cols = 8;
    c.sectors = {{0.0, 0.0}}; // facing up, upper-hemisphere coverage
    return c;
}

double LinkBudget::noise_power_dbm() const {
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("LinkBudget: bandwidth must be positive");
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + losses_db;
}

namespace {

// Local panel frame: boresight is +z_loc, x_loc lies in the global horizontal
// plane (global +x when the boresight points at a pole).
struct PanelFrame {
    Vec3 x_loc, y_loc, z_loc;

    static PanelFrame from(const SectorOrientation& o) {
        PanelFrame f;
        f.z_loc = direction_from_angles(o.az_deg, o.el_deg);
        Vec3 up{0.0, 0.0, 1.0};
        Vec3 x = up.cross(f.z_loc);
        if (x.norm() < 1e-9)
            x = {1.0, 0.0, 0.0};
        f.x_loc = x.normalized();
        f.y_loc = f.z_loc.cross(f.x_loc);
        return f;
    }
};

} // namespace

double element_gain_db(const ArrayConfig& cfg, const SectorOrientation& boresight,
                       const Vec3& direction) {
    Vec3 dir = direction.normalized();
    Vec3 b = direction_from_angles(boresight.az_deg, boresight.el_deg);
    double pole = std::abs(std::sin(boresight.el_deg * std::numbers::pi / 180.0));
    double att;
    if (pole < 1e-9) {
        // Boresight at a pole: azimuth offsets are meaningless, use the
        // rotationally symmetric off-axis pattern.
        double psi = std::acos(std::clamp(dir.dot(b), -1.0, 1.0)) * 180.0 / std::numbers::pi;
        att = 12.0 * (psi / cfg.hpbw_el_deg) * (psi / cfg.hpbw_el_deg);
    } else {
        double az, el;
        angles_from_direction(dir, az, el);
        double d_el = el - boresight.el_deg;
        double d_az = wrap_azimuth_deg(az - boresight.az_deg);
        att = 12.0 * (d_el / cfg.hpbw_el_deg) * (d_el / cfg.hpbw_el_deg) +
              12.0 * (d_az / cfg.hpbw_az_deg) * (d_az / cfg.hpbw_az_deg);
    }
    return -std::min(att, cfg.front_to_back_db);
}

double beamforming_gain_db(const ArrayConfig& cfg, const SectorOrientation& boresight,
                           const Vec3& steer_direction, const Vec3& path_direction) {
    PanelFrame f = PanelFrame::from(boresight);
    Vec3 us = steer_direction.normalized();
    Vec3 up = path_direction.normalized();
    Vec3 diff = up - us;
    // Element (m, n) sits at spacing_wl * ((m - (M-1)/2) x_loc + (n - (N-1)/2) y_loc)
    // wavelengths; the wavelength cancels against k = 2*pi/lambda.
    double cx = 0.5 * (cfg.rows - 1);
    double cy = 0.5 * (cfg.cols - 1);
    double px = 2.0 * std::numbers::pi * cfg.spacing_wl * diff.dot(f.x_loc);
    double py = 2.0 * std::numbers::pi * cfg.spacing_wl * diff.dot(f.y_loc);
    std::complex<double> sum{0.0, 0.0};
    for (int m = 0; m < cfg.rows; ++m)
        for (int n = 0; n < cfg.cols; ++n) {
            double phase = (m - cx) * px + (n - cy) * py;
            sum += std::complex<double>(std::cos(phase), std::sin(phase));
        }
    double n_el = static_cast<double>(cfg.element_count());
    double af_power = std::norm(sum) / n_el;
    double af_db = 10.0 * std::log10(std::max(af_power, 1e-30));
    return af_db + element_gain_db(cfg, boresight, up);
}

double link_snr_db(const PathSet& paths, const LinkBudget& budget, const ArrayConfig& uav,
                   const ArrayConfig& gnb) {
    if (uav.sectors.size() != 1)
        throw std::invalid_argument("link_snr_db: the UAV carries a single panel");
    if (gnb.sectors.empty())
        throw std::invalid_argument("link_snr_db: gNB needs at least one sector");

    struct PathDir {
        Vec3 departure; // at the UAV
        Vec3 arrival;   // at the gNB
        double loss_db;
    };
    std::vector<PathDir> dirs;
    for (const auto& e : paths.entries) {
        if (!e.present())
            continue;
        dirs.push_back({direction_from_angles(e.aod_az_deg, e.aod_el_deg),
                        direction_from_angles(e.aoa_az_deg, e.aoa_el_deg), e.loss_db});
    }
    if (dirs.empty())
        return kSnrNoLinkSentinel;

    const SectorOrientation& uav_b = uav.sectors.front();
    double best_snr = kSnrNoLinkSentinel;
    for (const auto& sector : gnb.sectors) {
        // Steer both arrays at the strongest element-weighted path.
        int best = 0;
        double best_metric = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            double m = -dirs[k].loss_db + element_gain_db(uav, uav_b, dirs[k].departure) +
                       element_gain_db(gnb, sector, dirs[k].arrival);
            if (m > best_metric) {
                best_metric = m;
                best = static_cast<int>(k);
            }
        }
        const Vec3& steer_tx = dirs[best].departure;
        const Vec3& steer_rx = dirs[best].arrival;

        // Non-coherent power sum over paths.
        double rx_mw = 0.0;
        for (const auto& p : dirs) {
            double g_tx = beamforming_gain_db(uav, uav_b, steer_tx, p.departure);
            double g_rx = beamforming_gain_db(gnb, sector, steer_rx, p.arrival);
            rx_mw += std::pow(10.0, (budget.tx_power_dbm + g_tx + g_rx - p.loss_db) / 10.0);
        }
        double snr = 10.0 * std::log10(rx_mw) - budget.noise_power_dbm();
        best_snr = std::max(best_snr, snr);
    }
    return best_snr;
}

SnrMap snr_map(const GenerativeModel& model, const SnrMapConfig& cfg) {
    if (!model.trained())
        throw std::logic_error("snr_map: model not trained");
    if (cfg.x_step_m <= 0.0 || cfg.z_step_m <= 0.0 || cfg.n_realizations <= 0)
        throw std::invalid_argument("snr_map: bad grid or realization count");

    SnrMap map;
    map.config = cfg;
    for (double x = cfg.x_min_m; x <= cfg.x_max_m + 1e-9; x += cfg.x_step_m)
        map.x_m.push_back(x);
    for (double z = cfg.z_min_m; z <= cfg.z_max_m + 1e-9; z += cfg.z_step_m)
        map.z_m.push_back(z);

    double h_gnb = (cfg.gnb_type == GnbType::Standard) ? cfg.gnb_height_standard_m
                                                       : cfg.gnb_height_dedicated_m;
    ArrayConfig uav = ArrayConfig::uav_panel();
    ArrayConfig gnb = (cfg.gnb_type == GnbType::Standard) ? ArrayConfig::gnb_standard()
                                                          : ArrayConfig::gnb_dedicated();

    Rng root(cfg.seed);
    map.median_db.assign(map.z_m.size(), std::vector<double>(map.x_m.size(), 0.0));
    for (std::size_t iz = 0; iz < map.z_m.size(); ++iz) {
        for (std::size_t ix = 0; ix < map.x_m.size(); ++ix) {
            LinkCondition u;
            u.gnb_type = cfg.gnb_type;
            u.dx_m = map.x_m[ix];
            u.dy_m = 0.0;
            u.dz_m = map.z_m[iz] - h_gnb;
            if (u.d3d() < 0.1)
                u.dx_m = 0.1; // grid point on top of the gNB antenna

            Rng sub = root.substream(iz * map.x_m.size() + ix);
            std::vector<double> snrs(cfg.n_realizations);
            for (int r = 0; r < cfg.n_realizations; ++r) {
                PathSet paths = generate_link(model, u, LatentDraw::from_rng(sub));
                double snr = link_snr_db(paths, cfg.budget, uav, gnb);
                snrs[r] = std::isinf(snr) ? cfg.nolink_floor_db : snr;
            }
            std::sort(snrs.begin(), snrs.end());
            std::size_t n = snrs.size();
            double median = (n % 2 == 1) ? snrs[n / 2]
                                         : 0.5 * (snrs[n / 2 - 1] + snrs[n / 2]);
            map.median_db[iz][ix] = median;
        }
    }
    return map;
}

void write_snr_map(const SnrMap& map, const std::string& csv_path,
                   const std::string& meta_path) {
    std::ofstream out(csv_path);
    if (!out)
        throw std::runtime_error("write_snr_map: cannot open '" + csv_path + "'");
    out << "x_m,z_m,median_snr_db\n";
    char buf[96];
    for (std::size_t iz = 0; iz < map.z_m.size(); ++iz)
        for (std::size_t ix = 0; ix < map.x_m.size(); ++ix) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", map.x_m[ix], map.z_m[iz],
                          map.median_db[iz][ix]);
            out << buf;
        }
    if (!out)
        throw std::runtime_error("write_snr_map: write failed for '" + csv_path + "'");

    const SnrMapConfig& c = map.config;
    json meta{
        {"gnb_type", to_string(c.gnb_type)},
        {"grid",
         json{{"x_min_m", c.x_min_m},
              {"x_max_m", c.x_max_m},
              {"x_step_m", c.x_step_m},
              {"z_min_m", c.z_min_m},
              {"z_max_m", c.z_max_m},
              {"z_step_m", c.z_step_m}}},
        {"n_realizations", c.n_realizations},
        {"seed", c.seed},
        {"nolink_floor_db", c.nolink_floor_db},
        {"budget",
         json{{"carrier_hz", c.budget.carrier_hz},
              {"bandwidth_hz", c.budget.bandwidth_hz},
              {"tx_power_dbm", c.budget.tx_power_dbm},
              {"losses_db", c.budget.losses_db},
              {"noise_power_dbm", c.budget.noise_power_dbm()}}},
    };
    std::ofstream mout(meta_path);
    if (!mout)
        throw std::runtime_error("write_snr_map: cannot open '" + meta_path + "'");
    mout << meta.dump(1) << '\n';
}

} // namespace uavchan
