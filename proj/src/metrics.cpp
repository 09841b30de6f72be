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

#include "uavchan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "uavchan/pathcodec.hpp"

namespace uavchan {

double omni_pathloss(const PathSet& paths, OmniMode mode) {
    double power = 0.0;
    double strongest = kAbsentLossDb;
    bool any = false;
    for (const auto& e : paths.entries) {
        if (!e.present())
            continue;
        any = true;
        power += std::pow(10.0, -e.loss_db / 10.0);
        strongest = std::min(strongest, e.loss_db);
    }
    if (!any)
        throw std::invalid_argument("omni_pathloss: no present paths");
    if (mode == OmniMode::StrongestPath)
        return strongest;
    return -10.0 * std::log10(power);
}

CdfSamples CdfSamples::from(std::vector<double> v) {
    if (v.empty())
        throw std::invalid_argument("CdfSamples: empty sample set");
    std::sort(v.begin(), v.end());
    return CdfSamples{std::move(v)};
}

double wasserstein1(const CdfSamples& p, const CdfSamples& q) {
    if (p.values.empty() || q.values.empty())
        throw std::invalid_argument("wasserstein1: empty sample set");
    // Integrate |F_p - F_q| over the merged support of the two empirical
    // CDFs, advancing through both sorted sequences at once.
    const auto& a = p.values;
    const auto& b = q.values;
    double inv_na = 1.0 / static_cast<double>(a.size());
    double inv_nb = 1.0 / static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double fa = 0.0, fb = 0.0;
    double prev = std::min(a.front(), b.front());
    double total = 0.0;
    while (ia < a.size() || ib < b.size()) {
        double next;
        if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib]))
            next = a[ia];
        else
            next = b[ib];
        total += std::abs(fa - fb) * (next - prev);
        while (ia < a.size() && a[ia] == next) {
            fa += inv_na;
            ++ia;
        }
        while (ib < b.size() && b[ib] == next) {
            fb += inv_nb;
            ++ib;
        }
        prev = next;
    }
    return total;
}

PlosGridReport plos_grid_mae(const PlosFn& model_probs, const Dataset& test,
                             const GridSpec& grid) {
    if (test.records.empty())
        throw std::invalid_argument("plos_grid_mae: empty dataset");
    if (grid.d2d_bin_m <= 0.0 || grid.dz_bin_m <= 0.0)
        throw std::invalid_argument("plos_grid_mae: bin widths must be positive");

    struct Key {
        int type;
        long i;
        long j;
        bool operator<(const Key& o) const {
            return std::tie(type, i, j) < std::tie(o.type, o.i, o.j);
        }
    };
    struct Acc {
        long n = 0;
        long los = 0;
    };
    std::map<Key, Acc> bins;
    for (const auto& rec : test.records) {
        Key k;
        k.type = rec.condition.gnb_type == GnbType::Standard ? 0 : 1;
        k.i = static_cast<long>(std::floor(rec.condition.d2d() / grid.d2d_bin_m));
        k.j = static_cast<long>(std::floor(rec.condition.dz_m / grid.dz_bin_m));
        Acc& a = bins[k];
        ++a.n;
        if (derive_link_state(rec.paths) == LinkState::Los)
            ++a.los;
    }

    PlosGridReport report;
    double abs_err = 0.0;
    for (const auto& [k, a] : bins) {
        PlosGridCell cell;
        cell.type = k.type == 0 ? GnbType::Standard : GnbType::Dedicated;
        cell.d2d_lo_m = static_cast<double>(k.i) * grid.d2d_bin_m;
        cell.dz_lo_m = static_cast<double>(k.j) * grid.dz_bin_m;
        cell.n_links = a.n;
        cell.empirical = static_cast<double>(a.los) / static_cast<double>(a.n);
        cell.model = model_probs(cell.d2d_lo_m + 0.5 * grid.d2d_bin_m,
                                 cell.dz_lo_m + 0.5 * grid.dz_bin_m, cell.type);
        abs_err += std::abs(cell.model - cell.empirical);
        report.cells.push_back(cell);
    }
    report.mae = abs_err / static_cast<double>(report.cells.size());
    return report;
}

AngleSamples relative_angle_samples(const Dataset& data, double threshold_db) {
    if (data.records.empty())
        throw std::invalid_argument("relative_angle_samples: empty dataset");
    AngleSamples out;
    for (const auto& rec : data.records) {
        double min_loss = kAbsentLossDb;
        for (const auto& e : rec.paths.entries)
            if (e.present())
                min_loss = std::min(min_loss, e.loss_db);
        if (min_loss >= kAbsentLossDb)
            continue; // NoLink
        LosGeometry geo = los_geometry(rec.condition.displacement(), data.carrier_hz);
        double d3d = rec.condition.d3d();
        for (const auto& e : rec.paths.entries) {
            if (!e.present() || e.loss_db > min_loss + threshold_db)
                continue;
            const double rel[4] = {
                wrap_azimuth_deg(e.aoa_az_deg - geo.phi_rx_deg),
                wrap_azimuth_deg(e.aoa_el_deg - geo.theta_rx_deg),
                wrap_azimuth_deg(e.aod_az_deg - geo.phi_tx_deg),
                wrap_azimuth_deg(e.aod_el_deg - geo.theta_tx_deg),
            };
            for (int a = 0; a < 4; ++a) {
                out.rel_angle_deg[a].push_back(rel[a]);
                out.d3d_m[a].push_back(d3d);
            }
        }
    }
    return out;
}

AngularHistogram angular_distribution(const Dataset& data, double threshold_db,
                                      double d3d_bin_m, double angle_bin_deg) {
    if (d3d_bin_m <= 0.0 || angle_bin_deg <= 0.0)
        throw std::invalid_argument("angular_distribution: bin widths must be positive");
    AngleSamples samples = relative_angle_samples(data, threshold_db);

    double d3d_max = 0.0;
    for (const auto& rec : data.records)
        d3d_max = std::max(d3d_max, rec.condition.d3d());
    int n_dist = std::max(1, static_cast<int>(std::ceil(d3d_max / d3d_bin_m)));
    int n_angle = std::max(1, static_cast<int>(std::ceil(360.0 / angle_bin_deg)));

    AngularHistogram h;
    h.d3d_edges_m.resize(n_dist + 1);
    for (int i = 0; i <= n_dist; ++i)
        h.d3d_edges_m[i] = i * d3d_bin_m;
    h.angle_edges_deg.resize(n_angle + 1);
    for (int i = 0; i <= n_angle; ++i)
        h.angle_edges_deg[i] = -180.0 + i * angle_bin_deg;

    for (int a = 0; a < 4; ++a) {
        h.density[a].assign(n_dist, std::vector<double>(n_angle, 0.0));
        for (std::size_t k = 0; k < samples.rel_angle_deg[a].size(); ++k) {
            int di = std::min(n_dist - 1,
                              static_cast<int>(samples.d3d_m[a][k] / d3d_bin_m));
            int ai = std::clamp(
                static_cast<int>((samples.rel_angle_deg[a][k] + 180.0) / angle_bin_deg), 0,
                n_angle - 1);
            h.density[a][di][ai] += 1.0;
        }
        for (auto& col : h.density[a]) {
            double sum = 0.0;
            for (double x : col)
                sum += x;
            if (sum > 0.0)
                for (double& x : col)
                    x /= sum;
        }
    }
    return h;
}

std::vector<double> angular_iqr_by_distance(const AngleSamples& samples, int angle_kind,
                                            const std::vector<double>& d3d_edges_m,
                                            int min_count) {
    if (angle_kind < 0 || angle_kind >= 4)
        throw std::invalid_argument("angular_iqr_by_distance: angle kind out of range");
    if (d3d_edges_m.size() < 2)
        throw std::invalid_argument("angular_iqr_by_distance: need at least one bin");

    std::size_t n_bins = d3d_edges_m.size() - 1;
    std::vector<std::vector<double>> per_bin(n_bins);
    const auto& angles = samples.rel_angle_deg[angle_kind];
    const auto& dists = samples.d3d_m[angle_kind];
    for (std::size_t k = 0; k < angles.size(); ++k) {
        double d = dists[k];
        for (std::size_t b = 0; b < n_bins; ++b) {
            if (d >= d3d_edges_m[b] && d < d3d_edges_m[b + 1]) {
                per_bin[b].push_back(angles[k]);
                break;
            }
        }
    }

    auto quantile = [](std::vector<double>& v, double q) {
        std::sort(v.begin(), v.end());
        double pos = q * static_cast<double>(v.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= v.size())
            return v.back();
        return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
    };

    std::vector<double> iqr(n_bins, std::nan(""));
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (static_cast<int>(per_bin[b].size()) < min_count)
            continue;
        iqr[b] = quantile(per_bin[b], 0.75) - quantile(per_bin[b], 0.25);
    }
    return iqr;
}

void export_cdf(const CdfSamples& samples, const std::string& path) {
    if (samples.values.empty())
        throw std::invalid_argument("export_cdf: empty sample set");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_cdf: cannot open '" + path + "' for writing");
    out << "value,cdf\n";
    char buf[64];
    double n = static_cast<double>(samples.values.size());
    for (std::size_t i = 0; i < samples.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", samples.values[i],
                      static_cast<double>(i + 1) / n);
        out << buf;
    }
    if (!out)
        throw std::runtime_error("export_cdf: write failed for '" + path + "'");
}

CdfSamples import_cdf(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("import_cdf: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "value,cdf")
        throw std::runtime_error("import_cdf: bad header in '" + path + "'");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("import_cdf: malformed row in '" + path + "'");
        values.push_back(std::stod(line.substr(0, comma)));
    }
    return CdfSamples::from(std::move(values));
}

} // namespace uavchan
