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

#include "uavchan/citygen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uavchan/pathcodec.hpp"

namespace uavchan {

namespace {

Alpha3GPP alpha_from_values(const std::array<double, 6>& values) {
    Alpha3GPP a;
    for (int i = 0; i < 6; ++i)
        a.multipliers[i] = values[i] / kAlphaNominal[i];
    return a;
}

double sample_laplacian(Rng& rng, double scale) {
    double u = rng.uniform() - 0.5;
    return -scale * (u < 0.0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
}

int sample_poisson(Rng& rng, double mean) {
    // Knuth's method; fine for the small means used here.
    double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > limit);
    return k - 1;
}

void validate_config(const OracleConfig& cfg) {
    if (cfg.carrier_hz <= 0.0 || cfg.d2d_min_m <= 0.0 || cfg.d2d_max_m <= cfg.d2d_min_m)
        throw std::invalid_argument("OracleConfig: bad carrier or d2D range");
    if (cfg.nlos_shadow_sigma_db < 0.0 || cfg.nlos_path_count_mean <= 0.0)
        throw std::invalid_argument("OracleConfig: bad NLOS law");
    if (cfg.angle_scale0_deg <= 0.0 || cfg.angle_decay_m <= 0.0 || cfg.angle_min_deg <= 0.0)
        throw std::invalid_argument("OracleConfig: bad angular-spread law");
    if (cfg.excess_delay_mean_s <= 0.0)
        throw std::invalid_argument("OracleConfig: bad excess-delay law");
    if (cfg.dedicated_fraction < 0.0 || cfg.dedicated_fraction > 1.0)
        throw std::invalid_argument("OracleConfig: dedicated_fraction outside [0, 1]");
}

} // namespace

double oracle_plos(const OracleConfig& cfg, GnbType type, double d2d_m, double uav_alt_m) {
    GppCondition c;
    c.h_m = uav_alt_m;
    c.d2d_m = d2d_m;
    c.h_gnb_m = (type == GnbType::Standard) ? cfg.gnb_height_standard_m
                                            : cfg.gnb_height_dedicated_m;
    const auto& values = (type == GnbType::Standard) ? cfg.plos_alpha_standard
                                                     : cfg.plos_alpha_dedicated;
    return plos_3gpp(c, alpha_from_values(values));
}

double oracle_p_nolink_given_not_los(const OracleConfig& cfg, double d3d_m) {
    double frac = (d3d_m - cfg.nolink_cutoff_m) / cfg.nolink_ramp_m;
    return std::clamp(frac, 0.0, cfg.nolink_max_frac);
}

double oracle_angle_scale_deg(const OracleConfig& cfg, double d3d_m) {
    return std::max(cfg.angle_min_deg, cfg.angle_scale0_deg * std::exp(-d3d_m / cfg.angle_decay_m));
}

Dataset generate_city(const OracleConfig& cfg, std::size_t n_links, std::uint64_t seed) {
    validate_config(cfg);
    if (n_links == 0)
        throw std::invalid_argument("generate_city: need at least one link");

    Dataset data;
    data.carrier_hz = cfg.carrier_hz;
    data.records.reserve(n_links);

    Rng root(seed);
    for (std::size_t i = 0; i < n_links; ++i) {
        Rng rng = root.substream(i);

        LinkRecord rec;
        rec.env_id = cfg.env_id;
        LinkCondition& u = rec.condition;
        u.gnb_type = rng.uniform() < cfg.dedicated_fraction ? GnbType::Dedicated
                                                            : GnbType::Standard;
        double alt = cfg.uav_altitudes_m[rng.next_below(cfg.uav_altitudes_m.size())];
        double h_gnb = (u.gnb_type == GnbType::Standard) ? cfg.gnb_height_standard_m
                                                         : cfg.gnb_height_dedicated_m;
        double d2d = cfg.d2d_min_m + (cfg.d2d_max_m - cfg.d2d_min_m) * rng.uniform();
        double phi = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
        u.dx_m = d2d * std::cos(phi);
        u.dy_m = d2d * std::sin(phi);
        u.dz_m = alt - h_gnb;

        double d3d = u.d3d();
        double p_los = oracle_plos(cfg, u.gnb_type, d2d, alt);
        LinkState state;
        if (rng.uniform() < p_los)
            state = LinkState::Los;
        else if (rng.uniform() < oracle_p_nolink_given_not_los(cfg, d3d))
            state = LinkState::NoLink;
        else
            state = LinkState::Nlos;

        PathSet nlos;
        if (state != LinkState::NoLink) {
            int n_paths = sample_poisson(rng, cfg.nlos_path_count_mean);
            n_paths = std::min(n_paths, kMaxPaths - 1); // room for the LOS slot
            if (state == LinkState::Nlos)
                n_paths = std::max(n_paths, 1);

            LosGeometry geo = los_geometry(u.displacement(), cfg.carrier_hz);
            double mean_loss =
                cfg.nlos_intercept_db + 10.0 * cfg.nlos_exponent * std::log10(d3d);
            double ang_scale = oracle_angle_scale_deg(cfg, d3d);
            for (int k = 0; k < n_paths; ++k) {
                PathEntry e;
                double loss = mean_loss + cfg.nlos_shadow_sigma_db * rng.normal();
                e.loss_db = std::clamp(loss, geo.loss_los_db + 0.5, kAbsentLossDb - 0.5);
                e.aoa_az_deg =
                    wrap_azimuth_deg(geo.phi_rx_deg + sample_laplacian(rng, ang_scale));
                e.aoa_el_deg =
                    wrap_elevation_deg(geo.theta_rx_deg + sample_laplacian(rng, ang_scale));
                e.aod_az_deg =
                    wrap_azimuth_deg(geo.phi_tx_deg + sample_laplacian(rng, ang_scale));
                e.aod_el_deg =
                    wrap_elevation_deg(geo.theta_tx_deg + sample_laplacian(rng, ang_scale));
                e.delay_s = geo.tau_los_s -
                            cfg.excess_delay_mean_s * std::log(1.0 - rng.uniform());
                e.is_los = false;
                nlos.entries[k] = e;
            }
            // Strongest first, the order ray tracers usually report.
            std::sort(nlos.entries.begin(), nlos.entries.begin() + n_paths,
                      [](const PathEntry& a, const PathEntry& b) { return a.loss_db < b.loss_db; });
        }
        rec.paths = assemble_full_pathset(nlos, state, u.displacement(), cfg.carrier_hz);
        data.records.push_back(std::move(rec));
    }
    return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
    if (data.records.empty())
        throw std::invalid_argument("split: empty dataset");
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("split: fraction outside [0, 1]");

    std::size_t n = data.records.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);

    std::size_t n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    Dataset train, test;
    train.carrier_hz = test.carrier_hz = data.carrier_hz;
    train.records.reserve(n_train);
    test.records.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_train ? train : test).records.push_back(data.records[order[i]]);
    return {std::move(train), std::move(test)};
}

// ------------------------------------------------------------- CSV I/O ----

namespace {

std::string build_header() {
    std::string h = "env_id,gnb_type,dx_m,dy_m,dz_m";
    for (int k = 1; k <= kMaxPaths; ++k) {
        std::string s = std::to_string(k);
        h += ",loss_db_" + s + ",aoa_az_deg_" + s + ",aoa_el_deg_" + s + ",aod_az_deg_" + s +
             ",aod_el_deg_" + s + ",delay_ns_" + s;
    }
    h += ",los";
    return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("dataset row " + std::to_string(row) + ", column " +
                                 std::to_string(col + 1) + ": non-numeric cell '" + cell + "'");
    }
}

} // namespace

const std::string kDatasetCsvHeader = build_header();

void write_dataset(const Dataset& data, const std::string& path) {
    if (data.records.empty())
        throw std::invalid_argument("write_dataset: empty dataset");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_dataset: cannot open '" + path + "' for writing");

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", data.carrier_hz);
    out << "# carrier_hz=" << buf << '\n';
    out << kDatasetCsvHeader << '\n';
    for (const auto& rec : data.records) {
        if (rec.env_id.find(',') != std::string::npos)
            throw std::invalid_argument("write_dataset: env_id must not contain commas");
        out << rec.env_id << ',' << to_string(rec.condition.gnb_type);
        std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g", rec.condition.dx_m,
                      rec.condition.dy_m, rec.condition.dz_m);
        out << buf;
        for (const auto& e : rec.paths.entries) {
            std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g", e.loss_db, e.aoa_az_deg,
                          e.aoa_el_deg);
            out << buf;
            std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g", e.aod_az_deg, e.aod_el_deg,
                          e.delay_s * 1e9);
            out << buf;
        }
        out << ',' << (rec.paths.entries[0].is_los ? 1 : 0) << '\n';
    }
    if (!out)
        throw std::runtime_error("write_dataset: write failed for '" + path + "'");
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_dataset: cannot open '" + path + "'");

    Dataset data;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    const std::size_t n_cols = 5 + kMaxPaths * kParamsPerPath + 1;

    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const std::string key = "# carrier_hz=";
            if (line.rfind(key, 0) == 0)
                data.carrier_hz = parse_cell(line.substr(key.size()), row, 0);
            continue;
        }
        if (!header_seen) {
            if (line != kDatasetCsvHeader)
                throw std::runtime_error("read_dataset: malformed header in '" + path +
                                         "' (expected the pinned dataset schema)");
            header_seen = true;
            continue;
        }

        auto fields = split_csv_line(line);
        if (fields.size() != n_cols)
            throw std::runtime_error("dataset row " + std::to_string(row) + ": expected " +
                                     std::to_string(n_cols) + " columns, found " +
                                     std::to_string(fields.size()));

        LinkRecord rec;
        rec.env_id = fields[0];
        try {
            rec.condition.gnb_type = gnb_type_from_string(fields[1]);
        } catch (const std::exception& e) {
            throw std::runtime_error("dataset row " + std::to_string(row) + ": " + e.what());
        }
        rec.condition.dx_m = parse_cell(fields[2], row, 2);
        rec.condition.dy_m = parse_cell(fields[3], row, 3);
        rec.condition.dz_m = parse_cell(fields[4], row, 4);

        std::size_t col = 5;
        for (int k = 0; k < kMaxPaths; ++k) {
            PathEntry& e = rec.paths.entries[k];
            e.loss_db = parse_cell(fields[col], row, col);
            e.aoa_az_deg = parse_cell(fields[col + 1], row, col + 1);
            e.aoa_el_deg = parse_cell(fields[col + 2], row, col + 2);
            e.aod_az_deg = parse_cell(fields[col + 3], row, col + 3);
            e.aod_el_deg = parse_cell(fields[col + 4], row, col + 4);
            e.delay_s = parse_cell(fields[col + 5], row, col + 5) * 1e-9;
            col += kParamsPerPath;
        }

        double los_flag = parse_cell(fields[col], row, col);
        if (los_flag != 0.0 && los_flag != 1.0)
            throw std::runtime_error("dataset row " + std::to_string(row) +
                                     ": los flag must be 0 or 1");
        if (los_flag == 1.0 && !rec.paths.entries[0].present())
            throw std::runtime_error("dataset row " + std::to_string(row) +
                                     ": los flag set but path 1 is absent");
        rec.paths.entries[0].is_los = (los_flag == 1.0);

        ValidationReport report = validate_record(rec);
        if (!report.ok())
            throw std::runtime_error("dataset row " + std::to_string(row) + ": " +
                                     report.violations.front());
        data.records.push_back(std::move(rec));
    }
    if (!header_seen)
        throw std::runtime_error("read_dataset: '" + path + "' has no header row");
    if (data.records.empty())
        throw std::runtime_error("read_dataset: '" + path + "' holds no records");
    return data;
}

std::vector<LinkCondition> read_conditions(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_conditions: cannot open '" + path + "'");
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    std::vector<LinkCondition> conds;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            if (line != "gnb_type,dx_m,dy_m,dz_m")
                throw std::runtime_error("read_conditions: malformed header in '" + path + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error("conditions row " + std::to_string(row) +
                                     ": expected 4 columns");
        LinkCondition u;
        try {
            u.gnb_type = gnb_type_from_string(fields[0]);
        } catch (const std::exception& e) {
            throw std::runtime_error("conditions row " + std::to_string(row) + ": " + e.what());
        }
        u.dx_m = parse_cell(fields[1], row, 1);
        u.dy_m = parse_cell(fields[2], row, 2);
        u.dz_m = parse_cell(fields[3], row, 3);
        if (u.d3d() <= 0.0)
            throw std::runtime_error("conditions row " + std::to_string(row) +
                                     ": zero displacement");
        conds.push_back(u);
    }
    if (conds.empty())
        throw std::runtime_error("read_conditions: '" + path + "' holds no conditions");
    return conds;
}

void write_conditions(const std::vector<LinkCondition>& conds, const std::string& path) {
    if (conds.empty())
        throw std::invalid_argument("write_conditions: empty condition list");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_conditions: cannot open '" + path + "'");
    out << "gnb_type,dx_m,dy_m,dz_m\n";
    char buf[80];
    for (const auto& u : conds) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", to_string(u.gnb_type), u.dx_m,
                      u.dy_m, u.dz_m);
        out << buf;
    }
}

} // namespace uavchan
