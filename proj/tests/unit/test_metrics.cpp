// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include "uavchan/citygen.hpp"
#include "uavchan/metrics.hpp"
#include "uavchan/pathcodec.hpp"

using namespace uavchan;

namespace {

PathSet paths_with_losses(std::initializer_list<double> losses) {
    PathSet s;
    int k = 0;
    for (double l : losses) {
        s.entries[k].loss_db = l;
        s.entries[k].aoa_el_deg = 90.0;
        s.entries[k].aod_el_deg = 90.0;
        s.entries[k].delay_s = 1e-6;
        ++k;
    }
    return s;
}

// Independent oracle: mean absolute difference of sorted pairs.
double sorted_pairs_oracle(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

} // namespace

TEST_CASE("omni_pathloss: power sum over present paths") {
    CHECK(omni_pathloss(paths_with_losses({100.0})) == doctest::Approx(100.0));
    CHECK(omni_pathloss(paths_with_losses({100.0, 100.0})) ==
          doctest::Approx(96.9897).epsilon(1e-5));
    CHECK(omni_pathloss(paths_with_losses({90.0})) == doctest::Approx(90.0));
    CHECK(omni_pathloss(paths_with_losses({90.0, 200.0})) == doctest::Approx(90.0));
    CHECK(omni_pathloss(paths_with_losses({90.0, 120.0}), OmniMode::StrongestPath) == 90.0);
    CHECK_THROWS(omni_pathloss(PathSet{}));
}

TEST_CASE("omni_pathloss is order-invariant and monotone under added paths") {
    PathSet a = paths_with_losses({110.0, 95.0, 130.0});
    PathSet b = paths_with_losses({95.0, 130.0, 110.0});
    CHECK(omni_pathloss(a) == doctest::Approx(omni_pathloss(b)).epsilon(1e-12));

    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        PathSet s = paths_with_losses({100.0 + 50.0 * rng.uniform()});
        double before = omni_pathloss(s);
        s.entries[1] = s.entries[0];
        s.entries[1].loss_db = 100.0 + 80.0 * rng.uniform();
        CHECK(omni_pathloss(s) <= before + 1e-12);
    }
}

TEST_CASE("wasserstein1 basics") {
    CdfSamples x = CdfSamples::from({3.0, 1.0, 2.0});
    CHECK(wasserstein1(x, x) == 0.0);
    CHECK(wasserstein1(CdfSamples::from({0.0}), CdfSamples::from({1.0})) == doctest::Approx(1.0));
    CHECK(wasserstein1(CdfSamples::from({0.0, 1.0}), CdfSamples::from({0.5, 1.5})) ==
          doctest::Approx(0.5));
}

TEST_CASE("wasserstein1 equals the sorted-pairs oracle on equal counts") {
    Rng rng(17);
    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.next_below(200);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 50.0 * rng.uniform() - 10.0;
            b[i] = 80.0 * rng.uniform();
        }
        double w = wasserstein1(CdfSamples::from(a), CdfSamples::from(b));
        max_err = std::max(max_err, std::abs(w - sorted_pairs_oracle(a, b)));
    }
    CHECK(max_err < 1e-12);
}

TEST_CASE("wasserstein1 is symmetric, nonnegative, and triangular") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(40), b(40), c(40);
        for (int i = 0; i < 40; ++i) {
            a[i] = rng.normal();
            b[i] = 2.0 * rng.normal() + 1.0;
            c[i] = 0.5 * rng.normal() - 2.0;
        }
        CdfSamples A = CdfSamples::from(a), B = CdfSamples::from(b), C = CdfSamples::from(c);
        double ab = wasserstein1(A, B), ba = wasserstein1(B, A);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= 0.0);
        CHECK(wasserstein1(A, C) <= ab + wasserstein1(B, C) + 1e-12);
    }
}

TEST_CASE("wasserstein1 handles unequal sample counts") {
    // F_p jumps by 1/2 at 0 and 1; F_q jumps by 1/4 at each of .25,.5,.75,1.
    CdfSamples p = CdfSamples::from({0.0, 1.0});
    CdfSamples q = CdfSamples::from({0.25, 0.5, 0.75, 1.0});
    // Piecewise: |.5-0|*.25 + |.5-.25|*.25 + |.5-.5|*.25 + |.5-.75|*.25 = 0.25,
    // matching the optimal transport plan (0 -> {.25,.5}, 1 -> {.75,1}).
    double expect = 0.5 * 0.25 + 0.25 * 0.25 + 0.0 * 0.25 + 0.25 * 0.25;
    CHECK(wasserstein1(p, q) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("plos_grid_mae: perfect and constant models") {
    OracleConfig cfg;
    Dataset data = generate_city(cfg, 4000, 3);
    GridSpec grid;

    // A "model" that reproduces the empirical fractions exactly scores 0.
    PlosGridReport ref = plos_grid_mae(
        [](double, double, GnbType) { return 0.0; }, data, grid);
    std::map<std::tuple<int, long, long>, double> lookup;
    for (const auto& c : ref.cells)
        lookup[{c.type == GnbType::Standard ? 0 : 1,
                static_cast<long>(std::floor(c.d2d_lo_m / grid.d2d_bin_m + 0.5)),
                static_cast<long>(std::floor(c.dz_lo_m / grid.dz_bin_m + 0.5))}] = c.empirical;
    PlosFn perfect = [&](double d2d, double dz, GnbType type) {
        auto key = std::make_tuple(type == GnbType::Standard ? 0 : 1,
                                   static_cast<long>(std::floor(d2d / grid.d2d_bin_m)),
                                   static_cast<long>(std::floor(dz / grid.dz_bin_m)));
        auto it = lookup.find(key);
        return it == lookup.end() ? 0.0 : it->second;
    };
    CHECK(plos_grid_mae(perfect, data, grid).mae == doctest::Approx(0.0));

    // Constant 0.5 against all-LOS data scores 0.5.
    Dataset all_los;
    for (int i = 0; i < 200; ++i) {
        LinkRecord rec;
        rec.condition = {30.0 + i, 0.0, 45.0, GnbType::Standard};
        rec.paths = assemble_full_pathset(PathSet{}, LinkState::Los,
                                          rec.condition.displacement(), 28e9);
        all_los.records.push_back(rec);
    }
    PlosGridReport half = plos_grid_mae(
        [](double, double, GnbType) { return 0.5; }, all_los, grid);
    CHECK(half.mae == doctest::Approx(0.5));
}

TEST_CASE("relative_angle_samples honors the 30 dB threshold") {
    Dataset data;
    LinkRecord rec;
    rec.env_id = "t";
    rec.condition = {100.0, 0.0, 50.0, GnbType::Standard};
    LosGeometry geo = los_geometry(rec.condition.displacement(), data.carrier_hz);

    PathSet nlos;
    auto mk = [&](double loss, double az_off) {
        PathEntry e;
        e.loss_db = loss;
        e.aoa_az_deg = wrap_azimuth_deg(geo.phi_rx_deg + az_off);
        e.aoa_el_deg = geo.theta_rx_deg;
        e.aod_az_deg = geo.phi_tx_deg;
        e.aod_el_deg = geo.theta_tx_deg;
        e.delay_s = geo.tau_los_s + 1e-8;
        return e;
    };
    nlos.entries[0] = mk(100.0, 5.0);  // strongest
    nlos.entries[1] = mk(130.0, 10.0); // exactly 30 dB above: kept
    nlos.entries[2] = mk(131.0, 20.0); // 31 dB above: excluded
    rec.paths = assemble_full_pathset(nlos, LinkState::Nlos, rec.condition.displacement(),
                                      data.carrier_hz);
    data.records.push_back(rec);

    AngleSamples s = relative_angle_samples(data, 30.0);
    REQUIRE(s.rel_angle_deg[0].size() == 2);
    CHECK(s.rel_angle_deg[0][0] == doctest::Approx(5.0));
    CHECK(s.rel_angle_deg[0][1] == doctest::Approx(10.0));
    // Departure angles were LOS-aligned, so their relative angles are zero.
    CHECK(s.rel_angle_deg[2][0] == doctest::Approx(0.0));
}

TEST_CASE("single LOS-aligned path puts all angular mass at zero") {
    Dataset data;
    LinkRecord rec;
    rec.condition = {80.0, 60.0, 40.0, GnbType::Dedicated};
    rec.paths = assemble_full_pathset(PathSet{}, LinkState::Los, rec.condition.displacement(),
                                      data.carrier_hz);
    data.records.push_back(rec);
    AngleSamples s = relative_angle_samples(data, 30.0);
    for (int a = 0; a < 4; ++a) {
        REQUIRE(s.rel_angle_deg[a].size() == 1);
        CHECK(s.rel_angle_deg[a][0] == doctest::Approx(0.0));
    }
}

TEST_CASE("angular_distribution produces column-normalized histograms") {
    OracleConfig cfg;
    Dataset data = generate_city(cfg, 2000, 5);
    AngularHistogram h = angular_distribution(data, 30.0, 100.0, 5.0);
    for (int a = 0; a < 4; ++a)
        for (const auto& col : h.density[a]) {
            double sum = 0.0;
            for (double x : col)
                sum += x;
            CHECK((sum == doctest::Approx(0.0) || sum == doctest::Approx(1.0).epsilon(1e-9)));
        }
}

TEST_CASE("angular IQR narrows with distance on the oracle") {
    OracleConfig cfg;
    Dataset data = generate_city(cfg, 30000, 8);
    AngleSamples s = relative_angle_samples(data, 30.0);
    std::vector<double> edges{0.0, 150.0, 550.0};
    for (int a = 0; a < 4; ++a) {
        auto iqr = angular_iqr_by_distance(s, a, edges, 50);
        REQUIRE(iqr.size() == 2);
        REQUIRE(std::isfinite(iqr[0]));
        REQUIRE(std::isfinite(iqr[1]));
        CHECK(iqr[1] < iqr[0]);
    }
}

TEST_CASE("export_cdf and import_cdf round trip") {
    Rng rng(14);
    std::vector<double> raw(257);
    for (double& x : raw)
        x = 150.0 * rng.uniform();
    CdfSamples s = CdfSamples::from(raw);

    auto path = std::filesystem::temp_directory_path() / "uavchan_cdf.csv";
    export_cdf(s, path.string());
    CdfSamples back = import_cdf(path.string());
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back.values[i] == doctest::Approx(s.values[i]).epsilon(1e-8));
        if (i > 0)
            CHECK(back.values[i] >= back.values[i - 1]);
    }

    // Text format: header + n rows, last cumulative fraction is 1.
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "value,cdf");
    std::string last;
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) {
            last = line;
            ++rows;
        }
    CHECK(rows == s.size());
    CHECK(last.substr(last.find(',') + 1) == "1");
    std::filesystem::remove(path);
}
