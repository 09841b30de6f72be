// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "uavchan/pathcodec.hpp"

using namespace uavchan;

namespace {

Dataset two_nlos_losses(double loss_a, double loss_b, double excess_a_s, double excess_b_s) {
    Dataset data;
    LinkRecord rec;
    rec.env_id = "fit";
    rec.condition = {100.0, 0.0, 50.0, GnbType::Standard};
    double tau = rec.condition.d3d() / kSpeedOfLight;
    PathEntry a, b;
    a.loss_db = loss_a;
    a.delay_s = tau + excess_a_s;
    b.loss_db = loss_b;
    b.delay_s = tau + excess_b_s;
    rec.paths.entries[0] = a;
    rec.paths.entries[1] = b;
    data.records.push_back(rec);
    return data;
}

} // namespace

TEST_CASE("friis_loss reference values") {
    CHECK(friis_loss(1.0, 28e9) == doctest::Approx(61.39).epsilon(2e-4));
    CHECK(friis_loss(100.0, 28e9) == doctest::Approx(friis_loss(1.0, 28e9) + 40.0).epsilon(1e-12));
    double ratio = friis_loss(10.0, 2 * 3.5e9) - friis_loss(10.0, 3.5e9);
    CHECK(ratio == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK_THROWS(friis_loss(0.0, 28e9));
    CHECK_THROWS(friis_loss(10.0, -1.0));
}

TEST_CASE("friis_loss grows in distance and frequency") {
    CHECK(friis_loss(50.0, 28e9) < friis_loss(51.0, 28e9));
    CHECK(friis_loss(50.0, 28e9) < friis_loss(50.0, 29e9));
}

TEST_CASE("los_geometry: vertical link") {
    // UAV 100 m above the gNB: d = UAV - gNB = (0, 0, 100). Departure at the
    // UAV points straight down, arrival at the gNB straight up.
    LosGeometry g = los_geometry({0.0, 0.0, 100.0}, 28e9);
    CHECK(g.theta_tx_deg == doctest::Approx(180.0));
    CHECK(g.theta_rx_deg == doctest::Approx(0.0));
    CHECK(g.tau_los_s == doctest::Approx(100.0 / 299792458.0).epsilon(1e-12));
    CHECK(g.tau_los_s == doctest::Approx(333.56e-9).epsilon(1e-4));
    CHECK(g.loss_los_db == doctest::Approx(friis_loss(100.0, 28e9)));
}

TEST_CASE("los_geometry: horizontal link") {
    LosGeometry g = los_geometry({100.0, 0.0, 0.0}, 28e9);
    CHECK(g.phi_tx_deg == doctest::Approx(180.0));
    CHECK(g.phi_rx_deg == doctest::Approx(0.0));
    CHECK(g.theta_tx_deg == doctest::Approx(90.0));
    CHECK(g.theta_rx_deg == doctest::Approx(90.0));
}

TEST_CASE("los_geometry: delay scales with distance") {
    LosGeometry g1 = los_geometry({30.0, 40.0, 50.0}, 28e9);
    LosGeometry g2 = los_geometry({60.0, 80.0, 100.0}, 28e9);
    CHECK(g2.tau_los_s == doctest::Approx(2.0 * g1.tau_los_s).epsilon(1e-12));
    CHECK_THROWS(los_geometry({0.0, 0.0, 0.0}, 28e9));
}

TEST_CASE("fit_codec_scalers pins lower limits at zero") {
    Dataset data = two_nlos_losses(120.0, 80.0, 0.0, 500e-9);
    CodecScalers s = fit_codec_scalers(data);
    CHECK(s.gain.lower()[0] == 0.0);
    CHECK(s.gain.upper()[0] == doctest::Approx(120.0)); // max excess gain = 200 - 80
    CHECK(s.gain.apply1(0, 200.0 - 80.0) == doctest::Approx(1.0));
    CHECK(s.gain.apply1(0, 200.0 - 200.0) == doctest::Approx(0.0)); // absent pins to zero
    CHECK(s.delay.lower()[0] == 0.0);
    CHECK(s.delay.apply1(0, 250e-9) == doctest::Approx(0.5));

    Dataset empty;
    LinkRecord rec;
    rec.condition = {10.0, 0.0, 10.0, GnbType::Standard};
    rec.paths = assemble_full_pathset(PathSet{}, LinkState::Los, rec.condition.displacement(),
                                      28e9); // LOS only, no NLOS paths
    empty.records.push_back(rec);
    CHECK_THROWS(fit_codec_scalers(empty));
}

TEST_CASE("encode_nlos: aligned path and absent slots") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);

    Vec3 d{100.0, 0.0, 50.0};
    LosGeometry geo = los_geometry(d, 28e9);
    PathSet paths;
    PathEntry e;
    e.loss_db = 120.0;
    e.aoa_az_deg = geo.phi_rx_deg;
    e.aoa_el_deg = geo.theta_rx_deg;
    e.aod_az_deg = geo.phi_tx_deg;
    e.aod_el_deg = geo.theta_tx_deg;
    e.delay_s = geo.tau_los_s;
    paths.entries[0] = e;

    PathVector y = encode_nlos(paths, d, 28e9, scalers);
    CHECK(y[0] > 0.0);
    for (int j = 1; j < kParamsPerPath; ++j)
        CHECK(y[j] == doctest::Approx(0.0)); // aligned, zero excess
    for (int j = kParamsPerPath; j < kPathVectorDim; ++j)
        CHECK(y[j] == 0.0); // absent blocks are all-zero
}

TEST_CASE("encode_nlos: azimuth wrap past the 180-degree seam") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);

    // LOS arrival azimuth 175 deg; a path 10 deg beyond it sits at -175 deg
    // after wrapping and its relative azimuth is +10 deg.
    Vec3 d = direction_from_angles(175.0, 90.0) * 200.0;
    LosGeometry geo = los_geometry(d, 28e9);
    CHECK(geo.phi_rx_deg == doctest::Approx(175.0));

    PathSet paths;
    PathEntry e;
    e.loss_db = 120.0;
    e.aoa_az_deg = wrap_azimuth_deg(185.0);
    CHECK(e.aoa_az_deg == doctest::Approx(-175.0));
    e.aoa_el_deg = geo.theta_rx_deg;
    e.aod_az_deg = geo.phi_tx_deg;
    e.aod_el_deg = geo.theta_tx_deg;
    e.delay_s = geo.tau_los_s;
    paths.entries[0] = e;

    PathVector y = encode_nlos(paths, d, 28e9, scalers);
    CHECK(y[1] == doctest::Approx(10.0 / 180.0).epsilon(1e-9));
}

TEST_CASE("encode_nlos rejects LOS entries") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);
    PathSet paths;
    paths.entries[0].loss_db = 100.0;
    paths.entries[0].is_los = true;
    CHECK_THROWS(encode_nlos(paths, {100.0, 0.0, 50.0}, 28e9, scalers));
}

TEST_CASE("decode_nlos: all-zero vector decodes to an absent set") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);
    PathVector y{};
    PathSet out = decode_nlos(y, {100.0, 0.0, 50.0}, 28e9, scalers);
    CHECK(out.present_count() == 0);
}

TEST_CASE("decode_nlos: gains at the absence threshold") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);
    Vec3 d{100.0, 0.0, 50.0};

    PathVector y{};
    y[0] = 0.009; // below absent_eps = 0.01
    CHECK(decode_nlos(y, d, 28e9, scalers).present_count() == 0);

    y[0] = 0.011; // just above: a weak path close to the loss floor
    PathSet out = decode_nlos(y, d, 28e9, scalers);
    REQUIRE(out.present_count() == 1);
    double expect_loss = kAbsentLossDb - scalers.gain.invert1(0, 0.011);
    CHECK(out.entries[0].loss_db == doctest::Approx(expect_loss).epsilon(1e-12));
    CHECK(out.entries[0].loss_db < kAbsentLossDb);
}

TEST_CASE("encode then decode is the identity on oracle-like paths") {
    Rng rng(404);
    // Fit on wide-range data so random paths stay inside the scaler limits.
    Dataset fit = two_nlos_losses(199.0, 80.0, 0.0, 2000e-9);
    CodecScalers scalers = fit_codec_scalers(fit);

    double max_err = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Vec3 d{400.0 * (rng.uniform() - 0.5), 400.0 * (rng.uniform() - 0.5),
               30.0 + 90.0 * rng.uniform()};
        LosGeometry geo = los_geometry(d, 28e9);
        PathSet paths;
        int n = 1 + static_cast<int>(rng.next_below(kMaxPaths));
        for (int k = 0; k < n; ++k) {
            PathEntry e;
            e.loss_db = 85.0 + 110.0 * rng.uniform(); // encoded gain stays above eps
            e.aoa_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
            e.aoa_el_deg = 180.0 * rng.uniform();
            e.aod_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
            e.aod_el_deg = 180.0 * rng.uniform();
            e.delay_s = geo.tau_los_s + 1900e-9 * rng.uniform();
            paths.entries[k] = e;
        }
        PathVector y = encode_nlos(paths, d, 28e9, scalers);
        PathSet back = decode_nlos(y, d, 28e9, scalers);
        REQUIRE(back.present_count() == n);
        for (int k = 0; k < n; ++k) {
            max_err = std::max(max_err, std::abs(back.entries[k].loss_db - paths.entries[k].loss_db));
            max_err =
                std::max(max_err, std::abs(back.entries[k].aoa_az_deg - paths.entries[k].aoa_az_deg));
            max_err =
                std::max(max_err, std::abs(back.entries[k].aoa_el_deg - paths.entries[k].aoa_el_deg));
            max_err =
                std::max(max_err, std::abs(back.entries[k].aod_az_deg - paths.entries[k].aod_az_deg));
            max_err =
                std::max(max_err, std::abs(back.entries[k].aod_el_deg - paths.entries[k].aod_el_deg));
            max_err = std::max(max_err,
                               std::abs(back.entries[k].delay_s - paths.entries[k].delay_s) * 1e9);
        }
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("relative angles stay in (-1, 1] and decode re-wraps") {
    Dataset fit = two_nlos_losses(150.0, 90.0, 0.0, 800e-9);
    CodecScalers scalers = fit_codec_scalers(fit);
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        Vec3 d{200.0 * (rng.uniform() - 0.5), 200.0 * (rng.uniform() - 0.5),
               20.0 + 80.0 * rng.uniform()};
        PathSet paths;
        PathEntry e;
        e.loss_db = 100.0 + 80.0 * rng.uniform();
        e.aoa_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
        e.aoa_el_deg = 180.0 * rng.uniform();
        e.aod_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
        e.aod_el_deg = 180.0 * rng.uniform();
        e.delay_s = los_geometry(d, 28e9).tau_los_s + 700e-9 * rng.uniform();
        paths.entries[0] = e;
        PathVector y = encode_nlos(paths, d, 28e9, scalers);
        for (int j = 1; j <= 4; ++j) {
            CHECK(y[j] > -1.0 - 1e-12);
            CHECK(y[j] <= 1.0 + 1e-12);
        }
        PathSet back = decode_nlos(y, d, 28e9, scalers);
        REQUIRE(back.present_count() == 1);
        CHECK(back.entries[0].aoa_az_deg > -180.0);
        CHECK(back.entries[0].aoa_az_deg <= 180.0);
        CHECK(back.entries[0].aoa_el_deg >= 0.0);
        CHECK(back.entries[0].aoa_el_deg <= 180.0);
    }
}

TEST_CASE("assemble_full_pathset handles the three states") {
    Vec3 d{60.0, 80.0, 50.0};
    PathSet nlos;

    PathSet none = assemble_full_pathset(nlos, LinkState::NoLink, d, 28e9);
    CHECK(none.present_count() == 0);

    PathSet los = assemble_full_pathset(nlos, LinkState::Los, d, 28e9);
    REQUIRE(los.present_count() == 1);
    CHECK(los.entries[0].is_los);
    CHECK(los.entries[0].loss_db == doctest::Approx(friis_loss(d.norm(), 28e9)));
    CHECK(los.entries[0].delay_s == doctest::Approx(d.norm() / kSpeedOfLight));

    for (int k = 0; k < kMaxPaths; ++k) {
        nlos.entries[k].loss_db = 100.0 + k;
        nlos.entries[k].delay_s = 1e-6;
        nlos.entries[k].aoa_el_deg = 90.0;
        nlos.entries[k].aod_el_deg = 90.0;
    }
    PathSet full = assemble_full_pathset(nlos, LinkState::Los, d, 28e9);
    CHECK(full.present_count() == kMaxPaths);
    CHECK(full.entries[0].is_los);
    // The weakest NLOS path (loss 119) was dropped.
    double worst = 0.0;
    int los_count = 0;
    for (const auto& e : full.entries) {
        if (e.is_los)
            ++los_count;
        else
            worst = std::max(worst, e.loss_db);
    }
    CHECK(los_count == 1);
    CHECK(worst == doctest::Approx(118.0));

    PathSet pass = assemble_full_pathset(nlos, LinkState::Nlos, d, 28e9);
    CHECK(pass.present_count() == kMaxPaths);
    CHECK_FALSE(pass.has_los());

    PathSet bad;
    bad.entries[0].loss_db = 90.0;
    bad.entries[0].is_los = true;
    CHECK_THROWS(assemble_full_pathset(bad, LinkState::Los, d, 28e9));
}
