// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uavchan/airsim.hpp"
#include "uavchan/citygen.hpp"

using namespace uavchan;

namespace {

PathSet single_vertical_los(double d_m, double f_hz) {
    // Dedicated gNB directly below the UAV: departure straight down, arrival
    // straight up, both panels boresight-aligned.
    Vec3 d{0.0, 0.0, d_m};
    return assemble_full_pathset(PathSet{}, LinkState::Los, d, f_hz);
}

GenerativeModel tiny_model() {
    OracleConfig oc;
    Dataset data = generate_city(oc, 600, 77);
    GenerativeTrainConfig cfg;
    cfg.link_state.epochs = 15;
    cfg.vae.epochs = 15;
    cfg.vae.learning_rate = 1e-3;
    return train_generative_model(data, cfg);
}

} // namespace

TEST_CASE("noise power of the default budget") {
    LinkBudget budget;
    CHECK(budget.noise_power_dbm() == doctest::Approx(-81.98).epsilon(2e-4));
}

TEST_CASE("element gain: boresight peak, -3 dB point, back floor") {
    ArrayConfig cfg = ArrayConfig::gnb_dedicated(); // boresight straight up
    SectorOrientation up{0.0, 0.0};
    CHECK(element_gain_db(cfg, up, {0.0, 0.0, 1.0}) == doctest::Approx(0.0));
    // Half-power point at half the beamwidth off boresight.
    Vec3 half = direction_from_angles(0.0, cfg.hpbw_el_deg / 2.0);
    CHECK(element_gain_db(cfg, up, half) == doctest::Approx(-3.0).epsilon(1e-9));
    // Behind the panel the floor applies.
    CHECK(element_gain_db(cfg, up, {0.0, 0.0, -1.0}) == doctest::Approx(-30.0));

    // Tilted sector: same invariants in the sector frame.
    ArrayConfig std_cfg = ArrayConfig::gnb_standard();
    const SectorOrientation& sec = std_cfg.sectors.front();
    Vec3 boresight = direction_from_angles(sec.az_deg, sec.el_deg);
    CHECK(element_gain_db(std_cfg, sec, boresight) == doctest::Approx(0.0));
    Vec3 off_el = direction_from_angles(sec.az_deg, sec.el_deg + std_cfg.hpbw_el_deg / 2.0);
    CHECK(element_gain_db(std_cfg, sec, off_el) == doctest::Approx(-3.0).epsilon(1e-9));
    Vec3 off_az = direction_from_angles(sec.az_deg + std_cfg.hpbw_az_deg / 2.0, sec.el_deg);
    CHECK(element_gain_db(std_cfg, sec, off_az) == doctest::Approx(-3.0).epsilon(1e-9));
    Vec3 back = direction_from_angles(sec.az_deg + 180.0, 180.0 - sec.el_deg);
    CHECK(element_gain_db(std_cfg, sec, back) == doctest::Approx(-30.0));
}

TEST_CASE("beamforming gain: coherent sums at self-steering") {
    SectorOrientation up{0.0, 0.0};
    ArrayConfig gnb = ArrayConfig::gnb_dedicated();
    Vec3 bs{0.0, 0.0, 1.0};
    CHECK(beamforming_gain_db(gnb, up, bs, bs) == doctest::Approx(10.0 * std::log10(64.0)));
    CHECK(beamforming_gain_db(gnb, up, bs, bs) == doctest::Approx(18.06).epsilon(1e-3));

    ArrayConfig uav = ArrayConfig::uav_panel();
    SectorOrientation down{0.0, 180.0};
    Vec3 dn{0.0, 0.0, -1.0};
    CHECK(beamforming_gain_db(uav, down, dn, dn) == doctest::Approx(10.0 * std::log10(16.0)));
    CHECK(beamforming_gain_db(uav, down, dn, dn) == doctest::Approx(12.04).epsilon(1e-3));

    // Self-steering off boresight still collects the full array factor but
    // pays the element pattern.
    Vec3 off = direction_from_angles(30.0, 20.0);
    double g = beamforming_gain_db(gnb, up, off, off);
    CHECK(g == doctest::Approx(10.0 * std::log10(64.0) + element_gain_db(gnb, up, off))
                   .epsilon(1e-9));
}

TEST_CASE("beamforming gain: first null of the 8-element row") {
    // Half-wavelength spacing, 8 elements: first array-factor null where the
    // projected direction offset is 1/(N*spacing) = 0.25.
    ArrayConfig gnb = ArrayConfig::gnb_dedicated();
    SectorOrientation up{0.0, 0.0};
    Vec3 steer{0.0, 0.0, 1.0};
    double sin_theta = 1.0 / (8.0 * gnb.spacing_wl);
    // The panel's local x axis for an up-facing boresight is global +x.
    Vec3 null_dir{sin_theta, 0.0, std::sqrt(1.0 - sin_theta * sin_theta)};
    double g = beamforming_gain_db(gnb, up, steer, null_dir);
    CHECK(g < -40.0);
}

TEST_CASE("link_snr: single-path budget arithmetic") {
    LinkBudget budget;
    ArrayConfig uav = ArrayConfig::uav_panel();
    ArrayConfig gnb = ArrayConfig::gnb_dedicated();
    PathSet paths = single_vertical_los(100.0, budget.carrier_hz);
    double snr = link_snr_db(paths, budget, uav, gnb);
    double expect = 23.0 - friis_loss(100.0, 28e9) + 10.0 * std::log10(64.0) +
                    10.0 * std::log10(16.0) - budget.noise_power_dbm();
    CHECK(snr == doctest::Approx(expect).epsilon(1e-9));
    CHECK(snr == doctest::Approx(33.69).epsilon(2e-3));
}

TEST_CASE("link_snr: NoLink sentinel and path-order invariance") {
    LinkBudget budget;
    ArrayConfig uav = ArrayConfig::uav_panel();
    ArrayConfig gnb = ArrayConfig::gnb_dedicated();
    CHECK(std::isinf(link_snr_db(PathSet{}, budget, uav, gnb)));

    OracleConfig oc;
    Dataset data = generate_city(oc, 300, 15);
    for (const auto& rec : data.records) {
        if (derive_link_state(rec.paths) == LinkState::NoLink)
            continue;
        PathSet shuffled = rec.paths;
        std::reverse(shuffled.entries.begin(),
                     shuffled.entries.begin() + shuffled.present_count());
        double a = link_snr_db(rec.paths, budget, uav, gnb);
        double b = link_snr_db(shuffled, budget, uav, gnb);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("link_snr never drops when a path is added") {
    LinkBudget budget;
    ArrayConfig uav = ArrayConfig::uav_panel();
    ArrayConfig gnb = ArrayConfig::gnb_dedicated();
    Rng rng(91);
    for (int trial = 0; trial < 30; ++trial) {
        PathSet one = single_vertical_los(50.0 + 200.0 * rng.uniform(), budget.carrier_hz);
        double before = link_snr_db(one, budget, uav, gnb);
        PathSet two = one;
        PathEntry extra;
        extra.loss_db = 120.0 + 60.0 * rng.uniform();
        extra.aoa_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
        extra.aoa_el_deg = 180.0 * rng.uniform();
        extra.aod_az_deg = wrap_azimuth_deg(360.0 * rng.uniform() - 180.0);
        extra.aod_el_deg = 180.0 * rng.uniform();
        extra.delay_s = two.entries[0].delay_s + 1e-8;
        two.entries[1] = extra;
        double after = link_snr_db(two, budget, uav, gnb);
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("standard gNB picks its best sector") {
    LinkBudget budget;
    ArrayConfig uav = ArrayConfig::uav_panel();
    ArrayConfig std_gnb = ArrayConfig::gnb_standard();
    // A horizontal LOS path toward azimuth 120 lines up with the second
    // sector; restricting the gNB to only that sector must give the same SNR.
    Vec3 d = direction_from_angles(120.0, 90.0) * 150.0;
    PathSet paths = assemble_full_pathset(PathSet{}, LinkState::Los, d, budget.carrier_hz);
    double all = link_snr_db(paths, budget, uav, std_gnb);
    ArrayConfig only_second = std_gnb;
    only_second.sectors = {std_gnb.sectors[1]};
    double second = link_snr_db(paths, budget, uav, only_second);
    CHECK(all == doctest::Approx(second).epsilon(1e-12));
    ArrayConfig only_first = std_gnb;
    only_first.sectors = {std_gnb.sectors[0]};
    CHECK(link_snr_db(paths, budget, uav, only_first) <= all + 1e-12);
}

TEST_CASE("snr_map is deterministic and grid-shaped") {
    GenerativeModel model = tiny_model();
    SnrMapConfig cfg;
    cfg.x_max_m = 100.0;
    cfg.x_step_m = 50.0;
    cfg.z_max_m = 60.0;
    cfg.z_step_m = 30.0;
    cfg.n_realizations = 12;
    cfg.seed = 5;

    SnrMap a = snr_map(model, cfg);
    SnrMap b = snr_map(model, cfg);
    REQUIRE(a.x_m.size() == 3);
    REQUIRE(a.z_m.size() == 3);
    REQUIRE(a.median_db.size() == a.z_m.size());
    for (std::size_t iz = 0; iz < a.z_m.size(); ++iz) {
        REQUIRE(a.median_db[iz].size() == a.x_m.size());
        for (std::size_t ix = 0; ix < a.x_m.size(); ++ix)
            CHECK(a.median_db[iz][ix] == b.median_db[iz][ix]);
    }
    for (std::size_t iz = 0; iz < a.z_m.size(); ++iz)
        for (std::size_t ix = 0; ix < a.x_m.size(); ++ix)
            CHECK(a.median_db[iz][ix] >= cfg.nolink_floor_db);
}
