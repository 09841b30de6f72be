# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the python module: formula spot values, a tiny training
run, generation determinism, and metric sanity."""

import math

import pytest

import uavchan as uc


def test_formula_spot_values():
    assert uc.friis_loss(1.0, 28e9) == pytest.approx(61.39, abs=0.01)
    assert uc.friis_loss(100.0, 28e9) == pytest.approx(uc.friis_loss(1.0, 28e9) + 40.0)
    assert uc.plos_3gpp(10.0, 10.0) == 1.0
    assert uc.plos_3gpp(10.0, 100.0) == pytest.approx(0.2310, abs=1e-4)
    assert uc.plos_3gpp(60.0, 500.0) == pytest.approx(0.8309, abs=1e-4)
    nlos = uc.pathloss_3gpp(60.0, 200.0, 2.0, "NLOS")
    los = uc.pathloss_3gpp(60.0, 200.0, 2.0, "LOS")
    assert nlos >= los


def test_wasserstein_matches_sorted_pairs():
    assert uc.wasserstein1([0.0, 1.0], [0.5, 1.5]) == 0.5
    assert uc.wasserstein1([3.0, 1.0, 2.0], [3.0, 1.0, 2.0]) == 0.0


def test_dataset_generation_and_split():
    cfg = uc.OracleConfig()
    data = uc.generate_city(cfg, 1000, seed=3)
    assert len(data) == 1000
    assert data.carrier_hz == 28e9
    train, test = uc.split(data, 0.75, seed=1)
    assert len(train) == 750
    assert len(test) == 250
    states = {data.link_state(i) for i in range(0, 1000, 7)}
    assert states <= {"LOS", "NLOS", "NoLink"}

    # A LOS link's first path is the deterministic geometric one.
    for i in range(1000):
        if data.link_state(i) == "LOS":
            paths = data.paths(i)
            _, dx, dy, dz = data.condition(i)
            d3d = math.sqrt(dx * dx + dy * dy + dz * dz)
            assert paths[0, 0] == pytest.approx(uc.friis_loss(d3d, data.carrier_hz))
            assert paths[0, 6] == 1.0
            break


def test_dataset_csv_roundtrip(tmp_path):
    cfg = uc.OracleConfig()
    data = uc.generate_city(cfg, 50, seed=5)
    path = str(tmp_path / "ds.csv")
    uc.write_dataset(data, path)
    back = uc.read_dataset(path)
    assert len(back) == len(data)
    assert back.condition(7) == pytest.approx(data.condition(7), rel=1e-6)


def test_train_generate_deterministic(tmp_path):
    cfg = uc.OracleConfig()
    data = uc.generate_city(cfg, 600, seed=11)
    model = uc.train(data, link_state_epochs=10, vae_epochs=10, vae_lr=1e-3, seed=4)

    probs = uc.predict_state_probs(model, "dedicated", 100.0, 0.0, 58.0)
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    assert all(p >= 0.0 for p in probs)

    conds = [("dedicated", 100.0, 0.0, 58.0), ("standard", 250.0, 40.0, 88.0)]
    a = model.generate(conds, seed=7)
    b = model.generate(conds, seed=7)
    assert len(a) == 2
    assert a[0].shape == (20, 7)
    assert (a[0] == b[0]).all()
    assert (a[1] == b[1]).all()

    # Persistence round trip preserves generation exactly.
    path = str(tmp_path / "model.json")
    model.save(path)
    loaded = uc.load_model(path)
    c = loaded.generate(conds, seed=7)
    assert (a[0] == c[0]).all()

    # Present paths admit the omnidirectional path-loss statistic.
    for arr in a:
        if (arr[:, 0] < 200).any():
            pl = uc.omni_pathloss(arr)
            assert 40.0 < pl < 200.0


def test_link_snr_and_map():
    cfg = uc.OracleConfig()
    data = uc.generate_city(cfg, 400, seed=13)
    model = uc.train(data, link_state_epochs=8, vae_epochs=8, vae_lr=1e-3, seed=2)

    # Single vertical LOS path: textbook budget arithmetic.
    gen = model.generate([("dedicated", 0.0, 0.0, 100.0)], seed=1)
    x, z, grid = uc.snr_map(model, "dedicated", x_step_m=250.0, z_step_m=65.0,
                            n_realizations=5, seed=3)
    assert grid.shape == (len(z), len(x))
    x2, z2, grid2 = uc.snr_map(model, "dedicated", x_step_m=250.0, z_step_m=65.0,
                               n_realizations=5, seed=3)
    assert (grid == grid2).all()

    for arr in gen:
        snr = uc.link_snr(arr, "dedicated")
        assert snr == snr or snr == float("-inf")  # finite or the NoLink sentinel
