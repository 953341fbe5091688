import math

import pytest

import noma_lab


def test_scenarios_listed():
    names = noma_lab.builtin_scenarios()
    assert names[0] == "fig2" and "fig9" in names


def test_run_rows():
    rows = noma_lab.run("fig5", trials=2, seed=3, overrides={"sweep": "P_Am_over_sigma2_dB: 120"})
    assert len(rows) == 6
    assert {r["scheme"] for r in rows} == {"SSPA-1", "SSPA-2", "RA-NOMA"}
    assert all(r["ee_bps_per_w"] > 0 for r in rows)
    again = noma_lab.run("fig5", trials=2, seed=3, overrides={"sweep": "P_Am_over_sigma2_dB: 120"})
    assert rows == again


def test_hata_matches_closed_form():
    assert math.isclose(noma_lab.path_loss_db(1000.0), 126.40328648085746, rel_tol=1e-13)


def test_oracle_small():
    r = noma_lab.oracle({"M": 2, "N": 2, "H": 1, "V": 1, "rng_seed": 7})
    assert math.isclose(r["scas2_ee"], r["exhaustive_ee"], rel_tol=1e-9)
    assert r["dinkelbach_ee"] >= 0.99 * r["grid_ee"]


def test_errors():
    with pytest.raises(ValueError):
        noma_lab.config({"H": 0})
    with pytest.raises(ValueError):
        noma_lab.run("nosuch")


def test_cdf():
    assert noma_lab.cdf([1.0, 1.0, 2.0]) == [(1.0, 2 / 3), (2.0, 1.0)]
    assert noma_lab.CSV_HEADER.startswith("scenario,scheme")
