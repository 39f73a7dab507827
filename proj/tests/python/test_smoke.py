import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import macroreal

DATA = Path(os.environ.get("MACROREAL_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def projectors(s):
    return [(I2 + s) / 2, (I2 - s) / 2]


def test_operator_residual_matches_numpy():
    # sum_a P_a E P_a - S E S with E = |+><+| and S = 1.
    a, b = projectors(SZ), projectors(SX)
    expected = max(np.linalg.norm(sum(p @ e @ p for p in a) - e, 2) for e in b)
    got = macroreal.nsit_operator_residual(a, b, I2)
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(0.5, abs=1e-12)


def test_pauli_commutators():
    pairwise, sandwich = macroreal.commutators([SX], [SY], I2, projective_a=False, projective_b=False)
    assert pairwise == pytest.approx(2.0)
    assert sandwich < 1e-12
    assert macroreal.nsit_operator_residual([SX], [SY], I2, projective_a=False, projective_b=False) < 1e-12


def test_non_projective_input_raises():
    with pytest.raises(ValueError):
        macroreal.nsit_operator_residual([SX], projectors(SY), I2)


def test_interferometer_scenario_round_trip():
    s = macroreal.mz_scenario(0.5, 0.5, 0.0, 0.3)
    reports = {r["name"]: r for r in macroreal.check_conditions(s)}
    assert not reports["NSIT_(1)2"]["holds"]
    bundle = macroreal.mr012(json.dumps(s))
    assert [m["name"] for m in bundle["members"]][:1] == ["NSIT_(1)2"]


def test_two_time_insufficiency_file():
    text = (DATA / "scenarios" / "two_time_insufficient.json").read_text()
    reports = {r["name"]: r for r in macroreal.check_conditions(text)}
    for name in ("NSIT_(0)1", "NSIT_(0)2", "NSIT_(1)2"):
        assert reports[name]["residual"] < 1e-10
    bundle = macroreal.mr012(text)
    assert bundle["marginal_mismatch"] == pytest.approx(0.25, abs=1e-12)


def test_lgi_bound():
    assert macroreal.lgi_max_search() == pytest.approx(1.5, abs=1e-3)
    rng = np.random.default_rng(3)
    for _ in range(200):
        q = rng.uniform()
        c = math.sqrt(q * (1 - q)) * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * math.pi))
        assert macroreal.mz_lgi_value(rng.uniform(), rng.uniform(), rng.uniform(0, 2 * math.pi), q, c) <= 1.5 + 1e-9


def test_table_on_sup_states():
    summary = macroreal.verify_table1(mix=False)
    assert summary["mismatches"] == 0
    assert summary["points"] == 3 * 11 * 11 * 12


def test_sweep_is_deterministic():
    assert macroreal.sweep(100, 5) == macroreal.sweep(100, 5)


def test_overlaps():
    v, err = macroreal.coherent_delta_overlap(1.0)
    assert v == pytest.approx(2 * math.sqrt(2) / 3, abs=2e-3)
    assert err >= 0
    assert macroreal.quadrature_overlap("XX", math.inf)[0] == pytest.approx((8 / 9) ** 0.25)
    analytic = macroreal.quadrature_overlap("PX", 1.0)[0]
    assert macroreal.quadrature_overlap("PX", 1.0, numeric=True)[0] == pytest.approx(analytic, abs=1e-3)
    assert macroreal.ring_overlap(6.0, 9.0)[0] >= 0.999
    assert macroreal.fock_overlap("2m^2", 0.0)[0] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        macroreal.quadrature_overlap("XY", 1.0)
