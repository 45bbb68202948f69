import json

import numpy as np
import pytest

import hardylab as hl


def test_series_and_symbols():
    s = hl.to_series("z2z", 8)
    assert s.coeffs[:3] == [0, 1, 1]
    assert s.exact_degree == 2
    assert hl.evaluate("z2z", 0.5) == pytest.approx(0.75)
    sym = hl.Symbol({"tag": "moebius", "a": [0.3, 0.0]})
    assert abs(sym(0.3)) < 1e-15
    assert hl.Symbol(json.loads(sym.to_json())) == sym


def test_toeplitz_and_composition():
    t = hl.toeplitz_matrix("z", 6)
    assert np.allclose(t, np.eye(6, k=-1))
    c = hl.weighted_composition_matrix("z/2", "z+1", 8)
    # column k holds (1 + z) (z/2)^k
    assert c[3, 3] == pytest.approx(1 / 8)
    assert c[4, 3] == pytest.approx(1 / 8)


def test_intertwine_exact_zero():
    one = hl.Symbol({"tag": "polynomial", "coeffs": [1]})
    x = hl.weighted_composition_matrix("z/2", one, 64)
    r = hl.intertwine_residual(x, "z/2", "z/4")
    assert r["exact_zero"]
    assert r["block_rule"] == "lower-triangular"


def test_kernel_eigen():
    r = hl.kernel_eigen_residual("z2z", 0.3 + 0.2j, 256)
    assert r["residual"] <= r["tail_bound"]


def test_geometry():
    assert hl.valence("z2z", -0.2)["valence"] == 2
    assert hl.cardioid_membership(1.9)
    assert not hl.cardioid_membership(-1.1)
    assert not hl.image_contained("z", "z/2", 8, 32)["contained"]


def test_subordination_and_ee():
    r = hl.subordination_solve("z2z", hl.Symbol({"tag": "polynomial", "coeffs": [0, 0.25]}), 64)
    assert r["ok"]
    w = r["omega"]
    assert w[1] == pytest.approx(0.25)
    assert hl.ee_membership("z", 2.0)["status"] == "in"
    assert hl.ee_predicate_z2z(1.0)


def test_finite_dim():
    a = np.diag([1.0, 2.0, 3.0]).astype(complex)
    b = np.diag([2.0, 5.0, 7.0]).astype(complex)
    p = hl.finite_dim_partner(a, b, 2.0)
    y = p["y"]
    assert np.linalg.norm(y @ b - a @ y) < 1e-12
    assert np.linalg.norm(y) > 0.5
    with pytest.raises(hl.MathError):
        hl.finite_dim_partner(a, b, 4.0)


def test_cli_roundtrip():
    code, out, _ = hl.run_cli(["check-intertwine", "--phi", "z/2", "--psi", "z/4", "--x", "identity", "--N", "32"])
    assert code == 0
    assert json.loads(out)["command"] == "check-intertwine"
    code, _, _ = hl.run_cli(["no-such-command"])
    assert code == 1
