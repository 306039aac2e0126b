import math

import numpy as np
import pytest

import ellsys


def cr_rhs(G):
    x = np.arange(G) / G
    f = np.zeros((2, G, G))
    f[0] = np.sin(2 * np.pi * x)[:, None]
    return f


def test_tensor_roundtrip_and_contract():
    A = ellsys.catalog.cauchy_riemann()
    assert (A.N, A.n) == (2, 2)
    Q = np.array([[1.0, 2.0], [3.0, 4.0]])
    # (Q11 + Q22, -Q12 + Q21)
    np.testing.assert_allclose(A.contract(Q), [5.0, 1.0])
    B = ellsys.Tensor(2, 2, A.entries)
    np.testing.assert_allclose(B.contract(Q), A.contract(Q))


def test_ellipticity_matches_closed_form():
    A = ellsys.catalog.generalized_cr(2, 1, 1, 1)
    r = ellsys.ellipticity(A)
    assert r["elliptic"]
    assert r["nu"] == pytest.approx(2 / math.sqrt(5), abs=1e-9)
    assert ellsys.brute_nu(A, 20000) >= r["nu"] - 1e-12


def test_zero_tensor_is_rejected():
    with pytest.raises(ellsys.NonEllipticError):
        ellsys.solve_linear(ellsys.Tensor(2, 2), cr_rhs(8))
    assert issubclass(ellsys.NonEllipticError, ellsys.Error)


def test_linear_solve_against_exact_mode():
    G = 16
    A = ellsys.catalog.cauchy_riemann()
    u, report = ellsys.solve_linear(A, cr_rhs(G))
    assert report["residual"] < 1e-12
    assert report["grid"] == "16^2/L=1"
    # D1 u1 = sin(2 pi x1), D1 u2 = 0 for the mode along x1; u1 = -cos(2 pi x1) / (2 pi)
    x = np.arange(G) / G
    np.testing.assert_allclose(u[0], (-np.cos(2 * np.pi * x) / (2 * np.pi))[:, None] * np.ones(G), atol=1e-12)
    np.testing.assert_allclose(u[1], 0.0, atol=1e-12)
    np.testing.assert_allclose(ellsys.apply_operator(A, u), cr_rhs(G), atol=1e-12)


def test_dense_oracle_agrees_with_spectral_solve():
    A = ellsys.catalog.dirac()
    f = ellsys.random_band_limited(3, 4, 4, 1, seed=2)
    u, _ = ellsys.solve_linear(A, f)
    dense = ellsys.solve_dense(A, f)
    assert dense is not None
    np.testing.assert_allclose(ellsys.gradient(u), ellsys.gradient(dense), atol=1e-9)


def test_apriori_ratio_bounded():
    A = ellsys.catalog.dirac()
    f = ellsys.random_band_limited(3, 8, 4, 2, seed=5)
    u, _ = ellsys.solve_linear(A, f)
    r = ellsys.verify_apriori(A, u, f)
    assert r["ratio_grad"] <= 1 + 1e-10
    assert r["ratio_sobolev"] is not None


def test_representation_error_within_bound():
    A = ellsys.catalog.cauchy_riemann()
    f = cr_rhs(16)
    u, _ = ellsys.solve_linear(A, f)
    um, rep = ellsys.solve_representation(A, f, "rational", 100.0)
    rel = ellsys.norm_l2(ellsys.gradient(um - u)) / ellsys.norm_l2(ellsys.gradient(u))
    assert rel <= rep["error_bound"] * (1 + 1e-9)


def test_campanato_converges_for_catalog_operator():
    A = ellsys.catalog.cauchy_riemann()
    F = ellsys.catalog.lipschitz_perturbation(A, 0.5)
    f = ellsys.random_band_limited(2, 32, 2, 1, seed=4)
    f /= ellsys.norm_l2(f)
    u, trace = ellsys.campanato_solve(F, f)
    assert trace["converged"]
    assert trace["K_theory"] == pytest.approx(0.5)
    r = ellsys.evaluate_operator(F, u) - f
    r -= r.mean(axis=(1, 2), keepdims=True)
    assert ellsys.norm_l2(r) < 1e-9


def test_python_callable_operator():
    A = ellsys.catalog.cauchy_riemann()
    lam = 0.3

    def F(x, Q):
        v = A.contract(Q)
        v[1] += lam * math.tanh(Q[1, 0])
        return v

    op = ellsys.Operator.from_callable(F, A, declared_nearness=lam)
    f = ellsys.random_band_limited(2, 16, 2, 1, seed=9)
    u, trace = ellsys.campanato_solve(op, f)
    assert trace["converged"]
    w, _ = ellsys.campanato_solve(op, 0.5 * f)
    assert ellsys.verify_comparison(op, u, w)["holds"]


def test_catalog_lookup():
    assert "dirac" in ellsys.catalog.names()
    assert isinstance(ellsys.catalog.get("generalized_cr(1,1,1,1)"), ellsys.Tensor)
    assert isinstance(ellsys.catalog.get("variable_linear(cauchy_riemann, 0.2)"), ellsys.Operator)
    assert ellsys.catalog.documented_nu("dirac") == 1.0
    with pytest.raises(ellsys.LookupError):
        ellsys.catalog.get("no_such_thing")


def test_efof_roundtrip(tmp_path):
    u = ellsys.random_band_limited(3, 4, 2, 1, seed=1)
    path = str(tmp_path / "u.efof")
    ellsys.write_efof(path, u)
    np.testing.assert_array_equal(ellsys.read_efof(path), u)
    with open(path, "r+b") as fh:
        fh.write(b"XXXX")
    with pytest.raises(ellsys.FormatError):
        ellsys.read_efof(path)
