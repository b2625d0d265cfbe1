"""First-kind reduction: series residuals, resonances, L^2 data at 0."""

import numpy as np
import pytest

from orbitlab.discrete_series import DiscreteSeriesParam
from orbitlab.ode_builder import build_system, closed_form_spectrum, to_z_variable
from orbitlab.regular_singular import (
    BoundaryEigenvalue,
    RadiusError,
    evaluate_u,
    fundamental_solution,
    jordanize,
    l2_basis_at_zero,
    l2_dimension_at_zero,
    reduce_at_zero,
    series_residual_relative,
    snap_eigenvalue,
)


def _residual_ok(data, rtol=1e-10):
    worst = max(series_residual_relative(data))
    return worst <= rtol, worst


def _pointwise_residual(data, z):
    # z Y'(z) - M(z) Y(z) via the analytic derivative of the truncation.
    h = 1e-7 * z
    y1 = fundamental_solution(data, z + h)
    y0 = fundamental_solution(data, z - h)
    dy = (y1 - y0) / (2 * h)
    m = data.M0 + z * data.M1 + z * z * data.M2
    return np.linalg.norm(z * dy - m @ fundamental_solution(data, z))


def test_scalar_constant():
    data = reduce_at_zero(np.array([[1.5]]), np.zeros((1, 1)), np.zeros((1, 1)))
    assert data.delta0[0] == pytest.approx(1.5)
    assert data.N[0, 0] == 0
    assert np.allclose(data.U_series[0], [[1.0]])
    ok, worst = _residual_ok(data)
    assert ok, worst


def test_scalar_weber_like():
    # z x' = (1 + z^2) x has solution z e^{z^2/2}: U must be the e^{z^2/2} series.
    data = reduce_at_zero(np.array([[1.0]]), np.zeros((1, 1)), np.array([[1.0]]))
    assert data.delta0[0] == pytest.approx(1.0)
    u4 = [data.U_series[k][0, 0] for k in range(5)]
    assert np.allclose(u4, [1.0, 0.0, 0.5, 0.0, 0.125])
    z0 = 0.1
    y = fundamental_solution(data, z0)[0, 0]
    assert y == pytest.approx(z0 * np.exp(z0 * z0 / 2), rel=1e-12)


def test_resonant_two_by_two_spec_example():
    m0 = np.diag([1.0, 2.0])
    m1 = np.array([[0.0, 0.0], [1.0, 0.0]])
    m2 = np.zeros((2, 2))
    data = reduce_at_zero(m0, m1, m2)
    assert data.d == 1
    b1 = data.B_list[0]
    assert np.linalg.norm(b1) > 0.1          # genuine resonance
    assert abs(b1[1, 0]) > 0.1 and abs(b1[0, 1]) < 1e-12
    assert np.linalg.norm(data.N) > 0.1      # log-mixing in the solution
    # Invertibility of U(0) and the grading property ad(D) B_k = k B_k.
    assert abs(np.linalg.det(data.U_series[0])) > 1e-6
    dints = np.diag([np.floor(x.real) for x in data.delta0])
    for k, bk in enumerate(data.B_list, start=1):
        assert np.allclose(dints @ bk - bk @ dints, k * bk, atol=1e-12)
    ok, worst = _residual_ok(data)
    assert ok, worst
    # Pointwise sanity check; the finite-difference derivative limits accuracy.
    for z in np.linspace(0.02, 0.2, 10):
        assert _pointwise_residual(data, z) < 1e-9


def test_nonresonant_diagonalizable_has_trivial_n():
    rng = np.random.default_rng(2)
    for _ in range(8):
        w = rng.uniform(0.3, 0.45, size=3) + np.arange(3) * np.sqrt(2)
        p = rng.normal(size=(3, 3))
        m0 = np.linalg.solve(p, np.diag(w) @ p)
        m1 = rng.normal(size=(3, 3))
        m2 = rng.normal(size=(3, 3))
        data = reduce_at_zero(m0, m1, m2)
        assert np.linalg.norm(data.N) < 1e-9
        assert all(np.linalg.norm(b) < 1e-9 for b in data.B_list)
        ok, worst = _residual_ok(data)
        assert ok, worst


def test_defective_m0():
    m0 = np.array([[1.0, 0.0], [1.0, 1.0]])
    m1 = np.array([[0.2, 0.1], [0.0, -0.3]])
    data = reduce_at_zero(m0, m1, np.zeros((2, 2)))
    assert np.linalg.norm(data.N) > 0.1  # nilpotent part of M0 survives
    ok, worst = _residual_ok(data)
    assert ok, worst


def test_random_resonant_systems_residual():
    rng = np.random.default_rng(43)
    for trial in range(10):
        base = rng.uniform(0.2, 0.8)
        w = np.array([base, base + 1.0, base + rng.integers(2, 4)])
        p = rng.normal(size=(3, 3)) + np.eye(3)
        m0 = np.linalg.solve(p, np.diag(w) @ p)
        m1 = rng.normal(size=(3, 3))
        m2 = rng.normal(size=(3, 3))
        data = reduce_at_zero(m0, m1, m2)
        assert data.d >= 1
        ok, worst = _residual_ok(data)
        assert ok, (trial, worst)


def test_grid_systems_delta_matches_spectrum():
    for (h, z) in [(2, 0), (3, 1), (4, 2)]:
        ds = DiscreteSeriesParam(h, z)
        for m in range(0, h + 3):
            for sign in (-1, 1):
                sysm = build_system(ds, m, sign)
                data = reduce_at_zero(*to_z_variable(sysm))
                got = sorted(x.real for x in data.delta0)
                want = closed_form_spectrum(ds, m, sign)
                assert np.allclose(got, want, rtol=1e-10, atol=1e-12), (h, z, m, sign)
                ok, worst = _residual_ok(data)
                assert ok, (h, z, m, sign, worst)


def test_l2_dimension_at_zero():
    assert l2_dimension_at_zero(np.diag([1.0, -1.0])) == 1
    ds = DiscreteSeriesParam(3, 1)
    for m in (3, 4, 5):
        m0, _, _ = to_z_variable(build_system(ds, m, -1))
        assert l2_dimension_at_zero(m0) == 4
    m0, _, _ = to_z_variable(build_system(ds, 1, -1))
    assert l2_dimension_at_zero(m0) == 2
    with pytest.raises(BoundaryEigenvalue):
        l2_dimension_at_zero(np.diag([1.0, 1e-12]))


def test_l2_dimension_similarity_invariant():
    rng = np.random.default_rng(77)
    m0, _, _ = to_z_variable(build_system(DiscreteSeriesParam(3, 1), 4, -1))
    base = l2_dimension_at_zero(m0)
    for _ in range(10):
        p = rng.normal(size=m0.shape) + np.eye(m0.shape[0])
        assert l2_dimension_at_zero(p @ m0 @ np.linalg.inv(p)) == base


def test_l2_basis_scalar():
    data = reduce_at_zero(np.array([[1.0]]), np.zeros((1, 1)), np.zeros((1, 1)))
    cols = l2_basis_at_zero(data, 0.1)
    assert cols.shape == (1, 1)
    assert cols[0, 0] == pytest.approx(0.1)


def test_l2_basis_solves_ode():
    ds = DiscreteSeriesParam(3, 1)
    for (m, sign) in [(4, -1), (2, 1), (0, -1)]:
        sysm = build_system(ds, m, sign)
        m0, m1, m2 = to_z_variable(sysm)
        data = reduce_at_zero(m0, m1, m2)
        z0 = 0.1
        cols = l2_basis_at_zero(data, z0)
        assert cols.shape[1] == l2_dimension_at_zero(m0)
        # Residual of the full ODE on each column via the derivative of Y.
        h = 1e-7 * z0
        sel = [j for j in range(len(data.delta0)) if data.delta0[j].real > 0]
        yp = fundamental_solution(data, z0 + h)[:, sel]
        ym = fundamental_solution(data, z0 - h)[:, sel]
        dy = (yp - ym) / (2 * h)
        mm = m0 + z0 * m1 + z0 * z0 * m2
        resid = np.linalg.norm(z0 * dy - mm @ cols)
        assert resid < 1e-8, (m, sign, resid)


def test_l2_basis_columns_are_square_integrable():
    ds = DiscreteSeriesParam(2, 0)
    sysm = build_system(ds, 2, -1)
    data = reduce_at_zero(*to_z_variable(sysm))
    z0 = 0.1
    cols = l2_basis_at_zero(data, z0)
    sel = [j for j in range(len(data.delta0)) if data.delta0[j].real > 0]
    # Dyadic refinement of int_{z0/100}^{z0} |col|^2 dz/z must stabilize.
    prev = None
    for npts in (200, 400, 800, 1600):
        z = np.geomspace(z0 / 100, z0, npts)
        vals = np.stack([fundamental_solution(data, float(t))[:, sel]
                         for t in z])  # (npts, l, k)
        integ = np.trapezoid(np.sum(np.abs(vals) ** 2, axis=(1, 2)) / z, z)
        if prev is not None:
            assert integ <= prev * 1.05
        prev = integ


def test_radius_error_for_large_z0():
    data = reduce_at_zero(np.array([[1.0]]), np.zeros((1, 1)), np.array([[1.0]]),
                          truncation=8)
    with pytest.raises(RadiusError) as exc:
        l2_basis_at_zero(data, 3.0, tol=1e-12)
    assert exc.value.suggested_z0 == pytest.approx(1.5)


def test_snap_eigenvalue():
    assert snap_eigenvalue(1.4999999999999) == 1.5
    assert snap_eigenvalue(np.sqrt(5) + 1e-12) == pytest.approx(np.sqrt(5), abs=1e-14)
    assert snap_eigenvalue(0.3333333) == pytest.approx(0.3333333)
    assert snap_eigenvalue(2.0000000001 + 0j, tol=1e-8) == 2.0


def test_jordanize_orders_integer_parts():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(5, 5))
    p, delta, nil = jordanize(m)
    ints = [np.floor(d.real) for d in delta]
    assert ints == sorted(ints)
    rec = p @ m @ np.linalg.inv(p)
    assert np.allclose(rec, np.diag(delta) + nil, atol=1e-8)
