"""Splitting at infinity and the global L^2 connection dimensions."""

import math

import numpy as np
import pytest

from orbitlab.discrete_series import DiscreteSeriesParam
from orbitlab.irregular_connection import (
    connection_report_json,
    global_l2_dimension,
    propagate_frame,
    split_at_infinity,
    verify_branching_consistency,
)
from orbitlab.ode_builder import build_system, to_z_variable


def test_split_scalar_growing_only():
    sysm = build_system(DiscreteSeriesParam(2, 0), 0, -1)
    split = split_at_infinity(sysm)
    assert split.growing_size == 1 and split.decaying_size == 0


def test_split_block_sizes():
    ds = DiscreteSeriesParam(2, 0)
    split = split_at_infinity(build_system(ds, 2, -1))
    assert split.decaying_size == 2  # = f0H for m >= f0H
    ds31 = DiscreteSeriesParam(3, 1)
    split = split_at_infinity(build_system(ds31, 2, -1))
    assert split.decaying_size == 2  # = m for m < f0H
    split = split_at_infinity(build_system(ds31, 2, 1))
    assert split.decaying_size == 2
    split = split_at_infinity(build_system(ds31, 5, 1))
    assert split.decaying_size == 3


def test_split_leading_structure():
    # H11 = I + O(z^-2), H22 = -I + O(z^-2): the 1/z blocks vanish.
    sysm = build_system(DiscreteSeriesParam(3, 1), 4, -1)
    split = split_at_infinity(sysm, order=10)
    p = split.growing_size
    assert np.allclose(split.H11_series[0], np.eye(p))
    assert np.allclose(split.H22_series[0], -np.eye(sysm.size - p))
    assert np.linalg.norm(split.H11_series[1]) < 1e-12
    assert np.linalg.norm(split.H22_series[1]) < 1e-12
    # T has identity diagonal blocks at every order.
    for tk in split.T_series[1:]:
        assert np.linalg.norm(tk[:p, :p]) < 1e-12
        assert np.linalg.norm(tk[p:, p:]) < 1e-12


def test_split_transform_conjugates_system():
    # z (T y)' = z^2 H (T y) must hold to the computed order:
    # equivalently z T' + z^2 T Htilde = z^2 H T as series in 1/z.
    sysm = build_system(DiscreteSeriesParam(3, 1), 4, -1)
    order = 10
    split = split_at_infinity(sysm, order=order)
    m0, m1, m2 = to_z_variable(sysm)
    pm = np.eye(sysm.size)[list(split.permutation)]
    h = {0: pm @ m2 @ pm.T, 1: pm @ m1 @ pm.T, 2: pm @ m0 @ pm.T}
    n = sysm.size
    p = split.growing_size
    ht = []
    for j in range(order + 1):
        hj = np.zeros((n, n), dtype=complex)
        hj[:p, :p] = split.H11_series[j]
        hj[p:, p:] = split.H22_series[j]
        ht.append(hj)
    # H T = T Htilde + z^{-1} T' order by order:
    # coefficient of z^{-j} of z^{-1}T' is -(j-2) T_{j-2}.
    for j in range(order + 1):
        acc = np.zeros((n, n), dtype=complex)
        for k in (0, 1, 2):
            if k <= j:
                acc += h[k] @ split.T_series[j - k]
        for k in range(0, j + 1):
            acc -= split.T_series[k] @ ht[j - k]
        if j >= 2:
            acc += (j - 2) * split.T_series[j - 2]
        assert np.linalg.norm(acc) < 1e-10, j


def test_propagate_frame_accuracy():
    # Scalar z x' = (1 + z^2) x: x = z e^{z^2/2} exactly.
    m0 = np.array([[1.0 + 0j]])
    m1 = np.zeros((1, 1))
    m2 = np.array([[1.0 + 0j]])
    frame = np.array([[0.1 * math.exp(0.1**2 / 2)]], dtype=complex)
    out, logs = propagate_frame(m0, m1, m2, frame, 0.1, 3.0)
    # The first triangular factor absorbs the initial magnitude, so the
    # accumulated logs give |x(3)| directly.
    total = sum(float(l[0]) for l in logs)
    assert math.exp(total) == pytest.approx(3.0 * math.exp(4.5), rel=1e-9)
    assert abs(abs(out[0, 0]) - 1.0) < 1e-12


def test_global_dimension_scalar_case():
    res = global_l2_dimension(build_system(DiscreteSeriesParam(2, 0), 0, -1))
    assert res.dim == 0 and res.basis_dim == 1 and res.rank == 1


def test_global_dimension_reference_cases():
    ds = DiscreteSeriesParam(3, 1)
    res = global_l2_dimension(build_system(ds, 4, -1))
    assert res.dim == 1 and res.basis_dim == 4 and res.rank == 3
    res = global_l2_dimension(build_system(ds, 2, 1))
    assert res.dim == 0 and res.basis_dim == 3 and res.rank == 3


def test_global_dimension_matches_multiplicity_law():
    # dim = 0 below f0H and 1 from f0H on, for both signs.
    for (h, z) in [(2, 0), (3, 1)]:
        ds = DiscreteSeriesParam(h, z)
        for sign in (-1, 1):
            dims = [global_l2_dimension(build_system(ds, m, sign)).dim
                    for m in range(h + 2)]
            assert dims == [0] * h + [1] * 2, (h, z, sign)


def test_invariance_under_windows():
    ds = DiscreteSeriesParam(3, 1)
    sysm = build_system(ds, 3, -1)
    for z0 in (0.05, 0.1):
        for z1 in (6.0, 8.0, 10.0):
            res = global_l2_dimension(sysm, z0=z0, z1=z1)
            assert res.dim == 1, (z0, z1)


def test_invariance_under_tolerance():
    ds = DiscreteSeriesParam(2, 0)
    sysm = build_system(ds, 1, 1)
    for tol in (1e-10, 1e-12):
        assert global_l2_dimension(sysm, integrator_tol=tol).dim == 0


def test_consistency_report_neither():
    rep = verify_branching_consistency(DiscreteSeriesParam(3, 1), 6)
    assert rep.consistent, rep.diff
    rep = verify_branching_consistency(DiscreteSeriesParam(2, 0), 5)
    assert rep.consistent, rep.diff
    labels = {(m, s) for (m, s, _) in rep.computed}
    assert (3, 1) in labels and (-3, -1) in labels


def test_consistency_report_holomorphic():
    rep = verify_branching_consistency(DiscreteSeriesParam(2, -6), 0)
    assert rep.consistent
    assert rep.computed == ((None, -1, 0), (None, 1, 2))


def test_report_json():
    ds = DiscreteSeriesParam(2, 0)
    res = global_l2_dimension(build_system(ds, 2, -1))
    rows = connection_report_json([(ds, 2, -1, res)])
    assert rows[0]["dim"] == 1 and rows[0]["sign"] == "-"
    assert rows[0]["details"]["z1"] == 10.0
