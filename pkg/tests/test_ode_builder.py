"""System construction, z-variable transport, closed-form spectra."""

import json
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from orbitlab.discrete_series import DiscreteSeriesParam
from orbitlab.lie_su21 import InvalidParameter
from orbitlab.ode_builder import (
    build_system,
    closed_form_spectrum,
    dump_system,
    holomorphic_kernel_dims,
    positive_count,
    to_z_variable,
)

GRID = [(2, 0), (3, 1), (4, 0), (4, 2), (5, 1)]


def test_smallest_system():
    sysm = build_system(DiscreteSeriesParam(2, 0), 0, -1)
    assert sysm.size == 1
    assert sysm.A[0, 0] == -1 and sysm.B[0, 0] == 0 and sysm.C[0, 0] == -1


def test_m2_system_structure():
    sysm = build_system(DiscreteSeriesParam(2, 0), 2, -1)
    assert sysm.size == 4
    assert sysm.A[0, 0] == -1 and sysm.A[3, 3] == -1
    block = sysm.A[1:3, 1:3]
    s2 = math.sqrt(2)
    assert np.allclose(block, [[0, s2 * 1j], [-s2 * 1j, 0]])
    assert np.allclose(np.diag(sysm.C), [-1, 1, -1, 1])
    assert sysm.B[0, 1] == -1 and sysm.B[1, 0] == -4


def test_plus_system_scalars():
    sysm = build_system(DiscreteSeriesParam(3, 1), 5, 1)
    assert sysm.size == 6
    assert sysm.A[0, 0] == -2 and sysm.A[-1, -1] == -1


def test_small_m_shapes_and_blocks():
    ds = DiscreteSeriesParam(4, 2)
    for m in range(0, 4):
        for sign in (-1, 1):
            sysm = build_system(ds, m, sign)
            assert sysm.size == 2 * m + 1
            assert np.allclose(np.diag(sysm.C)[: 2 * m],
                               [-1, 1] * m)
            assert sysm.C[-1, -1] == -1
            assert np.allclose(sysm.B[-1, :], 0) and np.allclose(sysm.B[:, -1], 0)
    for m in range(4, 7):
        sysm = build_system(ds, m, -1)
        assert sysm.size == 8
        assert np.allclose(np.diag(sysm.C), [-1, 1] * 4)


def test_builder_rejects_holomorphic():
    with pytest.raises(InvalidParameter):
        build_system(DiscreteSeriesParam(2, -6), 0, -1)
    assert holomorphic_kernel_dims(DiscreteSeriesParam(2, -6)) == (0, 2)
    with pytest.raises(InvalidParameter):
        holomorphic_kernel_dims(DiscreteSeriesParam(3, 1))


def test_to_z_variable_definition():
    sysm = build_system(DiscreteSeriesParam(2, 0), 0, -1)
    m0, m1, m2 = to_z_variable(sysm)
    assert m0[0, 0] == 1 and m1[0, 0] == 0 and m2[0, 0] == 1


def test_z_variable_round_trip_integration():
    # y(t) solving the t-system must match x(1/t) solving the z-system.
    ds = DiscreteSeriesParam(3, 1)
    sysm = build_system(ds, 4, -1)
    m0, m1, m2 = to_z_variable(sysm)
    rng = np.random.default_rng(4)
    y0 = rng.normal(size=sysm.size) + 1j * rng.normal(size=sysm.size)

    def rhs_t(t, y):
        return (sysm.A / t + sysm.B / t**2 + sysm.C / t**3) @ y

    def rhs_z(z, x):
        return (m0 / z + m1 + m2 * z) @ x

    sol_t = solve_ivp(rhs_t, (2.0, 0.5), y0, rtol=1e-12, atol=1e-12,
                      dense_output=True, method="DOP853")
    sol_z = solve_ivp(rhs_z, (0.5, 2.0), y0, rtol=1e-12, atol=1e-12,
                      dense_output=True, method="DOP853")
    for t in np.linspace(0.5, 2.0, 7):
        assert np.max(np.abs(sol_t.sol(t) - sol_z.sol(1.0 / t))) < 1e-8


def test_closed_form_spectrum_examples():
    vals = closed_form_spectrum(DiscreteSeriesParam(3, 1), 4, -1)
    assert np.allclose(sorted(vals), sorted([1, 2, 2, -2, math.sqrt(5), -math.sqrt(5)]))
    vals = closed_form_spectrum(DiscreteSeriesParam(2, 0), 3, -1)
    assert np.allclose(sorted(vals), sorted([1, 1, math.sqrt(2), -math.sqrt(2)]))


def test_spectrum_oracle_full_grid():
    for (h, z) in GRID:
        ds = DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                sysm = build_system(ds, m, sign)
                m0, _, _ = to_z_variable(sysm)
                numeric = np.sort_complex(np.linalg.eigvals(m0))
                closed = np.sort_complex(np.array(
                    closed_form_spectrum(ds, m, sign), dtype=complex))
                scale = max(1.0, float(np.max(np.abs(closed))))
                assert np.max(np.abs(numeric - closed)) < 1e-10 * scale
                npos = int(np.sum(numeric.real > 0))
                assert npos == positive_count(ds, m)


def test_structural_invariants_full_grid():
    for (h, z) in GRID:
        ds = DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                sysm = build_system(ds, m, sign)
                large = m >= h
                assert sysm.size == (2 * h if large else 2 * m + 1)
                # C diagonal with (-1, +1) block pattern, trailing -1 if small m.
                cdiag = np.diag(sysm.C)
                nb = h if large else m
                assert np.allclose(cdiag[: 2 * nb], [-1, 1] * nb)
                assert np.allclose(sysm.C - np.diag(cdiag), 0)
                if not large:
                    assert cdiag[-1] == -1
                # B blocks [[0, s], [2 s (m-n), 0]].
                for n in range(nb):
                    i = 2 * n
                    assert sysm.B[i, i + 1] == sign
                    assert sysm.B[i + 1, i] == sign * 2 * (m - n)
                assert np.count_nonzero(sysm.B) == sum(
                    (1 if m == n else 2) for n in range(nb))
                # A block-diagonal: leading scalar, 2x2 blocks, trailing scalar.
                mask = np.zeros_like(sysm.A, dtype=bool)
                mask[0, 0] = True
                nblocks = h - 1 if large else m
                for n in range(nblocks):
                    mask[1 + 2 * n: 3 + 2 * n, 1 + 2 * n: 3 + 2 * n] = True
                if large:
                    mask[-1, -1] = True
                assert np.allclose(sysm.A[~mask], 0)


def test_plus_minus_spectra_agree_large_m():
    for (h, z) in GRID:
        ds = DiscreteSeriesParam(h, z)
        for m in range(h, h + 3):
            sm = closed_form_spectrum(ds, m, -1)
            sp = closed_form_spectrum(ds, m, 1)
            assert np.allclose(sorted(sm), sorted(sp), atol=1e-12)


def test_dump_formats():
    sysm = build_system(DiscreteSeriesParam(2, 0), 1, 1)
    data = json.loads(dump_system(sysm, "json"))
    assert data["size"] == 3 and data["sign"] == "+"
    a = np.array([[complex(re, im) for (re, im) in row] for row in data["A"]])
    assert np.allclose(a, sysm.A)
    csv = dump_system(sysm, "csv")
    lines = csv.strip().splitlines()
    assert lines[0] == "matrix,row,col,re,im"
    assert len(lines) == 1 + 3 * 9
