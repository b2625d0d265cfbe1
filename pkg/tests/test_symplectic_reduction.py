"""Reduced varieties, sphere volume quadrature, point quantization."""

import math

import numpy as np
import pytest

from orbitlab.coadjoint_orbits import ReprLabel, b_orbit, b1_orbit, repr_to_orbit
from orbitlab.discrete_series import DiscreteSeriesParam, branch_to_B
from orbitlab.lie_su21 import InvalidParameter
from orbitlab.moment_projection import NotInRegularSet, admissible_orbits_in_image, r_of_k
from orbitlab.symplectic_reduction import (
    EMPTY,
    NONCOMPACT,
    POINT,
    SPHERE2,
    classify_reduced,
    quantize_point,
    reduced_point_coordinate,
    reduced_volume,
    reduced_volume_closed_form,
)


def test_classify_reduced():
    ds = DiscreteSeriesParam(2, -6)
    in_image = b_orbit(3 / 2, -1)
    assert classify_reduced(ds, "B", in_image).kind == POINT
    assert classify_reduced(ds, "B", b_orbit(100, -1)).kind == EMPTY
    v = classify_reduced(ds, "B1", b1_orbit(-1))
    assert v.kind == SPHERE2 and v.volume == pytest.approx(2.0, abs=1e-7)
    assert classify_reduced(ds, "B1", b1_orbit(1)).kind == EMPTY
    ds31 = DiscreteSeriesParam(3, 1)
    assert classify_reduced(ds31, "B1", b1_orbit(1)).kind == NONCOMPACT
    assert classify_reduced(ds31, "B1", b1_orbit(-1)).kind == NONCOMPACT


def test_reduced_volume_values():
    assert reduced_volume(2, -6, 2000) == pytest.approx(2.0, abs=1e-8)
    assert reduced_volume(1, -3, 2000) == pytest.approx(1.0, abs=1e-8)
    assert reduced_volume(5, -7, 4000) == pytest.approx(5.0, abs=1e-8)
    with pytest.raises(InvalidParameter):
        reduced_volume(3, 1)


def test_reduced_volume_matches_closed_form():
    for (h, z) in [(1, -3), (2, -6), (5, -7), (2, 6), (3, -5)]:
        q = reduced_volume(h, z, 2000)
        cf = reduced_volume_closed_form(h, z)
        assert q == pytest.approx(cf, abs=1e-8)
        assert cf == pytest.approx(abs(h))


def test_quadrature_convergence_order():
    # Observed order from Richardson ratios must be at least 2.
    h, z = 2, -6
    exact = reduced_volume_closed_form(h, z)
    errs = [abs(reduced_volume(h, z, n) - exact) for n in (250, 500, 1000, 2000)]
    for e1, e2 in zip(errs, errs[1:]):
        if e2 < 1e-14:  # already at roundoff
            continue
        assert e1 / e2 >= 4.0 * 0.9  # order >= 2 means ratio >= ~4


def test_reduced_point_coordinate():
    assert reduced_point_coordinate(2, -6, 0.0) == pytest.approx(2.0)
    with pytest.raises(NotInRegularSet):
        # exact pole: f0H cos(0) + f0Z = 0
        reduced_point_coordinate(2, -2, 0.0)
    # phi(cos theta) equals the orbit invariant r(k) at the matching angle.
    for theta in np.linspace(0.1, math.pi - 0.1, 25):
        e2 = 2 * math.cos(theta) - 6
        assert reduced_point_coordinate(2, -6, theta) == pytest.approx(
            float(r_of_k(2.0, -6.0, e2)), abs=1e-10
        )


def test_quantize_point_examples():
    ds = DiscreteSeriesParam(2, -6)
    assert quantize_point(ds, 6, -1) == 1
    assert quantize_point(ds, 4, -1) == 0   # in image, character mismatch
    assert quantize_point(ds, 100, -1) == 0  # out of image
    assert quantize_point(ds, 6, 1) == 0     # wrong sign for this class


def test_quantization_sums_to_branching_multiplicity():
    # Sum of point quantizations over in-image admissible orbits equals
    # the number of branching constituents, on any finite window.
    for (h, z) in [(1, -3), (2, -6), (3, -5)]:
        ds = DiscreteSeriesParam(h, z)
        orbits = admissible_orbits_in_image(ds).orbits()
        total = 0
        for o in orbits:
            from orbitlab.coadjoint_orbits import orbit_to_repr

            label = orbit_to_repr(o)
            total += quantize_point(ds, label.m, label.sign)
        assert total == len(branch_to_B(ds).entries) == h
    ds = DiscreteSeriesParam(3, 1)
    n_window = 9
    orbits = admissible_orbits_in_image(ds).orbits(n_max=n_window)
    total = 0
    for o in orbits:
        from orbitlab.coadjoint_orbits import orbit_to_repr

        label = orbit_to_repr(o)
        total += quantize_point(ds, label.m, label.sign)
    expected = {(m, s) for (m, s, _) in branch_to_B(ds).entries_up_to(n_window)}
    covered = {(orbit_to_repr(o).m, orbit_to_repr(o).sign) for o in orbits}
    assert total == len(expected & covered)
    assert total == 2 * ((n_window + 2) // 3)  # one of every three per family


def test_one_in_three_selection():
    for (h, z) in [(2, -6), (3, -5)]:
        ds = DiscreteSeriesParam(h, z)
        orbits = admissible_orbits_in_image(ds).orbits()
        selected = [o for o in orbits
                    if quantize_point(ds, repr_of(o).m, repr_of(o).sign)]
        assert len(orbits) == 3 * h
        assert len(selected) == h


def repr_of(orbit):
    from orbitlab.coadjoint_orbits import orbit_to_repr

    return orbit_to_repr(orbit)
