"""Acceptance suite: one callable per criterion, with stated tolerances.

Each criterion returns (passed, detail) and carries a wall-clock budget;
``run_all`` executes them in order and reports one line per criterion.
The checks are oracle- or property-based at desk scale: exact arithmetic
wherever the statement is arithmetic, explicit numeric tolerances
elsewhere.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from . import (
    coadjoint_orbits as co,
    discrete_series as dsm,
    irregular_connection as irc,
    lie_su21 as lie,
    moment_projection as mp,
    ode_builder as ob,
    regular_singular as rs,
    symplectic_reduction as sr,
)

GRID = [(2, 0), (3, 1), (4, 0), (4, 2), (5, 1)]
HOLO_SET = [(1, -3), (2, -6), (3, -5)]
NEITHER_SET = [(2, 0), (3, 1), (4, 2)]


def _criterion_1_structure():
    table = [
        ("E1", "E1p", {"E2": 1}), ("E1", "E2", {}), ("E1p", "E2", {}),
        ("W", "E1", {"E1p": 1}), ("W", "E1p", {"E1": -1}), ("W", "E2", {}),
        ("W", "S", {}), ("H", "F", {"V": 2}), ("F", "V", {"H": 2}),
        ("V", "H", {"F": 2}),
    ]
    for a, b, expect in table:
        got = lie.bracket(lie.basis_element(a), lie.basis_element(b))
        acc = got
        for name, cc in expect.items():
            acc = acc - lie.basis_element(name).scale(F(cc))
        if not acc.is_zero():
            return False, f"bracket [{a},{b}] failed"
    elems = [lie.basis_element(n) for n in lie.G_ORDER]
    for i in range(8):
        for j in range(i + 1, 8):
            for k in range(j + 1, 8):
                x, y, z = elems[i], elems[j], elems[k]
                jac = (lie.bracket(x, lie.bracket(y, z))
                       + lie.bracket(y, lie.bracket(z, x))
                       + lie.bracket(z, lie.bracket(x, y)))
                if not jac.is_zero():
                    return False, f"Jacobi failed on triple {(i, j, k)}"
    rng = np.random.default_rng(101)
    worst_cocycle = 0.0
    for _ in range(500):
        p1 = rng.uniform(-1, 1, size=5)
        p2 = rng.uniform(-1, 1, size=5)
        g1 = lie.GroupElementB.from_params(w=p1[0], s=p1[1], x=p1[2], y=p1[3], z=p1[4])
        g2 = lie.GroupElementB.from_params(w=p2[0], s=p2[1], x=p2[2], y=p2[3], z=p2[4])
        f = lie.form("b_star", **dict(zip(lie.B_ORDER, rng.uniform(-2, 2, size=5))))
        lhs = np.array(lie.coadjoint_b(g1 @ g2, f).coeffs, dtype=float)
        rhs = np.array(lie.coadjoint_b(g1, lie.coadjoint_b(g2, f)).coeffs, dtype=float)
        worst_cocycle = max(worst_cocycle, float(np.max(np.abs(lhs - rhs))))
    if worst_cocycle > 1e-10:
        return False, f"cocycle deviation {worst_cocycle:.2e}"
    worst_sphere = 0.0
    f0 = lie.t_form(2.0, -6.0)
    for _ in range(500):
        kf = lie.coadjoint_g(lie.sample_k(rng), f0)
        h, fc, v = kf.coeff("H"), kf.coeff("F"), kf.coeff("V")
        worst_sphere = max(worst_sphere, abs(h * h + fc * fc + v * v - 4.0))
    if worst_sphere > 1e-10:
        return False, f"sphere invariant deviation {worst_sphere:.2e}"
    return True, f"cocycle {worst_cocycle:.1e}, sphere {worst_sphere:.1e}"


def _criterion_2_orbit_invariance():
    rnd = random.Random(424242)

    def q(lo=-9, hi=9, dm=9):
        return F(rnd.randint(lo, hi), rnd.randint(1, dm))

    for trial in range(1000):
        t = F(rnd.randint(-8, 8), rnd.randint(1, 9))
        c = (1 - t * t) / (1 + t * t)
        d = 2 * t / (1 + t * t)
        g = lie.GroupElementB.from_exact(c, d, q(1, 12, 12), q(), q(), q())
        z = F(0)
        while z == 0:
            z = q()
        f = lie.form("b_star", W=q(), S=q(), E1=q(), E1p=q(), E2=z)
        if co.classify_b_form(lie.coadjoint_b(g, f)) != co.classify_b_form(f):
            return False, f"invariance failed at trial {trial}"
    return True, "1000 exact conjugations preserve (r, sign)"


def _criterion_3_spectrum():
    worst = 0.0
    for (h, z) in GRID:
        ds = dsm.DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                m0, _, _ = ob.to_z_variable(ob.build_system(ds, m, sign))
                numeric = np.sort_complex(np.linalg.eigvals(m0))
                closed = np.sort_complex(
                    np.array(ob.closed_form_spectrum(ds, m, sign), dtype=complex))
                scale = max(1.0, float(np.max(np.abs(closed))))
                dev = float(np.max(np.abs(numeric - closed))) / scale
                worst = max(worst, dev)
                if dev > 1e-10:
                    return False, f"spectrum mismatch at {(h, z, m, sign)}: {dev:.2e}"
    return True, f"worst relative deviation {worst:.1e}"


def _criterion_4_local_dimensions():
    for (h, z) in GRID:
        ds = dsm.DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                sysm = ob.build_system(ds, m, sign)
                m0, _, _ = ob.to_z_variable(sysm)
                want = h + 1 if m >= h else m + 1
                got = rs.l2_dimension_at_zero(m0)
                if got != want:
                    return False, f"L2-at-0 dim {got} != {want} at {(h, z, m, sign)}"
                split = irc.split_at_infinity(sysm)
                want_dec = h if m >= h else m
                if split.decaying_size != want_dec:
                    return False, (f"decaying block {split.decaying_size} != "
                                   f"{want_dec} at {(h, z, m, sign)}")
    return True, "counts f0H+1 / m+1 at 0 and f0H / m at infinity"


def _criterion_5_connection():
    windows = [(z0, z1) for z0 in (0.05, 0.1) for z1 in (6.0, 8.0, 10.0)]
    tols = (1e-10, 1e-12)
    runs = 0
    for (h, z) in GRID:
        ds = dsm.DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                sysm = ob.build_system(ds, m, sign)
                expect = 0 if m < h else 1
                for (z0, z1) in windows:
                    for tol in tols:
                        res = irc.global_l2_dimension(
                            sysm, z0=z0, z1=z1, integrator_tol=tol)
                        runs += 1
                        if res.dim != expect:
                            return False, (
                                f"dim {res.dim} != {expect} at "
                                f"{(h, z, m, sign, z0, z1, tol)}")
    return True, f"{runs} runs, all dims 0 (m < f0H) / 1 (m >= f0H)"


def _criterion_6_branching():
    for (h, z) in HOLO_SET:
        ds = dsm.DiscreteSeriesParam(h, z)
        dec = dsm.branch_to_B(ds)
        if len(dec.entries) != h:
            return False, f"|branching| != f0H at {(h, z)}"
        orbits = mp.admissible_orbits_in_image(ds).orbits()
        if len(orbits) != 3 * h:
            return False, f"in-image count != 3 f0H at {(h, z)}"
        selected = set()
        for o in orbits:
            label = co.orbit_to_repr(o)
            if dsm.central_character_selects(ds, label.m):
                selected.add((label.m, label.sign))
        if selected != {(m, s) for (m, s, _) in dec.entries}:
            return False, f"character filter mismatch at {(h, z)}"
    for (h, z) in NEITHER_SET:
        ds = dsm.DiscreteSeriesParam(h, z)
        dec = dsm.branch_to_B(ds)
        for fam in mp.admissible_orbits_in_image(ds).families:
            fam_labels = [co.orbit_to_repr(o) for o in fam.orbits(40)]
            filtered = [l.m for l in fam_labels
                        if dsm.central_character_selects(ds, l.m)][:10]
            branch_fam = [bf for bf in dec.families if bf.sign == fam.sign][0]
            if filtered != branch_fam.labels(10):
                return False, f"family filter mismatch at {(h, z)}, sign {fam.sign}"
        # Assembled law from the 0/1 dimension profile must agree with the
        # explicit decomposition on a window.
        m_max = 10
        assembled = set()
        for sign in (-1, 1):
            for m in range(h, m_max + 1):
                assembled.add((irc._label_of_system(ds, m, sign), -sign))
        window = set()
        for sign in (-1, 1):
            window.update((irc._label_of_system(ds, m, sign), -sign)
                          for m in range(0, m_max + 1))
        expected = {(m, s) for (m, s, _) in dec.entries_up_to(m_max + 1)} & window
        if assembled != expected:
            return False, f"index-law mismatch at {(h, z)}"
    return True, "holomorphic counts, character filter and index laws agree"


def _criterion_7_volume():
    for (h, z) in [(1, -3), (2, -6), (5, -7)]:
        got = sr.reduced_volume(h, z, 2000)
        if abs(got - h) > 1e-8:
            return False, f"volume {got} != {h} at {(h, z)}"
    exact = sr.reduced_volume_closed_form(2, -6)
    errs = [abs(sr.reduced_volume(2, -6, n) - exact) for n in (250, 500, 1000, 2000)]
    orders = [math.log2(e1 / e2) / 1.0 for e1, e2 in zip(errs, errs[1:]) if e2 > 1e-15]
    if orders and min(orders) < 2.0:
        return False, f"observed quadrature order {min(orders):.2f} < 2"
    return True, f"volumes exact to 1e-8; observed orders {[f'{o:.1f}' for o in orders]}"


def _criterion_8_properness():
    pairs = []
    for h in (1.0, 2.0, 3.0, 4.0, 5.0):
        pairs.append((h, 1.1 * h))   # inside the cone
        pairs.append((h, 0.9 * h))   # outside
        pairs.append((h, -1.1 * h))
        pairs.append((h, -0.9 * h))
    checked = 0
    for (h, z) in pairs:
        cone = abs(h) < abs(z)
        v1 = mp.p1_properness(h, z)
        v = mp.p_properness(h, z)
        if not (v1.proper == v1.weakly_proper == cone):
            return False, f"p1 verdict mismatch at {(h, z)}"
        if not (v.weakly_proper and v.proper == cone):
            return False, f"p verdict mismatch at {(h, z)}"
        for verdict in (v1, v):
            if verdict.proper:
                continue
            ok, max_norm, max_dev = verdict.witness.verify(
                fiber_tol=1e-9, norm_goal=1e6)
            checked += 1
            if not ok:
                return False, (f"witness failed at {(h, z)}: "
                               f"norm {max_norm:.2e}, dev {max_dev:.2e}")
    return True, f"20 parameter pairs, {checked} unbounded-fiber witnesses verified"


def _criterion_9_transversality():
    rng = np.random.default_rng(909)
    f0 = lie.t_form(2.0, -6.0)
    n = 200
    hits_b = hits_b1 = 0
    witness = None
    for _ in range(n):
        kf = lie.coadjoint_g(lie.sample_k(rng), f0)
        db = mp.transversality_dim(kf, "b")
        db1 = mp.transversality_dim(kf, "b1")
        hits_b += db == 0
        hits_b1 += db1 == 0
        if witness is None and db == 0 and db1 == 0:
            witness = kf
    if hits_b < 0.9 * n or hits_b1 < 0.9 * n:
        return False, f"zero-intersection rate too low: {hits_b}/{n}, {hits_b1}/{n}"
    if witness is None:
        return False, "no single translate achieved both zero intersections"
    return True, f"{hits_b}/{n} (b) and {hits_b1}/{n} (b1) zero intersections"


def _criterion_10_regular_singular():
    rng = np.random.default_rng(1010)

    def residual_ok(data, rtol=1e-10):
        return max(rs.series_residual_relative(data)) <= rtol

    for trial in range(10):  # resonant: integer-spaced eigenvalues
        base = rng.uniform(0.2, 0.8)
        w = np.array([base, base + 1.0, base + float(rng.integers(2, 4))])
        p = rng.normal(size=(3, 3)) + np.eye(3)
        m0 = np.linalg.solve(p, np.diag(w) @ p)
        data = rs.reduce_at_zero(m0, rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
        if not residual_ok(data):
            return False, f"resonant residual failed at trial {trial}"
    for trial in range(10):  # non-resonant diagonalizable
        w = rng.uniform(0.3, 0.45, size=3) + np.arange(3) * math.sqrt(2)
        p = rng.normal(size=(3, 3)) + np.eye(3)
        m0 = np.linalg.solve(p, np.diag(w) @ p)
        data = rs.reduce_at_zero(m0, rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
        if not residual_ok(data):
            return False, f"non-resonant residual failed at trial {trial}"
        if np.linalg.norm(data.N) > 1e-9 or any(
                np.linalg.norm(b) > 1e-9 for b in data.B_list):
            return False, f"non-resonant case produced N or B at trial {trial}"
    for (h, z) in GRID:
        ds = dsm.DiscreteSeriesParam(h, z)
        for m in range(0, h + 4):
            for sign in (-1, 1):
                data = rs.reduce_at_zero(*ob.to_z_variable(ob.build_system(ds, m, sign)))
                if not residual_ok(data):
                    return False, f"grid residual failed at {(h, z, m, sign)}"
    return True, "series residuals vanish through the truncation order"


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    runtime: float
    budget: float
    detail: str

    @property
    def ok(self) -> bool:
        return self.passed and self.runtime < self.budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = "" if self.passed else f" -- {self.detail}"
        if self.passed and self.runtime >= self.budget:
            extra = f" -- over budget ({self.budget:.0f}s)"
        return (f"criterion {self.cid:2d} [{status}] {self.name} "
                f"({self.runtime:.2f}s){extra}")


CRITERIA = (
    (1, "structure layer brackets, cocycle, sphere invariant", 1.0, _criterion_1_structure),
    (2, "exact conjugation invariance of (r, sign)", 1.0, _criterion_2_orbit_invariance),
    (3, "spectrum oracle against closed forms", 5.0, _criterion_3_spectrum),
    (4, "local L2 dimensions at 0 and at infinity", 5.0, _criterion_4_local_dimensions),
    (5, "global L2 connection dimensions (0 / 1 law)", 120.0, _criterion_5_connection),
    (6, "branching consistency and character selection", 1.0, _criterion_6_branching),
    (7, "reduced sphere volume quadrature", 2.0, _criterion_7_volume),
    (8, "properness verdicts with fiber witnesses", 2.0, _criterion_8_properness),
    (9, "transversality of generic stabilizers", 2.0, _criterion_9_transversality),
    (10, "regular-singular engine self-test", 10.0, _criterion_10_regular_singular),
)


def run_criterion(cid: int) -> CriterionResult:
    for (i, name, budget, fn) in CRITERIA:
        if i == cid:
            t0 = time.perf_counter()
            passed, detail = fn()
            dt = time.perf_counter() - t0
            return CriterionResult(i, name, passed, dt, budget, detail)
    raise ValueError(f"no criterion {cid}")


def run_all(echo=print):
    results = [run_criterion(i) for (i, _, _, _) in CRITERIA]
    for r in results:
        echo(r.line())
    return results
