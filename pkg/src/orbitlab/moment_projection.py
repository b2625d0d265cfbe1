"""Moment maps g* -> b*, g* -> b1* on coadjoint orbits of SU(2,1).

The moment map of the Hamiltonian action of B (or B1) on an orbit G.f0
is the restriction of linear forms, p(f) = f|_b and p1(f) = f|_b1.  On
the K-orbit through f0 = f0H H* + f0Z Z* the basic pairings are

    <k.f0, E2> = <k.f0, H> + f0Z  in  [f0Z - |f0H|, f0Z + |f0H|],
    <k.f0, W>  = <k.f0, H>/2 - f0Z/6,

and the B-orbit invariant of p(k.f0) is

    r(k) = f0Z/3 + (f0H^2 - f0Z^2) / (2 <k.f0, E2>).        (*)

f0 lies in the holomorphic cone iff |f0H| < |f0Z| iff the E2-pairing is
sign-definite on the orbit.  p1 is proper (equivalently weakly proper)
iff f0 is in the cone; p is always weakly proper and proper iff f0 is
in the cone.  Non-properness witnesses are explicit unbounded curves in
a single fiber and can be evaluated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .coadjoint_orbits import OrbitDescriptor, b_orbit
from .discrete_series import DiscreteSeriesParam, SeriesClass
from .lie_su21 import (
    B1_ORDER,
    B_ORDER,
    G_ORDER,
    DualForm,
    InvalidParameter,
    _ad_v_trig_pieces,
    ad_s_grading_projectors,
    ad_star_matrix,
    apply_coeff_matrix,
    evaluate_on_basis,
    nilpotent_orbit_polynomial,
    numeric_kernel_dim,
    rational_circle_point,
    structure_constants,
    subalgebra_coeff_basis,
    t_form,
    v_rotation_coeff_matrix,
)

F = Fraction


class NotInRegularSet(ValueError):
    """Raised when a formula is evaluated at a pole / outside the regular set."""


@lru_cache(maxsize=2)
def _restriction_matrix(which: str):
    """Rows = b/b1 basis elements, columns = pairings with the g*-basis."""
    names = B_ORDER if which == "b" else B1_ORDER
    mat = []
    for name in names:
        row = []
        for gname in G_ORDER:
            unit = form_g_unit(gname)
            row.append(evaluate_on_basis(unit, name))
        mat.append(row)
    return tuple(tuple(r) for r in mat)


@lru_cache(maxsize=None)
def form_g_unit(gname: str) -> DualForm:
    from .lie_su21 import form

    return form("g_star", **{gname: 1})


def project_p(f: DualForm) -> DualForm:
    """Restriction g* -> b* in coordinates (exact for exact input)."""
    if f.basis_tag != "g_star":
        raise InvalidParameter("project_p expects a form on g")
    mat = _restriction_matrix("b")
    coeffs = tuple(sum(m * c for m, c in zip(row, f.coeffs)) for row in mat)
    return DualForm("b_star", coeffs)


def project_p1(f: DualForm) -> DualForm:
    """Restriction g* -> b1* in coordinates (exact for exact input)."""
    if f.basis_tag != "g_star":
        raise InvalidParameter("project_p1 expects a form on g")
    mat = _restriction_matrix("b1")
    coeffs = tuple(sum(m * c for m, c in zip(row, f.coeffs)) for row in mat)
    return DualForm("b1_star", coeffs)


def holomorphic_cone(f0H, f0Z) -> bool:
    """Cone membership |f0H| < |f0Z| for a strongly regular compact form."""
    if f0H == 0:
        raise InvalidParameter("f0H must be nonzero (strong regularity)")
    if abs(f0H) == abs(f0Z):
        raise InvalidParameter("|f0H| = |f0Z| is not strongly regular")
    return abs(f0H) < abs(f0Z)


def r_of_k(f0H, f0Z, e2_pairing):
    """Orbit invariant (*) of p(k.f0) from the pairing <k.f0, E2>."""
    if e2_pairing == 0:
        raise NotInRegularSet("E2-pairing vanishes: image not strongly regular")
    if isinstance(e2_pairing, (int, Fraction)) and isinstance(f0H, (int, Fraction)) \
            and isinstance(f0Z, (int, Fraction)):
        return F(f0Z, 3) + F(f0H * f0H - f0Z * f0Z) / (2 * F(e2_pairing))
    return f0Z / 3.0 + (f0H * f0H - f0Z * f0Z) / (2.0 * e2_pairing)


# ---------------------------------------------------------------------------
# Properness diagnostics with numeric witnesses.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberWitness:
    """Unbounded curve inside one moment-map fiber.

    ``sample(t)`` returns (norm of the curve point in g*, deviation of
    its projection from the base fiber value).  A verified witness has
    deviation ~ 0 while the norm runs away.  The curves are evaluated
    in exact rational arithmetic (floating-point conjugation loses the
    cancellation structure long before the norm reaches 1e6).
    """

    description: str
    _sample: object = field(repr=False)

    def sample(self, t: float):
        return self._sample(t)

    def verify(self, t_grid=None, fiber_tol: float = 1e-9, norm_goal: float = 1e6):
        """Max fiber deviation and max norm along the curve samples.

        Without an explicit grid the parameter is grown geometrically
        until the norm clears ``norm_goal`` with a margin.
        """
        max_dev, max_norm = 0.0, 0.0
        if t_grid is None:
            t = 1.0
            for _ in range(80):
                nrm, dev = self.sample(t)
                max_dev = max(max_dev, dev)
                max_norm = max(max_norm, nrm)
                if nrm > 3 * norm_goal:
                    break
                t *= 1.9
        else:
            for t in t_grid:
                nrm, dev = self.sample(t)
                max_dev = max(max_dev, dev)
                max_norm = max(max_norm, nrm)
        return max_norm >= norm_goal and max_dev <= fiber_tol, max_norm, max_dev


@dataclass(frozen=True)
class PropernessVerdict:
    weakly_proper: bool
    proper: bool
    witness: FiberWitness | None = None


def _tau_near_e2_zero(f0H: F, f0Z: F) -> F:
    """Rational tau with <k.f0, E2> ~ 0 for k = exp(-(theta/2) V), tau = tan(-theta/4).

    The pairing vanishes when g(tau) = f0H (tau^4 - 6 tau^2 + 1)
    + f0Z (tau^2 + 1)^2 = 0; two exact Newton steps from the floating
    seed push the residual far below the fiber tolerance.
    """
    theta_star = math.acos(-float(f0Z) / float(f0H))
    tau = Fraction(math.tan(-theta_star / 4)).limit_denominator(10**12)
    for _ in range(2):
        g = f0H * (tau**4 - 6 * tau**2 + 1) + f0Z * (tau**2 + 1) ** 2
        dg = 4 * tau * (f0H * (tau**2 - 3) + f0Z * (tau**2 + 1))
        tau = (tau - g / dg).limit_denominator(10**24)
    return tau


def _p_witness(f0H, f0Z) -> FiberWitness:
    """Curve exp(t E2).(k.f0) with <k.f0, E2> ~ 0: p-constant, unbounded.

    The E2-pairing cannot be made exactly zero with rational data, so
    the angle is snapped to a rational circle point with an exactly
    computed residual; the exact fiber drift is then 2 t <k.f0, E2> on
    the S*-coordinate and nothing else.
    """
    f0q = t_form(F(f0H), F(f0Z))
    tau = _tau_near_e2_zero(F(f0H), F(f0Z))
    den = 1 + tau * tau
    rot = v_rotation_coeff_matrix((1 - tau * tau) / den, 2 * tau / den)
    kf0 = apply_coeff_matrix(rot, f0q)
    # exp(t ad_{E2}) kf0 is a polynomial in t; precompute its coefficient
    # vectors exactly and their exact projections to b*.
    poly = nilpotent_orbit_polynomial("E2", kf0.coeffs)
    poly_f = [np.array([float(x) for x in c]) for c in poly]
    proj_drift = [
        np.array([float(x) for x in project_p(DualForm("g_star", tuple(c))).coeffs])
        for c in poly[1:]
    ]

    def samp(t):
        acc = poly_f[-1].copy()
        for c in reversed(poly_f[:-1]):
            acc = acc * t + c
        nrm = float(np.linalg.norm(acc))
        drift = sum(d * t ** (k + 1) for k, d in enumerate(proj_drift))
        return nrm, float(np.linalg.norm(drift))

    return FiberWitness("t -> exp(t E2).(k.f0) with vanishing E2-pairing", samp)


def _p1_witness(f0H, f0Z) -> FiberWitness:
    """Curve l_t^{-1} k_t . f0 in one p1-fiber with l_t escaping AN.

    k_t pushes the E2-pairing e2 -> 0; l_t = exp(y E1p) exp(s S) with
    e^{-2s} = e2/c and y = a/e2 brings the projection back to the base
    point p1(f0) = c E2*.  Coefficients are split into the exact root
    grading so that only integer powers of u^2 = e2/c enter each part
    and the fiber identity is checked exactly.
    """
    f0q = t_form(F(f0H), F(f0Z))
    c = F(f0H) + F(f0Z)
    base = project_p1(f0q)
    eps0 = math.copysign(min(1.0, (abs(f0H) - abs(f0Z)) / 2.0), c)
    projs = ad_s_grading_projectors()
    ad_e1p = ad_star_matrix("E1p")
    f0vec = np.array([F(x) for x in f0q.coeffs], dtype=object)
    # Trig pieces of the k_t-rotation applied to f0 once and for all.
    trig = [m.dot(f0vec) for m in _ad_v_trig_pieces()]

    def samp(t):
        e2_target = eps0 * math.exp(-float(t))
        theta = math.acos((e2_target - float(f0Z)) / float(f0H))
        cu, su = rational_circle_point(-theta / 2, 10**6)
        cos2, sin2 = cu * cu - su * su, 2 * cu * su
        kvec = trig[0] + trig[1] * cu + trig[2] * su + trig[3] * cos2 + trig[4] * sin2
        kf0 = DualForm("g_star", tuple(kvec))
        e2 = evaluate_on_basis(kf0, "E2")
        if e2 == 0 or (e2 > 0) != (c > 0):
            raise NotInRegularSet("rational snap crossed the singular set")
        y = project_p1(kf0).coeff("E1") / e2
        u2 = e2 / c
        # exp(-y ad_{E1p}) kvec by iterated exact matvecs (nilpotent).
        v = kvec.copy()
        term = kvec
        for k in range(1, 6):
            term = ad_e1p.dot(term) * (-y / k)
            if not any(bool(x) for x in term):
                break
            v = v + term
        pieces = {k: projs[k].dot(v) for k in projs}
        w_even = pieces[0] + pieces[2] * u2 + pieces[-2] * (1 / u2)
        w_odd = pieces[1] + pieces[-1] * (1 / u2)
        u = math.sqrt(float(u2))
        proj_e = project_p1(DualForm("g_star", tuple(w_even)))
        proj_o = project_p1(DualForm("g_star", tuple(w_odd)))
        dev = math.sqrt(
            sum((float(pe - be) + u * float(po)) ** 2
                for pe, be, po in zip(proj_e.coeffs, base.coeffs, proj_o.coeffs))
        )
        nrm = math.sqrt(
            sum((float(we) + u * float(wo)) ** 2 for we, wo in zip(w_even, w_odd))
        )
        return nrm, dev

    return FiberWitness(
        "t -> l_t^{-1} k_t . f0 with E2-pairing -> 0 and l_t unbounded in AN",
        samp,
    )


def p1_properness(f0H, f0Z) -> PropernessVerdict:
    """p1 on G.f0 is proper iff weakly proper iff f0 is in the cone."""
    cone = holomorphic_cone(f0H, f0Z)
    witness = None if cone else _p1_witness(float(f0H), float(f0Z))
    return PropernessVerdict(weakly_proper=cone, proper=cone, witness=witness)


def p_properness(f0H, f0Z) -> PropernessVerdict:
    """p on G.f0 is always weakly proper, proper iff f0 is in the cone."""
    cone = holomorphic_cone(f0H, f0Z)
    witness = None if cone else _p_witness(float(f0H), float(f0Z))
    return PropernessVerdict(weakly_proper=True, proper=cone, witness=witness)


# ---------------------------------------------------------------------------
# Admissible B-orbits inside the image of p.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitFamily:
    """Admissible B-orbits r = r_start + k*r_step (k = 0..count-1 or infinite)."""

    sign: int
    r_start: Fraction
    r_step: Fraction
    count: int | None  # None marks an infinite family

    def orbits(self, n_max: int | None = None):
        n = self.count if self.count is not None else n_max
        if n is None:
            raise InvalidParameter("n_max is required for an infinite family")
        if self.count is not None and n_max is not None:
            n = min(n, n_max)
        return [b_orbit(self.r_start + k * self.r_step, self.sign) for k in range(n)]


@dataclass(frozen=True)
class ImageOrbits:
    families: tuple
    derived_by_symmetry: bool = False

    @property
    def finite(self) -> bool:
        return all(f.count is not None for f in self.families)

    def orbits(self, n_max: int | None = None):
        out = []
        for f in self.families:
            out.extend(f.orbits(n_max))
        return out


def image_r_bounds(ds: DiscreteSeriesParam):
    """Endpoints of {r(k)}: [-(3 f0H + f0Z)/6, (3 f0H - f0Z)/6]."""
    return (F(-(3 * ds.f0H + ds.f0Z), 6), F(3 * ds.f0H - ds.f0Z, 6))


def admissible_orbits_in_image(ds: DiscreteSeriesParam) -> ImageOrbits:
    """Strongly regular admissible B-orbits inside p(G.f0).

    Holomorphic: the 3 f0H orbits r = rmax + (1-m)/3 - 1/2, m = 0..3f0H-1,
    all of sign -.  Anti-holomorphic: same list with sign +.  Neither:
    the two infinite families r_N = rmin - 1/2 - N/3 (sign -) and
    l_N = rmax + 1/2 + N/3 (sign +).
    """
    rmin, rmax = image_r_bounds(ds)
    cls = ds.series_class
    if cls is SeriesClass.NEITHER:
        fams = (
            OrbitFamily(-1, rmin - F(1, 2), F(-1, 3), None),
            OrbitFamily(1, rmax + F(1, 2), F(1, 3), None),
        )
        return ImageOrbits(fams)
    sign = -1 if cls is SeriesClass.HOLOMORPHIC else 1
    fam = OrbitFamily(sign, rmax - F(1, 6), F(-1, 3), 3 * ds.f0H)
    return ImageOrbits((fam,), derived_by_symmetry=sign > 0)


def orbit_in_image(ds: DiscreteSeriesParam, orbit: OrbitDescriptor) -> bool:
    """Whether a strongly regular B- or B1-orbit meets the projected orbit.

    Uses the raw image region (admissibility is not required here):
    B-side r in [rmin, rmax] with the class sign for the two holomorphic
    types, r <= rmin (sign -) or r >= rmax (sign +) for the rest; the
    B1-side reduces to a sign test on the E2-pairing interval.
    """
    cls = ds.series_class
    if orbit.group == "B1":
        if orbit.sign < 0:
            return ds.f0Z - ds.f0H < 0
        return ds.f0Z + ds.f0H > 0
    if orbit.group != "B":
        raise InvalidParameter("expected a B- or B1-orbit")
    rmin, rmax = image_r_bounds(ds)
    if cls is SeriesClass.NEITHER:
        if orbit.sign < 0:
            return orbit.r <= rmin
        return orbit.r >= rmax
    sign = -1 if cls is SeriesClass.HOLOMORPHIC else 1
    return orbit.sign == sign and rmin <= orbit.r <= rmax


# ---------------------------------------------------------------------------
# Transversality dimension dim(g(f) ∩ h).
# ---------------------------------------------------------------------------

def transversality_dim(f: DualForm, subalgebra: str, rtol: float = 1e-9) -> int:
    """dim(g(f) ∩ h) for h = b or b1, by a numeric kernel of f([h_i, .]).

    The columns are the h-basis vectors expanded in the g-basis; row j
    is the pairing of f with [X_j, h_i].  The kernel of that 8 x dim(h)
    matrix is g(f) ∩ h.
    """
    if f.basis_tag != "g_star":
        raise InvalidParameter("transversality_dim expects a form on g")
    hvecs = subalgebra_coeff_basis(subalgebra)
    sc = structure_constants()
    fvals = np.array([float(evaluate_on_basis(f.as_floats(), n)) for n in G_ORDER])
    m = np.zeros((8, len(hvecs)))
    for col, hv in enumerate(hvecs):
        for j in range(8):
            acc = 0.0
            for l, hc in enumerate(hv):
                if hc:
                    acc += float(hc) * float(np.dot([float(c) for c in sc[j, l]], fvals))
            m[j, col] = acc
    return numeric_kernel_dim(m, rtol)
