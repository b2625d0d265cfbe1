"""Strongly regular coadjoint orbits of B and B1 and their invariants.

The strongly regular B1-orbits in b1* are the two open sets
Omega^{+-} = {f : f(E2) >< 0}.  The strongly regular B-orbits in b* are
Omega_{r,+-} = B.(r W* +- E2*), classified by the conjugation invariants

    r(f) = w + (x^2 + y^2) / (2 z),     eps(f) = sign(z)

for f = w W* + s S* + x E1* + y E1p* + z E2*.  An orbit Omega_{r,eps}
carries a unitary character datum iff r + 1/2 is in Z/3; the associated
irreducible of B is labelled T_{m,-} with r = m/3 - 1/2 and T_{m,+}
with r = m/3 + 1/2.

Orbit parameters are kept as exact rationals; float inputs are snapped
to a rational with bounded denominator (admissibility is arithmetic,
not metric).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .lie_su21 import DualForm, InvalidParameter, form

F = Fraction

DEFAULT_DENOMINATOR_BOUND = 10**6


class _Sentinel:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return self.__class__.__name__


class NotStronglyRegular(_Sentinel):
    """Classification value for forms outside the strongly regular set."""


class NotAdmissible(_Sentinel):
    """Value returned when an orbit carries no admissibility datum."""


NOT_STRONGLY_REGULAR = NotStronglyRegular()
NOT_ADMISSIBLE = NotAdmissible()


@dataclass(frozen=True)
class OrbitDescriptor:
    """A strongly regular coadjoint orbit of G, B or B1.

    * group "G":  params (f0H, f0Z) of a compact-Cartan representative
    * group "B":  invariant pair (r, sign), r exact rational
    * group "B1": sign only
    """

    group: str
    r: Fraction | None = None
    sign: int | None = None
    f0H: int | None = None
    f0Z: int | None = None

    def __post_init__(self):
        if self.group not in ("G", "B", "B1"):
            raise InvalidParameter("group must be 'G', 'B' or 'B1'")
        if self.sign not in (None, 1, -1):
            raise InvalidParameter("sign must be +1 or -1")

    def __repr__(self):
        if self.group == "B":
            return f"Orbit(B, r={self.r}, {'+' if self.sign > 0 else '-'})"
        if self.group == "B1":
            return f"Orbit(B1, {'+' if self.sign > 0 else '-'})"
        return f"Orbit(G, f0H={self.f0H}, f0Z={self.f0Z})"


def b_orbit(r, sign: int) -> OrbitDescriptor:
    return OrbitDescriptor("B", r=F(r), sign=sign)


def b1_orbit(sign: int) -> OrbitDescriptor:
    return OrbitDescriptor("B1", sign=sign)


def g_orbit(f0H: int, f0Z: int) -> OrbitDescriptor:
    return OrbitDescriptor("G", f0H=f0H, f0Z=f0Z)


@dataclass(frozen=True)
class ReprLabel:
    """Label of an irreducible unitary of B (T_{m,+-}) or B1 (T_{+-})."""

    group: str
    sign: int
    m: int | None = None

    def __repr__(self):
        s = "+" if self.sign > 0 else "-"
        return f"T[{self.m},{s}]" if self.group == "B" else f"T[{s}]"


def _to_fraction(x, denominator_bound: int) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return F(x)
    if isinstance(x, Real):
        return F(float(x)).limit_denominator(denominator_bound)
    raise InvalidParameter(f"cannot interpret {x!r} as a rational")


def classify_b_form(f: DualForm, denominator_bound: int = DEFAULT_DENOMINATOR_BOUND):
    """Orbit of a form on b: Omega_{r,eps} with r = w + (x^2+y^2)/(2z).

    Total on b*: forms with vanishing E2-coefficient return
    NOT_STRONGLY_REGULAR.  Float coefficients are snapped to rationals
    with denominators bounded by ``denominator_bound``.
    """
    if f.basis_tag != "b_star":
        raise InvalidParameter("classify_b_form expects a form on b")
    w, s, x, y, z = (_to_fraction(c, denominator_bound) for c in f.coeffs)
    if z == 0:
        return NOT_STRONGLY_REGULAR
    r = w + (x * x + y * y) / (2 * z)
    return b_orbit(r, 1 if z > 0 else -1)


def classify_b1_form(f: DualForm, denominator_bound: int = DEFAULT_DENOMINATOR_BOUND):
    """Orbit of a form on b1: Omega^+ or Omega^- by the sign of f(E2)."""
    if f.basis_tag != "b1_star":
        raise InvalidParameter("classify_b1_form expects a form on b1")
    z = _to_fraction(f.coeffs[3], denominator_bound)
    if z == 0:
        return NOT_STRONGLY_REGULAR
    return b1_orbit(1 if z > 0 else -1)


def b_orbit_admissible(r) -> bool:
    """Admissibility of Omega_{r,+-}: true iff 3(r + 1/2) is an integer."""
    rq = F(r)
    return (3 * (rq + F(1, 2))).denominator == 1


def orbit_to_repr(orbit: OrbitDescriptor):
    """Label T_{m,+-} attached to an admissible B-orbit.

    m = 3(r + 1/2) for sign -, m = 3(r - 1/2) for sign +; returns
    NOT_ADMISSIBLE when that is not an integer.
    """
    if orbit.group != "B":
        raise InvalidParameter("orbit_to_repr expects a B-orbit")
    shift = F(1, 2) if orbit.sign < 0 else F(-1, 2)
    m3 = 3 * (orbit.r + shift)
    if m3.denominator != 1:
        return NOT_ADMISSIBLE
    return ReprLabel("B", orbit.sign, int(m3))


def repr_to_orbit(label: ReprLabel) -> OrbitDescriptor:
    """Orbit attached to T_{m,+-}: r = m/3 - 1/2 (sign -) or m/3 + 1/2 (sign +)."""
    if label.group != "B":
        raise InvalidParameter("repr_to_orbit expects a B-label")
    shift = F(-1, 2) if label.sign < 0 else F(1, 2)
    return b_orbit(F(label.m, 3) + shift, label.sign)


def auslander_kostant_translate(m: int, sign: int):
    """Entire and admissible parameters of T_{m,+-} on the Borel side.

    Returns (g_form, f_form) on b*: the entire form g = (m/3) W* +- E2*
    and the admissible form f = (m/3 +- 1/2) W* +- E2*.  The shift
    f - g = (+-1/2) W* comes from tr(ad W) on the invariant polarization.
    """
    if sign not in (1, -1):
        raise InvalidParameter("sign must be +1 or -1")
    g_form = form("b_star", W=F(m, 3), E2=sign)
    f_form = form("b_star", W=F(m, 3) + sign * F(1, 2), E2=sign)
    return g_form, f_form
