"""Discrete-series parameters of SU(2,1) and their Borel branching laws.

A discrete series is pinned down by the pair (f0H, f0Z) = (f0(H), f0(Z))
of a compact-Cartan representative of its coadjoint orbit:

* holomorphic:       f0H in N+, f0H + f0Z even and < 0
* anti-holomorphic:  f0H in N+, f0Z - f0H even and > 0
* neither:           f0H in N+, f0H + f0Z in 2N+, |f0Z| < f0H

In Harish-Chandra terms f0H = lam(H12); the second parameter is
lam(H31) = n3 for the holomorphic chamber (f0Z = -(f0H + 2 n3)) and
lam(H13) = n2 for the non-holomorphic one (f0Z = 2 n2 - f0H).

Branching to B = MAN:

* holomorphic:  sum over m = 0..f0H-1 of T_{L_m,-}, L_m = (3 f0H - f0Z)/2 - 3m
* neither:      sum over m >= 0 of T_{3m + (3 f0H - f0Z)/2, +}
                plus sum over m >= 0 of T_{-(3m + (3 f0H + f0Z)/2), -}
* anti-holomorphic by the mirror (f0H, f0Z) -> (f0H, -f0Z), signs and
  labels negated.

Branching to B1 = AN: f0H . T_- (holomorphic), f0H . T_+ (anti-),
infinite multiples of both T_+ and T_- otherwise.

All multiplicities on the B side are 0 or 1, and a label T_{m,s} occurs
iff the central characters match: m + (3 f0H + f0Z)/2 = 0 (mod 3).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .lie_su21 import InvalidParameter

F = Fraction


class SeriesClass(enum.Enum):
    HOLOMORPHIC = "Holo"
    ANTIHOLOMORPHIC = "AntiHolo"
    NEITHER = "Neither"


@dataclass(frozen=True)
class DiscreteSeriesParam:
    """Discrete-series parameter (f0H, f0Z); class and indices are derived."""

    f0H: int
    f0Z: int

    def __post_init__(self):
        if not (isinstance(self.f0H, int) and isinstance(self.f0Z, int)):
            raise InvalidParameter("f0H and f0Z must be integers")
        if self.f0H <= 0:
            raise InvalidParameter("f0H must be a positive integer")
        if (self.f0H + self.f0Z) % 2 != 0:
            raise InvalidParameter("f0H + f0Z must be even (integrality)")
        if abs(self.f0H) == abs(self.f0Z):
            raise InvalidParameter("|f0H| = |f0Z| is singular (not strongly regular)")

    @property
    def series_class(self) -> SeriesClass:
        if self.f0H + self.f0Z < 0:
            return SeriesClass.HOLOMORPHIC
        if self.f0Z - self.f0H > 0:
            return SeriesClass.ANTIHOLOMORPHIC
        return SeriesClass.NEITHER

    @property
    def q_lambda(self) -> int:
        return {
            SeriesClass.HOLOMORPHIC: 0,
            SeriesClass.NEITHER: 1,
            SeriesClass.ANTIHOLOMORPHIC: 2,
        }[self.series_class]

    @property
    def n1(self) -> int:
        """lam(H12)."""
        return self.f0H

    @property
    def n2(self) -> int:
        """lam(H13) = (f0H + f0Z)/2."""
        return (self.f0H + self.f0Z) // 2

    @property
    def n3(self) -> int:
        """lam(H31) = -(f0H + f0Z)/2."""
        return -(self.f0H + self.f0Z) // 2

    def mirror(self) -> "DiscreteSeriesParam":
        """Parameter of the contragredient series: (f0H, -f0Z)."""
        return DiscreteSeriesParam(self.f0H, -self.f0Z)

    def __repr__(self):
        return f"DS(f0H={self.f0H}, f0Z={self.f0Z}, {self.series_class.value})"


def from_harish_chandra(n1: int, second: int, chamber: str) -> DiscreteSeriesParam:
    """Discrete series from Harish-Chandra data in a named positive chamber.

    chamber "D1": (n1, n3) = (lam(H12), lam(H31)), both positive -> holomorphic.
    chamber "D2": (n1, k)  = (lam(H12), lam(H23)), both positive -> anti-holomorphic.
    chamber "D3": (n1, n2) = (lam(H12), lam(H13)), n1 > n2 >= 1 -> neither.
    """
    chamber = chamber.upper().replace("Δ", "D")
    if not (isinstance(n1, int) and isinstance(second, int)):
        raise InvalidParameter("Harish-Chandra parameters must be integers")
    if n1 < 1 or second < 1:
        raise InvalidParameter("Harish-Chandra parameters must be positive integers")
    if chamber == "D1":
        return DiscreteSeriesParam(n1, -(n1 + 2 * second))
    if chamber == "D2":
        return DiscreteSeriesParam(n1, n1 + 2 * second)
    if chamber == "D3":
        if n1 <= second:
            raise InvalidParameter("chamber D3 requires lam(H12) > lam(H13)")
        return DiscreteSeriesParam(n1, 2 * second - n1)
    raise InvalidParameter(f"unknown chamber {chamber!r}")


@dataclass(frozen=True)
class ArithmeticFamily:
    """Infinite family of labels m = start, start+step, ... with one sign."""

    start: int
    step: int
    sign: int
    multiplicity: int = 1

    def labels(self, n_max: int):
        return [self.start + k * self.step for k in range(n_max)]


@dataclass(frozen=True)
class BranchingDecomposition:
    """Decomposition of a restriction to B or B1.

    ``entries`` holds explicit (m, sign, multiplicity) rows (m is None
    for the two B1 classes T_+-, multiplicity may be math.inf there);
    ``families`` holds lazily enumerated infinite label families on the
    B side.
    """

    target: str
    f0H: int
    f0Z: int
    series_class: SeriesClass
    entries: tuple = ()
    families: tuple = ()
    derived_by_symmetry: bool = False

    def entries_up_to(self, n_max: int):
        """Explicit rows, expanding each infinite family to n_max terms."""
        rows = list(self.entries)
        for fam in self.families:
            rows.extend((m, fam.sign, fam.multiplicity) for m in fam.labels(n_max))
        return rows

    def is_admissible(self) -> bool:
        """True when every multiplicity is finite."""
        return all(mult != math.inf for (_, _, mult) in self.entries)

    def to_json(self, n_max: int = 10) -> dict:
        def sgn(s):
            return "+" if s > 0 else "-"

        entries = [
            {"m": m, "sign": sgn(s), "mult": ("inf" if mult == math.inf else mult)}
            for (m, s, mult) in (
                self.entries if not self.families else self.entries_up_to(n_max)
            )
        ]
        return {
            "class": self.series_class.value,
            "f0H": self.f0H,
            "f0Z": self.f0Z,
            "target": self.target,
            "entries": entries,
            "infinite_families": [
                {"start": f.start, "step": f.step, "sign": sgn(f.sign)}
                for f in self.families
            ],
        }


def branch_to_B(ds: DiscreteSeriesParam) -> BranchingDecomposition:
    """Decomposition of the restriction to the Borel subgroup B."""
    cls = ds.series_class
    a = (3 * ds.f0H + ds.f0Z) // 2
    b = (3 * ds.f0H - ds.f0Z) // 2
    if cls is SeriesClass.HOLOMORPHIC:
        entries = tuple((b - 3 * m, -1, 1) for m in range(ds.f0H))
        return BranchingDecomposition("B", ds.f0H, ds.f0Z, cls, entries=entries)
    if cls is SeriesClass.ANTIHOLOMORPHIC:
        # Mirror of the holomorphic law: labels and signs negated.
        entries = tuple((-(a - 3 * m), 1, 1) for m in range(ds.f0H))
        return BranchingDecomposition(
            "B", ds.f0H, ds.f0Z, cls, entries=entries, derived_by_symmetry=True
        )
    fams = (ArithmeticFamily(b, 3, 1), ArithmeticFamily(-a, -3, -1))
    return BranchingDecomposition("B", ds.f0H, ds.f0Z, cls, families=fams)


def branch_to_B1(ds: DiscreteSeriesParam) -> BranchingDecomposition:
    """Decomposition of the restriction to B1 = AN (two classes T_+-)."""
    cls = ds.series_class
    if cls is SeriesClass.HOLOMORPHIC:
        entries = ((None, -1, ds.f0H),)
    elif cls is SeriesClass.ANTIHOLOMORPHIC:
        entries = ((None, 1, ds.f0H),)
    else:
        entries = ((None, 1, math.inf), (None, -1, math.inf))
    return BranchingDecomposition(
        "B1", ds.f0H, ds.f0Z, cls,
        entries=entries,
        derived_by_symmetry=cls is SeriesClass.ANTIHOLOMORPHIC,
    )


def central_character_selects(ds: DiscreteSeriesParam, m: int) -> bool:
    """Central-character match between the series and T_{m,+-}.

    The center of G (= center of B) is the order-3 group of cube roots
    of unity; T_{m,+-} restricts to it through the character of weight
    m/3 on M.  Matching holds iff m + (3 f0H + f0Z)/2 = 0 (mod 3).
    """
    return (m + (3 * ds.f0H + ds.f0Z) // 2) % 3 == 0


def weyl_dimension(ds: DiscreteSeriesParam) -> int:
    """Dimension of the lowest K-type (Weyl dimension formula): f0H."""
    return ds.f0H


def b1_admissible_restriction(ds: DiscreteSeriesParam) -> bool:
    """Whether the restriction to B1 is admissible (finite multiplicities)."""
    return ds.series_class is not SeriesClass.NEITHER
