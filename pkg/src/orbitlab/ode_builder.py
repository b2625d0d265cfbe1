"""First-order systems attached to the non-holomorphic discrete series.

For a parameter (f0H, f0Z) with f0H in N+, f0H + f0Z in 2N+ and
|f0Z| < f0H, each weight index m >= 0 and sign +- carries an ordinary
differential system on (0, +infinity)

    y'(t) = (t^{-1} A + t^{-2} B + t^{-3} C) y(t)

whose L^2(dt/t)-solution dimension equals the multiplicity of one
irreducible of B in the restriction.  The unknown count is 2 f0H when
m >= f0H and 2m + 1 when m < f0H.

Block data (P = (f0H - f0Z)/2, Q = (f0H + f0Z)/2):

* A is block diagonal: a leading scalar r (-P for sign -, -Q for +),
  2x2 blocks indexed by n, and for m >= f0H a trailing scalar s
  (-Q for sign -, -P for +).
* The sign - block at n is [[-(n+1-P), sqrt(2) i (n+1)],
  [-sqrt(2) i (f0H-n-1), n+1-P]]; sign + replaces P by Q and flips the
  off-diagonal signs.
* B has blocks [[0, s1], [2 s1 (m-n), 0]] with s1 = +-1 and, for
  m < f0H, a trailing scalar 0.
* C is diagonal with the pattern (-1, +1) per block and a trailing -1
  in the small-m case.

In the variable z = 1/t the system becomes z x' = (M0 + M1 z + M2 z^2) x
with (M0, M1, M2) = (-A, -B, -C): a first-kind singular point at z = 0
and a second-kind point at infinity with envelopes e^{+-z^2/2}.  The
eigenvalues of M0 are P, Q (only one of them for m < f0H) plus the
pairs +-sqrt((P^2 + Q^2) - ((n+1) - Q)^2) for sign - (exchange P and Q
for sign +); exactly f0H + 1 (resp. m + 1) of them are positive.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .discrete_series import DiscreteSeriesParam, SeriesClass
from .lie_su21 import InvalidParameter

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class OdeSystem:
    """System y' = (t^{-1}A + t^{-2}B + t^{-3}C) y for one (m, sign)."""

    m: int
    sign: int
    size: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    f0H: int
    f0Z: int

    def __repr__(self):
        s = "+" if self.sign > 0 else "-"
        return f"OdeSystem(m={self.m}, sign={s}, size={self.size}, f0H={self.f0H}, f0Z={self.f0Z})"


def _a_block(ds: DiscreteSeriesParam, n: int, sign: int) -> np.ndarray:
    if sign < 0:
        beta = n + 1 + (ds.f0Z - ds.f0H) / 2.0
        return np.array(
            [

                [-beta, _SQRT2 * 1j * (n + 1)],
                [-_SQRT2 * 1j * (ds.f0H - n - 1), beta],
            ],
            dtype=complex,
        )
    gamma = (ds.f0Z + ds.f0H) / 2.0
    return np.array(
        [
            [gamma - n - 1, -_SQRT2 * 1j * (n + 1)],
            [_SQRT2 * 1j * (ds.f0H - n - 1), n + 1 - gamma],
        ],
        dtype=complex,
    )


def build_system(ds: DiscreteSeriesParam, m: int, sign: int) -> OdeSystem:
    """Construct the system for (ds, m, sign); ds must be of class neither.

    The unknown ordering follows the natural coefficient vectors: for
    sign -, (b, a) pairs from n = 0 with a trailing b in the small-m
    case; for sign +, (a, b) pairs with a trailing a.
    """
    if ds.series_class is not SeriesClass.NEITHER:
        raise InvalidParameter(
            "systems are built for the non-holomorphic class only; "
            "the holomorphic kernels are known in closed form"
        )
    if sign not in (1, -1):
        raise InvalidParameter("sign must be +1 or -1")
    if m < 0:
        raise InvalidParameter("m must be a non-negative integer")
    large = m >= ds.f0H
    nblocks = ds.f0H - 1 if large else m
    size = 2 * ds.f0H if large else 2 * m + 1

    r = (ds.f0Z - ds.f0H) / 2.0 if sign < 0 else -(ds.f0Z + ds.f0H) / 2.0
    s = -(ds.f0Z + ds.f0H) / 2.0 if sign < 0 else (ds.f0Z - ds.f0H) / 2.0

    a = np.zeros((size, size), dtype=complex)
    b = np.zeros((size, size), dtype=complex)
    c = np.zeros((size, size), dtype=complex)

    a[0, 0] = r
    for n in range(nblocks):
        i = 1 + 2 * n
        a[i:i + 2, i:i + 2] = _a_block(ds, n, sign)
    if large:
        a[-1, -1] = s

    nb_b = ds.f0H if large else m
    for n in range(nb_b):
        i = 2 * n
        b[i, i + 1] = sign
        b[i + 1, i] = sign * 2 * (m - n)
        c[i, i] = -1.0
        c[i + 1, i + 1] = 1.0
    if not large:
        c[-1, -1] = -1.0  # trailing scalar slot; its B entry is 0

    return OdeSystem(m, sign, size, a, b, c, ds.f0H, ds.f0Z)


def to_z_variable(sys: OdeSystem):
    """Coefficients of z x'(z) = (M0 + M1 z + M2 z^2) x after z = 1/t.

    The substitution preserves the L^2 norm against the Haar measure of
    the multiplicative half-line.
    """
    return -sys.A, -sys.B, -sys.C


def closed_form_spectrum(ds: DiscreteSeriesParam, m: int, sign: int = -1):
    """Eigenvalues of M0 = -A for (ds, m, sign), in closed form.

    Returns a sorted list of floats: the scalar(s) P = (f0H - f0Z)/2
    and Q = (f0H + f0Z)/2 (both for m >= f0H, only the leading one for
    m < f0H) and a +-sqrt pair per 2x2 block.
    """
    if ds.series_class is not SeriesClass.NEITHER:
        raise InvalidParameter("closed-form spectrum applies to the neither class")
    p = (ds.f0H - ds.f0Z) / 2.0
    q = (ds.f0H + ds.f0Z) / 2.0
    large = m >= ds.f0H
    nblocks = ds.f0H - 1 if large else m
    if sign < 0:
        vals = [p] + ([q] if large else [])
        shift = q
    else:
        vals = [q] + ([p] if large else [])
        shift = p
    for n in range(nblocks):
        rad = (p * p + q * q) - ((n + 1) - shift) ** 2
        root = math.sqrt(rad)
        vals.extend([root, -root])
    return sorted(vals)


def positive_count(ds: DiscreteSeriesParam, m: int) -> int:
    """Number of positive eigenvalues of M0: f0H + 1 (m >= f0H) or m + 1."""
    return ds.f0H + 1 if m >= ds.f0H else m + 1


def holomorphic_kernel_dims(ds: DiscreteSeriesParam):
    """Closed-form solution-space dimensions for the holomorphic classes.

    The analogous first-order equations decouple into scalar equations
    with solutions proportional to t^{(f0H+f0Z)/2 - n} e^{+-t^{-2}/2};
    the e^{+1/(2t^2)} branch is never L^2(dt/t) while the decaying
    branch is L^2 exactly when (f0H + f0Z)/2 < 0.  This gives dimension
    0 on one side and f0H on the other.
    """
    if ds.series_class is SeriesClass.NEITHER:
        raise InvalidParameter("closed-form kernels apply to the holomorphic classes")
    return 0, ds.f0H


def dump_system(sys: OdeSystem, fmt: str = "json") -> str:
    """Serialize the system matrices (row-major, 're,im' entry pairs)."""

    def mat_rows(mat):
        return [[[float(v.real), float(v.imag)] for v in row] for row in mat]

    if fmt == "json":
        payload = {
            "schema": 1,
            "m": sys.m,
            "sign": "+" if sys.sign > 0 else "-",
            "size": sys.size,
            "f0H": sys.f0H,
            "f0Z": sys.f0Z,
            "A": mat_rows(sys.A),
            "B": mat_rows(sys.B),
            "C": mat_rows(sys.C),
        }
        return json.dumps(payload, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("matrix,row,col,re,im\n")
        for name, mat in (("A", sys.A), ("B", sys.B), ("C", sys.C)):
            for i in range(sys.size):
                for j in range(sys.size):
                    v = complex(mat[i, j])
                    buf.write(f"{name},{i},{j},{v.real!r},{v.imag!r}\n")
        return buf.getvalue()
    raise InvalidParameter(f"unknown dump format {fmt!r}")
