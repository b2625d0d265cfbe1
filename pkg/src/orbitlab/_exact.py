"""Small exact linear-algebra kit over Q and Q(i).

Exact matrices in this package are numpy object arrays whose entries are
``fractions.Fraction`` (real data) or :class:`GaussianRational` (complex
data).  Every matrix here is at most 8x8, so naive Gaussian elimination
is entirely adequate; no pivoting strategy beyond "first nonzero" is
needed because the arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class GaussianRational:
    """Exact complex scalar a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if not self.im:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


QI_ZERO = GaussianRational(0)
QI_ONE = GaussianRational(1)
QI_I = GaussianRational(0, 1)


def qi(re, im=0):
    return GaussianRational(re, im)


def qi_array(rows):
    """Object array from nested ints / Fractions / GaussianRationals."""
    a = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            a[i, j] = v if isinstance(v, GaussianRational) else GaussianRational(v)
    return a


def frac_array(rows):
    a = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            a[i, j] = v if isinstance(v, Fraction) else Fraction(v)
    return a


def to_complex(a):
    return np.array([[complex(x) for x in row] for row in a], dtype=complex)


def to_float(a):
    return np.array([[float(x) for x in row] for row in a], dtype=float)


def exact_trace(a):
    t = a[0, 0]
    for i in range(1, a.shape[0]):
        t = t + a[i, i]
    return t


def conj_transpose(a):
    n, m = a.shape
    out = np.empty((m, n), dtype=object)
    for i in range(n):
        for j in range(m):
            x = a[i, j]
            out[j, i] = x.conjugate() if isinstance(x, GaussianRational) else x
    return out


def rref(a):
    """Reduced row echelon form of an exact object-array; returns (R, pivots)."""
    r = a.copy()
    nrow, ncol = r.shape
    pivots = []
    lead = 0
    for col in range(ncol):
        piv = None
        for row in range(lead, nrow):
            if r[row, col]:
                piv = row
                break
        if piv is None:
            continue
        if piv != lead:
            r[[piv, lead], :] = r[[lead, piv], :]
        r[lead, :] = _row_div(r[lead, :], r[lead, col])
        for row in range(nrow):
            if row != lead and r[row, col]:
                r[row, :] = r[row, :] - _row_mul(r[lead, :], r[row, col])
        pivots.append(col)
        lead += 1
        if lead == nrow:
            break
    return r, pivots


def _row_div(row, s):
    return np.array([x / s for x in row], dtype=object)


def _row_mul(row, s):
    return np.array([x * s for x in row], dtype=object)


def nullspace(a):
    """Exact kernel basis (list of object vectors) of an object-array matrix."""
    r, pivots = rref(a)
    ncol = a.shape[1]
    free = [j for j in range(ncol) if j not in pivots]
    zero = a[0, 0] * 0 if a.size else Fraction(0)
    basis = []
    for f in free:
        v = np.array([zero for _ in range(ncol)], dtype=object)
        v[f] = zero + 1
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        basis.append(v)
    return basis


def solve_exact(a, b):
    """Solve a x = b exactly; requires a consistent system with unique solution."""
    nrow, ncol = a.shape
    aug = np.empty((nrow, ncol + 1), dtype=object)
    aug[:, :ncol] = a
    aug[:, ncol] = b
    r, pivots = rref(aug)
    if ncol in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < ncol:
        raise ValueError("underdetermined linear system")
    x = np.array([r[i, ncol] for i in range(ncol)], dtype=object)
    return x
