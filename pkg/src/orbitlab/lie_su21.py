"""Exact structure layer for the real Lie algebra su(2,1).

Conventions
-----------
g = su(2,1) = {X in M3(C) : X^*.I21 + I21.X = 0, tr X = 0} with
I21 = diag(1,1,-1).  Distinguished elements (all Gaussian-rational):

* ``H = i.diag(1,-1,0)``   compact coroot, (H,F,V) orthonormal basis of k'=su(2)
* ``Z = i.diag(1,1,-2)``   generator of the center of k = u(2)
* ``W = (i/3).diag(1,-2,1)``  generator of m, centralizer of a in k
* ``S``                    generator of a, maximal abelian in p
* ``E1, E1p, E2``          restricted root vectors; n = <E1,E1p,E2> is a
                           3-dimensional Heisenberg algebra, [E1,E1p] = E2

Subalgebras: b1 = a + n with ordered basis (S,E1,E1p,E2) and the Borel
b = m + a + n with ordered basis (W,S,E1,E1p,E2).

Linear forms are coefficient vectors (:class:`DualForm`).  On g* the
reference basis is the image of (H, F, V, Z/3, S, E1, E1p, E2) under the
invariant pairing X -> (Y -> -tr(XY)/2); equivalently <H*,Y> = -tr(HY)/2
and <Z*,Y> = -tr(ZY)/6.  On b* and b1* the reference bases are the
algebraic dual bases of the ordered bases above.

Scalars may be exact (Fraction / GaussianRational) or floating point;
orbit and admissibility arithmetic downstream relies on the exact path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._exact import (
    GaussianRational,
    conj_transpose,
    exact_trace,
    nullspace,
    qi,
    qi_array,
    rref,
    solve_exact,
    to_complex,
)

F = Fraction

I21 = qi_array([[1, 0, 0], [0, 1, 0], [0, 0, -1]])

_i = qi(0, 1)

# 3x3 generators, exact.
_H = qi_array([[_i, 0, 0], [0, -_i, 0], [0, 0, 0]])
_Z = qi_array([[_i, 0, 0], [0, _i, 0], [0, 0, -2 * _i]])
_W = qi_array([[_i / 3, 0, 0], [0, -2 * _i / 3, 0], [0, 0, _i / 3]])
_F = qi_array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
_V = qi_array([[0, _i, 0], [_i, 0, 0], [0, 0, 0]])
_S = qi_array([[0, 0, 1], [0, 0, 0], [1, 0, 0]])
_E1 = qi_array([[0, -1, 0], [1, 0, -1], [0, -1, 0]])
_E1P = qi_array([[0, -_i, 0], [-_i, 0, _i], [0, -_i, 0]])
_E2 = qi_array([[2 * _i, 0, -2 * _i], [0, 0, 0], [2 * _i, 0, -2 * _i]])

G_ORDER = ("H", "F", "V", "Z", "S", "E1", "E1p", "E2")
B_ORDER = ("W", "S", "E1", "E1p", "E2")
B1_ORDER = ("S", "E1", "E1p", "E2")

_MATS = {
    "H": _H,
    "F": _F,
    "V": _V,
    "Z": _Z,
    "W": _W,
    "S": _S,
    "E1": _E1,
    "E1p": _E1P,
    "E2": _E2,
}

# g*-basis vectors are the pairing images of these matrices (Z scaled to Z/3).
_STAR_MATS = [_MATS[n] if n != "Z" else _Z * qi(F(1, 3)) for n in G_ORDER]

BASIS_TAGS = {"g_star": 8, "b_star": 5, "b1_star": 4}


class InvalidParameter(ValueError):
    """Raised on inputs outside an operation's stated domain."""


@dataclass(frozen=True)
class AlgebraElement:
    """Element of su(2,1) (or its complexification) as a 3x3 matrix.

    ``entries`` is either an object array of GaussianRational (exact mode)
    or a complex ndarray.
    """

    entries: np.ndarray

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    def to_complex(self) -> np.ndarray:
        if self.exact:
            return to_complex(self.entries)
        return self.entries

    def is_zero(self, tol=0.0) -> bool:
        if self.exact:
            return not any(bool(x) for x in self.entries.flat)
        return bool(np.max(np.abs(self.entries)) <= tol)

    def __add__(self, other):
        if self.exact and other.exact:
            return AlgebraElement(self.entries + other.entries)
        return AlgebraElement(self.to_complex() + other.to_complex())

    def __sub__(self, other):
        if self.exact and other.exact:
            return AlgebraElement(self.entries - other.entries)
        return AlgebraElement(self.to_complex() - other.to_complex())

    def scale(self, s):
        if self.exact and isinstance(s, (int, Fraction, GaussianRational)):
            return AlgebraElement(self.entries * s)
        return AlgebraElement(self.to_complex() * complex(s))


def basis_element(name: str) -> AlgebraElement:
    return AlgebraElement(_MATS[name])


def in_su21(x: AlgebraElement, tol: float = 0.0) -> bool:
    """Membership test: X^*.I21 + I21.X = 0 and tr X = 0.

    Exact entries are tested with tolerance 0.
    """
    if x.exact:
        m = conj_transpose(x.entries).dot(I21) + I21.dot(x.entries)
        return not any(bool(v) for v in m.flat) and not bool(exact_trace(x.entries))
    i21 = to_complex(I21)
    m = x.entries.conj().T @ i21 + i21 @ x.entries
    return float(np.max(np.abs(m))) <= tol and abs(np.trace(x.entries)) <= tol


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Matrix commutator [X, Y] = XY - YX."""
    if x.exact and y.exact:
        return AlgebraElement(x.entries.dot(y.entries) - y.entries.dot(x.entries))
    a, b = x.to_complex(), y.to_complex()
    return AlgebraElement(a @ b - b @ a)


def _realify_basis(star=False):
    """18x8 Fraction matrix mapping g-coefficients to stacked Re/Im entries."""
    mats = _STAR_MATS if star else [_MATS[n] for n in G_ORDER]
    rows = []
    for p in range(3):
        for q in range(3):
            rows.append([m[p, q].re for m in mats])
            rows.append([m[p, q].im for m in mats])
    a = np.empty((18, 8), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            a[i, j] = v
    return a


_EXPAND = _realify_basis(star=False)
_EXPAND_STAR = _realify_basis(star=True)
_EXPAND_F = np.array([[float(v) for v in row] for row in _EXPAND])
_EXPAND_STAR_F = np.array([[float(v) for v in row] for row in _EXPAND_STAR])
_EXPAND_PINV = np.linalg.pinv(_EXPAND_F)
_EXPAND_STAR_PINV = np.linalg.pinv(_EXPAND_STAR_F)


def _stack_reim_exact(m):
    v = np.empty(18, dtype=object)
    k = 0
    for p in range(3):
        for q in range(3):
            x = m[p, q]
            v[k] = x.re
            v[k + 1] = x.im
            k += 2
    return v


def expand_in_basis(x: AlgebraElement, star: bool = False):
    """Coefficients of X in the g-basis (or the scaled star basis)."""
    if x.exact:
        a = _EXPAND_STAR if star else _EXPAND
        return tuple(solve_exact(a, _stack_reim_exact(x.entries)))
    m = x.to_complex()
    v = np.empty(18)
    v[0::2] = m.real.reshape(-1)
    v[1::2] = m.imag.reshape(-1)
    p = _EXPAND_STAR_PINV if star else _EXPAND_PINV
    return tuple(p @ v)


@lru_cache(maxsize=1)
def structure_constants():
    """c[i][j] = coefficients of [X_i, X_j] in the g-basis, exact."""
    n = len(G_ORDER)
    out = {}
    for i in range(n):
        for j in range(n):
            br = bracket(basis_element(G_ORDER[i]), basis_element(G_ORDER[j]))
            out[i, j] = expand_in_basis(br)
    return out


@lru_cache(maxsize=1)
def pairing_matrix():
    """P[i][j] = <X_i*, X_j> with the -tr/2 pairing (Z row uses -tr/6)."""
    p = np.empty((8, 8), dtype=object)
    for i, sm in enumerate(_STAR_MATS):
        for j, name in enumerate(G_ORDER):
            val = exact_trace(sm.dot(_MATS[name])) * qi(F(-1, 2))
            if val.im:
                raise RuntimeError("pairing of real basis elements must be real")
            p[i, j] = val.re
    return p


@dataclass(frozen=True)
class DualForm:
    """Linear form as a coefficient vector over a fixed dual basis.

    basis_tag is one of ``g_star`` (8 coefficients against H*,F*,V*,Z*,
    S*,E1*,E1p*,E2*), ``b_star`` (5, against W*,S*,E1*,E1p*,E2*) or
    ``b1_star`` (4, against S*,E1*,E1p*,E2*).
    """

    basis_tag: str
    coeffs: tuple

    def __post_init__(self):
        if self.basis_tag not in BASIS_TAGS:
            raise InvalidParameter(f"unknown basis tag {self.basis_tag!r}")
        if len(self.coeffs) != BASIS_TAGS[self.basis_tag]:
            raise InvalidParameter(
                f"{self.basis_tag} needs {BASIS_TAGS[self.basis_tag]} coefficients"
            )

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def __add__(self, other):
        if self.basis_tag != other.basis_tag:
            raise InvalidParameter("cannot add forms over different bases")
        return DualForm(self.basis_tag, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if self.basis_tag != other.basis_tag:
            raise InvalidParameter("cannot subtract forms over different bases")
        return DualForm(self.basis_tag, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, s):
        return DualForm(self.basis_tag, tuple(s * c for c in self.coeffs))

    def coeff(self, name: str):
        order = {"g_star": G_ORDER, "b_star": B_ORDER, "b1_star": B1_ORDER}[self.basis_tag]
        return self.coeffs[order.index(name)]

    def as_floats(self) -> "DualForm":
        return DualForm(self.basis_tag, tuple(float(c) for c in self.coeffs))

    def norm(self) -> float:
        return math.sqrt(sum(float(c) ** 2 for c in self.coeffs))


def form(tag: str, **by_name) -> DualForm:
    """Build a DualForm from named coefficients, e.g. form('b_star', W=r, E2=1)."""
    order = {"g_star": G_ORDER, "b_star": B_ORDER, "b1_star": B1_ORDER}[tag]
    coeffs = [by_name.pop(n, 0) for n in order]
    if by_name:
        raise InvalidParameter(f"unknown coefficient names {sorted(by_name)}")
    return DualForm(tag, tuple(coeffs))


def t_form(f0H, f0Z) -> DualForm:
    """Form f0 = f0(H) H* + f0(Z) Z* on g, supported on the compact Cartan."""
    return form("g_star", H=f0H, Z=f0Z)


def killing_dualize(f: DualForm) -> AlgebraElement:
    """Algebra element X_f with f(Y) = -tr(X_f Y)/2; inverse of algebra_to_form."""
    if f.basis_tag != "g_star":
        raise InvalidParameter("killing_dualize expects a form on g")
    if f.exact:
        acc = np.full((3, 3), qi(0), dtype=object)
        for c, sm in zip(f.coeffs, _STAR_MATS):
            if c:
                acc = acc + sm * qi(F(c))
        return AlgebraElement(acc)
    acc = np.zeros((3, 3), dtype=complex)
    for c, sm in zip(f.coeffs, _STAR_MATS):
        acc += complex(c) * to_complex(sm)
    return AlgebraElement(acc)


def algebra_to_form(x: AlgebraElement) -> DualForm:
    """g*-coefficients of the form Y -> -tr(XY)/2."""
    return DualForm("g_star", expand_in_basis(x, star=True))


def evaluate(f: DualForm, y: AlgebraElement):
    """Pair a g*-form against an algebra element."""
    if f.basis_tag != "g_star":
        raise InvalidParameter("evaluate expects a form on g")
    xf = killing_dualize(f)
    if xf.exact and y.exact:
        val = exact_trace(xf.entries.dot(y.entries)) * qi(F(-1, 2))
        if val.im:
            raise InvalidParameter("pairing of a real form with a non-real element")
        return val.re
    val = -0.5 * np.trace(xf.to_complex() @ y.to_complex())
    return val if abs(val.imag) > 1e-12 else val.real


def evaluate_on_basis(f: DualForm, name: str):
    """f(X) for a named g-basis element or W (for forms on g)."""
    pm = pairing_matrix()
    if name == "W":
        # W = H/2 - Z/6 in the g-basis.
        cols = [F(1, 2) * pm[i, G_ORDER.index("H")] - F(1, 6) * pm[i, G_ORDER.index("Z")]
                for i in range(8)]
    else:
        j = G_ORDER.index(name)
        cols = [pm[i, j] for i in range(8)]
    return sum(c * v for c, v in zip(f.coeffs, cols))


# ---------------------------------------------------------------------------
# Closed-form 3x3 exponentials for the distinguished one-parameter groups.
# W, Z, H are diagonal; V, F generate rotations; S is hyperbolic; n is
# nilpotent of step 3, so exp on n is the quadratic polynomial.
# ---------------------------------------------------------------------------

def exp_W(w: float) -> np.ndarray:
    return np.diag(np.exp(1j * np.array([w / 3, -2 * w / 3, w / 3])))


def exp_Z(u: float) -> np.ndarray:
    return np.diag(np.exp(1j * np.array([u, u, -2 * u])))


def exp_H(t: float) -> np.ndarray:
    return np.diag(np.exp(1j * np.array([t, -t, 0.0])))


def exp_V(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 1j * s, 0], [1j * s, c, 0], [0, 0, 1]], dtype=complex)


def exp_F(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]], dtype=complex)


def exp_S(s: float) -> np.ndarray:
    ch, sh = math.cosh(s), math.sinh(s)
    return np.array([[ch, 0, sh], [0, 1, 0], [sh, 0, ch]], dtype=complex)


def exp_n(x: float, y: float, z: float) -> np.ndarray:
    """exp(x E1 + y E1p + z E2); cubes of n-elements vanish."""
    n = x * to_complex(_E1) + y * to_complex(_E1P) + z * to_complex(_E2)
    return np.eye(3, dtype=complex) + n + 0.5 * (n @ n)


def k_matrix(phi: float, theta: float, psi: float = 0.0, u: float = 0.0) -> np.ndarray:
    """K-element exp(phi W).exp(-(theta/2) V).exp(psi W).exp(u Z)."""
    return exp_W(phi) @ exp_V(-theta / 2) @ exp_W(psi) @ exp_Z(u)


def sample_k(rng) -> np.ndarray:
    phi = rng.uniform(0, 2 * math.pi)
    theta = rng.uniform(0, math.pi)
    psi = rng.uniform(0, 2 * math.pi)
    u = rng.uniform(0, 2 * math.pi)
    return k_matrix(phi, theta, psi, u)


def coadjoint_g(gmat: np.ndarray, f: DualForm, gmat_inv: np.ndarray | None = None) -> DualForm:
    """Coadjoint action of g in SU(2,1) on a g*-form, through the pairing.

    Under the identification X -> -tr(X.)/2 the coadjoint action becomes
    conjugation: g.f corresponds to Ad(g) X_f = g X_f g^{-1}.  Pass
    ``gmat_inv`` when a closed-form inverse is available (numerically
    inverting badly scaled group elements loses the cancellation
    structure).
    """
    xf = killing_dualize(f).to_complex()
    if gmat_inv is None:
        gmat_inv = np.linalg.inv(gmat)
    ad = gmat @ xf @ gmat_inv
    return algebra_to_form(AlgebraElement(ad))


def k_orbit_form(f0H, f0Z, phi: float, theta: float) -> DualForm:
    """Closed form for k.f0 with k = exp(phi W) exp(-(theta/2) V) (mod stabilizer).

    Ad(k) fixes Z and rotates H inside k' = <H,F,V>:
    k.f0 = f0H (cos(theta) H* - sin(theta)cos(phi) F* - sin(theta)sin(phi) V*) + f0Z Z*.
    """
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return form("g_star", H=f0H * ct, F=-f0H * st * cp, V=-f0H * st * sp, Z=f0Z)


# ---------------------------------------------------------------------------
# The Borel group B = M A N in coordinates, acting on b*.
# ---------------------------------------------------------------------------

def _adinv_matrix(c, d, u, x, y, z):
    """Ad(g^{-1}) on b for g = exp(wW) exp(xE1+yE1p) exp(zE2) exp(sS).

    c = cos w, d = sin w, u = e^{-s}.  Columns are images of (W,S,E1,E1p,E2).
    Works over floats or exact rationals (c,d,u rational with c^2+d^2 = 1).
    """
    u2 = u * u
    half = F(1, 2) if isinstance(u, (Fraction, int)) else 0.5
    rows = [
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [-u * y, u * x, u * c, u * d, 0],
        [u * x, u * y, -u * d, u * c, 0],
        [-u2 * (x * x + y * y) * half, 2 * z * u2, u2 * (c * y + d * x), u2 * (d * y - c * x), u2],
    ]
    a = np.empty((5, 5), dtype=object)
    for i in range(5):
        for j in range(5):
            a[i, j] = rows[i][j]
    return a


@dataclass(frozen=True)
class GroupElementB:
    """Element of B = MAN, carried as Ad(g^{-1}) on b plus its 3x3 matrix.

    ``params`` is (w, s, x, y, z) for elements built from coordinates of
    exp(wW).exp(xE1+yE1p).exp(zE2).exp(sS); composites have params None.
    Exact elements (rational cos/sin/e^{-s}) have matrix None.
    """

    ad_inv: np.ndarray
    matrix: np.ndarray | None = None
    params: tuple | None = None

    @classmethod
    def from_params(cls, w=0.0, s=0.0, x=0.0, y=0.0, z=0.0):
        c, d, u = math.cos(w), math.sin(w), math.exp(-s)
        mat = exp_W(w) @ exp_n(x, y, 0.0) @ exp_n(0.0, 0.0, z) @ exp_S(s)
        return cls(_adinv_matrix(c, d, u, x, y, z), mat, (w, s, x, y, z))

    @classmethod
    def from_exact(cls, cos_w, sin_w, u, x, y, z):
        """Exact element: cos_w^2 + sin_w^2 = 1 and u = e^{-s} > 0, all rational."""
        c, d, u, x, y, z = (F(v) for v in (cos_w, sin_w, u, x, y, z))
        if c * c + d * d != 1:
            raise InvalidParameter("cos_w^2 + sin_w^2 must equal 1 exactly")
        if u <= 0:
            raise InvalidParameter("u = e^{-s} must be positive")
        return cls(_adinv_matrix(c, d, u, x, y, z))

    @classmethod
    def identity(cls):
        return cls.from_params()

    def compose(self, other: "GroupElementB") -> "GroupElementB":
        """Group product self . other."""
        mat = None
        if self.matrix is not None and other.matrix is not None:
            mat = self.matrix @ other.matrix
        return GroupElementB(other.ad_inv.dot(self.ad_inv), mat)

    def __matmul__(self, other):
        return self.compose(other)


def coadjoint_b(g: GroupElementB, f: DualForm) -> DualForm:
    """Coadjoint action of B on b*: (g.f)(X) = f(Ad(g^{-1}) X)."""
    if f.basis_tag != "b_star":
        raise InvalidParameter("coadjoint_b expects a form on b")
    c = np.array(f.coeffs, dtype=object)
    out = g.ad_inv.T.dot(c)
    return DualForm("b_star", tuple(out))


def coadjoint_b_via_matrices(g: GroupElementB, f: DualForm) -> DualForm:
    """Matrix-level cross-check of coadjoint_b through the 3x3 embedding.

    Expands Ad(g^{-1}) X_j for each b-basis matrix X_j by least squares
    and pairs with f; float path only.
    """
    if g.matrix is None:
        raise InvalidParameter("matrix-level route needs a float group element")
    ginv = np.linalg.inv(g.matrix)
    bmats = [to_complex(_MATS[n]) for n in B_ORDER]
    basis_flat = np.stack([m.reshape(-1) for m in bmats], axis=1)
    pinv = np.linalg.pinv(np.concatenate([basis_flat.real, basis_flat.imag]))
    cf = np.array([float(v) for v in f.coeffs])
    out = []
    for m in bmats:
        img = ginv @ m @ g.matrix
        vec = np.concatenate([img.reshape(-1).real, img.reshape(-1).imag])
        coeffs = pinv @ vec
        out.append(float(cf @ coeffs))
    return DualForm("b_star", tuple(out))


# ---------------------------------------------------------------------------
# Stabilizers.
# ---------------------------------------------------------------------------

def _form_values_on_basis(f: DualForm):
    return [evaluate_on_basis(f, n) for n in G_ORDER]


def b_f_matrix(f: DualForm):
    """Matrix of the alternating form B_f(X,Y) = f([X,Y]) on the g-basis."""
    if f.basis_tag != "g_star":
        raise InvalidParameter("B_f is defined for forms on g")
    sc = structure_constants()
    if f.exact:
        vals = _form_values_on_basis(f)
        m = np.empty((8, 8), dtype=object)
        for i in range(8):
            for j in range(8):
                m[i, j] = sum((F(c) * v for c, v in zip(sc[i, j], vals)), F(0))
        return m
    vals = np.array([float(v) for v in _form_values_on_basis(f.as_floats())])
    m = np.zeros((8, 8))
    for i in range(8):
        for j in range(8):
            m[i, j] = float(np.dot([float(c) for c in sc[i, j]], vals))
    return m


KERNEL_RTOL = 1e-9  # singular values below KERNEL_RTOL * sigma_max count as zero


def numeric_kernel_dim(m: np.ndarray, rtol: float = KERNEL_RTOL) -> int:
    if m.size == 0:
        return m.shape[1]
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return m.shape[1]
    return int(np.sum(s < rtol * s[0])) + max(0, m.shape[1] - len(s))


def stabilizer_algebra(f: DualForm, rtol: float = KERNEL_RTOL) -> list[AlgebraElement]:
    """Basis of g(f) = {X : f([X, .]) = 0}, the kernel of B_f.

    Exact forms get an exact kernel; float forms use an SVD with relative
    threshold ``rtol`` (matrices here are small and well scaled).
    """
    m = b_f_matrix(f)
    out = []
    if f.exact:
        for vec in nullspace(m):
            acc = np.full((3, 3), qi(0), dtype=object)
            for c, name in zip(vec, G_ORDER):
                if c:
                    acc = acc + _MATS[name] * qi(F(c))
            out.append(AlgebraElement(acc))
        return out
    u, s, vh = np.linalg.svd(m)
    smax = s[0] if len(s) else 0.0
    for i, sv in enumerate(s):
        if smax == 0.0 or sv < rtol * smax:
            vec = vh[i]
            acc = np.zeros((3, 3), dtype=complex)
            for c, name in zip(vec, G_ORDER):
                acc += c * to_complex(_MATS[name])
            out.append(AlgebraElement(acc))
    return out


# ---------------------------------------------------------------------------
# Exact coadjoint action on g*-coefficient vectors.
#
# Under the pairing identification, c(g.f) = R(g) c(f) where R(exp(tX))
# = exp(t ad_X) acting on coefficients over the star basis
# (H, F, V, Z/3, S, E1, E1p, E2).  The ad matrices are exact rational,
# which lets unbounded fiber curves be evaluated without floating-point
# cancellation.
# ---------------------------------------------------------------------------

def _exact_eye(n):
    a = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            a[i, j] = F(1) if i == j else F(0)
    return a


@lru_cache(maxsize=None)
def ad_star_matrix(name: str):
    """Exact 8x8 matrix of ad(X_name) on star-basis coefficient vectors."""
    xmat = _MATS[name]
    a = np.empty((8, 8), dtype=object)
    for j, sb in enumerate(_STAR_MATS):
        br = AlgebraElement(xmat.dot(sb) - sb.dot(xmat))
        col = expand_in_basis(br, star=True)
        for i in range(8):
            a[i, j] = F(col[i])
    return a


def exp_ad_nilpotent(name: str, t):
    """exp(t ad_X) for a nilpotent direction (E1, E1p or E2), exact."""
    a = ad_star_matrix(name)
    tq = F(t)
    acc = _exact_eye(8)
    term = _exact_eye(8)
    for k in range(1, 10):
        term = term.dot(a) * (tq / k)
        if not any(bool(v) for v in term.flat):
            return acc
        acc = acc + term
    raise InvalidParameter(f"ad({name}) is not nilpotent")


def nilpotent_orbit_polynomial(name: str, vec):
    """Coefficient vectors c_k with exp(t ad_X) v = sum_k t^k c_k, exact.

    Terminates because ad_X is nilpotent on g for X in the unipotent part.
    """
    a = ad_star_matrix(name)
    cur = np.array([F(x) for x in vec], dtype=object)
    out = [cur]
    for k in range(1, 10):
        cur = a.dot(cur) * F(1, k)
        if not any(bool(v) for v in cur):
            return out
        out.append(cur)
    raise InvalidParameter(f"ad({name}) is not nilpotent")


@lru_cache(maxsize=1)
def ad_s_grading_projectors():
    """Exact spectral projectors of ad(S), eigenvalues -2..2 (root grading)."""
    a = ad_star_matrix("S")
    eye = _exact_eye(8)
    eigs = (-2, -1, 0, 1, 2)
    projs = {}
    for k in eigs:
        p = eye
        for l in eigs:
            if l != k:
                p = p.dot(a - eye * F(l)) * F(1, k - l)
        projs[k] = p
    return projs


@lru_cache(maxsize=1)
def _ad_v_trig_pieces():
    """Exact matrices with exp(u ad_V) = P0 + cos u P1 + sin u Q1 + cos 2u P2 + sin 2u Q2."""
    a8 = ad_star_matrix("V")
    a = np.empty((8, 8), dtype=object)
    for i in range(8):
        for j in range(8):
            a[i, j] = qi(a8[i, j])
    eye = np.empty((8, 8), dtype=object)
    for i in range(8):
        for j in range(8):
            eye[i, j] = qi(1) if i == j else qi(0)
    eigs = [qi(0), _i, -_i, 2 * _i, -2 * _i]
    projs = []
    for li, lam in enumerate(eigs):
        p = eye
        for mi, mu in enumerate(eigs):
            if mi != li:
                p = p.dot(a - eye * mu)
                p = p * (qi(1) / (lam - mu))
        projs.append(p)

    def _real(m):
        out = np.empty((8, 8), dtype=object)
        for i in range(8):
            for j in range(8):
                if m[i, j].im:
                    raise RuntimeError("trig piece is not real")
                out[i, j] = m[i, j].re
        return out

    p0 = _real(projs[0])
    p1 = _real(projs[1] + projs[2])
    q1 = _real((projs[1] - projs[2]) * _i)
    p2 = _real(projs[3] + projs[4])
    q2 = _real((projs[3] - projs[4]) * (2 * _i) * qi(F(1, 2)))
    return p0, p1, q1, p2, q2


def v_rotation_coeff_matrix(cos_u, sin_u):
    """Exact R(exp(u V)) on coefficients from rational (cos u, sin u)."""
    c, s = F(cos_u), F(sin_u)
    if c * c + s * s != 1:
        raise InvalidParameter("cos_u^2 + sin_u^2 must equal 1 exactly")
    p0, p1, q1, p2, q2 = _ad_v_trig_pieces()
    cos2, sin2 = c * c - s * s, 2 * c * s
    return p0 + p1 * c + q1 * s + p2 * cos2 + q2 * sin2


def apply_coeff_matrix(m, f: DualForm) -> DualForm:
    """Apply an exact coefficient-action matrix to a g*-form."""
    vec = np.array([F(c) for c in f.coeffs], dtype=object)
    return DualForm("g_star", tuple(m.dot(vec)))


def rational_circle_point(angle: float, denominator_bound: int = 10**10):
    """Exact (cos, sin) on the unit circle close to the given angle."""
    tau = Fraction(math.tan(angle / 2)).limit_denominator(denominator_bound)
    den = 1 + tau * tau
    return (1 - tau * tau) / den, 2 * tau / den


def subalgebra_coeff_basis(which: str):
    """b or b1 basis vectors as exact coefficient vectors in the g-basis."""
    e = {n: i for i, n in enumerate(G_ORDER)}
    vecs = []
    if which == "b":
        w = [F(0)] * 8
        w[e["H"]] = F(1, 2)
        w[e["Z"]] = F(-1, 6)
        vecs.append(w)
    elif which != "b1":
        raise InvalidParameter("subalgebra must be 'b' or 'b1'")
    for n in B1_ORDER:
        v = [F(0)] * 8
        v[e[n]] = F(1)
        vecs.append(v)
    return vecs
