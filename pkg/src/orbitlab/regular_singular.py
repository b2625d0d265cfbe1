"""Local solution structure at a first-kind singular point z = 0.

For z y'(z) = M(z) y(z) with M(z) = M0 + M1 z + M2 z^2 there is a
fundamental solution

    Y(z) = U(z) . z^{Delta0} . z^{N}

with Delta0 diagonal (a diagonalization of the semisimple part of M0),
N strictly lower triangular supported on resonant eigenvalue pairs
(difference a non-negative integer), and U holomorphic with U(0)
invertible.  The construction follows the classical reduction:

1. conjugate M0 to lower-triangular Jordan form, eigenvalues ordered by
   ascending integer part d_i = floor(Re delta_i); put D = diag(d_i),
   d = d_max - d_min;
2. a holomorphic unimodular P1(z) = I + z P1_1 + ... reduces the system
   to Mtilde = M0 + z B_1 + ... + z^d B_d with ad(D) B_k = k B_k; the
   order-j coefficient solves (j I - ad M0) P1_j = B_j + Psi_j, split
   over the eigenspaces of ad(D), the j-eigenspace fixing B_j via the
   orthogonal complement of im ad(D - M0) under the Frobenius pairing;
3. the meromorphic shear z^{-D} turns Mtilde into the constant matrix
   B - D, whose commuting diagonal + nilpotent split yields Delta0 - D
   and N; undoing the shear assembles U.

The count of eigenvalues of M0 with strictly positive real part equals
the dimension of the space of solutions that are L^2 near 0 for the
measure dz/z; a basis is read off the columns of Y selected by
Re delta_j > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


class BoundaryEigenvalue(ValueError):
    """An eigenvalue real part sits on the L^2 decision boundary."""


class RadiusError(ValueError):
    """Truncated series unreliable at the requested point."""

    def __init__(self, msg, suggested_z0=None):
        super().__init__(msg)
        self.suggested_z0 = suggested_z0


class ResonanceDetectionError(ValueError):
    """A reduction step that must be invertible was (numerically) singular."""

    def __init__(self, msg, order=None, pair=None):
        super().__init__(msg)
        self.order = order
        self.pair = pair


class AmbiguousColumnSelection(ValueError):
    """A selected L^2 column mixes in a row with non-positive exponent."""


DEFAULT_EIG_TOL = 1e-8


def snap_eigenvalue(x: complex, tol: float = DEFAULT_EIG_TOL) -> complex:
    """Snap to a half-integer or sign*sqrt(integer) when within tol.

    The spectra arising here are exactly of that shape; recognizing
    them makes integer-spacing (resonance) decisions robust.  Values
    not matching either pattern are returned unchanged.
    """
    re, im = x.real, x.imag
    if abs(im) < tol:
        half = round(2 * re) / 2.0
        if abs(re - half) < tol:
            return complex(half, 0.0)
        rad = round(re * re)
        if rad > 0 and abs(re * re - rad) < tol:
            return complex(math.copysign(math.sqrt(rad), re), 0.0)
        return complex(re, 0.0)
    return x


def _cluster(values, tol):
    """Group indices of near-equal complex values; returns list of lists."""
    groups = []
    for i, v in enumerate(values):
        for g in groups:
            if abs(values[g[0]] - v) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _nullspace(mat, rtol=1e-10):
    u, s, vh = np.linalg.svd(mat)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > rtol * max(smax, 1.0)))
    return vh[rank:].conj().T


def jordanize(m: np.ndarray, tol: float = DEFAULT_EIG_TOL):
    """Lower-triangular Jordan-type form with ascending integer parts.

    Returns (p, delta, nil) with p @ m @ p^{-1} = diag(delta) + nil,
    nil strictly lower triangular and supported inside equal-eigenvalue
    groups, and floor(Re delta_i) non-decreasing.
    """
    n = m.shape[0]
    w = np.linalg.eigvals(m)
    w = np.array([snap_eigenvalue(x, tol) for x in w])
    groups = _cluster(w, tol)
    # One representative eigenvalue per cluster, cluster size = algebraic mult.
    reps = [w[g[0]] for g in groups]
    order = sorted(range(len(groups)),
                   key=lambda k: (math.floor(reps[k].real), reps[k].real, reps[k].imag))

    cols = []
    delta = []
    block_sizes = []
    for k in order:
        lam = reps[k]
        mult = len(groups[k])
        a = m - lam * np.eye(n)
        # Nullspace chain dimensions decide the Jordan structure.
        powers = [np.eye(n)]
        dims = [0]
        while dims[-1] < mult:
            powers.append(powers[-1] @ a)
            ns = _nullspace(powers[-1])
            dims.append(ns.shape[1])
            if len(powers) > n + 1:
                raise ResonanceDetectionError(
                    f"generalized eigenspace of {lam} did not close", pair=(lam, lam)
                )
        pmax = len(dims) - 1
        chains = []
        used = np.zeros((n, 0), dtype=complex)
        for p in range(pmax, 0, -1):
            n_p = _nullspace(powers[p])
            n_prev = _nullspace(powers[p - 1])
            # Candidates of height exactly p, independent of started chains.
            block = np.concatenate([n_prev, used], axis=1) if (n_prev.size or used.size) else None
            want = (dims[p] - dims[p - 1]) - sum(1 for c in chains if len(c) >= p)
            for _ in range(max(0, want)):
                v = _pick_independent(n_p, block)
                chain = [v]
                for _ in range(p - 1):
                    chain.append(a @ chain[-1])
                chains.append(chain)
                add = np.stack(chain, axis=1)
                block = add if block is None else np.concatenate([block, add], axis=1)
                used = np.concatenate([used, add], axis=1)
        for chain in chains:
            for v in chain:
                cols.append(v / np.linalg.norm(v))
                delta.append(lam)
            block_sizes.append(len(chain))

    v = np.stack(cols, axis=1)
    p = np.linalg.inv(v)
    j = p @ m @ v
    delta = np.array(delta)
    nil = j - np.diag(delta)
    # Scrub roundoff outside the sub-diagonal chain structure.
    nil[np.abs(nil) < 1e-10 * max(1.0, np.abs(j).max())] = 0.0
    return p, delta, np.tril(nil, -1)


def _pick_independent(candidates, block):
    """Column of `candidates` most independent from span(block)."""
    if block is None or block.size == 0:
        return candidates[:, 0]
    q, _ = np.linalg.qr(block)
    resid = candidates - q @ (q.conj().T @ candidates)
    norms = np.linalg.norm(resid, axis=0)
    k = int(np.argmax(norms))
    if norms[k] < 1e-10:
        raise ResonanceDetectionError("failed to extend Jordan chain basis")
    return resid[:, k] / norms[k]


@dataclass
class RegularSingularData:
    """Output of the reduction at z = 0.

    Y(z) = U(z) z^{Delta0} z^{N} solves z Y' = (M0 + M1 z + M2 z^2) Y up
    to the truncation order of the series for U.
    """

    M0: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    delta0: np.ndarray          # diagonal of Delta0
    N: np.ndarray
    U_series: list              # U_0 ... U_K
    d: int
    B_list: list                # B_1 ... B_d (zero matrices omitted -> kept, may be 0)
    P1_series: list
    truncation: int


def reduce_at_zero(m0, m1, m2, truncation: int | None = None,
                   eig_tol: float = DEFAULT_EIG_TOL) -> RegularSingularData:
    """Run the full reduction pipeline for M(z) = M0 + M1 z + M2 z^2."""
    m0 = np.asarray(m0, dtype=complex)
    m1 = np.asarray(m1, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    n = m0.shape[0]

    p0, delta, nil = jordanize(m0, eig_tol)
    dints = np.array([math.floor(x.real) for x in delta], dtype=int)
    d = int(dints.max() - dints.min()) if n else 0
    k_max = truncation if truncation is not None else d + 25

    m0h = np.diag(delta) + nil
    m1h = p0 @ m1 @ np.linalg.inv(p0)
    m2h = p0 @ m2 @ np.linalg.inv(p0)
    mcoef = {0: m0h, 1: m1h, 2: m2h}

    # ad D eigenvalue of an entry (i,j) is d_i - d_j.
    ad_d = dints[:, None] - dints[None, :]
    dmat = np.diag(dints.astype(float))
    m0_minus_d = m0h - dmat

    p1 = [np.eye(n, dtype=complex)]
    b_list = [np.zeros((n, n), dtype=complex) for _ in range(d + 1)]  # index 0 unused

    for j in range(1, k_max + 1):
        psi = np.zeros((n, n), dtype=complex)
        for k in range(1, j):
            if k <= d:
                psi += b_list[k] @ p1[j - k]
        for k in range(1, min(j, 2) + 1):
            psi -= p1[j - k] @ mcoef[k]
        pj = np.zeros((n, n), dtype=complex)
        if j <= d:
            bj = np.zeros((n, n), dtype=complex)
            for k in np.unique(ad_d):
                mask = ad_d == k
                if not mask.any():
                    continue
                if k == j:
                    pj_k, bj_k = _solve_resonant_level(m0_minus_d, psi, mask)
                    pj[mask] = pj_k[mask]
                    bj[mask] = bj_k[mask]
                else:
                    pj_k = _solve_shifted_sylvester(m0_minus_d, j - k, psi, mask, j)
                    pj[mask] = pj_k[mask]
            b_list[j] = bj
        else:
            pj = _solve_shifted_sylvester(m0h, j, psi, None, j, plain=True)
        p1.append(pj)

    # Constant part after the shear: lower triangular with diagonal delta - d.
    b_total = m0h.copy()
    for k in range(1, d + 1):
        b_total += b_list[k]
    t_mat = b_total - dmat
    p2, nmat = _split_diagonal_nilpotent(t_mat, np.asarray(delta) - dints, eig_tol)

    # U(z) = (P1(z) P0)^{-1} [z^D P2^{-1} z^{-D}], the bracket a polynomial.
    p0_inv = np.linalg.inv(p0)
    p2_inv = np.linalg.inv(p2)
    w_poly = {}
    for i in range(n):
        for jj in range(n):
            if p2_inv[i, jj] != 0:
                pw = int(dints[i] - dints[jj])
                w_poly.setdefault(pw, np.zeros((n, n), dtype=complex))[i, jj] = p2_inv[i, jj]
    # Series inverse of P1.
    q = [np.eye(n, dtype=complex)]
    for j in range(1, k_max + 1):
        acc = np.zeros((n, n), dtype=complex)
        for k in range(1, j + 1):
            acc += q[j - k] @ p1[k]
        q.append(-acc)
    u_series = []
    for j in range(k_max + 1):
        acc = np.zeros((n, n), dtype=complex)
        for pw, wmat in w_poly.items():
            if 0 <= j - pw <= k_max:
                acc += q[j - pw] @ wmat
        u_series.append(p0_inv @ acc)

    return RegularSingularData(
        M0=m0, M1=m1, M2=m2,
        delta0=np.asarray(delta), N=nmat,
        U_series=u_series, d=d,
        B_list=[b_list[k] for k in range(1, d + 1)],
        P1_series=p1, truncation=k_max,
    )


def _ad_operator(m):
    """ad(m) on row-major vec: vec(mX - Xm) = (m (x) I - I (x) m^T) vec(X)."""
    n = m.shape[0]
    return np.kron(m, np.eye(n)) - np.kron(np.eye(n), m.T)


def _solve_shifted_sylvester(base, shift, psi, mask, order, plain=False):
    """Solve (shift I - ad base) X = Psi restricted to an ad-D eigenspace."""
    n = base.shape[0]
    idx = np.where(mask.reshape(-1))[0] if mask is not None else np.arange(n * n)
    op = shift * np.eye(n * n, dtype=complex) - _ad_operator(base)
    sub = op[np.ix_(idx, idx)]
    rhs = psi.reshape(-1)[idx]
    s = np.linalg.svd(sub, compute_uv=False)
    if s[-1] < 1e-10 * max(1.0, s[0]):
        w = np.linalg.eigvals(base)
        pair = None
        for i in range(len(w)):
            for jj in range(len(w)):
                if i != jj and abs((w[i] - w[jj]) - shift) < 1e-6:
                    pair = (w[i], w[jj])
        raise ResonanceDetectionError(
            f"operator at series order {order} is singular "
            f"(resonance detection failed; offending pair {pair})",
            order=order, pair=pair,
        )
    x = np.zeros(n * n, dtype=complex)
    x[idx] = np.linalg.solve(sub, rhs)
    return x.reshape(n, n)


def _solve_resonant_level(m0_minus_d, psi, mask):
    """Level k = j: split Psi into im ad(D - M0) plus its orthocomplement.

    Returns (P, B) with ad(D - M0) P = B + Psi on the masked entries and
    B in the Frobenius-orthogonal complement of the image.
    """
    n = m0_minus_d.shape[0]
    idx = np.where(mask.reshape(-1))[0]
    ad = _ad_operator(-m0_minus_d)
    sub = ad[np.ix_(idx, idx)]
    rhs = psi.reshape(-1)[idx]
    u, s, vh = np.linalg.svd(sub)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if len(s) else 0.0)))
    uim = u[:, :rank]
    rhs_im = uim @ (uim.conj().T @ rhs)
    rhs_perp = rhs - rhs_im
    # Min-norm solution of sub x = rhs_im.
    x = vh[:rank].conj().T @ ((uim.conj().T @ rhs_im) / s[:rank])
    p = np.zeros(n * n, dtype=complex)
    b = np.zeros(n * n, dtype=complex)
    p[idx] = x
    b[idx] = -rhs_perp
    return p.reshape(n, n), b.reshape(n, n)


def _split_diagonal_nilpotent(t_mat, lam, tol):
    """Unitriangular P with P t P^{-1} = diag(lam) + N, N on equal-lam entries."""
    n = t_mat.shape[0]
    t0 = t_mat - np.diag(lam)
    p = np.eye(n, dtype=complex)
    nmat = np.zeros((n, n), dtype=complex)
    for gap in range(1, n):
        for i in range(gap, n):
            j = i - gap
            # Entry (i, j) of P T0 (P unit lower-triangular, T0 strictly lower).
            pt = t0[i, j] + sum(p[i, k] * t0[k, j] for k in range(j + 1, i))
            npart = sum(nmat[i, k] * p[k, j] for k in range(j + 1, i))
            if abs(lam[i] - lam[j]) < tol:
                nmat[i, j] = pt - npart
            else:
                p[i, j] = (npart - pt) / (lam[j] - lam[i])
    return p, nmat


# ---------------------------------------------------------------------------
# Evaluation and L^2 data.
# ---------------------------------------------------------------------------

def _n_tilde_poly(data: RegularSingularData):
    """z^{Delta0} N z^{-Delta0} as a polynomial: entries N_ij z^{d_i - d_j}."""
    n = data.N.shape[0]
    poly = {}
    for i in range(n):
        for j in range(n):
            if data.N[i, j] != 0:
                pw = int(round((data.delta0[i] - data.delta0[j]).real))
                if pw < 0:
                    raise AmbiguousColumnSelection(
                        "nilpotent log-coupling with negative exponent difference"
                    )
                poly.setdefault(pw, np.zeros((n, n), dtype=complex))[i, j] = data.N[i, j]
    return poly


def series_residual_coefficients(data: RegularSingularData):
    """Coefficient norms of z U' + U (Delta0 + Ntilde(z)) - M(z) U, orders 0..K.

    All of them vanish for an exact reduction, which is what makes the
    truncated Y satisfy the system up to O(z^{K+1}).
    """
    k_max = data.truncation
    delta0 = np.diag(data.delta0)
    ntilde = _n_tilde_poly(data)
    mcoef = {0: data.M0, 1: data.M1, 2: data.M2}
    out = []
    for j in range(k_max + 1):
        acc = j * data.U_series[j] + data.U_series[j] @ delta0
        for pw, nm in ntilde.items():
            if 0 <= j - pw <= k_max:
                acc = acc + data.U_series[j - pw] @ nm
        for k in range(0, min(j, 2) + 1):
            acc = acc - mcoef[k] @ data.U_series[j - k]
        out.append(float(np.linalg.norm(acc)))
    return out


def series_residual_relative(data: RegularSingularData):
    """Residual coefficients scaled by the magnitudes entering each order.

    Series coefficients may grow steeply before an entire solution's
    decay sets in, so roundoff-level certification must be per order:
    residual_j is compared against (j + |spectral data|) max_{i<=j} |U_i|.
    """
    raw = series_residual_coefficients(data)
    base = float(np.linalg.norm(np.diag(data.delta0)) + np.linalg.norm(data.N))
    mnorm = max(np.linalg.norm(m) for m in (data.M0, data.M1, data.M2))
    out = []
    running = 0.0
    for j, r in enumerate(raw):
        running = max(running, float(np.linalg.norm(data.U_series[j])))
        out.append(r / ((j + base + mnorm + 1.0) * running))
    return out


def evaluate_u(data: RegularSingularData, z: float) -> np.ndarray:
    acc = np.zeros_like(data.U_series[0])
    for j in range(data.truncation, -1, -1):
        acc = acc * z + data.U_series[j]
    return acc


def _z_power_matrices(data: RegularSingularData, z: float):
    zd = np.diag(np.array([z ** dl for dl in data.delta0], dtype=complex))
    # z^N = exp(N log z), N nilpotent.
    n = data.N.shape[0]
    logz = cmath.log(z)
    zn = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n):
        term = term @ (data.N * logz) / k
        zn = zn + term
        if not term.any():
            break
    return zd, zn


def fundamental_solution(data: RegularSingularData, z: float) -> np.ndarray:
    """Y(z) = U(z) z^{Delta0} z^{N} from the truncated series."""
    zd, zn = _z_power_matrices(data, z)
    return evaluate_u(data, z) @ zd @ zn


def series_tail_estimate(data: RegularSingularData, z0: float) -> float:
    """Crude geometric remainder bound for the truncated U at z0."""
    terms = [np.linalg.norm(u) * z0 ** j for j, u in enumerate(data.U_series)]
    tail = max(terms[-3:]) if len(terms) >= 3 else terms[-1]
    ratios = [terms[j + 1] / terms[j] for j in range(len(terms) - 4, len(terms) - 1)
              if terms[j] > 0]
    rho = max(ratios) if ratios else 0.0
    if rho >= 0.9:
        return math.inf
    return tail * rho / (1.0 - rho) if rho > 0 else tail


def l2_dimension_at_zero(m0, boundary_tol: float = 1e-9) -> int:
    """Number of eigenvalues of M0 with strictly positive real part.

    This equals the dimension of the space of solutions of
    z y' = M(z) y that are L^2(dz/z) near 0.  Eigenvalues within
    ``boundary_tol`` of the imaginary axis make the dichotomy
    ill-posed and raise BoundaryEigenvalue.
    """
    w = np.linalg.eigvals(np.asarray(m0, dtype=complex))
    if np.any(np.abs(w.real) < boundary_tol):
        raise BoundaryEigenvalue(
            f"eigenvalue with |Re| < {boundary_tol} (found {w})"
        )
    return int(np.sum(w.real > 0))


def l2_basis_at_zero(data: RegularSingularData, z0: float, tol: float = 1e-9):
    """Values at z0 of the L^2-near-0 solution columns.

    Returns an (l, k) matrix whose columns are the columns of
    U(z0) z0^{Delta0} z0^{N} with Re delta_j > 0; k equals
    l2_dimension_at_zero(M0).  Raises RadiusError when the truncated
    series is not reliable at z0 and AmbiguousColumnSelection if a
    selected column involves a row exponent with non-positive real
    part (cannot happen for the systems built here, but checked).
    """
    rel = series_tail_estimate(data, z0)
    scale = max(np.linalg.norm(evaluate_u(data, z0)), 1e-30)
    if not (rel / scale < tol):
        raise RadiusError(
            f"series tail {rel:.3e} exceeds tol*|U| at z0={z0}",
            suggested_z0=z0 / 2,
        )
    if np.any(np.abs(data.delta0.real) < 1e-9):
        raise BoundaryEigenvalue("exponent on the L^2 decision boundary")
    sel = [j for j in range(len(data.delta0)) if data.delta0[j].real > 0]
    zd, zn = _z_power_matrices(data, z0)
    y = evaluate_u(data, z0) @ zd @ zn
    for j in sel:
        rows = np.where(np.abs(zn[:, j]) > 0)[0]
        if any(data.delta0[i].real <= 0 for i in rows):
            raise AmbiguousColumnSelection(
                f"column {j} mixes a non-decaying row exponent"
            )
    return y[:, sel]
