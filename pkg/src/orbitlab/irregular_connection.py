"""Irregular point at infinity and the two-point L^2 connection count.

In the variable z = 1/t the systems read z x' = (M0 + M1 z + M2 z^2) x
with M2 = -C diagonal with entries +-1: a second-kind singularity at
infinity with envelopes e^{+-z^2/2}.  After a permutation sorting -C
into diag(+I_p, -I_q) there is a unique formal transform

    T(z) = I + T_1 z^{-1} + T_2 z^{-2} + ...     (identity diagonal blocks)

block-diagonalizing the system: z y' = z^2 diag(H11(z), H22(z)) y with
H11 = I + O(z^{-2}) (solutions grow like e^{+z^2/2}) and
H22 = -I + O(z^{-2}) (solutions decay like e^{-z^2/2}).  The decaying
block corresponds to the +1 eigenvectors of the original C.  Each
off-diagonal coefficient of T solves a Sylvester equation whose block
spectra are {+1} and {-1}, hence an invertible 2x-scaling.

The global L^2(dz/z) dimension on (0, infinity) is computed by
propagating the basis of L^2-near-0 solutions to a large z1 with
periodic QR renormalization and counting the rank of their coefficients
along the growing block; a growth-ratio classification over [z1, 1.2 z1]
must agree or AmbiguousRank is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .discrete_series import (
    BranchingDecomposition,
    DiscreteSeriesParam,
    SeriesClass,
    branch_to_B,
)
from .lie_su21 import InvalidParameter
from .ode_builder import OdeSystem, build_system, holomorphic_kernel_dims, to_z_variable
from .regular_singular import RadiusError, l2_basis_at_zero, reduce_at_zero


class AmbiguousRank(RuntimeError):
    """Rank decision too close to call; carries the singular spectrum."""

    def __init__(self, msg, spectrum=None):
        super().__init__(msg)
        self.spectrum = spectrum


class NumericFailure(RuntimeError):
    """Integration failed (step underflow, overflow, non-convergence)."""


@dataclass(frozen=True)
class InfinitySplitting:
    """Formal block splitting at infinity.

    ``permutation`` maps split coordinates to original ones: row i of
    the split frame is original row permutation[i].  The first
    ``growing_size`` split rows carry the e^{+z^2/2} block.
    """

    permutation: tuple
    growing_size: int
    decaying_size: int
    T_series: list = field(repr=False)
    H11_series: list = field(repr=False)
    H22_series: list = field(repr=False)

    def t_matrix(self, z: float) -> np.ndarray:
        acc = np.zeros_like(self.T_series[0])
        for tk in reversed(self.T_series):
            acc = acc / z + tk
        return acc


def split_at_infinity(sys: OdeSystem, order: int = 12) -> InfinitySplitting:
    """Formal reduction at infinity for a built system.

    The leading matrix -C must have only the eigenvalues +-1 (true for
    every system produced by build_system).
    """
    m0, m1, m2 = to_z_variable(sys)
    cdiag = np.diag(-m2)  # original C entries
    if not np.all(np.isclose(np.abs(cdiag), 1.0)):
        raise InvalidParameter("leading matrix at infinity must have eigenvalues +-1")
    grow = [i for i in range(sys.size) if cdiag[i].real < 0]   # C = -1: e^{+z^2/2}
    decay = [i for i in range(sys.size) if cdiag[i].real > 0]  # C = +1: e^{-z^2/2}
    perm = tuple(grow + decay)
    p = len(grow)
    pm = np.eye(sys.size)[list(perm)]
    # z y' = z^2 (H0 + H1/z + H2/z^2) y with H0 = perm(-C) = diag(I_p, -I_q).
    h = {0: pm @ (-sys.C) @ pm.T, 1: pm @ (-sys.B) @ pm.T, 2: pm @ (-sys.A) @ pm.T}

    n = sys.size
    t_series = [np.eye(n, dtype=complex)]
    h11 = [h[0][:p, :p]]
    h22 = [h[0][p:, p:]]
    htilde = [h[0]]
    for j in range(1, order + 1):
        r = np.zeros((n, n), dtype=complex)
        for k in (1, 2):
            if k <= j:
                r += h[k] @ t_series[j - k]
        for k in range(1, j):
            r -= t_series[k] @ htilde[j - k]
        if j >= 2:
            r += (j - 2) * t_series[j - 2]
        hj = np.zeros((n, n), dtype=complex)
        hj[:p, :p] = r[:p, :p]
        hj[p:, p:] = r[p:, p:]
        tj = np.zeros((n, n), dtype=complex)
        tj[:p, p:] = -r[:p, p:] / 2.0
        tj[p:, :p] = r[p:, :p] / 2.0
        htilde.append(hj)
        t_series.append(tj)
        h11.append(hj[:p, :p])
        h22.append(hj[p:, p:])
    return InfinitySplitting(perm, p, n - p, t_series, h11, h22)


# ---------------------------------------------------------------------------
# Renormalized propagation.
# ---------------------------------------------------------------------------

def _rhs(z, y, m0, m1, m2, ncols):
    f = y.reshape(-1, ncols)
    return ((m0 / z + m1 + m2 * z) @ f).reshape(-1)


def propagate_frame(m0, m1, m2, frame, z0, z1, rtol=1e-12, atol=1e-12,
                    max_span_zsq=16.0):
    """Integrate the frame from z0 to z1 with segment-wise QR renormalization.

    Returns (orthonormal frame at z1, log_scales) where log_scales
    accumulates log|diag R| per renormalization (diagnostic only; the
    propagated span is what downstream rank decisions use).
    """
    ncols = frame.shape[1]
    # Segment ends with bounded growth e^{max_span_zsq/2} each.
    zs = [z0]
    while zs[-1] < z1:
        nxt = math.sqrt(zs[-1] ** 2 + max_span_zsq)
        zs.append(min(nxt, z1))
    cur = frame.astype(complex)
    logs = []
    for a, b in zip(zs[:-1], zs[1:]):
        sol = solve_ivp(
            _rhs, (a, b), cur.reshape(-1), method="DOP853",
            rtol=rtol, atol=atol, args=(m0, m1, m2, ncols), dense_output=False,
        )
        if not sol.success:
            raise NumericFailure(f"integration failed on [{a}, {b}]: {sol.message}")
        cur = sol.y[:, -1].reshape(-1, ncols)
        q, r = np.linalg.qr(cur)
        diag = np.abs(np.diag(r))
        if np.any(diag == 0):
            raise NumericFailure("frame collapsed during propagation")
        logs.append(np.log(diag))
        cur = q
    return cur, logs


@dataclass(frozen=True)
class ConnectionResult:
    dim: int
    rank: int
    rank_spectrum: tuple
    growth_logs: tuple
    z0: float
    z1: float
    basis_dim: int

    def details(self) -> dict:
        return {
            "rank_spectrum": [float(s) for s in self.rank_spectrum],
            "z0": self.z0,
            "z1": self.z1,
        }


def _rank_with_gap_check(mat, tol):
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    rel = s / s[0]
    rank = int(np.sum(rel > tol))
    if rank < len(rel):
        gap = rel[rank - 1] / rel[rank] if rank > 0 and rel[rank] > 0 else math.inf
        if gap < 1e3:
            raise AmbiguousRank(
                f"singular-value gap {gap:.1f} at threshold {tol}", spectrum=rel
            )
    return rank, rel


def global_l2_dimension(sys: OdeSystem, z0: float = 0.1, z1: float = 10.0,
                        tol: float = 1e-6, integrator_tol: float = 1e-12,
                        split_order: int = 12,
                        series_truncation: int | None = None) -> ConnectionResult:
    """Dimension of the space of solutions L^2(dz/z) on (0, infinity).

    Pipeline: (1) L^2-near-0 basis values at z0 from the first-kind
    reduction; (2) renormalized propagation to z1; (3) coefficients
    along the growing block in the split coordinates T(z1)^{-1} . P;
    (4) dimension = basis size - rank of that coefficient block.  A
    growth-ratio classification over [z1, 1.2 z1] must agree.
    """
    m0, m1, m2 = to_z_variable(sys)
    trunc = series_truncation
    for _ in range(8):
        data = reduce_at_zero(m0, m1, m2, truncation=trunc)
        try:
            frame0 = l2_basis_at_zero(data, z0)
            break
        except RadiusError:
            # Double the truncation order, capped at 200.
            new_trunc = min(2 * data.truncation, 200)
            if new_trunc == data.truncation:
                raise
            trunc = new_trunc
    else:  # pragma: no cover
        raise NumericFailure("series truncation did not stabilize")
    k0 = frame0.shape[1]

    frame1, logs1 = propagate_frame(m0, m1, m2, frame0, z0, z1,
                                    rtol=integrator_tol, atol=integrator_tol)

    split = split_at_infinity(sys, order=split_order)
    pm = np.eye(sys.size)[list(split.permutation)]
    coords = np.linalg.solve(split.t_matrix(z1), pm @ frame1)
    growing = coords[: split.growing_size]
    rank, spectrum = _rank_with_gap_check(growing, tol)
    dim = k0 - rank

    # Independent check: singular values of the flow over [z1, 1.2 z1]
    # restricted to the propagated frame; directions that fail to grow
    # like the envelope e^{((1.2 z1)^2 - z1^2)/2} are the decaying ones.
    sgrow = _transfer_singular_values(m0, m1, m2, frame1, z1, integrator_tol)
    envelope = math.exp(0.22 * z1 * z1)
    n_decayed = int(np.sum(sgrow < envelope * 1e-3))
    if n_decayed != dim:
        raise AmbiguousRank(
            f"growth classification ({n_decayed} decayed of {k0}) "
            f"disagrees with rank count dim={dim}",
            spectrum=spectrum,
        )
    return ConnectionResult(
        dim=dim, rank=rank, rank_spectrum=tuple(spectrum),
        growth_logs=tuple(float(np.log(s)) for s in sgrow),
        z0=z0, z1=z1, basis_dim=k0,
    )


def _transfer_singular_values(m0, m1, m2, frame1, z1, integrator_tol):
    """Singular values of the flow restricted to the frame over [z1, 1.2 z1]."""
    ncols = frame1.shape[1]
    sol = solve_ivp(
        _rhs, (z1, 1.2 * z1), frame1.astype(complex).reshape(-1), method="DOP853",
        rtol=integrator_tol, atol=integrator_tol, args=(m0, m1, m2, ncols),
    )
    if not sol.success:
        raise NumericFailure(f"integration failed on [{z1}, {1.2 * z1}]: {sol.message}")
    out = sol.y[:, -1].reshape(-1, ncols)
    return np.linalg.svd(out, compute_uv=False)


# ---------------------------------------------------------------------------
# Consistency of computed dimensions with the branching law.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConsistencyReport:
    ds: DiscreteSeriesParam
    m_max: int
    computed: tuple          # rows (m, sign, dim)
    expected: tuple          # rows (m, sign, mult) from the branching law
    diff: tuple              # rows present in exactly one side (with source tag)

    @property
    def consistent(self) -> bool:
        return not self.diff


def _label_of_system(ds: DiscreteSeriesParam, m: int, sign: int) -> int:
    # The sign-s system at index m feeds T_{l, -s}:
    #   sign -: l = 3m - (3 f0H + f0Z)/2, contributes with sign +
    #   sign +: l = -3m + (3 f0H - f0Z)/2, contributes with sign -
    if sign < 0:
        return 3 * m - (3 * ds.f0H + ds.f0Z) // 2
    return -3 * m + (3 * ds.f0H - ds.f0Z) // 2


def verify_branching_consistency(ds: DiscreteSeriesParam, m_max: int,
                                 **numeric_kwargs) -> ConsistencyReport:
    """Diff the computed connection dimensions against the branching law.

    For the neither class, assembles sum_m dim(m, sign) . T_{label} for
    m <= m_max from global_l2_dimension and compares with branch_to_B
    restricted to the same window.  For the holomorphic classes the
    closed-form kernel dimensions (0 and f0H) are reported instead.
    """
    if ds.series_class is not SeriesClass.NEITHER:
        d_minus, d_plus = holomorphic_kernel_dims(ds)
        computed = ((None, -1, d_minus), (None, 1, d_plus))
        expected_mult = ds.f0H
        diff = ()
        if d_plus != expected_mult or d_minus != 0:
            diff = (("computed", None, d_minus, d_plus),)
        return ConsistencyReport(ds, 0, computed, ((None, 1, expected_mult),), diff)

    computed_rows = []
    for sign in (-1, 1):
        for m in range(m_max + 1):
            sysm = build_system(ds, m, sign)
            res = global_l2_dimension(sysm, **numeric_kwargs)
            if res.dim:
                computed_rows.append((_label_of_system(ds, m, sign), -sign, res.dim))
    dec = branch_to_B(ds)
    labels_window = set()
    for sign in (-1, 1):
        labels_window.update(
            (_label_of_system(ds, m, sign), -sign) for m in range(m_max + 1)
        )
    expected_rows = [
        (m, s, mult)
        for (m, s, mult) in dec.entries_up_to(m_max + 1)
        if (m, s) in labels_window
    ]
    comp = {(m, s): mult for (m, s, mult) in computed_rows}
    expc = {(m, s): mult for (m, s, mult) in expected_rows}
    diff = []
    for key in sorted(set(comp) | set(expc)):
        if comp.get(key, 0) != expc.get(key, 0):
            diff.append((key[0], key[1], comp.get(key, 0), expc.get(key, 0)))
    return ConsistencyReport(
        ds, m_max, tuple(sorted(computed_rows)), tuple(sorted(expected_rows)),
        tuple(diff),
    )


def connection_report_json(entries) -> list:
    """Rows {f0H, f0Z, m, sign, dim, details} for serialization."""
    out = []
    for (ds, m, sign, res) in entries:
        out.append({
            "f0H": ds.f0H,
            "f0Z": ds.f0Z,
            "m": m,
            "sign": "+" if sign > 0 else "-",
            "dim": res.dim,
            "details": res.details(),
        })
    return out
