"""Diagonal scalings that make shifted M-matrices RCDD, and the solvers
built on them.

The central routine is an alpha-halving scan: starting from a shift so large
that the matrix is trivially dominant, each phase solves
``M_alpha r = 1`` and ``M_alpha.T l = 1`` by Richardson iteration
preconditioned with the solver of the previous (twice as large) shift, then
halves the shift.  Everything else in the package is a wrapper around this
scan with different exit checks.

All routines normalize to ``s = 1`` internally and return scalings valid for
the original problem, which only differ by a positive scalar on the scaled
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IterationCapHit, NotSDDAfterScaling
from .rcdd import (
    BackendChoice,
    LinearOperator,
    _DENSE_CUTOFF,
    build_rcdd_solver,
    build_sdd_solver,
)
from .reports import CONVERGED, ITERATION_CAP, PhaseLog, SolveReport
from .sparse import (
    RCDD_VERIFY_SLACK,
    SparseMatrix,
    apply_scaling,
    as_vector,
    check_sdd,
    induced_norms,
    shifted_m_matrix,
)

__all__ = [
    "ScalingPair",
    "MSolveOperators",
    "RichardsonConfig",
    "prec_richardson",
    "solve_from_scale",
    "mmatrix_scale",
    "solve_m",
    "symm_scale",
    "symm_solve",
    "factor_width2_solve",
    "scaling_iteration_cap",
    "expected_phase_count",
]


# ----------------------------------------------------------------------
# public types


@dataclass(frozen=True)
class ScalingPair:
    """Positive diagonal vectors ``(left, right)`` certifying dominance.

    ``alpha`` is the shift level at which the pair was certified (so the pair
    is valid for every shift >= alpha) and ``s`` the diagonal scale of the
    original problem.
    """

    left: np.ndarray
    right: np.ndarray
    alpha: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "left", as_vector(self.left, name="left"))
        object.__setattr__(self, "right", as_vector(self.right, name="right"))
        if np.any(self.left <= 0.0) or np.any(self.right <= 0.0):
            raise ValueError("scaling vectors must be strictly positive")

    @property
    def kappa_left(self) -> float:
        return float(self.left.max() / self.left.min())

    @property
    def kappa_right(self) -> float:
        return float(self.right.max() / self.right.min())


@dataclass(frozen=True)
class MSolveOperators:
    """Approximate inverse pair for an M-matrix and its transpose."""

    p_right: LinearOperator
    p_left: LinearOperator
    delta: float


@dataclass(frozen=True)
class RichardsonConfig:
    tolerance: float
    max_iterations: int = 1000
    residual_norm: str = "l2"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_norm not in ("l2", "linf"):
            raise ValueError("residual_norm must be 'l2' or 'linf'")


# ----------------------------------------------------------------------
# internal problem wrapper: normalized nonnegative matrix with fast products


class _Problem:
    """``A / scale`` with dense storage below the cutoff for speed."""

    def __init__(self, A: SparseMatrix, scale: float):
        if not A.is_square:
            raise ValueError("expected a square matrix")
        if scale <= 0.0 or not np.isfinite(scale):
            raise ValueError("scale must be positive and finite")
        self.n = A.n_rows
        norms = induced_norms(A)
        self.norm_1 = norms.norm_1 / scale
        self.norm_inf = norms.norm_inf / scale
        if self.n <= _DENSE_CUTOFF:
            self.dense = A.to_dense() / scale
            self.csr = None
            self.csr_t = None
        else:
            self.dense = None
            self.csr = A.csr() * (1.0 / scale)
            self.csr_t = A.csr_transpose() * (1.0 / scale)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.dense @ x if self.dense is not None else self.csr @ x

    def apply_t(self, x: np.ndarray) -> np.ndarray:
        return self.dense.T @ x if self.dense is not None else self.csr_t @ x

    def shifted_matvec(self, alpha: float, x: np.ndarray) -> np.ndarray:
        """``((1 + alpha) I - A) @ x``."""
        return (1.0 + alpha) * x - self.apply(x)

    def shifted_rmatvec(self, alpha: float, x: np.ndarray) -> np.ndarray:
        return (1.0 + alpha) * x - self.apply_t(x)

    def shifted_dense(self, alpha: float) -> np.ndarray:
        M = -self.dense.copy()
        np.fill_diagonal(M, M.diagonal() + (1.0 + alpha))
        return M

    def shifted_csr(self, alpha: float) -> sp.csr_matrix:
        return sp.identity(self.n, format="csr") * (1.0 + alpha) - self.csr


class _PhaseSolver:
    """Factorization of ``S = diag(l) M_{2 alpha} diag(r)`` reused for both
    the forward and transpose preconditioner of one phase."""

    def __init__(self, prob: _Problem, alpha2: float, ell: np.ndarray, r: np.ndarray):
        self.ell = ell
        self.r = r
        if prob.dense is not None:
            S = prob.shifted_dense(alpha2)
            S *= ell[:, None]
            S *= r[None, :]
            self.S_dense = S
            self._lu = scipy.linalg.lu_factor(S, check_finite=False)
            self._splu = None
            self.S_csr = None
        else:
            S = sp.diags(ell) @ prob.shifted_csr(alpha2) @ sp.diags(r)
            self.S_dense = None
            self.S_csr = S.tocsr()
            self._lu = None
            self._splu = spla.splu(S.tocsc())

    def p_right(self, x: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self.r * scipy.linalg.lu_solve(self._lu, self.ell * x, check_finite=False)
        return self.r * self._splu.solve(self.ell * x)

    def p_left(self, x: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self.ell * scipy.linalg.lu_solve(
                self._lu, self.r * x, trans=1, check_finite=False
            )
        return self.ell * self._splu.solve(self.r * x, trans="T")

    def row_col_margins(self):
        """Dominance margins of S (exploits the Z-sign pattern of the scan)."""
        if self.S_dense is not None:
            S = self.S_dense
            row = S.sum(axis=1)
            col = S.sum(axis=0)
        else:
            row = np.asarray(self.S_csr.sum(axis=1)).ravel()
            col = np.asarray(self.S_csr.sum(axis=0)).ravel()
        return row, col

    def kappa_upper(self) -> float:
        """Dominance-based condition-number bound of the phase matrix."""
        row, col = self.row_col_margins()
        beta_r = float(row.min(initial=np.inf))
        beta_c = float(col.min(initial=np.inf))
        if beta_r <= 0.0 or beta_c <= 0.0:
            return np.inf
        if self.S_dense is not None:
            absS = np.abs(self.S_dense)
            n1 = absS.sum(axis=0).max()
            ninf = absS.sum(axis=1).max()
        else:
            absS = abs(self.S_csr)
            n1 = np.asarray(absS.sum(axis=0)).ravel().max()
            ninf = np.asarray(absS.sum(axis=1)).ravel().max()
        return float(np.sqrt(n1 * ninf) / np.sqrt(beta_r * beta_c))


class _ScanFailure(Exception):
    """Internal: one of the decision checks fired during the halving scan."""

    def __init__(self, witness: str, phase: int, alpha: float):
        self.witness = witness
        self.phase = phase
        self.alpha = alpha
        super().__init__(witness)


def scaling_iteration_cap(n: int, K: float, eps: float) -> int:
    """Inner-loop iteration cap: ``ceil(8 log(n max(K, 2) / min(eps, 1)))``."""
    return math.ceil(8.0 * math.log(n * max(K, 2.0) / min(eps, 1.0)))


def expected_phase_count(A: SparseMatrix, s: float, eps: float) -> int:
    """Number of halving phases the scan performs on ``A / s`` at target eps."""
    norms = induced_norms(A)
    alpha0 = 2.0 * max(norms.norm_1, norms.norm_inf) / s
    if alpha0 <= eps:
        return 0
    return max(0, math.ceil(math.log2(alpha0 / eps)))


def _halving_scan(
    prob: _Problem,
    eps: float,
    cap: int,
    *,
    strict: bool = False,
    budget_threshold: float | None = None,
    residual_ceiling: float = 2e250,
):
    """Run the alpha-halving scan on a normalized problem.

    Returns ``(ell, r, alpha_final, report)``.  In strict mode every phase
    must pass the positivity and open-window checks and (when a budget
    threshold is given) the conditioning budget; a failed check raises
    :class:`_ScanFailure` with the witnessing condition.

    ``residual_ceiling`` fails a phase as soon as an inner residual exceeds
    it: under a valid conditioning bound the certified contraction keeps
    residuals below ``sqrt(n) * kappa(D)``, so blowing far past that refutes
    the M-matrix hypothesis without burning the whole iteration cap.
    """
    n = prob.n
    ones = np.ones(n)
    alpha0 = 2.0 * max(prob.norm_1, prob.norm_inf)
    report = SolveReport(alpha0=alpha0)

    if n == 1:
        a = float(prob.norm_1)
        report.info["closed_form"] = True
        denom = (1.0 + eps) - a
        if denom <= 0.0:
            raise _ScanFailure("nonpositive scaling", 0, eps)
        v = np.array([1.0 / denom])
        return v, v.copy(), eps, report

    if alpha0 <= eps:
        if alpha0 == 0.0:
            vec = ones / (1.0 + eps)
        else:
            vec = ones / alpha0
        return vec, vec.copy(), alpha0, report

    alpha = alpha0
    ell = ones / alpha0
    r = ones / alpha0
    phase = 0
    while alpha > eps:
        alpha2 = alpha
        alpha = alpha / 2.0
        solver = _PhaseSolver(prob, alpha2, ell, r)
        if budget_threshold is not None and solver.kappa_upper() > budget_threshold:
            raise _ScanFailure("solver budget", phase, alpha)
        l_new = np.zeros(n)
        r_new = np.zeros(n)
        res_l = -ones
        res_r = -ones
        k = 0
        # divergence of this loop is an expected, signal-carrying outcome on
        # non-M-matrices; silence transient overflow en route to the ceiling
        with np.errstate(over="ignore", invalid="ignore"):
            while max(np.abs(res_r).max(), np.abs(res_l).max()) > 0.5:
                if k >= cap:
                    raise _ScanFailure("iteration cap", phase, alpha)
                r_new = r_new - solver.p_right(res_r)
                l_new = l_new - solver.p_left(res_l)
                res_r = prob.shifted_matvec(alpha, r_new) - ones
                res_l = prob.shifted_rmatvec(alpha, l_new) - ones
                k += 1
                worst = max(np.abs(res_r).max(), np.abs(res_l).max())
                if not np.isfinite(worst) or worst > residual_ceiling:
                    raise _ScanFailure("iteration cap", phase, alpha)
        if strict:
            if np.any(r_new <= 0.0) or np.any(l_new <= 0.0):
                raise _ScanFailure("nonpositive scaling", phase, alpha)
            if (
                np.abs(res_r).max() >= 0.5
                or np.abs(res_l).max() >= 0.5
            ):
                raise _ScanFailure("window violation", phase, alpha)
        wr = 1.0 + res_r
        wl = 1.0 + res_l
        report.phases.append(
            PhaseLog(
                alpha=alpha,
                iterations=k,
                window_right=(float(wr.min()), float(wr.max())),
                window_left=(float(wl.min()), float(wl.max())),
                min_right=float(r_new.min()),
                min_left=float(l_new.min()),
                left=l_new.copy(),
                right=r_new.copy(),
            )
        )
        report.iterations += k
        ell, r = l_new, r_new
        phase += 1
    return ell, r, alpha, report


def _raw_rcdd_ok(prob: _Problem, eps: float, ell: np.ndarray, r: np.ndarray,
                 slack: float = RCDD_VERIFY_SLACK) -> bool:
    """Check RCDD-ness of ``diag(ell) ((1+eps) I - A) diag(r)`` on the
    normalized problem without building a SparseMatrix."""
    if prob.dense is not None:
        M = prob.shifted_dense(eps)
        S = ell[:, None] * M * r[None, :]
        diag = np.diag(S).copy()
        absS = np.abs(S)
        row_off = absS.sum(axis=1) - np.abs(diag)
        col_off = absS.sum(axis=0) - np.abs(diag)
    else:
        S = (sp.diags(ell) @ prob.shifted_csr(eps) @ sp.diags(r)).tocsr()
        diag = S.diagonal()
        absS = abs(S)
        row_off = np.asarray(absS.sum(axis=1)).ravel() - np.abs(diag)
        col_off = np.asarray(absS.sum(axis=0)).ravel() - np.abs(diag)
    allow = -slack * (np.abs(diag) + 1.0)
    return bool(
        np.all(diag - row_off >= allow) and np.all(diag - col_off >= allow)
    )


# ----------------------------------------------------------------------
# public operations


def prec_richardson(M, P, b, x0=None, cfg: RichardsonConfig | None = None):
    """Preconditioned Richardson iteration ``x <- x - P(M x - b)``.

    ``M`` may be a :class:`SparseMatrix` or a callable forward map; ``P`` a
    :class:`LinearOperator` or callable.  Stops when the residual norm drops
    below ``cfg.tolerance`` times the initial residual norm, or flags
    ``iteration_cap`` in the report (a status, not an error).  Returns
    ``(x, report)`` with per-iteration residual norms.
    """
    if cfg is None:
        raise ValueError("cfg is required")
    if isinstance(M, SparseMatrix):
        forward = M.matvec
    elif callable(M):
        forward = M
    else:
        raise TypeError("M must be a SparseMatrix or a callable forward map")
    precond = P.apply if isinstance(P, LinearOperator) else P
    b = as_vector(b, name="b")
    x = np.zeros_like(b) if x0 is None else as_vector(x0, b.shape[0], "x0").copy()

    norm = (lambda v: float(np.linalg.norm(v))) if cfg.residual_norm == "l2" else (
        lambda v: float(np.abs(v).max(initial=0.0))
    )
    residual = forward(x) - b
    r0 = norm(residual)
    report = SolveReport(residuals=[r0])
    if r0 == 0.0:
        return x, report
    target = cfg.tolerance * r0
    for it in range(1, cfg.max_iterations + 1):
        x = x - precond(residual)
        residual = forward(x) - b
        rn = norm(residual)
        report.residuals.append(rn)
        report.iterations = it
        if rn < target:
            return x, report
    report.status = ITERATION_CAP
    return x, report


def solve_from_scale(
    M: SparseMatrix,
    scale: ScalingPair,
    delta: float,
    backend: BackendChoice | None = None,
    seed: int = 0,
) -> MSolveOperators:
    """Turn an RCDD scaling of an M-matrix into approximate inverse operators.

    ``p_right`` applies ``x -> R Z(L x)`` with the inner dominant solve run at
    tolerance ``delta / kappa(L)``, giving ``||b - M p_right(b)||_2 <= delta
    ||b||_2`` per call (the transpose statement holds for ``p_left`` at
    tolerance ``delta / kappa(R)``).  The condition numbers of the diagonal
    scalings are computed exactly as max over min entry.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    ell, r = scale.left, scale.right
    if ell.shape[0] != M.n_rows or r.shape[0] != M.n_cols:
        raise ValueError("scaling length does not match the matrix")
    S = apply_scaling(ell, M, r)
    Z_right = build_rcdd_solver(S, delta / scale.kappa_left, backend, seed=seed)
    Z_left = build_rcdd_solver(
        S.transpose(), delta / scale.kappa_right, backend, seed=seed
    )

    csr = M.csr()
    csr_t = M.csr_transpose()

    def right_fn(x):
        y = r * Z_right.apply(ell * x)
        nx = np.linalg.norm(x)
        rel = 0.0 if nx == 0.0 else float(np.linalg.norm(x - csr @ y) / nx)
        return y, rel, Z_right.report.info["iterations_per_call"][-1]

    def left_fn(x):
        y = ell * Z_left.apply(r * x)
        nx = np.linalg.norm(x)
        rel = 0.0 if nx == 0.0 else float(np.linalg.norm(x - csr_t @ y) / nx)
        return y, rel, Z_left.report.info["iterations_per_call"][-1]

    p_right = LinearOperator(right_fn, M.n_rows, delta, "l2", seed)
    p_left = LinearOperator(left_fn, M.n_rows, delta, "l2", seed)
    return MSolveOperators(p_right=p_right, p_left=p_left, delta=delta)


def mmatrix_scale(A: SparseMatrix, s: float, eps: float, K: float):
    """Compute a positive diagonal pair making ``(1+eps) s I - A`` RCDD.

    ``K`` should dominate ``max(s ||M^-1||_inf, s ||M^-1||_1)`` for
    ``M = s I - A``; the bound is not checked and a violation (or
    ``rho(A) >= s``) surfaces as :class:`IterationCapHit`.  Returns
    ``(ScalingPair, SolveReport)`` with per-phase logs.
    """
    if not A.is_nonnegative():
        raise ValueError("matrix must be entrywise nonnegative")
    if s <= 0.0 or eps <= 0.0 or K <= 0.0:
        raise ValueError("s, eps, K must be positive")
    prob = _Problem(A, s)
    cap = scaling_iteration_cap(prob.n, K, eps)
    ceiling = 18.0 * np.sqrt(prob.n) * max(K, 2.0) ** 2
    try:
        ell, r, alpha_final, report = _halving_scan(prob, eps, cap, residual_ceiling=ceiling)
    except _ScanFailure as fail:
        raise IterationCapHit(
            f"scaling phase {fail.phase} (alpha={fail.alpha:.3e}) failed: "
            f"{fail.witness}; either rho(A) >= s or K is too small",
            phase=fail.phase,
            alpha=fail.alpha,
        ) from None
    report.info["cap"] = cap
    report.info["solver_tolerance"] = 1.0 / (8.0 * K)
    if not _raw_rcdd_ok(prob, eps, ell, r):
        raise IterationCapHit(
            "computed scaling failed RCDD verification; K is too small",
            phase=len(report.phases),
            alpha=alpha_final,
        )
    return ScalingPair(left=ell, right=r, alpha=alpha_final, s=s), report


def solve_m(
    A: SparseMatrix,
    s: float,
    eps: float,
    K: float,
    backend: BackendChoice | None = None,
    seed: int = 0,
) -> LinearOperator:
    """Operator ``P`` with ``||b - (s I - A) P(b)||_2 <= eps ||b||_2``.

    Internally scales the slightly shifted matrix ``(1+eps/3)(1+eps/2) s I -
    A`` (the composed shift stays within ``(1+eps) s``), solves through the
    dominant-solver route, and wraps the result in Richardson refinement
    against the true matrix until the l2 contract is met.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if s <= 0.0:
        raise ValueError("s must be positive")
    s_mid = s * (1.0 + eps / 2.0)
    scale_pair, scale_report = mmatrix_scale(A, s_mid, eps / 3.0, K)
    M_shift = shifted_m_matrix(A, s_mid, eps / 3.0)
    ops = solve_from_scale(M_shift, scale_pair, eps / 3.0, backend, seed=seed)

    n = A.n_rows
    csr = A.csr()

    def true_matvec(x):
        return s * x - csr @ x

    cap = max(64, math.ceil(8.0 * (1.0 + eps * K) * math.log(n * max(K, 2.0) / eps)))
    cfg = RichardsonConfig(tolerance=eps, max_iterations=cap, residual_norm="l2")

    def apply_fn(b):
        x, rep = prec_richardson(true_matvec, ops.p_right, b, None, cfg)
        if rep.status != CONVERGED:
            raise IterationCapHit(
                f"refinement against s I - A hit its cap of {cap} iterations",
                phase=None,
                alpha=None,
            )
        nb = np.linalg.norm(b)
        rel = 0.0 if nb == 0.0 else rep.residuals[-1] / nb
        return x, float(rel), rep.iterations

    op = LinearOperator(apply_fn, n, eps, "l2", seed)
    op.report.info["scaling_phases"] = len(scale_report.phases)
    return op


# ----------------------------------------------------------------------
# symmetric path


def _symm_initial_scaling(prob: _Problem, cap: int):
    """Damped Richardson for the alpha = 1 level: ``v <- v - (M_1 v - 1)/4``."""
    n = prob.n
    ones = np.ones(n)
    v = np.zeros(n)
    res = -ones
    norms = [float(np.linalg.norm(res))]
    k = 0
    while np.abs(res).max() > 0.5:
        if k >= cap:
            raise IterationCapHit(
                "initial symmetric phase exceeded its cap", phase=0, alpha=1.0
            )
        v = v - 0.25 * res
        res = prob.shifted_matvec(1.0, v) - ones
        norms.append(float(np.linalg.norm(res)))
        k += 1
    return v, norms


def _symm_phase_step(
    prob: _Problem, A: SparseMatrix, v2: np.ndarray, alpha: float, cap: int, seed: int
):
    """One halving step: scaling for ``M_alpha`` from the scaling of ``M_2alpha``."""
    n = prob.n
    ones = np.ones(n)
    S2 = apply_scaling(v2, shifted_m_matrix(A, 1.0, 2.0 * alpha), v2)
    Z = build_sdd_solver(S2, 0.25, seed=seed)
    v = np.zeros(n)
    res = -ones
    k = 0
    while np.abs(res).max() > 0.5:
        if k >= cap:
            raise IterationCapHit(
                f"symmetric phase at alpha={alpha:.3e} exceeded its cap",
                phase=None,
                alpha=alpha,
            )
        v = v - v2 * Z.apply(v2 * res)
        res = prob.shifted_matvec(alpha, v) - ones
        k += 1
    if np.any(v <= 0.0):
        raise IterationCapHit(
            "symmetric scaling lost positivity; spectral assumption violated",
            phase=None,
            alpha=alpha,
        )
    return v, k


def _check_symmetric_nonnegative(A: SparseMatrix):
    if not A.is_square:
        raise ValueError("expected a square matrix")
    if not A.is_nonnegative():
        raise ValueError("matrix must be entrywise nonnegative")
    diff = (A.csr() - A.csr_transpose()).tocoo()
    if diff.nnz:
        scale = max(1.0, float(np.abs(A.csr().data).max(initial=0.0)))
        if np.abs(diff.data).max() > 1e-12 * scale:
            raise ValueError("matrix must be symmetric")


def symm_scale(A: SparseMatrix, eps: float, seed: int = 0):
    """Positive diagonal ``v`` with ``diag(v) ((1+eps) I - A) diag(v)`` SDD.

    Assumes ``A`` symmetric nonnegative with ``rho(A) < 1`` (normalized
    problem).  Returns ``(v, report)``; the report carries the l2 residual
    sequence of the initial damped phase and per-phase iteration counts.
    """
    _check_symmetric_nonnegative(A)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    prob = _Problem(A, 1.0)
    n = prob.n
    report = SolveReport(alpha0=1.0)

    if n == 1:
        a = float(prob.norm_1)
        denom = (1.0 + eps) - a
        if denom <= 0.0:
            raise IterationCapHit("1x1 matrix is not below the shift", phase=0, alpha=eps)
        v = np.array([1.0 / np.sqrt(denom)])
        report.info["closed_form"] = True
        return v, report

    cap0 = math.ceil(8.0 * math.log(4.0 * n))
    v, initial_residuals = _symm_initial_scaling(prob, cap0)
    report.info["initial_residuals"] = initial_residuals
    report.iterations += len(initial_residuals) - 1

    cap = math.ceil(8.0 * math.log(8.0 * n / min(eps, 1.0)))
    alpha = 1.0
    while alpha > eps:
        alpha /= 2.0
        v, k = _symm_phase_step(prob, A, v, alpha, cap, seed)
        res = prob.shifted_matvec(alpha, v) - 1.0
        report.phases.append(
            PhaseLog(
                alpha=alpha,
                iterations=k,
                window_right=(float(1.0 + res.min()), float(1.0 + res.max())),
                window_left=(float(1.0 + res.min()), float(1.0 + res.max())),
                min_right=float(v.min()),
                min_left=float(v.min()),
                left=v.copy(),
                right=v.copy(),
            )
        )
        report.iterations += k
    return v, report


def symm_solve(A: SparseMatrix, b, delta: float, seed: int = 0):
    """Solve ``(I - A) x = b`` for symmetric nonnegative ``A`` with
    ``rho(A) < 1`` to ``||(I - A) x - b||_2 <= delta ||b||_2``.

    Descends the halving levels of the symmetric scaling and attempts a short
    Richardson refinement against ``I - A`` at every level, returning at the
    first level whose shifted solver is strong enough.
    """
    _check_symmetric_nonnegative(A)
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    b = as_vector(b, A.n_rows, "b")
    prob = _Problem(A, 1.0)
    n = prob.n

    if n == 1:
        a = float(prob.norm_1)
        if a >= 1.0:
            raise IterationCapHit("1x1 matrix is singular or worse", phase=0, alpha=0.0)
        return b / (1.0 - a), SolveReport(info={"levels": 0})

    csr = A.csr()

    def forward(x):
        return x - csr @ x

    cap0 = math.ceil(8.0 * math.log(4.0 * n))
    v, _ = _symm_initial_scaling(prob, cap0)

    per_level = 4 + math.ceil(3.0 * math.log2(2.0 / delta))
    cfg = RichardsonConfig(tolerance=delta, max_iterations=per_level, residual_norm="l2")
    report = SolveReport()
    alpha = 1.0
    alpha_floor = 1e-14
    level = 0
    while alpha > alpha_floor:
        S = apply_scaling(v, shifted_m_matrix(A, 1.0, alpha), v)
        Z = build_sdd_solver(S, 0.25, seed=seed)

        def precond(x, v=v, Z=Z):
            return v * Z.apply(v * x)

        x, rep = prec_richardson(forward, precond, b, None, cfg)
        level += 1
        report.iterations += rep.iterations
        report.residuals.append(rep.residuals[-1])
        if rep.status == CONVERGED:
            report.info["levels"] = level
            report.info["alpha"] = alpha
            return x, report
        cap = math.ceil(8.0 * math.log(8.0 * n / min(alpha / 2.0, 1.0)))
        alpha /= 2.0
        v, _ = _symm_phase_step(prob, A, v, alpha, cap, seed)
    raise IterationCapHit(
        "no halving level produced a strong enough solver; the matrix is "
        "singular at working precision",
        phase=level,
        alpha=alpha,
    )


def factor_width2_solve(M: SparseMatrix, b, delta: float, seed: int = 0):
    """Solve ``M x = b`` for a symmetric matrix asserted to have factor width 2.

    Forms the comparison matrix (off-diagonal magnitudes negated), scales its
    M-matrix form through the symmetric path, verifies that the resulting
    diagonal makes ``V M V`` diagonally dominant, and solves through the SDD
    route with Richardson refinement.  A scaling that fails the dominance
    check disproves the factor-width-2 assertion and raises
    :class:`NotSDDAfterScaling`.
    """
    if not M.is_square:
        raise ValueError("expected a square matrix")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    b = as_vector(b, M.n_rows, "b")
    rows, cols, values = M.entries()
    diag_mask = rows == cols
    diag = np.zeros(M.n_rows)
    diag[rows[diag_mask]] = values[diag_mask]
    if np.any(diag <= 0.0):
        raise ValueError("matrix must have a strictly positive diagonal")
    s_prime = float(diag.max())

    # A' = s' I - comparison(M): diagonal s' - M_ii, off-diagonal |M_ij|
    off = ~diag_mask
    a_rows = np.concatenate([np.arange(M.n_rows), rows[off]])
    a_cols = np.concatenate([np.arange(M.n_rows), cols[off]])
    a_vals = np.concatenate([s_prime - diag, np.abs(values[off])])
    A_comp = SparseMatrix(M.n_rows, M.n_cols, a_rows, a_cols, a_vals)
    A_norm = A_comp.scaled(1.0 / s_prime)

    v = None
    eps_try = 0.5
    while eps_try >= 1e-8:
        v_try, _ = symm_scale(A_norm, eps_try, seed=seed)
        if check_sdd(apply_scaling(v_try, M, v_try), RCDD_VERIFY_SLACK):
            v = v_try
            break
        eps_try /= 4.0
    if v is None:
        raise NotSDDAfterScaling(
            "no shift produced a dominant scaling of V M V; the input is not "
            "factor width 2 (or is numerically singular)"
        )

    S = apply_scaling(v, M, v)
    Z = build_sdd_solver(S, 0.25, seed=seed)

    def precond(x):
        return v * Z.apply(v * x)

    cap = max(64, math.ceil(8.0 * math.log(4.0 / min(delta, 1.0))))
    cfg = RichardsonConfig(tolerance=delta, max_iterations=cap, residual_norm="l2")
    x, report = prec_richardson(M, precond, b, None, cfg)
    if report.status != CONVERGED:
        raise IterationCapHit(
            "factor-width-2 refinement hit its iteration cap", phase=None, alpha=None
        )
    report.info["shift"] = eps_try
    report.info["scaling"] = v
    return x, report
