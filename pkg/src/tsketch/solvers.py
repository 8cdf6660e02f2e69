"""Least-squares solvers and the sketch quality metric.

Unconstrained solves return the minimum-norm solution so rank-deficient
systems are well-defined.  The l1-ball-constrained solve is projected
gradient with the exact sort-based ball projection; the step is 1/L with
L the largest squared singular value from power iteration (safety factor
1.1), which makes the objective non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_RCOND = 1e-12
_POWER_ITERS = 20
_L_SAFETY = 1.1
# Residuals below (RESIDUAL_FLOOR * ||b||)^2 are numerically zero: stop there
# instead of chasing relative decrease forever on exact-recovery instances.
_RESIDUAL_FLOOR = 1e-13


@dataclass(frozen=True)
class LsSolution:
    """Solver output: point, squared residual, iteration diagnostics."""

    x: np.ndarray
    residual_sq: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class L1SolverOptions:
    """Options for :func:`solve_l1_constrained`.

    ``max_iters=None`` means 50 * p, decided at solve time.
    """

    radius: float
    max_iters: int | None = None
    tol: float = 1e-10
    step_rule: str = "fixed_inverse_lipschitz"

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("l1 radius must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.step_rule not in ("fixed_inverse_lipschitz", "backtracking"):
            raise ValueError(f"unknown step rule: {self.step_rule!r}")


def _as_system(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"coefficient matrix must be nonempty 2-d, got shape {A.shape}")
    if b.shape != (A.shape[0],):
        raise ValueError(f"rhs shape {b.shape} does not match matrix {A.shape}")
    return A, b


def solve_unconstrained(A: np.ndarray, b: np.ndarray) -> LsSolution:
    """Minimum-norm least-squares solution (SVD-based, cutoff 1e-12)."""
    A, b = _as_system(A, b)
    x, _, _, _ = np.linalg.lstsq(A, b, rcond=_RCOND)
    r = A @ x - b
    return LsSolution(x=x, residual_sq=float(r @ r), iterations=0, converged=True)


def project_l1(v: np.ndarray, R: float) -> np.ndarray:
    """Exact Euclidean projection onto the l1 ball of radius R (sort-based)."""
    if not R > 0:
        raise ValueError("l1 radius must be positive")
    v = np.asarray(v, dtype=np.float64)
    a = np.abs(v)
    if a.sum() <= R:
        return v.copy()
    u = np.sort(a)[::-1]
    thresholds = (np.cumsum(u) - R) / np.arange(1, u.size + 1)
    k = np.nonzero(u > thresholds)[0].max()
    return np.sign(v) * np.maximum(a - thresholds[k], 0.0)


def _sigma_max_sq(A: np.ndarray, iters: int = _POWER_ITERS) -> float:
    """Largest squared singular value, estimated by power iteration."""
    p = A.shape[1]
    v = np.ones(p) / np.sqrt(p)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        est = float(v @ w)
        v = w / norm
    return max(est, float(v @ (A.T @ (A @ v))))


def solve_l1_constrained(A: np.ndarray, b: np.ndarray, opts: L1SolverOptions) -> LsSolution:
    """Projected-gradient solve of min ||Ax - b||^2 over the l1 ball.

    Non-convergence within the iteration cap is not an error: the best
    iterate is returned with ``converged=False`` and the caller decides.
    """
    A, b = _as_system(A, b)
    p = A.shape[1]
    max_iters = opts.max_iters if opts.max_iters is not None else 50 * p
    L = _L_SAFETY * _sigma_max_sq(A)
    x = np.zeros(p)
    r = -b
    f = float(r @ r)
    if L <= 0.0 or f == 0.0:
        return LsSolution(x=x, residual_sq=f, iterations=0, converged=True)
    floor = (_RESIDUAL_FLOOR * np.linalg.norm(b)) ** 2
    step = 1.0 / L
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        g = A.T @ r
        if opts.step_rule == "fixed_inverse_lipschitz":
            x_new = project_l1(x - step * g, opts.radius)
            r_new = A @ x_new - b
            f_new = float(r_new @ r_new)
        else:
            trial = step
            while True:
                x_new = project_l1(x - trial * g, opts.radius)
                r_new = A @ x_new - b
                f_new = float(r_new @ r_new)
                if f_new <= f or trial < 1e-20 / L:
                    break
                trial *= 0.5
        decrease = f - f_new
        x, r, f = x_new, r_new, f_new
        if f <= floor or decrease <= opts.tol * max(f, floor):
            converged = True
            break
    return LsSolution(x=x, residual_sq=f, iterations=it, converged=converged)


def error_ratio(A: np.ndarray, b: np.ndarray, x_hat: np.ndarray, x_star: np.ndarray) -> float:
    """|(||A x_hat - b||^2 - ||A x*-b||^2)| / ||A x* - b||^2.

    The optimal residual must be strictly positive (noisy instances
    guarantee this); a zero denominator raises.
    """
    A, b = _as_system(A, b)
    r_star = A @ np.asarray(x_star, dtype=np.float64) - b
    denom = float(r_star @ r_star)
    if denom <= 0.0:
        raise ValueError("optimal residual is zero; error ratio undefined")
    r_hat = A @ np.asarray(x_hat, dtype=np.float64) - b
    return abs((float(r_hat @ r_hat) - denom) / denom)
