"""Gaussian-width estimators and sketch-dimension calculators.

Only the two analytically tractable width cases are computed (subspace
range and l1 tangent cone), plus a Monte Carlo estimator for subspace
widths that is exact per draw.  The universal constant in the dimension
bound is not derivable numerically and is a required caller input; the
default 1 makes bounds comparable relative to each other, not absolute.
Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeds import generator

_RANK_RCOND = 1e-12

MC_SUBSPACE = "mc_subspace"
ANALYTIC_RANK = "analytic_rank"
ANALYTIC_L1_CONE = "analytic_l1_cone"


@dataclass(frozen=True)
class WidthEstimate:
    """A Gaussian-width value with its provenance.

    Analytic methods carry ``n_samples=0`` and ``std_err=0``.
    """

    value: float
    method: str
    n_samples: int = 0
    std_err: float = 0.0

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("width must be nonnegative")
        if self.method == MC_SUBSPACE and self.n_samples < 1:
            raise ValueError("Monte Carlo estimates need n_samples >= 1")


@dataclass(frozen=True)
class DimensionBound:
    """Sketch-dimension lower bound m >= C * max(W^2/(eps^2 q^2), |log d|/(eps^2 q))."""

    m_lower: int
    width_term: float
    logdelta_term: float
    epsilon: float
    delta: float
    q: float
    C: float


def _range_basis(A: np.ndarray) -> np.ndarray | None:
    """Orthonormal basis of Range(A), or None for the zero matrix."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if A.size == 0 or not np.any(A):
        return None
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int((s > s[0] * _RANK_RCOND).sum())
    if r == 0:
        return None
    return U[:, :r]


def subspace_width_mc(A: np.ndarray, n_samples: int, seed: int) -> WidthEstimate:
    """Monte Carlo Gaussian width of Range(A) intersected with the sphere.

    For a subspace cap the supremum of <n, y> is attained at the
    normalized projection of n, so each draw contributes ||P_A n||_2
    exactly; the estimate is the sample mean with its standard error.
    A zero matrix has width 0 (degenerate subspace, not an error).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    Q = _range_basis(A)
    if Q is None:
        return WidthEstimate(0.0, MC_SUBSPACE, n_samples, 0.0)
    rng = generator(seed)
    G = rng.standard_normal((n_samples, Q.shape[0]))
    norms = np.linalg.norm(G @ Q, axis=1)
    std_err = float(norms.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return WidthEstimate(float(norms.mean()), MC_SUBSPACE, n_samples, std_err)


def width_bound_rank(r: int) -> WidthEstimate:
    """Analytic bound 2*sqrt(r) for an r-dimensional subspace cap."""
    if r < 0:
        raise ValueError("rank must be nonnegative")
    return WidthEstimate(2.0 * math.sqrt(r), ANALYTIC_RANK)


def width_bound_l1_cone(s: int, p: int) -> WidthEstimate:
    """Analytic bound min(6*sqrt(s log p), 2*sqrt(p)) for the l1 tangent cone.

    ``s`` is the support size of the constrained optimum; natural log.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    if not 1 <= s <= p:
        raise ValueError(f"need 1 <= s <= p, got s={s}, p={p}")
    value = min(6.0 * math.sqrt(s * math.log(p)), 2.0 * math.sqrt(p))
    return WidthEstimate(value, ANALYTIC_L1_CONE)


def sketch_dim_bound(
    width: WidthEstimate | float,
    epsilon: float,
    delta: float,
    q: float,
    C: float = 1.0,
) -> DimensionBound:
    """Evaluate the sketching-dimension bound for a given width.

    Returns both competing terms and the ceiling of C times their max.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    if not C > 0.0:
        raise ValueError("C must be positive")
    w = float(width.value) if isinstance(width, WidthEstimate) else float(width)
    if w < 0:
        raise ValueError("width must be nonnegative")
    width_term = w * w / (epsilon * epsilon * q * q)
    logdelta_term = abs(math.log(delta)) / (epsilon * epsilon * q)
    m_lower = int(math.ceil(C * max(width_term, logdelta_term)))
    return DimensionBound(
        m_lower=m_lower,
        width_term=width_term,
        logdelta_term=logdelta_term,
        epsilon=epsilon,
        delta=delta,
        q=q,
        C=C,
    )
