"""Empirical concentration checks for the sketching operator.

Two measurement tools:

* the supreme embedding error max |  ||S y||^2 - 1 | over a finite set of
  unit vectors (a lower bound on the supremum over the continuum it
  samples, reported as such), together with the realized row bound
  M = max_k ||xi_k||_inf;
* tail curves for averaged masked quadratic forms (1/m) sum_k s_k' A_k s_k.
  These vectors are masked but NOT rescaled by 1/sqrt(q) -- a deliberately
  separate convention from the sketch factors, kept in its own code path.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import WidthEstimate, _range_basis
from .seeds import child, generator
from .sketch import SketchSpec, max_xi_inf_norm, sample_sketch, sketch_matrix
from .distributions import FactorDistribution, rademacher

_UNIT_TOL = 1e-10
_TRIAL_CHUNK = 512

MATRIX_KINDS = ("identity", "random_psd")


@dataclass(frozen=True)
class EmbeddingErrorReport:
    """Measured sup embedding error over a finite test set.

    ``sup_error`` lower-bounds the supremum over any continuum the set was
    sampled from.  ``width_estimate`` is optional caller-provided context
    (the width used to size the sketch), not a measurement.
    """

    sup_error: float
    set_size: int
    realized_M: float
    m: int
    q: float
    width_estimate: WidthEstimate | None = None


@dataclass(frozen=True)
class TailCurve:
    """Empirical exceedance probabilities at ascending thresholds."""

    thresholds: np.ndarray
    empirical_exceed_prob: np.ndarray
    n_trials: int

    def __post_init__(self) -> None:
        if np.any(np.diff(self.empirical_exceed_prob) > 0):
            raise ValueError("exceedance probabilities must be nonincreasing")


def measure_sup_embedding_error(
    spec: SketchSpec,
    test_set: np.ndarray,
    seed: int,
    width_estimate: WidthEstimate | None = None,
) -> EmbeddingErrorReport:
    """Sample one sketch and evaluate max_y | ||S y||^2 - 1 | over the set.

    ``test_set`` is an array of shape (count, n1*n2) whose rows must be
    unit vectors (tolerance 1e-10).
    """
    test_set = np.asarray(test_set, dtype=np.float64)
    if test_set.size == 0:
        count = 0
    else:
        if test_set.ndim != 2 or test_set.shape[1] != spec.n1 * spec.n2:
            raise ValueError(
                f"test set must be (count, {spec.n1 * spec.n2}), got {test_set.shape}"
            )
        norms = np.linalg.norm(test_set, axis=1)
        if np.abs(norms - 1.0).max() > _UNIT_TOL:
            raise ValueError("test set contains non-unit vectors")
        count = test_set.shape[0]
    sketch = sample_sketch(replace(spec, seed=seed))
    if count == 0:
        sup_error = 0.0
    else:
        SY = sketch_matrix(sketch, test_set.T)
        sup_error = float(np.abs((SY * SY).sum(axis=0) - 1.0).max())
    return EmbeddingErrorReport(
        sup_error=sup_error,
        set_size=count,
        realized_M=max_xi_inf_norm(sketch),
        m=spec.m,
        q=spec.q,
        width_estimate=width_estimate,
    )


def sample_unit_sphere_subspace(A: np.ndarray, count: int, seed: int) -> np.ndarray:
    """``count`` vectors uniform on Range(A) intersected with the sphere.

    Gaussian draws in the column space, normalized.  Returned as rows of a
    (count, n) array.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    Q = _range_basis(A)
    if Q is None:
        raise ValueError("zero matrix spans no unit-sphere directions")
    Z = generator(seed).standard_normal((count, Q.shape[1]))
    Y = Z @ Q.T
    return Y / np.linalg.norm(Y, axis=1, keepdims=True)


def _psd_test_matrices(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """m spectral-normalized Gram matrices G'G / ||G'G||_2, fixed per seed."""
    G = rng.standard_normal((m, n, n))
    M = np.einsum("kij,kil->kjl", G, G)
    top = np.linalg.eigvalsh(M)[:, -1]
    return M / top[:, None, None]


def hanson_wright_tail(
    n: int,
    m: int,
    q: float,
    matrix_kind: str,
    n_trials: int,
    thresholds: np.ndarray,
    seed: int,
    dist: FactorDistribution | None = None,
) -> TailCurve:
    """Empirical tail of the centered averaged quadratic form.

    Per trial, draws m independent masked vectors s_k = phi o sigma (no
    1/sqrt(q) rescaling) and evaluates
    W = (1/m) sum_k (s_k' A_k s_k - q tr(A_k)); the curve reports the
    fraction of trials with |W| exceeding each threshold.
    """
    if matrix_kind not in MATRIX_KINDS:
        raise ValueError(f"unknown matrix kind: {matrix_kind!r}")
    if n_trials < 100:
        raise ValueError("need n_trials >= 100 for a meaningful tail estimate")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"density level q must lie in (0, 1], got {q}")
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.ndim != 1 or thresholds.size == 0:
        raise ValueError("thresholds must be a nonempty 1-d array")
    if np.any(np.diff(thresholds) <= 0) or thresholds[0] <= 0:
        raise ValueError("thresholds must be positive and strictly ascending")
    dist = dist if dist is not None else rademacher()

    root = child(seed)
    values_rng = generator(root, 0)
    mask_rng = generator(root, 1)
    if matrix_kind == "random_psd":
        matrices = _psd_test_matrices(n, m, generator(root, 2))
        mean_quad = q * np.trace(matrices, axis1=1, axis2=2).mean()
    else:
        matrices = None
        mean_quad = q * n

    exceed = np.zeros(thresholds.size, dtype=np.int64)
    done = 0
    while done < n_trials:
        chunk = min(_TRIAL_CHUNK, n_trials - done)
        if dist.kind == "gaussian":
            phi = values_rng.standard_normal((chunk, m, n))
        else:
            phi = values_rng.integers(0, 2, size=(chunk, m, n)).astype(np.float64) * 2.0 - 1.0
        sigma = mask_rng.random((chunk, m, n)) < q
        s = np.where(sigma, phi, 0.0)
        if matrices is None:
            quad = (s * s).sum(axis=2)
        else:
            quad = np.einsum("tki,kij,tkj->tk", s, matrices, s)
        W = np.abs(quad.mean(axis=1) - mean_quad)
        exceed += (W[:, None] > thresholds[None, :]).sum(axis=0)
        done += chunk
    return TailCurve(
        thresholds=thresholds,
        empirical_exceed_prob=exceed / float(n_trials),
        n_trials=n_trials,
    )
