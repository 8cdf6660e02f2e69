"""Sub-Gaussian entry laws for sketch factors.

A factor vector has i.i.d. zero-mean, unit-variance entries, thinned by an
independent Bernoulli(q) mask and rescaled by 1/sqrt(q) so that every
coordinate keeps unit second moment.  Values and mask come from separate
derived streams: changing q re-thins the same underlying value draws
instead of reshuffling them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeds import child

# psi_2 norms of the built-in unit-variance laws, evaluated from
# inf{t > 0 : E exp(x^2/t^2) <= 2}:
#   Rademacher: exp(1/t^2) <= 2        =>  t = 1/sqrt(log 2)
#   N(0,1):     (1-2/t^2)^(-1/2) <= 2  =>  t = sqrt(8/3)
# Both exceed 1, as they must: a zero-mean unit-variance variable has
# standard deviation no larger than its psi_2 norm.
RADEMACHER_PSI2 = float(1.0 / np.sqrt(np.log(2.0)))
GAUSSIAN_PSI2 = float(np.sqrt(8.0 / 3.0))

_KINDS = ("gaussian", "rademacher")


@dataclass(frozen=True)
class FactorDistribution:
    """Entry law of one unmasked sketch factor.

    kind
        ``"gaussian"`` or ``"rademacher"`` -- the lowercase names used in
        configs and on the CLI.
    psi2_bound
        Sub-Gaussian norm of one unmasked entry.  Configurable; defaults
        are the exact values for the two built-in laws.
    entry_bound
        Uniform bound on ``|entry|`` when the law is bounded, else None.
    """

    kind: str
    psi2_bound: float
    entry_bound: float | None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown factor distribution kind: {self.kind!r}")
        if not self.psi2_bound >= 1.0:
            raise ValueError("psi2_bound must be >= 1 (std dev <= psi2 norm)")
        if self.kind == "rademacher" and self.entry_bound != 1.0:
            raise ValueError("rademacher entries are +/-1; entry_bound must be 1")
        if self.kind == "gaussian" and self.entry_bound is not None:
            raise ValueError("gaussian entries are unbounded; entry_bound must be None")

    @property
    def bounded(self) -> bool:
        return self.entry_bound is not None


def gaussian(psi2_bound: float = GAUSSIAN_PSI2) -> FactorDistribution:
    """Standard normal entries."""
    return FactorDistribution("gaussian", psi2_bound, None)


def rademacher(psi2_bound: float = RADEMACHER_PSI2) -> FactorDistribution:
    """Symmetric +/-1 entries."""
    return FactorDistribution("rademacher", psi2_bound, 1.0)


def from_name(name: str) -> FactorDistribution:
    """Look up a built-in law by its config/CLI name."""
    if name == "gaussian":
        return gaussian()
    if name == "rademacher":
        return rademacher()
    raise ValueError(f"unknown factor distribution name: {name!r}")


@dataclass(frozen=True)
class MaskedFactorSample:
    """One masked, rescaled factor vector.

    ``values[i] = phi_i * sigma_i / sqrt(q)`` with ``sigma ~ Bernoulli(q)``;
    zeros are exactly the masked coordinates, and ``nnz_count`` counts the
    surviving ones.
    """

    values: np.ndarray
    nnz_count: int
    q: float


def _check_q(q: float) -> None:
    if not 0.0 < q <= 1.0:
        raise ValueError(f"density level q must lie in (0, 1], got {q}")


def _raw_rows(
    dist: FactorDistribution,
    rows: int,
    n: int,
    q: float,
    stream: int | np.random.SeedSequence,
) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled masked draws: (phi * sigma, sigma) as (rows, n) arrays."""
    values_rng = np.random.default_rng(child(stream, 0))
    mask_rng = np.random.default_rng(child(stream, 1))
    if dist.kind == "gaussian":
        phi = values_rng.standard_normal((rows, n))
    else:
        phi = values_rng.integers(0, 2, size=(rows, n)).astype(np.float64) * 2.0 - 1.0
    if q < 1.0:
        keep = mask_rng.random((rows, n)) < q
        phi = np.where(keep, phi, 0.0)
    else:
        keep = np.ones((rows, n), dtype=bool)
    return phi, keep


def sample_factor_rows(
    dist: FactorDistribution,
    rows: int,
    n: int,
    q: float,
    stream: int | np.random.SeedSequence,
) -> np.ndarray:
    """``rows`` independent masked factor vectors, stacked as a matrix.

    Each row is distributed like :func:`sample_factor` output; rows are
    mutually independent.
    """
    _check_q(q)
    if n < 1:
        raise ValueError("factor length n must be >= 1")
    if rows < 1:
        raise ValueError("row count must be >= 1")
    phi, _ = _raw_rows(dist, rows, n, q, stream)
    return phi / np.sqrt(q)


def sample_factor(
    dist: FactorDistribution,
    n: int,
    q: float,
    stream: int | np.random.SeedSequence,
) -> MaskedFactorSample:
    """Draw one masked factor vector of length ``n`` at density ``q``.

    Every entry is independently 0 with probability 1-q, else an entry
    draw divided by sqrt(q), which makes each coordinate isotropic in
    expectation (E v_i^2 = 1).
    """
    _check_q(q)
    if n < 1:
        raise ValueError("factor length n must be >= 1")
    phi, keep = _raw_rows(dist, 1, n, q, stream)
    return MaskedFactorSample(
        values=phi[0] / np.sqrt(q),
        nnz_count=int(keep[0].sum()),
        q=float(q),
    )


def effective_entry_bound(dist: FactorDistribution, q: float) -> float | None:
    """A-priori bound on the magnitude of a masked, rescaled entry.

    Returns ``entry_bound / sqrt(q)`` for bounded laws, else None.
    """
    _check_q(q)
    if dist.entry_bound is None:
        return None
    return float(dist.entry_bound / np.sqrt(q))
