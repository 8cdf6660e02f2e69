"""Row-wise Kronecker sketching operator.

The m x (n1*n2) operator S has k-th row (1/sqrt(m)) * kron(eta_k, xi_k)
where eta_k and xi_k are independent masked factor vectors.  S is stored
factored -- two matrices of m*(n1+n2) values total -- and applied as a
per-row bilinear form; the dense matrix exists only as a guarded oracle.

Vector layout: a length n1*n2 vector y is the row-major flattening of an
n1 x n2 array Y, i.e. flat index i = i1*n2 + i2 (consecutive blocks of
length n2 share the first factor index).  Under this layout
``apply(S, y)[k] = scale * eta_k @ Y @ xi_k``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .distributions import FactorDistribution, sample_factor_rows
from .seeds import child

_MAGIC = b"TSK1"
_HEADER = struct.Struct("<4sIIId")

# Sub-stream keys for the two factor matrices.
_ETA_STREAM = 0
_XI_STREAM = 1

DENSIFY_MAX_ENTRIES = 50_000_000


class ResourceLimitError(RuntimeError):
    """Raised when densification would exceed the memory budget."""


@dataclass(frozen=True)
class SketchSpec:
    """Parameters that fully determine one sketching operator.

    dist2 conventionally plays the bounded role; when only dist1 is
    bounded the two laws are swapped at sampling time (the construction is
    symmetric in its factors).  A fully unbounded pair is allowed but
    flagged, since it falls outside the theory's hypotheses.
    """

    m: int
    n1: int
    n2: int
    q: float
    dist1: FactorDistribution
    dist2: FactorDistribution
    seed: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n1 < 1 or self.n2 < 1:
            raise ValueError("m, n1, n2 must all be >= 1")
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"density level q must lie in (0, 1], got {self.q}")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class TensorSketch:
    """A sampled operator: factor matrices eta (m x n1) and xi (m x n2).

    ``swapped`` records that the spec's laws were exchanged to put the
    bounded one on xi; ``unbounded_pair`` flags specs where neither law is
    bounded (sampling proceeds, outside the bounded-factor hypothesis).
    """

    eta: np.ndarray
    xi: np.ndarray
    scale: float
    spec: SketchSpec
    swapped: bool = False
    unbounded_pair: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return (self.spec.m, self.spec.n1 * self.spec.n2)


def sample_sketch(spec: SketchSpec) -> TensorSketch:
    """Draw the m independent (eta_k, xi_k) factor pairs for ``spec``.

    Deterministic given ``spec.seed``: repeated calls return bit-identical
    factor matrices.
    """
    d1, d2 = spec.dist1, spec.dist2
    swapped = False
    if not d2.bounded and d1.bounded:
        d1, d2 = d2, d1
        swapped = True
    root = child(spec.seed)
    eta = sample_factor_rows(d1, spec.m, spec.n1, spec.q, child(root, _ETA_STREAM))
    xi = sample_factor_rows(d2, spec.m, spec.n2, spec.q, child(root, _XI_STREAM))
    eta.setflags(write=False)
    xi.setflags(write=False)
    return TensorSketch(
        eta=eta,
        xi=xi,
        scale=1.0 / np.sqrt(spec.m),
        spec=spec,
        swapped=swapped,
        unbounded_pair=not d2.bounded,
    )


def apply(sketch: TensorSketch, y: np.ndarray) -> np.ndarray:
    """S @ y evaluated through the factored representation.

    Component k is ``scale * eta_k @ Y @ xi_k`` with Y the n1 x n2 reshape
    of y; equals the densified matrix-vector product up to roundoff.
    """
    n1, n2 = sketch.spec.n1, sketch.spec.n2
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n1 * n2,):
        raise ValueError(f"expected vector of length {n1 * n2}, got shape {y.shape}")
    Y = y.reshape(n1, n2)
    return sketch.scale * ((sketch.eta @ Y) * sketch.xi).sum(axis=1)


def apply_kron_column(sketch: TensorSketch, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """S @ kron(f, g) in O(m*(n1+n2)) using the distributive property.

    Component k is ``scale * (eta_k @ f) * (xi_k @ g)``.
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != (sketch.spec.n1,) or g.shape != (sketch.spec.n2,):
        raise ValueError(
            f"expected factors of lengths ({sketch.spec.n1}, {sketch.spec.n2}), "
            f"got shapes {f.shape}, {g.shape}"
        )
    return sketch.scale * (sketch.eta @ f) * (sketch.xi @ g)


def sketch_matrix(
    sketch: TensorSketch,
    A: np.ndarray,
    kron_factors: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """S @ A, column by column.

    When ``kron_factors = (F, G)`` is supplied (column j of A equals
    kron(F[:, j], G[:, j])), the fast per-column path is used and the cost
    drops from O(m*n1*n2) to O(m*(n1+n2)) per column.
    """
    n1, n2 = sketch.spec.n1, sketch.spec.n2
    m = sketch.spec.m
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != n1 * n2:
        raise ValueError(f"expected matrix with {n1 * n2} rows, got shape {A.shape}")
    p = A.shape[1]
    if p == 0:
        return np.zeros((m, 0))
    if kron_factors is not None:
        F, G = kron_factors
        F = np.asarray(F, dtype=np.float64)
        G = np.asarray(G, dtype=np.float64)
        if F.shape != (n1, p) or G.shape != (n2, p):
            raise ValueError("kron factor shapes do not match the matrix")
        return sketch.scale * ((sketch.eta @ F) * (sketch.xi @ G))
    T = (sketch.eta @ A.reshape(n1, n2 * p)).reshape(m, n2, p)
    return sketch.scale * (T * sketch.xi[:, :, None]).sum(axis=1)


def densify(sketch: TensorSketch, max_entries: int = DENSIFY_MAX_ENTRIES) -> np.ndarray:
    """Materialize S as a dense m x (n1*n2) matrix (test oracle only).

    Guarded: raises :class:`ResourceLimitError` when m*n1*n2 exceeds
    ``max_entries``.
    """
    m, n1, n2 = sketch.spec.m, sketch.spec.n1, sketch.spec.n2
    total = m * n1 * n2
    if total > max_entries:
        raise ResourceLimitError(
            f"densify would materialize {total} entries (budget {max_entries})"
        )
    rows = sketch.eta[:, :, None] * sketch.xi[:, None, :]
    return sketch.scale * rows.reshape(m, n1 * n2)


def max_xi_inf_norm(sketch: TensorSketch) -> float:
    """Realized M = max_k ||xi_k||_inf over the sampled rows."""
    if sketch.xi.size == 0:
        return 0.0
    return float(np.abs(sketch.xi).max())


def save_sketch(sketch: TensorSketch, path: str) -> None:
    """Binary dump for cross-language verification.

    Layout: magic ``TSK1``, then little-endian uint32 m, n1, n2 and
    float64 q, then eta and xi as row-major little-endian float64.
    """
    spec = sketch.spec
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, spec.m, spec.n1, spec.n2, spec.q))
        fh.write(np.ascontiguousarray(sketch.eta, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(sketch.xi, dtype="<f8").tobytes())


def load_sketch_arrays(path: str) -> tuple[int, int, int, float, np.ndarray, np.ndarray]:
    """Read a :func:`save_sketch` dump back as (m, n1, n2, q, eta, xi)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, m, n1, n2, q = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise ValueError(f"not a sketch dump (bad magic {magic!r})")
        eta = np.frombuffer(fh.read(8 * m * n1), dtype="<f8").reshape(m, n1)
        xi = np.frombuffer(fh.read(8 * m * n2), dtype="<f8").reshape(m, n2)
    return m, n1, n2, q, eta.astype(np.float64), xi.astype(np.float64)
