"""Seeded generators for the benchmark regression and recovery families.

Three regression families share one SVD-based pipeline A = U diag(s) V^T
with U, V the Q factors of QR decompositions of standard Gaussian
matrices; they differ only in the singular spectrum.  The right-hand side
is b = A x_ref + noise with x_ref ~ N(1, 0.25 I) and noise ~ N(0, 1e-2 I),
so the optimal residual is strictly positive almost surely.

Conventions (documented, not prescribed by the construction):
  - N(mu, v) is read as mean mu, variance v.
  - A well-conditioned singular draw that lands <= 0 (probability ~3e-7
    per draw) is replaced by its absolute value.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .seeds import child, generator

KINDS = ("well", "ill", "structured", "sparse")

_MAGIC = b"PRB1"
_HEADER = struct.Struct("<4sIIIIII")
_KIND_CODES = {"well": 0, "ill": 1, "structured": 2, "sparse": 3}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}

# Sub-stream keys inside one instance seed.
_S_U, _S_V, _S_SIGMA, _S_XREF, _S_NOISE = 0, 1, 2, 3, 4
_S_F, _S_G = 5, 6
_S_SUPPORT, _S_VALUES = 7, 8


@dataclass(frozen=True)
class ProblemInstance:
    """One least-squares instance with its generation metadata.

    ``kron_factors`` is present iff the instance is structured (column j
    of A equals kron(F[:, j], G[:, j])); ``sparse_truth`` is present iff
    the instance is a sparse-recovery one and holds (x_bar, s).
    """

    A: np.ndarray
    b: np.ndarray
    n1: int
    n2: int
    p: int
    kind: str
    x_ref: np.ndarray
    kron_factors: tuple[np.ndarray, np.ndarray] | None = None
    sparse_truth: tuple[np.ndarray, int] | None = None


def _orthonormal(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Q factor (rows x cols) of the QR decomposition of a Gaussian matrix."""
    Q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return Q


def _assemble(n1: int, n2: int, p: int, sigma: np.ndarray, root) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = n1 * n2
    U = _orthonormal(n, p, generator(root, _S_U))
    V = _orthonormal(p, p, generator(root, _S_V))
    A = (U * sigma) @ V.T
    x_ref, b = _rhs(A, root)
    return A, b, x_ref


def _rhs(A: np.ndarray, root) -> tuple[np.ndarray, np.ndarray]:
    n, p = A.shape
    x_ref = 1.0 + 0.5 * generator(root, _S_XREF).standard_normal(p)
    noise = 0.1 * generator(root, _S_NOISE).standard_normal(n)
    return x_ref, A @ x_ref + noise


def _well_spectrum(p: int, rng: np.random.Generator) -> np.ndarray:
    return np.abs(1.0 + 0.2 * rng.standard_normal(p))


def gen_well_conditioned(n1: int, n2: int, p: int, seed: int) -> ProblemInstance:
    """Small condition number: singular values from N(1, 0.04)."""
    if not 1 <= p <= n1 * n2:
        raise ValueError(f"need 1 <= p <= n1*n2, got p={p}, n1*n2={n1 * n2}")
    root = child(seed)
    sigma = _well_spectrum(p, generator(root, _S_SIGMA))
    A, b, x_ref = _assemble(n1, n2, p, sigma, root)
    return ProblemInstance(A=A, b=b, n1=n1, n2=n2, p=p, kind="well", x_ref=x_ref)


def gen_ill_conditioned(n1: int, n2: int, p: int, seed: int) -> ProblemInstance:
    """Condition number 1e4: sigma_j = 10^(-4 (j-1)/(p-1)), j = 1..p."""
    if p < 2:
        raise ValueError("ill-conditioned spectrum needs p >= 2")
    if p > n1 * n2:
        raise ValueError(f"need p <= n1*n2, got p={p}, n1*n2={n1 * n2}")
    root = child(seed)
    j = np.arange(p, dtype=np.float64)
    sigma = 10.0 ** (-4.0 * j / (p - 1))
    A, b, x_ref = _assemble(n1, n2, p, sigma, root)
    return ProblemInstance(A=A, b=b, n1=n1, n2=n2, p=p, kind="ill", x_ref=x_ref)


def gen_structured(n1: int, n2: int, p: int, seed: int) -> ProblemInstance:
    """Columns with Kronecker structure: A[:, j] = kron(F[:, j], G[:, j]).

    Each factor matrix follows the well-conditioned recipe at its own
    size, so the generator needs n1 >= p and n2 >= p.
    """
    if not (n1 >= p >= 1 and n2 >= p):
        raise ValueError(f"structured generator needs n1, n2 >= p >= 1, got ({n1}, {n2}, {p})")
    root = child(seed)
    F = _factor_matrix(n1, p, child(root, _S_F))
    G = _factor_matrix(n2, p, child(root, _S_G))
    A = np.einsum("ij,kj->ikj", F, G).reshape(n1 * n2, p)
    x_ref, b = _rhs(A, root)
    return ProblemInstance(
        A=A, b=b, n1=n1, n2=n2, p=p, kind="structured", x_ref=x_ref, kron_factors=(F, G)
    )


def _factor_matrix(n: int, p: int, root) -> np.ndarray:
    U = _orthonormal(n, p, generator(root, _S_U))
    V = _orthonormal(p, p, generator(root, _S_V))
    sigma = _well_spectrum(p, generator(root, _S_SIGMA))
    return (U * sigma) @ V.T


def gen_sparse_recovery(p: int, s: int, seed: int, *, n1: int, n2: int) -> ProblemInstance:
    """Noiseless recovery target: A = I_p, b = x_bar with s nonzeros.

    The caller supplies the factorization p = n1*n2 used by the sketch.
    Support positions are uniform without replacement; values are N(0,1).
    """
    if n1 * n2 != p:
        raise ValueError(f"need n1*n2 == p, got {n1}*{n2} != {p}")
    if not 1 <= s <= p:
        raise ValueError(f"need 1 <= s <= p, got s={s}, p={p}")
    root = child(seed)
    support = generator(root, _S_SUPPORT).choice(p, size=s, replace=False)
    x_bar = np.zeros(p)
    x_bar[support] = generator(root, _S_VALUES).standard_normal(s)
    return ProblemInstance(
        A=np.eye(p),
        b=x_bar.copy(),
        n1=n1,
        n2=n2,
        p=p,
        kind="sparse",
        x_ref=x_bar.copy(),
        sparse_truth=(x_bar, s),
    )


def save_instance(instance: ProblemInstance, path: str) -> None:
    """Columnar binary dump (magic PRB1) for regression-test fixtures.

    Header: magic, kind code, n1, n2, p, flags (bit0 kron factors, bit1
    sparse truth), s -- all little-endian uint32.  Then float64 arrays in
    order: A (row-major), b, x_ref, then F and G if structured, then
    x_bar if sparse.
    """
    flags = (1 if instance.kron_factors is not None else 0) | (
        2 if instance.sparse_truth is not None else 0
    )
    s = instance.sparse_truth[1] if instance.sparse_truth is not None else 0
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                _MAGIC,
                _KIND_CODES[instance.kind],
                instance.n1,
                instance.n2,
                instance.p,
                flags,
                s,
            )
        )
        for arr in _instance_arrays(instance):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _instance_arrays(instance: ProblemInstance) -> list[np.ndarray]:
    arrays = [instance.A, instance.b, instance.x_ref]
    if instance.kron_factors is not None:
        arrays.extend(instance.kron_factors)
    if instance.sparse_truth is not None:
        arrays.append(instance.sparse_truth[0])
    return arrays


def load_instance(path: str) -> ProblemInstance:
    """Read a :func:`save_instance` dump back."""
    with open(path, "rb") as fh:
        magic, kind_code, n1, n2, p, flags, s = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC:
            raise ValueError(f"not an instance dump (bad magic {magic!r})")
        n = n1 * n2

        def read(count: int) -> np.ndarray:
            return np.frombuffer(fh.read(8 * count), dtype="<f8").astype(np.float64)

        A = read(n * p).reshape(n, p)
        b = read(n)
        x_ref = read(p)
        kron_factors = None
        if flags & 1:
            kron_factors = (read(n1 * p).reshape(n1, p), read(n2 * p).reshape(n2, p))
        sparse_truth = None
        if flags & 2:
            sparse_truth = (read(p), s)
    return ProblemInstance(
        A=A,
        b=b,
        n1=n1,
        n2=n2,
        p=p,
        kind=_KIND_NAMES[kind_code],
        x_ref=x_ref,
        kron_factors=kron_factors,
        sparse_truth=sparse_truth,
    )
