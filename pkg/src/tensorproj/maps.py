"""Random projection maps with Khatri-Rao structure.

A tensor random projection (TRP) for input dimensions ``(d_1, ..., d_N)``
keeps one factor matrix ``A_i`` of shape ``(d_i, k)`` per mode and acts on a
vector ``x`` of length ``d = prod(d_i)`` as

    f(x) = (A_1 (.) A_2 (.) ... (.) A_N)^T x / sqrt(k)

where ``(.)`` is the column-wise Khatri-Rao product.  The matrix is never
formed: :meth:`TensorRandomProjection.apply` contracts the reshaped input one
mode at a time, which costs ``O(k * d)`` scalar multiplies and peaks at
``O(k * d / d_N)`` extra memory.  Storage drops from ``k * d`` for a dense
map to ``k * sum(d_i)``.

``TrpEnsemble`` averages T independent TRPs with a ``1/sqrt(T)`` scale so the
map stays an expected isometry while the fourth-moment part of the squared
norm variance shrinks by ``1/T``.  ``ConventionalRp`` is the unstructured
dense baseline (structurally the N=1 special case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import EntryDistribution, SeedSpec, per_factor, sample_matrix
from .linalg import khatri_rao

# Default ceiling on d * k when materializing an explicit projection matrix.
MATERIALIZE_CAP = 10_000_000

MAP_KINDS = ("rp", "trp", "trp_t")


def _as_batch(x: np.ndarray, d: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != d:
        raise ValueError(f"input has {x.shape[-1]} entries, map expects {d}")
    return x, single


@dataclass(frozen=True, eq=False)
class TensorRandomProjection:
    """Khatri-Rao structured projection from ``prod(dims)`` down to ``k``."""

    factors: tuple[np.ndarray, ...]
    dists: tuple[EntryDistribution, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a projection needs at least one factor")
        if len(self.factors) != len(self.dists):
            raise ValueError("one entry distribution per factor is required")
        k = self.factors[0].shape[1]
        for f in self.factors:
            if f.ndim != 2 or f.shape[1] != k:
                raise ValueError("factors must share the same column count")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    @property
    def k(self) -> int:
        return self.factors[0].shape[1]

    @property
    def d(self) -> int:
        return math.prod(self.dims)

    @property
    def order(self) -> int:
        return len(self.factors)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Project ``x`` (a vector of length d, or a batch of shape (n, d)).

        When every factor is sparse-sign the contraction runs over the
        nonzero support only: entries of ``x`` are added or subtracted
        according to accumulated signs and a single scale
        ``prod(1/sqrt(delta_i)) / sqrt(k)`` is applied at the end.
        """
        xs, single = _as_batch(x, self.d)
        if all(dist.kind == "sparse_sign" for dist in self.dists):
            y = self._apply_sparse(xs)
        else:
            y = self._apply_dense(xs)
        return y[0] if single else y

    __call__ = apply

    def _apply_dense(self, xs: np.ndarray) -> np.ndarray:
        n = xs.shape[0]
        k = self.k
        t = xs.reshape(n, -1, self.dims[-1]) @ self.factors[-1]
        for f in self.factors[-2::-1]:
            d_i = f.shape[0]
            t = t.reshape(n, -1, d_i, k)
            t = np.einsum("npij,ij->npj", t, f)
        return t[:, 0, :] / math.sqrt(k)

    def _apply_sparse(self, xs: np.ndarray) -> np.ndarray:
        n = xs.shape[0]
        y = np.zeros((n, self.k))
        for j in range(self.k):
            lin = None
            sgn = None
            for f in self.factors:
                idx = np.nonzero(f[:, j])[0]
                s = np.sign(f[idx, j])
                if lin is None:
                    lin, sgn = idx, s
                else:
                    lin = (lin[:, None] * f.shape[0] + idx[None, :]).ravel()
                    sgn = (sgn[:, None] * s[None, :]).ravel()
            if lin is None or lin.size == 0:
                continue
            pos = xs[:, lin[sgn > 0]]
            neg = xs[:, lin[sgn < 0]]
            y[:, j] = pos.sum(axis=1) - neg.sum(axis=1)
        scale = math.prod(1.0 / math.sqrt(d.delta) for d in self.dists)
        return y * (scale / math.sqrt(self.k))

    def materialize(self, cap: int = MATERIALIZE_CAP) -> np.ndarray:
        """Explicit ``d x k`` Khatri-Rao product of the factors, unscaled.

        Intended as a test oracle and for small sketches; refuses to allocate
        more than ``cap`` entries.
        """
        if self.d * self.k > cap:
            raise ValueError(
                f"materializing {self.d} x {self.k} exceeds cap={cap}; "
                "raise cap explicitly if this is intentional"
            )
        out = self.factors[0]
        for f in self.factors[1:]:
            out = khatri_rao(out, f)
        return out

    def storage_count(self) -> int:
        """Stored scalars: k * sum(d_i)."""
        return self.k * sum(self.dims)

    def expected_sparsity(self) -> float:
        """Expected fraction of nonzero entries of the materialized map.

        Product of the per-factor nonzero probabilities; Gaussian factors
        contribute 1 (they are never zero).
        """
        return math.prod(d.delta for d in self.dists)


@dataclass(frozen=True, eq=False)
class TrpEnsemble:
    """Average of T independent TRPs, scaled by 1/sqrt(T)."""

    replicates: tuple[TensorRandomProjection, ...]

    def __post_init__(self) -> None:
        if not self.replicates:
            raise ValueError("an ensemble needs at least one replicate")
        dims = self.replicates[0].dims
        k = self.replicates[0].k
        for rep in self.replicates[1:]:
            if rep.dims != dims or rep.k != k:
                raise ValueError("replicates must share dims and k")

    @property
    def T(self) -> int:
        return len(self.replicates)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.replicates[0].dims

    @property
    def k(self) -> int:
        return self.replicates[0].k

    @property
    def d(self) -> int:
        return self.replicates[0].d

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = self.replicates[0].apply(x)
        for rep in self.replicates[1:]:
            out = out + rep.apply(x)
        return out / math.sqrt(self.T)

    __call__ = apply

    def storage_count(self) -> int:
        return sum(rep.storage_count() for rep in self.replicates)


@dataclass(frozen=True, eq=False)
class ConventionalRp:
    """Dense unstructured random projection, the baseline to beat on storage."""

    matrix: np.ndarray
    dist: EntryDistribution

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2:
            raise ValueError("projection matrix must be 2-D")

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        xs, single = _as_batch(x, self.d)
        y = (xs @ self.matrix) / math.sqrt(self.k)
        return y[0] if single else y

    __call__ = apply

    def storage_count(self) -> int:
        return self.d * self.k

    def expected_sparsity(self) -> float:
        return self.dist.delta


def build_trp(
    dims: Sequence[int],
    k: int,
    dist: EntryDistribution | Sequence[EntryDistribution],
    seed: SeedSpec,
) -> TensorRandomProjection:
    """Sample a TRP; factor ``i`` draws from the seed's child stream ``i``."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"dims must be positive, got {dims}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    dists = per_factor(dist, len(dims))
    factors = tuple(
        sample_matrix(dists[i], dims[i], k, seed.child(i))
        for i in range(len(dims))
    )
    return TensorRandomProjection(factors, dists)


def build_ensemble(
    dims: Sequence[int],
    k: int,
    dist: EntryDistribution | Sequence[EntryDistribution],
    T: int,
    seed: SeedSpec,
) -> TrpEnsemble:
    """Sample T independent TRPs; replicate ``t`` uses the seed's child ``t``.

    Replicates never share factors.
    """
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    reps = tuple(build_trp(dims, k, dist, seed.child(t)) for t in range(T))
    return TrpEnsemble(reps)


def build_conventional(
    d: int, k: int, dist: EntryDistribution, seed: SeedSpec
) -> ConventionalRp:
    if d < 1 or k < 1:
        raise ValueError(f"shape must be positive, got {d} x {k}")
    return ConventionalRp(sample_matrix(dist, d, k, seed), dist)


ProjectionMap = TensorRandomProjection | TrpEnsemble | ConventionalRp


def make_factory(
    kind: str,
    dims: Sequence[int],
    k: int,
    dist: EntryDistribution | Sequence[EntryDistribution],
    T: int,
    seed: SeedSpec,
) -> Callable[[int], ProjectionMap]:
    """Indexed family of independent maps of one kind, for replicated runs.

    ``factory(i)`` builds the i-th map from the seed's child stream ``i``;
    kinds are ``"rp"`` (dense on the flattened input), ``"trp"`` and
    ``"trp_t"`` (ensemble of T replicates).
    """
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    if kind == "rp":
        if not isinstance(dist, EntryDistribution):
            raise ValueError("a dense projection takes a single distribution")
        return lambda i: build_conventional(d, k, dist, seed.child(i))
    if kind == "trp":
        return lambda i: build_trp(dims, k, dist, seed.child(i))
    if kind == "trp_t":
        return lambda i: build_ensemble(dims, k, dist, T, seed.child(i))
    raise ValueError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")
