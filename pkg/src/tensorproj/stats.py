"""Distortion theory and Monte-Carlo estimators for projection maps.

The central closed form: for a rank-one-structured projection with N factor
matrices of i.i.d. unit-variance entries whose fourth moments are
``m_1, ..., m_N``, averaged over T independent replicates and scaled to be an
expected isometry, the squared norm of the image of a fixed ``x`` satisfies

    E ||f(x)||^2   = ||x||^2
    Var ||f(x)||^2 = (prod(m_i) - 3) / (T*k) * ||x||_4^4  +  2/k * ||x||_2^4.

For one dense Gaussian factor (N=1, m=3) the first term vanishes and the
variance is exactly ``2/k * ||x||_2^4``.  The formula is exact whenever
N = 1, and for any N when x is supported on a single coordinate.  For
N >= 2 and spread-out x it is only a lower bound: distinct entries of a
Khatri-Rao column reuse the same factor entries, and the resulting
fourth-order cross terms (nonnegative, growing with the per-mode row and
column energies of x) are not part of the expression.  The test suite
carries a small exact enumeration of those terms; the estimators below
measure them empirically.  ``squared_norm_samples`` is a vectorized sampler that
draws the same law as building maps one by one but batches the factor draws,
which is what makes million-trial grids affordable.

Estimator accumulation uses pairwise moment merging (Chan et al.), so chunked
or parallel reductions give the same stable results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import EntryDistribution, SeedSpec, _sample_array, per_factor

Projection = Callable[[np.ndarray], np.ndarray]
MapFactory = Callable[[int], Projection]


@dataclass
class MomentAccumulator:
    """Running count/mean/M2 with order-stable parallel merging."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return
        batch_mean = float(values.mean())
        batch_m2 = float(np.sum((values - batch_mean) ** 2))
        self._merge(values.size, batch_mean, batch_m2)

    def merge(self, other: "MomentAccumulator") -> None:
        self._merge(other.count, other.mean, other.m2)

    def _merge(self, n_b: int, mean_b: float, m2_b: float) -> None:
        if n_b == 0:
            return
        n_a = self.count
        n = n_a + n_b
        delta = mean_b - self.mean
        self.mean += delta * n_b / n
        self.m2 += m2_b + delta * delta * n_a * n_b / n
        self.count = n

    def variance(self, ddof: int = 1) -> float:
        if self.count <= ddof:
            return 0.0
        return self.m2 / (self.count - ddof)


@dataclass(frozen=True)
class IsometryStats:
    """Summary of ||f(x)||^2 over independent map draws for one fixed x."""

    mean_sq_norm_ratio: float
    var_sq_norm: float
    trials: int
    std_error_mean: float
    degenerate: bool = False


@dataclass(frozen=True)
class DistortionReport:
    avg_ratio: float
    std_ratio: float
    ratios: np.ndarray
    skipped_pairs: int


@dataclass(frozen=True)
class CosineRmse:
    mean_rmse: float
    std_error: float
    per_rep: np.ndarray


def theoretical_variance(
    x: np.ndarray,
    fourth_moments: float | Sequence[float],
    k: int,
    T: int = 1,
) -> float:
    """Reference Var ||f(x)||^2 for given per-factor fourth moments.

    Exact for a single factor and for x on a single coordinate axis; for
    several factors and dense x see the module docstring, the true variance
    is larger.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    if np.isscalar(fourth_moments):
        moments = [float(fourth_moments)]
    else:
        moments = [float(m) for m in fourth_moments]
    if not moments:
        raise ValueError("need at least one factor fourth moment")
    if any(m < 1.0 for m in moments):
        # E[a^4] >= (E[a^2])^2 = 1 for any unit-variance entry distribution.
        raise ValueError(f"fourth moments below 1 are impossible: {moments}")
    x = np.asarray(x, dtype=float).ravel()
    norm4_4 = float(np.sum(x**4))
    norm2_4 = float(np.sum(x**2)) ** 2
    return (math.prod(moments) - 3.0) / (T * k) * norm4_4 + 2.0 / k * norm2_4


def _stats_from_samples(w: np.ndarray, x_sq_norm: float) -> IsometryStats:
    acc = MomentAccumulator()
    # Merge in fixed-size blocks so huge runs accumulate the same way a
    # parallel reduction would.
    for start in range(0, w.size, 65536):
        acc.add(w[start : start + 65536])
    if x_sq_norm == 0.0:
        return IsometryStats(
            mean_sq_norm_ratio=math.nan,
            var_sq_norm=acc.variance(),
            trials=int(w.size),
            std_error_mean=math.nan,
            degenerate=True,
        )
    std_w = math.sqrt(acc.variance())
    return IsometryStats(
        mean_sq_norm_ratio=acc.mean / x_sq_norm,
        var_sq_norm=acc.variance(),
        trials=int(w.size),
        std_error_mean=std_w / (x_sq_norm * math.sqrt(w.size)),
        degenerate=False,
    )


def empirical_isometry(
    map_factory: MapFactory, x: np.ndarray, trials: int
) -> IsometryStats:
    """Draw ``trials`` independent maps and summarize ||f(x)||^2.

    ``map_factory(i)`` must return the i-th independent map.  A zero input is
    legal but flagged: every projection of it is zero, so the ratio to
    ||x||^2 is undefined.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials for a variance, got {trials}")
    x = np.asarray(x, dtype=float).ravel()
    w = np.empty(trials)
    for i in range(trials):
        y = map_factory(i)(x)
        w[i] = float(y @ y)
    return _stats_from_samples(w, float(x @ x))


def _contract_all(x: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Unscaled contractions z[m, j] = sum_r prod_n F_n[m, r_n, j] * x[r].

    ``factors[n]`` has shape ``(m, d_n, k)``: one factor matrix per draw m.
    Matches applying each materialized Khatri-Rao map to x, without the
    1/sqrt(k) scale.
    """
    d_last = factors[-1].shape[1]
    t = np.einsum("pq,mqj->mpj", x.reshape(-1, d_last), factors[-1])
    for f in factors[-2::-1]:
        d_i = f.shape[1]
        m, p, k = t.shape
        t = t.reshape(m, p // d_i, d_i, k)
        t = np.einsum("mpij,mij->mpj", t, f)
    return t[:, 0, :]


def _default_chunk(dims: Sequence[int], k: int, T: int) -> int:
    per_trial = T * k * (sum(dims) + math.prod(dims) // dims[-1] + 1)
    return max(64, min(65536, 8_000_000 // max(per_trial, 1)))


def squared_norm_samples(
    dims: Sequence[int],
    k: int,
    dist: EntryDistribution | Sequence[EntryDistribution],
    x: np.ndarray,
    trials: int,
    seed: SeedSpec,
    T: int = 1,
    chunk: int | None = None,
) -> np.ndarray:
    """``trials`` draws of ||f(x)||^2 under independent T-replicate maps.

    Distributionally identical to ``build_ensemble(...)`` followed by
    ``apply`` in a loop, but draws whole chunks of factor matrices at once.
    Chunk c consumes the seed's child stream c, so results do not depend on
    chunk scheduling (they do depend on the chunk size).
    """
    dims = tuple(int(d) for d in dims)
    dists = per_factor(dist, len(dims))
    x = np.asarray(x, dtype=float).ravel()
    if x.size != math.prod(dims):
        raise ValueError(f"x has {x.size} entries, dims {dims} need {math.prod(dims)}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    if chunk is None:
        chunk = _default_chunk(dims, k, T)
    out = np.empty(trials)
    start = 0
    chunk_index = 0
    while start < trials:
        n_trials = min(chunk, trials - start)
        rng = seed.child(chunk_index).generator()
        m = n_trials * T
        factors = [_sample_array(dists[i], (m, dims[i], k), rng) for i in range(len(dims))]
        z = _contract_all(x, factors)
        s = z.reshape(n_trials, T, k).sum(axis=1)
        out[start : start + n_trials] = np.einsum("ij,ij->i", s, s) / (T * k)
        start += n_trials
        chunk_index += 1
    return out


def isometry_stats(
    dims: Sequence[int],
    k: int,
    dist: EntryDistribution | Sequence[EntryDistribution],
    x: np.ndarray,
    trials: int,
    seed: SeedSpec,
    T: int = 1,
) -> IsometryStats:
    """Vectorized counterpart of :func:`empirical_isometry` for structured maps."""
    if trials < 2:
        raise ValueError(f"need at least 2 trials for a variance, got {trials}")
    x = np.asarray(x, dtype=float).ravel()
    w = squared_norm_samples(dims, k, dist, x, trials, seed, T=T)
    return _stats_from_samples(w, float(x @ x))


def pairwise_distance_ratio(points: np.ndarray, project: Projection) -> DistortionReport:
    """Distance distortion ||f(x_i) - f(x_j)|| / ||x_i - x_j|| over point pairs.

    Averages over unordered pairs i < j, which equals the average over
    ordered pairs since the ratio is symmetric.  Exact duplicate points give
    an undefined ratio; such pairs are skipped and counted.  ``project`` must
    accept a batch of row vectors.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two point rows")
    proj = np.asarray(project(pts), dtype=float)
    n = pts.shape[0]
    ratios = []
    skipped = 0
    for i in range(n):
        for j in range(i + 1, n):
            den = float(np.linalg.norm(pts[i] - pts[j]))
            if den == 0.0:
                skipped += 1
                continue
            num = float(np.linalg.norm(proj[i] - proj[j]))
            ratios.append(num / den)
    if not ratios:
        raise ValueError("all point pairs are exact duplicates")
    arr = np.asarray(ratios)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return DistortionReport(float(arr.mean()), std, arr, skipped)


def _cosine_matrix(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("cosine similarity undefined for zero-norm points")
    unit = rows / norms[:, None]
    return unit @ unit.T


def cosine_similarity_rmse(
    points: np.ndarray, map_factory: MapFactory, replications: int
) -> CosineRmse:
    """RMSE between projected and original pairwise cosine similarities.

    Each replication draws a fresh map via ``map_factory(rep)`` and computes
    the root-mean-square error over all point pairs; reported is the mean
    across replications with its standard error.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two point rows")
    if replications < 1:
        raise ValueError(f"replications must be positive, got {replications}")
    iu = np.triu_indices(pts.shape[0], k=1)
    true_cos = _cosine_matrix(pts)[iu]
    per_rep = np.empty(replications)
    for rep in range(replications):
        proj = np.asarray(map_factory(rep)(pts), dtype=float)
        est_cos = _cosine_matrix(proj)[iu]
        per_rep[rep] = math.sqrt(float(np.mean((est_cos - true_cos) ** 2)))
    if replications > 1:
        se = float(per_rep.std(ddof=1)) / math.sqrt(replications)
    else:
        se = 0.0
    return CosineRmse(float(per_rep.mean()), se, per_rep)


def tail_exceedance(
    map_factory: MapFactory, x: np.ndarray, eps: float, trials: int
) -> float:
    """Fraction of draws with | ||f(x)||^2 - ||x||^2 | >= eps * ||x||^2."""
    if eps < 0.0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    x = np.asarray(x, dtype=float).ravel()
    x_sq = float(x @ x)
    if x_sq == 0.0:
        raise ValueError("tail exceedance undefined for x = 0")
    hits = 0
    for i in range(trials):
        y = map_factory(i)(x)
        if abs(float(y @ y) - x_sq) >= eps * x_sq:
            hits += 1
    return hits / trials


def polarization_check(project: Projection, x: np.ndarray, y: np.ndarray) -> float:
    """Defect of the polarization identity under the projection.

    Returns |4 <f(x), f(y)> - (||f(x+y)||^2 - ||f(x-y)||^2)|, which is zero in
    exact arithmetic for any linear map and stays at rounding level for a
    correct implementation.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    fx = project(x)
    fy = project(y)
    fsum = project(x + y)
    fdiff = project(x - y)
    lhs = 4.0 * float(fx @ fy)
    rhs = float(fsum @ fsum) - float(fdiff @ fdiff)
    return abs(lhs - rhs)
