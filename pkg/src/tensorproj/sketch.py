"""Randomized low-rank approximation driven by structured projections.

The range-finder recipe: sketch ``Z = X @ Omega`` (here, apply the projection
map to each row of ``X``), orthonormalize ``Q = qr(Z)``, and return the
projected approximation ``Q Q^T X``.  Averaging the approximations of T
independent sketches trades a factor T of work for a variance reduction that
matches the T-replicate projection ensembles.

Synthetic targets come from a random Tucker model: an order-N core with
uniform entries, orthonormal arm matrices, and white noise calibrated to 1%
of the signal energy per entry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import EntryDistribution, SeedSpec
from .linalg import qr_factor
from .maps import build_trp
from .stats import Projection

NOISE_ENERGY_FRACTION = 0.01


class RankDeficiencyWarning(UserWarning):
    """The sketch had fewer independent directions than requested."""


@dataclass(frozen=True)
class SketchConfig:
    """Parameters for an averaged structured sketch."""

    dims: tuple[int, ...]
    k: int
    T: int
    dist: EntryDistribution | tuple[EntryDistribution, ...]
    seed: SeedSpec

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.T < 1:
            raise ValueError(f"T must be positive, got {self.T}")


def low_rank_approx(x: np.ndarray, omega: Projection) -> np.ndarray:
    """Rank-<=k approximation Q Q^T X from one sketch Z = omega(rows of X).

    A rank-deficient sketch is not an error: the computation proceeds with
    the directions that exist and a :class:`RankDeficiencyWarning` reports
    the effective rank.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("low_rank_approx expects a matrix")
    z = np.asarray(omega(x), dtype=float)
    if z.shape[0] != x.shape[0]:
        raise ValueError("sketch must keep one row per input row")
    if z.shape[1] > x.shape[0]:
        raise ValueError(
            f"sketch size {z.shape[1]} exceeds row count {x.shape[0]}"
        )
    q, _, rank = qr_factor(z)
    if rank < z.shape[1]:
        warnings.warn(
            f"sketch has effective rank {rank} < {z.shape[1]}",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return q @ (q.T @ x)


def averaged_low_rank_approx(x: np.ndarray, cfg: SketchConfig) -> np.ndarray:
    """Mean of T independent sketched approximations (plain 1/T average).

    Replicate t draws its projection from the seed's child stream t, and each
    projection draws factor i from its own child stream i, so all factor
    matrices across replicates are independent.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("averaged_low_rank_approx expects a matrix")
    if math.prod(cfg.dims) != x.shape[1]:
        raise ValueError(
            f"config dims {cfg.dims} do not factor the column count {x.shape[1]}"
        )
    acc = np.zeros_like(x)
    for t in range(cfg.T):
        omega = build_trp(cfg.dims, cfg.k, cfg.dist, cfg.seed.child(t))
        acc += low_rank_approx(x, omega)
    return acc / cfg.T


def multi_mode_product(core: np.ndarray, arms: Sequence[np.ndarray]) -> np.ndarray:
    """Multiply ``core`` by one matrix per mode (mode-n products)."""
    if core.ndim != len(arms):
        raise ValueError(f"core has {core.ndim} modes but {len(arms)} arms given")
    out = np.asarray(core, dtype=float)
    for axis, arm in enumerate(arms):
        out = np.moveaxis(np.tensordot(arm, out, axes=(1, axis)), 0, axis)
    return out


def tucker_synthetic(
    side: int,
    order: int,
    core_rank: int,
    seed: SeedSpec,
    core_override: np.ndarray | None = None,
    noise_fraction: float = NOISE_ENERGY_FRACTION,
) -> np.ndarray:
    """Noisy random Tucker tensor of shape ``(side,) * order``.

    Core entries are Uniform[0, 1), arms are orthonormal ``side x core_rank``
    bases of Gaussian draws, and i.i.d. Gaussian noise is added with scale
    ``sqrt(noise_fraction * ||signal||_F^2 / side**order)`` so the noise
    carries about ``noise_fraction`` of the signal energy (1% by default).
    ``core_override`` substitutes a fixed core (same shape) regardless of the
    seed, which is how tests pin degenerate cases like an all-zero core.
    ``noise_fraction=0`` gives the exact low-rank signal; the core and arms
    only consume their own child streams, so the noiseless tensor is the
    same one the noisy draw perturbs.
    """
    if side < 1:
        raise ValueError(f"side must be positive, got {side}")
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    if not 1 <= core_rank <= side:
        raise ValueError(
            f"core rank must lie in 1..{side} (the side length), got {core_rank}"
        )
    if noise_fraction < 0.0:
        raise ValueError(f"noise fraction must be non-negative, got {noise_fraction}")
    core_shape = (core_rank,) * order
    if core_override is not None:
        core = np.asarray(core_override, dtype=float)
        if core.shape != core_shape:
            raise ValueError(f"core override must have shape {core_shape}")
    else:
        core = seed.child(0).generator().random(core_shape)
    arms = []
    for n in range(order):
        g = seed.child(1 + n).generator().standard_normal((side, core_rank))
        arms.append(qr_factor(g).q)
    signal = multi_mode_product(core, arms)
    scale = math.sqrt(
        noise_fraction * float(np.sum(signal**2)) / side**order
    )
    if scale == 0.0:
        return signal
    noise = seed.child(1 + order).generator().standard_normal(signal.shape)
    return signal + scale * noise


def relative_error(x: np.ndarray, x_hat: np.ndarray) -> float:
    """Frobenius-norm relative error ||X - Xhat||_F / ||X||_F."""
    x = np.asarray(x, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x.shape != x_hat.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x_hat.shape}")
    denom = float(np.linalg.norm(x))
    if denom == 0.0:
        raise ValueError("relative error undefined for a zero reference")
    return float(np.linalg.norm(x - x_hat)) / denom
