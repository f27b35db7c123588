"""Dense linear algebra helpers and the package-wide index convention.

Everything here operates on plain numpy arrays (row-major).  An order-N
tensor with dimensions ``(d_1, ..., d_N)`` is identified with a vector of
length ``prod(d_i)`` by letting the *last* mode vary fastest: the 1-based
multi-index ``(r_1, ..., r_N)`` sits at linear position

    1 + sum_n (r_n - 1) * s_n,   s_n = prod_{m > n} d_m.

This is exactly numpy's C ordering, so ``x.reshape(dims)`` and
``tensor.ravel()`` agree with :func:`multi_index_to_linear`.  Kronecker
products (:func:`kron_vec`), the rows of :func:`khatri_rao` and mode
unfoldings all follow this one convention; mixing conventions is the classic
source of silent transposition bugs in tensor code, so keep it in one place.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

# A column of M is treated as numerically zero (rank-deficient) when the
# corresponding |R[i, i]| falls below this multiple of ||M||_F.
RANK_TOL = 1e-12


def khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product of two matrices with equal column count.

    For ``a`` of shape ``(I, K)`` and ``b`` of shape ``(J, K)`` the result has
    shape ``(I*J, K)`` and entries ``out[(i-1)*J + (j-1), c] = a[i-1, c] * b[j-1, c]``
    (1-based row indices), i.e. column ``c`` is ``kron(a[:, c], b[:, c])``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("khatri_rao expects two matrices")
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"column count mismatch: {a.shape[1]} != {b.shape[1]}"
        )
    out = a[:, None, :] * b[None, :, :]
    return out.reshape(a.shape[0] * b.shape[0], a.shape[1])


def kron_vec(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product v_1 (x) v_2 (x) ... (x) v_N of 1-D arrays.

    The first vector varies slowest, consistent with
    :func:`multi_index_to_linear`.
    """
    if len(vectors) == 0:
        raise ValueError("kron_vec needs at least one vector")
    out = np.asarray(vectors[0], dtype=float).ravel()
    for v in vectors[1:]:
        out = np.kron(out, np.asarray(v, dtype=float).ravel())
    return out


def multi_index_to_linear(index: Sequence[int], dims: Sequence[int]) -> int:
    """Map a 1-based multi-index to its 1-based linear position."""
    if len(index) != len(dims):
        raise ValueError(f"index length {len(index)} != order {len(dims)}")
    pos = 0
    for r, d in zip(index, dims):
        if not 1 <= r <= d:
            raise IndexError(f"index component {r} out of range 1..{d}")
        pos = pos * d + (r - 1)
    return pos + 1


def linear_to_multi_index(position: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`multi_index_to_linear` (both ends 1-based)."""
    total = math.prod(dims)
    if not 1 <= position <= total:
        raise IndexError(f"linear position {position} out of range 1..{total}")
    rem = position - 1
    out = []
    for d in reversed(dims):
        rem, r = divmod(rem, d)
        out.append(r + 1)
    return tuple(reversed(out))


def mode_n_unfold(tensor: np.ndarray, mode: int) -> np.ndarray:
    """Unfold a tensor along ``mode`` (1-based) into a ``d_mode x rest`` matrix.

    Row ``i`` collects all entries whose mode-``mode`` index equals ``i``;
    columns are ordered by the multi-index of the remaining modes in
    ascending mode order (last remaining mode fastest).
    """
    tensor = np.asarray(tensor, dtype=float)
    if not 1 <= mode <= tensor.ndim:
        raise IndexError(f"mode {mode} out of range 1..{tensor.ndim}")
    moved = np.moveaxis(tensor, mode - 1, 0)
    return moved.reshape(tensor.shape[mode - 1], -1)


class QrFactor(NamedTuple):
    q: np.ndarray
    r: np.ndarray
    effective_rank: int


def qr_factor(mat: np.ndarray, rank_tol: float = RANK_TOL) -> QrFactor:
    """Reduced Householder QR plus an effective-rank estimate.

    ``effective_rank`` counts diagonal entries of R with magnitude at least
    ``rank_tol * ||mat||_F``.  Rank deficiency is reported, never raised;
    callers decide what a short basis means for them.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2:
        raise ValueError("qr_factor expects a matrix")
    m, k = mat.shape
    if m < k:
        raise ValueError(f"need at least as many rows as columns, got {m} x {k}")
    q, r = np.linalg.qr(mat, mode="reduced")
    scale = np.linalg.norm(mat)
    if scale == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(np.abs(np.diag(r)) >= rank_tol * scale))
    return QrFactor(q, r, rank)


def qr_orthonormal(mat: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the column space of ``mat`` (the Q of reduced QR)."""
    return qr_factor(mat).q
