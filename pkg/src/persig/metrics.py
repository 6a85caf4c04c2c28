"""Signature comparison by summed angles and bottleneck distance between diagrams."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .signature import TopologicalSignature


class InfiniteBarMismatch(UserWarning):
    pass


def _as_vector(v) -> np.ndarray:
    return np.asarray(getattr(v, "entries", v), dtype=float)


def cosine(u, v) -> float:
    """Cosine of the angle between ``u`` and ``v``; 1 for two zero vectors, 0 for one."""
    a, b = _as_vector(u), _as_vector(v)
    if a.shape != b.shape:
        raise ValueError(f"vector length mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 1.0 if na == nb else 0.0
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def _positively_parallel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact row-wise test for ``b = c*a`` with ``c > 0`` on small integer-valued rows."""
    lim = 2.0 ** 26  # products stay exact in float64
    usable = np.ones(a.shape[:-1], bool)
    for x in (a, b):
        usable &= np.all((x == np.round(x)) & (np.abs(x) < lim), axis=-1)
    p = np.argmax(a != 0, axis=-1)[..., None]
    ap = np.take_along_axis(a, p, -1)
    bp = np.take_along_axis(b, p, -1)
    return usable & (ap * bp > 0)[..., 0] & np.all(a * bp == b * ap, axis=-1)


def angles(A, B) -> np.ndarray:
    """Row-wise angles in degrees between broadcastable arrays of vectors."""
    a, b = np.broadcast_arrays(np.asarray(A, float), np.asarray(B, float))
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    zero_a, zero_b = na == 0, nb == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ua = a / na[..., None]
        ub = b / nb[..., None]
        # arccos of the clamped cosine loses ~1e-6 degrees near 0; this form does not
        out = np.degrees(2.0 * np.arctan2(np.linalg.norm(ua - ub, axis=-1),
                                          np.linalg.norm(ua + ub, axis=-1)))
    out[_positively_parallel(a, b)] = 0.0
    out[zero_a & zero_b] = 0.0
    out[zero_a ^ zero_b] = 90.0
    return out


def angle(u, v) -> float:
    """Angle between ``u`` and ``v`` in degrees."""
    a, b = _as_vector(u), _as_vector(v)
    if a.shape != b.shape:
        raise ValueError(f"vector length mismatch: {a.shape} vs {b.shape}")
    return float(angles(a[None], b[None])[0])


@dataclass(frozen=True)
class ComparisonResult:
    per_vector: tuple
    total_angle: float
    per_vector_cosine: tuple
    total_cosine: float


def _check_compatible(A: TopologicalSignature, B: TopologicalSignature) -> None:
    if A.config != B.config:
        raise ValueError(f"signature configs differ: {A.config} vs {B.config}")


def compare(A: TopologicalSignature, B: TopologicalSignature) -> ComparisonResult:
    _check_compatible(A, B)
    per = angles(A.matrix(), B.matrix())
    cosines = tuple(cosine(u, v) for u, v in zip(A.vectors, B.vectors))
    return ComparisonResult(tuple(per.tolist()), float(per.sum()), cosines, float(sum(cosines)))


def total_angle(A: TopologicalSignature, B: TopologicalSignature) -> float:
    _check_compatible(A, B)
    return float(angles(A.matrix(), B.matrix()).sum())


def total_angles(query: TopologicalSignature, others) -> np.ndarray:
    """``total_angle(query, B)`` for every ``B`` in ``others``, computed in one batch."""
    others = list(others)
    for B in others:
        _check_compatible(query, B)
    if not others:
        return np.zeros(0)
    stack = np.stack([B.matrix() for B in others])
    return angles(query.matrix()[None], stack).sum(axis=-1)


def _points(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    return D.reshape(-1, 2)


def _matching_feasible(A: np.ndarray, B: np.ndarray, r: float) -> bool:
    """Perfect matching of A + diagonal(B) against B + diagonal(A) at radius r."""
    n, m = len(A), len(B)
    N = n + m
    rows, cols = [], []
    if n and m:
        d = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)
        i, j = np.nonzero(d <= r)
        rows.append(i)
        cols.append(j)
    if n:
        i = np.flatnonzero((A[:, 1] - A[:, 0]) / 2 <= r)
        rows.append(i)
        cols.append(m + i)
    if m:
        j = np.flatnonzero((B[:, 1] - B[:, 0]) / 2 <= r)
        rows.append(n + j)
        cols.append(j)
    if n and m:
        # diagonal copies match each other at no cost
        i, j = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        rows.append(n + i.ravel())
        cols.append(m + j.ravel())
    r_idx = np.concatenate(rows) if rows else np.empty(0, int)
    c_idx = np.concatenate(cols) if cols else np.empty(0, int)
    if len(r_idx) < N:
        return False
    G = csr_matrix((np.ones(len(r_idx), np.int8), (r_idx, c_idx)), shape=(N, N))
    match = maximum_bipartite_matching(G, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_finite(D1, D2) -> float:
    """Exact bottleneck distance between two finite diagrams of (birth, death) points."""
    A, B = _points(D1), _points(D2)
    if len(A) == 0 and len(B) == 0:
        return 0.0
    cands = [np.zeros(1), (A[:, 1] - A[:, 0]) / 2, (B[:, 1] - B[:, 0]) / 2]
    if len(A) and len(B):
        cands.append(np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2).ravel())
    cands = np.unique(np.concatenate(cands))
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(A, B, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck(D1, D2) -> float:
    """Bottleneck distance allowing points with infinite death.

    Infinite points are matched among themselves by sorted birth. Unequal
    infinite counts give ``inf`` and an :class:`InfiniteBarMismatch` warning.
    """
    A, B = _points(D1), _points(D2)
    fa, fb = np.isfinite(A[:, 1]), np.isfinite(B[:, 1])
    ia, ib = np.sort(A[~fa, 0]), np.sort(B[~fb, 0])
    if len(ia) != len(ib):
        warnings.warn(f"infinite bar counts differ ({len(ia)} vs {len(ib)})", InfiniteBarMismatch,
                      stacklevel=2)
        return math.inf
    d_inf = float(np.max(np.abs(ia - ib))) if len(ia) else 0.0
    return max(d_inf, bottleneck_finite(A[fa], B[fb]))
