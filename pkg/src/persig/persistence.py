"""Persistence barcodes by boundary-matrix reduction over GF(2)."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .complex import SimplicialComplex
from .filtration import Filtration


class Bar(NamedTuple):
    dim: int
    birth: float
    death: float

    @property
    def length(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True, eq=False)
class PersistenceBarcode:
    """Bars of a filtration in raw filter units; multiply by ``unit`` for distances.

    ``max_value`` is the raw greatest vertex value of the filtration, so the
    window width used for vectorization is ``max_value * unit / n``.
    """

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    max_value: float = 0.0
    unit: float = 1.0
    plane: str | None = None

    def __post_init__(self):
        dims = np.asarray(self.dims, dtype=np.int64).reshape(-1)
        births = np.asarray(self.births, dtype=float).reshape(-1)
        deaths = np.asarray(self.deaths, dtype=float).reshape(-1)
        if not (len(dims) == len(births) == len(deaths)):
            raise ValueError("dims, births and deaths must have equal length")
        if np.any(deaths <= births):
            raise ValueError("every bar must have death > birth")
        key = np.lexsort((deaths, births, dims))
        for name, arr in (("dims", dims[key]), ("births", births[key]), ("deaths", deaths[key])):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def k(self) -> float:
        return float(self.max_value) * self.unit

    def bars(self, dim: int | None = None) -> list[Bar]:
        sel = slice(None) if dim is None else self.dims == dim
        return [Bar(int(d), float(b) * self.unit, float(e) * self.unit)
                for d, b, e in zip(self.dims[sel], self.births[sel], self.deaths[sel])]

    def select(self, dim: int) -> "PersistenceBarcode":
        m = self.dims == dim
        return PersistenceBarcode(self.dims[m], self.births[m], self.deaths[m],
                                  self.max_value, self.unit, self.plane)

    def diagram(self, dim: int, finite: bool | None = None) -> np.ndarray:
        """``(m, 2)`` array of (birth, death) points in distance units.

        ``finite=True`` keeps finite points only, ``False`` infinite ones only.
        """
        m = self.dims == dim
        if finite is True:
            m &= np.isfinite(self.deaths)
        elif finite is False:
            m &= ~np.isfinite(self.deaths)
        return np.stack([self.births[m], self.deaths[m]], axis=1) * self.unit

    def count(self, dim: int) -> int:
        return int((self.dims == dim).sum())

    def infinite_count(self, dim: int) -> int:
        return int(((self.dims == dim) & np.isinf(self.deaths)).sum())


def _columns(F: Filtration, pos: np.ndarray):
    K = F.complex
    V, E, T = K.counts()
    edge_cols = np.sort(pos[K.edges], axis=1) if E else np.empty((0, 2), np.int64)
    tri_cols = np.sort(pos[K.tri_edges + V], axis=1) if T else np.empty((0, 3), np.int64)
    return edge_cols, tri_cols


def _pop_low(heap: list) -> int:
    """Pop the largest entry of odd multiplicity from a negated heap, or -1."""
    while heap:
        top = heapq.heappop(heap)
        odd = True
        while heap and heap[0] == top:
            heapq.heappop(heap)
            odd = not odd
        if odd:
            return -top
    return -1


def _reduce_column(col: list, pivots: dict):
    """Add pivot columns to ``col`` until its lowest entry is a new pivot.

    The working column is a max-heap with lazy mod-2 cancellation, so each
    addition costs the length of the added column only.
    """
    heap = [-x for x in col]
    heapq.heapify(heap)
    low = _pop_low(heap)
    while low >= 0 and low in pivots:
        for x in pivots[low]:
            if x != low:
                heapq.heappush(heap, -x)
        low = _pop_low(heap)
    if low < 0:
        return -1, []
    parity = {}
    for x in heap:
        parity[x] = not parity.get(x, False)
    rest = sorted(-x for x, odd in parity.items() if odd)
    return low, rest + [low]


def persistence_pairs(F: Filtration, validate: bool = True):
    """Pair filtration positions by the column algorithm with clearing.

    Columns of each dimension are reduced in filtration order, triangles
    first, so that every edge already known to be a pivot is skipped.
    Returns ``(pairs, essential)``: ``pairs`` is a list of (creator position,
    destroyer position) and ``essential`` the unpaired creator positions.
    """
    if validate:
        F.validate()
    K = F.complex
    V, E, T = K.counts()
    m = len(F)
    pos = F.position()
    edge_cols, tri_cols = _columns(F, pos)
    is_low = np.zeros(m, bool)
    pairs = []
    for cols, first in ((tri_cols, V + E), (edge_cols, V)):
        if not len(cols):
            continue
        colpos = pos[first:first + len(cols)]
        pivots = {}  # low position -> reduced column, ascending
        colpos_l = colpos.tolist()
        cols_l = cols.tolist()
        for c in np.argsort(colpos, kind="stable").tolist():
            j = colpos_l[c]
            if is_low[j]:
                continue  # cleared: this simplex already destroys a class
            col = cols_l[c]
            low = col[-1]
            if low in pivots:
                low, col = _reduce_column(col, pivots)
            if low >= 0:
                pivots[low] = col
                is_low[low] = True
                pairs.append((low, j))
    destroyers = np.zeros(m, bool)
    if pairs:
        destroyers[np.array(pairs)[:, 1]] = True
    dims = K.dims()[F.order]
    essential = np.flatnonzero(~is_low & ~destroyers & (dims <= 1))
    return pairs, essential.tolist()


def reduce(F: Filtration, validate: bool = True) -> PersistenceBarcode:
    """0- and 1-dimensional barcode of ``F``; bars of length zero are dropped."""
    pairs, essential = persistence_pairs(F, validate)
    vals = F.values[F.order]
    dims = F.complex.dims()[F.order]
    pr = np.array(pairs, np.int64).reshape(-1, 2)
    ci, di = pr[:, 0], pr[:, 1]
    keep = (dims[ci] <= 1) & (vals[di] > vals[ci])
    ess = np.array(essential, np.int64)
    return PersistenceBarcode(
        np.concatenate([dims[ci[keep]], dims[ess]]),
        np.concatenate([vals[ci[keep]], vals[ess]]),
        np.concatenate([vals[di[keep]], np.full(len(ess), math.inf)]),
        float(F.max_vertex_value), F.unit, F.plane)


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank over GF(2) of vectors given as integer bit masks."""
    basis: dict[int, int] = {}
    for v in columns:
        while v:
            h = v.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = v
                break
            v ^= b
    return len(basis)


def betti_oracle(K: SimplicialComplex) -> tuple[int, int]:
    """Betti numbers (b0, b1) from ranks of the mod-2 boundary matrices."""
    V, E, T = K.counts()
    r1 = gf2_rank((1 << int(a)) | (1 << int(b)) for a, b in K.edges)
    r2 = gf2_rank((1 << int(a)) | (1 << int(b)) | (1 << int(c)) for a, b, c in K.tri_edges)
    return V - r1, E - r1 - r2


def format_value(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.17g}"


def write_bars(B: PersistenceBarcode, path, dim: int | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(f"# plane={B.plane or '-'} k={format_value(B.k)}\n")
        for bar in B.bars(dim):
            fh.write(f"{bar.dim} {format_value(bar.birth)} {format_value(bar.death)}\n")


def read_bars(path) -> PersistenceBarcode:
    dims, births, deaths = [], [], []
    plane, k = None, 0.0
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    key, _, val = tok.partition("=")
                    if key == "plane" and val != "-":
                        plane = val
                    elif key == "k":
                        k = float(val)
                continue
            d, b, e = line.split()
            dims.append(int(d))
            births.append(float(b))
            deaths.append(float(e))
    return PersistenceBarcode(np.array(dims, np.int64), np.array(births), np.array(deaths),
                              k, 1.0, plane)
