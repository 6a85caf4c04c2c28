"""Lower-star filtrations of the boundary complex by distance to a reference plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex


class FiltrationError(ValueError):
    """Raised when a simplex order puts a coface before one of its faces."""


@dataclass(frozen=True)
class ReferencePlane:
    """The plane ``a*x + b*y + c*z = d``."""

    id: str
    a: int
    b: int
    c: int
    d: int

    @property
    def equation(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def norm(self) -> float:
        return math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2)

    @property
    def oblique(self) -> bool:
        return self.a != 0 and self.b != 0


PLANES = (
    ReferencePlane("X0", 1, 0, 0, 0),
    ReferencePlane("X1", 1, 0, 0, 1),
    ReferencePlane("Y0", 0, 1, 0, 0),
    ReferencePlane("Y1", 0, 1, 0, 1),
    ReferencePlane("XmY1", 1, -1, 0, 1),
    ReferencePlane("YmX1", -1, 1, 0, 1),
    ReferencePlane("XpY0", 1, 1, 0, 0),
    ReferencePlane("XpY2", 1, 1, 0, 2),
)
PLANE_IDS = tuple(p.id for p in PLANES)
_BY_ID = {p.id: p for p in PLANES}


def get_plane(plane) -> ReferencePlane:
    if isinstance(plane, ReferencePlane):
        return plane
    try:
        return _BY_ID[plane]
    except KeyError:
        raise ValueError(f"unknown plane {plane!r}; expected one of {', '.join(PLANE_IDS)}") from None


def vertex_distance(v, plane) -> float:
    """Euclidean distance from point ``v = (x, y, z)`` to ``plane``."""
    p = get_plane(plane)
    x, y, z = v
    return abs(p.a * x + p.b * y + p.c * z - p.d) / p.norm


def _raw_vertex_values(K: SimplicialComplex, p: ReferencePlane):
    """Unscaled distances and the factor turning them into true distances.

    Voxel-built complexes use integer grid coordinates, so the raw values are
    exact integers and ties are decided without rounding.
    """
    if K.grid is not None and K.denominator is not None and p.c == 0:
        g = K.grid
        raw = np.abs(p.a * g[:, 0] + p.b * g[:, 1] - p.d * K.denominator)
        return raw.astype(np.int64), 1.0 / (K.denominator * p.norm)
    c = K.coords
    raw = np.abs(p.a * c[:, 0] + p.b * c[:, 1] + p.c * c[:, 2] - p.d)
    return raw.astype(float), 1.0 / p.norm


@dataclass(frozen=True, eq=False)
class Filtration:
    """Simplices of ``complex`` in filtration order.

    ``order`` lists global simplex ids (vertices, then edges, then triangles
    of the complex), ``values`` holds the raw filter value of each global id,
    and ``unit`` converts raw values to distances. ``max_vertex_value`` is the
    largest raw vertex value.
    """

    complex: SimplicialComplex
    order: np.ndarray
    values: np.ndarray
    unit: float = 1.0
    plane: str | None = None
    max_vertex_value: float = 0

    def __len__(self) -> int:
        return len(self.order)

    @property
    def k(self) -> float:
        """Greatest vertex distance to the plane."""
        return float(self.max_vertex_value) * self.unit

    def position(self) -> np.ndarray:
        pos = np.empty(len(self.order), np.int64)
        pos[self.order] = np.arange(len(self.order))
        return pos

    def entries(self):
        """``(value, dim, vertex ids)`` in filtration order, values in distance units."""
        K = self.complex
        dims = K.dims()
        for gid in self.order:
            yield float(self.values[gid]) * self.unit, int(dims[gid]), K.simplex(int(gid))

    def validate(self) -> None:
        K = self.complex
        if sorted(self.order.tolist()) != list(range(len(K))):
            raise FiltrationError("order must list every simplex exactly once")
        if np.any(np.diff(self.values[self.order]) < 0):
            raise FiltrationError("filter values must be non-decreasing along the order")
        pos = self.position()
        V, E, _ = K.counts()
        checks = []
        if E:
            checks.append((np.arange(V, V + E), K.edges))
        if K.n_triangles:
            checks.append((np.arange(V + E, len(K)), K.tri_edges + V))
        for gids, faces in checks:
            if np.any(pos[faces] >= pos[gids][:, None]):
                bad = int(gids[np.any(pos[faces] >= pos[gids][:, None], axis=1)][0])
                raise FiltrationError(f"simplex {K.simplex(bad)} appears before one of its faces")
            if np.any(self.values[faces] > self.values[gids][:, None]):
                bad = int(gids[np.any(self.values[faces] > self.values[gids][:, None], axis=1)][0])
                raise FiltrationError(f"simplex {K.simplex(bad)} has a smaller value than a face")

    @classmethod
    def from_values(cls, K: SimplicialComplex, values, order=None, unit: float = 1.0,
                    plane: str | None = None) -> "Filtration":
        """Filtration with explicit per-simplex values (indexed by global id).

        Without ``order`` simplices are sorted by (value, dimension, id).
        """
        values = np.asarray(values)
        if values.shape != (len(K),):
            raise ValueError(f"expected {len(K)} values, got shape {values.shape}")
        if order is None:
            order = np.lexsort((np.arange(len(K)), K.dims(), values))
        order = np.asarray(order, dtype=np.int64)
        vmax = values[: K.n_vertices].max() if K.n_vertices else 0
        f = cls(K, order, values, unit, plane, vmax)
        f.validate()
        return f


def lower_star_values(K: SimplicialComplex, vertex_values) -> np.ndarray:
    """Extend vertex values to every simplex by taking the maximum over its vertices."""
    vv = np.asarray(vertex_values)
    parts = [vv]
    if K.n_edges:
        parts.append(vv[K.edges].max(axis=1))
    if K.n_triangles:
        parts.append(vv[K.triangles].max(axis=1))
    return np.concatenate(parts) if K.n_vertices else vv


def build_filtration(K: SimplicialComplex, plane) -> Filtration:
    p = get_plane(plane)
    raw, unit = _raw_vertex_values(K, p)
    values = lower_star_values(K, raw)
    order = np.lexsort((np.arange(len(K)), K.dims(), values))
    vmax = raw.max() if len(raw) else 0
    return Filtration(K, order.astype(np.int64), values, unit, p.id, vmax)


def dump_filtration(F: Filtration, path) -> None:
    with open(path, "w") as fh:
        fh.write("value,dim,vertices\n")
        for value, dim, s in F.entries():
            fh.write(f"{value:.17g},{dim},{' '.join(map(str, s))}\n")
