"""Cubical complex of a voxel image and its triangulated boundary surface."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .ingest import BinaryImage3D


@dataclass(frozen=True)
class CubicalComplex:
    """Unit cubes of a voxel image; ``cubes[i, j, k]`` marks the cube anchored at (i, j, k)."""

    cubes: np.ndarray

    @property
    def anchors(self) -> np.ndarray:
        return np.argwhere(self.cubes)

    def __len__(self) -> int:
        return int(self.cubes.sum())


def build_cubical(img: BinaryImage3D) -> CubicalComplex:
    v = img.voxels
    c = (v[:-1, :-1, :-1] & v[1:, :-1, :-1] & v[:-1, 1:, :-1] & v[:-1, :-1, 1:]
         & v[1:, 1:, :-1] & v[1:, :-1, 1:] & v[:-1, 1:, 1:] & v[1:, 1:, 1:])
    return CubicalComplex(c)


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A 2-dimensional simplicial complex stored as sorted index arrays.

    Vertices are numbered ``0..V-1``. ``edges`` and ``triangles`` hold sorted
    vertex ids and are themselves sorted lexicographically, so the array
    position doubles as the deterministic simplex id. ``tri_edges`` gives the
    three edge ids of each triangle.

    When the complex comes from a voxel image, ``grid`` holds the integer voxel
    coordinates and ``denominator`` the shared x/y normalization, which lets
    filter values be computed exactly.
    """

    coords: np.ndarray
    edges: np.ndarray
    triangles: np.ndarray
    tri_edges: np.ndarray
    grid: np.ndarray | None = None
    denominator: int | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def __len__(self) -> int:
        return self.n_vertices + self.n_edges + self.n_triangles

    def is_empty(self) -> bool:
        return self.n_vertices == 0

    def counts(self) -> tuple[int, int, int]:
        return self.n_vertices, self.n_edges, self.n_triangles

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def dims(self) -> np.ndarray:
        """Dimension of every simplex, indexed by global id."""
        return np.repeat(np.array([0, 1, 2], np.int8), self.counts())

    def simplex(self, gid: int) -> tuple:
        V, E, _ = self.counts()
        if gid < V:
            return (int(gid),)
        if gid < V + E:
            return tuple(int(a) for a in self.edges[gid - V])
        return tuple(int(a) for a in self.triangles[gid - V - E])

    def simplices(self) -> list[tuple]:
        return ([(i,) for i in range(self.n_vertices)]
                + [tuple(map(int, e)) for e in self.edges]
                + [tuple(map(int, t)) for t in self.triangles])

    def facets_of(self, gid: int) -> tuple:
        """Global ids of the codimension-1 faces of simplex ``gid``."""
        V, E, _ = self.counts()
        if gid < V:
            return ()
        if gid < V + E:
            return tuple(int(a) for a in self.edges[gid - V])
        return tuple(V + int(e) for e in self.tri_edges[gid - V - E])

    @classmethod
    def from_arrays(cls, coords, triangles, edges=None, grid=None, denominator=None):
        """Build from vertex coordinates and triangles; edges default to the triangle edges."""
        coords = np.asarray(coords, dtype=float).reshape(-1, 3)
        tri = np.sort(np.asarray(triangles, dtype=np.int64).reshape(-1, 3), axis=1)
        tri = np.unique(tri, axis=0) if len(tri) else tri
        tri_e = np.concatenate([tri[:, [0, 1]], tri[:, [0, 2]], tri[:, [1, 2]]])
        if edges is not None:
            extra = np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1)
            tri_e = np.concatenate([tri_e, extra])
        ed = np.unique(tri_e, axis=0) if len(tri_e) else np.empty((0, 2), np.int64)
        V = len(coords)
        keys = ed[:, 0] * V + ed[:, 1]
        if len(tri):
            tk = np.stack([tri[:, 0] * V + tri[:, 1], tri[:, 0] * V + tri[:, 2],
                           tri[:, 1] * V + tri[:, 2]], axis=1)
            te = np.searchsorted(keys, tk)
        else:
            te = np.empty((0, 3), np.int64)
        if grid is not None:
            grid = np.asarray(grid, dtype=np.int64)
        for a in (coords, ed, tri, te):
            a.setflags(write=False)
        return cls(coords, ed, tri, te, grid, denominator)

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable], coords=None):
        """Closure of an arbitrary collection of vertices, edges and triangles.

        Vertex labels may be any sortable values; they are renumbered in sorted
        order. ``coords`` maps labels to (x, y, z) and defaults to the origin.
        """
        closed = set()
        for s in simplices:
            s = tuple(sorted(s))
            if not 1 <= len(s) <= 3 or len(set(s)) != len(s):
                raise ValueError(f"not a simplex of dimension <= 2: {s}")
            for r in range(1, len(s) + 1):
                closed.update(combinations(s, r))
        labels = sorted(x[0] for x in closed if len(x) == 1)
        idx = {lab: i for i, lab in enumerate(labels)}
        if coords is None:
            xyz = np.zeros((len(labels), 3))
        else:
            xyz = np.array([coords[lab] for lab in labels], dtype=float).reshape(-1, 3)
        edges = [(idx[a], idx[b]) for a, b in (x for x in closed if len(x) == 2)]
        tris = [(idx[a], idx[b], idx[c]) for a, b, c in (x for x in closed if len(x) == 3)]
        return cls.from_arrays(xyz, np.array(tris, np.int64).reshape(-1, 3),
                               edges=np.array(edges, np.int64).reshape(-1, 2))


BoundarySimplicialComplex = SimplicialComplex


def boundary_squares(q: CubicalComplex):
    """Squares that bound exactly one cube, grouped by normal axis.

    Returns a list of ``(axis, anchors)`` where ``anchors`` is an ``(m, 3)``
    array of the square's lexicographically smallest corner.
    """
    out = []
    for axis in range(3):
        pad = [(0, 0)] * 3
        pad[axis] = (1, 1)
        c = np.pad(q.cubes, pad)
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        out.append((axis, np.argwhere(c[tuple(lo)] ^ c[tuple(hi)])))
    return out


def extract_boundary(q: CubicalComplex, img: BinaryImage3D) -> SimplicialComplex:
    """Triangulate every square bounding exactly one cube.

    Each square is split along the diagonal through its lexicographically
    smallest corner. The result is the closure of those triangles.
    """
    X, Y, Z = img.dims
    tris = []
    for axis, anchors in boundary_squares(q):
        if len(anchors) == 0:
            continue
        b, c = [a for a in range(3) if a != axis]
        eb = np.zeros(3, np.int64)
        ec = np.zeros(3, np.int64)
        eb[b] = 1
        ec[c] = 1
        p0 = anchors
        pd = anchors + eb + ec
        tris.append(np.stack([p0, p0 + eb, pd], axis=1))
        tris.append(np.stack([p0, p0 + ec, pd], axis=1))
    denom = img.xy_denominator
    if not tris:
        empty = np.empty((0, 3), np.int64)
        return SimplicialComplex.from_arrays(np.empty((0, 3)), empty, grid=empty, denominator=denom)
    pts = np.concatenate(tris)  # (T, 3 corners, 3 coords)
    lin = (pts[..., 0] * Y + pts[..., 1]) * Z + pts[..., 2]
    uniq, inv = np.unique(lin.ravel(), return_inverse=True)
    grid = np.stack([uniq // (Y * Z), (uniq // Z) % Y, uniq % Z], axis=1)
    coords = grid * np.asarray(img.scale, dtype=float)
    triangles = inv.reshape(-1, 3)
    return SimplicialComplex.from_arrays(coords, triangles, grid=grid, denominator=denom)


def boundary_complex(img: BinaryImage3D) -> SimplicialComplex:
    return extract_boundary(build_cubical(img), img)


def write_off(K: SimplicialComplex, path) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{K.n_vertices} {K.n_triangles} 0\n")
        for x, y, z in K.coords:
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in K.triangles:
            fh.write(f"3 {a} {b} {c}\n")
