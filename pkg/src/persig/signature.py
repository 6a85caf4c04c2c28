"""Windowed bar counting and the sixteen-vector topological signature."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .complex import SimplicialComplex
from .filtration import PLANE_IDS, build_filtration
from .persistence import PersistenceBarcode, reduce

HEADER = "persig v1"
DIMS = (0, 1)


class SignatureFormatError(ValueError):
    pass


class EmptyComplexWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SignatureConfig:
    n: int = 24

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"window count n must be a positive integer, got {self.n}")


@dataclass(frozen=True, eq=False)
class SignatureVector:
    plane: str
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SignatureVector) and self.plane == other.plane
                and self.dim == other.dim and np.array_equal(self.entries, other.entries))


@dataclass(frozen=True, eq=False)
class TopologicalSignature:
    config: SignatureConfig
    vectors: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vecs = tuple(self.vectors)
        layout = [(v.plane, v.dim) for v in vecs]
        if layout != [(p, d) for p in PLANE_IDS for d in DIMS]:
            raise ValueError("a signature needs 16 vectors in plane order, dim 0 before dim 1")
        if any(len(v) != 2 * self.config.n for v in vecs):
            raise ValueError(f"every vector must have {2 * self.config.n} entries")
        object.__setattr__(self, "vectors", vecs)

    def matrix(self) -> np.ndarray:
        """``(16, 2n)`` array of all entries."""
        return np.stack([v.entries for v in self.vectors])

    def __eq__(self, other) -> bool:
        return (isinstance(other, TopologicalSignature) and self.config == other.config
                and np.array_equal(self.matrix(), other.matrix()))

    @classmethod
    def from_matrix(cls, matrix, config: SignatureConfig, meta=None) -> "TopologicalSignature":
        matrix = np.asarray(matrix)
        vecs = [SignatureVector(p, d, matrix[2 * i + d]) for i, p in enumerate(PLANE_IDS)
                for d in DIMS]
        return cls(config, tuple(vecs), dict(meta or {}))


def vectorize(B: PersistenceBarcode, dim: int, cfg: SignatureConfig | None = None) -> SignatureVector:
    """Count bars of dimension ``dim`` over ``n`` windows of width ``k/n``.

    Entry ``2s`` counts bars born before ``s*h`` still alive at ``s*h``
    (death >= s*h); entry ``2s+1`` counts bars born in ``[s*h, (s+1)*h)``.
    The last window also takes births at exactly ``k``. All comparisons are
    done on raw filter values scaled by ``n``, so integer inputs stay exact.
    """
    cfg = cfg or SignatureConfig()
    n = cfg.n
    out = np.zeros(2 * n, np.int64)
    sel = B.dims == dim
    births, deaths = B.births[sel], B.deaths[sel]
    if not len(births):
        return SignatureVector(B.plane or "", dim, out)
    k = float(B.max_value)
    if k <= 0:
        out[1] = len(births)
        return SignatureVector(B.plane or "", dim, out)
    s = np.arange(1, n)
    edges = s * k  # window edges s*h, scaled by n
    bn, dn = births * n, deaths * n
    window = (edges[None, :] <= bn[:, None]).sum(axis=1)
    np.add.at(out, 2 * window + 1, 1)
    alive = (bn[:, None] < edges[None, :]) & (dn[:, None] >= edges[None, :])
    out[2 * s] = alive.sum(axis=0)
    return SignatureVector(B.plane or "", dim, out)


def barcodes(K: SimplicialComplex) -> list[PersistenceBarcode]:
    """One barcode per reference plane, in plane order."""
    return [reduce(build_filtration(K, p), validate=False) for p in PLANE_IDS]


def signature_from_barcodes(bcs, cfg: SignatureConfig | None = None, meta=None) -> TopologicalSignature:
    cfg = cfg or SignatureConfig()
    vecs = []
    for p, B in zip(PLANE_IDS, bcs):
        for d in DIMS:
            v = vectorize(B, d, cfg)
            vecs.append(SignatureVector(p, d, v.entries))
    return TopologicalSignature(cfg, tuple(vecs), dict(meta or {}))


def signature(K: SimplicialComplex, cfg: SignatureConfig | None = None, meta=None) -> TopologicalSignature:
    cfg = cfg or SignatureConfig()
    if K.is_empty():
        warnings.warn("empty boundary complex; signature is all zeros", EmptyComplexWarning,
                      stacklevel=2)
        return TopologicalSignature.from_matrix(np.zeros((16, 2 * cfg.n), np.int64), cfg, meta)
    return signature_from_barcodes(barcodes(K), cfg, meta)


def _fmt(x) -> str:
    if float(x).is_integer():
        return str(int(x))
    return f"{float(x):.17g}"


def format_signature(sig: TopologicalSignature) -> str:
    lines = [f"{HEADER} n={sig.config.n} planes={len(PLANE_IDS)}"]
    for v in sig.vectors:
        lines.append(f"plane={v.plane} dim={v.dim} : " + " ".join(_fmt(x) for x in v.entries))
    return "\n".join(lines) + "\n"


def write_signature(sig: TopologicalSignature, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_signature(sig))


def parse_signature(text: str) -> TopologicalSignature:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SignatureFormatError("empty signature file")
    head = lines[0].split()
    if head[:2] != HEADER.split() or len(head) != 4:
        raise SignatureFormatError(f"bad header: {lines[0]!r}")
    try:
        n = int(head[2].removeprefix("n="))
        planes = int(head[3].removeprefix("planes="))
    except ValueError:
        raise SignatureFormatError(f"bad header: {lines[0]!r}") from None
    if planes != len(PLANE_IDS) or len(lines) != 1 + 2 * planes:
        raise SignatureFormatError(f"expected {2 * len(PLANE_IDS)} vector lines")
    vecs = []
    for ln in lines[1:]:
        label, sep, body = ln.partition(":")
        parts = label.split()
        if not sep or len(parts) != 2 or not parts[0].startswith("plane=") or not parts[1].startswith("dim="):
            raise SignatureFormatError(f"bad vector line: {ln!r}")
        try:
            arr = np.array([float(t) for t in body.split()])
            dim = int(parts[1][4:])
        except ValueError:
            raise SignatureFormatError(f"bad number in line: {ln!r}") from None
        if not np.all(np.isfinite(arr)):
            raise SignatureFormatError(f"non-finite entry in line: {ln!r}")
        if np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        vecs.append(SignatureVector(parts[0][6:], dim, arr))
    try:
        return TopologicalSignature(SignatureConfig(n), tuple(vecs))
    except ValueError as exc:
        raise SignatureFormatError(str(exc)) from None


def read_signature(path) -> TopologicalSignature:
    with open(path) as fh:
        return parse_signature(fh.read())
