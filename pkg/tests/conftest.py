import itertools

import numpy as np
import pytest

from persig.complex import SimplicialComplex
from persig.filtration import Filtration

ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def add(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_complex(rng, max_simplices=30):
    """Closure of random triangles and edges on a few vertices, at most ``max_simplices``."""
    while True:
        nv = int(rng.integers(1, 7))
        verts = list(range(nv))
        tris = list(itertools.combinations(verts, 3))
        edges = list(itertools.combinations(verts, 2))
        chosen = [(v,) for v in verts]
        if tris:
            pick = rng.random(len(tris)) < rng.uniform(0, 0.6)
            chosen += [t for t, p in zip(tris, pick) if p]
        if edges:
            pick = rng.random(len(edges)) < rng.uniform(0, 0.7)
            chosen += [e for e, p in zip(edges, pick) if p]
        K = SimplicialComplex.from_simplices(chosen)
        if len(K) <= max_simplices:
            return K


def random_filtration(rng, K, ties=True):
    """Monotone random values on every simplex, not necessarily lower-star."""
    V, E, T = K.counts()
    hi = 4 if ties else 10 ** 6
    vals = np.zeros(len(K), np.int64)
    vals[:V] = rng.integers(0, hi, V)
    for g in range(V, len(K)):
        faces = K.facets_of(g)
        vals[g] = max(vals[f] for f in faces) + int(rng.integers(0, 3 if ties else hi))
    return Filtration.from_values(K, vals)
