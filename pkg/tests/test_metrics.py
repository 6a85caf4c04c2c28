import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import brute_bottleneck
from persig.metrics import (InfiniteBarMismatch, angle, bottleneck, bottleneck_finite, compare,
                            cosine, total_angle)
from persig.signature import SignatureConfig, TopologicalSignature

vec = st.lists(st.integers(0, 20), min_size=6, max_size=6).map(np.array)


def _sig(M, n=3):
    return TopologicalSignature.from_matrix(np.asarray(M), SignatureConfig(n))


def test_angle_examples():
    u = np.array([3, 1, 0, 2])
    assert angle(u, u) == 0
    assert angle(u, 2 * u) == 0
    e1, e2 = np.eye(5)[0], np.eye(5)[1]
    assert angle(e1, e2) == pytest.approx(90, abs=1e-12)
    assert angle(np.zeros(3), np.zeros(3)) == 0
    assert angle(np.zeros(3), np.ones(3)) == 90
    assert cosine(np.zeros(3), np.zeros(3)) == 1
    assert cosine(np.zeros(3), np.ones(3)) == 0
    with pytest.raises(ValueError):
        angle(np.ones(2), np.ones(3))


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec)
def test_angle_pseudometric(u, v, w):
    a = angle(u, v)
    assert 0 <= a <= 180
    assert a == angle(v, u)
    assert angle(u, u) == 0
    if np.any(u) and np.any(v) and np.any(w):
        assert angle(u, w) <= a + angle(v, w) + 1e-9
    if np.any(u) and np.any(v):
        assert math.cos(math.radians(a)) == pytest.approx(cosine(u, v), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(vec, st.integers(1, 50))
def test_scale_invariance(u, c):
    assert angle(u, c * u) == 0


def test_total_angle_examples():
    rng = np.random.default_rng(0)
    M = rng.integers(0, 5, (16, 6))
    M[:, 0] = 1
    A = _sig(M)
    res = compare(A, A)
    assert res.total_angle == 0 and res.total_cosine == pytest.approx(16)
    P = np.zeros((16, 6), int)
    Q = np.zeros((16, 6), int)
    P[:, 0] = 1
    Q[:, 1] = 3
    assert total_angle(_sig(P), _sig(Q)) == pytest.approx(1440, abs=1e-9)
    assert total_angle(A, _sig(2 * M)) == 0
    with pytest.raises(ValueError):
        compare(A, _sig(np.zeros((16, 8), int), n=4))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=96, max_size=96),
       st.lists(st.integers(0, 9), min_size=96, max_size=96))
def test_total_angle_range_and_symmetry(a, b):
    A, B = _sig(np.reshape(a, (16, 6))), _sig(np.reshape(b, (16, 6)))
    t = total_angle(A, B)
    assert 0 <= t <= 1440 + 1e-9
    assert t == total_angle(B, A)


def test_bottleneck_examples():
    assert bottleneck([[1, 3]], [[1, 3]]) == 0
    assert bottleneck([[1, 3]], np.empty((0, 2))) == 1
    assert bottleneck([[0, 2]], [[0.5, 2.5]]) == 0.5
    assert bottleneck(np.empty((0, 2)), np.empty((0, 2))) == 0


def test_bottleneck_infinite_points():
    assert bottleneck([[0, math.inf], [1, 2]], [[0.25, math.inf]]) == 0.5
    with pytest.warns(InfiniteBarMismatch):
        assert bottleneck([[0, math.inf]], [[0, 1]]) == math.inf


diagram = st.lists(
    st.tuples(st.integers(0, 20), st.integers(1, 12)).map(lambda t: (t[0] / 4, (t[0] + t[1]) / 4)),
    max_size=5)


@settings(max_examples=150, deadline=None)
@given(diagram, diagram)
def test_bottleneck_matches_bruteforce(A, B):
    got = bottleneck_finite(np.array(A).reshape(-1, 2), np.array(B).reshape(-1, 2))
    assert abs(got - brute_bottleneck(A, B)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(diagram, diagram, diagram)
def test_bottleneck_triangle(A, B, C):
    assume(A or B or C)
    f = lambda x, y: bottleneck_finite(np.array(x).reshape(-1, 2), np.array(y).reshape(-1, 2))  # noqa: E731
    assert f(A, C) <= f(A, B) + f(B, C) + 1e-12
    assert f(A, B) == f(B, A)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_batched_total_angles_match_scalar(seed):
    from persig.metrics import total_angles
    rng = np.random.default_rng(seed)
    q = _sig(rng.integers(0, 4, (16, 6)))
    others = [_sig(rng.integers(0, 4, (16, 6))) for _ in range(5)] + [_sig(3 * q.matrix())]
    others.append(TopologicalSignature.from_matrix(rng.random((16, 6)), SignatureConfig(3)))
    batch = total_angles(q, others)
    assert batch.tolist() == [total_angle(q, B) for B in others]
    for B in others:
        assert compare(q, B).per_vector == tuple(angle(u, v) for u, v in zip(q.vectors, B.vectors))
    assert batch[5] == 0
