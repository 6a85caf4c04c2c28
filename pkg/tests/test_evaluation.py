import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persig.evaluation import (EvalReport, Gallery, Manifest, ManifestError, Sample,
                               average_signatures, classify, combine_folds, confusion_matrix,
                               cumulative_curve, cv_folds, evaluate_fold, load_manifest,
                               plan_folds, rank_accuracy, run_manifest, tp_tn_values)
from persig.fixtures import box_sequence, write_fixture_dataset
from persig.ingest import write_frames
from persig.signature import SignatureConfig, TopologicalSignature

CFG = SignatureConfig(2)


def _sig(M):
    return TopologicalSignature.from_matrix(np.asarray(M, float).reshape(16, 4), CFG)


def _rand_sig(rng):
    return _sig(rng.integers(0, 6, (16, 4)))


def test_average_examples():
    rng = np.random.default_rng(0)
    S = _rand_sig(rng)
    assert average_signatures([S]) == S
    assert average_signatures([S, S]) == S
    three = _sig(3 * S.matrix())
    assert np.array_equal(average_signatures([S, three]).matrix(), 2 * S.matrix())
    with pytest.raises(ValueError):
        average_signatures([])


def test_classify_examples():
    rng = np.random.default_rng(1)
    S, T = _rand_sig(rng), _rand_sig(rng)
    g = Gallery({"s": S, "t": T}, CFG)
    assert classify(S, g)[0] == ("s", 0.0)
    tie = Gallery({"B": _sig(2 * S.matrix()), "A": S}, CFG)
    assert [lab for lab, _ in classify(S, tie)] == ["A", "B"]
    with pytest.raises(ValueError):
        classify(TopologicalSignature.from_matrix(np.zeros((16, 2)), SignatureConfig(1)), g)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 9))
def test_ranking_invariances(seed, scale):
    rng = np.random.default_rng(seed)
    entries = {f"L{i}": _rand_sig(rng) for i in range(5)}
    q = _rand_sig(rng)
    base = classify(q, Gallery(entries, CFG))
    scaled = classify(_sig(scale * q.matrix()), Gallery(entries, CFG))
    assert [lab for lab, _ in base] == [lab for lab, _ in scaled]
    items = list(entries.items())
    rng.shuffle(items)
    assert classify(q, Gallery(dict(items), CFG)) == base


def test_tp_tn_counts():
    rng = np.random.default_rng(2)
    train = [(f"s{i}", _rand_sig(rng)) for i in range(4)]
    g = Gallery.from_samples(train)
    tp, tn = tp_tn_values(g, train)
    assert tp == [0.0] * 4 and len(tn) == 4
    tests = [(f"s{i % 4}", _rand_sig(rng)) for i in range(6)]
    tp, tn = tp_tn_values(g, tests)
    assert len(tp) == 6 and len(tn) == min(6, 6 * 3)
    _, full = tp_tn_values(g, tests, balance=False)
    assert len(full) == 18 and tn == full[:6]


def test_rank_and_confusion():
    assert rank_accuracy([1, 2, 1, 3], 3) == {1: 50.0, 2: 75.0, 3: 100.0}
    C = confusion_matrix(["a", "a", "b"], ["a", "b", "b"], ["a", "b"])
    assert C.tolist() == [[50.0, 50.0], [0.0, 100.0]]
    assert confusion_matrix(["x"], ["x"], ["x"]).tolist() == [[100.0]]


def test_cumulative_curve():
    assert cumulative_curve([1, 2, 2, 4], [0, 1, 2, 3, 4]) == [0, 25, 75, 75, 100]


def test_cv_folds():
    assert cv_folds(2, 1) == [(0,), (1,)]
    assert len(cv_folds(6, 4)) == 15
    sampled = cv_folds(20, 10, max_folds=7, seed=3)
    assert len(sampled) == 7 and sampled == cv_folds(20, 10, max_folds=7, seed=3)
    with pytest.raises(ManifestError):
        cv_folds(3, 3)


def test_single_class_fold():
    rng = np.random.default_rng(4)
    S = _rand_sig(rng)
    rep = evaluate_fold([("only", S)], [("only", S), ("only", _rand_sig(rng))])
    assert rep.confusion.tolist() == [[100.0]]
    assert rep.rank_accuracy == {1: 100.0}


def test_combine_folds():
    a = EvalReport(["x", "y"], {1: 50.0, 2: 100.0}, np.eye(2) * 100, [1.0], [3.0], 1, 2)
    b = EvalReport(["x", "y"], {1: 100.0, 2: 100.0}, np.eye(2) * 50, [0.5], [2.0], 1, 2)
    c = combine_folds([a, b])
    assert c.rank_accuracy == {1: 75.0, 2: 100.0}
    assert c.tp_values == [0.5, 1.0] and c.folds == 2
    assert np.allclose(c.confusion, np.eye(2) * 75)


def _write_manifest(tmp_path, body):
    p = tmp_path / "m.toml"
    p.write_text(body)
    return p


def test_manifest_parsing(tmp_path):
    p = _write_manifest(tmp_path, """
[eval]
n = 8
crop_fraction = 0.5
exclude = ["c"]

[[sample]]
label = "a"
path = "x"
split = "train"

[[sample]]
label = "c"
path = "y"
split = "test"
""")
    m = load_manifest(p)
    assert m.signature.n == 8 and m.ingest.crop_fraction == 0.5
    assert [s.label for s in m.active] == ["a"]
    assert m.samples[0].path == tmp_path / "x"
    assert plan_folds(m) == [([0], [])]


@pytest.mark.parametrize("body", [
    "[[sample]]\nlabel = 'a'\npath = 'x'\n",
    "[[sample]]\nlabel = 'a'\n",
    "[[sample]]\nlabel = 'a'\npath = 'x'\nsplit = 'dev'\n",
    "[eval]\nn = 0\n[[sample]]\nlabel = 'a'\npath = 'x'\nsplit = 'train'\n",
    "[eval]\nn = 4\n",
    "not = [toml",
    "[cv]\nseed = 1\n[[sample]]\nlabel = 'a'\npath = 'x'\n",
])
def test_manifest_errors(tmp_path, body):
    with pytest.raises(ManifestError):
        load_manifest(_write_manifest(tmp_path, body))


def test_unequal_cv_pools():
    m = Manifest([Sample("a", "p1"), Sample("a", "p2"), Sample("b", "p3")], train_per_subject=1)
    with pytest.raises(ManifestError):
        plan_folds(m)


def test_leave_one_out_two_folds(tmp_path):
    manifest = write_fixture_dataset(tmp_path, samples_per_class=2, train_per_subject=1, n=8)
    rep = run_manifest(manifest)
    assert rep.folds == 2 and rep.n_tests == 3
    assert rep.labels == ["annulus", "bars", "box"]
    d = json.loads(rep.to_json())
    assert d["folds"] == 2 and len(d["confusion"]) == 3
    rep.write_curves(tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().startswith("threshold,tp_percent,tn_percent\n")


def test_fixed_split_manifest(tmp_path):
    rng = np.random.default_rng(5)
    for name in ("t1", "t2", "q"):
        write_frames(box_sequence(rng, frames=6), tmp_path / name)
    p = _write_manifest(tmp_path, """
[eval]
n = 6
crop_fraction = 1.0

[[sample]]
label = "box"
path = "t1"
split = "train"

[[sample]]
label = "box"
path = "t2"
split = "train"

[[sample]]
label = "box"
path = "q"
split = "test"
""")
    rep = run_manifest(p)
    assert rep.confusion.tolist() == [[100.0]] and rep.rank_accuracy == {1: 100.0}


def test_missing_sample_dir(tmp_path):
    p = _write_manifest(tmp_path, "[[sample]]\nlabel='a'\npath='nope'\nsplit='train'\n"
                        "[[sample]]\nlabel='a'\npath='nope2'\nsplit='test'\n")
    with pytest.raises(ManifestError):
        run_manifest(p)
