"""Gallery construction, nearest-neighbour ranking and the train/test protocol."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .complex import boundary_complex
from .ingest import IngestConfig, IngestError, load_sequence
from .metrics import total_angles
from .signature import SignatureConfig, TopologicalSignature, signature

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

MAX_FOLDS = 100


class ManifestError(ValueError):
    pass


def average_signatures(sigs: Sequence[TopologicalSignature]) -> TopologicalSignature:
    if not sigs:
        raise ValueError("cannot average an empty list of signatures")
    cfg = sigs[0].config
    if any(s.config != cfg for s in sigs):
        raise ValueError("signatures with different configs cannot be averaged")
    if len(sigs) == 1:
        return sigs[0]
    mean = np.mean([s.matrix() for s in sigs], axis=0)
    return TopologicalSignature.from_matrix(mean, cfg, {"averaged": len(sigs)})


@dataclass
class Gallery:
    entries: dict
    config: SignatureConfig

    def __post_init__(self):
        if any(s.config != self.config for s in self.entries.values()):
            raise ValueError("all gallery entries must share the gallery config")

    @property
    def labels(self) -> list:
        return sorted(self.entries)

    @classmethod
    def from_samples(cls, samples: Iterable[tuple]) -> "Gallery":
        """Average the signatures of each label from ``(label, signature)`` pairs."""
        groups: dict = {}
        for label, sig in samples:
            groups.setdefault(label, []).append(sig)
        if not groups:
            raise ValueError("gallery needs at least one training sample")
        entries = {lab: average_signatures(sigs) for lab, sigs in groups.items()}
        return cls(entries, next(iter(entries.values())).config)


def classify(query: TopologicalSignature, g: Gallery) -> list[tuple[str, float]]:
    """Gallery labels ranked by total angle to ``query``; ties go to the smaller label."""
    if not g.entries:
        raise ValueError("empty gallery")
    if query.config != g.config:
        raise ValueError(f"query config {query.config} does not match gallery {g.config}")
    labels = g.labels
    scores = total_angles(query, [g.entries[lab] for lab in labels])
    return sorted(zip(labels, scores.tolist()), key=lambda t: t[1])


def rank_accuracy(ranks: Sequence[int], n_labels: int) -> dict[int, float]:
    """Percent of queries whose true label is within the first ``r`` candidates."""
    ranks = np.asarray(ranks)
    if not len(ranks):
        return {r: 0.0 for r in range(1, n_labels + 1)}
    return {r: float(100.0 * np.mean(ranks <= r)) for r in range(1, n_labels + 1)}


def confusion_matrix(true: Sequence[str], pred: Sequence[str], labels: Sequence[str]) -> np.ndarray:
    """Row-normalized confusion matrix in percent; rows are true labels."""
    idx = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)))
    for t, p in zip(true, pred):
        counts[idx[t], idx[p]] += 1
    rows = counts.sum(axis=1, keepdims=True)
    return np.divide(100.0 * counts, rows, out=np.zeros_like(counts), where=rows > 0)


def tp_tn_values(g: Gallery, tests: Sequence[tuple],
                 balance: bool = True) -> tuple[list[float], list[float]]:
    """Same-label and cross-label comparison values, both sorted.

    With ``balance`` the cross-label set keeps only its ``len(TP)`` smallest
    values.
    """
    tp, tn = [], []
    labels = g.labels
    gallery = [g.entries[lab] for lab in labels]
    for label, sig in tests:
        if label not in g.entries:
            raise ValueError(f"test label {label!r} is not in the gallery")
        for lab, a in zip(labels, total_angles(sig, gallery).tolist()):
            (tp if lab == label else tn).append(a)
    tp.sort()
    tn.sort()
    return tp, tn[:len(tp)] if balance else tn


def cumulative_curve(values: Sequence[float], thresholds: Sequence[float]) -> list[float]:
    """Percent of ``values`` less than or equal to each threshold."""
    v = np.sort(np.asarray(values, float))
    if not len(v):
        return [0.0] * len(thresholds)
    return (100.0 * np.searchsorted(v, thresholds, side="right") / len(v)).tolist()


def curve_points(tp: Sequence[float], tn: Sequence[float]) -> list[tuple[float, float, float]]:
    """``(threshold, tp percent, tn percent)`` at every distinct observed value."""
    thr = np.unique(np.concatenate([np.asarray(tp, float), np.asarray(tn, float)]))
    return list(zip(thr.tolist(), cumulative_curve(tp, thr), cumulative_curve(tn, thr)))


def tp_tn_curves(g: Gallery, tests: Sequence[tuple]) -> dict:
    tp, tn = tp_tn_values(g, tests)
    return {"tp_values": tp, "tn_values": tn, "curve": curve_points(tp, tn)}


@dataclass
class EvalReport:
    labels: list
    rank_accuracy: dict
    confusion: np.ndarray
    tp_values: list
    tn_values: list
    folds: int = 1
    n_tests: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def curve(self) -> list:
        return curve_points(self.tp_values, self.tn_values)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "folds": self.folds,
            "n_tests": self.n_tests,
            "rank_accuracy": {str(k): v for k, v in self.rank_accuracy.items()},
            "confusion": np.round(self.confusion, 6).tolist(),
            "tp_values": self.tp_values,
            "tn_values": self.tn_values,
            "curve": [list(p) for p in self.curve],
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_curves(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("threshold,tp_percent,tn_percent\n")
            for t, a, b in self.curve:
                fh.write(f"{t:.10g},{a:.10g},{b:.10g}\n")

    def summary(self) -> str:
        lines = [f"folds={self.folds} tests/fold={self.n_tests} labels={len(self.labels)}"]
        lines.append("rank accuracy (%): " + " ".join(
            f"r{k}={v:.1f}" for k, v in sorted(self.rank_accuracy.items())))
        return "\n".join(lines)


def evaluate_fold(train: Sequence[tuple], test: Sequence[tuple]) -> EvalReport:
    """One train/test split from ``(label, signature)`` pairs."""
    g = Gallery.from_samples(train)
    labels = g.labels
    test = sorted(test, key=lambda t: t[0])
    ranks, preds, trues = [], [], []
    for label, sig in test:
        if label not in g.entries:
            raise ValueError(f"test label {label!r} has no training samples")
        ranked = [lab for lab, _ in classify(sig, g)]
        ranks.append(ranked.index(label) + 1)
        preds.append(ranked[0])
        trues.append(label)
    tp, tn = tp_tn_values(g, test)
    return EvalReport(labels, rank_accuracy(ranks, len(labels)),
                      confusion_matrix(trues, preds, labels), tp, tn, 1, len(test))


def combine_folds(reports: Sequence[EvalReport]) -> EvalReport:
    """Average rank accuracy and confusion over folds; pool the TP/TN values."""
    labels = reports[0].labels
    ranks = {r: float(np.mean([rep.rank_accuracy[r] for rep in reports]))
             for r in reports[0].rank_accuracy}
    conf = np.mean([rep.confusion for rep in reports], axis=0)
    tp = sorted(v for rep in reports for v in rep.tp_values)
    tn = sorted(v for rep in reports for v in rep.tn_values)
    return EvalReport(labels, ranks, conf, tp, tn, len(reports), reports[0].n_tests)


def cv_folds(n_samples: int, n_train: int, max_folds: int = MAX_FOLDS, seed: int = 0) -> list[tuple]:
    """Training index sets: every combination, or a seeded sample of ``max_folds``."""
    if not 0 < n_train < n_samples:
        raise ManifestError(f"train_per_subject must lie in 1..{n_samples - 1}, got {n_train}")
    total = math.comb(n_samples, n_train)
    if total <= max_folds:
        return list(combinations(range(n_samples), n_train))
    rng = np.random.default_rng(seed)
    folds = set()
    while len(folds) < max_folds:
        folds.add(tuple(sorted(rng.choice(n_samples, n_train, replace=False).tolist())))
    return sorted(folds)


@dataclass
class Sample:
    label: str
    path: Path
    split: str | None = None


@dataclass
class Manifest:
    samples: list
    signature: SignatureConfig = field(default_factory=SignatureConfig)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    exclude: tuple = ()
    train_per_subject: int | None = None
    max_folds: int = MAX_FOLDS
    seed: int = 0

    @property
    def active(self) -> list:
        return [s for s in self.samples if s.label not in self.exclude]


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    base = path.parent
    ev = data.get("eval", {})
    cv = data.get("cv")
    try:
        sig_cfg = SignatureConfig(int(ev.get("n", 24)))
        ing_cfg = IngestConfig(float(ev.get("crop_fraction", 0.25)), int(ev.get("threshold", 128)),
                               str(ev.get("order", "numeric-suffix")))
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    samples = []
    for i, raw in enumerate(data.get("sample", [])):
        if "label" not in raw or "path" not in raw:
            raise ManifestError(f"{path}: sample #{i} needs 'label' and 'path'")
        split = raw.get("split")
        if split not in (None, "train", "test"):
            raise ManifestError(f"{path}: sample #{i} has unknown split {split!r}")
        if cv is None and split is None:
            raise ManifestError(f"{path}: sample #{i} needs a split when no [cv] table is given")
        samples.append(Sample(str(raw["label"]), base / raw["path"], split))
    if not samples:
        raise ManifestError(f"{path}: no [[sample]] entries")
    m = Manifest(samples, sig_cfg, ing_cfg, tuple(str(x) for x in ev.get("exclude", ())))
    if cv is not None:
        if "train_per_subject" not in cv:
            raise ManifestError(f"{path}: [cv] needs train_per_subject")
        m.train_per_subject = int(cv["train_per_subject"])
        m.max_folds = int(cv.get("max_folds", MAX_FOLDS))
        m.seed = int(cv.get("seed", 0))
    return m


def sequence_signature(path, ingest: IngestConfig, cfg: SignatureConfig) -> TopologicalSignature:
    img = load_sequence(path, ingest)
    meta = {"source": str(path), "frames": img.dims[2], "crop_fraction": ingest.crop_fraction}
    return signature(boundary_complex(img), cfg, meta)


def _sign_one(args):
    path, ingest, cfg = args
    return sequence_signature(path, ingest, cfg)


def compute_signatures(samples: Sequence[Sample], ingest: IngestConfig, cfg: SignatureConfig,
                       jobs: int = 1) -> list[TopologicalSignature]:
    for s in samples:
        if not s.path.is_dir():
            raise ManifestError(f"sample directory not found: {s.path}")
    work = [(s.path, ingest, cfg) for s in samples]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sign_one, work))
    return [_sign_one(w) for w in work]


def plan_folds(m: Manifest) -> list[tuple[list[int], list[int]]]:
    """Train/test sample indices (into ``m.active``) for every fold."""
    active = m.active
    fixed_train = [i for i, s in enumerate(active) if s.split == "train"]
    fixed_test = [i for i, s in enumerate(active) if s.split == "test"]
    if m.train_per_subject is None:
        return [(fixed_train, fixed_test)]
    pool: dict = {}
    for i, s in enumerate(active):
        if s.split is None:
            pool.setdefault(s.label, []).append(i)
    if not pool:
        raise ManifestError("[cv] given but no samples without an explicit split")
    sizes = {len(v) for v in pool.values()}
    if len(sizes) != 1:
        raise ManifestError(f"cross-validation needs the same sample count per label, got {sorted(sizes)}")
    for lab in pool:
        pool[lab].sort(key=lambda i: str(active[i].path))
    folds = []
    for combo in cv_folds(sizes.pop(), m.train_per_subject, m.max_folds, m.seed):
        train, test = list(fixed_train), list(fixed_test)
        for lab in sorted(pool):
            idx = pool[lab]
            chosen = set(combo)
            train += [idx[j] for j in range(len(idx)) if j in chosen]
            test += [idx[j] for j in range(len(idx)) if j not in chosen]
        folds.append((train, test))
    return folds


def run_manifest(manifest, jobs: int = 1) -> EvalReport:
    m = manifest if isinstance(manifest, Manifest) else load_manifest(manifest)
    active = m.active
    folds = plan_folds(m)
    try:
        sigs = compute_signatures(active, m.ingest, m.signature, jobs)
    except IngestError as exc:
        raise ManifestError(str(exc)) from exc
    reports = []
    for train, test in folds:
        if not train or not test:
            raise ManifestError("every fold needs at least one training and one test sample")
        reports.append(evaluate_fold([(active[i].label, sigs[i]) for i in train],
                                     [(active[i].label, sigs[i]) for i in test]))
    rep = combine_folds(reports)
    rep.meta = {"n": m.signature.n, "crop_fraction": m.ingest.crop_fraction,
                "threshold": m.ingest.threshold, "exclude": list(m.exclude),
                "train_per_subject": m.train_per_subject}
    return rep
