"""Vectorization, classifier training with grid search, and 3-way decisions."""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.metrics import f1_score
from sklearn.model_selection import StratifiedKFold
from sklearn.naive_bayes import BernoulliNB, ComplementNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.svm import SVC

from .graphs import Eaug
from .isomorphism import is_subgraph
from .lof import LofModel, default_k
from .mining import SubgraphFeature

FeatureVector = tuple[int, ...]

DEFAULT_LOF_THRESHOLD = 1.5

# Grid points are evaluated and tie-broken in this fixed order.
GRID: list[tuple[str, dict]] = (
    [("svm_linear", {"C": c}) for c in (0.1, 1.0, 10.0)]
    + [("svm_rbf", {"C": c, "gamma": g}) for c in (0.1, 1.0, 10.0) for g in (0.1, 1.0)]
    + [("knn", {"n_neighbors": k}) for k in (1, 3, 5)]
    + [("naive_bayes", {"alpha": a}) for a in (0.1, 1.0)]
    + [("complement_bayes", {"alpha": a}) for a in (0.1, 1.0)]
)


class DegenerateTrainingSet(ValueError):
    pass


def vectorize(g: Eaug, features: Sequence[SubgraphFeature]) -> FeatureVector:
    return tuple(1 if is_subgraph(f.pattern, g) else 0 for f in features)


def oversample(
    train: list[tuple[FeatureVector, str]], seed: int
) -> list[tuple[FeatureVector, str]]:
    """Duplicate minority examples (with replacement) until classes balance."""
    by_label: dict[str, list[tuple[FeatureVector, str]]] = {}
    for item in train:
        by_label.setdefault(item[1], []).append(item)
    if len(by_label) < 2:
        raise DegenerateTrainingSet("degenerate training set: only one label present")
    minority, majority = sorted(by_label, key=lambda lbl: len(by_label[lbl]))
    rng = random.Random(seed)
    extra_needed = len(by_label[majority]) - len(by_label[minority])
    extras = [rng.choice(by_label[minority]) for _ in range(extra_needed)]
    out = list(train) + extras
    rng.shuffle(out)
    return out


def _make_estimator(family: str, params: dict, seed: int):
    if family == "svm_linear":
        return SVC(kernel="linear", C=params["C"], probability=True, random_state=seed)
    if family == "svm_rbf":
        return SVC(
            kernel="rbf", C=params["C"], gamma=params["gamma"], probability=True, random_state=seed
        )
    if family == "knn":
        return KNeighborsClassifier(n_neighbors=params["n_neighbors"])
    if family == "naive_bayes":
        return BernoulliNB(alpha=params["alpha"])
    if family == "complement_bayes":
        return ComplementNB(alpha=params["alpha"])
    raise ValueError(f"unknown classifier family {family!r}")


def grid_search(
    train: list[tuple[FeatureVector, str]], seed: int
) -> tuple[dict, list[dict]]:
    """Pick the (family, params) point with the best mean CV F1 (M positive).

    Oversampling happens inside each training fold only. Returns the winning
    descriptor and the per-point report.
    """
    labels = [lbl for _, lbl in train]
    counts = {lbl: labels.count(lbl) for lbl in set(labels)}
    if len(counts) < 2:
        raise DegenerateTrainingSet("degenerate training set: only one label present")
    n_splits = min(5, min(counts.values()))
    if n_splits < 2:
        raise DegenerateTrainingSet("degenerate training set: minority class too small for CV")

    x = np.asarray([v for v, _ in train], dtype=float)
    y = np.asarray(labels)
    skf = StratifiedKFold(n_splits=n_splits, shuffle=True, random_state=seed)
    splits = list(skf.split(x, y))

    report: list[dict] = []
    best = None
    for order, (family, params) in enumerate(GRID):
        fold_scores = []
        for train_idx, test_idx in splits:
            fold_train = [(tuple(map(int, x[i])), str(y[i])) for i in train_idx]
            balanced = oversample(fold_train, seed)
            bx = np.asarray([v for v, _ in balanced], dtype=float)
            by = np.asarray([lbl for _, lbl in balanced])
            est = _make_estimator(family, params, seed)
            est.fit(bx, by)
            pred = est.predict(x[test_idx])
            fold_scores.append(
                float(f1_score(y[test_idx], pred, pos_label="M", zero_division=0))
            )
        mean_f1 = float(np.mean(fold_scores))
        report.append(
            {
                "family": family,
                "params": params,
                "mean_f1": mean_f1,
                "fold_scores": fold_scores,
                "n_splits": n_splits,
            }
        )
        key = (-mean_f1, order)
        if best is None or key < best[0]:
            best = (key, {"family": family, "params": params, "mean_f1": mean_f1})
    return best[1], report


@dataclass
class Decision:
    label: str  # "C", "M", or "U"
    outlier_factor: float
    class_scores: dict[str, float]


@dataclass
class ModelBundle:
    """The deployable misuse model for one API."""

    api: str
    features: list[SubgraphFeature]
    classifier: dict  # {"family", "params", "mean_f1"}
    train_vectors: list[FeatureVector]
    train_labels: list[str]
    lof_k: int
    lof_threshold: float
    training_report: list[dict]
    seed: int
    _estimator: object = field(default=None, repr=False, compare=False)
    _lof: Optional[LofModel] = field(default=None, repr=False, compare=False)

    def _ensure_fitted(self):
        if self._estimator is None:
            balanced = oversample(
                list(zip(self.train_vectors, self.train_labels)), self.seed
            )
            bx = np.asarray([v for v, _ in balanced], dtype=float)
            by = np.asarray([lbl for _, lbl in balanced])
            est = _make_estimator(
                self.classifier["family"], self.classifier["params"], self.seed
            )
            est.fit(bx, by)
            self._estimator = est
        if self._lof is None:
            self._lof = LofModel(list(self.train_vectors), self.lof_k)

    def outlier_factor(self, v: FeatureVector) -> float:
        self._ensure_fitted()
        return self._lof.factor(v)

    def to_jsonable(self) -> dict:
        return {
            "version": 1,
            "api": self.api,
            "features": [f.to_jsonable() for f in self.features],
            "classifier": self.classifier,
            "train_vectors": [list(v) for v in self.train_vectors],
            "train_labels": list(self.train_labels),
            "lof_k": self.lof_k,
            "lof_threshold": self.lof_threshold,
            "training_report": self.training_report,
            "seed": self.seed,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "ModelBundle":
        if d.get("version") != 1:
            raise ValueError("unsupported model file version")
        return cls(
            api=d["api"],
            features=[SubgraphFeature.from_jsonable(f) for f in d["features"]],
            classifier=d["classifier"],
            train_vectors=[tuple(v) for v in d["train_vectors"]],
            train_labels=list(d["train_labels"]),
            lof_k=int(d["lof_k"]),
            lof_threshold=float(d["lof_threshold"]),
            training_report=d["training_report"],
            seed=int(d["seed"]),
        )


def train_model(
    api: str,
    features: list[SubgraphFeature],
    examples: list[tuple[Eaug, str]],
    seed: int = 0,
    lof_k: Optional[int] = None,
    lof_threshold: float = DEFAULT_LOF_THRESHOLD,
) -> ModelBundle:
    if not features:
        raise ValueError("no features selected; cannot train")
    train = [(vectorize(g, features), lbl) for g, lbl in examples]
    descriptor, report = grid_search(train, seed)
    vectors = [v for v, _ in train]
    k = lof_k if lof_k is not None else default_k(len(vectors))
    bundle = ModelBundle(
        api=api,
        features=features,
        classifier=descriptor,
        train_vectors=vectors,
        train_labels=[lbl for _, lbl in train],
        lof_k=k,
        lof_threshold=lof_threshold,
        training_report=report,
        seed=seed,
    )
    bundle._ensure_fitted()
    return bundle


def classify(model: ModelBundle, g: Eaug) -> Decision:
    """Three-way decision: the novelty gate rejects before the classifier runs."""
    model._ensure_fitted()
    v = vectorize(g, model.features)
    factor = model._lof.factor(v)
    if factor > model.lof_threshold:
        return Decision(label="U", outlier_factor=factor, class_scores={})
    est = model._estimator
    x = np.asarray([v], dtype=float)
    label = str(est.predict(x)[0])
    proba = est.predict_proba(x)[0]
    scores = {str(cls): float(p) for cls, p in zip(est.classes_, proba)}
    return Decision(label=label, outlier_factor=factor, class_scores=scores)


def rank_findings(
    decisions: list[tuple[str, Decision]], n: int, seed: int
) -> list[str]:
    """Sample misuse findings inversely weighted by outlier factor."""
    misuses = [(ex_id, d) for ex_id, d in decisions if d.label == "M"]
    if n >= len(misuses):
        return [ex_id for ex_id, _ in sorted(misuses, key=lambda p: (p[1].outlier_factor, p[0]))]
    rng = random.Random(seed)
    pool = list(misuses)
    picked: list[str] = []
    while len(picked) < n and pool:
        weights = [0.0 if math.isinf(d.outlier_factor) else 1.0 / d.outlier_factor for _, d in pool]
        total = sum(weights)
        if total <= 0:
            weights = [1.0] * len(pool)
            total = float(len(pool))
        r = rng.random() * total
        acc = 0.0
        idx = len(pool) - 1
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                idx = i
                break
        picked.append(pool.pop(idx)[0])
    return picked


def save_model(model: ModelBundle, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(model.to_jsonable(), fh, sort_keys=True)
    os.replace(tmp, path)


def load_model(path: str) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as fh:
        return ModelBundle.from_jsonable(json.load(fh))
