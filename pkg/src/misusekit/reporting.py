"""Model training from a finished session and classification reports."""

from __future__ import annotations

import json
import math
import os
from typing import Optional

from .classify import (
    ModelBundle,
    classify,
    rank_findings,
    train_model,
    vectorize,
)
from .config import ToolConfig
from .corpus import Corpus
from .loop import SessionError
from .selection import LabelSession


def train_from_session(
    session: LabelSession,
    corpus: Corpus,
    cfg: Optional[ToolConfig] = None,
    seed: Optional[int] = None,
) -> ModelBundle:
    if not session.stopped:
        raise SessionError("session not stopped yet; finish labeling first")
    cfg = cfg or ToolConfig.default()
    examples = [
        (corpus.by_id(ex_id).graph, lbl) for ex_id, lbl in sorted(session.labels.items())
    ]
    return train_model(
        api=corpus.api,
        features=session.selected_features,
        examples=examples,
        seed=session.rng_seed if seed is None else seed,
        lof_k=cfg.lof_k,
        lof_threshold=cfg.lof_threshold,
    )


def _factor_jsonable(factor: float):
    return None if math.isinf(factor) else factor


def build_report(
    model: ModelBundle, corpus: Corpus, top_n: Optional[int] = None, seed: int = 0
) -> dict:
    results = []
    decisions = []
    counts = {"C": 0, "M": 0, "U": 0}
    for ex in corpus.examples:
        d = classify(model, ex.graph)
        decisions.append((ex.id, d))
        counts[d.label] += 1
        bits = vectorize(ex.graph, model.features)
        results.append(
            {
                "id": ex.id,
                "decision": d.label,
                "outlier_factor": _factor_jsonable(d.outlier_factor),
                "class_scores": d.class_scores,
                "matched_features": [i for i, b in enumerate(bits) if b],
            }
        )
    report = {"api": model.api, "results": results, "summary": counts}
    if top_n is not None:
        report["top_findings"] = rank_findings(decisions, top_n, seed)
    return report


def save_report(report: dict, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True)
    os.replace(tmp, path)
