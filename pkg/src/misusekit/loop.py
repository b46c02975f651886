"""Session driver: orchestrates mining, feature selection, and querying."""

from __future__ import annotations

import json
import os
import time
from typing import Optional

from .corpus import Corpus
from .mining import MinerConfig, cork_select, mine_discriminative, mine_frequent
from .selection import (
    LabelSession,
    SelectorConfig,
    covered_ids,
    coverage,
    initial_sample,
    select_batch,
    stopping_check,
)


class SessionError(RuntimeError):
    pass


def _append_event(session: LabelSession, kind: str, payload: dict) -> dict:
    ts = time.time()
    if session.events:
        ts = max(ts, session.events[-1]["timestamp"] + 1e-6)
    event = {"kind": kind, "timestamp": ts, "payload": payload}
    session.events.append(event)
    return event


def start_session(
    corpus: Corpus,
    corpus_ref: str,
    selector_cfg: Optional[SelectorConfig] = None,
    miner_cfg: Optional[MinerConfig] = None,
    seed: int = 0,
) -> tuple[LabelSession, dict]:
    """Create a session and issue the initial random batch."""
    session = LabelSession(
        corpus_ref=corpus_ref,
        config=selector_cfg or SelectorConfig(),
        miner_config=miner_cfg or MinerConfig(),
        rng_seed=seed,
    )
    session.pending_batch = initial_sample(corpus, session.config, seed)
    event = _append_event(session, "batch_issued", {"ids": list(session.pending_batch)})
    return session, event


def submit_labels(session: LabelSession, labels: dict[str, str]) -> dict:
    """Record annotator labels for ids in the pending batch."""
    if session.stopped:
        raise SessionError("session already stopped")
    pending = set(session.pending_batch)
    bad = [i for i in labels if i not in pending]
    if bad:
        raise SessionError(f"labels for non-pending ids: {sorted(bad)}")
    bad_values = {i: v for i, v in labels.items() if v not in ("C", "M")}
    if bad_values:
        raise SessionError(f"labels must be 'C' or 'M': {bad_values}")
    session.labels.update(labels)
    session.pending_batch = [i for i in session.pending_batch if i not in labels]
    return _append_event(session, "labels_received", {"labels": dict(sorted(labels.items()))})


def step_session(session: LabelSession, corpus: Corpus) -> dict:
    """Consume the labeled batch: re-mine, update features, query or stop."""
    if session.stopped:
        raise SessionError("session already stopped")
    if session.pending_batch:
        raise SessionError("batch incomplete")
    if not session.labels:
        raise SessionError("no labels submitted yet")

    session.iteration += 1

    labeled = {
        ex.id: ex.graph for ex in corpus.examples if ex.id in session.labels
    }
    labels = {gid: session.labels[gid] for gid in labeled}
    unlabeled = {
        ex.id: ex.graph for ex in corpus.examples if ex.id not in session.labels
    }

    significant = mine_discriminative(
        list(labeled.values()), labels, session.miner_config, ids=list(labeled), prune=True
    )
    session.selected_features = cork_select(
        significant,
        labeled,
        labels,
        unlabeled_graphs=unlabeled,
        initial=session.selected_features,
    )
    cov = coverage(session.selected_features, corpus)
    _append_event(
        session,
        "features_updated",
        {"n_features": len(session.selected_features), "coverage": cov},
    )

    if cov > session.config.coverage_target:
        session.stopped = "coverage"
        return _append_event(session, "stopped", {"reason": "coverage", "coverage": cov})
    if len(session.labeled_ids) >= session.config.label_budget_fraction * len(corpus):
        session.stopped = "budget"
        return _append_event(
            session, "stopped", {"reason": "budget", "labeled": len(session.labeled_ids)}
        )

    # Candidates are re-mined from the part of the corpus the current
    # features do not yet cover.
    covered = covered_ids(session.selected_features, corpus)
    uncovered = [ex for ex in corpus.examples if ex.id not in covered]
    session.candidate_patterns = mine_frequent(
        [ex.graph for ex in uncovered],
        session.miner_config,
        ids=[ex.id for ex in uncovered],
    )
    batch = select_batch(session, corpus)
    if not batch:
        session.stopped = "exhausted"
        return _append_event(session, "stopped", {"reason": "exhausted"})
    session.pending_batch = batch
    return _append_event(session, "batch_issued", {"ids": list(batch)})


def save_session(session: LabelSession, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(session.to_jsonable(), fh, sort_keys=True, indent=None)
    os.replace(tmp, path)


def load_session(path: str) -> LabelSession:
    with open(path, "r", encoding="utf-8") as fh:
        return LabelSession.from_jsonable(json.load(fh))
