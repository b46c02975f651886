"""Query selection for the labeling loop: coverage, support floor, batches."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .corpus import Corpus
from .dfscode import DfsCode
from .graphs import Eaug
from .isomorphism import is_subgraph
from .mining import MinerConfig, SubgraphFeature, SupportStats, chi_square, critical_value

EXACT_MODE_LIMIT = 20  # candidate-graph count up to which batch selection is exhaustive


@dataclass(frozen=True)
class SelectorConfig:
    batch_fraction: float = 0.005
    label_budget_fraction: float = 0.05
    coverage_target: float = 0.95
    initial_batch: int = 30
    alpha: float = 0.05

    def __post_init__(self):
        if not (0 < self.batch_fraction <= self.label_budget_fraction <= 1):
            raise ValueError("invalid batch/budget fractions")
        if not (0 < self.coverage_target <= 1):
            raise ValueError("invalid coverage target")

    def to_dict(self) -> dict:
        return {
            "batch_fraction": self.batch_fraction,
            "label_budget_fraction": self.label_budget_fraction,
            "coverage_target": self.coverage_target,
            "initial_batch": self.initial_batch,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectorConfig":
        return cls(**d)


@dataclass
class LabelSession:
    corpus_ref: str
    config: SelectorConfig
    miner_config: MinerConfig
    rng_seed: int
    labels: dict[str, str] = field(default_factory=dict)  # id -> "C" | "M"
    pending_batch: list[str] = field(default_factory=list)
    iteration: int = 0
    selected_features: list[SubgraphFeature] = field(default_factory=list)
    candidate_patterns: list[tuple[DfsCode, frozenset[str]]] = field(default_factory=list)
    stopped: Optional[str] = None
    events: list[dict] = field(default_factory=list)

    @property
    def labeled_ids(self) -> set[str]:
        return set(self.labels)

    def to_jsonable(self) -> dict:
        return {
            "corpus_ref": self.corpus_ref,
            "config": self.config.to_dict(),
            "miner_config": self.miner_config.to_dict(),
            "rng_seed": self.rng_seed,
            "labels": dict(sorted(self.labels.items())),
            "pending_batch": list(self.pending_batch),
            "iteration": self.iteration,
            "selected_features": [f.to_jsonable() for f in self.selected_features],
            "candidate_patterns": [
                {"dfs_code": code.to_jsonable(), "graph_ids": sorted(ids)}
                for code, ids in self.candidate_patterns
            ],
            "stopped": self.stopped,
            "events": self.events,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "LabelSession":
        return cls(
            corpus_ref=d["corpus_ref"],
            config=SelectorConfig.from_dict(d["config"]),
            miner_config=MinerConfig.from_dict(d["miner_config"]),
            rng_seed=int(d["rng_seed"]),
            labels=dict(d["labels"]),
            pending_batch=list(d["pending_batch"]),
            iteration=int(d["iteration"]),
            selected_features=[SubgraphFeature.from_jsonable(f) for f in d["selected_features"]],
            candidate_patterns=[
                (DfsCode.from_jsonable(c["dfs_code"]), frozenset(c["graph_ids"]))
                for c in d["candidate_patterns"]
            ],
            stopped=d.get("stopped"),
            events=list(d.get("events", [])),
        )


def initial_sample(corpus: Corpus, cfg: SelectorConfig, seed: int) -> list[str]:
    """Uniform sample without replacement of the first query batch."""
    ids = sorted(ex.id for ex in corpus.examples)
    k = min(cfg.initial_batch, len(ids))
    return random.Random(seed).sample(ids, k)


def compute_min_signif(n_c: int, n_m: int, alpha: float = 0.05) -> Optional[int]:
    """Smallest one-class support at which significance is attainable.

    Enumerates k from 1 upward, assigning all k hits to whichever class
    admits them most favorably. None when no k up to the larger class size
    reaches the threshold.
    """
    threshold = critical_value(alpha)
    for k in range(1, max(n_c, n_m) + 1):
        best = 0.0
        if k <= n_c:
            best = max(best, chi_square(SupportStats(k, n_c - k, 0, n_m)))
        if k <= n_m:
            best = max(best, chi_square(SupportStats(0, n_c, k, n_m - k)))
        if best >= threshold:
            return k
    return None


def coverage(features: Sequence[SubgraphFeature], corpus: Corpus) -> float:
    """Fraction of corpus examples containing at least one selected feature."""
    if len(corpus) == 0:
        return 1.0
    covered = sum(
        1
        for ex in corpus.examples
        if any(is_subgraph(f.pattern, ex.graph) for f in features)
    )
    return covered / len(corpus)


def covered_ids(features: Sequence[SubgraphFeature], corpus: Corpus) -> set[str]:
    return {
        ex.id
        for ex in corpus.examples
        if any(is_subgraph(f.pattern, ex.graph) for f in features)
    }


def _objective(
    selected: frozenset[str],
    patterns: list[tuple[DfsCode, frozenset[str]]],
    n: int,
) -> int:
    covered: set[str] = set()
    for _, carriers in patterns:
        if len(carriers & selected) >= n:
            covered |= carriers
    return len(covered)


def batch_budget(cfg: SelectorConfig, corpus_size: int) -> int:
    return math.ceil(cfg.batch_fraction * corpus_size)


def select_batch(session: LabelSession, corpus: Corpus) -> list[str]:
    """Pick the next query batch by maximizing pattern-qualified coverage.

    Exhaustive for small instances, greedy (pattern-wise, best coverage per
    label) otherwise. Deterministic for a fixed session seed.
    """
    n_c = sum(1 for lbl in session.labels.values() if lbl == "C")
    n_m = sum(1 for lbl in session.labels.values() if lbl == "M")
    n = compute_min_signif(n_c, n_m, session.config.alpha)
    if n is None:
        n = 1  # nothing labeled yet; any carrier is worth asking about
    s = batch_budget(session.config, len(corpus))

    labeled = session.labeled_ids
    patterns = [
        (code, carriers)
        for code, carriers in sorted(session.candidate_patterns, key=lambda p: p[0].sort_key())
        if len(carriers) >= n
    ]
    if not patterns:
        return []
    candidate_graphs = sorted(set().union(*(c for _, c in patterns)))
    selectable = sorted(set(candidate_graphs) - labeled)
    if not selectable:
        return []

    if len(candidate_graphs) <= EXACT_MODE_LIMIT:
        best_ids: list[str] = []
        best_obj = -1
        for size in range(0, min(s, len(selectable)) + 1):
            for combo in combinations(selectable, size):
                obj = _objective(frozenset(combo), patterns, n)
                if obj > best_obj:
                    best_obj = obj
                    best_ids = list(combo)
        return best_ids

    return _greedy_batch(patterns, selectable, n, s, session)


def _greedy_batch(
    patterns: list[tuple[DfsCode, frozenset[str]]],
    selectable: list[str],
    n: int,
    s: int,
    session: LabelSession,
) -> list[str]:
    rng = random.Random(f"{session.rng_seed}:{session.iteration}")
    shuffled = list(selectable)
    rng.shuffle(shuffled)
    rank = {gid: k for k, gid in enumerate(shuffled)}

    selected: set[str] = set()
    covered: set[str] = set()
    budget = s
    remaining = list(patterns)
    while budget > 0 and remaining:
        best = None
        for code, carriers in remaining:
            need = max(0, n - len(carriers & selected))
            available = sorted(set(carriers) & set(rank) - selected, key=lambda g: rank[g])
            if need > budget or len(available) < need:
                continue
            gain = len(carriers - covered)
            if gain == 0 and need > 0:
                continue
            ratio = gain / max(need, 1)
            key = (-ratio, -gain, code.sort_key())
            if best is None or key < best[0]:
                best = (key, code, carriers, available[:need])
        if best is None:
            break
        _, code, carriers, picks = best
        selected.update(picks)
        budget -= len(picks)
        covered |= carriers
        remaining = [(c, cs) for c, cs in remaining if c != code]
    return sorted(selected)


def stopping_check(session: LabelSession, corpus: Corpus) -> tuple[str, Optional[str]]:
    """Return ("continue", None) or ("stop", reason)."""
    if coverage(session.selected_features, corpus) > session.config.coverage_target:
        return ("stop", "coverage")
    if len(session.labeled_ids) >= session.config.label_budget_fraction * len(corpus):
        return ("stop", "budget")
    if not select_batch(session, corpus):
        return ("stop", "exhausted")
    return ("continue", None)
