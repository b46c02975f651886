"""Frequent and discriminative subgraph mining.

Enumeration follows gSpan: patterns grow by rightmost-path extension in
canonical (minimum DFS code) order, so each pattern is visited exactly once.
Discriminative mining additionally scores each pattern's 2x2 label table and
can prune branches whose best achievable chi-square falls below the
significance threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from scipy.stats import chi2 as _chi2_dist

from .dfscode import DfsCode, _State, _adjacency, _extensions, _tuple_key, graph_of, min_dfs_code
from .graphs import Eaug
from .isomorphism import is_subgraph


@dataclass(frozen=True)
class SupportStats:
    c_hit: int
    c_miss: int
    m_hit: int
    m_miss: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.c_hit, self.c_miss, self.m_hit, self.m_miss)


@dataclass(frozen=True)
class MinerConfig:
    min_sup: int = 3
    max_edges: int = 6
    alpha: float = 0.05

    def __post_init__(self):
        if self.min_sup < 1 or self.max_edges < 1 or not (0 < self.alpha < 1):
            raise ValueError("invalid miner config")

    @property
    def critical_value(self) -> float:
        return critical_value(self.alpha)

    def to_dict(self) -> dict:
        return {"min_sup": self.min_sup, "max_edges": self.max_edges, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "MinerConfig":
        return cls(**d)


@dataclass
class SubgraphFeature:
    code: DfsCode
    pattern: Eaug
    stats: SupportStats
    chi2: float
    graph_ids: frozenset[str]

    def to_jsonable(self) -> dict:
        return {
            "dfs_code": self.code.to_jsonable(),
            "pattern": self.pattern.to_dict(),
            "stats": list(self.stats.as_tuple()),
            "chi2": self.chi2,
            "graph_ids": sorted(self.graph_ids),
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "SubgraphFeature":
        return cls(
            code=DfsCode.from_jsonable(d["dfs_code"]),
            pattern=Eaug.from_dict(d["pattern"]),
            stats=SupportStats(*d["stats"]),
            chi2=float(d["chi2"]),
            graph_ids=frozenset(d["graph_ids"]),
        )


def critical_value(alpha: float) -> float:
    """Chi-square critical value at df=1 (3.8415 for alpha=0.05)."""
    return float(_chi2_dist.ppf(1.0 - alpha, df=1))


def chi_square(stats: SupportStats) -> float:
    """Pearson chi-square over the 2x2 {C,M} x {hit,miss} table.

    Zero when any row or column marginal is zero (the table is degenerate
    and carries no evidence either way).
    """
    a, b, c, d = stats.as_tuple()
    n = a + b + c + d
    row_c, row_m = a + b, c + d
    col_h, col_m = a + c, b + d
    if n == 0 or row_c == 0 or row_m == 0 or col_h == 0 or col_m == 0:
        return 0.0
    total = 0.0
    for obs, row, col in ((a, row_c, col_h), (b, row_c, col_m), (c, row_m, col_h), (d, row_m, col_m)):
        expected = row * col / n
        total += (obs - expected) ** 2 / expected
    return total


def significance_upper_bound(stats: SupportStats) -> float:
    """Best chi-square any supergraph on this branch can still reach.

    Supergraph hits are component-wise at most the current hits; the optimum
    keeps one class's hits and drops the other's to zero.
    """
    total_c = stats.c_hit + stats.c_miss
    total_m = stats.m_hit + stats.m_miss
    keep_c = chi_square(SupportStats(stats.c_hit, total_c - stats.c_hit, 0, total_m))
    keep_m = chi_square(SupportStats(0, total_c, stats.m_hit, total_m - stats.m_hit))
    return max(keep_c, keep_m)


def _stats_from_ids(ids: frozenset[str], labels: dict[str, str]) -> SupportStats:
    c_hit = sum(1 for g, lbl in labels.items() if lbl == "C" and g in ids)
    m_hit = sum(1 for g, lbl in labels.items() if lbl == "M" and g in ids)
    n_c = sum(1 for lbl in labels.values() if lbl == "C")
    n_m = sum(1 for lbl in labels.values() if lbl == "M")
    return SupportStats(c_hit, n_c - c_hit, m_hit, n_m - m_hit)


def mine_frequent(
    graphs: Sequence[Eaug],
    cfg: MinerConfig,
    ids: Optional[Sequence[str]] = None,
    labels: Optional[dict[str, str]] = None,
    prune_below: Optional[float] = None,
) -> list[tuple[DfsCode, frozenset[str]]]:
    """Enumerate connected subgraph patterns contained in >= min_sup graphs.

    Support counts each graph once (transaction support). Single-node
    patterns are included. Output is sorted by canonical code. When
    prune_below is given (with labels), branches whose significance upper
    bound is already below that threshold are not extended.
    """
    if ids is None:
        ids = [str(i) for i in range(len(graphs))]
    results: list[tuple[DfsCode, frozenset[str]]] = []

    # Single-node patterns.
    label_support: dict[tuple, set[str]] = {}
    for gid, g in zip(ids, graphs):
        for n in g.nodes:
            label_support.setdefault(n.match_label, set()).add(gid)
    for lbl, support in label_support.items():
        if len(support) >= cfg.min_sup:
            results.append((DfsCode(node_label=lbl), frozenset(support)))

    graph_by_id = dict(zip(ids, graphs))
    node_labels = {gid: {n.id: n.match_label for n in g.nodes} for gid, g in graph_by_id.items()}
    adjs = {gid: _adjacency(g) for gid, g in graph_by_id.items()}

    # Seed single-edge states grouped by oriented tuple.
    seeds: dict[tuple, list[tuple[str, _State]]] = {}
    for gid, g in graph_by_id.items():
        lbls = node_labels[gid]
        for eidx, e in enumerate(g.edges):
            for first, second, d in ((e.src, e.dst, 0), (e.dst, e.src, 1)):
                if first == second:
                    continue
                t = (0, 1, lbls[first], e.kind.value, lbls[second], d)
                seeds.setdefault(t, []).append(
                    (gid, _State((first, second), frozenset([eidx]), (0, 1)))
                )

    def grow(code_tuples: tuple, states: list[tuple[str, _State]]):
        code = DfsCode(tuples=code_tuples)
        support = frozenset(gid for gid, _ in states)
        results.append((code, support))
        if prune_below is not None and labels is not None:
            bound = significance_upper_bound(_stats_from_ids(support, labels))
            if bound < prune_below:
                return
        if len(code_tuples) >= cfg.max_edges:
            return
        exts: dict[tuple, list[tuple[str, _State]]] = {}
        for gid, st in states:
            for t, new_st in _extensions(graph_by_id[gid], node_labels[gid], adjs[gid], st):
                exts.setdefault(t, []).append((gid, new_st))
        for t in sorted(exts, key=_tuple_key):
            ext_states = exts[t]
            if len({gid for gid, _ in ext_states}) < cfg.min_sup:
                continue
            candidate = code_tuples + (t,)
            if min_dfs_code(graph_of(DfsCode(tuples=candidate))).tuples == candidate:
                grow(candidate, ext_states)

    for t in sorted(seeds, key=_tuple_key):
        states = seeds[t]
        if len({gid for gid, _ in states}) < cfg.min_sup:
            continue
        candidate = (t,)
        if min_dfs_code(graph_of(DfsCode(tuples=candidate))).tuples == candidate:
            grow(candidate, states)

    results.sort(key=lambda r: r[0].sort_key())
    return results


def mine_discriminative(
    graphs: Sequence[Eaug],
    labels: dict[str, str],
    cfg: MinerConfig,
    ids: Optional[Sequence[str]] = None,
    prune: bool = True,
) -> list[SubgraphFeature]:
    """Mine frequent patterns from labeled graphs and keep the significant ones."""
    threshold = cfg.critical_value
    mined = mine_frequent(
        graphs,
        cfg,
        ids=ids,
        labels=labels,
        prune_below=threshold if prune else None,
    )
    features = []
    for code, support in mined:
        stats = _stats_from_ids(support, labels)
        score = chi_square(stats)
        if score >= threshold:
            features.append(
                SubgraphFeature(
                    code=code,
                    pattern=graph_of(code),
                    stats=stats,
                    chi2=score,
                    graph_ids=support,
                )
            )
    return features


def filter_significant(patterns: list[SubgraphFeature], cfg: MinerConfig) -> list[SubgraphFeature]:
    threshold = cfg.critical_value
    return [p for p in patterns if p.chi2 >= threshold]


def correspondence_count(
    vectors: dict[str, tuple[int, ...]], labels: dict[str, str]
) -> int:
    """Number of (C, M) example pairs with identical feature vectors."""
    groups: dict[tuple, list[int]] = {}
    for gid, vec in vectors.items():
        bucket = groups.setdefault(vec, [0, 0])
        if labels[gid] == "C":
            bucket[0] += 1
        else:
            bucket[1] += 1
    return sum(nc * nm for nc, nm in groups.values())


def cork_select(
    candidates: list[SubgraphFeature],
    labeled_graphs: dict[str, Eaug],
    labels: dict[str, str],
    unlabeled_graphs: Optional[dict[str, Eaug]] = None,
    initial: Optional[list[SubgraphFeature]] = None,
) -> list[SubgraphFeature]:
    """Greedy CORK feature selection.

    Candidates are walked in decreasing coverage of the unlabeled dataset
    (ties: higher chi2, then canonical code) and appended iff they strictly
    reduce the number of label-discordant example pairs that the selected
    features cannot tell apart.
    """
    unlabeled_graphs = unlabeled_graphs or {}

    def unlabeled_coverage(f: SubgraphFeature) -> int:
        return sum(1 for g in unlabeled_graphs.values() if is_subgraph(f.pattern, g))

    ordered = sorted(
        candidates,
        key=lambda f: (-unlabeled_coverage(f), -f.chi2, f.code.sort_key()),
    )

    selected: list[SubgraphFeature] = list(initial or [])
    vectors: dict[str, list[int]] = {
        gid: [1 if is_subgraph(f.pattern, g) else 0 for f in selected]
        for gid, g in labeled_graphs.items()
    }
    current = correspondence_count(
        {gid: tuple(v) for gid, v in vectors.items()}, labels
    )
    selected_codes = {f.code for f in selected}
    for f in ordered:
        if f.code in selected_codes:
            continue
        bits = {gid: 1 if is_subgraph(f.pattern, g) else 0 for gid, g in labeled_graphs.items()}
        trial = correspondence_count(
            {gid: tuple(vectors[gid]) + (bits[gid],) for gid in vectors}, labels
        )
        if trial < current:
            selected.append(f)
            selected_codes.add(f.code)
            for gid in vectors:
                vectors[gid].append(bits[gid])
            current = trial
    return selected
