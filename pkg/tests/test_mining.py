import random

import pytest

from misusekit.dfscode import min_dfs_code
from misusekit.graphs import Eaug, Edge, EdgeKind, Node, NodeKind
from misusekit.mining import (
    MinerConfig,
    SupportStats,
    chi_square,
    cork_select,
    correspondence_count,
    critical_value,
    filter_significant,
    mine_discriminative,
    mine_frequent,
    significance_upper_bound,
)

from conftest import random_eaug
from oracles import brute_force_frequent, chi2_shortcut


def canon(g):
    code = min_dfs_code(g)
    return code.node_label if code.node_label else code.tuples


def single_edge_graph(suffix=""):
    return Eaug(
        [Node(f"a{suffix}", NodeKind.ACTION, "A"), Node(f"b{suffix}", NodeKind.DATA, "B")],
        [Edge(f"a{suffix}", f"b{suffix}", EdgeKind.DEF)],
    )


# --------------------------------------------------------------- chi-square

def test_chi_square_worked_values():
    assert chi_square(SupportStats(10, 10, 10, 10)) == 0.0
    assert chi_square(SupportStats(0, 20, 0, 20)) == 0.0
    assert chi_square(SupportStats(30, 10, 2, 18)) == pytest.approx(22.634, abs=1e-3)


def test_chi_square_matches_shortcut_oracle(rng):
    for _ in range(1000):
        a, b, c, d = (rng.randint(0, 40) for _ in range(4))
        assert chi_square(SupportStats(a, b, c, d)) == pytest.approx(
            chi2_shortcut(a, b, c, d), abs=1e-9
        )


def test_chi_square_symmetric_under_class_swap(rng):
    for _ in range(200):
        a, b, c, d = (rng.randint(0, 20) for _ in range(4))
        assert chi_square(SupportStats(a, b, c, d)) == pytest.approx(
            chi_square(SupportStats(c, d, a, b)), abs=1e-12
        )


def test_critical_value_alpha_05():
    assert critical_value(0.05) == pytest.approx(3.8415, abs=1e-4)


# --------------------------------------------------------------- upper bound

def test_upper_bound_worked_values():
    assert significance_upper_bound(SupportStats(0, 40, 0, 20)) == 0.0
    assert significance_upper_bound(SupportStats(5, 35, 5, 15)) == pytest.approx(
        10.909, abs=1e-3
    )


def test_upper_bound_dominates_hit_reductions_exhaustively():
    for total_c in range(0, 11):
        for total_m in range(0, 11):
            for c_hit in range(0, total_c + 1):
                for m_hit in range(0, total_m + 1):
                    stats = SupportStats(c_hit, total_c - c_hit, m_hit, total_m - m_hit)
                    bound = significance_upper_bound(stats)
                    for c2 in range(0, c_hit + 1):
                        for m2 in range(0, m_hit + 1):
                            sub = SupportStats(c2, total_c - c2, m2, total_m - m2)
                            assert bound >= chi_square(sub) - 1e-12


# --------------------------------------------------------------- mining

def test_three_identical_single_edge_graphs():
    graphs = [single_edge_graph(str(i)) for i in range(3)]
    out = mine_frequent(graphs, MinerConfig(min_sup=3))
    keys = {code.node_label or code.tuples for code, _ in out}
    assert len(out) == 3  # {A}, {B}, {A-def->B}
    assert ("action", "A", "none") in keys
    assert ("data", "B", "none") in keys
    for _, support in out:
        assert support == frozenset({"0", "1", "2"})


def test_support_bound_excludes_rare_patterns():
    graphs = [single_edge_graph(str(i)) for i in range(2)]
    assert mine_frequent(graphs, MinerConfig(min_sup=3)) == []


def test_empty_corpus():
    assert mine_frequent([], MinerConfig()) == []


def test_matches_brute_force_oracle(rng):
    for trial in range(25):
        n = rng.randint(2, 6)
        graphs = [random_eaug(rng, max_nodes=5, max_edges=6) for _ in range(n)]
        ids = [str(i) for i in range(n)]
        cfg = MinerConfig(min_sup=rng.randint(1, 3), max_edges=rng.randint(1, 6))
        mined = {
            (code.node_label or code.tuples): support
            for code, support in mine_frequent(graphs, cfg, ids=ids)
        }
        expected = brute_force_frequent(graphs, ids, cfg.min_sup, cfg.max_edges, canon)
        assert mined == expected


def test_output_sorted_and_anti_monotone(rng):
    graphs = [random_eaug(rng, max_nodes=5, max_edges=6, connected=True) for _ in range(6)]
    out = mine_frequent(graphs, MinerConfig(min_sup=2))
    codes = [code for code, _ in out]
    assert codes == sorted(codes, key=lambda c: c.sort_key())
    support = {code: s for code, s in out}
    # every sub-code prefix relationship implies support containment is not
    # directly checkable here; check the global anti-monotone bound instead:
    sizes = {code: len(code.tuples) if code.tuples else 0 for code in support}
    max_single = max(
        (len(s) for c, s in support.items() if sizes[c] == 0), default=0
    )
    for code, s in support.items():
        assert len(s) <= len(graphs)
        if sizes[code] > 0:
            assert len(s) <= max_single


def test_pruned_and_unpruned_discriminative_sets_agree(rng):
    for _ in range(15):
        n = rng.randint(4, 8)
        graphs = [random_eaug(rng, max_nodes=5, max_edges=5) for _ in range(n)]
        ids = [str(i) for i in range(n)]
        labels = {gid: rng.choice(["C", "M"]) for gid in ids}
        cfg = MinerConfig(min_sup=2)
        pruned = mine_discriminative(graphs, labels, cfg, ids=ids, prune=True)
        unpruned = mine_discriminative(graphs, labels, cfg, ids=ids, prune=False)
        assert [(f.code, f.stats) for f in pruned] == [(f.code, f.stats) for f in unpruned]


def test_feature_invariants(rng):
    graphs = [random_eaug(rng, max_nodes=4, max_edges=4) for _ in range(6)]
    ids = [str(i) for i in range(6)]
    labels = {gid: ("C" if int(gid) % 2 else "M") for gid in ids}
    cfg = MinerConfig(min_sup=2)
    for f in mine_discriminative(graphs, labels, cfg, ids=ids):
        assert f.chi2 == pytest.approx(chi_square(f.stats), abs=1e-12)
        assert len(f.graph_ids) == f.stats.c_hit + f.stats.m_hit
        assert len(f.pattern.edges) <= cfg.max_edges
        assert f.chi2 >= cfg.critical_value


def test_filter_significant_threshold():
    keep = SupportStats(10, 0, 0, 10)
    drop = SupportStats(5, 5, 5, 5)
    assert chi_square(keep) == pytest.approx(20.0)
    feats = mine_discriminative(
        [single_edge_graph(str(i)) for i in range(4)],
        {"0": "C", "1": "C", "2": "M", "3": "M"},
        MinerConfig(min_sup=2),
        ids=["0", "1", "2", "3"],
    )
    assert feats == []  # universal patterns are never significant
    assert chi_square(drop) == 0.0


# --------------------------------------------------------------- CORK

def graphs_with(pattern_labels):
    """One graph per entry: a graph holding single-node actions for each label."""
    out = {}
    for gid, labels in pattern_labels.items():
        nodes = [Node(f"{gid}_{k}", NodeKind.ACTION, lbl) for k, lbl in enumerate(labels)]
        out[gid] = Eaug(nodes, [])
    return out


def feature_for(label, labeled, labels):
    pattern = Eaug([Node("p", NodeKind.ACTION, label)], [])
    from misusekit.isomorphism import is_subgraph

    hits = {gid for gid, g in labeled.items() if is_subgraph(pattern, g)}
    c_hit = sum(1 for g in hits if labels[g] == "C")
    m_hit = sum(1 for g in hits if labels[g] == "M")
    n_c = sum(1 for v in labels.values() if v == "C")
    n_m = sum(1 for v in labels.values() if v == "M")
    from misusekit.mining import SubgraphFeature

    stats = SupportStats(c_hit, n_c - c_hit, m_hit, n_m - m_hit)
    return SubgraphFeature(
        code=min_dfs_code(pattern),
        pattern=pattern,
        stats=stats,
        chi2=chi_square(stats),
        graph_ids=frozenset(hits),
    )


def test_cork_empty_candidates():
    labeled = graphs_with({"c1": ["x"], "c2": ["x"], "m1": ["y"], "m2": ["y"]})
    labels = {"c1": "C", "c2": "C", "m1": "M", "m2": "M"}
    assert cork_select([], labeled, labels) == []
    vecs = {gid: () for gid in labeled}
    assert correspondence_count(vecs, labels) == 4  # |C| x |M| with no features


def test_cork_perfect_candidate_selected():
    labeled = graphs_with({"c1": ["x"], "c2": ["x"], "m1": ["y"], "m2": ["y"]})
    labels = {"c1": "C", "c2": "C", "m1": "M", "m2": "M"}
    cand = feature_for("x", labeled, labels)
    selected = cork_select([cand], labeled, labels)
    assert selected == [cand]
    vecs = {gid: (1 if labels[gid] == "C" else 0,) for gid in labeled}
    assert correspondence_count(vecs, labels) == 0


def test_cork_universal_candidate_never_selected():
    labeled = graphs_with({"c1": ["u", "x"], "c2": ["u", "x"], "m1": ["u"], "m2": ["u"]})
    labels = {"c1": "C", "c2": "C", "m1": "M", "m2": "M"}
    universal = feature_for("u", labeled, labels)
    useful = feature_for("x", labeled, labels)
    selected = cork_select([universal, useful], labeled, labels)
    assert universal not in selected
    assert useful in selected


def test_cork_correspondence_strictly_decreases(rng):
    gids = [f"g{i}" for i in range(10)]
    alphabet = ["a", "b", "c", "d"]
    labeled = graphs_with(
        {gid: rng.sample(alphabet, rng.randint(1, 3)) for gid in gids}
    )
    labels = {gid: rng.choice(["C", "M"]) for gid in gids}
    if len(set(labels.values())) < 2:
        labels[gids[0]] = "C"
        labels[gids[1]] = "M"
    cands = [feature_for(lbl, labeled, labels) for lbl in alphabet]
    selected = cork_select(cands, labeled, labels)
    from misusekit.classify import vectorize

    prev = correspondence_count({gid: () for gid in labeled}, labels)
    for k in range(1, len(selected) + 1):
        vecs = {gid: vectorize(g, selected[:k]) for gid, g in labeled.items()}
        cur = correspondence_count(vecs, labels)
        assert cur < prev
        prev = cur


def test_cork_append_only_with_initial():
    labeled = graphs_with({"c1": ["x", "z"], "c2": ["x"], "m1": ["y", "z"], "m2": ["y"]})
    labels = {"c1": "C", "c2": "C", "m1": "M", "m2": "M"}
    first = cork_select([feature_for("x", labeled, labels)], labeled, labels)
    second = cork_select(
        [feature_for("x", labeled, labels), feature_for("z", labeled, labels)],
        labeled,
        labels,
        initial=first,
    )
    assert second[: len(first)] == first
