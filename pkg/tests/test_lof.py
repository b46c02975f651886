import math
import random

import pytest

from misusekit.lof import LofModel, default_k

from oracles import lof_direct


def random_vectors(rng, n, dim):
    return [tuple(rng.randint(0, 1) for _ in range(dim)) for _ in range(n)]


def test_duplicate_of_training_point_is_inlier():
    train = [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1)]
    model = LofModel(train, k=3)
    assert model.factor((0, 0)) == 1.0
    assert model.factor((1, 1)) == 1.0


def test_query_inside_duplicate_cluster_neighborhood_is_infinite():
    # a cluster of more than k identical points gives its members infinite
    # local density; any non-duplicate query whose neighbors include them
    # inherits an infinite factor
    train = [(0, 0)] * 5 + [(1, 1)] * 5
    model = LofModel(train, k=3)
    assert model.factor((1, 0)) == math.inf


def test_dense_cluster_member_scores_near_one():
    rng = random.Random(0)
    # jittered grid cluster: distinct points, tight spacing
    train = [(i, j) for i in range(4) for j in range(4)]
    model = LofModel([tuple(p) for p in train], k=4)
    assert model.factor((1.5, 1.5)) <= 1.5


def test_far_point_scores_high():
    train = [(i, j) for i in range(4) for j in range(4)]
    model = LofModel([tuple(p) for p in train], k=4)
    inlier = model.factor((1.5, 1.5))
    outlier = model.factor((40, 40))
    assert outlier > 2.0
    assert outlier > inlier


def test_matches_direct_computation(rng):
    for _ in range(50):
        n = rng.randint(6, 25)
        dim = rng.randint(2, 6)
        train = random_vectors(rng, n, dim)
        k = rng.randint(1, n - 1)
        model = LofModel(train, k=k)
        for _ in range(5):
            q = tuple(rng.randint(0, 2) for _ in range(dim))
            expected = lof_direct(train, k, q)
            got = model.factor(q)
            if math.isinf(expected):
                assert math.isinf(got)
            else:
                assert got == pytest.approx(expected, abs=1e-9)


def test_k_validation():
    with pytest.raises(ValueError):
        LofModel([(0, 0), (1, 1)], k=0)
    with pytest.raises(ValueError):
        LofModel([(0, 0), (1, 1)], k=2)


def test_default_k_bounds():
    assert default_k(1) == 1
    assert default_k(2) == 1
    assert default_k(10) == 5
    assert default_k(40) == 20
    assert default_k(2000) == 20
