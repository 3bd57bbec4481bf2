import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbir.antipole import (Internal, Leaf, MetricPoint, SearchStats, approx_1_median, approx_antipole,
                           build_tree, check_invariants, estimate_sigma, exact_1_median, find_antipole,
                           from_preorder, knn_search, local_winner, range_search, to_preorder)


def euclid(u, v):
    return math.dist(u, v)


def scalar(u, v):
    return abs(u - v)


def points_1d(values):
    return [MetricPoint(i, float(v)) for i, v in enumerate(values)]


def random_points(rng, n, dim, clusters=0):
    if clusters:
        centers = rng.uniform(0, 100, (clusters, dim))
        data = centers[rng.integers(clusters, size=n)] + rng.normal(scale=3, size=(n, dim))
    else:
        data = rng.uniform(0, 100, (n, dim))
    return [MetricPoint(i, tuple(map(float, row))) for i, row in enumerate(data)]


def linear_range(points, q, t, dist):
    hits = [(p.id, dist(q, p.vector)) for p in points]
    return sorted((h for h in hits if h[1] <= t), key=lambda h: (h[1], h[0]))


def linear_knn(points, q, k, dist):
    return sorted(((p.id, dist(q, p.vector)) for p in points), key=lambda h: (h[1], h[0]))[:k]


def test_exact_1_median_examples():
    assert exact_1_median(points_1d([0, 1, 10]), scalar).id == 1
    assert exact_1_median(points_1d([5]), scalar).id == 0
    # 0 and 2 tie on the distance sum; the smaller id wins
    assert exact_1_median(points_1d([0, 2]), scalar).id == 0
    with pytest.raises(ValueError):
        exact_1_median([], scalar)


def test_exact_1_median_vs_enumeration():
    rng = np.random.default_rng(0)
    pts = random_points(rng, 15, 3)
    sums = {p.id: sum(euclid(p.vector, q.vector) for q in pts) for p in pts}
    assert exact_1_median(pts, euclid).id == min(sums, key=lambda i: (sums[i], i))


def test_local_winner_and_find_antipole():
    pts = points_1d([0, 1, 10])
    assert [p.id for p in local_winner(pts, scalar)] == [0, 2]
    a, b = find_antipole(points_1d([3, 0, 7, 10, 4]), scalar)
    assert (a.id, b.id) == (1, 3)
    # pairs (0, 1) and (0, 2) tie at distance 2; the smaller id pair wins
    a, b = find_antipole(points_1d([0, 2, 2]), scalar)
    assert (a.id, b.id) == (0, 1)
    with pytest.raises(ValueError):
        local_winner(points_1d([1]), scalar)
    with pytest.raises(ValueError):
        find_antipole(points_1d([1]), scalar)


def test_small_sets_are_exact():
    rng = np.random.default_rng(1)
    pts = random_points(rng, 9, 2)
    assert approx_1_median(pts, euclid) == exact_1_median(pts, euclid)
    assert approx_antipole(pts, euclid) == find_antipole(pts, euclid)


@settings(max_examples=40)
@given(st.integers(1, 200), st.integers(0, 2 ** 31))
def test_tournaments_return_members(n, seed):
    rng = np.random.default_rng(seed)
    pts = random_points(rng, n, 2)
    m = approx_1_median(pts, euclid, rng=seed)
    assert m in pts
    if n >= 2:
        a, b = approx_antipole(pts, euclid, rng=random.Random(seed))
        assert a in pts and b in pts and a.id < b.id


def test_tournament_arguments():
    pts = points_1d(range(20))
    with pytest.raises(ValueError):
        approx_1_median(pts, scalar, tau=2)
    with pytest.raises(ValueError):
        approx_antipole(pts, scalar, tau=3, threshold=5)
    assert approx_1_median(pts, scalar, rng=4) == approx_1_median(pts, scalar, rng=4)


def test_tree_identical_points_single_leaf():
    pts = [MetricPoint(i, (1.0, 2.0)) for i in range(12)]
    tree = build_tree(pts, euclid, sigma=1.0)
    assert isinstance(tree.root, Leaf) and tree.root.cluster.radius == 0.0
    assert len(tree.root.cluster.members) == 12
    assert [i for i, _ in range_search(tree, (1.0, 2.0), 0.0)] == list(range(12))


def test_tree_two_clusters():
    pts = points_1d(list(range(10)) + list(range(100, 110)))
    tree = build_tree(pts, scalar, sigma=50)
    assert isinstance(tree.root, Internal)
    sides = [{m.id for m in leaf.cluster.members} for leaf in tree.leaves()]
    assert sorted(map(sorted, sides)) == [list(range(10)), list(range(10, 20))]
    assert all(leaf.cluster.radius <= 9 for leaf in tree.leaves())
    assert check_invariants(tree) == []


def test_tree_tiny_sets():
    one = build_tree(points_1d([4]), scalar, sigma=1)
    assert isinstance(one.root, Leaf) and one.root.cluster.radius == 0
    two = build_tree(points_1d([0, 100]), scalar, sigma=1)
    assert isinstance(two.root, Leaf) and two.root.cluster.radius == 100
    assert knn_search(two, 1.0, 1) == [(0, 1.0)]


def test_build_errors():
    with pytest.raises(ValueError):
        build_tree([], euclid)
    with pytest.raises(ValueError):
        build_tree([MetricPoint(1, 0.0), MetricPoint(1, 1.0)], scalar)
    with pytest.raises(ValueError):
        build_tree(points_1d([0, 1, 2]), scalar, sigma=0)


@pytest.mark.parametrize("clusters", [0, 5])
def test_searches_match_linear_scan(clusters):
    rng = np.random.default_rng(10 + clusters)
    pts = random_points(rng, 400, 4, clusters)
    tree = build_tree(pts, euclid, seed=3)
    assert check_invariants(tree) == []
    assert sorted(p.id for p in tree.points()) == list(range(400))
    for _ in range(15):
        q = tuple(rng.uniform(0, 100, 4))
        t = float(rng.uniform(5, 60))
        assert range_search(tree, q, t) == linear_range(pts, q, t, euclid)
        lazy = range_search(tree, q, t, resolve=False)
        assert sorted(i for i, _ in lazy) == sorted(i for i, _ in linear_range(pts, q, t, euclid))
        k = int(rng.integers(1, 30))
        assert knn_search(tree, q, k) == linear_knn(pts, q, k, euclid)


def test_boundary_hits_and_zero_radius():
    pts = points_1d([0, 1, 2, 3, 4, 5, 6, 7, 8, 9])
    tree = build_tree(pts, scalar, sigma=2)
    assert [i for i, _ in range_search(tree, 4.0, 2.0)] == [4, 3, 5, 2, 6]
    assert range_search(tree, 4.0, 0.0) == [(4, 0.0)]
    assert range_search(tree, 50.0, 1.0) == []
    with pytest.raises(ValueError):
        range_search(tree, 4.0, -1.0)


def test_knn_ties_and_errors():
    pts = points_1d([0, 2, 4, 2, 0])
    tree = build_tree(pts, scalar, sigma=1)
    assert knn_search(tree, 2.0, 2) == [(1, 0.0), (3, 0.0)]
    assert knn_search(tree, 1.0, 5) == linear_knn(pts, 1.0, 5, scalar)
    with pytest.raises(ValueError):
        knn_search(tree, 0.0, 6)
    with pytest.raises(ValueError):
        knn_search(tree, 0.0, 0)


def test_search_stats_count_calls():
    pts = points_1d(range(50))
    tree = build_tree(pts, scalar, sigma=3)
    stats = SearchStats()
    calls = []

    def counting(u, v):
        calls.append(1)
        return abs(u - v)

    range_search(tree, 10.0, 2.0, dist=counting, stats=stats)
    assert stats.calls == len(calls) > 0
    assert tree.build_stats.calls > 0


def test_determinism_by_seed():
    rng = np.random.default_rng(5)
    pts = random_points(rng, 300, 3, 4)
    a = to_preorder(build_tree(pts, euclid, seed=11))
    b = to_preorder(build_tree(pts, euclid, seed=11))
    assert a == b


def test_serialization_roundtrip():
    rng = np.random.default_rng(6)
    pts = random_points(rng, 200, 3, 3)
    tree = build_tree(pts, euclid, seed=2)
    records = to_preorder(tree)
    back = from_preorder(records, {p.id: p for p in pts}, euclid, tree.sigma)
    assert to_preorder(back) == records and back.size == 200
    assert check_invariants(back) == []
    q = (50.0, 50.0, 50.0)
    assert knn_search(back, q, 7) == knn_search(tree, q, 7)
    with pytest.raises(ValueError):
        from_preorder(records[:-1], {p.id: p for p in pts}, euclid, tree.sigma)
    with pytest.raises(ValueError):
        from_preorder(records + records[-1:], {p.id: p for p in pts}, euclid, tree.sigma)


def test_check_invariants_detects_corruption():
    pts = points_1d(range(30))
    tree = build_tree(pts, scalar, sigma=2)
    node = next(n for n in tree.nodes() if isinstance(n, Internal))
    node.rad_a = -1.0
    assert check_invariants(tree)


def test_estimate_sigma():
    pts = points_1d([0, 1, 3])
    assert estimate_sigma(pts, scalar, random.Random(0)) == 2
    assert estimate_sigma(points_1d([5, 5]), scalar, random.Random(0)) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=60), st.integers(0, 100), st.integers(-60, 60),
       st.integers(0, 40))
def test_range_and_knn_property(values, seed, q, t):
    pts = points_1d(values)
    tree = build_tree(pts, scalar, seed=seed)
    assert range_search(tree, float(q), float(t)) == linear_range(pts, float(q), t, scalar)
    k = 1 + seed % len(pts)
    assert knn_search(tree, float(q), k) == linear_knn(pts, float(q), k, scalar)
    assert check_invariants(tree) == []
