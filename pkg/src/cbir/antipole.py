"""Antipole tree: a randomized metric-space index for range and k-NN queries.

The tree is generic over any metric ``dist(u, v)`` on point payloads. It is
built top-down: a set is split on an approximate farthest pair (the antipole
pair) found by a tournament of local 1-median eliminations, until the pair
is no farther apart than the cluster threshold ``sigma``. Each leaf stores
its cluster's approximate 1-median and every member's distance to it, which
range and k-NN search use to include or discard members without computing
their distance to the query.
"""

import bisect
import heapq
import itertools
import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Any, Callable

# Guard band on pruning comparisons so float rounding in the triangle
# inequality can never drop or wrongly include a boundary point.
_REL_SLACK = 1e-9


def _slack(*values):
    return _REL_SLACK * (1.0 + max(abs(v) for v in values))


@dataclass(frozen=True)
class MetricPoint:
    id: Any
    vector: Any


@dataclass
class SearchStats:
    """Distance evaluations made by one operation."""

    calls: int = 0


class _Metric:
    """Wraps ``dist`` on payloads, counting calls into an optional ``SearchStats``."""

    __slots__ = ("fn", "stats")

    def __init__(self, fn, stats=None):
        self.fn = fn
        self.stats = stats if stats is not None else SearchStats()

    def __call__(self, p, q):
        self.stats.calls += 1
        return self.fn(p.vector, q.vector)


def _metric(dist, stats=None):
    return dist if isinstance(dist, _Metric) else _Metric(dist, stats)


# --- 1-median and antipole tournaments ------------------------------------

def _pairwise(X, d):
    n = len(X)
    D = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            D[i][j] = D[j][i] = d(X[i], X[j])
    return D


def _median_index(X, D):
    sums = [math.fsum(row) for row in D]
    return min(range(len(X)), key=lambda i: (sums[i], X[i].id))


def exact_1_median(X, dist):
    """The member of ``X`` with the smallest sum of distances to all others (ties: smallest id)."""
    X = list(X)
    if not X:
        raise ValueError("1-median of an empty set")
    if len(X) == 1:
        return X[0]
    d = _metric(dist)
    return X[_median_index(X, _pairwise(X, d))]


def local_winner(T, dist):
    """``T`` without its exact 1-median."""
    T = list(T)
    if len(T) < 2:
        raise ValueError("local_winner needs at least 2 points")
    d = _metric(dist)
    m = _median_index(T, _pairwise(T, d))
    return T[:m] + T[m + 1:]


def _farthest_pair(T, d):
    best = None
    for i, j in itertools.combinations(range(len(T)), 2):
        dij = d(T[i], T[j])
        a, b = (T[i], T[j]) if T[i].id <= T[j].id else (T[j], T[i])
        key = (-dij, a.id, b.id)
        if best is None or key < best[0]:
            best = (key, a, b, dij)
    return best[1], best[2], best[3]


def find_antipole(T, dist):
    """Exact farthest pair of ``T``, smaller id first (ties: lexicographically smallest id pair)."""
    T = list(T)
    if len(T) < 2:
        raise ValueError("find_antipole needs at least 2 points")
    a, b, _ = _farthest_pair(T, _metric(dist))
    return a, b


def _as_rng(rng):
    if isinstance(rng, random.Random):
        return rng
    return random.Random(0 if rng is None else rng)


def _check_tournament(tau, threshold):
    if tau < 3:
        raise ValueError(f"tournament size tau must be >= 3, got {tau}")
    if threshold < 2 * tau:
        raise ValueError(f"threshold must be >= 2*tau ({2 * tau}), got {threshold}")


def approx_1_median(S, dist, tau=3, small_threshold=None, rng=None):
    """Tournament 1-median: random groups of ``tau`` are replaced by their exact 1-medians
    until at most ``small_threshold`` candidates remain."""
    S = list(S)
    if not S:
        raise ValueError("1-median of an empty set")
    threshold = 3 * tau if small_threshold is None else small_threshold
    _check_tournament(tau, threshold)
    rng = _as_rng(rng)
    d = _metric(dist)
    while len(S) > threshold:
        rng.shuffle(S)
        winners = []
        pos = 0
        while len(S) - pos >= 2 * tau:
            winners.append(exact_1_median(S[pos:pos + tau], d))
            pos += tau
        winners.append(exact_1_median(S[pos:], d))
        S = winners
    return exact_1_median(S, d)


def _approx_antipole(S, d, tau, threshold, rng):
    while len(S) > threshold:
        rng.shuffle(S)
        survivors = []
        pos = 0
        while len(S) - pos >= 2 * tau:
            survivors.extend(local_winner(S[pos:pos + tau], d))
            pos += tau
        survivors.extend(local_winner(S[pos:], d))
        S = survivors
    return _farthest_pair(S, d)


def approx_antipole(S, dist, tau=3, threshold=None, rng=None):
    """Approximate farthest pair by a tournament of ``local_winner`` rounds."""
    S = list(S)
    if len(S) < 2:
        raise ValueError("approx_antipole needs at least 2 points")
    threshold = 3 * tau if threshold is None else threshold
    _check_tournament(tau, threshold)
    a, b, _ = _approx_antipole(S, _metric(dist), tau, threshold, _as_rng(rng))
    return a, b


# --- tree -----------------------------------------------------------------

@dataclass
class Cluster:
    members: list
    centroid: MetricPoint
    radius: float
    member_centroid_dist: list


@dataclass
class Leaf:
    cluster: Cluster


@dataclass
class Internal:
    a: MetricPoint
    b: MetricPoint
    rad_a: float
    rad_b: float
    left: Any = None
    right: Any = None


@dataclass
class AntipoleTree:
    root: Any
    dist: Callable
    size: int
    sigma: float
    tau: int = 3
    build_stats: SearchStats = field(default_factory=SearchStats)

    def nodes(self):
        """Preorder traversal (node, then left, then right)."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, Internal):
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self):
        return (n for n in self.nodes() if isinstance(n, Leaf))

    def points(self):
        return [m for leaf in self.leaves() for m in leaf.cluster.members]

    def range_search(self, q, t, **kw):
        return range_search(self, q, t, **kw)

    def knn_search(self, q, k, **kw):
        return knn_search(self, q, k, **kw)


def estimate_sigma(points, dist, rng, sample=100):
    """Median pairwise distance of a random sample of at most ``sample`` points."""
    pts = list(points)
    if len(pts) > sample:
        pts = rng.sample(pts, sample)
    ds = [dist(a.vector, b.vector) for a, b in itertools.combinations(pts, 2)]
    positive = [x for x in ds if x > 0]
    if not positive:
        return 1.0
    med = statistics.median(ds)
    return med if med > 0 else min(positive)


def _make_leaf(S, d, tau, rng):
    centroid = S[0] if len(S) == 1 else approx_1_median(S, d, tau=tau, rng=rng)
    dists = [0.0 if m is centroid else d(m, centroid) for m in S]
    return Leaf(Cluster(list(S), centroid, max(dists), dists))


def build_tree(points, dist, sigma=None, tau=3, seed=0, antipole_threshold=None):
    """Build an Antipole tree over ``points`` (``MetricPoint`` instances with unique ids).

    A set becomes a leaf when it has at most two points or its approximate
    diameter is ``<= sigma``. ``sigma`` defaults to the median pairwise
    distance of a 100-point sample. Construction is deterministic for a given
    ``seed``.
    """
    points = list(points)
    if not points:
        raise ValueError("cannot build a tree over an empty set")
    ids = [p.id for p in points]
    if len(set(ids)) != len(ids):
        raise ValueError("point ids must be unique")
    threshold = 3 * tau if antipole_threshold is None else antipole_threshold
    _check_tournament(tau, threshold)
    rng = random.Random(seed)
    if sigma is None:
        sigma = estimate_sigma(points, dist, rng)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    stats = SearchStats()
    d = _Metric(dist, stats)

    holder = Internal(None, None, 0.0, 0.0)
    stack = [(points, holder, "left")]
    while stack:
        S, parent, side = stack.pop()
        node = None
        if len(S) <= 2:
            node = _make_leaf(S, d, tau, rng)
        else:
            a, b, dab = _approx_antipole(list(S), d, tau, threshold, rng)
            if dab <= sigma:
                node = _make_leaf(S, d, tau, rng)
            else:
                left, right = [a], [b]
                rad_a = rad_b = 0.0
                for p in S:
                    if p is a or p is b:
                        continue
                    da, db = d(p, a), d(p, b)
                    if da <= db:
                        left.append(p)
                        rad_a = max(rad_a, da)
                    else:
                        right.append(p)
                        rad_b = max(rad_b, db)
                node = Internal(a, b, rad_a, rad_b)
                # right pushed first so the left subtree is built first
                stack.append((right, node, "right"))
                stack.append((left, node, "left"))
        setattr(parent, side, node)
    return AntipoleTree(holder.left, dist, len(points), float(sigma), tau, stats)


# --- queries ----------------------------------------------------------------

def _query_point(q):
    return q if isinstance(q, MetricPoint) else MetricPoint(None, q)


class _QueryDistances:
    """Memoized distances from one query point, keyed by point id."""

    def __init__(self, q, dist, stats):
        self.q = _query_point(q)
        self.d = _Metric(dist, stats)
        self.known = {}

    def __call__(self, p):
        v = self.known.get(p.id)
        if v is None:
            v = self.d(self.q, p)
            self.known[p.id] = v
        return v


def range_search(tree, q, t, dist=None, resolve=True, stats=None):
    """All indexed points within distance ``t`` of ``q`` (closed ball).

    Returns ``(id, distance)`` pairs sorted by distance then id. Points proven
    inside the ball by the triangle inequality through their leaf centroid are
    not measured when ``resolve=False``; their distance is reported as
    ``None`` and they sort last.
    """
    if t < 0 or math.isnan(t):
        raise ValueError(f"range threshold must be >= 0, got {t}")
    qd = _QueryDistances(q, dist or tree.dist, stats)
    out = {}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Internal):
            da, db = qd(node.a), qd(node.b)
            if da <= t:
                out[node.a.id] = da
            if db <= t:
                out[node.b.id] = db
            if da <= t + node.rad_a + _slack(da, t, node.rad_a):
                stack.append(node.left)
            if db <= t + node.rad_b + _slack(db, t, node.rad_b):
                stack.append(node.right)
            continue
        c = node.cluster
        dc = qd(c.centroid)
        for m, dm in zip(c.members, c.member_centroid_dist):
            known = qd.known.get(m.id)
            if known is not None:
                if known <= t:
                    out[m.id] = known
                continue
            eps = _slack(dc, dm, t)
            if dc + dm <= t - eps:
                out[m.id] = qd(m) if resolve else None
            elif abs(dc - dm) > t + eps:
                continue
            else:
                dq = qd(m)
                if dq <= t:
                    out[m.id] = dq
    return sorted(out.items(), key=lambda kv: (kv[1] is None, kv[1] or 0.0, kv[0]))


def knn_search(tree, q, k, dist=None, stats=None):
    """The ``k`` nearest indexed points to ``q`` as ``(id, distance)``, nearest first.

    Best-first branch and bound over lower bounds ``max(0, D_X - rad_X)`` for
    subtrees and ``|D_c - d_m|`` for leaf members. Ties are broken by id, so
    the result equals the first ``k`` entries of a linear scan sorted by
    ``(distance, id)``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > tree.size:
        raise ValueError(f"k={k} exceeds the number of indexed points ({tree.size})")
    qd = _QueryDistances(q, dist or tree.dist, stats)
    best = []  # sorted (distance, id)
    offered = set()

    def offer(p, dp):
        if p.id in offered:
            return
        offered.add(p.id)
        item = (dp, p.id)
        if len(best) < k:
            bisect.insort(best, item)
        elif item < best[-1]:
            bisect.insort(best, item)
            best.pop()

    def bound():
        return best[-1][0] if len(best) == k else math.inf

    seq = itertools.count()
    frontier = [(0.0, next(seq), tree.root, None)]
    while frontier:
        lb, _, node, member = heapq.heappop(frontier)
        r = bound()
        if lb > r + _slack(r if r < math.inf else 0.0, lb):
            break
        if member is not None:
            offer(member, qd(member))
        elif isinstance(node, Internal):
            da, db = qd(node.a), qd(node.b)
            offer(node.a, da)
            offer(node.b, db)
            heapq.heappush(frontier, (max(lb, da - node.rad_a), next(seq), node.left, None))
            heapq.heappush(frontier, (max(lb, db - node.rad_b), next(seq), node.right, None))
        else:
            c = node.cluster
            dc = qd(c.centroid)
            offer(c.centroid, dc)
            for m, dm in zip(c.members, c.member_centroid_dist):
                if m.id in offered:
                    continue
                known = qd.known.get(m.id)
                if known is not None:
                    offer(m, known)
                    continue
                mlb = max(lb, abs(dc - dm))
                r = bound()
                if mlb <= r + _slack(r if r < math.inf else 0.0, mlb):
                    heapq.heappush(frontier, (mlb, next(seq), None, m))
    return [(pid, dp) for dp, pid in best]


# --- layout / serialization ------------------------------------------------

def check_invariants(tree, dist=None):
    """Exhaustively verify partition and radius soundness; returns a list of violation messages."""
    d = dist or tree.dist
    problems = []

    def subtree_points(node):
        return [m for leaf in AntipoleTree(node, d, 0, 1.0).leaves() for m in leaf.cluster.members]

    for node in tree.nodes():
        if isinstance(node, Internal):
            for pole, rad, child, side in ((node.a, node.rad_a, node.left, "left"),
                                           (node.b, node.rad_b, node.right, "right")):
                for p in subtree_points(child):
                    dp = d(p.vector, pole.vector)
                    if dp > rad + _slack(rad, dp):
                        problems.append(f"{side} point {p.id!r} at {dp} exceeds radius {rad}")
        else:
            c = node.cluster
            if not any(m is c.centroid or m.id == c.centroid.id for m in c.members):
                problems.append(f"centroid {c.centroid.id!r} not a member")
            for m, dm in zip(c.members, c.member_centroid_dist):
                if dm > c.radius:
                    problems.append(f"member {m.id!r} beyond cluster radius")
    ids = [p.id for p in tree.points()]
    if len(ids) != len(set(ids)) or len(ids) != tree.size:
        problems.append(f"leaves hold {len(ids)} entries ({len(set(ids))} distinct) for {tree.size} points")
    return problems


def to_preorder(tree):
    """Node records in preorder, referencing point ids only."""
    out = []
    for node in tree.nodes():
        if isinstance(node, Internal):
            out.append({"kind": "internal", "a": node.a.id, "b": node.b.id,
                        "rad_a": node.rad_a, "rad_b": node.rad_b})
        else:
            c = node.cluster
            out.append({"kind": "leaf", "centroid": c.centroid.id, "radius": c.radius,
                        "members": [[m.id, dm] for m, dm in zip(c.members, c.member_centroid_dist)]})
    return out


def from_preorder(records, points_by_id, dist, sigma, tau=3):
    """Inverse of :func:`to_preorder`."""
    it = iter(records)
    holder = Internal(None, None, 0.0, 0.0)
    # (parent, side) slots still to fill, in preorder
    pending = [(holder, "left")]
    count = 0
    for rec in it:
        if not pending:
            raise ValueError("tree records continue past a complete tree")
        parent, side = pending.pop()
        if rec["kind"] == "internal":
            node = Internal(points_by_id[rec["a"]], points_by_id[rec["b"]],
                            float(rec["rad_a"]), float(rec["rad_b"]))
            pending.append((node, "right"))
            pending.append((node, "left"))
        elif rec["kind"] == "leaf":
            members = [points_by_id[mid] for mid, _ in rec["members"]]
            dists = [float(dm) for _, dm in rec["members"]]
            node = Leaf(Cluster(members, points_by_id[rec["centroid"]], float(rec["radius"]), dists))
            count += len(members)
        else:
            raise ValueError(f"unknown node kind {rec['kind']!r}")
        setattr(parent, side, node)
    if pending or holder.left is None:
        raise ValueError("tree records end before the tree is complete")
    return AntipoleTree(holder.left, dist, count, sigma, tau)
