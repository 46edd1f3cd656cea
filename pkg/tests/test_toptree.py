"""Structural tests of the contraction-based top-tree engine."""

import math

import pytest

from dynbicon.rng import SplitMix64
from dynbicon.toptree import TopForest, UsageError


def audit(tf):
    """Full structural invariants; raises on violation."""
    n = tf.n
    # per-round adjacency is symmetric; moves match a fresh decision
    for k, rnd in enumerate(tf.rounds):
        for v, nbrs in rnd.adj.items():
            for w, cl in nbrs.items():
                assert rnd.adj[w][v] is cl
                assert {cl.bu, cl.bv} == {v, w}, (k, v, w, cl)
        for v in rnd.adj:
            mv = rnd.move.get(v)
            want = tf._decide(k, v)
            got = None if mv is None else mv[:1] if mv[0] == "compress" else mv[:2]
            want_key = None if want is None else want[:2] if want[0] == "rake" else want[:1]
            assert got == want_key, (k, v, mv, want)
    # round sizes decay to quiescence
    assert all(len(tf.rounds[-1].adj.get(v, {})) <= 1 for v in tf.rounds[-1].adj)
    # cluster structure: slimness, case shapes, parents, sizes, firstedges
    for c in tf.clusters():
        for ch in c.children:
            assert ch.parent is c
        if c.kind == "edge":
            assert c.children == () and c.size == 0
            assert c.fe_u == (c.bu, c.bv) and c.fe_v == (c.bv, c.bu)
        elif c.kind == "dummy":
            assert c.children == () and c.size == 0 and c.bv is None
        elif c.kind == "rake":
            a, b = c.children
            assert a.bv is None and b.bv is None
            assert a.bu == b.bu == c.bu and c.bv is None
            assert c.size == a.size + b.size
        elif c.kind == "point2":
            a, b = c.children
            assert a.is_path and not b.is_path
            assert b.bu == c.mid and c.mid in (a.bu, a.bv)
            assert c.bu == a.other_boundary(c.mid) and c.bv is None
            assert c.size == a.size + b.size + 1
            assert c.fe_u == a.firstedge(c.bu)
        elif c.kind == "path3":
            a, b, p = c.children
            assert a.is_path and b.is_path and not p.is_path
            assert p.bu == c.mid
            assert c.mid in (a.bu, a.bv) and c.mid in (b.bu, b.bv)
            assert c.bu == a.other_boundary(c.mid)
            assert c.bv == b.other_boundary(c.mid)
            assert c.size == a.size + b.size + p.size + 1
            assert c.fe_u == a.firstedge(c.bu)
            assert c.fe_v == b.firstedge(c.bv)
    # every component root group is consistent
    seen = set()
    for v in range(n):
        grp = tf.roots_of(v)
        if id(grp) in seen:
            continue
        seen.add(id(grp))
        for r in grp.roots:
            assert r.parent is None
            assert r.group is grp


def sizes_from_scratch(tf):
    """Component sizes via the engine's own root groups."""
    comp = {}
    for v in range(tf.n):
        comp.setdefault(id(tf.roots_of(v)), []).append(v)
    return sorted(len(vs) for vs in comp.values())


class DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        self.p[self.find(a)] = self.find(b)


def test_single_link_and_cut():
    tf = TopForest(4, seed=1)
    audit(tf)
    assert not tf.connected(0, 1)
    tf.link(0, 1)
    audit(tf)
    assert tf.connected(0, 1)
    assert not tf.connected(0, 2)
    tf.cut(0, 1)
    audit(tf)
    assert not tf.connected(0, 1)


def test_path_and_star():
    tf = TopForest(8, seed=2)
    for i in range(7):
        tf.link(i, i + 1)
        audit(tf)
    assert tf.connected(0, 7)
    tf2 = TopForest(8, seed=3)
    for i in range(1, 8):
        tf2.link(0, i)
        audit(tf2)
    assert tf2.connected(3, 6)


def test_expose_makes_root_triple():
    tf = TopForest(6, seed=4)
    for i in range(5):
        tf.link(i, i + 1)
    tf.expose(0, 5)
    audit(tf)
    grp = tf.roots_of(2)
    assert grp.boundary == (0, 5)
    assert len(grp.roots) == 3
    r_pq = grp.roots[0]
    assert {r_pq.bu, r_pq.bv} == {0, 5}
    tf.expose(1, 4)
    audit(tf)
    assert tf.roots_of(0).boundary == (1, 4)


def test_transient_expose_roundtrip():
    tf = TopForest(10, seed=5)
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (2, 7), (7, 8), (8, 9)]
    for e in edges:
        tf.link(*e)
    audit(tf)
    before_shape = {id(c) for c in tf.clusters()}
    roots = tf.transient_expose(4, 9)
    assert len(roots) == 3
    r_pq = roots[0]
    assert {r_pq.bu, r_pq.bv} == {4, 9}
    tf.transient_unexpose()
    audit(tf)
    assert {id(c) for c in tf.clusters()} == before_shape
    # single-vertex transient expose
    roots = tf.transient_expose(7)
    assert len(roots) == 1 and roots[0].bu == 7 and roots[0].bv is None
    tf.transient_unexpose()
    audit(tf)
    assert {id(c) for c in tf.clusters()} == before_shape


def test_structural_errors():
    tf = TopForest(4, seed=6)
    tf.link(0, 1)
    with pytest.raises(UsageError):
        tf.link(0, 1)
    with pytest.raises(UsageError):
        tf.cut(1, 2)
    with pytest.raises(UsageError):
        tf.expose(0, 2)
    tf.transient_expose(0, 1)
    with pytest.raises(UsageError):
        tf.transient_expose(0)
    with pytest.raises(UsageError):
        tf.link(2, 3)
    tf.transient_unexpose()
    tf.link(2, 3)


@pytest.mark.parametrize("seed,n", [(10, 8), (11, 12), (12, 16), (13, 24), (14, 40)])
def test_fuzz_structure(seed, n):
    rng = SplitMix64(seed * 2654435761 + 7)
    tf = TopForest(n, seed=seed)
    edges = set()
    for step in range(260):
        op = rng.randrange(100)
        if op < 55 or not edges:
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v and (min(u, v), max(u, v)) not in edges and not tf.connected(u, v):
                tf.link(u, v)
                edges.add((min(u, v), max(u, v)))
        elif op < 80:
            e = sorted(edges)[rng.randrange(len(edges))]
            tf.cut(*e)
            edges.discard(e)
        elif op < 90:
            u, v = rng.randrange(n), rng.randrange(n)
            if tf.connected(u, v) and u != v:
                tf.expose(u, v)
        else:
            u, v = rng.randrange(n), rng.randrange(n)
            if tf.connected(u, v):
                before = {id(c) for c in tf.clusters()}
                roots = tf.transient_expose(u, v if v != u else None)
                assert all(r is not None for r in roots)
                tf.transient_unexpose()
                assert {id(c) for c in tf.clusters()} == before
        if step % 5 == 0:
            audit(tf)
            dsu = DSU(n)
            for a, b in edges:
                dsu.union(a, b)
            for _ in range(12):
                a, b = rng.randrange(n), rng.randrange(n)
                assert tf.connected(a, b) == (dsu.find(a) == dsu.find(b))
    audit(tf)


def test_height_and_update_cost_scaling():
    rng = SplitMix64(99)
    for n in (64, 256):
        tf = TopForest(n, seed=77)
        edges = set()
        counts = []
        for step in range(4 * n):
            before = tf.counters["merges"] + tf.counters["splits"]
            u, v = rng.randrange(n), rng.randrange(n)
            if (min(u, v), max(u, v)) in edges:
                tf.cut(u, v)
                edges.discard((min(u, v), max(u, v)))
            elif u != v and not tf.connected(u, v):
                tf.link(u, v)
                edges.add((min(u, v), max(u, v)))
            else:
                continue
            counts.append(tf.counters["merges"] + tf.counters["splits"] - before)
        # heights: every dummy's root chain is logarithmic
        max_depth = 0
        for v in range(n):
            d, c = 0, tf.dummy[v]
            while c.parent is not None:
                c = c.parent
                d += 1
            max_depth = max(max_depth, d)
        assert max_depth <= 6 * math.log2(n) + 8, (n, max_depth)
        assert max(counts) <= 30 * math.log2(n) + 30, (n, max(counts))