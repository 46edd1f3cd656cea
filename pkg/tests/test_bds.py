"""Biased disjoint sets vs a flat map-based oracle, plus depth audits."""

import math

import pytest

from dynbicon import bds
from dynbicon.bds import BdsItem, UsageError
from dynbicon.rng import SplitMix64


class FlatSets:
    """Map-based oracle: item -> set id, set id -> members."""

    def __init__(self):
        self.of = {}
        self.members = {}
        self.next_id = 0

    def make_set(self, item):
        sid = self.next_id
        self.next_id += 1
        self.of[item] = sid
        self.members[sid] = {item}
        return sid

    def union_sets(self, a, b):
        if a == b:
            return a
        if len(self.members[a]) < len(self.members[b]):
            a, b = b, a
        for item in self.members.pop(b):
            self.of[item] = a
            self.members[a].add(item)
        return a

    def delete(self, item):
        sid = self.of.pop(item)
        self.members[sid].discard(item)
        if not self.members[sid]:
            del self.members[sid]


def test_make_set_examples():
    a = BdsItem()
    enc = bds.make_set(a, 4)
    assert bds.find(a) is enc and enc.weight == 4
    assert BdsItem().rank == 0  # weight 1 default
    b = BdsItem()
    bds.make_set(b, 1)
    assert b.rank == 0
    c = BdsItem()
    bds.make_set(c, 5)
    assert c.rank == 2


def test_root_union_links_items():
    a, b = BdsItem(), BdsItem()
    ea, eb = bds.make_set(a, 1), bds.make_set(b, 1)
    ec = bds.root_union(ea, eb)
    assert bds.find(a) is bds.find(b) is ec
    assert not ea.alive and not eb.alive
    assert ec.weight == 2


def test_union_of_64_singletons_respects_lower_tree_budget():
    items = [BdsItem() for _ in range(64)]
    encs = [bds.make_set(x, 1) for x in items]
    while len(encs) > 1:
        nxt = []
        for i in range(0, len(encs), 2):
            nxt.append(bds.root_union(encs[i], encs[i + 1]))
        encs = nxt
    enc = encs[0]
    assert enc.weight == 64
    assert enc.nlower <= 2 * math.log2(64)
    bds.check_encoding(enc)


def test_delete_examples():
    a = BdsItem()
    bds.make_set(a, 3)
    assert bds.delete(a) is None
    assert not a.in_set

    a, b = BdsItem(), BdsItem()
    enc = bds.root_union(bds.make_set(a, 2), bds.make_set(b, 5))
    rem = bds.delete(a)
    assert rem.weight == 5
    assert bds.find(b) is rem


def test_coalesce_weights_and_freedom():
    a, b, c = BdsItem(), BdsItem(), BdsItem()
    bds.make_set(a, 2)
    bds.make_set(b, 3)
    out = bds.coalesce(a, b, c)
    assert c.weight == 5 and out.weight == 5
    assert not a.in_set and not b.in_set and c.in_set
    assert bds.find(c) is out


def test_coalesce_within_one_set():
    items = [BdsItem() for _ in range(3)]
    enc = bds.make_set(items[0], 1)
    for x in items[1:]:
        enc = bds.insert(enc, x, 1)
    z = BdsItem()
    out = bds.coalesce(items[0], items[1], z)
    members = set(out.items())
    assert members == {items[2], z}
    assert out.weight == 3


def test_union_same_set_is_identity():
    a, b = BdsItem(), BdsItem()
    enc = bds.root_union(bds.make_set(a, 1), bds.make_set(b, 1))
    assert bds.union(a, b) is enc


def test_usage_errors():
    a = BdsItem()
    with pytest.raises(UsageError):
        bds.find(a)
    enc = bds.make_set(a, 1)
    with pytest.raises(UsageError):
        bds.make_set(a, 1)
    with pytest.raises(UsageError):
        bds.root_union(enc, enc)
    with pytest.raises(UsageError):
        bds.union(a, a)


def _random_trace(seed, steps, audit_every=None):
    """Random op mix checked against the flat oracle after every op."""
    rng = SplitMix64(seed)
    oracle = FlatSets()
    items = []
    bds.reset_stats()
    for step in range(steps):
        op = rng.randrange(100)
        if op < 35 or len(items) < 2:
            item = BdsItem(ref=len(items))
            w = rng.randrange(1 << 20) + 1
            bds.make_set(item, w)
            oracle.make_set(item)
            items.append(item)
        elif op < 60:
            x, y = rng.choice(items), rng.choice(items)
            if x is y:
                continue
            bds.union(x, y)
            oracle.union_sets(oracle.of[x], oracle.of[y])
        elif op < 80:
            x = rng.choice(items)
            bds.delete(x)
            oracle.delete(x)
            items.remove(x)
        else:
            x, y = rng.choice(items), rng.choice(items)
            if x is y:
                continue
            z = BdsItem(ref=f"z{step}")
            sx, sy = oracle.of[x], oracle.of[y]
            bds.coalesce(x, y, z)
            sid = oracle.union_sets(sx, sy)
            oracle.delete(x)
            oracle.delete(y)
            if sid in oracle.members:
                oracle.of[z] = sid
                oracle.members[sid].add(z)
            else:
                oracle.make_set(z)
            items.remove(x)
            items.remove(y)
            items.append(z)
        # partition equivalence: same-set relation matches the oracle
        if audit_every and step % audit_every == 0:
            seen = {}
            for it in items:
                enc = bds.find(it)
                sid = oracle.of[it]
                if sid in seen:
                    assert seen[sid] is enc
                else:
                    seen[sid] = enc
            for enc in set(seen.values()):
                bds.check_encoding(enc)
    return items


def test_random_ops_against_flat_oracle():
    _random_trace(seed=100, steps=600, audit_every=7)


def test_find_marked_descends_aggregates():
    rng = SplitMix64(5)
    size = 9
    items = []
    enc = None
    for k in range(30):
        marks = [0] * size
        if k % 4 == 0:
            marks[k % size] = 1
        item = BdsItem(cnt=[k] * size, marks=marks, ref=k)
        enc = bds.insert(enc, item, rng.randrange(64) + 1)
    for i in range(size):
        got = bds.find_marked(enc, i)
        expect = [it for it in enc.items() if it.marks and it.marks[i]]
        if expect:
            assert got in expect
        else:
            assert got is None
    # aggregate cnt equals the recomputed sum over items
    total = [0] * size
    for it in enc.items():
        for j in range(size):
            total[j] += it.cnt[j]
    assert enc.cnt == total


def test_depth_audit_and_amortized_accounting():
    """Criterion-scale audit lives in test_acceptance; this is the smoke run."""
    items = _random_trace(seed=42, steps=1500)
    a, b, c = 1.0, 2.0, 4.0  # frozen constants, shared with acceptance
    for it in items:
        enc = bds.find(it)
        W, w = enc.weight, it.weight
        bound = a * math.log2(W / w) + b * math.log2(math.log2(W + 2)) + c
        assert bds.depth(it) <= bound
    assert bds.stats["combines"] <= 2.0 * bds.stats["potential"] + 8
