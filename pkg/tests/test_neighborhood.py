"""Leveled partition structure vs the flat list-of-sets oracle."""

import math

import pytest

from dynbicon.neighborhood import FlatNbh, NbhStructure, UsageError, check_structure
from dynbicon.rng import SplitMix64

LMAX = 4


def make(lmax=LMAX, debug=True):
    return NbhStructure(lmax, debug=debug)


def test_insert_singletons_at_all_levels():
    n = make()
    n.insert("a")
    n.insert("b")
    assert n.level("a", "b") == -1
    parts = n.partitions()
    for i in range(LMAX + 1):
        assert parts[i] == [("a",), ("b",)]


def test_zip_and_level():
    n = make()
    n.insert("a")
    n.insert("b")
    n.zip("a", "b", 0)
    assert n.level("a", "b") == 0
    n.zip("a", "b", 1)
    assert n.level("a", "b") == 1


def test_unzip_restores():
    n = make()
    for r in "abc":
        n.insert(r)
    n.zip("a", "b", 0)
    n.zip("a", "c", 0)
    n.zip("a", "b", 1)
    n.zip("a", "b", 2)
    assert n.level("a", "b") == 2
    n.unzip("a", "b", 2)
    assert n.level("a", "b") == 1
    # inverse pair when the class had exactly the two subclasses
    n.zip("a", "b", 2)
    assert n.level("a", "b") == 2


def test_delete_prunes():
    n = make()
    n.insert("a")
    n.delete("a")
    assert n.partitions() == [[] for _ in range(LMAX + 1)]
    n.insert("a")
    n.insert("b")
    n.zip("a", "b", 0)
    n.delete("b")
    assert n.partitions()[0] == [("a",)]


def test_selection_basics():
    n = make()
    n.insert("a")
    n.insert("b")
    n.select(("a", "b"))
    assert n.selected_level() == -1
    n.long_zip(-1, 3)
    assert n.selected_level() == 3
    assert n.level("a", "b") == 3
    n.long_unzip(3, -1)
    assert n.level("a", "b") == -1


def test_selection_cross_strand_level():
    n = make()
    for r in "abcd":
        n.insert(r)
    n.select(("a", "b"))
    n.long_zip(-1, 3)
    # c relates to a up to level 2, d relates to b up to level 1
    for i in range(3):
        n.zip("c", "a", i)
    for i in range(2):
        n.zip("d", "b", i)
    assert n.level("c", "d") == 1  # min(selected 3, 2, 1)
    assert n.level("c", "b") == 2
    assert n.level("c", "a") == 2


def test_select_materializes_previous():
    n = make()
    for r in "abcd":
        n.insert(r)
    n.select(("a", "b"))
    n.long_zip(-1, 2)
    n.select(("c", "d"))
    assert n.level("a", "b") == 2  # persisted after reselect
    assert n.selected_level() == -1


def test_counters_and_marks_singletons():
    n = make()
    n.insert("a")
    vec = [1, 2, 3, 4, 5]
    n.update_counters("a", vec)
    assert n.sum_counters("a") == vec
    n.insert("b")
    n.zip("a", "b", 0)
    n.update_counters("b", [10] * 5)
    assert n.sum_counters("a") == [11, 2, 3, 4, 5]
    n.update_marks("b", [0, 1, 0, 0, 0])
    assert n.or_marks("a") == [0, 0, 0, 0, 0]  # related only at level 0
    n.zip("a", "b", 1)
    assert n.or_marks("a") == [0, 1, 0, 0, 0]
    assert n.find_marked("a", 1) == "b"
    assert n.find_marked("a", 0) is None


def test_weights_do_not_change_levels():
    n = make()
    for r in "abc":
        n.insert(r)
    n.zip("a", "b", 0)
    before = n.partitions()
    n.set_weight("a", 40)
    n.set_weight("b", 3)
    n.set_weight("c", 17)
    assert n.partitions() == before


class OpDriver:
    """Random legal op generator applied to structure + oracle in lockstep."""

    def __init__(self, seed, lmax=LMAX, track_counters=True):
        self.rng = SplitMix64(seed)
        self.lmax = lmax
        self.n = NbhStructure(lmax, track_counters=track_counters)
        self.f = FlatNbh(lmax)
        self.refs = []
        self.next_ref = 0

    def legal_zips(self):
        out = []
        for i, x in enumerate(self.refs):
            for y in self.refs[i + 1:]:
                lv = self.f.level(x, y)
                if lv < self.lmax:
                    out.append((x, y, lv + 1))
        return out

    def legal_unzips(self):
        out = []
        for i, x in enumerate(self.refs):
            for y in self.refs[i + 1:]:
                lv = self.f.level(x, y)
                if lv >= 0:
                    out.append((x, y, lv))
        return out

    def step(self):
        rng = self.rng
        op = rng.randrange(100)
        sel = self.f.sel
        if op < 14 or len(self.refs) < 3:
            r = f"e{self.next_ref}"
            self.next_ref += 1
            w = rng.randrange(30) + 1
            self.n.insert(r, w)
            self.f.insert(r, w)
            self.refs.append(r)
        elif op < 22:
            candidates = [r for r in self.refs if not (sel and r in sel)]
            if not candidates:
                return
            r = rng.choice(candidates)
            self.n.delete(r)
            self.f.delete(r)
            self.refs.remove(r)
        elif op < 40:
            zips = self.legal_zips()
            if not zips:
                return
            x, y, i = rng.choice(zips)
            self.n.zip(x, y, i)
            self.f.zip(x, y, i)
        elif op < 52:
            unzips = self.legal_unzips()
            if not unzips:
                return
            x, y, i = rng.choice(unzips)
            self.n.unzip(x, y, i)
            self.f.unzip(x, y, i)
        elif op < 60:
            if rng.randrange(4) == 0:
                self.n.select(())
                self.f.select(())
            else:
                x = rng.choice(self.refs)
                y = rng.choice(self.refs)
                if x == y:
                    return
                self.n.select((x, y))
                self.f.select((x, y))
        elif op < 66 and sel:
            lv = self.f.selected_level()
            if lv < self.lmax:
                i2 = lv + 1 + rng.randrange(self.lmax - lv)
                self.n.long_zip(lv, i2)
                self.f.long_zip(lv, i2)
        elif op < 72 and sel:
            lv = self.f.selected_level()
            if lv < 0:
                return
            i1 = lv - 1 - rng.randrange(lv + 1)
            try:
                self.f.long_unzip(lv, i1)
            except UsageError:
                return  # uniformity did not hold; skip
            self.n.long_unzip(lv, i1)
        elif op < 80:
            r = rng.choice(self.refs)
            w = rng.randrange(100) + 1
            self.n.set_weight(r, w)
            self.f.set_weight(r, w)
        elif op < 88:
            r = rng.choice(self.refs)
            vec = [rng.randrange(20) for _ in range(self.lmax + 1)]
            self.n.update_counters(r, vec)
            self.f.update_counters(r, vec)
        else:
            r = rng.choice(self.refs)
            vec = [rng.randrange(2) for _ in range(self.lmax + 1)]
            self.n.update_marks(r, vec)
            self.f.update_marks(r, vec)

    def check(self):
        check_structure(self.n)
        assert self.n.partitions() == self.f.partitions()
        for r in self.refs:
            assert self.n.sum_counters(r) == self.f.sum_counters(r), r
            assert self.n.or_marks(r) == self.f.or_marks(r), r
            for i in range(self.lmax + 1):
                got = self.n.find_marked(r, i)
                members = self.f.members[i][self.f.cls[i][r]]
                valid = {m for m in members if self.f.marks[m][i]}
                if valid:
                    assert got in valid, (r, i, got, valid)
                else:
                    assert got is None, (r, i, got)
        if self.f.sel:
            assert self.n.selected_level() == self.f.selected_level()


@pytest.mark.parametrize("seed", range(12))
def test_random_traces_vs_flat_oracle(seed):
    drv = OpDriver(seed * 7919 + 3)
    for step in range(220):
        drv.step()
        if step % 4 == 0:
            drv.check()
    drv.check()


def test_random_traces_larger_lmax():
    drv = OpDriver(99, lmax=7)
    for step in range(260):
        drv.step()
        if step % 8 == 0:
            drv.check()
    drv.check()


def test_depth_bound_audit():
    # calibrated multiplicative constant over structure-step depth
    drv = OpDriver(1234, lmax=6)
    for step in range(400):
        drv.step()
    W = sum(drv.f.weights.values())
    ll = math.log2(math.log2(W + 4)) + math.log2(drv.n.lmax + 2)
    for r in drv.refs:
        w = drv.f.weights[r]
        bound = 10.0 * (1 + math.log2(W / w)) * (ll + 1) + 12
        assert drv.n.depth_steps(r) <= bound, (r, drv.n.depth_steps(r), bound)
