"""Counter/bit vector and matrix algebra against naive loop oracles."""

import pytest

from dynbicon.counters import (
    ApproxConfig,
    ApproxCounter,
    BitMat,
    BitVec,
    CounterMat,
    CounterVec,
    UsageError,
)
from dynbicon.rng import SplitMix64

SIZE = 33


def rand_vec(rng, size=SIZE, cap=1000):
    return [rng.randrange(cap) for _ in range(size)]


def rand_mat(rng, size=SIZE, cap=1000):
    return [rand_vec(rng, size, cap) for _ in range(size)]


def test_vec_add_zero_identity():
    z = CounterVec(3)
    v = CounterVec(entries=[5, 6, 7])
    assert (z + v).entries == [5, 6, 7]


def test_vec_add_direct():
    a = CounterVec(entries=[1, 2, 3])
    b = CounterVec(entries=[3, 2, 1])
    assert (a + b).entries == [4, 4, 4]


def test_vec_add_random_commutes_with_loop_oracle():
    rng = SplitMix64(7)
    for _ in range(200):
        a, b = rand_vec(rng), rand_vec(rng)
        va, vb = CounterVec(entries=a), CounterVec(entries=b)
        expect = [x + y for x, y in zip(a, b)]
        assert (va + vb).entries == expect
        assert (vb + va).entries == expect


def test_vec_splice_examples():
    a = CounterVec(entries=[1, 2, 3])
    b = CounterVec(entries=[9, 8, 7])
    assert a.splice(1, b).entries == [1, 8, 7]
    assert a.splice(0, b).entries == [9, 8, 7]
    assert a.splice(3, b).entries == [1, 2, 3]


def test_vec_splice_all_k_match_loop():
    rng = SplitMix64(8)
    a, b = rand_vec(rng), rand_vec(rng)
    va, vb = CounterVec(entries=a), CounterVec(entries=b)
    for k in range(SIZE + 1):
        assert va.splice(k, vb).entries == a[:k] + b[k:]


def test_vec_errors():
    with pytest.raises(UsageError):
        CounterVec(3) + CounterVec(4)
    with pytest.raises(UsageError):
        CounterVec(3).splice(4, CounterVec(3))


def test_mat_addvector_examples():
    m = CounterMat(3)
    v = CounterVec(entries=[1, 2, 3])
    out = m.addvector(v, 1)
    assert out.rows == [[0, 0, 0], [1, 2, 3], [0, 0, 0]]
    m2 = CounterMat(rows=[[1, 1, 1], [2, 2, 2], [3, 3, 3]])
    assert m2.addvector(CounterVec(3), 2) == m2


def test_mat_addvector_random_vs_loop():
    rng = SplitMix64(9)
    for _ in range(50):
        m, v = rand_mat(rng), rand_vec(rng)
        r = rng.randrange(SIZE)
        out = CounterMat(rows=m).addvector(CounterVec(entries=v), r)
        for i in range(SIZE):
            for j in range(SIZE):
                assert out[i, j] == m[i][j] + (v[j] if i == r else 0)


def test_mat_splice():
    rng = SplitMix64(10)
    m, n = rand_mat(rng), rand_mat(rng)
    cm, cn = CounterMat(rows=m), CounterMat(rows=n)
    assert cm.splice(0, cn) == cn
    assert cm.splice(SIZE, cn) == cm
    for k in (1, 7, 16, 32):
        out = cm.splice(k, cn)
        for r in range(SIZE):
            assert out.rows[r] == (m[r] if r < k else n[r])


def test_mat_sum_and_uppersum():
    zero = CounterMat(3)
    assert zero.sum().entries == [0, 0, 0]
    assert zero.uppersum().entries == [0, 0, 0]
    m = CounterMat(rows=[[1, 1, 1], [0, 2, 0], [0, 0, 3]])
    assert m.sum().entries == [1, 3, 4]
    assert m.uppersum().entries == [1, 2, 3]


def test_mat_sums_random_vs_loop():
    rng = SplitMix64(11)
    for _ in range(50):
        m = rand_mat(rng)
        cm = CounterMat(rows=m)
        assert cm.sum().entries == [sum(m[i][j] for i in range(SIZE)) for j in range(SIZE)]
        assert cm.uppersum().entries == [
            sum(m[i][j] for i in range(j, SIZE)) for j in range(SIZE)
        ]
        # fold of vec_add over rows
        acc = CounterVec(SIZE)
        for row in m:
            acc = acc + CounterVec(entries=row)
        assert acc == cm.sum()


def test_uppersum_of_addvector_indicator():
    rng = SplitMix64(12)
    size = 9
    for r in range(size):
        v = rand_vec(rng, size, 50)
        m = CounterMat(size).addvector(CounterVec(entries=v), r)
        up = m.uppersum()
        for j in range(size):
            assert up[j] == (v[j] if r >= j else 0)


def test_bitvec_ops():
    a = BitVec(entries=[1, 0, 1])
    b = BitVec(entries=[0, 0, 1])
    assert (a | b).entries == [1, 0, 1]
    assert BitVec(entries=[1, 1, 1]).splice(1, BitVec(3)).entries == [1, 0, 0]
    assert (a | BitVec(3)) == a
    a.set(1, True)
    assert a.entries == [1, 1, 1]


def test_bitmat_ops_examples():
    assert BitMat(3).upperor().entries == [0, 0, 0]
    m = BitMat(3).orvector(BitVec(entries=[1, 0, 1]), 2)
    assert m.rows == [[0, 0, 0], [0, 0, 0], [1, 0, 1]]


def test_bitmat_random_vs_bool_loop():
    rng = SplitMix64(13)
    for _ in range(50):
        m = [[rng.randrange(2) for _ in range(SIZE)] for _ in range(SIZE)]
        n = [[rng.randrange(2) for _ in range(SIZE)] for _ in range(SIZE)]
        bm, bn = BitMat(rows=m), BitMat(rows=n)
        k = rng.randrange(SIZE + 1)
        out = bm.splice(k, bn)
        for r in range(SIZE):
            assert out.rows[r] == (m[r] if r < k else n[r])
        assert bm.or_all().entries == [
            max(m[i][j] for i in range(SIZE)) for j in range(SIZE)
        ]
        assert bm.upperor().entries == [
            max(m[i][j] for i in range(j, SIZE)) for j in range(SIZE)
        ]


def test_no_subtraction_in_api():
    # Review-checklist style: none of the value types expose subtraction.
    for cls in (CounterVec, CounterMat, BitVec, BitMat, ApproxCounter):
        assert not hasattr(cls, "__sub__")
        assert not any("sub" in name.lower() for name in vars(cls))


# --- approximate backend -------------------------------------------------


def test_approx_exact_powers_of_two():
    cfg = ApproxConfig(b=8, s=6)
    two = ApproxCounter(cfg, 2)
    four = two + two
    assert four.value() == 4
    assert four.depth == 2


def test_approx_never_overestimates_and_tracks_depth():
    cfg = ApproxConfig(b=8, s=8)
    rng = SplitMix64(14)
    acc = ApproxCounter(cfg, 1)
    exact = 1
    for _ in range(10_000):
        add = rng.randrange(100) + 1
        acc = acc + ApproxCounter(cfg, add)
        exact += add
        assert acc.value() <= exact
    assert acc.depth == 10_000 + 1 - 1 + 1  # chain of k adds -> depth k+1


def test_approx_relative_error_within_bound():
    # Random binary add-trees of bounded depth; exact big-int oracle alongside.
    B = 1.5
    max_depth = 200
    cfg = ApproxConfig.for_depth(max_depth, n_max=1 << 20, B=B)
    rng = SplitMix64(15)
    for _ in range(200):
        vals = [rng.randrange(1 << 12) + 1 for _ in range(max_depth)]
        acc = ApproxCounter(cfg, vals[0])
        exact = vals[0]
        for v in vals[1:]:
            acc = acc + ApproxCounter(cfg, v)
            exact += v
        assert acc.value() <= exact <= acc.value() * B
        assert not acc.saturated


def test_approx_saturates_on_exponent_overflow():
    cfg = ApproxConfig(b=4, s=3)  # max exponent 7 -> values < 2^8
    a = ApproxCounter(cfg, 200)
    b = a + a
    assert b.saturated
    assert b.value() <= 400


def test_approx_vector_ops_route_through_generic_kernels():
    cfg = ApproxConfig(b=8, s=8)
    from dynbicon.counters import approx_vec

    a = approx_vec(cfg, [1, 2, 3])
    b = approx_vec(cfg, [4, 5, 6])
    out = a + b
    assert [x.value() for x in out.entries] == [5, 7, 9]
