import random

import pytest
from hypothesis import given, strategies as st

from pwpoly.packed import LazySlots, Layout, dft_packed, slot_width, smallest_factor
from pwpoly.sectors import smooth_at_least, twiddle_table

from oracles import ctx, naive_dft

F = 40
LAY = Layout(6, F, slot_width(F))
slot = st.integers(-(1 << (F + 2)), 1 << (F + 2))


@given(st.lists(slot, min_size=6, max_size=6))
def test_pack_unpack(vals):
    x = LAY.pack(vals)
    assert LAY.unpack(x) == vals
    assert list(LazySlots(LAY, x, 6)) == vals


@given(st.lists(slot, min_size=6, max_size=6), st.lists(slot, min_size=6, max_size=6))
def test_mul_is_truncated_fixed_point_product(a, b):
    got = LAY.unpack(LAY.mul(LAY.pack(a), LAY.pack(b)))
    for k in range(6):
        exact = sum(a[i] * b[k - i] for i in range(k + 1))
        assert got[k] == exact >> F


@given(st.integers(-(1 << (F + 2)), 1 << (F + 2)), st.lists(slot, min_size=6, max_size=6))
def test_scal_and_shift(c, a):
    x = LAY.pack(a)
    assert LAY.unpack(LAY.scal(c, x)) == [(c * v) >> F for v in a]
    assert LAY.unpack(LAY.shift_up(x)) == [0] + a[:5]


def test_layout_rejects_narrow_slots():
    with pytest.raises(ValueError):
        Layout(4, 40, 64)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 13, 97, 383, 1000])
def test_smooth_at_least(n):
    K = smooth_at_least(n)
    assert n <= K <= 2 * n
    r = K
    for p in (2, 3, 5):
        while r % p == 0:
            r //= p
    assert r == 1


def test_smallest_factor():
    assert [smallest_factor(n) for n in (2, 9, 15, 49, 97)] == [2, 3, 3, 7, 97]


@pytest.mark.parametrize("K", [1, 2, 3, 4, 5, 8, 12, 30, 7])
def test_dft_matches_naive(K):
    rng = random.Random(K)
    n = 3
    lay = Layout(n, F, slot_width(F))
    vals = [[(rng.randrange(-(1 << F), 1 << F), rng.randrange(-(1 << F), 1 << F))
             for _ in range(n)] for _ in range(K)]
    xs = [(lay.pack([v[0] for v in row]), lay.pack([v[1] for v in row])) for row in vals]
    out = dft_packed(lay, xs, twiddle_table(K, F), K)
    mp = ctx(8 * F)
    for j in range(n):
        col = [mp.mpc(vals[k][j][0], vals[k][j][1]) / 2 ** F for k in range(K)]
        ref = naive_dft(mp, col)
        for k in range(K):
            gr = lay.unpack(out[k][0])[j]
            gi = lay.unpack(out[k][1])[j]
            err = abs(mp.mpc(gr, gi) / 2 ** F - ref[k])
            # a few units in the last place per butterfly level
            assert err <= K * 2.0 ** (-F + 4)


def test_two_point_dft():
    lay = Layout(1, F, slot_width(F))
    a, b = 3 << F, 5 << F
    out = dft_packed(lay, [(lay.pack([a]), lay.pack([0])), (lay.pack([b]), lay.pack([0]))],
                     twiddle_table(2, F), 2)
    assert lay.unpack(out[0][0]) == [a + b]
    assert lay.unpack(out[1][0]) == [a - b]
