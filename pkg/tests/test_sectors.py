import math
import random
from fractions import Fraction

import pytest

from pwpoly.bigfloat import BigFloat
from pwpoly.generators import random_poly, two_circle
from pwpoly.poly import Poly
from pwpoly.rings import compute_rings
from pwpoly.sectors import (RingContext, baby_steps, build_piecewise, giant_steps,
                            read_piecewise, sector_params, spread_fft, write_piecewise)

from oracles import ctx, mpf_of, sector_bound_check


def test_sector_params_unit_ring():
    g, r, K, mp = sector_params(Fraction(0), Fraction(1), 26, 10)
    assert g == Fraction(3, 2) and r == Fraction(3, 4)
    assert K == 13 and mp == 2


def _width(m, parts):
    # ring widths are rounded up to the dyadic grid of the sweep
    return Fraction(math.ceil(Fraction(m, parts) * 2**40), 2**40)


def _k_formula_bound(w: Fraction) -> float:
    x = 2.0 ** float(w)
    return 2 * math.pi * (x + 1) / (1.5 * (x - 1)) + 1


CASES = [(10, 24), (64, 53), (300, 30), (7, 40)]


@pytest.mark.parametrize("delta,m", CASES)
def test_sector_params_k_matches_geometry(delta, m):
    w = _width(m, delta + 1)
    g, r, K, mp = sector_params(Fraction(0), w, delta, m)
    assert K <= _k_formula_bound(w)
    assert mp == delta // K
    assert g.to_fraction() / r.to_fraction() <= 1 + 3 * Fraction(delta, m)


@pytest.mark.xfail(strict=True, reason="ceil(2 pi gamma / rho) is about 6 delta / m on rings of "
                   "width m / (delta + 1), twice the stated 3 delta / m + 2")
@pytest.mark.parametrize("delta,m", CASES)
def test_sector_params_k_stated_bound(delta, m):
    _, _, K, _ = sector_params(Fraction(0), _width(m, delta + 1), delta, m)
    assert K <= 1.1 * (3 * delta / m + 2)


@pytest.mark.xfail(strict=True, reason="K = 6 for delta = 8, m = 40 and ratio 2^(m / 2 delta)")
def test_sector_params_narrow_ring():
    delta, m = 8, 40
    _, _, K, _ = sector_params(Fraction(0), Fraction(m, 2 * delta), delta, m)
    assert K <= 5


def _ring_ctx(f, m, c=1, pick=max):
    part = compute_rings(f, m, c)
    from pwpoly.poly import NewtonPolygon
    H = NewtonPolygon(f).H
    rings = [r for r in part if r.delta >= 1 and r.lo is not None and r.hi is not None]
    ring = pick(rings, key=lambda r: r.delta)
    return RingContext(f, H, ring, m, Fraction(c)), ring


def test_baby_steps_are_normalized_powers():
    f = random_poly("hyperbolic", 40, 0)
    c, ring = _ring_ctx(f, 24)
    q = baby_steps(c)
    mp = ctx(4 * c.F)
    gamma = mpf_of(mp, c.gamma.to_fraction())
    rho = mpf_of(mp, c.rho.to_fraction())
    a, b = gamma / (gamma + rho), rho / (gamma + rho)
    n = c.deg + 1
    for k in (0, 1, 2, len(q) - 1):
        vals = c.lay.unpack(q[k], n)
        for j in range(min(k, n - 1) + 1):
            ref = mp.binomial(k, j) * a ** (k - j) * b ** j
            assert abs(vals[j] / mp.mpf(2) ** c.F - ref) <= (k + 1) * 2.0 ** (-c.F + 2)
        if k < n:
            assert abs(sum(vals[:k + 1]) / mp.mpf(2) ** c.F - 1) <= (k + 1) ** 2 * 2.0 ** (-c.F + 2)


def test_split_and_stream_giant_steps_agree():
    f = random_poly("flat", 60, 2)
    c, _ = _ring_ctx(f, 24)
    q = baby_steps(c)
    a = giant_steps(c, q, "stream")
    b = giant_steps(c, q, "split")
    n = c.deg + 1
    tol = (c.ring.delta + 2) ** 2 * 4
    for (ar, ai), (br, bi) in zip(a, b):
        for x, y in ((ar, br), (ai, bi)):
            assert max(abs(s - t) for s, t in zip(c.lay.unpack(x, n), c.lay.unpack(y, n))) <= tol


def test_single_sector_spread_is_identity():
    f = random_poly("hyperbolic", 6, 1)
    c, _ = _ring_ctx(f, 53, pick=min)
    q = baby_steps(c)
    r = giant_steps(c, q)
    if c.K == 1:
        assert spread_fft(c, r) == r


def test_monomial_piecewise():
    pw = build_piecewise(Poly([0, 0, 0, 0, 3]), 30)
    assert pw.origin == 4 and pw.sector_count == 1
    sec = next(pw.all_sectors())
    assert sec.is_monomial


@pytest.mark.parametrize("family", ["hyperbolic", "elliptic", "flat"])
def test_sector_bounds_hold(family):
    f = random_poly(family, 48, 5)
    pw = build_piecewise(f, 24, 1)
    checked, failures = sector_bound_check(f, pw)
    assert checked > 0 and failures == []


def test_two_circle_partition_shape():
    f = two_circle(40)
    pw = build_piecewise(f, 30, 1)
    # sectors concentrate on the two root circles
    busy = [r for r in pw.partition if r.delta >= 1]
    assert busy
    for r in busy:
        lo, hi = float(r.s_lo), float(r.s_hi)
        assert hi > -1.5 and lo < 2.5


def test_disk_cover():
    f = random_poly("elliptic", 80, 3)
    pw = build_piecewise(f, 24, 1)
    rng = random.Random(0)
    for ring in pw.partition:
        secs = pw.ring_sectors(ring.n)
        if secs[0].is_monomial:
            continue
        K = secs[0].K
        for _ in range(200):
            s = rng.uniform(float(ring.s_lo), float(ring.s_hi))
            th = rng.uniform(0, 2 * math.pi)
            z = 2 ** s * complex(math.cos(th), math.sin(th))
            k = round(K * th / (2 * math.pi)) % K
            sec = secs[k]
            center = float(sec.gamma) * complex(math.cos(2 * math.pi * k / K), math.sin(2 * math.pi * k / K))
            assert abs(z - center) <= float(sec.rho) * (1 + 1e-12)


def test_serialization_round_trip():
    f = random_poly("hyperbolic", 30, 9)
    pw = build_piecewise(f, 24, Fraction(7, 2))
    text = write_piecewise(pw)
    pw2 = read_piecewise(text)
    assert write_piecewise(pw2) == text
    assert pw2.degree == pw.degree and pw2.partition.rings == pw.partition.rings


def test_serialization_rejects_garbage():
    with pytest.raises(ValueError):
        read_piecewise("hello\n")
    f = random_poly("hyperbolic", 10, 9)
    text = write_piecewise(build_piecewise(f, 24))
    with pytest.raises(ValueError):
        read_piecewise(text[: len(text) // 2])


def test_threads_do_not_change_result():
    f = random_poly("flat", 100, 4)
    assert write_piecewise(build_piecewise(f, 30, 1, threads=1)) == \
        write_piecewise(build_piecewise(f, 30, 1, threads=4))
