import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pwpoly.bigfloat import Ball, BigComplex, BigFloat
from pwpoly.poly import LOG_BITS, NewtonPolygon, Poly, hat_f, norm_one, tilde_f
from pwpoly.generators import two_circle


def brute_hull(points):
    """O(n^2) lower hull: keep p unless it lies on or above a chord of two others."""
    keep = []
    for i, (x, y) in enumerate(points):
        above = False
        for (x1, y1), (x2, y2) in itertools.combinations(points, 2):
            if x1 < x < x2 and (y - y1) * (x2 - x1) >= (y2 - y1) * (x - x1):
                above = True
                break
        if not above:
            keep.append(x)
    return keep


coef = st.one_of(st.just(0), st.builds(lambda m, e: BigFloat.from_man_exp(m, e),
                                       st.integers(1, 2**20), st.integers(-60, 60)))


@st.composite
def polys(draw, max_d=40):
    d = draw(st.integers(1, max_d))
    cs = [draw(coef) for _ in range(d + 1)]
    cs[0] = cs[0] or BigFloat(1)
    cs[-1] = cs[-1] or BigFloat(3)
    return Poly(cs)


@given(polys())
def test_hull_matches_brute_force(f):
    poly = NewtonPolygon(f)
    pts = [(j, h) for j, h in enumerate(poly.H) if h is not None]
    assert poly.vertices == brute_hull(pts)
    assert all(a < b for a, b in zip(poly.edge_slopes, poly.edge_slopes[1:]))


def test_hull_examples():
    assert NewtonPolygon(Poly([1, 1])).vertices == [0, 1]
    p = NewtonPolygon(Poly([BigFloat(1).shift(8), BigFloat(-1).shift(-8)]))
    assert p.vertices == [0, 1]
    assert p.h(0) == -8 and p.h(1) == 8
    assert p.edge_slopes[0] == pytest.approx(16)
    tc = NewtonPolygon(two_circle(200))
    assert tc.vertices == [0, 200, 400]
    assert tc.edge_slopes[0] == pytest.approx(0, abs=1e-50) or abs(tc.edge_slopes[0]) < 1e-9
    assert tc.edge_slopes[1] == pytest.approx(1, abs=1e-9)


def _frac_abs_upper(f: Poly, j: int, r: Fraction) -> float:
    a, b = f.to_fractions()[j]
    return math.hypot(float(a), float(b)) * float(r) ** j


@given(polys(30), st.integers(-40, 40))
def test_hat_f_is_brute_force_max(f, e):
    r = Ball(BigFloat(1).shift(e))
    val, j = hat_f(f, NewtonPolygon(f), r)
    best = max(f.abs_ball(i).mul(r.real_pow(i) if hasattr(r, "real_pow") else _pow(r, i), 64).upper()
               for i in range(len(f)))
    # the located term equals the scan maximum up to rounding
    assert val.upper() >= best.mul(BigFloat(1 - 2.0 ** -50), 64, "f")


def _pow(r: Ball, i: int) -> Ball:
    from pwpoly.bigfloat import real_pow_int
    return real_pow_int(r, i, 64)


def test_hat_f_examples():
    f = Poly([1, 1])
    v, j = hat_f(f, NewtonPolygon(f), Ball(1))
    assert v.contains(1) and j in (0, 1)
    f = Poly([BigFloat(1).shift(8), BigFloat(-1).shift(-8)])
    v, j = hat_f(f, NewtonPolygon(f), Ball(BigFloat(1).shift(16)))
    assert v.contains(256)
    f = two_circle(200)
    v, j = hat_f(f, NewtonPolygon(f), Ball(1))
    assert v.contains(2**200 + 1) and j == 200
    f = Poly([7, 0, 1])
    assert hat_f(f, NewtonPolygon(f), Ball(0))[0].contains(7)


@given(polys(30), st.integers(-30, 30))
def test_hat_tilde_sandwich(f, e):
    r = Ball(BigFloat(1).shift(e))
    h, _ = hat_f(f, NewtonPolygon(f), r)
    t = tilde_f(f, r)
    assert h.lower() <= t.upper()
    assert t.lower() <= h.upper().mul(f.degree + 1, 64, "u")


def test_norm_one():
    assert norm_one(Poly([3, -4, BigComplex(3, 4)])).contains(12)


def test_slice_derivative_normalize():
    f = Poly([1, 2, 3])
    assert f.slice(1, 2) == Poly([2, 3])
    assert f.slice(0, 2) == f
    assert f.slice(1, 1) == Poly([2])
    assert Poly([1, 0, 1]).derivative() == Poly([0, 2])
    assert Poly([5]).derivative() == Poly([0])
    g, v = Poly([0, 1, 0, 1]).normalize()
    assert g == Poly([1, 0, 1]) and v == 1
    g, v = Poly([0, 0, 1]).normalize()
    assert g == Poly([1]) and v == 2
    g, v = Poly([0, 0, 1, 0]).normalize()
    assert g.degree + v == 2


def test_derivative_matches_central_difference():
    import mpmath
    f = Poly([BigFloat(x) for x in (0.3, -1.25, 2.5, 0.75, -3.0, 1.5)])
    mpmath.mp.prec = 4 * 53
    cs = [mpmath.mpf(float(c.re.mid)) for c in f.coeffs]
    df = f.derivative()
    for x in (0.5, -1.3, 2.0):
        ref = mpmath.diff(lambda t: mpmath.polyval(cs[::-1], t), x)
        got = df.horner(BigComplex(BigFloat(x), 0), 200).re
        assert abs(mpmath.mpf(float(got.mid)) - ref) < 1e-12


def test_tau_and_mantissa():
    f = Poly([BigFloat(1).shift(100), BigFloat(3).shift(-20)])
    assert f.tau() >= 100
    assert f.mantissa_bits() == 2


@given(polys(20))
def test_text_round_trip(f):
    assert Poly.from_text(f.to_text()) == f


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("deg 3\n", 1),
    ("degree x\n", 1),
    ("degree 2\n0 0x1p+0 0x0p+0\n1 zz 0x0p+0\n", 3),
    ("degree 1\n# comment\n\n5 0x1p+0 0x0p+0\n", 4),
    ("degree 1\n0 0x1p+0\n", 2),
])
def test_text_errors_name_line(text, line):
    with pytest.raises(ValueError, match=f"line {line}"):
        Poly.from_text(text)


def test_text_omitted_index_is_zero():
    f = Poly.from_text("degree 2\n2 0x1p+0 0x0p+0\n")
    assert f == Poly([0, 0, 1])
