import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from pwpoly.bigfloat import (EXP_LIMIT, Ball, BigComplex, BigFloat, ExponentOverflow, exp2,
                             from_hex, log2, pi_ball, pow_int, real_pow_int, root_of_unity,
                             to_hex)

dyadic = st.builds(lambda m, e: BigFloat.from_man_exp(m, e),
                   st.integers(-2**80, 2**80), st.integers(-200, 200))
precs = st.integers(2, 120)


def frac_interval(b: Ball):
    return b.to_fraction_interval()


@given(dyadic, dyadic)
def test_exact_ops_match_fractions(a, b):
    assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
    assert (a - b).to_fraction() == a.to_fraction() - b.to_fraction()
    assert (a * b).to_fraction() == a.to_fraction() * b.to_fraction()


@given(dyadic, dyadic, precs)
def test_directed_rounding_brackets_exact(a, b, p):
    q = a.to_fraction() * b.to_fraction()
    assert a.mul(b, p, "f").to_fraction() <= q <= a.mul(b, p, "c").to_fraction()
    assume(not b.is_zero())
    q = a.to_fraction() / b.to_fraction()
    assert a.div(b, p, "f").to_fraction() <= q <= a.div(b, p, "c").to_fraction()
    assert abs(a.div(b, p, "d").to_fraction()) <= abs(q) <= abs(a.div(b, p, "u").to_fraction())


@given(dyadic, precs)
def test_round_to_nearest_is_within_half_ulp(a, p):
    r = a.round(p)
    assert r.bits <= p
    if not a.is_zero():
        ulp = Fraction(2) ** (a.top() - p)
        assert abs(r.to_fraction() - a.to_fraction()) <= ulp / 2


@given(dyadic)
def test_hex_round_trip(a):
    assert from_hex(to_hex(a)) == a


def test_hex_examples():
    assert to_hex(BigFloat(12)) == "0x1.8p+3"
    assert to_hex(BigFloat(-0.5)) == "-0x1p-1"
    assert to_hex(BigFloat(0)) == "0x0p+0"
    assert from_hex("0x1.8p+3") == 12
    assert from_hex("0x3p-1") == Fraction(3, 2)
    with pytest.raises(ValueError):
        from_hex("1.5")


def test_huge_exponents_are_exact():
    x = BigFloat(1).shift(10**12)
    assert (x * x).exponent == 2 * 10**12
    with pytest.raises(ExponentOverflow):
        BigFloat(1).shift(EXP_LIMIT + 1)


balls = st.builds(lambda m, e, r: Ball(BigFloat.from_man_exp(m, e), BigFloat.from_man_exp(r, e - 3)),
                  st.integers(-2**40, 2**40), st.integers(-30, 30), st.integers(0, 2**10))


def _pick(b: Ball, t: Fraction) -> Fraction:
    lo, hi = frac_interval(b)
    return lo + (hi - lo) * t


unit = st.fractions(0, 1)


@given(balls, balls, unit, unit, st.integers(8, 80))
def test_ball_ops_contain_pointwise_results(a, b, s, t, p):
    x, y = _pick(a, s), _pick(b, t)
    assert a.add(b, p).contains(x + y)
    assert a.sub(b, p).contains(x - y)
    assert a.mul(b, p).contains(x * y)
    if not b.contains_zero():
        assert a.div(b, p).contains(x / y)


@given(balls, unit, st.integers(8, 80))
def test_ball_sqrt_contains(a, s, p):
    a = a.abs()
    x = _pick(a, s)
    assume(x >= 0 and not a.mid.is_zero() and a.lower() >= 0)
    r = a.sqrt(p)
    lo, hi = frac_interval(r)
    assert lo * lo <= x or lo <= 0
    assert hi * hi >= x


def test_ball_from_fraction_exact_and_inexact():
    assert Ball.from_fraction(Fraction(3, 4), 10).rad.is_zero()
    b = Ball.from_fraction(Fraction(1, 3), 40)
    assert b.contains(Fraction(1, 3)) and not b.rad.is_zero()


@given(st.fractions(-40, 40, max_denominator=1000), st.integers(20, 150))
def test_exp2_against_mpmath(x, p):
    b = exp2(Ball.from_fraction(x, p + 20), p)
    mpmath.mp.prec = p + 60
    ref = mpmath.power(2, mpmath.mpf(x.numerator) / x.denominator)
    lo, hi = b.lower(), b.upper()
    assert mpmath.mpf(lo.to_fraction().numerator) / lo.to_fraction().denominator <= ref
    assert ref <= mpmath.mpf(hi.to_fraction().numerator) / hi.to_fraction().denominator


@given(st.integers(1, 2**60), st.integers(-300, 300), st.integers(20, 120))
def test_log2_against_mpmath(m, e, p):
    x = BigFloat.from_man_exp(m, e)
    b = log2(Ball(x), p)
    mpmath.mp.prec = p + 60
    ref = mpmath.log(mpmath.mpf(m) * mpmath.mpf(2) ** e, 2)
    assert abs(mpmath.mpf(float(b.mid)) - ref) <= float(b.rad) + abs(ref) * 2.0 ** -50


def test_pi_ball_contains_pi():
    b = pi_ball(200)
    mpmath.mp.prec = 260
    lo, hi = b.to_fraction_interval()
    assert mpmath.mpf(lo.numerator) / lo.denominator < mpmath.pi < mpmath.mpf(hi.numerator) / hi.denominator


@pytest.mark.parametrize("j,k", [(0, 7), (1, 4), (2, 4), (3, 4), (1, 13), (5, 12), (11, 384), (-1, 5)])
def test_root_of_unity(j, k):
    w = root_of_unity(j, k, 100)
    mpmath.mp.prec = 160
    ref = mpmath.exp(2j * mpmath.pi * j / k)
    slack = mpmath.mpf(2) ** -150  # the reference itself is inexact
    for part, r in ((w.re, ref.real), (w.im, ref.imag)):
        lo, hi = part.to_fraction_interval()
        assert mpmath.mpf(lo.numerator) / lo.denominator - slack <= r
        assert r <= mpmath.mpf(hi.numerator) / hi.denominator + slack
    if (4 * j) % k == 0:
        assert w.rad_bound().is_zero()


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 40))
def test_pow_int_exact_gaussian_integers(a, b, k):
    z = BigComplex(a, b)
    w = pow_int(z, k, 400)
    re, im = 1, 0
    for _ in range(k):
        re, im = re * a - im * b, re * b + im * a
    assert w.re.contains(re) and w.im.contains(im)
    assert real_pow_int(Ball(a), k, 400).contains(a ** k)


def test_complex_abs_and_div():
    z = BigComplex(3, 4)
    assert z.abs(64).contains(5)
    q = BigComplex(1, 1).div(BigComplex(0, 2), 64)
    assert q.re.contains(Fraction(1, 2)) and q.im.contains(Fraction(-1, 2))
    assert math.isclose(BigComplex(BigFloat(1).shift(5000), 0).log2_abs_float(), 5000)
