"""Arbitrary precision binary floats, real balls and complex balls.

Numbers are ``sign * man * 2**exp`` with an odd integer mantissa and an
integer exponent; the raw representation is the normalized tuple used by
``mpmath.libmp`` so that its correctly rounded kernels can be reused.
Exponents are Python ints, bounded only by ``EXP_LIMIT``.

A :class:`Ball` is a midpoint and a radius.  Every ball operation returns a
ball that contains the exact result of the same operation applied to any
points of the input balls.  Radii are kept with ``RAD_PREC`` bits and are
always rounded upward.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from mpmath import libmp as _lm

__all__ = [
    "EXP_LIMIT", "RAD_PREC", "ExponentOverflow",
    "BigFloat", "Ball", "BigComplex",
    "to_hex", "from_hex", "log2", "exp2", "exp_i_theta", "root_of_unity",
    "pow_int", "pi_ball",
]

EXP_LIMIT = 2**62
RAD_PREC = 30

_ZERO = _lm.fzero
_ONE = _lm.fone
_N, _U, _D, _F, _C = "n", "u", "d", "f", "c"


class ExponentOverflow(ArithmeticError):
    """Raised when a binary exponent leaves the supported range."""


def _chk(v):
    if v[1] and (v[2] > EXP_LIMIT or v[2] < -EXP_LIMIT):
        raise ExponentOverflow(f"binary exponent {v[2]} out of range")
    return v


def _top(v) -> int:
    # exponent of the bit just above the leading one
    return v[2] + v[3]


def _ulp_bound(v, prec: int):
    """Upper bound on the rounding error of a result rounded to ``prec`` bits."""
    if not v[1]:
        return _ZERO
    return (0, 1, _top(v) - prec, 1)


def _radd(a, b):
    if not a[1]:
        return b
    if not b[1]:
        return a
    return _lm.mpf_add(a, b, RAD_PREC, _U)


def _rmul(a, b):
    if not a[1] or not b[1]:
        return _ZERO
    return _lm.mpf_mul(a, b, RAD_PREC, _U)


def _rdiv(a, b):
    if not a[1]:
        return _ZERO
    return _lm.mpf_div(a, b, RAD_PREC, _U)


def _rabs_up(v):
    # |v| rounded up to radius precision
    if not v[1]:
        return _ZERO
    return _lm.mpf_pos(_lm.mpf_abs(v), RAD_PREC, _U)


def _rabs_down(v, prec=RAD_PREC):
    if not v[1]:
        return _ZERO
    return _lm.mpf_pos(_lm.mpf_abs(v), prec, _D)


def _rsub_down(a, b):
    """a - b rounded down, clamped at zero."""
    x = _lm.mpf_sub(a, b, RAD_PREC, _D)
    return x if x[0] == 0 else _ZERO


def _round(v, prec: int):
    """Round ``v`` to ``prec`` bits; returns (value, error bound)."""
    if v[3] <= prec or not v[1]:
        return v, _ZERO
    w = _lm.mpf_pos(v, prec, _N)
    return w, _ulp_bound(w, prec)


def _exact_add(a, b, prec):
    if not a[1]:
        return _round(b, prec)
    if not b[1]:
        return _round(a, prec)
    if abs(_top(a) - _top(b)) <= 4 * prec + 64:
        return _round(_lm.mpf_add(a, b, 0), prec)
    w = _lm.mpf_add(a, b, prec, _N)
    return w, _ulp_bound(w, prec)


def _exact_mul(a, b, prec):
    if a[3] + b[3] <= prec:
        return _lm.mpf_mul(a, b), _ZERO
    w = _lm.mpf_mul(a, b, prec, _N)
    return w, _ulp_bound(w, prec)


class BigFloat:
    """An exact binary floating point number with unbounded exponent."""

    __slots__ = ("_v",)

    def __init__(self, value=0):
        if isinstance(value, BigFloat):
            self._v = value._v
        elif isinstance(value, bool):
            self._v = _lm.from_int(int(value))
        elif isinstance(value, int):
            self._v = _lm.from_int(value)
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError("BigFloat cannot hold inf or nan")
            self._v = _lm.from_float(value)
        elif isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError("fraction is not dyadic; use from_fraction")
            self._v = _chk(_lm.from_man_exp(value.numerator, 1 - den.bit_length()))
        elif isinstance(value, str):
            self._v = from_hex(value)._v
        elif isinstance(value, tuple):
            self._v = _chk(value)
        else:
            raise TypeError(f"cannot build BigFloat from {type(value).__name__}")

    @classmethod
    def _raw(cls, v) -> BigFloat:
        x = object.__new__(cls)
        x._v = _chk(v)
        return x

    @classmethod
    def from_man_exp(cls, man: int, exp: int) -> BigFloat:
        return cls._raw(_lm.from_man_exp(man, exp))

    @classmethod
    def from_fraction(cls, q: Fraction, prec: int, rnd: str = _N) -> BigFloat:
        return cls._raw(_lm.from_rational(q.numerator, q.denominator, prec, rnd))

    @property
    def sign(self) -> int:
        if not self._v[1]:
            return 0
        return -1 if self._v[0] else 1

    @property
    def mantissa(self) -> int:
        """Signed odd mantissa (zero for zero)."""
        s, man, _, _ = self._v
        return -man if s else man

    @property
    def exponent(self) -> int:
        return self._v[2] if self._v[1] else 0

    @property
    def bits(self) -> int:
        return self._v[3]

    def is_zero(self) -> bool:
        return not self._v[1]

    def top(self) -> int:
        """Smallest e with |x| < 2**e (0 for zero)."""
        return _top(self._v) if self._v[1] else 0

    def to_fraction(self) -> Fraction:
        s, man, exp, _ = self._v
        if s:
            man = -man
        return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)

    def __float__(self) -> float:
        return _lm.to_float(self._v)

    def log2_float(self) -> float:
        """Float approximation of log2|x|, finite for any nonzero x."""
        s, man, exp, bc = self._v
        if not man:
            return -math.inf
        if bc > 60:
            man >>= bc - 60
            exp += bc - 60
            bc = 60
        return exp + bc - 1 + math.log2(man / (1 << (bc - 1)))

    # exact ring operations
    def __add__(self, o):
        return BigFloat._raw(_lm.mpf_add(self._v, _as_raw(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return BigFloat._raw(_lm.mpf_sub(self._v, _as_raw(o)))

    def __rsub__(self, o):
        return BigFloat._raw(_lm.mpf_sub(_as_raw(o), self._v))

    def __mul__(self, o):
        return BigFloat._raw(_lm.mpf_mul(self._v, _as_raw(o)))

    __rmul__ = __mul__

    def __neg__(self):
        return BigFloat._raw(_lm.mpf_neg(self._v))

    def __abs__(self):
        return BigFloat._raw(_lm.mpf_abs(self._v))

    def shift(self, k: int) -> BigFloat:
        """Exact multiplication by 2**k."""
        return BigFloat._raw(_lm.mpf_shift(self._v, k))

    # rounded operations
    def add(self, o, prec: int, rnd: str = _N) -> BigFloat:
        return BigFloat._raw(_lm.mpf_add(self._v, _as_raw(o), prec, rnd))

    def sub(self, o, prec: int, rnd: str = _N) -> BigFloat:
        return BigFloat._raw(_lm.mpf_sub(self._v, _as_raw(o), prec, rnd))

    def mul(self, o, prec: int, rnd: str = _N) -> BigFloat:
        return BigFloat._raw(_lm.mpf_mul(self._v, _as_raw(o), prec, rnd))

    def div(self, o, prec: int, rnd: str = _N) -> BigFloat:
        d = _as_raw(o)
        if not d[1]:
            raise ZeroDivisionError("BigFloat division by zero")
        return BigFloat._raw(_lm.mpf_div(self._v, d, prec, rnd))

    def sqrt(self, prec: int, rnd: str = _N) -> BigFloat:
        return BigFloat._raw(_lm.mpf_sqrt(self._v, prec, rnd))

    def round(self, prec: int, rnd: str = _N) -> BigFloat:
        return BigFloat._raw(_lm.mpf_pos(self._v, prec, rnd))

    def floor(self) -> int:
        return int(_lm.to_int(self._v, _F))

    def ceil(self) -> int:
        return int(_lm.to_int(self._v, _C))

    def _cmp(self, o) -> int:
        return _lm.mpf_cmp(self._v, _as_raw(o))

    def __eq__(self, o):
        if isinstance(o, (BigFloat, int, float, Fraction)):
            if isinstance(o, Fraction):
                return self.to_fraction() == o
            return self._cmp(o) == 0
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __repr__(self):
        return f"BigFloat('{to_hex(self)}')"

    def hex(self) -> str:
        return to_hex(self)


def _as_raw(o):
    if isinstance(o, BigFloat):
        return o._v
    if isinstance(o, int):
        return _lm.from_int(o)
    if isinstance(o, float):
        return _lm.from_float(o)
    if isinstance(o, Fraction):
        return BigFloat(o)._v
    raise TypeError(f"unsupported operand {type(o).__name__}")


_HEX_RE = re.compile(
    r"^\s*([+-]?)0[xX]([0-9a-fA-F]+)(?:\.([0-9a-fA-F]*))?(?:[pP]([+-]?\d+))?\s*$")


def to_hex(x: BigFloat) -> str:
    """Exact hexadecimal float text, e.g. ``-0x1.8p+3``."""
    s, man, exp, bc = x._v
    if not man:
        return "0x0p+0"
    sign = "-" if s else ""
    e = exp + bc - 1
    frac = man - (1 << (bc - 1))
    nbits = bc - 1
    pad = (-nbits) % 4
    nhex = (nbits + pad) // 4
    if nhex == 0:
        return f"{sign}0x1p{e:+d}"
    return f"{sign}0x1.{frac << pad:0{nhex}x}p{e:+d}"


def from_hex(text: str) -> BigFloat:
    """Parse hexadecimal float text produced by :func:`to_hex` (or C99 ``%a``)."""
    mo = _HEX_RE.match(text)
    if mo is None:
        raise ValueError(f"malformed hexadecimal float: {text!r}")
    sign, ip, fp, ep = mo.groups()
    fp = fp or ""
    man = int(ip + fp, 16)
    exp = int(ep or 0) - 4 * len(fp)
    if sign == "-":
        man = -man
    return BigFloat._raw(_lm.from_man_exp(man, exp))


class Ball:
    """Real ball ``[mid - rad, mid + rad]``."""

    __slots__ = ("_m", "_r")

    def __init__(self, mid=0, rad=0):
        self._m = BigFloat(mid)._v if not isinstance(mid, tuple) else mid
        r = BigFloat(rad)._v if not isinstance(rad, tuple) else rad
        if r[0] and r[1]:
            raise ValueError("negative radius")
        self._r = _lm.mpf_pos(r, RAD_PREC, _U) if r[3] > RAD_PREC else r

    @classmethod
    def _raw(cls, m, r) -> Ball:
        b = object.__new__(cls)
        b._m = _chk(m)
        b._r = r
        return b

    @classmethod
    def from_fraction(cls, q: Fraction, prec: int) -> Ball:
        m = _lm.from_rational(q.numerator, q.denominator, prec, _N)
        den = q.denominator
        exact = den & (den - 1) == 0 and abs(q.numerator).bit_length() <= prec
        return cls._raw(m, _ZERO if exact else _ulp_bound(m, prec))

    @property
    def mid(self) -> BigFloat:
        return BigFloat._raw(self._m)

    @property
    def rad(self) -> BigFloat:
        return BigFloat._raw(self._r)

    def lower(self) -> BigFloat:
        return BigFloat._raw(_lm.mpf_sub(self._m, self._r, max(RAD_PREC, self._m[3]), _F))

    def upper(self) -> BigFloat:
        return BigFloat._raw(_lm.mpf_add(self._m, self._r, max(RAD_PREC, self._m[3]), _C))

    def contains(self, x) -> bool:
        """Exact membership test for a number (int, Fraction or BigFloat)."""
        q = x.to_fraction() if isinstance(x, BigFloat) else Fraction(x)
        return abs(q - self.mid.to_fraction()) <= self.rad.to_fraction()

    def contains_zero(self) -> bool:
        return _lm.mpf_cmp(_lm.mpf_abs(self._m), self._r) <= 0

    def is_positive(self) -> bool:
        return self._m[0] == 0 and self._m[1] != 0 and _lm.mpf_cmp(self._m, self._r) > 0

    def __neg__(self):
        return Ball._raw(_lm.mpf_neg(self._m), self._r)

    def abs(self) -> Ball:
        if self._m[0] == 0:
            return self
        return Ball._raw(_lm.mpf_neg(self._m), self._r)

    def add(self, o: Ball, prec: int) -> Ball:
        m, e = _exact_add(self._m, o._m, prec)
        return Ball._raw(m, _radd(_radd(self._r, o._r), e))

    def sub(self, o: Ball, prec: int) -> Ball:
        m, e = _exact_add(self._m, _lm.mpf_neg(o._m), prec)
        return Ball._raw(m, _radd(_radd(self._r, o._r), e))

    def mul(self, o: Ball, prec: int) -> Ball:
        m, e = _exact_mul(self._m, o._m, prec)
        r = _radd(_rmul(_rabs_up(self._m), o._r), _rmul(_rabs_up(o._m), self._r))
        r = _radd(r, _rmul(self._r, o._r))
        return Ball._raw(m, _radd(r, e))

    def mul_exact(self, x: BigFloat, prec: int) -> Ball:
        m, e = _exact_mul(self._m, x._v, prec)
        return Ball._raw(m, _radd(_rmul(self._r, _rabs_up(x._v)), e))

    def shift(self, k: int) -> Ball:
        return Ball._raw(_lm.mpf_shift(self._m, k), _lm.mpf_shift(self._r, k))

    def sqr(self, prec: int) -> Ball:
        return self.mul(self, prec)

    def div(self, o: Ball, prec: int) -> Ball:
        den_lo = _rsub_down(_rabs_down(o._m), o._r)
        if not den_lo[1]:
            raise ZeroDivisionError("divisor ball contains zero")
        m = _lm.mpf_div(self._m, o._m, prec, _N)
        e = _ulp_bound(m, prec)
        num = _radd(self._r, _rmul(_rabs_up(m), o._r))
        return Ball._raw(m, _radd(_rdiv(num, den_lo), e))

    def sqrt(self, prec: int) -> Ball:
        if self._m[0] and self._m[1] and not self.contains_zero():
            raise ValueError("sqrt of a negative ball")
        lo = _rsub_down(self._m, self._r) if self._m[0] == 0 else _ZERO
        if lo[1]:
            m = _lm.mpf_sqrt(self._m, prec, _N)
            slo = _lm.mpf_sqrt(lo, RAD_PREC, _D)
            return Ball._raw(m, _radd(_rdiv(self._r, slo), _ulp_bound(m, prec)))
        hi = _lm.mpf_add(self._m, self._r, RAD_PREC, _U) if self._m[0] == 0 else self._r
        h = _lm.mpf_sqrt(hi, RAD_PREC, _U)
        half = _lm.mpf_shift(h, -1)
        return Ball._raw(half, half)

    def to_fraction_interval(self) -> tuple[Fraction, Fraction]:
        c, r = self.mid.to_fraction(), self.rad.to_fraction()
        return c - r, c + r

    def __repr__(self):
        return f"Ball({to_hex(self.mid)} +/- {to_hex(self.rad)})"


class BigComplex:
    """Complex number whose real and imaginary parts are balls."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Ball) else Ball(re)
        self.im = im if isinstance(im, Ball) else Ball(im)

    @classmethod
    def exact(cls, re: BigFloat, im: BigFloat) -> BigComplex:
        z = object.__new__(cls)
        z.re = Ball._raw(re._v, _ZERO)
        z.im = Ball._raw(im._v, _ZERO)
        return z

    def is_exact(self) -> bool:
        return not self.re._r[1] and not self.im._r[1]

    def is_zero(self) -> bool:
        return not self.re._m[1] and not self.im._m[1] and self.is_exact()

    def add(self, o: BigComplex, prec: int) -> BigComplex:
        return BigComplex(self.re.add(o.re, prec), self.im.add(o.im, prec))

    def sub(self, o: BigComplex, prec: int) -> BigComplex:
        return BigComplex(self.re.sub(o.re, prec), self.im.sub(o.im, prec))

    def neg(self) -> BigComplex:
        return BigComplex(-self.re, -self.im)

    def conj(self) -> BigComplex:
        return BigComplex(self.re, -self.im)

    def mul(self, o: BigComplex, prec: int) -> BigComplex:
        a, b, c, d = self.re, self.im, o.re, o.im
        p = prec + 4
        re = a.mul(c, p).sub(b.mul(d, p), prec)
        im = a.mul(d, p).add(b.mul(c, p), prec)
        return BigComplex(re, im)

    def mul_real(self, x: Ball, prec: int) -> BigComplex:
        return BigComplex(self.re.mul(x, prec), self.im.mul(x, prec))

    def shift(self, k: int) -> BigComplex:
        return BigComplex(self.re.shift(k), self.im.shift(k))

    def norm2(self, prec: int) -> Ball:
        return self.re.sqr(prec + 4).add(self.im.sqr(prec + 4), prec)

    def abs(self, prec: int) -> Ball:
        # a vanishing part keeps real (or imaginary) inputs exact
        if not self.im._m[1] and not self.im._r[1]:
            return self.re.abs().add(_ZERO_BALL, prec)
        if not self.re._m[1] and not self.re._r[1]:
            return self.im.abs().add(_ZERO_BALL, prec)
        return self.norm2(prec + 4).sqrt(prec)

    def inv(self, prec: int) -> BigComplex:
        n = self.norm2(prec + 8)
        return BigComplex(self.re.div(n, prec), (-self.im).div(n, prec))

    def div(self, o: BigComplex, prec: int) -> BigComplex:
        n = o.norm2(prec + 8)
        num = self.mul(o.conj(), prec + 8)
        return BigComplex(num.re.div(n, prec), num.im.div(n, prec))

    def rad_bound(self) -> BigFloat:
        """Upper bound on the distance between the centre and any point."""
        return BigFloat._raw(_radd(self.re._r, self.im._r))

    def center(self) -> tuple[BigFloat, BigFloat]:
        return self.re.mid, self.im.mid

    def log2_abs_float(self) -> float:
        """Float estimate of log2|z| for the centre (may be -inf)."""
        a, b = self.re._m, self.im._m
        if not a[1] and not b[1]:
            return -math.inf
        la = BigFloat._raw(a).log2_float() if a[1] else -math.inf
        lb = BigFloat._raw(b).log2_float() if b[1] else -math.inf
        hi, lo = max(la, lb), min(la, lb)
        return hi + 0.5 * math.log2(1.0 + 2.0 ** (2 * (lo - hi)))

    def arg_float(self) -> float:
        """Float estimate of the argument of the centre, in (-pi, pi]."""
        a, b = self.re._m, self.im._m
        ea = _top(a) if a[1] else None
        eb = _top(b) if b[1] else None
        if ea is None and eb is None:
            return 0.0
        e = max(x for x in (ea, eb) if x is not None)
        fa = _lm.to_float(_lm.mpf_shift(a, -e)) if a[1] else 0.0
        fb = _lm.to_float(_lm.mpf_shift(b, -e)) if b[1] else 0.0
        return math.atan2(fb, fa)

    def __repr__(self):
        return f"BigComplex({self.re!r}, {self.im!r})"


_ZERO_BALL = Ball(0)


def pi_ball(prec: int) -> Ball:
    m = _lm.mpf_pi(prec, _N)
    return Ball._raw(m, _ulp_bound(m, prec))


def _ln2(prec):
    return _lm.mpf_ln2(prec, _N)


def log2(x: Ball, prec: int) -> Ball:
    """Ball enclosure of log2(x) for a positive ball."""
    if not x.is_positive():
        raise ValueError("log2 needs a positive ball")
    p = prec + 16
    m = _lm.mpf_div(_lm.mpf_log(x._m, p, _N), _ln2(p), prec, _N)
    lo = _lm.mpf_sub(x._m, x._r, RAD_PREC, _D)
    # d/dx log2 x = 1/(x ln 2) < 1.4427/x
    r = _rdiv(_rmul(x._r, _lm.from_float(1.4427)), lo)
    r = _radd(r, (0, 1, _top(m) - prec + 2, 1) if m[1] else (0, 1, -prec, 1))
    return Ball._raw(m, r)


def exp2(x: Ball, prec: int) -> Ball:
    """Ball enclosure of 2**x."""
    n = int(_lm.to_int(x._m, _F))
    frac = _lm.mpf_sub(x._m, _lm.from_int(n))
    p = prec + 16
    v = _lm.mpf_exp(_lm.mpf_mul(frac, _ln2(p + frac[3] if frac[1] else p), p), p, _N)
    v = _lm.mpf_shift(_lm.mpf_pos(v, prec, _N), n)
    e = _ulp_bound(v, prec - 2)
    if _lm.mpf_cmp(x._r, _ONE) <= 0:
        # 2**r - 1 <= r * ln2 * 2**r <= 1.3863 r for r <= 1
        r = _rmul(_rmul(_rabs_up(v), x._r), _lm.from_float(1.3863))
    else:
        hi = int(_lm.to_int(_lm.mpf_add(x._m, x._r, RAD_PREC, _C), _C))
        r = (0, 1, hi + 1, 1)
    return Ball._raw(v, _radd(r, e))


def exp_i_theta(theta: Ball, prec: int) -> BigComplex:
    """cos(theta) + i sin(theta) as a complex ball."""
    c, s = _lm.mpf_cos_sin(theta._m, prec, _N)
    r = _radd(theta._r, (0, 1, -prec + 1, 1))
    return BigComplex(Ball._raw(c, r), Ball._raw(s, r))


def root_of_unity(j: int, k: int, prec: int) -> BigComplex:
    """exp(2 pi i j / k) as a complex ball."""
    j %= k
    if j == 0:
        return BigComplex(1, 0)
    if 4 * j == k:
        return BigComplex(0, 1)
    if 2 * j == k:
        return BigComplex(-1, 0)
    if 4 * j == 3 * k:
        return BigComplex(0, -1)
    p = prec + 8
    t = _lm.from_rational(2 * j, k, p, _N)
    c, s = _lm.mpf_cos_sin_pi(t, prec, _N)
    # the argument was rounded by at most 2**-p in units of pi
    r = (0, 1, -prec + 2, 1)
    return BigComplex(Ball._raw(c, r), Ball._raw(s, r))


def pow_int(z: BigComplex, k: int, prec: int) -> BigComplex:
    """z**k for k >= 0 by binary powering."""
    if k < 0:
        raise ValueError("negative power")
    result = BigComplex(1, 0)
    if k == 0:
        return result
    p = prec + 2 * k.bit_length() + 4
    base = z
    first = True
    while k:
        if k & 1:
            result = base if first else result.mul(base, p)
            first = False
        k >>= 1
        if k:
            base = base.mul(base, p)
    return BigComplex(_reround(result.re, prec), _reround(result.im, prec))


def _reround(b: Ball, prec: int) -> Ball:
    m, e = _round(b._m, prec)
    return Ball._raw(m, _radd(b._r, e))


def real_pow_int(x: Ball, k: int, prec: int) -> Ball:
    """x**k for a real ball and k >= 0."""
    result = Ball(1)
    p = prec + 2 * k.bit_length() + 4
    base = x
    first = True
    while k:
        if k & 1:
            result = base if first else result.mul(base, p)
            first = False
        k >>= 1
        if k:
            base = base.mul(base, p)
    return _reround(result, prec)
