"""Dense complex polynomials with exact dyadic coefficients and their Newton polygon."""

from __future__ import annotations

import math
from bisect import bisect_left
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from mpmath import libmp as _lm

from .bigfloat import Ball, BigComplex, BigFloat, real_pow_int

# fixed-point scale (bits) for -log2|f_j|
LOG_BITS = 40
_TIE_PREC_LIMIT = 4096


class Poly:
    """f(z) = sum_j f_j z^j with exact complex dyadic coefficients."""

    __slots__ = ("_re", "_im")

    def __init__(self, coeffs: Iterable):
        re, im = [], []
        for c in coeffs:
            a, b = _split(c)
            re.append(a)
            im.append(b)
        if not re:
            re, im = [_lm.fzero], [_lm.fzero]
        self._re = re
        self._im = im

    @classmethod
    def _raw(cls, re: list, im: list) -> Poly:
        p = object.__new__(cls)
        p._re, p._im = re, im
        return p

    @property
    def degree(self) -> int:
        return len(self._re) - 1

    def __len__(self):
        return len(self._re)

    def coeff(self, j: int) -> BigComplex:
        return BigComplex.exact(BigFloat._raw(self._re[j]), BigFloat._raw(self._im[j]))

    @property
    def coeffs(self) -> list[BigComplex]:
        return [self.coeff(j) for j in range(len(self._re))]

    def raw(self, j: int):
        return self._re[j], self._im[j]

    def is_zero_coeff(self, j: int) -> bool:
        return not self._re[j][1] and not self._im[j][1]

    def __eq__(self, o):
        return isinstance(o, Poly) and self._re == o._re and self._im == o._im

    def __repr__(self):
        return f"Poly(degree={self.degree})"

    def to_fractions(self) -> list[complex]:
        """Coefficients as (Fraction, Fraction) pairs."""
        return [(BigFloat._raw(a).to_fraction(), BigFloat._raw(b).to_fraction())
                for a, b in zip(self._re, self._im)]

    def to_complex128(self) -> np.ndarray:
        return np.array([complex(_lm.to_float(a), _lm.to_float(b))
                         for a, b in zip(self._re, self._im)])

    def abs_ball(self, j: int, prec: int = 64) -> Ball:
        return self.coeff(j).abs(prec)

    def tau(self) -> int:
        """Smallest t with 2**-t <= |x| < 2**t for every nonzero coefficient part."""
        t = 0
        for v in self._re + self._im:
            if v[1]:
                e = v[2] + v[3]
                t = max(t, abs(e), abs(e - 1))
        return t

    def mantissa_bits(self) -> int:
        return max((v[3] for v in self._re + self._im if v[1]), default=0)

    def derivative(self) -> Poly:
        re = [_lm.mpf_mul(self._re[j], _lm.from_int(j)) for j in range(1, len(self._re))]
        im = [_lm.mpf_mul(self._im[j], _lm.from_int(j)) for j in range(1, len(self._im))]
        return Poly._raw(re or [_lm.fzero], im or [_lm.fzero])

    def slice(self, a: int, b: int) -> Poly:
        """The polynomial sum_{j=a..b} f_j z^(j-a)."""
        return Poly._raw(self._re[a:b + 1], self._im[a:b + 1])

    def normalize(self) -> tuple[Poly, int]:
        """Strip zero top coefficients and divide by z^v; returns (poly, v)."""
        n = len(self._re)
        while n > 1 and self.is_zero_coeff(n - 1):
            n -= 1
        v = 0
        while v < n - 1 and self.is_zero_coeff(v):
            v += 1
        return Poly._raw(self._re[v:n], self._im[v:n]), v

    def horner(self, z: BigComplex, prec: int) -> BigComplex:
        """Ball evaluation by Horner's rule (reference use; O(d) ball products)."""
        acc = self.coeff(self.degree)
        for j in range(self.degree - 1, -1, -1):
            acc = acc.mul(z, prec).add(self.coeff(j), prec)
        return acc

    def to_text(self) -> str:
        from .bigfloat import to_hex
        lines = [f"degree {self.degree}"]
        for j, (a, b) in enumerate(zip(self._re, self._im)):
            lines.append(f"{j} {to_hex(BigFloat._raw(a))} {to_hex(BigFloat._raw(b))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Poly:
        """Parse the line format of :meth:`to_text`; errors name the line number."""
        from .bigfloat import from_hex
        rows = []
        for no, ln in enumerate(text.splitlines(), 1):
            ln = ln.split("#", 1)[0].strip()
            if ln:
                rows.append((no, ln))
        if not rows or not rows[0][1].startswith("degree"):
            no = rows[0][0] if rows else 1
            raise ValueError(f"line {no}: polynomial file must start with 'degree d'")
        no, head = rows[0]
        try:
            d = int(head.split()[1])
        except (IndexError, ValueError):
            raise ValueError(f"line {no}: bad degree header") from None
        if d < 0:
            raise ValueError(f"line {no}: negative degree")
        re = [_lm.fzero] * (d + 1)
        im = [_lm.fzero] * (d + 1)
        for no, ln in rows[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ValueError(f"line {no}: expected 'j re im', got {ln!r}")
            try:
                j = int(parts[0])
                a, b = from_hex(parts[1]), from_hex(parts[2])
            except ValueError as exc:
                raise ValueError(f"line {no}: {exc}") from None
            if not 0 <= j <= d:
                raise ValueError(f"line {no}: coefficient index {j} outside 0..{d}")
            re[j] = a._v
            im[j] = b._v
        return cls._raw(re, im)


def _split(c):
    if isinstance(c, BigComplex):
        if not c.is_exact():
            raise ValueError("polynomial coefficients must be exact")
        return c.re._m, c.im._m
    if isinstance(c, tuple) and len(c) == 2:
        return BigFloat(c[0])._v, BigFloat(c[1])._v
    if isinstance(c, complex):
        return BigFloat(c.real)._v, BigFloat(c.imag)._v
    return BigFloat(c)._v, _lm.fzero


def _log2_abs2(re, im) -> float:
    """log2(re^2 + im^2) to about 2^-50 absolute accuracy."""
    x = _lm.mpf_add(_lm.mpf_mul(re, re), _lm.mpf_mul(im, im))
    return BigFloat._raw(x).log2_float()


def scaled_neg_log2(f: Poly) -> list:
    """H_j ~ -log2|f_j| * 2**LOG_BITS as ints (None for zero coefficients).

    |H_j / 2**LOG_BITS + log2|f_j|| <= 2**-(LOG_BITS - 1).
    """
    out = []
    scale = float(1 << LOG_BITS)
    for a, b in zip(f._re, f._im):
        if not a[1] and not b[1]:
            out.append(None)
            continue
        # split the integer part off to keep float accuracy at large exponents
        if not b[1]:
            v = a
        elif not a[1]:
            v = b
        else:
            v = None
        if v is not None:
            e = v[2] + v[3] - 1
            man = v[1]
            bc = v[3]
            frac = math.log2(man / (1 << (bc - 1))) if bc <= 60 else \
                math.log2((man >> (bc - 60)) / (1 << 59))
        else:
            x = _lm.mpf_add(_lm.mpf_mul(a, a), _lm.mpf_mul(b, b))
            e2 = x[2] + x[3] - 1
            bc = x[3]
            man = x[1]
            f2 = math.log2(man / (1 << (bc - 1))) if bc <= 60 else \
                math.log2((man >> (bc - 60)) / (1 << 59))
            e, frac = e2 // 2, (f2 + (e2 % 2)) / 2
        out.append(-(e << LOG_BITS) - round(frac * scale))
    return out


class NewtonPolygon:
    """Lower convex hull of the points (j, -log2|f_j|).

    ``H`` holds the scaled values for every index, ``vertices`` the hull
    indices in increasing order.
    """

    def __init__(self, f: Poly):
        self.poly = f
        self.degree = f.degree
        self.H = scaled_neg_log2(f)
        self.vertices = lower_hull([(j, h) for j, h in enumerate(self.H) if h is not None])
        hv = np.array([self.H[j] for j in self.vertices], dtype=float)
        jv = np.array(self.vertices, dtype=float)
        if len(self.vertices) > 1:
            self.edge_slopes = np.diff(hv) / np.diff(jv) / float(1 << LOG_BITS)
        else:
            self.edge_slopes = np.zeros(0)

    def h(self, j: int) -> Fraction | None:
        """-log2|f_j| rounded to LOG_BITS fractional bits."""
        H = self.H[j]
        return None if H is None else Fraction(H, 1 << LOG_BITS)

    def vertex_for(self, log2r: float) -> int:
        """Hull vertex maximizing |f_j| r^j for log2 r ~ ``log2r``."""
        k = bisect_left(self.edge_slopes.tolist(), log2r) if len(self.edge_slopes) else 0
        return self.vertices[k]

    def neighbours(self, v: int) -> list[int]:
        i = self.vertices.index(v)
        return self.vertices[max(0, i - 1):i + 2]

    def __repr__(self):
        return f"NewtonPolygon(vertices={self.vertices})"


def lower_hull(points: Sequence[tuple[int, int]]) -> list[int]:
    """Indices of the lower convex hull (monotone chain, collinear points dropped)."""
    hull: list[tuple[int, int]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it is strictly below the chord hull[-2] -> p
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return [p[0] for p in hull]


def norm_one(f: Poly, prec: int = 64) -> Ball:
    acc = Ball(0)
    for j in range(len(f)):
        acc = acc.add(f.abs_ball(j, prec), prec)
    return acc


def tilde_f(f: Poly, r: Ball, prec: int = 64) -> Ball:
    """sum_j |f_j| r^j."""
    acc = f.abs_ball(f.degree, prec)
    for j in range(f.degree - 1, -1, -1):
        acc = acc.mul(r, prec).add(f.abs_ball(j, prec), prec)
    return acc


def hat_f(f: Poly, polygon: NewtonPolygon, r: Ball, prec: int = 64) -> tuple[Ball, int]:
    """max_j |f_j| r^j located on the Newton polygon; returns (value, index)."""
    if r.is_positive():
        lr = r.mid.log2_float()
    elif len(polygon.vertices) == 1 or r.mid.is_zero():
        v = polygon.vertices[0]
        val = f.abs_ball(v, prec) if v == 0 else _monomial_abs(f, v, r, prec)
        return val, v
    else:
        lr = -math.inf
    v = polygon.vertex_for(lr)
    cands = polygon.neighbours(v)
    p = prec
    while True:
        vals = [_monomial_abs(f, w, r, p) for w in cands]
        i = max(range(len(cands)), key=lambda k: vals[k].upper())
        exact = all(x.rad.is_zero() for x in vals)
        tied = not exact and any(k != i and vals[k].upper() >= vals[i].lower()
                                 for k in range(len(cands)))
        # near-ties between hull vertices are settled at higher precision
        if not tied or p >= _TIE_PREC_LIMIT or not r.rad.is_zero():
            return vals[i], cands[i]
        p *= 2


def _monomial_abs(f: Poly, j: int, r: Ball, prec: int) -> Ball:
    return f.abs_ball(j, prec).mul(real_pow_int(r, j, prec), prec)
