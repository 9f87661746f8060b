"""Partition of the complex plane into annuli with a small set of dominant terms.

Radii are handled through their base-2 logarithm s = log2 r.  All ring
boundaries are dyadic rationals with ``LOG_BITS`` fractional bits, stored as
integers scaled by ``2**LOG_BITS``; every comparison that decides the
partition is done exactly on integers.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .poly import LOG_BITS, NewtonPolygon, Poly

ONE = 1 << LOG_BITS
# guard added to the precision when building tangents; it absorbs the error
# of the scaled logarithms so that no relevant index is ever dropped
_GUARD = 8


@dataclass(frozen=True)
class Ring:
    """Annulus {2**lo <= |z| <= 2**hi} with relevant indices ell..u.

    ``lo``/``hi`` are scaled integers; ``None`` stands for -inf/+inf.
    """

    n: int
    lo: Optional[int]
    hi: Optional[int]
    ell: int
    u: int

    @property
    def delta(self) -> int:
        return self.u - self.ell

    @property
    def s_lo(self) -> Optional[Fraction]:
        return None if self.lo is None else Fraction(self.lo, ONE)

    @property
    def s_hi(self) -> Optional[Fraction]:
        return None if self.hi is None else Fraction(self.hi, ONE)

    @property
    def width(self) -> Optional[Fraction]:
        if self.lo is None or self.hi is None:
            return None
        return Fraction(self.hi - self.lo, ONE)


@dataclass
class TangentSlopes:
    """Exact slope bounds of the relevance interval (S0_j, S1_j) of each index.

    Slopes are rationals num/den with num scaled by 2**LOG_BITS; den == 0
    encodes an infinite value whose sign is the sign of num.
    """

    num0: list
    den0: list
    num1: list
    den1: list
    f0: np.ndarray
    f1: np.ndarray

    def lower(self, j: int) -> Optional[Fraction]:
        return _frac(self.num0[j], self.den0[j])

    def upper(self, j: int) -> Optional[Fraction]:
        return _frac(self.num1[j], self.den1[j])


def _frac(num, den):
    if den == 0:
        return None
    return Fraction(num, den * ONE)


def _lt(n1, d1, x):
    """num/den < x (x a scaled int); infinite slopes handled by den == 0."""
    if d1 == 0:
        return n1 < 0
    return n1 < x * d1


def _slope_lt(n1, d1, n2, d2):
    if d1 == 0 or d2 == 0:
        a = 0 if d1 else (1 if n1 > 0 else -1)
        b = 0 if d2 else (1 if n2 > 0 else -1)
        if a or b:
            return a < b
    return n1 * d2 < n2 * d1


def tangent_slopes(polygon: NewtonPolygon, m: int) -> TangentSlopes:
    """Relevance bounds of every index for precision m.

    j is relevant at s iff S0_j < s < S1_j, where S0_j (resp. S1_j) is the
    largest (smallest) slope from a hull vertex left (right) of j to the
    point (j, h_j - m) (resp. from (j, h_j - m) to a vertex).
    """
    H = polygon.H
    d = polygon.degree
    V = polygon.vertices
    shift = m * ONE + _GUARD
    num0, den0 = [0] * (d + 1), [0] * (d + 1)
    num1, den1 = [0] * (d + 1), [0] * (d + 1)
    vi = 0  # number of vertices strictly left of j
    for j in range(d + 1):
        while vi < len(V) and V[vi] < j:
            vi += 1
        hj = H[j]
        if hj is None:
            num0[j], den0[j] = 1, 0   # +inf
            num1[j], den1[j] = -1, 0  # -inf
            continue
        q = hj - shift
        # left: vertices V[0:vi], slope (q - H_v)/(j - v), unimodal in v
        if vi == 0:
            num0[j], den0[j] = -1, 0
        else:
            lo, hi = 0, vi - 1
            while lo < hi:
                mid = (lo + hi) // 2
                a, b = V[mid], V[mid + 1]
                # increasing between mid and mid+1 ?
                if _slope_lt(q - H[a], j - a, q - H[b], j - b):
                    lo = mid + 1
                else:
                    hi = mid
            v = V[lo]
            num0[j], den0[j] = q - H[v], j - v
        # right: vertices strictly right of j, slope (H_v - q)/(v - j)
        ri = vi + 1 if vi < len(V) and V[vi] == j else vi
        if ri >= len(V):
            num1[j], den1[j] = 1, 0
        else:
            lo, hi = ri, len(V) - 1
            while lo < hi:
                mid = (lo + hi) // 2
                a, b = V[mid], V[mid + 1]
                # decreasing between mid and mid+1 ?
                if _slope_lt(H[b] - q, b - j, H[a] - q, a - j):
                    lo = mid + 1
                else:
                    hi = mid
            v = V[lo]
            num1[j], den1[j] = H[v] - q, v - j
    f0 = np.array([_tofloat(n, dd) for n, dd in zip(num0, den0)])
    f1 = np.array([_tofloat(n, dd) for n, dd in zip(num1, den1)])
    return TangentSlopes(num0, den0, num1, den1, f0, f1)


def _tofloat(n, d):
    if d == 0:
        return np.inf if n > 0 else -np.inf
    return n / (d * ONE)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass
class RingPartition:
    """Rings covering the plane, ordered by increasing radius."""

    rings: list
    m: int
    c: Fraction
    degree: int

    def __len__(self):
        return len(self.rings)

    def __iter__(self):
        return iter(self.rings)

    def __getitem__(self, i):
        return self.rings[i]

    @property
    def boundaries(self) -> list[int]:
        """Finite boundaries s_0 < ... < s_N (scaled)."""
        b = self.__dict__.get("_bounds")
        if b is None:
            b = self.__dict__["_bounds"] = [r.lo for r in self.rings[1:]]
        return b

    def total_weight(self) -> int:
        return sum(r.delta + 1 for r in self.rings)

    def locate(self, log2r: float) -> int:
        """Index of a ring whose closure contains |z| = 2**log2r."""
        return bisect.bisect_right(self.boundaries, log2r * ONE)


class _Sweep:
    def __init__(self, ts: TangentSlopes, d: int):
        self.ts = ts
        self.d = d
        # exact suffix minimum of S0 over j >= i, as an index
        self.sufmin = [0] * (d + 2)
        best = None
        for j in range(d, -1, -1):
            if best is None or _slope_lt(ts.num0[j], ts.den0[j], ts.num0[best], ts.den0[best]):
                best = j
            self.sufmin[j] = best
        self.sufmin[d + 1] = None

    def s0_lt(self, j, x):
        return _lt(self.ts.num0[j], self.ts.den0[j], x)

    def last_below(self, x: int, start: int) -> int:
        """Largest j >= start with S0_j < x (start itself is always accepted)."""
        f0 = self.ts.f0
        xf = x / ONE
        tol = 1e-9 * (abs(xf) + 1.0)
        cand = np.nonzero(f0[start + 1:] < xf + tol)[0]
        for k in cand[::-1]:
            j = start + 1 + int(k)
            if self.s0_lt(j, x):
                return j
        return start

    def find_u(self, s: int, ell: int, cm: Fraction) -> int:
        """Largest j >= ell with S0_j < s + RU(c m / (j - ell))."""
        f0 = self.ts.f0
        d = self.d
        if ell >= d:
            return ell
        js = np.arange(ell + 1, d + 1)
        sf = s / ONE
        lhs = (f0[ell + 1:] - sf) * (js - ell)
        cmf = float(cm)
        tol = 1e-9 * (cmf + np.abs(sf) * (js - ell) + 1.0)
        cand = np.nonzero(lhs < cmf + tol)[0]
        num, den = cm.numerator * ONE, cm.denominator
        for k in cand[::-1]:
            j = ell + 1 + int(k)
            step = _ceil_div(num, den * (j - ell))
            if self.s0_lt(j, s + step):
                return j
        return ell


def compute_rings(f: Poly, m: int, c=1, polygon: NewtonPolygon | None = None) -> RingPartition:
    """Ring partition of a polynomial with nonzero constant term.

    Within ring n every index outside ell_n..u_n is irrelevant at precision m,
    and for delta_n >= 1 the ring has log-width RU(c m / (delta_n + 1)).
    """
    c = Fraction(c)
    if c <= 0 or m < 1:
        raise ValueError("need m >= 1 and c > 0")
    d = f.degree
    if f.is_zero_coeff(0) or f.is_zero_coeff(d):
        raise ValueError("normalize the polynomial first (nonzero f_0 and f_d)")
    if d == 0:
        return RingPartition([Ring(0, None, None, 0, 0)], m, c, d)
    polygon = polygon or NewtonPolygon(f)
    ts = tangent_slopes(polygon, m)
    sw = _Sweep(ts, d)
    cm = c * m

    # start: every j >= 1 irrelevant below; end: every j <= d-1 irrelevant above
    jmin = sw.sufmin[1]
    start = ts.num0[jmin] // ts.den0[jmin]
    end = None
    for j in range(d):
        if ts.den1[j] == 0:
            continue
        e = _ceil_div(ts.num1[j], ts.den1[j])
        end = e if end is None or e > end else end
    rings = [Ring(0, None, start, 0, 0)]
    s = start
    ell = 0
    prev_u = 0
    num, den = cm.numerator * ONE, cm.denominator
    while s < end:
        while ell < d and not (ts.den1[ell] == 0 and ts.num1[ell] > 0) and \
                not _gt_scaled(ts.num1[ell], ts.den1[ell], s):
            ell += 1
        def ring_end(u):
            if u > ell:
                return s + _ceil_div(num, den * (u - ell + 1))
            jm = sw.sufmin[u + 1]
            return ts.num0[jm] // ts.den0[jm]

        def closed(u):
            # no index above u becomes relevant before the ring ends
            return sw.last_below(ring_end(u), u) == u

        # closed() is monotone in u since the ring shrinks as u grows
        u = max(sw.find_u(s, ell, cm), prev_u)
        if not closed(u):
            lo, hi = u, d
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if closed(mid):
                    hi = mid
                else:
                    lo = mid
            u = hi
        nxt = ring_end(u)
        rings.append(Ring(len(rings), s, nxt, ell, u))
        s = nxt
        prev_u = u
    rings.append(Ring(len(rings), s, None, d, d))
    return RingPartition(rings, m, c, d)


def _gt_scaled(num, den, s):
    """num/den > s for a finite slope or -inf."""
    if den == 0:
        return num > 0
    return num > s * den


def relevant_indices(f: Poly, m: int, s: Fraction) -> list[int]:
    """Brute-force list of j with |f_j| r^j >= 2**-m max_i |f_i| r^i (log2 r = s)."""
    polygon = NewtonPolygon(f)
    vals = [None if h is None else -Fraction(h, ONE) + j * s for j, h in enumerate(polygon.H)]
    top = max(v for v in vals if v is not None)
    return [j for j, v in enumerate(vals) if v is not None and v >= top - m]
