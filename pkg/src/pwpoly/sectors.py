"""Piecewise approximation: one short polynomial per sector of every ring.

For a ring with relevant indices ell..u (delta = u - ell >= 1) and log-radii
s_n < s_{n+1}, the ring is covered by K disks D(gamma w^k, rho), w a K-th
root of unity.  On disk k,

    f(z) ~ z^ell * M * g_k(t),    z = (gamma + rho t) w^k,  |t| <= 1,

where g_k is the truncated Taylor expansion of the slice f_ell..f_u, divided
by the normalization M = 2**M_exp.  The coefficients of every g_k are
computed together with fixed-point arithmetic on packed integers: the powers
((gamma + rho T)/(gamma + rho))^i are obtained by linear steps, summed by
residue class of i modulo K, and the K classes are spread to the K sectors
with a discrete Fourier transform.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import libmp as _lm

from .bigfloat import Ball, BigComplex, BigFloat, exp2, pi_ball, root_of_unity, to_hex, from_hex
from .packed import LazySlots, Layout, dft_packed, slot_width
from .poly import LOG_BITS, NewtonPolygon, Poly
from .rings import ONE, Ring, RingPartition, compute_rings

GEO_PREC = 64


@dataclass
class SectorApprox:
    """Approximation of f on the disk D(gamma w^k, rho), w = exp(2 pi i / K).

    Coefficient j of g is (g_re[j] + i g_im[j]) * 2**-frac; the scale is
    M = 2**M_exp.  Sectors of rings with a single relevant index are
    monomials: K = 1, gamma = rho = 0 and f(z) ~ z^ell M g_0.
    """

    n: int
    k: int
    K: int
    ell: int
    u: int
    gamma: BigFloat
    rho: BigFloat
    M_exp: int
    frac: int
    g_re: list
    g_im: list

    @property
    def delta(self) -> int:
        return self.u - self.ell

    @property
    def is_monomial(self) -> bool:
        return self.rho.is_zero()

    @property
    def M(self) -> BigFloat:
        return BigFloat.from_man_exp(1, self.M_exp)

    @property
    def degree(self) -> int:
        return len(self.g_re) - 1

    @property
    def g(self) -> Poly:
        return Poly([(BigFloat.from_man_exp(a, -self.frac), BigFloat.from_man_exp(b, -self.frac))
                     for a, b in zip(self.g_re, self.g_im)])

    def rotation(self, prec: int) -> BigComplex:
        return root_of_unity(self.k, self.K, prec)

    def center(self, prec: int) -> BigComplex:
        return self.rotation(prec).mul_real(Ball(self.gamma), prec)

    def radius(self) -> BigFloat:
        return self.rho

    def to_text(self) -> str:
        head = (f"sector {self.n} {self.k} {self.K} {self.ell} {self.u} "
                f"{to_hex(self.gamma)} {to_hex(self.rho)} {self.M_exp} {self.frac} {self.degree}")
        body = [f"{a:x} {b:x}" for a, b in zip(self.g_re, self.g_im)]
        return "\n".join([head] + body)


@dataclass
class PiecewiseApprox:
    """Sector approximations of a polynomial on the whole complex plane."""

    degree: int
    m: int
    c: Fraction
    origin: int
    partition: RingPartition
    hull: Poly
    sectors: list = field(default_factory=list)

    def ring_sectors(self, n: int) -> list:
        return self.sectors[n]

    def all_sectors(self):
        for ring in self.sectors:
            yield from ring

    @property
    def sector_count(self) -> int:
        return sum(len(r) for r in self.sectors)

    @property
    def polygon(self) -> NewtonPolygon:
        if getattr(self, "_polygon", None) is None:
            self._polygon = NewtonPolygon(self.hull)
        return self._polygon


def fixed_point_bits(m: int, c: Fraction) -> tuple[int, int]:
    """(truncation multiple a, precision multiple b): degree a m, precision b m.

    a is the smallest value >= 4 with a log2(a / (1.41 c)) >= c + 1, which
    keeps the Taylor tail below 2**-m of the dominant term; b = max(4, 1 + 1.75 c)
    covers the growth of the normalization on wide rings.
    """
    cf = float(c)
    a = 4.0
    while a * math.log2(a / (1.41 * cf)) < cf + 1 + 2.0 / m:
        a += 0.25
    b = max(4.0, 1.0 + 1.75 * cf)
    return a, b


def truncation_degree(m: int, c) -> int:
    a, _ = fixed_point_bits(m, Fraction(c))
    return math.ceil(a * m)


def sector_params(s_lo: Fraction, s_hi: Fraction, delta: int, m: int, c=1,
                  prec: int = GEO_PREC) -> tuple[BigFloat, BigFloat, int, int]:
    """(gamma, rho, K, m') for the ring 2**s_lo <= |z| <= 2**s_hi.

    gamma = (r_lo + r_hi)/2, rho = 3/4 (r_hi - r_lo), K = ceil(2 pi gamma / rho)
    and m' = floor(delta / K).  gamma and rho are rounded to ``prec`` bits.
    """
    p = prec + 16
    r0 = exp2(Ball(BigFloat(Fraction(s_lo))), p)
    r1 = exp2(Ball(BigFloat(Fraction(s_hi))), p)
    gamma = r0.add(r1, p).shift(-1).mid.round(prec)
    width = r1.sub(r0, p)
    rho = width.mul(Ball(BigFloat(0.75)), p).mid.round(prec)
    ratio = pi_ball(p).shift(1).mul_exact(gamma, p).div(Ball(rho), p)
    K = ratio.upper().ceil()
    return gamma, rho, K, delta // K


def _slice_coeffs(f: Poly, ell: int, u: int):
    return [f.raw(j) for j in range(ell, u + 1)]


def _norm_exp(H: list, ell: int, u: int, gamma: BigFloat, rho: BigFloat) -> int:
    """Exponent e with 2**e >= (delta+1) max_i |f_{ell+i}| gamma^i (1 + rho/gamma)^delta."""
    delta = u - ell
    lg = gamma.log2_float()
    lw = (gamma + rho).log2_float()
    best = -math.inf
    for i in range(delta + 1):
        h = H[ell + i]
        if h is None:
            continue
        best = max(best, -h / ONE + i * lg)
    x = math.log2(delta + 1) + best + delta * (lw - lg)
    return math.ceil(x + 1e-9 * (abs(x) + 1))


def _scaled_coeffs(coeffs, w: BigFloat, M_exp: int, F: int, prec: int):
    """Integers round(f_{ell+i} w^i 2**(F - M_exp)) for i = 0..delta."""
    re, im = [], []
    pw = _lm.fone
    wv = w._v
    sh = F - M_exp
    for i, (a, b) in enumerate(coeffs):
        if i:
            pw = _lm.mpf_mul(pw, wv, prec, "n")
        if a[1]:
            re.append(_lm.to_int(_lm.mpf_shift(_lm.mpf_mul(a, pw, prec, "n"), sh), "n"))
        else:
            re.append(0)
        if b[1]:
            im.append(_lm.to_int(_lm.mpf_shift(_lm.mpf_mul(b, pw, prec, "n"), sh), "n"))
        else:
            im.append(0)
    return re, im


def _fixed(x: BigFloat, F: int) -> int:
    return int(_lm.to_int(_lm.mpf_shift(x._v, F), "f"))


def _div_fixed(a: BigFloat, b: BigFloat, F: int) -> int:
    """floor(a/b * 2**F)."""
    q = _lm.mpf_div(a._v, b._v, F + 8, "f")
    return _lm.to_int(_lm.mpf_shift(q, F), "f")


def _dft_cost(K: int) -> int:
    # radix-2 passes are butterflies; radix 3 and 5 passes are naive small DFTs
    cost = 0
    for p in (2, 3, 5):
        while K % p == 0:
            cost += 1 if p == 2 else p
            K //= p
    return cost


def smooth_at_least(n: int) -> int:
    """Integer in [n, 2n] with prime factors 2, 3, 5 that is cheapest to transform."""
    best = None
    p5 = 1
    while p5 < 2 * n:
        p35 = p5
        while p35 < 2 * n:
            v = p35
            while v < n:
                v *= 2
            key = (v * _dft_cost(v), v)
            if best is None or key < best:
                best = key
            p35 *= 3
        p5 *= 5
    return best[1]


def twiddle_table(K: int, F: int) -> list[tuple[int, int]]:
    tw = []
    for j in range(K):
        z = root_of_unity(j, K, F + 8)
        tw.append((_lm.to_int(_lm.mpf_shift(z.re._m, F), "n"),
                   _lm.to_int(_lm.mpf_shift(z.im._m, F), "n")))
    return tw


class RingContext:
    """Fixed-point setup shared by the sectors of one ring."""

    def __init__(self, f: Poly, H: list, ring: Ring, m: int, c: Fraction):
        self.ring = ring
        self.ell, self.u = ring.ell, ring.u
        delta = ring.delta
        self.gamma, self.rho, K0, _ = sector_params(ring.s_lo, ring.s_hi, delta, m, c)
        # more sectors still cover the ring; a smooth count keeps the DFT fast
        self.K = smooth_at_least(K0)
        self.mp = delta // self.K
        a, b = fixed_point_bits(m, c)
        D = math.ceil(a * m)
        self.D = D
        self.deg = min(delta, D)
        K = self.K
        self.F = math.ceil(b * m) + 2 * (delta + 1).bit_length() + (D + 1).bit_length() \
            + 2 * K.bit_length() + 16
        self.lay = Layout(self.deg + 1, self.F, slot_width(self.F))
        self.M_exp = _norm_exp(H, self.ell, self.u, self.gamma, self.rho)
        w = self.gamma + self.rho
        self.A = _div_fixed(self.gamma, w, self.F)
        self.B = _div_fixed(self.rho, w, self.F)
        prec = self.F + 2 * (delta + 1).bit_length() + 16
        self.c_re, self.c_im = _scaled_coeffs(_slice_coeffs(f, self.ell, self.u), w,
                                              self.M_exp, self.F, prec)

    def step(self, q):
        """q * (A + B T), truncated."""
        lay = self.lay
        return lay.trunc_rescale(self.A * q + ((self.B * q) << lay.W))


def baby_steps(ctx: RingContext) -> list:
    """Packed q_0..q_K with q_i = ((gamma + rho T)/(gamma + rho))^i."""
    q = [ctx.lay.one]
    for _ in range(ctx.K):
        q.append(ctx.step(q[-1]))
    return q


def giant_steps(ctx: RingContext, q: list, method: str = "stream") -> list:
    """r_k = sum_j c_{k + jK} q_{k + jK} for k < K, as packed (re, im) pairs.

    ``split`` evaluates p_k(q_K) q_k with the powers of q_K (the classical
    baby-step giant-step layout); ``stream`` walks through q_0..q_delta by
    linear steps, which is cheaper once delta is large compared to K.
    """
    K, lay = ctx.K, ctx.lay
    delta = ctx.u - ctx.ell
    cr, ci = ctx.c_re, ctx.c_im
    if method == "split":
        G = [lay.one]
        for _ in range(ctx.mp):
            G.append(lay.mul(G[-1], q[K]))
        out = []
        for k in range(K):
            sr = si = 0
            for j in range(ctx.mp + 1):
                i = k + j * K
                if i > delta:
                    break
                if cr[i]:
                    sr += cr[i] * G[j]
                if ci[i]:
                    si += ci[i] * G[j]
            sr, si = lay.trunc_rescale(sr), lay.trunc_rescale(si)
            out.append((lay.mul(sr, q[k]), lay.mul(si, q[k])))
        return out
    if method != "stream":
        raise ValueError(f"unknown method {method!r}")
    acc_r = [0] * K
    acc_i = [0] * K
    Q = lay.one
    for i in range(delta + 1):
        if i:
            Q = q[i] if i <= K and len(q) > i else ctx.step(Q)
        k = i % K
        if cr[i]:
            acc_r[k] += cr[i] * Q
        if ci[i]:
            acc_i[k] += ci[i] * Q
    return [(lay.trunc_rescale(a), lay.trunc_rescale(b)) for a, b in zip(acc_r, acc_i)]


def spread_fft(ctx: RingContext, r: list) -> list:
    """g_k = sum_j r_j w^(jk) for the K sectors of the ring."""
    if ctx.K == 1:
        return list(r)
    tw = twiddle_table(ctx.K, ctx.F)
    return dft_packed(ctx.lay, r, tw, ctx.K)


def build_ring(f: Poly, H: list, ring: Ring, m: int, c: Fraction, method: str = "stream") -> list:
    """All sector approximations of one ring."""
    if ring.delta == 0:
        a, b = f.raw(ring.ell)
        e = min(x[2] for x in (a, b) if x[1])
        gr = _lm.to_int(_lm.mpf_shift(a, -e)) if a[1] else 0
        gi = _lm.to_int(_lm.mpf_shift(b, -e)) if b[1] else 0
        zero = BigFloat(0)
        return [SectorApprox(ring.n, 0, 1, ring.ell, ring.u, zero, zero, e, 0, [gr], [gi])]
    ctx = RingContext(f, H, ring, m, c)
    q = baby_steps(ctx)
    r = giant_steps(ctx, q, method)
    g = spread_fft(ctx, r)
    out = []
    n = ctx.deg + 1
    for k, (gr, gi) in enumerate(g):
        out.append(SectorApprox(ring.n, k, ctx.K, ring.ell, ring.u, ctx.gamma, ctx.rho,
                                ctx.M_exp, ctx.F, LazySlots(ctx.lay, gr, n), LazySlots(ctx.lay, gi, n)))
    return out


def build_piecewise(f: Poly, m: int, c=1, threads: int = 1,
                    partition: Optional[RingPartition] = None) -> PiecewiseApprox:
    """Piecewise approximation of f at precision m with ring width parameter c."""
    c = Fraction(c)
    g, v = f.normalize()
    polygon = NewtonPolygon(g)
    part = partition or compute_rings(g, m, c, polygon)
    H = polygon.H
    hull = _hull_poly(g, polygon)
    jobs = list(part.rings)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sectors = list(ex.map(lambda rg: build_ring(g, H, rg, m, c), jobs))
    else:
        sectors = [build_ring(g, H, rg, m, c) for rg in jobs]
    pw = PiecewiseApprox(f.degree, m, c, v, part, hull, sectors)
    pw._polygon = None
    return pw


def _hull_poly(g: Poly, polygon: NewtonPolygon) -> Poly:
    zero = (_lm.fzero, _lm.fzero)
    coeffs = [zero] * (g.degree + 1)
    for j in polygon.vertices:
        coeffs[j] = g.raw(j)
    return Poly._raw([a for a, _ in coeffs], [b for _, b in coeffs])


def write_piecewise(pw: PiecewiseApprox) -> str:
    """Exact text serialization."""
    lines = [f"pwpoly {pw.degree} {pw.m} {pw.c.numerator}/{pw.c.denominator} "
             f"{len(pw.partition)} {pw.origin}"]
    for r in pw.partition:
        lo = "-inf" if r.lo is None else f"{r.lo:x}"
        hi = "inf" if r.hi is None else f"{r.hi:x}"
        lines.append(f"ring {r.n} {lo} {hi} {r.ell} {r.u}")
    for j in pw.polygon.vertices:
        a, b = pw.hull.raw(j)
        lines.append(f"vertex {j} {to_hex(BigFloat._raw(a))} {to_hex(BigFloat._raw(b))}")
    for s in pw.all_sectors():
        lines.append(s.to_text())
    return "\n".join(lines) + "\n"


def read_piecewise(text: str) -> PiecewiseApprox:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("pwpoly "):
        raise ValueError("not a piecewise approximation file")
    try:
        _, d, m, c, nr, origin = lines[0].split()
        d, m, nr, origin = int(d), int(m), int(nr), int(origin)
        c = Fraction(c)
        rings = []
        pos = 1
        for _ in range(nr):
            t = lines[pos].split()
            pos += 1
            if t[0] != "ring":
                raise ValueError("expected ring line")
            lo = None if t[2] == "-inf" else int(t[2], 16)
            hi = None if t[3] == "inf" else int(t[3], 16)
            rings.append(Ring(int(t[1]), lo, hi, int(t[4]), int(t[5])))
        re = [_lm.fzero] * (d - origin + 1)
        im = [_lm.fzero] * (d - origin + 1)
        while pos < len(lines) and lines[pos].startswith("vertex "):
            t = lines[pos].split()
            pos += 1
            j = int(t[1])
            re[j], im[j] = from_hex(t[2])._v, from_hex(t[3])._v
        sectors = [[] for _ in range(nr)]
        while pos < len(lines):
            if not lines[pos].strip():
                pos += 1
                continue
            t = lines[pos].split()
            pos += 1
            if t[0] != "sector":
                raise ValueError(f"unexpected line {lines[pos - 1]!r}")
            n, k, K, ell, u = map(int, t[1:6])
            gamma, rho = from_hex(t[6]), from_hex(t[7])
            M_exp, frac, deg = int(t[8]), int(t[9]), int(t[10])
            gr, gi = [], []
            for _ in range(deg + 1):
                a, b = lines[pos].split()
                pos += 1
                gr.append(int(a, 16))
                gi.append(int(b, 16))
            sectors[n].append(SectorApprox(n, k, K, ell, u, gamma, rho, M_exp, frac, gr, gi))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed piecewise file: {exc}") from None
    part = RingPartition(rings, m, c, d - origin)
    pw = PiecewiseApprox(d, m, c, origin, part, Poly._raw(re, im), sectors)
    pw._polygon = None
    return pw
