"""Certified root isolation on top of the piecewise approximation."""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from mpmath import libmp as _lm

from .aberth import aberth_float, polish_fixed
from .bigfloat import Ball, BigComplex, BigFloat
from .evaluate import EvalResult, eval_derivative, eval_one
from .poly import NewtonPolygon, Poly, hat_f, tilde_f
from .rings import ONE
from .sectors import PiecewiseApprox, SectorApprox, build_piecewise

ROOT_C = Fraction(2, 5)
LN2_LOWER = 0.6931471805


@dataclass
class CandidateRoot:
    zeta: BigComplex
    ring: int
    sector: int
    t: complex


@dataclass
class IsolatingDisk:
    """Disk D(center, radius) containing exactly one root of f."""

    center: BigComplex
    radius: BigFloat
    cond_estimate: BigFloat
    certified: bool = True
    refined_bits: int = 0

    def contains(self, z: complex | tuple) -> bool:
        """Exact test for a point given as (Fraction, Fraction) or a complex."""
        if isinstance(z, complex):
            z = (Fraction(z.real), Fraction(z.imag))
        cr, ci = self.center.re.mid.to_fraction(), self.center.im.mid.to_fraction()
        r = self.radius.to_fraction()
        return (z[0] - cr) ** 2 + (z[1] - ci) ** 2 <= r * r

    def center_complex(self) -> complex:
        return complex(float(self.center.re.mid), float(self.center.im.mid))

    def log2_abs(self) -> float:
        return self.center.log2_abs_float()

    def arg(self) -> float:
        return self.center.arg_float()


@dataclass
class RootReport:
    disks: list
    origin_multiplicity: int
    count_found: int
    precision_used: int
    complete: bool
    degree: int
    ceiling_reached: bool = False
    stats: dict = field(default_factory=dict)


def effective_precision(m: int, d: int) -> int:
    """Precision of the approximation needed for roots with cond <= 2**m."""
    return 2 * m + 3 * math.ceil(math.log2(d + 1)) + 11


def _to_float_scaled(x: int, F: int) -> float:
    s = max(0, x.bit_length() - 62)
    return math.ldexp(x >> s, s - F) if x >= 0 else -math.ldexp((-x) >> s, s - F)


def _local_coeffs(sec: SectorApprox, D: int) -> np.ndarray:
    """Sector coefficients 0..D as doubles, each correctly rounded."""
    F = sec.frac
    gr, gi = sec.g_re[:D + 1], sec.g_im[:D + 1]
    if F <= 1000:
        scale = 2.0 ** -F
        re = np.array([float(a) for a in gr]) * scale
        im = np.array([float(b) for b in gi]) * scale
    else:
        re = np.array([_to_float_scaled(a, F) for a in gr])
        im = np.array([_to_float_scaled(b, F) for b in gi])
    return re + 1j * im


def _trim(gr: list, gi: list, rel_bits: int, radius: float = 1.3) -> int:
    """Last index j with |g_j| radius**j within 2**-rel_bits of the largest such term."""
    lr = math.log2(radius)
    lg = [max(abs(a).bit_length(), abs(b).bit_length()) + j * lr if (a or b) else -math.inf
          for j, (a, b) in enumerate(zip(gr, gi))]
    top = max(lg)
    for j in range(len(lg) - 1, -1, -1):
        if lg[j] > top - rel_bits:
            return j
    return 0


def sector_candidates(sec: SectorApprox, m: int, keep=None, margin: float = 1.25) -> list[tuple[int, int]]:
    """Roots of the sector polynomial with |t| <= margin, refined in fixed point.

    ``keep(t)`` optionally selects which of those roots get refined; the
    others only take part in the repulsion sum.  Returns fixed-point pairs
    (tr, ti) with scale 2**sec.frac.
    """
    if sec.is_monomial or sec.degree < 1:
        return []
    D1 = _trim(sec.g_re, sec.g_im, 56)
    if D1 < 1:
        return []
    c = _local_coeffs(sec, D1)
    roots, _ = aberth_float(c)
    fin = np.isfinite(roots)
    ok = fin & (np.abs(roots) <= margin)
    if keep is not None:
        ok &= np.array([bool(keep(complex(z))) if o else False for z, o in zip(roots, ok)], dtype=bool)
    if not ok.any():
        return []
    sel = [complex(z) for z in roots[ok]]
    others = roots[~ok & fin]
    F = sec.frac
    D2 = _trim(sec.g_re, sec.g_im, m + 80)
    gr, gi = sec.g_re[:D2 + 1], sec.g_im[:D2 + 1]
    pts, _ = polish_fixed(gr, gi, F, sel, others, min(F - 8, m + 48))
    lim = margin * 1.01
    out = []
    for tr, ti in pts:
        if math.hypot(_to_float_scaled(tr, F), _to_float_scaled(ti, F)) <= lim:
            out.append((tr, ti))
    return out


def _owned(pw: PiecewiseApprox, sec: SectorApprox, t: complex) -> bool:
    """True when the point of local coordinate t falls in the sector's own cell
    (or close enough to a cell boundary that the neighbour might miss it)."""
    ratio = 2.0 ** (sec.rho.log2_float() - sec.gamma.log2_float())
    w = 1 + ratio * t
    lz = sec.gamma.log2_float() + math.log2(abs(w))
    tol = 1e-7 * (1 + abs(lz))
    part = pw.partition
    if not (part.locate(lz - tol) <= sec.n <= part.locate(lz + tol)):
        return False
    if sec.K == 1:
        return True
    kk = sec.K * (sec.k / sec.K + cmath.phase(w) / (2 * math.pi))
    a = round(kk - 1e-6) % sec.K
    b = round(kk + 1e-6) % sec.K
    return sec.k in (a, b)


def _zeta(sec: SectorApprox, tr: int, ti: int, prec: int) -> BigComplex:
    t = BigComplex.exact(BigFloat.from_man_exp(tr, -sec.frac), BigFloat.from_man_exp(ti, -sec.frac))
    y = t.mul_real(Ball(sec.rho), prec)
    y = BigComplex(y.re.add(Ball(sec.gamma), prec), y.im)
    z = y.mul(sec.rotation(prec + 8), prec)
    return BigComplex.exact(z.re.mid, z.im.mid)


def _coeff_float(g: Poly, j: int):
    """(mantissa as complex, exponent E) with coefficient ~ mantissa * 2**E, or None."""
    a, b = g.raw(j)
    if not a[1] and not b[1]:
        return None
    E = max(x[2] + x[3] for x in (a, b) if x[1])
    re = _lm.to_float(_lm.mpf_shift(a, -E)) if a[1] else 0.0
    im = _lm.to_float(_lm.mpf_shift(b, -E)) if b[1] else 0.0
    return complex(re, im), E


def seed_groups(pw: PiecewiseApprox, span_bits: int = 1200) -> list[tuple[int, int, float, float]]:
    """Consecutive rings sharing (ell, u), merged while delta * width stays below span_bits.

    Returns (ell, u, log2 inner radius, log2 outer radius) per group.
    """
    groups = []
    for r in pw.partition:
        if r.delta == 0 or r.lo is None or r.hi is None:
            continue
        lo, hi = r.lo / ONE, r.hi / ONE
        last = groups[-1] if groups else None
        if last and last[0] == r.ell and last[1] == r.u and last[3] >= lo \
                and r.delta * (hi - last[2]) <= span_bits:
            last[3] = hi
        else:
            groups.append([r.ell, r.u, lo, hi])
    return [tuple(x) for x in groups]


def ring_seeds(g: Poly, ell: int, u: int, s_lo: float, s_hi: float) -> list[tuple[float, float]]:
    """Float roots of the dominant part sum_{ell<=j<=u} g_j z^j with log2|z| in [s_lo, s_hi].

    The variable is rescaled by 2**S, S a dyadic close to the middle of the
    range, so that the terms are balanced on the ring.  Returns (log2|z|, arg z).
    """
    S = round((s_lo + s_hi) * 128) / 256
    cs, xs = [], []
    for j in range(ell, u + 1):
        cf = _coeff_float(g, j)
        if cf is None:
            cs.append(0j)
            xs.append(-math.inf)
        else:
            cs.append(cf[0])
            xs.append(cf[1] + S * j)
    x = np.array(xs)
    top = x.max()
    h = np.array(cs) * np.exp2(np.maximum(x - top, -1100.0))
    y, _ = aberth_float(h)
    tol = 2.0 ** -20 + 1e-12 * abs(S)
    out = []
    for z in y:
        if not np.isfinite(z) or z == 0:
            continue
        lz = math.log2(abs(z)) + S
        if s_lo - tol <= lz <= s_hi + tol:
            out.append((lz, cmath.phase(z)))
    return out


def _seed_sector(pw: PiecewiseApprox, lz: float, theta: float):
    """Sector whose cell contains the point, and its local coordinate t."""
    part = pw.partition
    n = part.locate(lz)
    if part[n].delta == 0:
        # pushed just past a ring boundary by rounding
        alt = [i for i in (n - 1, n + 1) if 0 <= i < len(part) and part[i].delta > 0]
        if not alt:
            return None
        n = alt[0]
    secs = pw.sectors[n]
    K = secs[0].K
    k = round(K * theta / (2 * math.pi)) % K
    sec = secs[k]
    lg = sec.gamma.log2_float()
    ratio = 2.0 ** (sec.rho.log2_float() - lg)
    w = 2.0 ** (lz - lg) * cmath.exp(1j * (theta - 2 * math.pi * k / K))
    return sec, (w - 1) / ratio


def polish_sector(sec: SectorApprox, ts: list, m: int) -> list[tuple[int, int]]:
    """Refine local roots near ``ts`` on the sector polynomial in fixed point."""
    F = sec.frac
    D2 = _trim(sec.g_re, sec.g_im, m + 80)
    pts, _ = polish_fixed(sec.g_re[:D2 + 1], sec.g_im[:D2 + 1], F, ts, np.zeros(0, complex),
                          min(F - 8, m + 48))
    lim = 1.5
    return [(tr, ti) for tr, ti in pts
            if math.hypot(_to_float_scaled(tr, F), _to_float_scaled(ti, F)) <= lim]


def collect_candidates(pw: PiecewiseApprox, g: Optional[Poly] = None, threads: int = 1,
                       seeding: str = "ring") -> list[CandidateRoot]:
    """Candidate roots refined on their sector polynomials.

    ``seeding="ring"`` takes starting points from double precision roots of
    the dominant part of each ring (needs ``g``, the normalized polynomial);
    ``seeding="sector"`` solves every sector polynomial in double precision,
    which is only reliable while c m stays below about 30 bits.
    """
    m = pw.m
    mapper = _mapper(threads)
    if seeding == "sector":
        secs = [s for s in pw.all_sectors() if not s.is_monomial]

        def work(sec):
            out = []
            for tr, ti in sector_candidates(sec, m, lambda t: _owned(pw, sec, t)):
                t = complex(_to_float_scaled(tr, sec.frac), _to_float_scaled(ti, sec.frac))
                out.append(CandidateRoot(_zeta(sec, tr, ti, m + 64), sec.n, sec.k, t))
            return out

        return [c for part in mapper(work, secs) for c in part]
    if seeding != "ring":
        raise ValueError(f"unknown seeding {seeding!r}")
    if g is None:
        raise ValueError("ring seeding needs the polynomial")
    seeds = [s for part in mapper(lambda gr: ring_seeds(g, *gr), seed_groups(pw)) for s in part]
    by_sector: dict = {}
    for lz, th in seeds:
        hit = _seed_sector(pw, lz, th)
        if hit is None:
            continue
        sec, t = hit
        by_sector.setdefault((sec.n, sec.k), (sec, []))[1].append(t)
    jobs = [by_sector[key] for key in sorted(by_sector)]

    def polish(job):
        sec, ts = job
        out = []
        for tr, ti in polish_sector(sec, ts, m):
            t = complex(_to_float_scaled(tr, sec.frac), _to_float_scaled(ti, sec.frac))
            out.append(CandidateRoot(_zeta(sec, tr, ti, m + 64), sec.n, sec.k, t))
        return out

    return [c for part in mapper(polish, jobs) for c in part]


def _mapper(threads: int):
    if threads > 1:
        def run(fn, items):
            with ThreadPoolExecutor(max_workers=threads) as ex:
                return list(ex.map(fn, items))
        return run
    return lambda fn, items: [fn(x) for x in items]


def _up(x: BigFloat) -> BigFloat:
    return x.round(64, "u")


def kantorovich_certify(fv: EvalResult, dv: EvalResult, zeta: BigComplex,
                        pw: PiecewiseApprox) -> Optional[IsolatingDisk]:
    """Certified disk D(zeta, r) from the value and derivative at zeta, or None."""
    d = pw.degree
    if zeta.is_zero():
        raise ValueError("roots at the origin are removed before certification")
    p = 64
    fabs = fv.value.abs(p)
    num = fabs.upper().add(fv.error, p, "u")
    dabs = dv.value.abs(p)
    den = dabs.lower().sub(dv.error, p, "d")
    if den <= 0:
        return None
    r = num.shift(1).div(den, p, "u")
    zabs = zeta.abs(p)
    zlo = zabs.lower()
    if zlo <= 0:
        return None
    fh, _ = hat_f(pw.hull, pw.polygon, Ball(zabs.upper()), p)
    Kc = fh.upper().mul(2 * d ** 3, p, "u").div(zlo.mul(zlo, p, "d").mul(den, p, "d"), p, "u")
    # 2**(1/d) - 1 > ln 2 / d
    lhs1 = r.shift(2)
    rhs1 = zlo.mul(BigFloat(LN2_LOWER), p, "d").div(d, p, "d")
    ok = lhs1 < rhs1 and r.mul(Kc, p, "u").mul(5, p, "u") < 1
    if not ok:
        return None
    cond = fh.upper().div(zlo.mul(den, p, "d"), p, "u")
    bits = int(zlo.log2_float() - r.log2_float()) if not r.is_zero() else 10 ** 9
    return IsolatingDisk(zeta, r, cond, True, max(0, bits))


def certify(pw: PiecewiseApprox, zeta: BigComplex) -> Optional[IsolatingDisk]:
    try:
        fv = eval_one(pw, zeta)
        dv = eval_derivative(pw, zeta)
    except ZeroDivisionError:
        return None
    return kantorovich_certify(fv, dv, zeta, pw)


def _disks_intersect(a: IsolatingDisk, b: IsolatingDisk) -> bool:
    p = 64
    dx = a.center.re.sub(b.center.re, p)
    dy = a.center.im.sub(b.center.im, p)
    dist2 = dx.sqr(p).add(dy.sqr(p), p).lower()
    rr = a.radius.add(b.radius, p, "u")
    return dist2 <= rr.mul(rr, p, "u")


def dedup(disks: list) -> list:
    """Merge intersecting disks, keeping the smallest radius of each group."""
    n = len(disks)
    if n <= 1:
        return list(disks)
    L = np.array([d.log2_abs() for d in disks])
    A = np.array([d.arg() for d in disks])
    R = np.array([2.0 ** min(d.radius.log2_float() - d.log2_abs(), 8.0)
                  if not d.radius.is_zero() and math.isfinite(L[i]) else 0.0
                  for i, d in enumerate(disks)])
    # the log-polar window is only valid for disks small relative to |center|
    wide = ~np.isfinite(L) | (R >= 0.25)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(i, j):
        if _disks_intersect(disks[i], disks[j]):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    for i in np.nonzero(wide)[0]:
        for j in range(n):
            if j != i and not (wide[j] and j < i):
                union(int(i), j)
    narrow = np.nonzero(~wide)[0]
    if len(narrow) > 1:
        order = narrow[np.argsort(L[narrow], kind="stable")]
        Ls, As, Rs = L[order], A[order], R[order]
        Rmax = Rs.max()
        for a in range(len(order)):
            reach = 3.0 * (Rs[a] + Rmax) / LN2_LOWER + 1e-12 * (1 + abs(Ls[a]))
            hi = np.searchsorted(Ls, Ls[a] + reach, side="right")
            if hi <= a + 1:
                continue
            sl = slice(a + 1, hi)
            dl = np.abs(Ls[sl] - Ls[a])
            da = np.abs((As[sl] - As[a] + math.pi) % (2 * math.pi) - math.pi)
            tol = 3.0 * (Rs[sl] + Rs[a]) + 1e-12
            near = np.nonzero((dl <= tol / LN2_LOWER + 1e-12 * (1 + abs(Ls[a])))
                              & (da <= tol + 1e-12))[0]
            for k in near:
                union(int(order[a]), int(order[a + 1 + int(k)]))
    best = {}
    for i in range(n):
        root = find(i)
        if root not in best or disks[i].radius < disks[best[root]].radius:
            best[root] = i
    return [disks[i] for i in sorted(best.values())]


def _sort_key(d: IsolatingDisk):
    return (d.log2_abs(), d.arg())


def _merge_candidates(cands: list, m: int) -> list:
    """Drop candidates that coincide to about m bits (same root found twice)."""
    if len(cands) <= 1:
        return cands
    keyed = sorted(cands, key=lambda c: (c.zeta.log2_abs_float(), c.zeta.arg_float()))
    out = [keyed[0]]
    for c in keyed[1:]:
        prev = out[-1]
        if abs(c.zeta.log2_abs_float() - prev.zeta.log2_abs_float()) < 1e-12 and \
                abs(c.zeta.arg_float() - prev.zeta.arg_float()) < 1e-12:
            diff = c.zeta.sub(prev.zeta, 64).abs(64).upper()
            scale = prev.zeta.abs(64).lower().shift(-(m + 8))
            if diff <= scale:
                continue
        out.append(c)
    return out


def isolate_at(f: Poly, m_eff: int, c=ROOT_C, threads: int = 1, seeding: str = "ring") -> RootReport:
    """Run the isolation pipeline with an approximation of precision m_eff."""
    g, v = f.normalize()
    d = g.degree + v
    if g.degree == 0:
        return RootReport([], v, 0, m_eff, v == d, d)
    pw = build_piecewise(g, m_eff, c, threads)
    cands = _merge_candidates(collect_candidates(pw, g, threads, seeding), m_eff)
    res = _mapper(threads)(lambda cd: certify(pw, cd.zeta), cands)
    disks = dedup([r for r in res if r is not None])
    disks.sort(key=_sort_key)
    stats = {"sectors": pw.sector_count, "rings": len(pw.partition), "candidates": len(cands)}
    return RootReport(disks, v, len(disks), m_eff, len(disks) + v == d, d, stats=stats)


def isolate(f: Poly, m: int, c=ROOT_C, threads: int = 1) -> RootReport:
    """Isolate every root of f whose condition number is at most about 2**m."""
    rep = isolate_at(f, effective_precision(m, f.degree), c, threads)
    return rep


def isolate_all(f: Poly, m_start: int, ceiling: Optional[int] = None, c=ROOT_C,
                threads: int = 1) -> RootReport:
    """Double m until every root is isolated or m exceeds the ceiling."""
    ceiling = ceiling or 64 * max(m_start, 64)
    m = m_start
    while True:
        rep = isolate(f, m, c, threads)
        rep.stats["m"] = m
        if rep.complete:
            return rep
        if 2 * m > ceiling:
            rep.ceiling_reached = True
            return rep
        m *= 2


def newton_refine(pw: PiecewiseApprox, disk: IsolatingDisk, target_bits: int,
                  max_steps: int = 64) -> IsolatingDisk:
    """Newton steps on the approximation from the disk centre.

    Stops when the certified radius is below |center| 2**-target_bits or
    when the approximation error floor is reached; ``refined_bits`` reports
    what was achieved.
    """
    z = disk.center
    best = disk
    prec = max(pw.m, target_bits) + 64
    for _ in range(max_steps):
        if best.refined_bits >= target_bits:
            break
        fv = eval_one(pw, z)
        dv = eval_derivative(pw, z)
        if dv.value.abs(64).contains_zero():
            raise ArithmeticError("derivative vanishes; rebuild the approximation at larger m")
        step = fv.value.div(dv.value, prec)
        z = BigComplex.exact(z.re.mid.sub(step.re.mid, prec), z.im.mid.sub(step.im.mid, prec))
        cand = certify(pw, z)
        if not best.certified:
            # an uncertified start keeps iterating until the first certificate
            if cand is not None:
                best = cand
            continue
        if cand is None or cand.refined_bits <= best.refined_bits:
            break
        best = cand
    return best


def cond_of(f: Poly, zeta: BigComplex, prec: int = 128) -> Ball:
    """ftilde(|zeta|) / (|zeta| |f'(zeta)|) as a ball."""
    za = zeta.abs(prec)
    df = f.derivative().horner(zeta, prec).abs(prec)
    if df.contains_zero() or za.contains_zero():
        raise ZeroDivisionError("condition number undefined")
    return tilde_f(f, za, prec).div(za.mul(df, prec), prec)
