"""Aberth-Ehrlich simultaneous iteration.

A double precision pass (compiled with numba) finds all roots to about 50
bits; refinement passes then continue the same iteration in higher
precision, either with MPFR complex numbers (general case) or with
fixed-point integers for roots inside a bounded disk.
"""

from __future__ import annotations

import math

import gmpy2
import numpy as np
from numba import njit

from .bigfloat import BigComplex, BigFloat
from .poly import Poly


@njit(cache=True)
def _ratio(c, z):
    """(p(z)/p'(z), exact zero, residual at rounding level).

    Uses the reversed polynomial when |z| > 1.
    """
    n = c.shape[0] - 1
    eps = 2.0 ** -52
    if abs(z) <= 1.0:
        p = c[n]
        dp = 0j
        pa = abs(c[n])
        az = abs(z)
        for j in range(n - 1, -1, -1):
            dp = dp * z + p
            p = p * z + c[j]
            pa = pa * az + abs(c[j])
        small = abs(p) <= 4.0 * (n + 1) * eps * pa
        if dp == 0:
            return 0j, p == 0, small
        return p / dp, p == 0, small
    w = 1.0 / z
    aw = abs(w)
    q = c[0]
    dq = 0j
    qa = abs(c[0])
    for j in range(1, n + 1):
        dq = dq * w + q
        q = q * w + c[j]
        qa = qa * aw + abs(c[j])
    if q == 0:
        return 0j, True, True
    small = abs(q) <= 4.0 * (n + 1) * eps * qa
    den = n - w * dq / q
    if den == 0:
        return 0j, False, small
    return z / den, False, small


@njit(cache=True)
def _aberth(c, z, maxit, tol):
    n = z.shape[0]
    done = np.zeros(n, dtype=np.bool_)
    it = 0
    for it in range(maxit):
        moved = False
        for i in range(n):
            if done[i]:
                continue
            N, exact, small = _ratio(c, z[i])
            if exact or small:
                done[i] = True
                continue
            s = 0j
            for j in range(n):
                if j != i:
                    d = z[i] - z[j]
                    if d != 0:
                        s += 1.0 / d
            den = 1.0 - N * s
            w = N / den if den != 0 else N
            z[i] -= w
            if abs(w) <= tol * abs(z[i]) or not np.isfinite(z[i].real * 0.0 + z[i].imag * 0.0):
                done[i] = True
            moved = True
        if not moved:
            break
    return z, done, it + 1


def _hull_upper(x, y):
    """Upper convex hull indices of points (x_i, y_i), x increasing."""
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]) >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def initial_points(c: np.ndarray) -> np.ndarray:
    """Starting points on circles whose radii come from the Newton polygon of c."""
    n = len(c) - 1
    mags = np.abs(c)
    idx = np.nonzero(mags > 0)[0]
    lg = np.log2(mags[idx])
    hull = _hull_upper(idx.astype(float), lg)
    pts = []
    for e in range(len(hull) - 1):
        i0, i1 = idx[hull[e]], idx[hull[e + 1]]
        k = i1 - i0
        r = 2.0 ** ((lg[hull[e]] - lg[hull[e + 1]]) / k)
        r = min(max(r, 1e-250), 1e250)
        phase = 2 * math.pi * (e + 1) / (n + 1) + 0.4
        ang = phase + 2 * math.pi * np.arange(k) / k
        pts.append(r * np.exp(1j * ang))
    z = np.concatenate(pts) if pts else np.zeros(0, dtype=complex)
    # zero low-order coefficients give roots at the origin
    z0 = np.zeros(idx[0], dtype=complex) + 1e-300
    return np.concatenate([z0, z]).astype(np.complex128)


def aberth_float(c, maxit: int = 200, tol: float = 2.0 ** -50):
    """All roots of sum c_j t^j in double precision; returns (roots, converged)."""
    c = np.asarray(c, dtype=np.complex128)
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    if len(c) <= 1:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=bool)
    scale = np.max(np.abs(c))
    c = c / scale
    z = initial_points(c)
    z, done, _ = _aberth(c, z.copy(), maxit, tol)
    return z, done


def _to_mpc(x: BigComplex | complex, prec: int):
    if isinstance(x, BigComplex):
        return gmpy2.mpc(_to_mpfr(x.re.mid, prec), _to_mpfr(x.im.mid, prec))
    return gmpy2.mpc(x, precision=prec)


def _to_mpfr(x: BigFloat, prec: int):
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        return gmpy2.mul_2exp(gmpy2.mpfr(x.mantissa), x.exponent)


def _mpfr_to_bigfloat(x) -> BigFloat:
    if x == 0:
        return BigFloat(0)
    man, exp = x.as_mantissa_exp()
    return BigFloat.from_man_exp(int(man), int(exp))


def mpc_to_bigcomplex(z) -> BigComplex:
    return BigComplex.exact(_mpfr_to_bigfloat(z.real), _mpfr_to_bigfloat(z.imag))


def aberth_refine_mpc(coeffs: list, z: list, prec: int, tol_bits: int, maxit: int = 100):
    """Continue Aberth iterations in MPFR complex arithmetic at ``prec`` bits."""
    n = len(coeffs) - 1
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        c = [gmpy2.mpc(a) for a in coeffs]
        z = [gmpy2.mpc(complex(v)) if not isinstance(v, type(gmpy2.mpc(0))) else v for v in z]
        tol = gmpy2.mpfr(2) ** (-tol_bits)
        tiny = gmpy2.mpfr(2) ** (-1000)
        done = [False] * n
        for _ in range(maxit):
            if all(done):
                break
            for i in range(n):
                if done[i]:
                    continue
                zi = z[i]
                p = c[n]
                dp = gmpy2.mpc(0)
                for j in range(n - 1, -1, -1):
                    dp = dp * zi + p
                    p = p * zi + c[j]
                if p == 0:
                    done[i] = True
                    continue
                if dp == 0:
                    continue
                N = p / dp
                s = gmpy2.mpc(0)
                for j in range(n):
                    if j != i and z[j] != zi:
                        s += 1 / (zi - z[j])
                w = N / (1 - N * s)
                z[i] = zi - w
                if abs(w) <= tol * max(abs(z[i]), tiny):
                    done[i] = True
    return z, all(done)


def aberth_solve(g: Poly, m: int, maxit: int = 100) -> tuple[list, float]:
    """All roots of g, refined so that lc(g) prod(T - t_i) is within 2**-4m of g.

    Returns (roots as exact BigComplex centres, achieved relative backward
    error in l1 norm as a float log2; -inf if exact).  The backward error is
    computed by expansion at 8m bits.
    """
    g, v = g.normalize()
    n = g.degree
    if n < 0:
        raise ValueError("zero polynomial")
    prec = 8 * m + 2 * n.bit_length() + 16
    coeffs = [_to_mpc(g.coeff(j), prec) for j in range(n + 1)]
    if n == 0:
        roots = []
    else:
        cf = g.to_complex128()
        # rescale to keep double precision in range
        zf, _ = aberth_float(cf)
        roots, _ = aberth_refine_mpc(coeffs, list(zf), prec, 4 * m + n.bit_length() + 8, maxit)
    roots = [gmpy2.mpc(0)] * v + list(roots)
    out = [mpc_to_bigcomplex(r) for r in roots]
    return out, backward_error(g, roots[v:], prec)


def backward_error(g: Poly, roots: list, prec: int) -> float:
    """log2 of ||g - lc prod (T - t_i)||_1 / ||g||_1, computed at ``prec`` bits."""
    n = g.degree
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        c = [_to_mpc(g.coeff(j), prec) for j in range(n + 1)]
        e = [gmpy2.mpc(1)]
        for t in roots:
            nxt = [gmpy2.mpc(0)] * (len(e) + 1)
            for j, a in enumerate(e):
                nxt[j + 1] += a
                nxt[j] -= a * t
            e = nxt
        lc = c[n]
        num = sum(abs(c[j] - lc * e[j]) for j in range(n + 1))
        den = sum(abs(x) for x in c)
        if num == 0:
            return -math.inf
        return float(gmpy2.log2(num / den))


# fixed-point refinement of roots inside a bounded disk

def _cmul(ar, ai, br, bi, F):
    return (ar * br - ai * bi) >> F, (ar * bi + ai * br) >> F


def _cdiv(ar, ai, br, bi, F):
    den = br * br + bi * bi
    if den == 0:
        raise ZeroDivisionError
    return ((ar * br + ai * bi) << F) // den, ((ai * br - ar * bi) << F) // den


def horner_fixed(gr, gi, tr, ti, F):
    """g(t) and g'(t) for fixed-point coefficient and point (scale 2**F)."""
    D = len(gr) - 1
    ar, ai = gr[D], gi[D]
    br = bi = 0
    for j in range(D - 1, -1, -1):
        xr = (br * tr - bi * ti) >> F
        xi = (br * ti + bi * tr) >> F
        br, bi = xr + ar, xi + ai
        xr = (ar * tr - ai * ti) >> F
        xi = (ar * ti + ai * tr) >> F
        ar, ai = xr + gr[j], xi + gi[j]
    return ar, ai, br, bi


def _f2fix(x: float, F: int) -> int:
    """round(x * 2**F) for a double, without overflowing for large F."""
    if F <= 960:
        return int(round(x * 2.0 ** F))
    return int(round(x * 2.0 ** 960)) << (F - 960)


def polish_fixed(gr, gi, F: int, sel: list, others: np.ndarray, tol_bits: int,
                 maxit: int = 60) -> tuple[list, list]:
    """Aberth refinement of the selected roots of g in fixed point.

    ``sel`` are complex approximations of the roots to refine, ``others``
    the remaining (double precision) roots, used only in the repulsion sum.
    Returns fixed-point (tr, ti) pairs and per-root convergence flags.
    """
    one = 1 << F
    pts = [(_f2fix(z.real, F), _f2fix(z.imag, F)) for z in sel]
    done = [False] * len(pts)
    tol = 1 << max(0, F - tol_bits)
    others = np.asarray(others, dtype=np.complex128)
    for _ in range(maxit):
        if all(done):
            break
        for i in range(len(pts)):
            if done[i]:
                continue
            tr, ti = pts[i]
            pr, pi_, dr, di = horner_fixed(gr, gi, tr, ti, F)
            if pr == 0 and pi_ == 0:
                done[i] = True
                continue
            if dr == 0 and di == 0:
                break
            nr, ni = _cdiv(pr, pi_, dr, di, F)
            # repulsion from the other selected roots (exact) and the rest (double)
            sr = si = 0
            for j, (ur, ui) in enumerate(pts):
                if j != i and (ur, ui) != (tr, ti):
                    qr, qi = _cdiv(one, 0, tr - ur, ti - ui, F)
                    sr += qr
                    si += qi
            if len(others):
                zt = complex(tr / one, ti / one)
                diff = zt - others
                diff = diff[diff != 0]
                s = complex(np.sum(1.0 / diff))
                sr += _f2fix(s.real, F)
                si += _f2fix(s.imag, F)
            xr, xi = _cmul(nr, ni, sr, si, F)
            try:
                wr, wi = _cdiv(nr, ni, one - xr, -xi, F)
            except ZeroDivisionError:
                wr, wi = nr, ni
            pts[i] = (tr - wr, ti - wi)
            if abs(wr) + abs(wi) <= tol:
                done[i] = True
    return pts, done
