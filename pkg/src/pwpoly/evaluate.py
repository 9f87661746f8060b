"""Evaluation of a polynomial through its piecewise approximation."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from mpmath import libmp as _lm

from .bigfloat import Ball, BigComplex, BigFloat, pow_int, root_of_unity
from .poly import hat_f
from .sectors import PiecewiseApprox, SectorApprox

TWO_PI = 2 * math.pi


@dataclass
class EvalResult:
    """f(z) lies in the disk of radius ``value`` radius + ``error`` around the centre."""

    value: BigComplex
    error: BigFloat
    ring: int
    sector: int

    def enclosure(self) -> BigComplex:
        r = Ball(0, self.error)
        return BigComplex(self.value.re.add(r, 64), self.value.im.add(r, 64))

    def radius(self) -> BigFloat:
        """Total bound on |f(z) - centre|."""
        return (self.value.rad_bound() + self.error).round(30, "u")


def locate(pw: PiecewiseApprox, z: BigComplex) -> tuple[int, int]:
    """(ring, sector) indices whose disk contains z."""
    lz = z.log2_abs_float()
    if lz == -math.inf:
        return 0, 0
    n = pw.partition.locate(lz)
    secs = pw.sectors[n]
    K = secs[0].K
    if K == 1:
        return n, 0
    k = round(K * z.arg_float() / TWO_PI) % K
    return n, k


def _abs_upper(z: BigComplex) -> Ball:
    return z.abs(64)


def error_bound(pw: PiecewiseApprox, z: BigComplex) -> BigFloat:
    """(d + 1) 2**-m fhat(|z|), rounded up."""
    r = _abs_upper(z)
    r = Ball(r.upper())
    fh, _ = hat_f(pw.hull, pw.polygon, r, 64)
    if pw.origin:
        fh = fh.mul(_real_pow(r, pw.origin), 64)
    val = fh.upper().mul(pw.degree + 1, 64, "u").shift(-pw.m)
    return val


def _real_pow(r: Ball, k: int) -> Ball:
    from .bigfloat import real_pow_int
    return real_pow_int(r, k, 64)


def _t_fixed(sec: SectorApprox, z: BigComplex, prec: int):
    """Local coordinate t = (z w^-k - gamma)/rho as fixed-point ints and an error bound (units of 2**-F)."""
    rot = root_of_unity(-sec.k, sec.K, prec)
    y = z.mul(rot, prec)
    y = BigComplex(y.re.sub(Ball(sec.gamma), prec), y.im)
    rho = Ball(sec.rho)
    t = BigComplex(y.re.div(rho, prec), y.im.div(rho, prec))
    F = sec.frac
    tr = int(_lm.to_int(_lm.mpf_shift(t.re._m, F), "n"))
    ti = int(_lm.to_int(_lm.mpf_shift(t.im._m, F), "n"))
    # |t - (tr + i ti) 2**-F| <= rad(t) + 2**-F
    err = BigFloat._raw(t.re._r) + BigFloat._raw(t.im._r)
    err_units = int(err.shift(F).ceil()) + 1
    return tr, ti, err_units


def _horner(gr, gi, tr, ti, F, deriv: bool):
    """Fixed-point Horner for g(t) (and g'(t)); values scaled by 2**F, floor rounding."""
    D = len(gr) - 1
    ar, ai = gr[D], gi[D]
    br = bi = 0
    for j in range(D - 1, -1, -1):
        if deriv:
            xr = (br * tr - bi * ti) >> F
            xi = (br * ti + bi * tr) >> F
            br, bi = xr + ar, xi + ai
        xr = (ar * tr - ai * ti) >> F
        xi = (ar * ti + ai * tr) >> F
        ar, ai = xr + gr[j], xi + gi[j]
    return ar, ai, br, bi


def _fixed_to_ball(v: int, F: int, rad_units: int) -> Ball:
    return Ball(BigFloat.from_man_exp(v, -F), BigFloat.from_man_exp(rad_units, -F))


def _scaled(x: int, F: int) -> float:
    """x * 2**-F as a float, rounded up, without overflowing for large F."""
    sh = max(0, x.bit_length() - 60)
    return math.ldexp(float((x >> sh) + 1), sh - F)


def _sector_values(sec: SectorApprox, z: BigComplex, deriv: bool, prec: int):
    """(g(t), g'(t)/rho_k) as complex balls with rigorous rounding radii."""
    F = sec.frac
    tr, ti, et = _t_fixed(sec, z, prec)
    D = len(sec.g_re) - 1
    ar, ai, br, bi = _horner(sec.g_re, sec.g_im, tr, ti, F, deriv)
    # crude magnitude bounds in units of 2**-F
    tabs = _scaled(abs(tr) + abs(ti) + et, F)
    T = max(1.0, tabs)
    gsum = _scaled(sum(abs(a) + abs(b) for a, b in zip(sec.g_re, sec.g_im)), F)
    TD = T ** D
    # rounding: 2 ulps per step; input error: et * sum j |g_j| T^(j-1)
    e0 = 2.0 * (D + 1) * TD + et * D * gsum * TD
    e0u = int(e0 * 1.01) + 2
    g = BigComplex(_fixed_to_ball(ar, F, e0u), _fixed_to_ball(ai, F, e0u))
    if not deriv:
        return g, None
    e1 = 2.0 * D * (D + 1) * TD * TD + et * D * D * gsum * TD
    e1u = int(e1 * 1.01) + 2
    gp = BigComplex(_fixed_to_ball(br, F, e1u), _fixed_to_ball(bi, F, e1u))
    # d/dz g(t) = g'(t) w^-k / rho
    rot = root_of_unity(-sec.k, sec.K, prec)
    gp = gp.mul(rot, prec)
    rho = Ball(sec.rho)
    gp = BigComplex(gp.re.div(rho, prec), gp.im.div(rho, prec))
    return g, gp


def _work_prec(pw: PiecewiseApprox, sec: SectorApprox) -> int:
    return max(sec.frac + 2 * sec.K.bit_length() + 16, pw.m + 32)


def eval_one(pw: PiecewiseApprox, z: BigComplex) -> EvalResult:
    """f(z) from the piecewise approximation, with a rigorous error bound."""
    n, k = locate(pw, z)
    sec = pw.sectors[n][k]
    prec = _work_prec(pw, sec)
    vprec = pw.m + 2 * (pw.degree + 1).bit_length() + 40
    if sec.is_monomial:
        g0 = BigComplex.exact(BigFloat.from_man_exp(sec.g_re[0], -sec.frac),
                              BigFloat.from_man_exp(sec.g_im[0], -sec.frac))
        g = g0
    else:
        g, _ = _sector_values(sec, z, False, prec)
    zl = pow_int(z, sec.ell + pw.origin, vprec)
    val = zl.mul(g, vprec).shift(sec.M_exp)
    return EvalResult(val, error_bound(pw, z), n, k)


def eval_derivative(pw: PiecewiseApprox, z: BigComplex) -> EvalResult:
    """f'(z) from the piecewise approximation.

    The error term is d^2 2**-m fhat(|z|)/|z| (plus the origin factor when f
    has a zero at the origin).
    """
    n, k = locate(pw, z)
    sec = pw.sectors[n][k]
    prec = _work_prec(pw, sec)
    vprec = pw.m + 2 * (pw.degree + 1).bit_length() + 40
    ell = sec.ell + pw.origin
    if sec.is_monomial:
        g = BigComplex.exact(BigFloat.from_man_exp(sec.g_re[0], -sec.frac),
                             BigFloat.from_man_exp(sec.g_im[0], -sec.frac))
        gp = BigComplex(0, 0)
    else:
        g, gp = _sector_values(sec, z, True, prec)
    # d/dz z^ell g = z^(ell-1) (ell g + z g')
    inner = g.mul_real(Ball(ell), vprec).add(z.mul(gp, vprec), vprec)
    zl = pow_int(z, ell - 1, vprec) if ell >= 1 else z.inv(vprec)
    val = zl.mul(inner, vprec).shift(sec.M_exp)
    d = pw.degree
    zabs = z.abs(64)
    if zabs.contains_zero():
        if d:
            raise ZeroDivisionError("derivative bound undefined at the origin")
        err = BigFloat(0)
    else:
        # dropped terms contribute at most d^2 2**-m fhat/|z|; the Taylor
        # tail and fixed-point part of the sector adds its own share
        factor = float(d * d)
        if not sec.is_monomial:
            zr = 2.0 ** (z.log2_abs_float() - sec.rho.log2_float())
            factor += (ell + 2.0 * (sec.degree + 2) * zr * 1.01) * (sec.delta + 1) / 2.0
        eb = Ball(error_bound(pw, z)).div(Ball(d + 1), 64)
        err = eb.mul(Ball(BigFloat(factor * 1.0001)), 64).div(Ball(zabs.lower()), 64).upper()
    return EvalResult(val, err, n, k)


def eval_many(pw: PiecewiseApprox, zs, threads: int = 1, derivative: bool = False) -> list:
    fn = eval_derivative if derivative else eval_one
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda z: fn(pw, z), zs))
    return [fn(pw, z) for z in zs]
