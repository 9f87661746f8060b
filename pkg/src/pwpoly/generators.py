"""Test polynomial families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .bigfloat import BigFloat
from .poly import Poly

FAMILIES = ("hyperbolic", "elliptic", "flat", "exp_taylor", "two_circle",
            "monomial_line", "cluster")
RANDOM_FAMILIES = ("hyperbolic", "elliptic", "flat")


@dataclass(frozen=True)
class FamilySpec:
    """Which polynomial to build.

    For the random families ``exp_lo``/``exp_hi`` bound the binary exponent
    of the random factor, whose mantissa is uniform in [1, 2).  ``param`` is
    n for two_circle, tau for monomial_line and the gap exponent for cluster.
    """

    family: str
    degree: int
    seed: int = 0
    exp_lo: int = -8
    exp_hi: int = 8
    param: Optional[int] = None


def _round53(x) -> BigFloat:
    # 53-bit mantissa, unbounded exponent (1/sqrt(i!) leaves the double range)
    return BigFloat._raw(mpmath.libmp.mpf_pos(x._mpf_, 53, "n"))


def basis_weights(family: str, d: int) -> list[BigFloat]:
    """Basis weights rounded to double precision."""
    if family == "hyperbolic":
        return [BigFloat(1)] * (d + 1)
    mp = mpmath.mp.clone()
    mp.prec = 120
    if family == "elliptic":
        return [_round53(mp.sqrt(mp.binomial(d, i))) for i in range(d + 1)]
    if family == "flat":
        return [_round53(1 / mp.sqrt(mp.factorial(i))) for i in range(d + 1)]
    raise ValueError(f"not a random family: {family}")


def random_factors(d: int, seed: int, exp_lo: int = -8, exp_hi: int = 8) -> list[BigFloat]:
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.uniform(1.0, 2.0, size=d + 1)
    e = rng.integers(exp_lo, exp_hi + 1, size=d + 1)
    s = rng.integers(0, 2, size=d + 1)
    return [BigFloat(float((-1.0) ** si * ui)).shift(int(ei)) for ui, ei, si in zip(u, e, s)]


def random_poly(family: str, d: int, seed: int, exp_lo: int = -8, exp_hi: int = 8) -> Poly:
    w = basis_weights(family, d)
    a = random_factors(d, seed, exp_lo, exp_hi)
    # the product of two doubles is exact in 106 bits
    return Poly([x * y for x, y in zip(a, w)])


def exp_taylor(d: int) -> Poly:
    """sum_{k<=d} z^k / k!, each coefficient rounded to 53 bits."""
    coeffs = []
    for k in range(d + 1):
        q = Fraction(1, math.factorial(k))
        coeffs.append(BigFloat.from_fraction(q, 53))
    return Poly(coeffs)


def two_circle(n: int) -> Poly:
    """(z^n - 1)(z^n - 2^n) = z^2n - (2^n + 1) z^n + 2^n."""
    c = [0] * (2 * n + 1)
    c[0] = 1 << n
    c[n] = -((1 << n) + 1)
    c[2 * n] = 1
    return Poly(c)


def two_circle_roots(n: int) -> list[tuple[float, float]]:
    """Closed-form roots as (modulus, angle) pairs, angle = 2 pi k / n."""
    return [(r, 2 * math.pi * k / n) for r in (1.0, 2.0) for k in range(n)]


def monomial_line(tau: int) -> Poly:
    """2^tau - 2^-tau z, whose root is 2^(2 tau)."""
    return Poly([BigFloat(1).shift(tau), BigFloat(-1).shift(-tau)])


def cluster(gap: int = 40, n: int = 30) -> Poly:
    """(z - 1)(z - 1 - 2^-gap)(z^n - 2^n), expanded exactly."""
    eps = Fraction(1, 1 << gap)
    quad = [1 + eps, -(2 + eps), Fraction(1)]
    tail = [Fraction(0)] * (n + 1)
    tail[0] = Fraction(-(1 << n))
    tail[n] = Fraction(1)
    out = [Fraction(0)] * (n + 3)
    for i, a in enumerate(quad):
        for j, b in enumerate(tail):
            out[i + j] += a * b
    return Poly([BigFloat(q) for q in out])


def gen(spec: FamilySpec) -> Poly:
    f, d = spec.family, spec.degree
    if d < 1:
        raise ValueError("degree must be at least 1")
    if f in RANDOM_FAMILIES:
        return random_poly(f, d, spec.seed, spec.exp_lo, spec.exp_hi)
    if f == "exp_taylor":
        return exp_taylor(d)
    if f == "two_circle":
        n = spec.param or d // 2
        return two_circle(n)
    if f == "monomial_line":
        return monomial_line(spec.param if spec.param is not None else d)
    if f == "cluster":
        return cluster(spec.param or 40, max(1, d - 2))
    raise ValueError(f"unknown family {f!r}")
