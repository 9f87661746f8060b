"""Fixed-point polynomial kernels on Kronecker-packed integers.

A polynomial with integer coefficients v_0..v_{n-1} (fixed point, scaled by
2**F) is stored as the single integer sum_t v_t 2**(t W).  Products of packed
integers are polynomial products as long as every slot stays inside
(-2**(W-1), 2**(W-1)), which the callers guarantee through the choice of W.
Big products are delegated to GMP through gmpy2.
"""

from __future__ import annotations

from collections.abc import Sequence

import gmpy2
from gmpy2 import mpz

_ZERO = mpz(0)


class Layout:
    """Slot geometry for n slots of W bits with F fractional bits."""

    def __init__(self, n: int, frac: int, width: int):
        if width % 8 or width < 2 * frac + 8:
            raise ValueError("slot width must be a multiple of 8 and exceed 2F")
        self.n = n
        self.F = frac
        self.W = width
        self.B = width // 8
        self.bias = 1 << (width - 1)
        ones = self._ones(n)
        self.ones = ones
        self.bias_n = ones * self.bias
        self.bias_2n = self._ones(2 * n) * self.bias
        self.mask_n = (mpz(1) << (n * width)) - 1
        self.low_mask = ones * ((1 << (width - frac)) - 1)
        self.bias_f = ones * (self.bias >> frac)
        self.one = mpz(1) << frac

    def _ones(self, n):
        return mpz(int.from_bytes((b"\x01" + b"\x00" * (self.B - 1)) * n, "little"))

    def pack(self, values) -> mpz:
        bias, B = self.bias, self.B
        data = b"".join((int(v) + bias).to_bytes(B, "little") for v in values)
        nv = len(values)
        return mpz(int.from_bytes(data, "little")) - (self.bias_n if nv == self.n else self._ones(nv) * bias)

    def unpack(self, x, count: int | None = None) -> list[int]:
        count = self.n if count is None else count
        B = self.B
        ones = self.bias_n if count == self.n else self._ones(count) * self.bias
        data = int(x + ones).to_bytes(count * B, "little")
        bias = self.bias
        return [int.from_bytes(data[i:i + B], "little") - bias for i in range(0, count * B, B)]

    def trunc(self, x) -> mpz:
        """Keep the first n slots of a packed value with at most 2n slots."""
        return ((x + self.bias_2n) & self.mask_n) - self.bias_n

    def trunc_rescale(self, x) -> mpz:
        """Keep n slots and divide every slot by 2**F (rounding toward -inf)."""
        y = ((x + self.bias_2n) & self.mask_n) >> self.F
        return (y & self.low_mask) - self.bias_f

    def mul(self, x, y) -> mpz:
        """Truncated fixed-point product of two packed polynomials."""
        return self.trunc_rescale(x * y)

    def scal(self, a: int, x) -> mpz:
        """Fixed-point product of a scalar (scaled by 2**F) and a packed polynomial."""
        return self.trunc_rescale(a * x)

    def shift_up(self, x) -> mpz:
        """Multiply by T (dropping the top slot)."""
        return self.trunc(x << self.W)


class LazySlots(Sequence):
    """Read-only list view of a packed value, unpacked on first access."""

    __slots__ = ("_lay", "_x", "_n", "_vals")

    def __init__(self, lay: Layout, x, count: int):
        self._lay, self._x, self._n, self._vals = lay, x, count, None

    def _values(self) -> list[int]:
        if self._vals is None:
            self._vals = self._lay.unpack(self._x, self._n)
            self._lay = self._x = None
        return self._vals

    def __len__(self):
        return self._n

    def __getitem__(self, i):
        return self._values()[i]

    def __iter__(self):
        return iter(self._values())

    def __eq__(self, other):
        return list(self) == list(other)

    def __repr__(self):
        return repr(self._values())


def slot_width(frac: int, extra: int = 16) -> int:
    w = 2 * frac + extra
    return (w + 7) // 8 * 8


def cmul_scalar(lay: Layout, wr: int, wi: int, xr, xi):
    """(wr + i wi) * (xr + i xi) at scale 2F (not rescaled)."""
    if wi == 0:
        return wr * xr, wr * xi
    if wr == 0:
        return -wi * xi, wi * xr
    return wr * xr - wi * xi, wr * xi + wi * xr


def smallest_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return n


def dft_packed(lay: Layout, xs: list, twiddles: list, K: int) -> list:
    """Mixed-radix DFT: X_k = sum_j x_j w^(jk) with w = exp(2 pi i / K).

    ``xs`` is a list of (re, im) packed pairs; ``twiddles[j]`` is w**j as a
    pair of fixed-point integers.
    """
    return _dft(lay, xs, twiddles, K, 1)


def _dft(lay, xs, tw, K, stride):
    L = len(xs)
    if L == 1:
        return list(xs)
    p = smallest_factor(L)
    Lp = L // p
    step = K // L  # w_L = w^step
    F = lay.F
    if Lp == 1:
        # naive p-point transform
        out = []
        for k in range(L):
            ar, ai = xs[0][0] << F, xs[0][1] << F
            for j in range(1, L):
                wr, wi = tw[(step * j * k) % K]
                br, bi = cmul_scalar(lay, wr, wi, xs[j][0], xs[j][1])
                ar, ai = ar + br, ai + bi
            out.append((lay.trunc_rescale(ar), lay.trunc_rescale(ai)))
        return out
    subs = [_dft(lay, xs[a::p], tw, K, stride * p) for a in range(p)]
    out = [None] * L
    for k0 in range(Lp):
        # twiddled inputs of the p-point butterfly
        ys = [(subs[0][k0][0] << F, subs[0][k0][1] << F)]
        for a in range(1, p):
            e = (step * a * k0) % K
            xr, xi = subs[a][k0]
            if e == 0:
                ys.append((xr << F, xi << F))
            else:
                wr, wi = tw[e]
                ys.append(cmul_scalar(lay, wr, wi, xr, xi))
        if p == 2:
            (ar, ai), (br, bi) = ys
            out[k0] = (lay.trunc_rescale(ar + br), lay.trunc_rescale(ai + bi))
            out[k0 + Lp] = (lay.trunc_rescale(ar - br), lay.trunc_rescale(ai - bi))
            continue
        # rescale once, then a small DFT with p-th roots of unity
        ys = [(lay.trunc_rescale(yr), lay.trunc_rescale(yi)) for yr, yi in ys]
        for t in range(p):
            ar, ai = ys[0][0] << F, ys[0][1] << F
            for a in range(1, p):
                e = (K // p * a * t) % K
                if e == 0:
                    ar, ai = ar + (ys[a][0] << F), ai + (ys[a][1] << F)
                else:
                    wr, wi = tw[e]
                    br, bi = cmul_scalar(lay, wr, wi, ys[a][0], ys[a][1])
                    ar, ai = ar + br, ai + bi
            out[k0 + t * Lp] = (lay.trunc_rescale(ar), lay.trunc_rescale(ai))
    return out


__all__ = ["Layout", "slot_width", "cmul_scalar", "dft_packed", "smallest_factor", "gmpy2"]
