import math
import random
from fractions import Fraction

import pytest

from pwpoly.bigfloat import Ball, BigComplex, BigFloat
from pwpoly.evaluate import eval_derivative, eval_one
from pwpoly.generators import cluster, monomial_line, random_poly, two_circle, two_circle_roots
from pwpoly.poly import Poly
from pwpoly.roots import (IsolatingDisk, certify, cond_of, dedup, effective_precision, isolate,
                          isolate_all, isolate_at, kantorovich_certify, newton_refine)
from pwpoly.sectors import build_piecewise

from oracles import cond_reference, ctx, mpc_of, reference_roots


def bc(x, y=0.0):
    return BigComplex.exact(BigFloat(x), BigFloat(y))


def fr(x):
    return (Fraction(x.real), Fraction(x.imag))


def uncertified(x):
    return IsolatingDisk(bc(x), BigFloat(1), BigFloat(1), certified=False)


def mp_fraction(x):
    """Exact Fraction of an mpf."""
    sign, man, exp, _ = x._mpf_
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def owners(disks, z):
    """Disks that contain the mpc point z, tested exactly."""
    pt = (mp_fraction(z.real), mp_fraction(z.imag))
    return [d for d in disks if d.contains(pt)]


def pairwise_disjoint(disks):
    for i, a in enumerate(disks):
        ca = a.center_complex()
        for b in disks[i + 1:]:
            if abs(ca - b.center_complex()) <= float(a.radius) + float(b.radius):
                return False
    return True


def test_certify_near_root():
    pw = build_piecewise(Poly([-1, 0, 1]), 53)
    z = bc(1 + 1e-9)
    disk = kantorovich_certify(eval_one(pw, z), eval_derivative(pw, z), z, pw)
    assert disk is not None and disk.contains((Fraction(1), Fraction(0)))
    assert 1e-9 <= float(disk.radius) <= 3e-9


def test_certify_rejects_far_point():
    pw = build_piecewise(Poly([-1, 0, 1]), 53)
    assert certify(pw, bc(0.3, 0.4)) is None


@pytest.mark.parametrize("a,b", [(3, -2), (BigFloat(5).shift(40), BigFloat(7).shift(-3))])
def test_certify_linear_exact_root(a, b):
    f = Poly([a, b])
    frac = lambda x: x.to_fraction() if isinstance(x, BigFloat) else Fraction(x)
    root = -frac(a) / frac(b)
    for m in (10, 30):
        pw = build_piecewise(f, m)
        disk = certify(pw, BigComplex.exact(BigFloat.from_fraction(root, 200), BigFloat(0)))
        assert disk is not None and disk.contains((root, Fraction(0)))


def _disk(x, y, r):
    return IsolatingDisk(bc(x, y), BigFloat(r), BigFloat(1))


def test_dedup_examples():
    a, b = _disk(0, 0, 0.1), _disk(1, 0, 0.1)
    assert len(dedup([a, b])) == 2
    assert len(dedup([a, _disk(0, 0, 0.1)])) == 1
    outer, inner = _disk(1e-6, 0, 1e-3), _disk(0, 1e-9, 1e-6)
    assert dedup([outer, inner]) == [inner]
    assert dedup([inner, outer]) == [inner]


def test_dedup_chain_is_disjoint():
    rng = random.Random(0)
    disks = [_disk(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0.01, 0.5)) for _ in range(200)]
    out = dedup(disks)
    assert pairwise_disjoint(out)
    assert all(any(o is d for d in disks) for o in out)
    # one output per connected component of the intersection graph
    n = len(disks)
    comp = list(range(n))

    def find(x):
        while comp[x] != x:
            x = comp[x]
        return x
    for i in range(n):
        for j in range(i + 1, n):
            ci, cj = disks[i].center_complex(), disks[j].center_complex()
            if abs(ci - cj) <= float(disks[i].radius) + float(disks[j].radius):
                comp[find(i)] = find(j)
    assert len(out) == len({find(i) for i in range(n)})


def test_newton_refine_sqrt2():
    f = Poly([-2, 0, 1])
    pw = build_piecewise(f, 120)
    out = newton_refine(pw, uncertified(1.5), 50, max_steps=6)
    assert out.refined_bits >= 50
    assert out.contains((Fraction(2**0.5), Fraction(0))) or \
        abs(out.center_complex() - 2 ** 0.5) <= 2 ** 0.5 * 2.0 ** -50


def test_newton_refine_linear_one_step():
    f = Poly([-3, 2])
    pw = build_piecewise(f, 80)
    out = newton_refine(pw, uncertified(1.4), 60, max_steps=1)
    assert out.refined_bits >= 60


def test_newton_refine_floor():
    f = Poly([-2, 0, 1])
    pw = build_piecewise(f, 40)
    out = newton_refine(pw, uncertified(1.4), 200)
    # the approximation error stops refinement short of the target
    assert out.refined_bits < 200
    assert out.contains((Fraction(2**0.5), Fraction(0))) or out.refined_bits > 0


def test_isolate_quadratic():
    rep = isolate(Poly([-1, 0, 1]), 30)
    assert rep.complete and len(rep.disks) == 2
    assert rep.disks[0].contains((Fraction(1), Fraction(0))) or rep.disks[0].contains((Fraction(-1), Fraction(0)))
    assert {round(d.center_complex().real) for d in rep.disks} == {-1, 1}


def test_isolate_with_origin_roots():
    rep = isolate(Poly([0, 0, -6, 11, -6, 1]), 30)
    assert rep.complete and rep.origin_multiplicity == 2 and rep.count_found == 3


def test_isolate_two_circle_closed_form():
    n = 60
    rep = isolate(two_circle(n), 62)
    assert rep.complete and len(rep.disks) == 2 * n
    assert pairwise_disjoint(rep.disks)
    mp = ctx(300)
    roots = two_circle_roots(n)
    assert len(roots) == 2 * n
    for r in (1, 2):
        for k in range(n):
            z = r * mp.expjpi(mp.mpf(2 * k) / n)
            assert len(owners(rep.disks, z)) == 1


def test_isolate_monomial_line():
    tau = 2**12
    rep = isolate(monomial_line(tau), 53)
    assert rep.complete and len(rep.disks) == 1
    assert rep.disks[0].contains((Fraction(2) ** (2 * tau), Fraction(0)))


def test_isolate_all_well_conditioned_first_try():
    rep = isolate_all(Poly([-6, 11, -6, 1]), 20)
    assert rep.complete and rep.stats["m"] == 20


def test_isolate_all_double_root_hits_ceiling():
    f = Poly([2, -3, 0, 1])  # (z - 1)^2 (z + 2)
    rep = isolate_all(f, 16, ceiling=128)
    assert not rep.complete and rep.ceiling_reached
    assert rep.count_found == 1


def test_isolate_all_cluster():
    f = cluster(40, 30)
    first = isolate(f, 20)
    assert not first.complete
    rep = isolate_all(f, 20)
    assert rep.complete and rep.precision_used >= 80
    assert pairwise_disjoint(rep.disks)


def test_cond_of_examples():
    # (|-1| + |1|) / (1 * 1)
    assert cond_of(Poly([-1, 1]), bc(1)).contains(2)
    assert cond_of(Poly([-1, 0, 1]), bc(1)).contains(1)


def test_cond_of_homogeneous():
    f = random_poly("flat", 12, 1)
    g = Poly([c.re.mid.shift(100) for c in f.coeffs])
    z = bc(0.7, -0.2)
    a, b = cond_of(f, z), cond_of(g, z)
    assert a.mid == b.mid


def test_cluster_cond_scale():
    mp = ctx(300)
    coeffs = [mpc_of(mp, c) for c in cluster(40, 30).to_fractions()]
    conds = [cond_reference(mp, coeffs, z) for z in reference_roots(mp, coeffs)]
    assert 38 <= math.log2(max(conds)) <= 44


@pytest.mark.parametrize("d,seed", [(64, 0), (128, 1)])
def test_completeness_threshold(d, seed):
    f = random_poly("hyperbolic", d, seed)
    m = 20
    rep = isolate(f, m)
    m_eff = effective_precision(m, d)
    mp = ctx(400)
    coeffs = [mpc_of(mp, c) for c in f.to_fractions()]
    for z in reference_roots(mp, coeffs):
        c = cond_reference(mp, coeffs, z)
        if 2 * math.log2(c) + 3 * math.log2(d + 1) + 11 < m_eff:
            assert len(owners(rep.disks, z)) == 1


def test_sector_seeding_agrees_on_small_case():
    f = random_poly("flat", 40, 3)
    m_eff = effective_precision(10, 40)
    a = isolate_at(f, m_eff, seeding="ring")
    b = isolate_at(f, m_eff, seeding="sector")
    assert a.complete and b.complete
    ca = sorted((round(d.center_complex().real, 6), round(d.center_complex().imag, 6)) for d in a.disks)
    cb = sorted((round(d.center_complex().real, 6), round(d.center_complex().imag, 6)) for d in b.disks)
    assert ca == cb


def test_threads_byte_identical():
    f = random_poly("elliptic", 80, 2)
    a = isolate(f, 30, threads=1)
    b = isolate(f, 30, threads=4)
    key = lambda r: [(d.center.re.mid, d.center.im.mid, d.radius) for d in r.disks]
    assert key(a) == key(b)
