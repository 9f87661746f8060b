"""Command line interface: pwpoly gen | approx | eval | roots | bench."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from fractions import Fraction
from typing import Optional

import numpy as np

from .bigfloat import BigComplex, BigFloat, ExponentOverflow, from_hex, to_hex
from .config import EVAL_C, ROOTS_C, ApproxConfig, BenchConfig, RootConfig
from .evaluate import eval_many
from .generators import FAMILIES, FamilySpec, gen
from .poly import Poly
from .roots import isolate, isolate_all, newton_refine
from .sectors import build_piecewise, read_piecewise, write_piecewise

log = logging.getLogger("pwpoly")

EXIT_OK, EXIT_INCOMPLETE, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def read_poly(path: str) -> Poly:
    try:
        return Poly.from_text(_read(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def read_points(path: str) -> list[BigComplex]:
    pts = []
    for no, ln in enumerate(_read(path).splitlines(), 1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise InputError(f"{path}: line {no}: expected 're im'")
        try:
            pts.append(BigComplex.exact(from_hex(parts[0]), from_hex(parts[1])))
        except ValueError as exc:
            raise InputError(f"{path}: line {no}: {exc}") from None
    return pts


def write_points(zs) -> str:
    return "".join(f"{to_hex(z.re.mid)} {to_hex(z.im.mid)}\n" for z in zs)


def _ring_lines(pw) -> str:
    from .poly import LOG_BITS
    out = []
    for r in pw.partition:
        lo = "-inf" if r.lo is None else to_hex(BigFloat.from_man_exp(r.lo, -LOG_BITS))
        hi = "inf" if r.hi is None else to_hex(BigFloat.from_man_exp(r.hi, -LOG_BITS))
        out.append(f"{r.n} {lo} {hi} {r.ell} {r.u}\n")
    return "".join(out)


def disk_lines(disks) -> str:
    return "".join(
        f"{to_hex(d.center.re.mid)} {to_hex(d.center.im.mid)} {to_hex(d.radius)} "
        f"{to_hex(d.cond_estimate)} {int(d.certified)}\n" for d in disks)


def _c(args, default: Fraction) -> Fraction:
    return Fraction(args.c) if args.c is not None else default


# subcommands

def cmd_gen(args) -> int:
    spec = FamilySpec(args.family.replace("-", "_"), args.degree, args.seed, param=args.param)
    _write(args.out, gen(spec).to_text())
    return EXIT_OK


def cmd_approx(args) -> int:
    cfg = ApproxConfig(args.m, _c(args, EVAL_C), args.threads)
    f = read_poly(args.inp)
    t = time.perf_counter()
    pw = build_piecewise(f, cfg.m, cfg.c, cfg.threads)
    log.info("approximation: %d rings, %d sectors, %.3fs", len(pw.partition),
             pw.sector_count, time.perf_counter() - t)
    _write(args.out, _ring_lines(pw) if args.rings_only else write_piecewise(pw))
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = ApproxConfig(args.m, _c(args, EVAL_C), args.threads)
    f = read_poly(args.inp) if args.inp else None
    if args.pw:
        try:
            pw = read_piecewise(_read(args.pw))
        except ValueError as exc:
            raise InputError(f"{args.pw}: {exc}") from None
        if f is not None and f.degree != pw.degree:
            raise InputError(f"degree mismatch: polynomial has {f.degree}, "
                             f"approximation has {pw.degree}")
    elif f is not None:
        pw = build_piecewise(f, cfg.m, cfg.c, cfg.threads)
    else:
        raise InputError("eval needs --pw or --in")
    zs = read_points(args.points)
    res = eval_many(pw, zs, cfg.threads, derivative=args.derivative)
    _write(args.out, "".join(f"{to_hex(r.value.re.mid)} {to_hex(r.value.im.mid)} "
                             f"{to_hex(r.radius())}\n" for r in res))
    return EXIT_OK


def cmd_roots(args) -> int:
    cfg = RootConfig(args.m, _c(args, ROOTS_C), args.threads, args.all, args.ceiling, args.refine)
    f = read_poly(args.inp)
    if all(f.is_zero_coeff(j) for j in range(f.degree + 1)):
        raise InputError("zero polynomial")
    t = time.perf_counter()
    if cfg.find_all:
        rep = isolate_all(f, cfg.m, cfg.ceiling, cfg.c, cfg.threads)
    else:
        rep = isolate(f, cfg.m, cfg.c, cfg.threads)
    disks = rep.disks
    if cfg.refine_bits:
        from .roots import effective_precision
        g, _ = f.normalize()
        pw = build_piecewise(g, max(rep.precision_used, cfg.refine_bits + 16), cfg.c, cfg.threads)
        disks = [newton_refine(pw, d, cfg.refine_bits) for d in disks]
    log.info("roots: %d disks, origin multiplicity %d, m=%d, complete=%s, %.3fs",
             len(disks), rep.origin_multiplicity, rep.precision_used, rep.complete,
             time.perf_counter() - t)
    _write(args.out, disk_lines(disks))
    return EXIT_OK if rep.complete else EXIT_INCOMPLETE


def bench_points(f: Poly, count: int, seed: int) -> list[BigComplex]:
    """Random points with log-uniform moduli over the root-modulus range of f."""
    from .poly import NewtonPolygon
    g, _ = f.normalize()
    slopes = [float(s) for s in NewtonPolygon(g).edge_slopes] if g.degree else [0.0]
    lo, hi = min(slopes) - 1, max(slopes) + 1
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for e, a in zip(rng.uniform(lo, hi, count), rng.uniform(0, 2 * math.pi, count)):
        ei = math.floor(e)
        z = 2.0 ** (e - ei) * complex(math.cos(a), math.sin(a))
        out.append(BigComplex.exact(BigFloat(z.real).shift(ei), BigFloat(z.imag).shift(ei)))
    return out


def run_bench(cfg: BenchConfig, writer) -> None:
    for v in cfg.values:
        fam = cfg.family.replace("-", "_")
        if cfg.sweep == "tau":
            spec = FamilySpec(fam, 1 if fam == "monomial_line" else 64, cfg.seed, param=v)
            if fam in ("hyperbolic", "elliptic", "flat"):
                spec = FamilySpec(fam, 64, cfg.seed, exp_lo=-v, exp_hi=v)
        else:
            spec = FamilySpec(fam, v, cfg.seed)
        f = gen(spec)
        # the tau column is the swept parameter itself in a tau sweep
        d, tau = f.degree, (v if cfg.sweep == "tau" else f.tau())
        for _ in range(cfg.repeat):
            c = cfg.c if cfg.c is not None else EVAL_C
            t = time.perf_counter()
            pw = build_piecewise(f, cfg.m, c, cfg.threads)
            dt = time.perf_counter() - t
            rows = [("pw comp", dt)]
            if cfg.eval_points:
                zs = bench_points(f, cfg.eval_points, cfg.seed)
                t = time.perf_counter()
                eval_many(pw, zs, cfg.threads)
                rows.append(("pw eval", time.perf_counter() - t))
            if cfg.roots:
                t = time.perf_counter()
                isolate(f, cfg.m, cfg.c if cfg.c is not None else ROOTS_C, cfg.threads)
                rows.append(("roots", time.perf_counter() - t))
            for phase, sec in rows:
                writer.writerow([cfg.family, d, tau, cfg.m, phase, f"{sec:.6f}",
                                 len(pw.partition), pw.sector_count])
                log.info("%s d=%d tau=%d %s %.3fs", cfg.family, d, tau, phase, sec)


def cmd_bench(args) -> int:
    if args.values:
        values = [int(x) for x in args.values.split(",")]
    elif args.sweep == "tau":
        values = [2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16]
    else:
        values = [64, 128, 256, 512, 1024]
    cfg = BenchConfig(args.family, args.sweep, values, args.m,
                      Fraction(args.c) if args.c is not None else None, args.seed,
                      args.points, args.roots, args.repeat, args.threads)
    fh = open(args.out, "w", newline="") if args.out and args.out != "-" else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "d", "tau", "m", "phase", "seconds", "peak_ring_count", "sector_count"])
        run_bench(cfg, w)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", type=int, default=argparse.SUPPRESS, help="precision in bits")
    common.add_argument("-c", default=argparse.SUPPRESS, help="ring width factor (fraction)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="pwpoly", parents=[common],
                                description="Piecewise approximation, evaluation and root isolation of polynomials.")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a test polynomial")
    g.add_argument("--family", required=True, choices=sorted(FAMILIES + ("monomial-line", "two-circle", "exp-taylor")))
    g.add_argument("-d", "--degree", type=int, default=10)
    g.add_argument("--param", type=int, default=None, help="n, tau or gap for structured families")
    g.add_argument("--out")

    a = sub.add_parser("approx", parents=[common], help="compute the piecewise approximation")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--out")
    a.add_argument("--rings-only", action="store_true")

    e = sub.add_parser("eval", parents=[common], help="evaluate at points")
    e.add_argument("--pw")
    e.add_argument("--in", dest="inp")
    e.add_argument("--points", required=True)
    e.add_argument("--out")
    e.add_argument("--derivative", action="store_true")

    r = sub.add_parser("roots", parents=[common], help="isolate roots")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out")
    r.add_argument("--all", action="store_true", help="double m until every root is isolated")
    r.add_argument("--ceiling", type=int, default=None)
    r.add_argument("--refine", type=int, default=None, metavar="BITS")

    b = sub.add_parser("bench", parents=[common], help="timing sweeps as CSV")
    b.add_argument("--sweep", choices=("d", "tau"), default="d")
    b.add_argument("--family", default="hyperbolic")
    b.add_argument("--values", help="comma separated d or tau values")
    b.add_argument("--points", type=int, default=200, help="evaluation points per polynomial")
    b.add_argument("--roots", action="store_true", help="also time root isolation")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--out")
    return p


DEFAULTS = {"m": 53, "c": None, "threads": 1, "seed": 0, "verbose": False}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.m < 4 or args.threads < 1:
        print("pwpoly: -m must be >= 4 and --threads >= 1", file=sys.stderr)
        return EXIT_INPUT
    if args.c is not None:
        try:
            if Fraction(args.c) <= 0:
                raise ValueError
        except (ValueError, ZeroDivisionError):
            print(f"pwpoly: bad ring factor {args.c!r}", file=sys.stderr)
            return EXIT_INPUT
    fn = {"gen": cmd_gen, "approx": cmd_approx, "eval": cmd_eval,
          "roots": cmd_roots, "bench": cmd_bench}[args.cmd]
    try:
        return fn(args)
    except InputError as exc:
        print(f"pwpoly: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ExponentOverflow, ArithmeticError) as exc:
        print(f"pwpoly: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
