"""Root isolation time for 2^tau - 2^-tau z as tau grows; writes CSV to stdout."""

import argparse
import csv
import sys
import time

from pwpoly.generators import monomial_line
from pwpoly.roots import isolate


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--taus", default="1024,4096,16384,65536")
    p.add_argument("-m", type=int, default=53)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["tau", "m", "seconds", "log2_rel_radius"])
    for tau in (int(x) for x in args.taus.split(",")):
        f = monomial_line(tau)
        best = float("inf")
        for _ in range(args.repeat):
            t = time.perf_counter()
            rep = isolate(f, args.m)
            best = min(best, time.perf_counter() - t)
        d = rep.disks[0]
        rel = d.radius.log2_float() - d.log2_abs()
        w.writerow([tau, args.m, f"{best:.6f}", f"{rel:.1f}"])


if __name__ == "__main__":
    main()
