"""Root isolation time against degree for random hyperbolic polynomials.

Prints a CSV row per degree and the least-squares exponent of time vs d.
"""

import argparse
import csv
import math
import sys
import time

import numpy as np

from pwpoly.generators import random_poly
from pwpoly.roots import isolate_at


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--degrees", default="1000,2000,4000")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "m", "seconds", "found", "rings", "sectors"])
    ds, ts = [], []
    for d in (int(x) for x in args.degrees.split(",")):
        f = random_poly("hyperbolic", d, args.seed)
        m = 60 + 2 * math.ceil(math.log2(d))
        t = time.perf_counter()
        rep = isolate_at(f, m, threads=args.threads)
        dt = time.perf_counter() - t
        w.writerow([d, m, f"{dt:.3f}", rep.count_found, rep.stats["rings"], rep.stats["sectors"]])
        sys.stdout.flush()
        ds.append(d)
        ts.append(dt)
    if len(ds) > 1:
        slope = np.polyfit(np.log(ds), np.log(ts), 1)[0]
        print(f"# exponent {slope:.2f}", file=sys.stderr)


if __name__ == "__main__":
    main()
