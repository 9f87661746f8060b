"""Piecewise approximation, evaluation and root isolation of dense polynomials.

A polynomial is replaced on each annulus of a ring partition by a few
low-degree polynomials, one per covering disk.  Evaluation then costs a
lookup plus a short Horner loop, and root isolation runs on the pieces.
"""

from .bigfloat import Ball, BigComplex, BigFloat
from .config import ApproxConfig, BenchConfig, RootConfig
from .evaluate import EvalResult, eval_derivative, eval_many, eval_one
from .generators import FamilySpec, gen
from .poly import NewtonPolygon, Poly, hat_f
from .rings import Ring, RingPartition, compute_rings
from .roots import IsolatingDisk, RootReport, isolate, isolate_all, newton_refine
from .sectors import PiecewiseApprox, SectorApprox, build_piecewise, read_piecewise, write_piecewise

__all__ = [
    "Ball", "BigComplex", "BigFloat", "ApproxConfig", "BenchConfig", "RootConfig",
    "EvalResult", "eval_derivative", "eval_many", "eval_one", "FamilySpec", "gen",
    "NewtonPolygon", "Poly", "hat_f", "Ring", "RingPartition", "compute_rings",
    "IsolatingDisk", "RootReport", "isolate", "isolate_all", "newton_refine",
    "PiecewiseApprox", "SectorApprox", "build_piecewise", "read_piecewise", "write_piecewise",
]
