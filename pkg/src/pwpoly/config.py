"""Run configurations shared by the library entry points, the CLI and the scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

LIBRARY_C = Fraction(1)
EVAL_C = Fraction(7, 2)
ROOTS_C = Fraction(2, 5)


@dataclass
class ApproxConfig:
    m: int = 53
    c: Fraction = EVAL_C
    threads: int = 1


@dataclass
class RootConfig:
    """``m`` bounds log2 of the condition number of the roots to isolate."""

    m: int = 53
    c: Fraction = ROOTS_C
    threads: int = 1
    find_all: bool = False
    ceiling: Optional[int] = None
    refine_bits: Optional[int] = None


@dataclass
class BenchConfig:
    family: str = "hyperbolic"
    sweep: str = "d"
    values: list = field(default_factory=lambda: [64, 128, 256, 512])
    m: int = 53
    c: Optional[Fraction] = None
    seed: int = 0
    eval_points: int = 200
    roots: bool = False
    repeat: int = 1
    threads: int = 1
