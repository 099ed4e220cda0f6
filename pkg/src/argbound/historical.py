"""Historical explicit bounds |S(T)| <= a log T + b log log T + c for T >= T0."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .bound_constants import BoundConstants, bound_S


@dataclass(frozen=True)
class HistoricalBound:
    author: str
    year: int
    a: float
    b: float
    c: float
    T0: float

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0 or self.T0 < 0:
            raise ValueError(f"malformed historical bound {self}")

    @property
    def constants(self) -> BoundConstants:
        return BoundConstants(self.a, self.b, self.c)


HISTORICAL = (
    HistoricalBound("von Mangoldt", 1905, 0.432, 1.917, 12.204, 28.588),
    HistoricalBound("Grossmann", 1913, 0.291, 1.787, 6.137, 50.0),
    HistoricalBound("Backlund", 1914, 0.275, 0.979, 7.446, 200.0),
    HistoricalBound("Backlund", 1918, 0.137, 0.443, 4.35, 200.0),
    HistoricalBound("Rosser", 1941, 0.137, 0.443, 1.588, 1467.0),
    HistoricalBound("earlier bound", 2012, 0.17, 0.0, 1.998, math.e),
    HistoricalBound("current bound", 2012, 0.111, 0.275, 2.450, math.e),
)


def crossover(first: BoundConstants, second: BoundConstants,
              lo: float = math.e, hi: float = 1e300) -> float | None:
    """Height T where ``first`` becomes sharper than ``second`` (None if no sign change)."""
    def diff(x):
        return bound_S(math.exp(x), first) - bound_S(math.exp(x), second)

    start = math.log(lo)
    xs = [start] + [float(k) for k in range(2, int(math.log(hi)) + 1, 2) if k > start]
    for x0, x1 in zip(xs[:-1], xs[1:]):
        if diff(x0) > 0 >= diff(x1):
            return math.exp(brentq(diff, x0, x1, xtol=1e-14))
    return None
