"""Grid-then-refine search over (eta, r) for the smallest a or alpha(T0)."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bound_constants import (
    BoundConstants,
    BoundParams,
    InfeasibleParams,
    alpha_for,
    constants_abc,
    r_lower,
    r_upper,
)

FEASIBILITY_MARGIN = 1e-3

# T0, alpha, eta, r as printed
ALPHA_TABLE = (
    (1e6, 0.260, 0.28, 2.28),
    (1e7, 0.246, 0.24, 2.35),
    (1e8, 0.235, 0.22, 2.38),
    (1e9, 0.226, 0.19, 2.44),
    (1e10, 0.218, 0.17, 2.49),
    (1e11, 0.212, 0.16, 2.51),
    (1e12, 0.206, 0.15, 2.53),
    (1e13, 0.202, 0.14, 2.51),
    (1e14, 0.197, 0.13, 2.50),
    (1e15, 0.193, 0.12, 2.48),
)
TABLE2_ALPHA_HEADROOM = 0.0005
TABLE2_SEARCH_HEADROOM = 0.001


class Objective(str, enum.Enum):
    MIN_A = "a"
    MIN_ALPHA = "alpha"


class EmptyFeasibleSet(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    eta_range: tuple[float, float] = (0.01, 0.5)
    r_range: tuple[float, float] = (1.0, 4.0)
    coarse_grid: tuple[int, int] = (64, 64)
    refine_rounds: int = 6
    refine_shrink: float = 0.35
    refine_grid: int = 9
    objective: Objective = Objective.MIN_ALPHA
    workers: int = 1

    def __post_init__(self):
        lo, hi = self.eta_range
        if not 0 < lo <= hi <= 0.5:
            raise ValueError(f"eta_range {self.eta_range} must lie in (0, 1/2]")
        if not self.r_range[0] <= self.r_range[1]:
            raise ValueError(f"empty r_range {self.r_range}")
        if min(self.coarse_grid) < 8:
            raise ValueError("coarse_grid must be at least 8x8")
        if not 0 < self.refine_shrink < 1:
            raise ValueError("refine_shrink must lie in (0, 1)")
        if self.refine_rounds < 0 or self.refine_grid < 3:
            raise ValueError("bad refinement settings")
        object.__setattr__(self, "objective", Objective(self.objective))


@dataclass(frozen=True)
class OptResult:
    eta_star: float
    r_star: float
    constants: BoundConstants
    objective_value: float
    evaluations: int
    T0: float = field(default=0.0)
    objective: Objective = Objective.MIN_ALPHA


def feasible(eta: float, r: float) -> bool:
    try:
        BoundParams(eta, r)
    except InfeasibleParams:
        return False
    return True


def _r_window(eta: float, cfg: SearchConfig) -> tuple[float, float] | None:
    lo = max(cfg.r_range[0], r_lower(eta) + FEASIBILITY_MARGIN)
    hi = min(cfg.r_range[1], r_upper(eta) - FEASIBILITY_MARGIN)
    return (lo, hi) if lo <= hi else None


def objective_at(eta: float, r: float, T0: float, objective: Objective) -> tuple[float, BoundConstants]:
    bc = constants_abc(BoundParams(eta, r, T0))
    if Objective(objective) is Objective.MIN_A:
        return bc.a, bc
    return alpha_for(bc, T0), bc


class _Search:
    """Holds the incumbent; points are (eta, u) with r = lo + u (hi - lo)."""

    def __init__(self, T0: float, cfg: SearchConfig):
        self.T0 = T0
        self.cfg = cfg
        self.evaluations = 0
        self.best: tuple | None = None  # (value, r, eta, bc)

    def _point(self, eta: float, u: float):
        win = _r_window(eta, self.cfg)
        if win is None:
            return None
        lo, hi = win
        return eta, lo + u * (hi - lo)

    def _evaluate(self, pt):
        eta, r = pt
        value, bc = objective_at(eta, r, self.T0, self.cfg.objective)
        return value, r, eta, bc

    def run_batch(self, etas, us) -> None:
        pts = [pt for eta in etas for u in us if (pt := self._point(float(eta), float(u))) is not None]
        if self.cfg.workers > 1:
            with ThreadPoolExecutor(self.cfg.workers) as pool:
                results = list(pool.map(self._evaluate, pts))
        else:
            results = [self._evaluate(pt) for pt in pts]
        self.evaluations += len(results)
        # order-independent reduction: lowest value, then smaller r, then smaller eta
        for res in results:
            if self.best is None or res[:3] < self.best[:3]:
                self.best = res


def search(T0: float, cfg: SearchConfig | None = None) -> OptResult:
    cfg = cfg or SearchConfig()
    if cfg.objective is Objective.MIN_ALPHA and T0 < math.exp(math.e):
        raise ValueError(f"alpha objective needs T0 >= e^e, got {T0}")
    if T0 < 1e6:
        raise ValueError(f"T0={T0} below 1e6: the absorbed slacks are not valid")
    s = _Search(T0, cfg)
    n_eta, n_u = cfg.coarse_grid
    e_lo, e_hi = cfg.eta_range
    etas = np.linspace(e_lo, e_hi, n_eta)
    s.run_batch(etas, np.linspace(0.0, 1.0, n_u))
    if s.best is None:
        raise EmptyFeasibleSet(f"no feasible (eta, r) in eta_range={cfg.eta_range}, r_range={cfg.r_range}")

    half_eta = (e_hi - e_lo) / max(n_eta - 1, 1)
    half_u = 1.0 / max(n_u - 1, 1)
    k = cfg.refine_grid
    for _ in range(cfg.refine_rounds):
        _, r_b, eta_b, _ = s.best
        win = _r_window(eta_b, cfg)
        u_b = 0.0 if win[1] == win[0] else (r_b - win[0]) / (win[1] - win[0])
        etas = np.clip(np.linspace(eta_b - half_eta, eta_b + half_eta, k), e_lo, e_hi)
        us = np.clip(np.linspace(u_b - half_u, u_b + half_u, k), 0.0, 1.0)
        s.run_batch(np.unique(etas), np.unique(us))
        half_eta *= cfg.refine_shrink
        half_u *= cfg.refine_shrink

    value, r_b, eta_b, bc = s.best
    return OptResult(eta_b, r_b, bc, value, s.evaluations, T0, cfg.objective)


@dataclass(frozen=True)
class Table2Row:
    T0: float
    alpha: float
    eta: float
    r: float
    printed_alpha: float
    printed_eta: float
    printed_r: float
    alpha_at_printed: float

    @property
    def passed(self) -> bool:
        return (self.alpha <= self.printed_alpha + TABLE2_SEARCH_HEADROOM
                and self.alpha_at_printed <= self.printed_alpha + TABLE2_ALPHA_HEADROOM)


def table2(cfg: SearchConfig | None = None) -> list[Table2Row]:
    cfg = cfg or SearchConfig()
    if cfg.objective is not Objective.MIN_ALPHA:
        raise ValueError("table2 uses the alpha objective")
    rows = []
    for T0, alpha, eta, r in ALPHA_TABLE:
        res = search(T0, cfg)
        at_printed, _ = objective_at(eta, r, T0, Objective.MIN_ALPHA)
        rows.append(Table2Row(T0, res.objective_value, res.eta_star, res.r_star,
                              alpha, eta, r, at_printed))
    return rows
