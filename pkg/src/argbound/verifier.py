"""Desk-scale zero counting and empirical checks of the S(T) and N(T) bounds.

Zeros on the critical line are located as sign changes of Hardy's Z(t),
sampled on a grid and refined by vectorised bisection.  With N(T) the number
of located ordinates in (0, T]::

    S(T) = N(T) - theta(T)/pi - 1
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bound_constants import RVM_SLACK, BoundConstants, bound_S
from .zeta_engine import ZetaEvalConfig, hardy_z_array, rs_theta

log = logging.getLogger(__name__)

STEP_INIT = 0.05
ROOT_XTOL = 1e-9
DEDUP_TOL = 1e-6
JUMP_TOL = 1e-6
MAIN_TERM_WINDOW = 2.5
GAP_FACTOR = 4.0
MAX_HALVINGS = 6
CHUNK_WIDTH = 100.0
ZOOM_ROUNDS = 12
ZOOM_POINTS = 9


class IncompleteScanWarning(UserWarning):
    pass


class JumpAmbiguityError(ValueError):
    """T sits on (or within 1e-6 of) a zero ordinate, where S(T) jumps."""


@dataclass
class ZeroScan:
    t_max: float
    step_init: float
    zeros: np.ndarray
    complete_flag: bool
    issues: list[str] = field(default_factory=list)

    def count(self, T: float) -> int:
        return int(np.searchsorted(self.zeros, T, side="right"))


@dataclass(frozen=True)
class EmpiricalRecord:
    T: float
    N_T: int
    S_T: float
    bound_value: float
    margin: float


def n_main_term(T: float) -> float:
    if T <= 0:
        raise ValueError("n_main_term needs T > 0")
    return T / (2 * math.pi) * math.log(T / (2 * math.pi * math.e)) + 7 / 8


def mean_gap(t: float) -> float:
    """Average spacing of ordinates near height t (floored for small t)."""
    return 2 * math.pi / max(math.log(t / (2 * math.pi)), 0.5)


def _bisect(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, tol: float) -> np.ndarray:
    lo, hi, zlo = lo.copy(), hi.copy(), zlo.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        zm = hardy_z_array(mid, tol)
        same = np.sign(zm) == np.sign(zlo)
        lo = np.where(same, mid, lo)
        zlo = np.where(same, zm, zlo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _hidden_pairs(ts: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """Zoom into local minima of |Z| without a sign change, where two close
    zeros can hide between consecutive samples."""
    a = np.abs(z)
    sign = np.sign(z)
    mid = np.nonzero((a[1:-1] < a[:-2]) & (a[1:-1] < a[2:])
                     & (sign[:-2] == sign[1:-1]) & (sign[2:] == sign[1:-1]))[0] + 1
    lo, hi, s0 = ts[mid - 1], ts[mid + 1], sign[mid]
    found = []
    for _ in range(ZOOM_ROUNDS):
        if lo.size == 0:
            break
        pts = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, ZOOM_POINTS)[None, :]
        zp = hardy_z_array(pts, tol)
        flipped = np.any(np.sign(zp) != s0[:, None], axis=1)
        for row in np.nonzero(flipped)[0]:
            zr = zp[row]
            k = np.nonzero(np.sign(zr[:-1]) * np.sign(zr[1:]) <= 0)[0]
            found.append(_bisect(pts[row, k], pts[row, k + 1], zr[k], ROOT_XTOL))
        j = np.argmin(np.abs(zp), axis=1)
        j = np.clip(j, 1, ZOOM_POINTS - 2)
        rows = np.arange(pts.shape[0])
        keep = ~flipped & (pts[rows, j + 1] - pts[rows, j - 1] > ROOT_XTOL)
        lo, hi, s0 = pts[rows, j - 1][keep], pts[rows, j + 1][keep], s0[keep]
    return np.concatenate(found) if found else np.empty(0)


def _roots_on_grid(ts: np.ndarray, tol: float) -> np.ndarray:
    z = hardy_z_array(ts, tol)
    idx = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
    exact = ts[:-1][z[:-1] == 0.0]
    roots = _bisect(ts[idx], ts[idx + 1], z[idx], ROOT_XTOL)
    return np.concatenate([roots, exact, _hidden_pairs(ts, z, tol)])


def _scan_interval(lo: float, hi: float, step: float, tol: float) -> np.ndarray:
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    return _roots_on_grid(np.linspace(lo, hi, n), tol)


def _dedup(values: np.ndarray) -> np.ndarray:
    values = np.sort(values)
    if values.size == 0:
        return values
    keep = np.concatenate([[True], np.diff(values) > DEDUP_TOL])
    return values[keep]


def scan_zeros(t_max: float, cfg: ZetaEvalConfig | None = None, step_init: float = STEP_INIT,
               workers: int = 1) -> ZeroScan:
    """Locate the critical-line zeros of zeta with ordinate in (0, t_max]."""
    cfg = cfg or ZetaEvalConfig()
    if t_max > cfg.max_height:
        raise ValueError(f"t_max={t_max} exceeds max_height={cfg.max_height}")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    tol = cfg.target_tolerance

    chunks = []
    lo = step_init
    while lo < t_max:
        hi = min(t_max, lo + CHUNK_WIDTH)
        overlap = 2 * mean_gap(hi)
        chunks.append((max(step_init, lo - overlap), hi))
        lo = hi
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _scan_interval(c[0], c[1], step_init, tol), chunks))
    else:
        parts = [_scan_interval(a, b, step_init, tol) for a, b in chunks]
    zeros = _dedup(np.concatenate(parts) if parts else np.empty(0))

    # refine locally wherever a gap looks too wide for the local density
    step = step_init
    for _ in range(MAX_HALVINGS):
        edges = np.concatenate([[0.0], zeros, [t_max]])
        wide = [(a, b) for a, b in zip(edges[:-1], edges[1:])
                if b - a > GAP_FACTOR * mean_gap(max(b, 2 * math.pi * math.e))]
        if not wide:
            break
        step /= 2
        found = [_scan_interval(max(a, step_init), b, step, tol) for a, b in wide]
        zeros = _dedup(np.concatenate([zeros, *found]))

    zeros = np.round(zeros, 12)
    issues = _completeness_issues(zeros, t_max)
    for msg in issues:
        log.warning("zero scan: %s", msg)
    return ZeroScan(t_max, step_init, zeros, not issues, issues)


def _completeness_issues(zeros: np.ndarray, t_max: float) -> list[str]:
    issues = []
    probes = list(0.5 * (zeros[:-1] + zeros[1:])) + [t_max]
    for T in probes:
        if T < 1:
            continue
        n = int(np.searchsorted(zeros, T, side="right"))
        dev = n - n_main_term(T)
        if abs(dev) >= MAIN_TERM_WINDOW:
            issues.append(f"count {n} at T={T:.6f} deviates from main term by {dev:+.3f}")
    return issues


def s_of(T: float, scan: ZeroScan) -> float:
    if T > scan.t_max or T <= 0:
        raise ValueError(f"T={T} outside (0, {scan.t_max}]")
    if scan.zeros.size:
        nearest = np.min(np.abs(scan.zeros - T))
        if nearest < JUMP_TOL:
            raise JumpAmbiguityError(f"T={T} is within {nearest:.2e} of a zero ordinate")
    if not scan.complete_flag:
        warnings.warn("S(T) computed from an incomplete zero scan", IncompleteScanWarning, stacklevel=2)
    return scan.count(T) - rs_theta(T) / math.pi - 1


def s_one_sided(scan: ZeroScan, T_hi: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """S just before and just after each zero up to T_hi: the local extremes of S."""
    T_hi = scan.t_max if T_hi is None else T_hi
    gam = scan.zeros[scan.zeros <= T_hi]
    th = rs_theta(gam) / math.pi if gam.size else np.empty(0)
    k = np.arange(1, gam.size + 1)
    return k - 1 - th - 1, k - th - 1


def max_abs_s(scan: ZeroScan, T_hi: float, grid_points: int = 2000) -> float:
    """sup |S(T)| over (0, T_hi]: one-sided limits at zeros, plus a grid and the endpoint."""
    below, above = s_one_sided(scan, T_hi)
    grid = _avoid_jumps(np.linspace(T_hi / grid_points, T_hi, grid_points), scan)
    Sg = np.array([scan.count(T) for T in grid]) - rs_theta(grid) / math.pi - 1
    vals = np.concatenate([np.abs(below), np.abs(above), np.abs(Sg)])
    return float(vals.max())


def _avoid_jumps(grid: np.ndarray, scan: ZeroScan) -> np.ndarray:
    """Move grid points that collide with a zero to the midpoint of their gap."""
    z = scan.zeros
    out = grid.copy()
    for i, T in enumerate(grid):
        if z.size == 0:
            break
        j = int(np.argmin(np.abs(z - T)))
        if abs(z[j] - T) >= JUMP_TOL:
            continue
        if j + 1 < z.size and z[j + 1] <= scan.t_max:
            out[i] = 0.5 * (z[j] + z[j + 1])
        else:
            out[i] = 0.5 * ((z[j - 1] if j > 0 else 0.0) + z[j])
    return out


def verify_bounds(T_grid, bc: BoundConstants, scan: ZeroScan) -> list[EmpiricalRecord]:
    T_grid = np.asarray(T_grid, dtype=float)
    if np.any(T_grid < math.e) or np.any(T_grid > scan.t_max):
        raise ValueError(f"T_grid must lie in [e, {scan.t_max}]")
    grid = _avoid_jumps(T_grid, scan)
    counts = np.searchsorted(scan.zeros, grid, side="right")
    S = counts - rs_theta(grid) / math.pi - 1
    records = []
    for T, n, s in zip(grid, counts, S):
        bv = bound_S(float(T), bc)
        records.append(EmpiricalRecord(float(T), int(n), float(s), bv, bv - abs(float(s))))
    return records


def counting_bound_holds(records: list[EmpiricalRecord], bc: BoundConstants, T0: float = math.e) -> bool:
    """|N(T) - main term| <= bound_S(T) + 0.2/T0 at every record."""
    return all(abs(rec.N_T - n_main_term(rec.T)) <= bound_S(rec.T, bc) + RVM_SLACK / T0
               for rec in records)


def write_zero_cache(path, scan: ZeroScan, config_hash: str) -> None:
    lines = [f"# t_max={scan.t_max!r} step_init={scan.step_init!r} config_hash={config_hash}"]
    lines += [f"{z:.12f}" for z in scan.zeros]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_zero_cache(path, t_max: float, config_hash: str) -> ZeroScan | None:
    """Return the cached scan if it covers t_max under the same config, else None."""
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            body = fh.read().split()
    except FileNotFoundError:
        return None
    if not header.startswith("#"):
        return None
    meta = dict(item.split("=", 1) for item in header[1:].split())
    if meta.get("config_hash") != config_hash:
        return None
    cached_max = float(meta["t_max"])
    if cached_max < t_max:
        return None
    zeros = np.array([float(x) for x in body])
    zeros = zeros[zeros <= t_max]
    issues = _completeness_issues(zeros, t_max)
    return ZeroScan(t_max, float(meta["step_init"]), zeros, not issues, issues)
