"""Explicit constants in |S(T)| <= a log T + b log log T + c.

Everything here is float64.  Zeta values come from the vectorised
Euler-Maclaurin path of :mod:`argbound.zeta_engine`, which is accurate to a few
units in the last place for real arguments > 1.

The contour integral J over the Jensen circle (centre 1 + eta, radius
r(1/2 + eta)) is split by abscissa into five arcs R0..R4.  On each arc the
bound for log|a(s)|/N is affine in log T and log log T, so every arc reduces to
a :class:`RegionContribution` triple plus an absorbed slack term.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .quadrature import gauss_legendre_adaptive
from .zeta_engine import ComplexPoint, zeta_real_array

PI = math.pi
LOG_2PI = math.log(2 * PI)
SQRT2 = math.sqrt(2.0)

LOG_SLACK = 1e-5
LOGLOG_SHIFT = 0.007
LOG_FACTOR = 1.007
CLOSED_FORM_PAD = 0.003
RVM_SLACK = 0.2      # coefficient of 1/T in the N(T) error terms
ARG_SLACK = 0.8      # coefficient of 1/T in the S(T) assembly
G_CERT = 4.4
EPS0_CERT = 3.0

# critical-line growth |zeta(1/2+it)| <= k1 t^k2 (log t)^k3
K1, K2, K3 = 2.38, 1.0 / 6.0, 1.0
Q0_DEFAULT = 2.0

CGT3 = (1.457, 40.995, 1.863, 123.125)
LEHMAN_COEFF = 4.0 / (2 * PI) ** 0.25


class InfeasibleParams(ValueError):
    """Parameters outside the region where the region bounds are defined."""


def r_lower(eta: float) -> float:
    """Smallest admissible r: below it q = 1 + eta - r(1/2 + eta) is not negative."""
    return (1 + eta) / (0.5 + eta)


def r_upper(eta: float) -> float:
    """Largest admissible r, from r(1/2 + eta) <= 3/2 + eta."""
    return (1.5 + eta) / (0.5 + eta)


@dataclass(frozen=True)
class BoundParams:
    eta: float
    r: float
    T0: float = 6.8e6
    k1: float = K1
    k2: float = K2
    k3: float = K3
    Q0: float = Q0_DEFAULT

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise InfeasibleParams("; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not 0 < self.eta <= 0.5:
            out.append(f"eta={self.eta} must satisfy 0 < eta <= 1/2")
            return out
        lo, hi = r_lower(self.eta), r_upper(self.eta)
        if not self.r > lo:
            out.append(f"r={self.r} must exceed the lower bound (1+eta)/(1/2+eta)={lo:.6f}")
        if self.r * (0.5 + self.eta) > 1.5 + self.eta + 1e-12:
            out.append(f"r={self.r} exceeds the upper bound (3/2+eta)/(1/2+eta)={hi:.6f}")
        if not 0 <= self.k2 <= 0.25:
            out.append(f"k2={self.k2} must lie in [0, 1/4]")
        if not 0 <= self.k3 <= 10:
            out.append(f"k3={self.k3} must lie in [0, 10]")
        if not self.k1 > 0:
            out.append(f"k1={self.k1} must be positive")
        if not 2 <= self.Q0 <= 1000:
            out.append(f"Q0={self.Q0} must lie in [2, 1000]")
        if not self.T0 >= 1:
            out.append(f"T0={self.T0} must be >= 1")
        return out

    @property
    def sigma1(self) -> float:
        return 0.5 + SQRT2 * (self.eta + 0.5)

    @property
    def jensen_radius(self) -> float:
        return self.r * (0.5 + self.eta)

    @property
    def q(self) -> float:
        return 1 + self.eta - self.jensen_radius


@dataclass(frozen=True)
class Angles:
    phi1: float
    phi2: float
    phi3: float


@dataclass(frozen=True)
class RegionContribution:
    region_id: int
    coef_logT: float
    coef_loglogT: float
    constant: float
    epsilon_slack: float

    def value(self, T: float) -> float:
        """Upper bound for this arc's integral divided by N, at height T."""
        return (self.coef_logT * math.log(T) + self.coef_loglogT * math.log(math.log(T))
                + self.constant + self.epsilon_slack)


@dataclass(frozen=True)
class BoundConstants:
    a: float
    b: float
    c: float

    def as_dict(self) -> dict:
        return asdict(self)


MAIN_BOUND = BoundConstants(0.111, 0.275, 2.450)
ROSSER = BoundConstants(0.137, 0.443, 1.588)


def angles(p: BoundParams) -> Angles:
    R = p.jensen_radius
    args = (p.eta / R, 1 / p.r, (1 + p.eta) / R)
    if not all(0 <= x <= 1 for x in args):
        raise InfeasibleParams(f"arcsine argument out of [0,1]: {args}")
    return Angles(*(math.asin(x) for x in args))


def g_of(delta: float, T: float) -> float:
    """Upper bound for |Delta_+ arg a + Delta_- arg a| with theta at its worst case."""
    if delta <= 0 or T <= 0:
        raise ValueError("g_of needs delta > 0 and T > 0")
    x = (2 * delta**2 * (T**2 - 0.25) + delta**4) / (T**2 + 0.25) ** 2
    return ((-1.25 + delta / 2) * math.atan((0.5 + delta) / T)
            - (1.25 + delta / 2) * math.atan((0.5 - delta) / T)
            + 1.25 * math.atan(1 / (2 * T))
            - T / 4 * math.log1p(x)
            + 4 / (3 * T))


def eps0(p: BoundParams) -> float:
    R = p.jensen_radius
    return R / p.T0 + (p.eta + R) ** 2 / (2 * p.T0) / p.T0


@dataclass(frozen=True)
class LogAdjustments:
    slack_log: float
    log_factor: float
    loglog_shift: float


def log_factor_needed(T0: float, slack: float) -> float:
    """Worst ratio |log(Q0+s)| / log T given |log|Q0+s| - log T| <= slack and |arg| <= pi/2."""
    lt = math.log(T0)
    return (1 + slack / lt) * math.sqrt(1 + (PI / 2 / (lt - slack)) ** 2)


def log_adjustments(Q0: float, T0: float) -> LogAdjustments:
    if not 1 <= Q0 <= 1000:
        raise ValueError(f"Q0={Q0} must lie in [1, 1000]")
    slack = 6 / T0
    if slack > LOG_SLACK:
        raise ValueError(f"6/T0 = {slack:.3e} exceeds {LOG_SLACK:g}; need T0 >= 6e5")
    if log_factor_needed(T0, slack) > LOG_FACTOR or math.log(LOG_FACTOR) > LOGLOG_SHIFT:
        raise ValueError(f"log adjustment {LOG_FACTOR} insufficient at T0={T0}")
    return LogAdjustments(slack, LOG_FACTOR, LOGLOG_SHIFT)


# -- Phragmen-Lindelof interpolation -----------------------------------------

@dataclass(frozen=True)
class ConvexityBoundary:
    a_line: float
    b_line: float
    Q: float
    A: float
    alpha1: float
    alpha2: float
    B: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if not self.b_line > self.a_line:
            raise ValueError("need a_line < b_line")
        if not self.Q + self.a_line > 1:
            raise ValueError(f"need Q + a > 1, got {self.Q + self.a_line}")
        if self.alpha1 < self.beta1:
            raise ValueError("need alpha1 >= beta1")
        if min(self.alpha1, self.alpha2, self.beta1, self.beta2) < 0:
            raise ValueError("exponents must be non-negative")
        if self.A <= 0 or self.B <= 0:
            raise ValueError("A and B must be positive")


def log_modulus(z):
    """|log z| through |log z| = |log|z|| (1 + (arg z / log|z|)^2)^(1/2)."""
    z = np.asarray(z, dtype=complex)
    return np.hypot(np.log(np.abs(z)), np.angle(z))


def convexity_interp(bd: ConvexityBoundary, s):
    """Interpolated bound for |f(s)| inside the strip a_line <= sigma <= b_line.

    ``s`` may be a :class:`ComplexPoint`, a complex number or an array.
    """
    if isinstance(s, ComplexPoint):
        s = s.s
    s = np.asarray(s, dtype=complex)
    sigma = s.real
    width = bd.b_line - bd.a_line
    if np.any(sigma < bd.a_line - 1e-12) or np.any(sigma > bd.b_line + 1e-12):
        raise ValueError(f"sigma outside [{bd.a_line}, {bd.b_line}]")
    z = bd.Q + s
    lmod = np.log(np.abs(z))
    llog = np.log(log_modulus(z))
    left = math.log(bd.A) + bd.alpha1 * lmod + bd.alpha2 * llog
    right = math.log(bd.B) + bd.beta1 * lmod + bd.beta2 * llog
    w = (sigma - bd.a_line) / width
    out = np.exp((1 - w) * left + w * right)
    return float(out) if out.ndim == 0 else out


def boundary_value(bd: ConvexityBoundary, side: str, t):
    """Right side of the growth hypothesis on one edge, with log|Q+s| (not |log(Q+s)|)."""
    if side == "left":
        sigma, C, e1, e2 = bd.a_line, bd.A, bd.alpha1, bd.alpha2
    elif side == "right":
        sigma, C, e1, e2 = bd.b_line, bd.B, bd.beta1, bd.beta2
    else:
        raise ValueError("side must be 'left' or 'right'")
    mod = np.abs(bd.Q + sigma + 1j * np.asarray(t, dtype=float))
    return C * mod**e1 * np.log(mod) ** e2


def strip_setups(p: BoundParams) -> dict[int, ConvexityBoundary]:
    """The four strips used on arcs R1..R4."""
    eta, Q = p.eta, p.Q0
    q = p.q
    z1e, z1q = zeta_real_array([1 + eta, 1 - q])
    inv_sqrt = (2 * PI) ** -0.5
    return {
        1: ConvexityBoundary(1.0, 1 + eta, Q, 1.0, 1.0, 1.0, float(z1e), 1.0, 0.0),
        2: ConvexityBoundary(0.5, 1.0, Q, p.k1, 1 + p.k2, p.k3, 1.0, 1.0, 1.0),
        3: ConvexityBoundary(0.0, 0.5, Q, inv_sqrt, 1.5, 1.0, p.k1, 1 + p.k2, p.k3),
        4: ConvexityBoundary(q, 0.0, Q, (2 * PI) ** (q - 0.5) * float(z1q), 1.5 - q, 0.0,
                             inv_sqrt, 1.5, 1.0),
    }


# -- arcs R0..R4 -------------------------------------------------------------

@lru_cache(maxsize=4096)
def r0_integral(eta: float, r: float, tol: float = 1e-10) -> float:
    """Integral of log zeta(1 + eta + r(1/2+eta) cos phi) over [-pi/2, pi/2]."""
    R = r * (0.5 + eta)
    res = gauss_legendre_adaptive(lambda phi: np.log(zeta_real_array(1 + eta + R * np.cos(phi))),
                                  -PI / 2, PI / 2, tol=tol)
    return res.value


def _zetas(p: BoundParams) -> dict[str, float]:
    R = p.jensen_radius
    vals = zeta_real_array([1 + p.eta, 2 + 2 * p.eta, p.sigma1, R - p.eta])
    return dict(zip(("one_eta", "two_eta", "sigma1", "r_minus_eta"), map(float, vals)))


def region_contribution(region_id: int, p: BoundParams, quad_tol: float = 1e-10) -> RegionContribution:
    eta, r, R = p.eta, p.r, p.jensen_radius
    k1, k2, k3 = p.k1, p.k2, p.k3
    h = 0.5 + eta
    ang = angles(p)
    p1, p2, p3 = ang.phi1, ang.phi2, ang.phi3
    c1, c2, c3 = math.cos(p1), math.cos(p2), math.cos(p3)
    lk1 = math.log(k1)

    if region_id == 0:
        return RegionContribution(0, PI, 0.0, r0_integral(eta, r, quad_tol), PI * eps0(p))

    if region_id == 1:
        z = _zetas(p)
        w = R * (1 - c1) / eta
        logT = p1
        loglog = w
        const = math.log(z["one_eta"]) * (p1 - w)
    elif region_id == 2:
        d = p2 - p1
        logT = 2 * k2 * R * (c1 - c2) + d * (1 - 2 * k2 * eta)
        loglog = 2 * (R * (1 - k3) * (c2 - c1) + d * (h - k3 * eta))
        const = 2 * lk1 * (R * (c1 - c2) - eta * d)
    elif region_id == 3:
        d = p3 - p2
        logT = R * (1 - 2 * k2) * (c2 - c3) + d * (2 * k2 * (1 + eta) + 0.5 - eta)
        loglog = 2 * ((k3 - 1) * R * (c3 - c2) + d * (k3 * (1 + eta) - h))
        const = (LOG_2PI * (h * d - R * (c2 - c3))
                 + 2 * lk1 * ((1 + eta) * d - R * (c2 - c3)))
    elif region_id == 4:
        z = _zetas(p)
        d = PI / 2 - p3
        # integrating the exponent 3/2 - sigma over the arc gives R cos(phi3), not R
        logT = (0.5 - eta) * d + R * c3
        loglog = R * (d - c3) / (R - (1 + eta))
        const = (LOG_2PI * (h * d - R * c3)
                 + math.log(z["r_minus_eta"]) * (R * c3 - d * (1 + eta)) / (R - (1 + eta)))
    else:
        raise ValueError(f"region_id must be 0..4, got {region_id}")
    return RegionContribution(region_id, logT, loglog, const, LOG_SLACK * logT + LOGLOG_SHIFT * loglog)


def all_regions(p: BoundParams, quad_tol: float = 1e-10) -> list[RegionContribution]:
    return [region_contribution(i, p, quad_tol) for i in range(5)]


def constants_abc(p: BoundParams, quad_tol: float = 1e-10) -> BoundConstants:
    """Closed-form a, b, c (the region sums folded by hand, plus 0.003 of slack)."""
    if p.T0 < 1e6:
        raise ValueError(f"T0={p.T0} below 1e6: absorbed slacks are not valid")
    eta, r, R = p.eta, p.r, p.jensen_radius
    h = 0.5 + eta
    ang = angles(p)
    p1, p2, p3 = ang.phi1, ang.phi2, ang.phi3
    c1, c2, c3 = math.cos(p1), math.cos(p2), math.cos(p3)
    lr = math.log(r)
    z = _zetas(p)

    a = (p1 * eta + (p2 - 1.5 * PI) * h + p3 * (1 + eta) + R * (c1 + c2 + c3)) / (6 * PI * lr)
    b = (-p1 + p3 + R * ((1 - c1) / eta + (PI / 2 - c3 - p3) / (R - (1 + eta)))) / (2 * PI * lr)
    brace = (math.log(z["one_eta"]) * (p1 + R * (c1 - 1) / eta)
             + h * (PI / 2 - p2 - r * c2) * LOG_2PI
             - 2 * math.log(p.k1) * (R * (2 * c2 - c1 - c3) + p2 - p3 + eta * (2 * p2 - p1 - p3))
             + ((1 + eta) * (PI / 2 - p3) - R * c3) / (1 + eta - R) * math.log(z["r_minus_eta"]))
    c = (math.log(z["one_eta"] / z["two_eta"]) / (2 * lr)
         + math.log(z["sigma1"]) / PI
         + r0_integral(eta, r, quad_tol) / (4 * PI * lr)
         + brace / (2 * PI * lr)
         + CLOSED_FORM_PAD)
    return BoundConstants(a, b, c)


def alpha_for(bc: BoundConstants, T0: float) -> float:
    if T0 < math.exp(math.e):
        raise ValueError(f"alpha needs T0 >= e^e, got {T0}")
    L = math.log(T0)
    return bc.a + bc.b * math.log(L) / L + bc.c / L


def bound_S(T: float, bc: BoundConstants) -> float:
    if T < math.e:
        raise ValueError(f"bound_S needs T >= e, got {T}")
    return bc.a * math.log(T) + bc.b * math.log(math.log(T)) + bc.c


def rvm_error_terms(T: float) -> float:
    """Sum of the non-S error terms in |N(T) - T/(2pi) log(T/(2pi e)) - 7/8|."""
    if T < 1:
        raise ValueError("needs T >= 1")
    return (math.atan(1 / (2 * T)) / (4 * PI)
            + T / (4 * PI) * math.log1p(1 / (4 * T * T))
            + 1 / (3 * PI * T))


def bound_N_error(T: float, T0: float, bc: BoundConstants) -> float:
    if not T >= T0 >= math.e:
        raise ValueError(f"need T >= T0 >= e, got T={T}, T0={T0}")
    inner = rvm_error_terms(T)
    if inner > RVM_SLACK / T:
        raise AssertionError(f"error terms {inner:.6e} exceed 0.2/T at T={T}")
    return bound_S(T, bc) + RVM_SLACK / T0


# -- assembly and slack audit --------------------------------------------------

def assembled_bound(T: float, p: BoundParams, quad_tol: float = 1e-10) -> float:
    """N -> infinity limit of the bound on |S(T)| before folding into a, b, c.

    With n <= J/(4 pi log r) - log|f(1+eta)|/(2 log r) + 1/2 + N E/(2 pi) and
    |S(T)| <= (n+1)/N + log zeta(sigma1)/pi + 0.8/T, dividing by N and letting
    N grow removes both the +1/2 and the +1; what remains is computed here,
    with every absorbed slack (eps0, 1e-5, 0.007) included.
    """
    if T < p.T0:
        raise ValueError("assembled_bound needs T >= T0")
    regions = all_regions(p, quad_tol)
    J = regions[0].value(T) + 2 * sum(rc.value(T) for rc in regions[1:])
    lr = math.log(p.r)
    z = _zetas(p)
    return (J / (4 * PI * lr)
            - (math.log(T) + math.log(z["two_eta"] / z["one_eta"])) / (2 * lr)
            + g_of(SQRT2, p.T0) / (2 * PI)
            + math.log(z["sigma1"]) / PI
            + ARG_SLACK / T)


@dataclass
class SlackAudit:
    eps0_term: float
    log_slack_term: float
    loglog_slack_term: float
    e_term: float
    arg_term: float
    pad: float = CLOSED_FORM_PAD
    gap: float = 0.0
    covered: bool = field(init=False)

    def __post_init__(self):
        self.covered = self.total <= self.pad

    @property
    def total(self) -> float:
        return self.eps0_term + self.log_slack_term + self.loglog_slack_term + self.e_term + self.arg_term


def slack_audit(p: BoundParams, T: float | None = None, quad_tol: float = 1e-10) -> SlackAudit:
    """Break down what the +0.003 in c has to absorb, and the realised gap at T."""
    T = p.T0 if T is None else T
    regions = all_regions(p, quad_tol)
    denom = 4 * PI * math.log(p.r)
    log_sl = 2 * sum(LOG_SLACK * rc.coef_logT for rc in regions[1:]) / denom
    loglog_sl = 2 * sum(LOGLOG_SHIFT * rc.coef_loglogT for rc in regions[1:]) / denom
    bc = constants_abc(p, quad_tol)
    gap = bound_S(T, bc) - assembled_bound(T, p, quad_tol)
    return SlackAudit(
        eps0_term=regions[0].epsilon_slack / denom,
        log_slack_term=log_sl,
        loglog_slack_term=loglog_sl,
        e_term=g_of(SQRT2, p.T0) / (2 * PI),
        arg_term=ARG_SLACK / T,
        gap=gap,
    )


# -- critical-line constant ----------------------------------------------------

def cgt3(t: float) -> float:
    a1, a2, a3, a4 = CGT3
    return a1 * t ** (1 / 6) * math.log(t) + a2 * t ** (1 / 6) + a3 * math.log(t) + a4


def lehman(t: float) -> float:
    return LEHMAN_COEFF * t**0.25


def k1_branches(t: float, k1: float = K1) -> dict:
    """Both analytic bounds for |zeta(1/2+it)| against k1 t^(1/6) log t."""
    if t < math.e:
        raise ValueError(f"needs t >= e, got {t}")
    target = k1 * t ** (1 / 6) * math.log(t)
    c, l = cgt3(t), lehman(t)
    return {
        "t": t,
        "cgt3": c,
        "lehman": l,
        "target": target,
        "active": "lehman" if l <= c else "cgt3",
        "holds": min(c, l) <= target,
    }


def k1_dominance(t: float, k1: float = K1) -> bool:
    return k1_branches(t, k1)["holds"]


# -- Jensen's formula ------------------------------------------------------------

@dataclass(frozen=True)
class JensenInstance:
    """Polynomial lead * prod (z - z_k) examined on the circle |z - center| = radius."""

    center: complex
    radius: float
    zeros: tuple
    lead: complex = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if any(abs(z - self.center) == 0 for z in self.zeros) or self.lead == 0:
            raise ValueError("function vanishes at the centre")

    def log_abs_f(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, math.log(abs(self.lead)))
        for zk in self.zeros:
            out = out + np.log(np.abs(z - zk))
        return out


def jensen_residual(inst: JensenInstance, quad_nodes: int = 4096) -> float:
    dists = [abs(z - inst.center) for z in inst.zeros]
    if any(abs(d - inst.radius) <= 1e-12 * inst.radius for d in dists):
        raise ValueError("a zero lies on the circle")
    lhs = sum(math.log(inst.radius / d) for d in dists if d < inst.radius)
    phi = 2 * PI * np.arange(quad_nodes) / quad_nodes
    ring = inst.log_abs_f(inst.center + inst.radius * np.exp(1j * phi))
    rhs = float(ring.mean()) - float(inst.log_abs_f(inst.center))
    return abs(lhs - rhs)
