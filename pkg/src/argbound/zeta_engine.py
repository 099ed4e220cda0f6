"""Euler-Maclaurin evaluation of zeta, the Riemann-Siegel theta function and Hardy's Z.

Two evaluation paths share one formula:

* a scalar path in mpmath arithmetic at ``ZetaEvalConfig.digits`` significant
  digits, which grows the truncation point until the analytic remainder bound
  meets ``target_tolerance`` (or refuses with :class:`PrecisionError`);
* a vectorised float64 path used by the zero scan and by the sampled
  inequality checks, which evaluates many ordinates at once.

For ``s = sigma + it`` and truncation point ``N``::

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{k=1..K} B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1) + R_K

with ``|R_K|`` bounded by ``|s(s+1)...(s+2K+1) B_{2K+2} N^(-sigma-2K-1)| /
((2K+2)! (sigma+2K+1))``.
"""
from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import loggamma

DEFAULT_DIGITS = 30
PRECISION_ENV = "ARGBOUND_PRECISION"
MIN_TERMS = 50
THETA_SEAM = 10.0

# B_{2k}/(2k)! for k = 1..8
_BERNOULLI_RATIOS = tuple(
    float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)) for k in range(1, 9)
)


class ZetaDomainError(ValueError):
    """Argument outside the region the engine evaluates."""


class ZetaPoleError(ZetaDomainError):
    """Evaluation requested at the pole s = 1."""


class PrecisionError(ArithmeticError):
    """The remainder bound cannot be brought under the requested tolerance."""


class ConsistencyError(ArithmeticError):
    """An internal consistency check failed (e.g. Z(t) not real)."""


def default_digits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        digits = int(raw)
    except ValueError as exc:
        raise ValueError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc
    if digits < 15:
        raise ValueError(f"{PRECISION_ENV} must be at least 15, got {digits}")
    return digits


@dataclass(frozen=True)
class ZetaEvalConfig:
    """Accuracy policy for zeta evaluation.

    ``truncation_terms`` is the ceiling on the Dirichlet-series cutoff; the
    cutoff actually used starts at ``max(50, 2|t|)`` and doubles while the
    remainder bound exceeds ``target_tolerance``.
    """

    truncation_terms: int = 40_000
    correction_terms: int = 4
    target_tolerance: float = 1e-10
    max_height: float = 10_000.0
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if self.target_tolerance <= 0:
            raise ValueError("target_tolerance must be positive")
        if self.max_height <= 0:
            raise ValueError("max_height must be positive")
        if self.truncation_terms < 2 * self.max_height:
            raise ValueError(
                f"truncation_terms={self.truncation_terms} must be >= 2*max_height="
                f"{2 * self.max_height:g}"
            )
        if not 0 <= self.correction_terms <= 7:
            raise ValueError("correction_terms must lie in [0, 7]")
        if self.digits < 15:
            raise ValueError("digits must be at least 15")

    @classmethod
    def from_env(cls, **overrides) -> "ZetaEvalConfig":
        overrides.setdefault("digits", default_digits())
        return cls(**overrides)


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise ZetaDomainError(f"non-finite point {self.sigma} + {self.t}i")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    @classmethod
    def of(cls, s) -> "ComplexPoint":
        if isinstance(s, ComplexPoint):
            return s
        s = complex(s)
        return cls(s.real, s.imag)


@dataclass(frozen=True)
class ZetaValue:
    """A zeta value with the truncation used and its remainder bound."""

    value: object  # mpmath mpf / mpc
    n_terms: int
    remainder_bound: float

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        return float(mpmath.re(self.value))


_local = threading.local()


def _context(digits: int) -> mpmath.ctx_mp.MPContext:
    """Per-thread mpmath context, so concurrent callers never share precision state."""
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(digits)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = digits
        cache[digits] = ctx
    return ctx


def euler_maclaurin(s, n_terms: int, corrections: int = 4, digits: int = DEFAULT_DIGITS,
                    times_s_minus_1: bool = False) -> ZetaValue:
    """Euler-Maclaurin sum at a fixed cutoff ``n_terms``.

    With ``times_s_minus_1`` the result is ``(s-1) zeta(s)``, which is entire;
    the remainder bound is scaled accordingly.
    """
    ctx = _context(digits)
    s = ctx.mpmathify(s)
    N = int(n_terms)
    if N < 2:
        raise ValueError("n_terms must be at least 2")
    head = ctx.fsum(ctx.power(n, -s) for n in range(1, N))
    Ns = ctx.power(N, -s)
    tail = Ns / 2
    poch = s
    npow = Ns / N
    for k in range(1, corrections + 1):
        tail += ctx.mpf(_BERNOULLI_RATIOS[k - 1]) * poch * npow
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        npow /= N * N
    # poch now holds s(s+1)...(s+2K); first omitted term uses it with N^(-s-2K-1)
    first_omitted = abs(ctx.mpf(_BERNOULLI_RATIOS[corrections]) * poch * npow)
    sigma = ctx.re(s)
    denom = sigma + 2 * corrections + 1
    rigorous = first_omitted * abs(s + 2 * corrections + 1) / denom if denom > 0 else ctx.inf
    bound = max(2 * first_omitted, rigorous)
    if times_s_minus_1:
        value = (s - 1) * (head + tail) + N * Ns
        bound *= abs(s - 1)
    else:
        value = head + N * Ns / (s - 1) + tail
    if ctx.im(s) == 0:
        value = ctx.re(value)
    return ZetaValue(value, N, float(bound))


def _initial_terms(t: float) -> int:
    return max(MIN_TERMS, math.ceil(2 * abs(t)))


def _adaptive(s, cfg: ZetaEvalConfig, times_s_minus_1: bool = False) -> ZetaValue:
    N = _initial_terms(complex(s).imag)
    ceiling = max(cfg.truncation_terms, MIN_TERMS)
    while True:
        res = euler_maclaurin(s, N, cfg.correction_terms, cfg.digits, times_s_minus_1)
        if res.remainder_bound <= cfg.target_tolerance:
            return res
        if 2 * N > ceiling:
            raise PrecisionError(
                f"remainder bound {res.remainder_bound:.3e} at N={N} exceeds "
                f"tolerance {cfg.target_tolerance:.1e} (ceiling {ceiling} terms)"
            )
        N *= 2


def zeta_real_eval(sigma: float, cfg: ZetaEvalConfig | None = None) -> ZetaValue:
    cfg = cfg or ZetaEvalConfig()
    if sigma == 1:
        raise ZetaPoleError("zeta has a pole at s = 1")
    if not sigma > 1:
        raise ZetaDomainError(f"zeta_real needs sigma > 1, got {sigma}")
    return _adaptive(mpmath.mpf(sigma) if not isinstance(sigma, mpmath.mpf) else sigma, cfg)


def zeta_real(sigma: float, cfg: ZetaEvalConfig | None = None):
    """zeta(sigma) for real sigma > 1, as an mpmath ``mpf``."""
    return zeta_real_eval(sigma, cfg).value


def _check_strip(p: ComplexPoint, cfg: ZetaEvalConfig) -> None:
    if not -1 <= p.sigma <= 4:
        raise ZetaDomainError(f"sigma={p.sigma} outside [-1, 4]")
    if abs(p.t) > cfg.max_height:
        raise ZetaDomainError(f"|t|={abs(p.t)} exceeds max_height={cfg.max_height}")


def zeta_complex_eval(s, cfg: ZetaEvalConfig | None = None) -> ZetaValue:
    cfg = cfg or ZetaEvalConfig()
    p = ComplexPoint.of(s)
    if p.sigma == 1 and p.t == 0:
        raise ZetaPoleError("zeta has a pole at s = 1; use a_function for (s-1)zeta(s)")
    _check_strip(p, cfg)
    return _adaptive(mpmath.mpc(p.sigma, p.t), cfg)


def zeta_complex(s, cfg: ZetaEvalConfig | None = None):
    """zeta(s) in the strip -1 <= sigma <= 4, |t| <= max_height, as ``mpc``."""
    return zeta_complex_eval(s, cfg).value


def a_function(s, cfg: ZetaEvalConfig | None = None):
    """The entire function a(s) = (s-1) zeta(s); a(1) = 1."""
    cfg = cfg or ZetaEvalConfig()
    p = ComplexPoint.of(s)
    _check_strip(p, cfg)
    return _adaptive(mpmath.mpc(p.sigma, p.t), cfg, times_s_minus_1=True).value


# -- float64 vectorised path -------------------------------------------------

_BLOCK = 1 << 21
_BAND = 256


def zeta_array(s, n_terms: int | None = None, corrections: int = 4,
               times_s_minus_1: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Euler-Maclaurin in float64.

    Returns ``(values, bounds)`` where ``bounds`` adds the analytic remainder
    bound to a rounding allowance of ``64 * eps * sum |n^-s|``.  Without an
    explicit ``n_terms`` the points are grouped by |t| and each group gets the
    cutoff ``max(50, 2 max|t|)``.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    if n_terms is not None:
        values, bounds = _zeta_block(s, int(n_terms), corrections, times_s_minus_1)
        return values.reshape(shape), bounds.reshape(shape)
    values = np.empty(s.shape, dtype=complex)
    bounds = np.empty(s.shape, dtype=float)
    order = np.argsort(np.abs(s.imag), kind="stable")
    for i in range(0, order.size, _BAND):
        idx = order[i:i + _BAND]
        N = _initial_terms(float(np.max(np.abs(s.imag[idx]))))
        values[idx], bounds[idx] = _zeta_block(s[idx], N, corrections, times_s_minus_1)
    return values.reshape(shape), bounds.reshape(shape)


def _zeta_block(s: np.ndarray, N: int, corrections: int,
                times_s_minus_1: bool) -> tuple[np.ndarray, np.ndarray]:
    logn = np.log(np.arange(1, N, dtype=float))
    head = np.empty(s.shape, dtype=complex)
    absum = np.empty(s.shape, dtype=float)
    rows = max(1, _BLOCK // N)
    for i in range(0, s.size, rows):
        blk = s[i:i + rows]
        mag = np.exp(-np.outer(blk.real, logn))
        ph = np.outer(blk.imag, logn)
        head[i:i + rows] = (mag * np.cos(ph)).sum(axis=1) - 1j * (mag * np.sin(ph)).sum(axis=1)
        absum[i:i + rows] = mag.sum(axis=1)
    Ns = np.exp(-s * math.log(N))
    tail = Ns / 2
    poch = s.copy()
    npow = Ns / N
    for k in range(1, corrections + 1):
        tail = tail + _BERNOULLI_RATIOS[k - 1] * poch * npow
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        npow = npow / (N * N)
    first = np.abs(_BERNOULLI_RATIOS[corrections] * poch * npow)
    denom = s.real + 2 * corrections + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        rigorous = np.where(denom > 0, first * np.abs(s + 2 * corrections + 1) / denom, np.inf)
    bound = np.maximum(2 * first, rigorous)
    rounding = 64 * np.finfo(float).eps * (absum + np.abs(N * Ns))
    if times_s_minus_1:
        values = (s - 1) * (head + tail) + N * Ns
        bound = bound * np.abs(s - 1) + rounding * np.maximum(1.0, np.abs(s - 1))
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            values = head + N * Ns / (s - 1) + tail
        bound = bound + rounding
    return values, bound


def zeta_real_array(sigma) -> np.ndarray:
    """float64 zeta on an array of real sigma > 1 (used inside quadratures)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 1):
        raise ZetaDomainError("zeta_real_array needs sigma > 1")
    values, _ = zeta_array(sigma.astype(complex), MIN_TERMS)
    return values.real.reshape(sigma.shape)


def a_array(s) -> np.ndarray:
    """float64 (s-1) zeta(s) on an array; no pole at s = 1."""
    values, _ = zeta_array(s, times_s_minus_1=True)
    return values


# -- theta and Z -------------------------------------------------------------

_THETA_COEFFS = (1 / 48, 7 / 5760, 31 / 80640, 127 / 430080, 511 / 1216512)


def _theta_asymptotic(t: np.ndarray) -> np.ndarray:
    inv = 1.0 / t
    inv2 = inv * inv
    series = np.zeros_like(t)
    for c in reversed(_THETA_COEFFS):
        series = series * inv2 + c
    return 0.5 * t * np.log(t / (2 * math.pi)) - 0.5 * t - math.pi / 8 + series * inv


def _theta_direct(t: np.ndarray) -> np.ndarray:
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def rs_theta(t):
    """Riemann-Siegel theta, Im log Gamma(1/4 + it/2) - (t/2) log pi.

    Uses the asymptotic series (through t^-9) for t >= 10 and the complex
    log-Gamma below that.  Accepts scalars or arrays; t must be >= 0.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ZetaDomainError("rs_theta needs finite t >= 0")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    big = flat >= THETA_SEAM
    out[big] = _theta_asymptotic(flat[big])
    out[~big] = _theta_direct(flat[~big])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def theta_seam_gap() -> float:
    seam = np.array([THETA_SEAM])
    return float(abs(_theta_asymptotic(seam) - _theta_direct(seam))[0])


def hardy_z(t: float, cfg: ZetaEvalConfig | None = None) -> float:
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), evaluated on the scalar path."""
    cfg = cfg or ZetaEvalConfig()
    if t < 0:
        raise ZetaDomainError("hardy_z needs t >= 0")
    res = zeta_complex_eval(mpmath.mpc(0.5, t), cfg)
    ctx = _context(cfg.digits)
    rotated = ctx.expj(rs_theta(t)) * res.value
    residual = float(abs(ctx.im(rotated)))
    limit = 10 * max(cfg.target_tolerance, res.remainder_bound)
    # theta is carried in float64, so allow its rounding on top of the zeta error
    limit += 64 * np.finfo(float).eps * max(1.0, t) * float(abs(res.value))
    if residual > limit:
        raise ConsistencyError(f"Z({t}) has imaginary residual {residual:.3e} > {limit:.3e}")
    return float(ctx.re(rotated))


def hardy_z_array(t, tolerance: float = 1e-10) -> np.ndarray:
    """Vectorised Z(t) in float64; asserts the rotated imaginary part is tiny."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ZetaDomainError("hardy_z needs t >= 0")
    values, bounds = zeta_array(0.5 + 1j * t.ravel())
    theta = rs_theta(t.ravel())
    rotated = np.exp(1j * theta) * values
    limit = 10 * np.maximum(tolerance, bounds) + 64 * np.finfo(float).eps * np.maximum(1.0, t.ravel()) * np.abs(values)
    bad = np.abs(rotated.imag) > limit
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ConsistencyError(
            f"Z({t.ravel()[i]}) has imaginary residual {abs(rotated.imag[i]):.3e} > {limit[i]:.3e}"
        )
    return rotated.real.reshape(t.shape)
