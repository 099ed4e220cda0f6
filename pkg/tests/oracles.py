"""Independent re-derivations used as test oracles.

These run in mpmath (50 digits, mpmath's own zeta and quadrature) and are
deliberately written from the formulas rather than by calling the package.
"""
from __future__ import annotations

import math

import mpmath
from scipy.integrate import quad

MP = mpmath.MPContext()
MP.dps = 50


def closed_form_abc(eta: float, r: float, k1: float = 2.38) -> tuple[float, float, float]:
    eta, r, k1 = MP.mpf(eta), MP.mpf(r), MP.mpf(k1)
    R = r * (MP.mpf(1) / 2 + eta)
    h = MP.mpf(1) / 2 + eta
    p1, p2, p3 = MP.asin(eta / R), MP.asin(1 / r), MP.asin((1 + eta) / R)
    c1, c2, c3 = MP.cos(p1), MP.cos(p2), MP.cos(p3)
    lr = MP.log(r)
    pi = MP.pi
    z1e, z2e = MP.zeta(1 + eta), MP.zeta(2 + 2 * eta)
    zs1 = MP.zeta(MP.mpf(1) / 2 + MP.sqrt(2) * (eta + MP.mpf(1) / 2))
    zre = MP.zeta(R - eta)
    a = (p1 * eta + (p2 - 3 * pi / 2) * h + p3 * (1 + eta) + R * (c1 + c2 + c3)) / (6 * pi * lr)
    b = (-p1 + p3 + R * ((1 - c1) / eta + (pi / 2 - c3 - p3) / (R - (1 + eta)))) / (2 * pi * lr)
    integral = MP.quad(lambda phi: MP.log(MP.zeta(1 + eta + R * MP.cos(phi))), [-pi / 2, 0, pi / 2])
    brace = (MP.log(z1e) * (p1 + R * (c1 - 1) / eta)
             + h * (pi / 2 - p2 - r * c2) * MP.log(2 * pi)
             - 2 * MP.log(k1) * (R * (2 * c2 - c1 - c3) + p2 - p3 + eta * (2 * p2 - p1 - p3))
             + ((1 + eta) * (pi / 2 - p3) - R * c3) / (1 + eta - R) * MP.log(zre))
    c = (MP.log(z1e / z2e) / (2 * lr) + MP.log(zs1) / pi + integral / (4 * pi * lr)
         + brace / (2 * pi * lr) + MP.mpf("0.003"))
    return float(a), float(b), float(c)


def region_by_integration(region_id: int, eta: float, r: float,
                          k1: float = 2.38, k2: float = 1 / 6, k3: float = 1.0) -> tuple[float, float, float]:
    """(log T, log log T, constant) coefficients of one arc, by integrating the
    linearly interpolated boundary exponents along the arc.

    On the arcs left of the centre, sigma = 1 + eta - R sin(psi) and the arc
    for region i is psi in [psi_lo, psi_hi].  Each strip [lo, hi] carries
    boundary data (log C, exponent of T, exponent of log T) on both edges.
    """
    R = r * (0.5 + eta)
    q = 1 + eta - R
    p1, p2, p3 = math.asin(eta / R), math.asin(1 / r), math.asin((1 + eta) / R)
    l2pi = math.log(2 * math.pi)
    zeta = lambda x: float(MP.zeta(x))  # noqa: E731
    strips = {
        1: (0.0, p1, 1.0, 1 + eta, (0.0, 1.0, 1.0), (math.log(zeta(1 + eta)), 1.0, 0.0)),
        2: (p1, p2, 0.5, 1.0, (math.log(k1), 1 + k2, k3), (0.0, 1.0, 1.0)),
        3: (p2, p3, 0.0, 0.5, (-0.5 * l2pi, 1.5, 1.0), (math.log(k1), 1 + k2, k3)),
        4: (p3, math.pi / 2, q, 0.0, ((q - 0.5) * l2pi + math.log(zeta(1 - q)), 1.5 - q, 0.0),
            (-0.5 * l2pi, 1.5, 1.0)),
    }
    psi_lo, psi_hi, lo, hi, left, right = strips[region_id]

    def coef(k):
        def f(psi):
            w = (1 + eta - R * math.sin(psi) - lo) / (hi - lo)
            return (1 - w) * left[k] + w * right[k]
        return quad(f, psi_lo, psi_hi, epsabs=1e-13, epsrel=1e-13)[0]

    return coef(1), coef(2), coef(0)
