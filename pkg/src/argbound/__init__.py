"""Explicit bounds for the argument S(T) of the Riemann zeta-function on the critical line."""

__version__ = "0.1.0"
