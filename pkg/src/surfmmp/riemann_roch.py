"""Euler characteristics over arbitrary base fields.

Cohomology ranks are never computed individually; only Euler
characteristics are modelled, with chi of the structure sheaf supplied by
the user and per-curve chi derived from adjunction parity.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError
from .lattice import (
    Configuration,
    CurveDivisor,
    Divisor,
    canonical_pairing,
    degree_on_curve,
    intersect,
)


def euler_char_curve(divisor: CurveDivisor, chi0: int) -> Fraction:
    """chi of a Cartier divisor on a regular curve: deg(D) + chi0.

    Rejects non-integral coefficients, where chi is undefined.
    """
    if not divisor.is_integral():
        raise InputError(
            "euler_char_curve needs integer coefficients; "
            "chi is undefined for non-Cartier input"
        )
    return degree_on_curve(divisor) + chi0


def chi_of_curve(config: Configuration, curve_id: str) -> int:
    """chi of the structure sheaf of a curve, from adjunction parity."""
    return config.curve(curve_id).chi


def euler_char_surface(config: Configuration, divisor: Divisor) -> Fraction:
    """Surface Euler characteristic: chi0 + (D.D - D.K) / 2."""
    if config.chi_structure is None:
        raise InputError("configuration does not declare chi of the surface")
    for cid, coeff in divisor.coefficients.items():
        config.index(cid)
        if coeff.denominator != 1:
            raise InputError(
                f"euler_char_surface needs integer coefficients, got {coeff} on {cid}"
            )
    dd = intersect(config, divisor, divisor)
    dk = canonical_pairing(config, divisor)
    return config.chi_structure + (dd - dk) / 2
