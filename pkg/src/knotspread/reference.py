"""Round-circle closed forms and the degeneration constants c_p.

These serve as ground truth throughout the test suite: the circle's spread
admits the chord law (L/pi) sin(pi u / L), which reduces everything to the
sine-power integral on [0, pi].
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .exponent import Exponent

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss01(n: int):
    """Gauss-Legendre nodes/weights on [0, 1], cached."""
    if n not in _gauss_cache:
        x, w = np.polynomial.legendre.leggauss(n)
        _gauss_cache[n] = ((x + 1.0) / 2.0, w / 2.0)
    return _gauss_cache[n]


def sin_power_integral(p: float) -> float:
    """integral_0^pi sin(theta)^p d(theta) for p > -1.

    Quadrature with dyadic panels graded toward the endpoint singularity
    (present for p < 0), cross-checked against the Beta-function identity
    via log-Gamma; the two routes must agree to 1e-10 relative.
    """
    p = float(p)
    if p <= -1.0:
        raise ValueError(f"sine-power integral requires p > -1, got {p}")
    # symmetry: 2 * integral over [0, pi/2]; singularity only at 0
    x, w = _gauss01(16)
    depth = 40
    lo = 0.5 ** np.arange(depth, 0, -1)
    hi = np.concatenate((lo[1:], [1.0]))
    theta = (lo[:, None] + (hi - lo)[:, None] * x[None, :]) * (math.pi / 2)
    vals = np.sin(theta) ** p
    quad = (math.pi / 2) * float(((hi - lo)[:, None] * w[None, :] * vals).sum())
    # innermost [0, 2^-depth]: sin^p = theta^p (1 - p theta^2/6 + O(theta^4)),
    # integrated termwise; truncation is far below machine precision here
    a = (math.pi / 2) * lo[0]
    quad += a ** (p + 1.0) / (p + 1.0) - (p / 6.0) * a ** (p + 3.0) / (p + 3.0)
    quad *= 2.0

    beta = math.sqrt(math.pi) * math.exp(gammaln((p + 1.0) / 2.0) - gammaln(p / 2.0 + 1.0))
    if abs(quad - beta) > 1e-10 * abs(beta):
        raise ArithmeticError(
            f"sine-power integral cross-check failed at p={p}: "
            f"quadrature {quad!r} vs Beta identity {beta!r}")
    return quad


def circle_spread(L: float, exponent) -> float:
    """Spread of the round circle of length L, by the circle chord law."""
    if L <= 0:
        raise ValueError(f"circle length must be positive, got {L}")
    e = Exponent.coerce(exponent)
    if e.is_diameter:
        return L / math.pi
    if e.is_log:
        return L / (2.0 * math.pi)
    p = e.p
    return (L / math.pi) * (sin_power_integral(p) / math.pi) ** (1.0 / p)


def degenerate_constant(exponent) -> float:
    """The knot-type-independent density-ratio constant in the mean-chord
    range: c_p for finite p in (-1, 2], 2*pi at the log point, 2 at the
    diameter endpoint. Finite p > 2 is refused: circle extremality is not
    established there."""
    e = Exponent.coerce(exponent)
    if e.is_diameter:
        return 2.0
    if e.is_log:
        return 2.0 * math.pi
    p = e.p
    if p > 2.0:
        raise ValueError(
            f"no degeneration constant is asserted for finite p={p} > 2; "
            "use the extremal explorer instead")
    return math.pi * (math.pi / sin_power_integral(p)) ** (1.0 / p)


def circle_fixed_chord_ratio(p: float, u_fraction: float) -> float:
    """Circle chord length per unit circumference at arc-length fraction
    u_fraction in (0, 1/2]: (1/pi) sin(pi u). Diagnostic reference for the
    high-exponent explorer; p is validated but does not enter the chord law."""
    if p <= -1.0:
        raise ValueError(f"requires p > -1, got {p}")
    if not 0.0 < u_fraction <= 0.5:
        raise ValueError(f"u_fraction must lie in (0, 1/2], got {u_fraction}")
    return math.sin(math.pi * u_fraction) / math.pi
