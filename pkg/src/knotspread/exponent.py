"""The spread exponent p in (-1, inf] with its three regimes.

Finite p (p > -1, p != 0), the logarithmic point (geometric mean, the
continuous extension at p = 0), and the diameter endpoint p = inf are
distinct code paths everywhere, so they are distinct values here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Exponent:
    regime: str  # "finite" | "log" | "diameter"
    p: float = math.nan

    @staticmethod
    def finite(p: float) -> "Exponent":
        p = float(p)
        if not math.isfinite(p):
            raise ValueError("use Exponent.diameter() for p = inf")
        if p <= -1.0:
            raise ValueError(f"spread requires p > -1, got {p}")
        if p == 0.0:
            raise ValueError("p = 0 is the log regime; use Exponent.log()")
        return Exponent("finite", p)

    @staticmethod
    def log() -> "Exponent":
        return Exponent("log")

    @staticmethod
    def diameter() -> "Exponent":
        return Exponent("diameter", math.inf)

    @staticmethod
    def coerce(value) -> "Exponent":
        """Accept an Exponent, a finite float, float('inf'), or the CLI
        literals 'log' / 'inf'."""
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            s = value.strip().lower()
            if s == "log":
                return Exponent.log()
            if s in ("inf", "infinity", "diameter"):
                return Exponent.diameter()
            try:
                value = float(s)
            except ValueError:
                raise ValueError(f"cannot parse exponent {value!r}") from None
        value = float(value)
        if math.isinf(value):
            if value < 0:
                raise ValueError("p = -inf is not a spread regime")
            return Exponent.diameter()
        return Exponent.finite(value)

    @property
    def is_finite(self) -> bool:
        return self.regime == "finite"

    @property
    def is_log(self) -> bool:
        return self.regime == "log"

    @property
    def is_diameter(self) -> bool:
        return self.regime == "diameter"

    def __str__(self):
        if self.is_log:
            return "log"
        if self.is_diameter:
            return "inf"
        return f"{self.p:g}"
