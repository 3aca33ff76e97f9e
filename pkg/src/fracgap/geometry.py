"""Domains, their two diameters, and the unit-diameter rescaling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError

__all__ = [
    "FractionalOrder",
    "check_alpha",
    "Box",
    "Ellipse2D",
    "Domain",
    "Diameters",
    "diameters",
    "rescale_to_unit_diameter",
]


def check_alpha(alpha) -> float:
    """Return ``alpha`` as a float, raising if it is outside (0, 2]."""
    a = float(alpha)
    if not (0.0 < a <= 2.0) or math.isnan(a):
        raise DomainError("alpha must lie in (0,2]")
    return a


@dataclass(frozen=True)
class FractionalOrder:
    """The exponent alpha of (-Delta)^{alpha/2}."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    def __float__(self):
        return self.alpha


@dataclass(frozen=True)
class Box:
    """The box prod_j (0, L_j). Lengths keep the caller's order."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        if not 1 <= len(lengths) <= 3:
            raise DomainError("a box needs 1 to 3 side lengths")
        if any(not (v > 0) or math.isinf(v) for v in lengths):
            raise DomainError("box side lengths must be positive and finite")
        object.__setattr__(self, "lengths", lengths)

    @property
    def n(self) -> int:
        return len(self.lengths)

    def contains(self, x):
        """Strict interior test for an array of points with shape (..., n)."""
        import numpy as np

        x = np.asarray(x, dtype=float)
        inside = np.ones(x.shape[:-1], dtype=bool)
        for j, L in enumerate(self.lengths):
            inside &= (x[..., j] > 0) & (x[..., j] < L)
        return inside


@dataclass(frozen=True)
class Ellipse2D:
    """The ellipse x^2/a^2 + y^2/b^2 < 1 centred at the origin, a >= b."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a >= b > 0):
            raise DomainError("ellipse semi-axes must satisfy a >= b > 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return 2

    def contains(self, x):
        import numpy as np

        x = np.asarray(x, dtype=float)
        return x[..., 0] ** 2 / self.a**2 + x[..., 1] ** 2 / self.b**2 < 1.0


Domain = Union[Box, Ellipse2D]


@dataclass(frozen=True)
class Diameters:
    D: float
    d: float


def diameters(domain: Domain) -> Diameters:
    """Diameter D and inscribed-ball diameter d of a box or ellipse."""
    if isinstance(domain, Box):
        return Diameters(math.sqrt(sum(L * L for L in domain.lengths)), min(domain.lengths))
    if isinstance(domain, Ellipse2D):
        return Diameters(2.0 * domain.a, 2.0 * domain.b)
    raise DomainError(f"unsupported domain {domain!r}")


def dilate_domain(domain: Domain, factor: float) -> Domain:
    """Scale every length of ``domain`` by ``factor``."""
    if isinstance(domain, Box):
        return Box(tuple(L * factor for L in domain.lengths))
    return Ellipse2D(domain.a * factor, domain.b * factor)


def rescale_to_unit_diameter(domain: Domain, potential, alpha):
    """Map (domain, V) to the unit-diameter problem.

    Coordinates become x / D and the potential becomes D^alpha V(D x).
    Returns ``(domain, potential, D)``; eigenvalues of the rescaled
    problem are D^alpha times the original ones.
    """
    alpha = check_alpha(alpha)
    D = diameters(domain).D
    if D == 1.0:
        return domain, potential, 1.0
    scale = 1.0 / D
    return dilate_domain(domain, scale), potential.dilated(scale, D**alpha), D
