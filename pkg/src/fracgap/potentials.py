"""External potentials V(x).

Each potential is an immutable value object that can be evaluated on an
array of points of shape (..., n) and dilated in closed form, which is
what the unit-diameter rescaling needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError
from .geometry import Box

__all__ = [
    "Zero",
    "Quadratic",
    "TrigTerm",
    "QuadraticPlusTrig",
    "Well",
    "GridSampled",
    "Potential",
    "harmonic",
    "is_zero",
]


def _points(x, n=None):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    if n is not None and x.shape[-1] != n:
        raise DomainError(f"expected points with {n} coordinates, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class Zero:
    is_zero = True

    def __call__(self, x):
        x = _points(x)
        return np.zeros(x.shape[:-1])

    def dilated(self, scale, energy_factor):
        return self

    def describe(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class Quadratic:
    """V(x) = sum_j c_j (x_j - center_j)^2."""

    coefficients: tuple
    center: tuple | None = None
    is_zero = False

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.coefficients))
        object.__setattr__(self, "coefficients", c)
        if self.center is not None:
            ctr = tuple(float(v) for v in np.atleast_1d(self.center))
            if len(ctr) != len(c):
                raise DomainError("center and coefficients differ in length")
            object.__setattr__(self, "center", ctr)

    @property
    def n(self):
        return len(self.coefficients)

    def _center(self):
        return np.zeros(self.n) if self.center is None else np.asarray(self.center)

    def __call__(self, x):
        x = _points(x, self.n)
        y = x - self._center()
        return np.sum(np.asarray(self.coefficients) * y * y, axis=-1)

    def dilated(self, scale, energy_factor):
        c = tuple(energy_factor * cj / scale**2 for cj in self.coefficients)
        ctr = None if self.center is None else tuple(v * scale for v in self.center)
        return Quadratic(c, ctr)

    def describe(self):
        return {"kind": "quadratic", "coefficients": list(self.coefficients),
                "center": None if self.center is None else list(self.center)}


@dataclass(frozen=True)
class TrigTerm:
    """amplitude * cos(omega . x) or amplitude * sin(omega . x)."""

    amplitude: float
    kind: str
    frequency: tuple

    def __post_init__(self):
        if self.kind not in ("cos", "sin"):
            raise DomainError("trig term kind must be 'cos' or 'sin'")
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "frequency", tuple(float(w) for w in np.atleast_1d(self.frequency)))

    def __call__(self, x):
        phase = np.tensordot(x, np.asarray(self.frequency), axes=([-1], [0]))
        f = np.cos if self.kind == "cos" else np.sin
        return self.amplitude * f(phase)


@dataclass(frozen=True)
class QuadraticPlusTrig:
    quadratic: Quadratic
    terms: tuple = ()
    is_zero = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if len(t.frequency) != self.quadratic.n:
                raise DomainError("trig frequency dimension does not match the quadratic part")

    @property
    def n(self):
        return self.quadratic.n

    def __call__(self, x):
        x = _points(x, self.n)
        v = self.quadratic(x)
        for t in self.terms:
            v = v + t(x)
        return v

    def dilated(self, scale, energy_factor):
        terms = tuple(
            TrigTerm(energy_factor * t.amplitude, t.kind, tuple(w / scale for w in t.frequency))
            for t in self.terms
        )
        return QuadraticPlusTrig(self.quadratic.dilated(scale, energy_factor), terms)

    def hessian_bounds(self):
        """Bounds (g1^2, g2^2) with g1^2 I <= Hess(V)/2 <= g2^2 I.

        Exact per axis when every frequency vector is axis-aligned,
        otherwise a Gershgorin-style enclosure.
        """
        c = np.asarray(self.quadratic.coefficients)
        aligned = all(np.count_nonzero(t.frequency) <= 1 for t in self.terms)
        if aligned:
            lo, hi = c.copy(), c.copy()
            for t in self.terms:
                w2 = np.asarray(t.frequency) ** 2
                lo -= 0.5 * abs(t.amplitude) * w2
                hi += 0.5 * abs(t.amplitude) * w2
            return float(lo.min()), float(hi.max())
        spread = sum(0.5 * abs(t.amplitude) * float(np.dot(t.frequency, t.frequency)) for t in self.terms)
        return float(c.min() - spread), float(c.max() + spread)

    def describe(self):
        return {"kind": "quadratic_trig", "quadratic": self.quadratic.describe(),
                "terms": [{"amplitude": t.amplitude, "kind": t.kind, "frequency": list(t.frequency)}
                          for t in self.terms]}


@dataclass(frozen=True)
class Well:
    """V = 0 on the box origin + (0, L), V0 outside it."""

    inner: Box
    height: float
    origin: tuple | None = None
    is_zero = False

    def __post_init__(self):
        if not float(self.height) > 0:
            raise DomainError("well height V0 must be positive")
        object.__setattr__(self, "height", float(self.height))
        org = (0.0,) * self.inner.n if self.origin is None else tuple(float(v) for v in self.origin)
        if len(org) != self.inner.n:
            raise DomainError("well origin has the wrong dimension")
        object.__setattr__(self, "origin", org)

    @property
    def n(self):
        return self.inner.n

    def __call__(self, x):
        x = _points(x, self.n)
        inside = self.inner.contains(x - np.asarray(self.origin))
        return np.where(inside, 0.0, self.height)

    def breakpoints(self, axis):
        """Coordinates along ``axis`` where V jumps."""
        a = self.origin[axis]
        return (a, a + self.inner.lengths[axis])

    def dilated(self, scale, energy_factor):
        inner = Box(tuple(L * scale for L in self.inner.lengths))
        return Well(inner, self.height * energy_factor, tuple(o * scale for o in self.origin))

    def describe(self):
        return {"kind": "well", "inner": list(self.inner.lengths), "height": self.height,
                "origin": list(self.origin)}


@dataclass(frozen=True)
class GridSampled:
    """Potential sampled on a tensor grid, linearly interpolated."""

    axes: tuple
    values: np.ndarray = field(compare=False)
    is_zero = False

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != tuple(len(a) for a in axes):
            raise DomainError("grid values do not match the axes")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return len(self.axes)

    def __call__(self, x):
        from scipy.interpolate import RegularGridInterpolator

        x = _points(x, self.n)
        interp = RegularGridInterpolator(self.axes, self.values, bounds_error=False, fill_value=None)
        return interp(x.reshape(-1, self.n)).reshape(x.shape[:-1])

    def dilated(self, scale, energy_factor):
        # resampled onto the dilated grid: same samples, moved nodes
        return GridSampled(tuple(a * scale for a in self.axes), self.values * energy_factor)

    def describe(self):
        return {"kind": "grid", "shape": list(self.values.shape)}


Potential = Union[Zero, Quadratic, QuadraticPlusTrig, Well, GridSampled]


def harmonic(gammas) -> Quadratic:
    """The harmonic potential sum_j gamma_j^2 x_j^2."""
    return Quadratic(tuple(float(g) ** 2 for g in gammas))


def is_zero(potential) -> bool:
    return bool(getattr(potential, "is_zero", False))

