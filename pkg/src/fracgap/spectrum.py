"""Spectra, gap reports and the shared symmetric eigensolve."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from .errors import SolverError

__all__ = [
    "BoundMargin",
    "GapReport",
    "Spectrum",
    "FINDING_SLACK",
    "DEGENERACY_TOL",
    "symmetric_eigh",
    "fix_signs",
    "make_report",
]

# Margins within this relative slack of zero are treated as equality.
FINDING_SLACK = 1e-9
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class BoundMargin:
    name: str
    value: float
    margin: float

    @property
    def violated(self) -> bool:
        return self.margin < -FINDING_SLACK * max(1.0, abs(self.value))


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with eigenvector columns in the solver's basis."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: Any = None
    discretization: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GapReport:
    E1: float
    E2: float
    delta: float
    lower_bounds: tuple = ()
    config_echo: dict = field(default_factory=dict)
    degenerate: bool = False
    notes: tuple = ()

    @property
    def finding(self) -> bool:
        """True when some bound has a negative margin."""
        return any(b.violated for b in self.lower_bounds)

    def bound(self, name: str) -> BoundMargin:
        for b in self.lower_bounds:
            if b.name == name:
                return b
        raise KeyError(name)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of largest magnitude is positive."""
    v = np.array(vectors, dtype=float, copy=True)
    if v.ndim == 1:
        v = v[:, None]
    idx = np.argmax(np.abs(v), axis=0)
    s = np.sign(v[idx, np.arange(v.shape[1])])
    s[s == 0] = 1.0
    return v * s


def symmetric_eigh(H: np.ndarray, count: int | None = None):
    """Smallest ``count`` eigenpairs of a dense real symmetric matrix."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise SolverError("matrix must be square")
    if not np.all(np.isfinite(H)):
        raise SolverError("matrix has non-finite entries")
    n = H.shape[0]
    k = n if count is None else min(int(count), n)
    try:
        w, v = scipy.linalg.eigh(H, subset_by_index=[0, k - 1], driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"symmetric eigensolve failed: {exc}") from exc
    return w, fix_signs(v)


def make_report(eigenvalues, bounds, config_echo=None, notes=(), E2_index=1) -> GapReport:
    """Gap report from ascending eigenvalues and ``(name, value)`` bound pairs.

    ``E2_index`` selects which eigenvalue plays E2 (normally the second).
    """
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size <= E2_index:
        raise SolverError("fewer than two eigenvalues available")
    E1, E2 = float(ev[0]), float(ev[E2_index])
    delta = E2 - E1
    degenerate = abs(delta) <= DEGENERACY_TOL * max(1.0, abs(E1))
    margins = tuple(BoundMargin(name, float(value), delta - float(value)) for name, value in bounds)
    return GapReport(E1, E2, delta, margins, dict(config_echo or {}), degenerate, tuple(notes))
