"""Closed-form and asymptotic gap formulas, and the conjectured lower bounds.

The asymptotic eigenvalues come from inserting the alpha = 2 eigenfunctions
into the fractional energy; they are accurate when 2 - alpha is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kquad
from .errors import DomainError
from .geometry import Diameters, check_alpha
from .specfun import SeriesControl, gamma, hyp1f2, hyp2f1

__all__ = [
    "BoundRecord",
    "BOUND_NAMES",
    "local_gap_lower_bound",
    "unified_gap_lower_bound",
    "classical_gap_lower_bound",
    "wholespace_gap_lower_bound",
    "alpha2_gap_lower_bound",
    "evaluate_bounds",
    "eigs_box1d_asymptotic",
    "gap_box1d_asymptotic",
    "eigs_box2d_asymptotic",
    "eigs_harmonic1d_asymptotic",
    "gap_harmonic1d_asymptotic",
    "gap_harmonic2d_asymptotic",
    "gap_harmonic2d_closed_form",
]

BOUND_NAMES = ("ConjI_local", "ConjII_dirichlet", "Unified_lgap765", "WholeSpace_bdw876", "Alpha2_gap2loc")

# fall back to quadrature this close to an odd alpha (pole of sec(alpha pi/2))
SEC_POLE_GUARD = 1e-3


@dataclass(frozen=True)
class BoundRecord:
    name: str
    value: float
    inputs: dict = field(default_factory=dict)


def unified_gap_lower_bound(n: int, alpha, diam: Diameters) -> float:
    """alpha pi^alpha / (n+2)^(1-alpha/2) * d^(2-alpha) / D^2."""
    a = check_alpha(alpha)
    return a * math.pi**a / (n + 2) ** (1 - a / 2) * diam.d ** (2 - a) / diam.D**2


def local_gap_lower_bound(n: int, alpha, diam: Diameters) -> float:
    """Conjectured bound for the local operator: (2^a - 1) pi^a / D^a in 1D,
    the unified bound otherwise."""
    a = check_alpha(alpha)
    if n == 1:
        return (2.0**a - 1.0) * math.pi**a / diam.D**a
    return unified_gap_lower_bound(n, a, diam)


def classical_gap_lower_bound(n: int, alpha, diam: Diameters) -> float:
    """Conjectured bound for the Dirichlet (zero-extension) operator."""
    return unified_gap_lower_bound(n, alpha, diam)


def wholespace_gap_lower_bound(alpha, gamma1: float, gamma2: float) -> float:
    """2^(4a/(2+a)) a/(2+a) gamma1 / gamma2^((2-a)/(2+a)) for 0 < gamma1 <= gamma2."""
    a = check_alpha(alpha)
    if not 0 < gamma1 <= gamma2:
        raise DomainError("need 0 < gamma1 <= gamma2")
    return 2.0 ** (4 * a / (2 + a)) * a / (2 + a) * gamma1 / gamma2 ** ((2 - a) / (2 + a))


def alpha2_gap_lower_bound(diam: Diameters) -> float:
    """3 pi^2 / D^2, the alpha = 2 gap bound."""
    return 3.0 * math.pi**2 / diam.D**2


def evaluate_bounds(kind: str, n: int, alpha, diam: Diameters | None = None, gammas=None) -> list:
    """All bounds that apply to a problem of the given kind.

    ``kind`` is 'local', 'dirichlet' (also accepted: 'classical') or
    'wholespace'. For the Dirichlet operator in 1D the local 1D formula is
    reported too, since it is the natural comparison there.
    """
    a = check_alpha(alpha)
    out = []
    if kind == "local":
        echo = {"n": n, "alpha": a, "D": diam.D, "d": diam.d}
        out.append(BoundRecord("ConjI_local", local_gap_lower_bound(n, a, diam), echo))
        out.append(BoundRecord("Unified_lgap765", unified_gap_lower_bound(n, a, diam), echo))
        if a == 2.0:
            out.append(BoundRecord("Alpha2_gap2loc", alpha2_gap_lower_bound(diam), echo))
    elif kind in ("dirichlet", "classical"):
        echo = {"n": n, "alpha": a, "D": diam.D, "d": diam.d}
        out.append(BoundRecord("ConjII_dirichlet", classical_gap_lower_bound(n, a, diam), echo))
        if n == 1:
            out.append(BoundRecord("ConjI_local", local_gap_lower_bound(1, a, diam), echo))
        if a == 2.0:
            out.append(BoundRecord("Alpha2_gap2loc", alpha2_gap_lower_bound(diam), echo))
    elif kind == "wholespace":
        g1, g2 = gammas
        echo = {"n": n, "alpha": a, "gamma1": g1, "gamma2": g2}
        out.append(BoundRecord("WholeSpace_bdw876", wholespace_gap_lower_bound(a, g1, g2), echo))
    else:
        raise DomainError(f"unknown problem kind {kind!r}")
    return out


def _near_odd(alpha: float) -> bool:
    return abs(alpha - round(alpha)) < SEC_POLE_GUARD and int(round(alpha)) % 2 == 1


def _box1d_quadrature(alpha: float):
    S, _ = _kquad.stiffness_1d(2, alpha, 400 * math.pi, math.pi, q=20)
    return float(S[0, 0]), float(S[1, 1])


def _box1d_F(alpha, z):
    return hyp1f2(2.0, 2.0 - alpha / 2, 2.5 - alpha / 2, z)


def eigs_box1d_asymptotic(alpha):
    """Energies of sqrt(2) sin(pi x), sqrt(2) sin(2 pi x) on (0,1).

    Closed form in 1F2 functions; near alpha = 1, where sec(alpha pi/2)
    has a pole and the hypergeometric factor a zero, the energy integral
    is evaluated directly instead.
    """
    a = check_alpha(alpha)
    if _near_odd(a):
        return _box1d_quadrature(a)
    pref = math.pi**2.5 / (math.cos(a * math.pi / 2) * gamma(2 - a / 2) * gamma((5 - a) / 2))
    E1 = 2.0 ** (a - 2) * pref * _box1d_F(a, -math.pi**2 / 4)
    # the l = 2 energy carries the opposite sign: its integrand has 1 - cos k
    E2 = -(2.0**a) * pref * _box1d_F(a, -math.pi**2)
    return E1, E2


def gap_box1d_asymptotic(alpha) -> float:
    """E2 - E1 of :func:`eigs_box1d_asymptotic` as one closed form.

    -2 pi^2 sec(a pi/2) / Gamma(4-a) * [4 F(-pi^2) + F(-pi^2/4)],
    F = 1F2(2; 2-a/2, 5/2-a/2; .), by the Gamma duplication formula.
    """
    a = check_alpha(alpha)
    if _near_odd(a):
        E1, E2 = _box1d_quadrature(a)
        return E2 - E1
    pref = 2.0 * math.pi**2 / (math.cos(a * math.pi / 2) * gamma(4 - a))
    return -pref * (4.0 * _box1d_F(a, -math.pi**2) + _box1d_F(a, -math.pi**2 / 4))


def eigs_box2d_asymptotic(alpha, L: float):
    """Energies of the (1,1) and (2,1) sine modes on (0,1) x (0,L), 0 < L <= 1."""
    a = check_alpha(alpha)
    if not 0 < L <= 1:
        raise DomainError("L must lie in (0, 1]")
    K = 400 * math.pi
    K2 = math.pi * math.ceil(K * L / math.pi)
    S, _ = _kquad.stiffness_2d(2, 1, 1.0, L, a, K, K2, math.pi, math.pi)
    return float(S[0, 0, 0, 0]), float(S[1, 1, 0, 0])


def eigs_harmonic1d_asymptotic(alpha, gamma_: float):
    """Energies of the two lowest harmonic-oscillator states for -d^2 + gamma^2 x^2."""
    a = check_alpha(alpha)
    if not gamma_ > 0:
        raise DomainError("gamma must be positive")
    c = gamma_ ** (a / 2) / math.sqrt(math.pi)
    return gamma_ / 2 + c * gamma((1 + a) / 2), 1.5 * gamma_ + 2 * c * gamma((3 + a) / 2)


def gap_harmonic1d_asymptotic(alpha, gamma_: float) -> float:
    a = check_alpha(alpha)
    if not gamma_ > 0:
        raise DomainError("gamma must be positive")
    return gamma_ + a * gamma_ ** (a / 2) / math.sqrt(math.pi) * gamma((1 + a) / 2)


def gap_harmonic2d_asymptotic(alpha, eta: float, form: str = "derived", nodes: int | None = None) -> float:
    """First-order gap for V = x^2 + eta^2 y^2 (gamma = 1, eta >= 1).

    ``form='derived'`` evaluates

        1 + 1/(pi sqrt(eta)) iint (2 k1^2 - 1) |k|^alpha exp(-(k1^2 + k2^2/eta)) dk,

    the energy difference of the first two alpha = 2 states, which gives
    exactly 2 at alpha = 2. ``form='printed'`` evaluates the variant with
    (2 k1^2 + 1), |k|^(2 alpha) and a leading minus sign. Both reduce to
    one angular integral after the radial Gaussian moments are taken in
    closed form; the angular integrand is smooth and periodic, so the
    trapezoidal rule converges geometrically. Its peaks have width
    ~ 1/sqrt(eta), which sets the default node count.
    """
    a = check_alpha(alpha)
    if not eta >= 1:
        raise DomainError("eta must be at least 1")
    if nodes is None:
        nodes = 4 * max(128, int(math.ceil(64 * math.sqrt(eta))))
    th = 2 * math.pi * np.arange(nodes) / nodes
    c2 = np.cos(th) ** 2
    A = c2 + np.sin(th) ** 2 / eta
    if form == "derived":
        s = a / 2
        f = c2 * gamma(s + 2) / A ** (s + 2) - 0.5 * gamma(s + 1) / A ** (s + 1)
        return 1.0 + float(np.mean(f)) * 2 * math.pi / (math.pi * math.sqrt(eta))
    if form == "printed":
        s = a
        f = c2 * gamma(s + 2) / A ** (s + 2) + 0.5 * gamma(s + 1) / A ** (s + 1)
        return 1.0 - float(np.mean(f)) * 2 * math.pi / (math.pi * math.sqrt(eta))
    raise DomainError("form must be 'derived' or 'printed'")


def gap_harmonic2d_closed_form(alpha, eta: float) -> float:
    """Closed form of the derived first-order gap in Gauss functions.

    1 + eta^(a/2) [Gamma(a/2+2) 2F1(-a/2, 3/2; 2; z) - Gamma(a/2+1) 2F1(-a/2, 1/2; 1; z)],
    z = 1 - 1/eta.
    """
    a = check_alpha(alpha)
    if not eta >= 1:
        raise DomainError("eta must be at least 1")
    z = 1.0 - 1.0 / eta
    s = a / 2
    # terms decay like z^k, so large eta needs many terms
    ctrl = SeriesControl(max_terms=200000)
    F1 = hyp2f1(-s, 1.5, 2.0, z, ctrl)
    F0 = hyp2f1(-s, 0.5, 1.0, z, ctrl)
    return 1.0 + eta**s * (gamma(s + 2) * F1 - gamma(s + 1) * F0)
