"""Gamma, hypergeometric series and the fractional Laplacian constant.

Everything here works on real scalars in double precision. The series
routines stop once two consecutive terms fall below ``rel_tol`` times the
running sum, which keeps alternating series from stopping on an
accidentally tiny term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesControl",
    "gamma",
    "hyp1f2",
    "hyp2f1",
    "hyp_pfq",
    "frac_laplacian_constant",
]

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation controls for the hypergeometric series."""

    rel_tol: float = 1e-15
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")


DEFAULT_SERIES = SeriesControl()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _sin_pi(x: float) -> float:
    """sin(pi x) with the period removed exactly first; accurate near integers."""
    n = round(x)
    r = x - n  # exact for |x| < 2^52
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def gamma(x: float) -> float:
    """Gamma function for real ``x``.

    Lanczos approximation for x >= 0.5 and the reflection formula below
    that. Raises :class:`DomainError` at the poles 0, -1, -2, ...
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at x = {x:g}")
    if x < 0.5:
        return math.pi / (_sin_pi(x) * gamma(1.0 - x))
    if float(x).is_integer() and x <= 171:
        return float(math.factorial(int(x) - 1))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * acc * math.exp((x + 0.5) * math.log(t) - t)


def hyp_pfq(a, b, z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Generalized hypergeometric series pFq(a; b; z) by direct summation.

    No analytic continuation is attempted; the caller is responsible for
    ``z`` lying inside the disc of convergence when p = q + 1.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    for bj in b:
        if _is_nonpositive_integer(bj):
            raise DomainError(f"lower parameter {bj:g} is a non-positive integer")
    term = 1.0
    total = 1.0
    small_run = 0
    for k in range(ctrl.max_terms):
        num = 1.0
        for ai in a:
            num *= ai + k
        den = float(k + 1)
        for bj in b:
            den *= bj + k
        term *= num / den * z
        total += term
        if term == 0.0 and num == 0.0:
            # an upper parameter is a non-positive integer: polynomial case
            return total
        if abs(term) <= ctrl.rel_tol * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise ConvergenceError(
        f"{len(a)}F{len(b)} series did not converge in {ctrl.max_terms} terms (z={z:g})"
    )


def hyp1f2(a: float, b1: float, b2: float, z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """1F2(a; b1, b2; z). Entire in z, so only ``max_terms`` limits it."""
    return hyp_pfq((a,), (b1, b2), z, ctrl)


def hyp2f1(a: float, b: float, c: float, z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Gauss series 2F1(a, b; c; z) for |z| < 1.

    For z < 0 the Pfaff transformation
    2F1(a, b; c; z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
    moves the argument into (0, 1/2), avoiding the cancellation of an
    alternating series near z = -1.
    """
    if not abs(z) < 1.0:
        raise DomainError("hyp2f1 series requires |z| < 1")
    if z < 0:
        return (1.0 - z) ** (-a) * hyp_pfq((a, c - b), (c,), z / (z - 1.0), ctrl)
    return hyp_pfq((a, b), (c,), z, ctrl)


def frac_laplacian_constant(n: int, alpha: float) -> float:
    """Normalization constant C_{n,alpha} of the singular-integral fractional Laplacian.

    C = 2^alpha Gamma((n+alpha)/2) / (pi^{n/2} |Gamma(-alpha/2)|), defined for
    0 < alpha < 2. At alpha = 2 Gamma(-1) is a pole and the operator is the
    ordinary Laplacian, so the call is rejected.
    """
    if n not in (1, 2, 3):
        raise DomainError("n must be 1, 2 or 3")
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise DomainError("frac_laplacian_constant needs 0 < alpha < 2")
    return 2.0**alpha * gamma((n + alpha) / 2) / (math.pi ** (n / 2) * abs(gamma(-alpha / 2)))
