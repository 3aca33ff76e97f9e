"""Classical (zero-extension) fractional Schrodinger operator on boxes.

Sine-Galerkin: the kinetic energy of two zero-extended sine modes is
(2 pi)^-n int |k|^alpha phi_m(k) conj(phi_n(k)) dk, evaluated in Fourier
space by the panel rules of :mod:`fracgap._kquad`. The eigenfunctions
behave like dist(x, boundary)^(alpha/2), so Galerkin eigenvalues approach
their limits from above at a rate ~ 1/M; ``extrapolate=True`` applies one
Richardson step M -> 2M.

A finite-difference discretization (fractional centred differences) is
provided as an independent 1D check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import _kquad
from .asymptotics_bounds import classical_gap_lower_bound, evaluate_bounds
from .errors import DomainError, QuadratureError
from .geometry import Box, check_alpha, diameters
from .local_fso import sine_potential_matrix
from .potentials import Zero
from .spectrum import Spectrum, make_report, symmetric_eigh

__all__ = [
    "KQuadrature",
    "sine_mode_fourier_transform",
    "assemble_classical_hamiltonian",
    "solve_classical_gap",
    "fd_fractional_1d",
    "fd_coefficients",
    "classical_gap_lower_bound",
    "DEFAULT_MODES",
]

DEFAULT_MODES = {1: 24, 2: 16}


@dataclass(frozen=True)
class KQuadrature:
    """Fourier-space quadrature controls.

    k_max: truncation radius in k (1/length); the tail beyond it is
    integrated analytically when ``tail`` is set. h_k: panel width in k.
    ``None`` picks max(200, 3M) pi / min L and pi / max L, which scale
    with the box so dilated problems see identical rules.
    """

    k_max: float | None = None
    h_k: float | None = None
    tail: bool = True
    nodes_per_panel: int = 16

    def __post_init__(self):
        if self.k_max is not None and not self.k_max > 0:
            raise DomainError("k_max must be positive")
        if self.h_k is not None and not self.h_k > 0:
            raise DomainError("h_k must be positive")
        if self.nodes_per_panel < 4:
            raise DomainError("nodes_per_panel must be at least 4")

    def resolve(self, box: Box, modes):
        """Per-axis (K, width) in the scaled variable kappa_j = k_j L_j.

        Widths are pi/r for an integer r, and every K is a multiple of pi,
        which keeps the oscillating part of the tail expansion small.
        """
        Lmin, Lmax = min(box.lengths), max(box.lengths)
        k_max = self.k_max if self.k_max is not None else max(200, 3 * max(modes)) * math.pi / Lmin
        h_k = self.h_k if self.h_k is not None else math.pi / Lmax
        out = []
        for L, M in zip(box.lengths, modes):
            r = max(1, math.ceil(math.pi / (h_k * L) - 1e-9))
            K = math.pi * math.ceil(k_max * L / math.pi - 1e-9)
            if K <= M * math.pi:
                raise QuadratureError("k_max must exceed the largest mode frequency")
            out.append((K, math.pi / r))
        return out


def sine_mode_fourier_transform(m: int, L: float, k):
    """Fourier transform int_0^L sqrt(2/L) sin(m pi x/L) exp(-i k x) dx.

    Near k = +-m pi / L the quotient form is replaced by its Taylor
    expansion; the limit there is -+ i / sqrt(2) times sqrt(L).
    """
    if int(m) < 1 or not L > 0:
        raise DomainError("need m >= 1 and L > 0")
    k = np.asarray(k, dtype=float)
    val = math.sqrt(L) * _kquad.unit_transform([int(m)], np.ravel(k) * L)[0]
    return val.reshape(k.shape) if k.ndim else complex(val[0])


def _modes(box, modes_per_dim):
    if modes_per_dim is None:
        if box.n not in DEFAULT_MODES:
            raise DomainError("classical solver supports n = 1, 2")
        return (DEFAULT_MODES[box.n],) * box.n
    M = tuple(int(v) for v in np.broadcast_to(modes_per_dim, (box.n,)))
    if any(v < 2 for v in M):
        raise DomainError("need at least 2 modes per dimension")
    return M


def stiffness_matrix(box: Box, alpha, modes_per_dim, kq: KQuadrature | None = None):
    """Kinetic matrix of the tensor sine modes, lexicographic order.

    Results are cached per (box, alpha, modes, rule); a copy is returned.
    """
    alpha = check_alpha(alpha)
    kq = kq or KQuadrature()
    M = _modes(box, modes_per_dim)
    return _stiffness_cached(box, alpha, M, kq).copy()


@lru_cache(maxsize=16)
def _stiffness_cached(box: Box, alpha: float, M: tuple, kq: KQuadrature):
    rules = kq.resolve(box, M)
    q = kq.nodes_per_panel
    if box.n == 1:
        (K, width), L = rules[0], box.lengths[0]
        S, _ = _kquad.stiffness_1d(M[0], alpha, K, width, q, kq.tail)
        return S * L**-alpha
    if box.n == 2:
        (K1, w1), (K2, w2) = rules
        L1, L2 = box.lengths
        S4, _ = _kquad.stiffness_2d(M[0], M[1], L1, L2, alpha, K1, K2, w1, w2, q, kq.tail)
        S = S4.transpose(0, 2, 1, 3).reshape(M[0] * M[1], M[0] * M[1])
        return 0.5 * (S + S.T)
    raise DomainError("classical solver supports n = 1, 2")


def assemble_classical_hamiltonian(box: Box, alpha, modes_per_dim=None, potential=None, kq=None):
    """Stiffness plus potential matrix over tensor sine modes (lexicographic).

    The imaginary part of each Fourier integral cancels exactly between
    k and -k, so only real parts are ever formed.
    """
    potential = Zero() if potential is None else potential
    M = _modes(box, modes_per_dim)
    S = stiffness_matrix(box, alpha, M, kq)
    return S + sine_potential_matrix(box, M, potential)


def _echo(box, alpha, potential, M, kq, extrapolate):
    return {
        "problem": "classical",
        "alpha": alpha,
        "domain": repr(box),
        "modes": list(M),
        "kquad": repr(kq),
        "extrapolate": extrapolate,
        "potential": potential.describe() if hasattr(potential, "describe") else repr(potential),
    }


def solve_classical_gap(box: Box, alpha, potential=None, modes=None, kq=None, extrapolate: bool = False, count: int = 6):
    """Smallest eigenvalues and gap of the classical operator on ``box``.

    With ``extrapolate`` the problem is solved with M and 2M modes per side
    and the first ``count`` eigenvalues are combined as 2 E(2M) - E(M);
    eigenvectors come from the finer solve.
    """
    alpha = check_alpha(alpha)
    if not isinstance(box, Box):
        raise DomainError("classical solver needs a box")
    potential = Zero() if potential is None else potential
    kq = kq or KQuadrature()
    M = _modes(box, modes)
    H = assemble_classical_hamiltonian(box, alpha, M, potential, kq)
    w, v = symmetric_eigh(H)
    meta = {"modes": M, "kquad": kq}
    values = w
    if extrapolate:
        M2 = tuple(2 * m for m in M)
        H2 = assemble_classical_hamiltonian(box, alpha, M2, potential, kq)
        w2, v2 = symmetric_eigh(H2)
        c = min(count, w.size)
        values = 2.0 * w2[:c] - w[:c]
        meta.update({"coarse": w[:c], "fine": w2[:c], "modes_fine": M2})
        w, v = w2, v2
    bounds = [(b.name, b.value) for b in evaluate_bounds("dirichlet", box.n, alpha, diam=diameters(box))]
    spec = Spectrum(w, v, "sine", meta)
    report = make_report(values, bounds, _echo(box, alpha, potential, M, kq, extrapolate))
    return spec, report


def fd_coefficients(alpha, count: int) -> np.ndarray:
    """g_j = (-1)^j Gamma(a+1) / (Gamma(a/2-j+1) Gamma(a/2+j+1)), j = 0..count-1.

    Generated by g_{j+1} = (1 - (a+1)/(a/2+j+1)) g_j, which avoids the
    Gamma poles of the closed form.
    """
    a = float(alpha)
    g = np.empty(count)
    g[0] = math.gamma(a + 1) / math.gamma(a / 2 + 1) ** 2
    for j in range(count - 1):
        g[j + 1] = (1.0 - (a + 1) / (a / 2 + j + 1)) * g[j]
    return g


def fd_fractional_1d(alpha, L: float, h: float, potential=None) -> np.ndarray:
    """Fractional centred-difference matrix on the interior nodes of (0, L).

    Toeplitz with first row g_j / h^alpha, acting on zero-extended grid
    functions, plus the potential sampled at the nodes.
    """
    a = check_alpha(alpha)
    if a >= 2.0:
        raise DomainError("fractional differences need alpha < 2")
    N = int(round(L / h))
    if N < 2 or abs(N * h - L) > 1e-9 * L:
        raise DomainError("h must divide L")
    A = scipy.linalg.toeplitz(fd_coefficients(a, N - 1)) / h**a
    if potential is not None:
        x = (np.arange(1, N) * h)[:, None]
        A = A + np.diag(np.asarray(potential(x), dtype=float))
    return A
