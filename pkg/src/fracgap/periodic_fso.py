"""Periodic FSO on a box via plane waves.

On the torus both fractional Laplacians coincide: e^{2 pi i m.x/L} has
eigenvalue |2 pi m/L|^alpha. A potential with Fourier coefficients V_q
couples m and m' through V_{m-m'}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import Box, check_alpha
from .spectrum import DEGENERACY_TOL, Spectrum, make_report, symmetric_eigh

__all__ = [
    "PlaneWaveSpec",
    "solve_periodic",
    "periodic_gap_analytic",
    "phase_diagram_sweep",
    "fourier_coefficients",
    "BRANCHES",
]

HERMITIAN_TOL = 1e-12
BRANCHES = {(1, 1): "L1=L2", (0, 1): "L2<L1<=2L2", (2, 0): "L1>=2L2"}


@dataclass(frozen=True)
class PlaneWaveSpec:
    """Frequencies m_j in -M_j..M_j."""

    modes_per_dim: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in np.atleast_1d(self.modes_per_dim))
        if any(v < 2 for v in m):
            raise DomainError("plane-wave spec needs M >= 2")
        object.__setattr__(self, "modes_per_dim", m)

    def frequencies(self, n: int) -> list:
        M = np.broadcast_to(self.modes_per_dim, (n,))
        return list(itertools.product(*(range(-int(Mj), int(Mj) + 1) for Mj in M)))


def _check_hermitian(coeffs: dict, n: int) -> dict:
    out = {}
    for q, v in coeffs.items():
        q = tuple(int(x) for x in np.atleast_1d(q))
        if len(q) != n:
            raise DomainError(f"frequency {q} has the wrong dimension")
        out[q] = complex(v)
    for q, v in out.items():
        partner = out.get(tuple(-x for x in q), 0.0)
        if abs(v - np.conj(partner)) > HERMITIAN_TOL * max(1.0, abs(v)):
            raise DomainError(f"coefficients are not Hermitian at frequency {q}: V(-q) != conj V(q)")
    return out


def _real_basis(freqs):
    """Unitary U mapping plane waves to cos/sin combinations.

    Each pair {m, -m} with m lexicographically positive gives
    (e_m + e_-m)/sqrt2 and (e_m - e_-m)/(i sqrt2); m = 0 stays.
    Returns U and the nonnegative representative of each column.
    """
    pos = {m: i for i, m in enumerate(freqs)}
    size = len(freqs)
    U = np.zeros((size, size), dtype=complex)
    reps = []
    col = 0
    c = 1 / math.sqrt(2)
    for m in freqs:
        neg = tuple(-x for x in m)
        if m == neg:
            U[pos[m], col] = 1.0
            reps.append(m)
            col += 1
        elif m > neg:
            U[pos[m], col], U[pos[neg], col] = c, c
            U[pos[m], col + 1], U[pos[neg], col + 1] = -1j * c, 1j * c
            reps += [m, m]
            col += 2
    return U, reps


def _assemble(box: Box, alpha: float, coeffs: dict, freqs):
    F = np.array(freqs, dtype=float)
    k = 2 * math.pi * F / np.asarray(box.lengths)
    H = np.diag(np.linalg.norm(k, axis=1) ** alpha).astype(complex)
    if coeffs:
        index = {m: i for i, m in enumerate(freqs)}
        for i, m in enumerate(freqs):
            for q, v in coeffs.items():
                j = index.get(tuple(a - b for a, b in zip(m, q)))
                if j is not None:
                    H[i, j] += v
    return H


def _levels(values, tol_rel=1e-10):
    """Distinct levels of ascending values, ties within tol_rel merged."""
    levels = []
    for v in values:
        if not levels or v - levels[-1] > tol_rel * max(1.0, abs(v)):
            levels.append(float(v))
    return levels


def solve_periodic(box: Box, alpha, potential_fourier: dict | None = None, spec: PlaneWaveSpec | None = None):
    """Plane-wave solve of the periodic problem on ``box``.

    With no potential the gap is between the two smallest distinct positive
    levels (the constant mode at 0 is skipped); otherwise between the two
    smallest eigenvalues. The convention used is echoed in the report.
    """
    a = check_alpha(alpha)
    if not isinstance(box, Box):
        raise DomainError("periodic solver needs a box")
    spec = spec or PlaneWaveSpec((8,) * box.n if box.n > 1 else (32,))
    coeffs = _check_hermitian(potential_fourier or {}, box.n)
    coeffs = {q: v for q, v in coeffs.items() if v != 0}
    freqs = spec.frequencies(box.n)
    H = _assemble(box, a, coeffs, freqs)
    U, reps = _real_basis(freqs)
    Hr = U.conj().T @ H @ U
    imag = float(np.max(np.abs(Hr.imag)))
    if imag > 1e-10 * max(1.0, float(np.max(np.abs(Hr.real)))):
        raise DomainError("real-basis matrix is not real; coefficients inconsistent")
    Hr = Hr.real
    Hr = 0.5 * (Hr + Hr.T)
    w, v = symmetric_eigh(Hr)
    echo = {"problem": "periodic", "alpha": a, "lengths": list(box.lengths),
            "modes": list(spec.modes_per_dim),
            "potential": {str(list(q)): [c.real, c.imag] for q, c in sorted(coeffs.items())}}
    bounds = []
    if not coeffs:
        positive = [x for x in _levels(w) if x > DEGENERACY_TOL]
        echo["gap_convention"] = "two smallest distinct positive levels"
        report = make_report(positive, bounds, echo)
    else:
        echo["gap_convention"] = "two smallest eigenvalues"
        report = make_report(w, bounds, echo)
    levels = _levels(w)
    mult = [int(np.sum(np.abs(w - x) <= 1e-10 * max(1.0, abs(x)))) for x in levels[:6]]
    spectrum = Spectrum(w, v, "plane-wave", {"frequencies": reps, "size": len(freqs),
                                             "levels": levels[:6], "multiplicities": mult})
    return spectrum, report


def periodic_gap_analytic(n: int, alpha, L) -> float:
    """Closed-form V = 0 periodic gap; lengths are sorted so L1 >= L2."""
    a = check_alpha(alpha)
    L = sorted((float(x) for x in np.atleast_1d(L)), reverse=True)
    if n != len(L) or n not in (1, 2):
        raise DomainError("need n in {1, 2} and n lengths")
    c = (2 * math.pi) ** a
    if n == 1:
        return c * (2.0**a - 1.0) / L[0] ** a
    L1, L2 = L
    if L1 == L2:
        return c * (2.0 ** (a / 2) - 1.0) / L1**a
    if L1 <= 2 * L2:
        return c / L2**a - c / L1**a
    return c * (2.0**a - 1.0) / L1**a


def _branch(level, freqs, diag, tol=1e-10):
    """Lexicographically first nonnegative mode realizing ``level``."""
    hits = sorted({tuple(abs(x) for x in m) for m, d in zip(freqs, diag) if abs(d - level) <= tol * max(1.0, level)})
    return hits[0] if hits else None


def phase_diagram_sweep(alpha, ratios, spec: PlaneWaveSpec | None = None) -> list:
    """Rows (ratio, E0, E1, E2, E3, delta, branch, mode) with L2 = 1, L1 = ratio.

    E0..E3 are the four lowest distinct levels (E0 = 0), delta = E2 - E1,
    and ``branch`` names the case of the closed form realized by the mode
    of the second positive level.
    """
    a = check_alpha(alpha)
    spec = spec or PlaneWaveSpec((6, 6))
    rows = []
    for r in ratios:
        r = float(r)
        if not r >= 1:
            raise DomainError("ratios must be at least 1")
        box = Box((r, 1.0))
        sp, rep = solve_periodic(box, a, None, spec)
        freqs = spec.frequencies(2)
        k = 2 * math.pi * np.array(freqs, dtype=float) / np.array([r, 1.0])
        diag = np.linalg.norm(k, axis=1) ** a
        levels = _levels(sp.eigenvalues)
        mode = _branch(levels[2], freqs, diag)
        rows.append({
            "ratio": r,
            "E0": levels[0], "E1": levels[1], "E2": levels[2], "E3": levels[3],
            "delta": rep.delta,
            "branch": BRANCHES.get(mode, "other"),
            "mode": mode,
        })
    return rows


def fourier_coefficients(potential, box: Box, max_freq: int, samples: int | None = None) -> dict:
    """V_q = |box|^-1 int V e^{-2 pi i q.x/L}, |q_j| <= max_freq, by the FFT
    of point samples (exact for trigonometric polynomials of low degree)."""
    S = samples or max(64, 4 * max_freq + 4)
    axes = [np.arange(S) * L / S for L in box.lengths]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(potential(mesh), dtype=float)
    F = np.fft.fftn(vals) / vals.size
    out = {}
    for q in itertools.product(range(-max_freq, max_freq + 1), repeat=box.n):
        c = complex(F[tuple(x % S for x in q)])
        if abs(c) > 1e-14 * max(1.0, abs(F.flat[0])):
            out[q] = c
    # enforce exact conjugate symmetry lost to rounding
    for q in list(out):
        nq = tuple(-x for x in q)
        if nq in out:
            avg = 0.5 * (out[q] + np.conj(out[nq]))
            out[q], out[nq] = avg, np.conj(avg)
        else:
            del out[q]
    return out
