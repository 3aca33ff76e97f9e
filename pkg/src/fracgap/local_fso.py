"""Local (spectral) fractional Schrodinger operator.

The operator raises each Dirichlet eigenvalue to the power alpha/2, so in
an eigenbasis it is diagonal and only the potential couples modes.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .asymptotics_bounds import evaluate_bounds, local_gap_lower_bound
from .eigenbasis import (
    AnalyticBox,
    AnalyticSine,
    FiniteDifferenceMask,
    GridVector,
    box_eigenpairs,
    fd_masked_eigenpairs,
)
from .errors import DomainError, QuadratureError
from .geometry import Box, check_alpha, diameters
from .potentials import Zero, is_zero
from .spectrum import Spectrum, make_report, symmetric_eigh

__all__ = [
    "LocalOptions",
    "assemble_local_hamiltonian",
    "solve_local_gap",
    "local_gap_lower_bound",
    "sine_potential_matrix",
    "box_quadrature_axes",
]

ASYMMETRY_TOL = 1e-10


class LocalOptions:
    """Refinement controls for the analytic box basis."""

    def __init__(self, refine: bool = True, rel_tol: float = 1e-8, max_modes_per_dim=None):
        self.refine = bool(refine)
        self.rel_tol = float(rel_tol)
        self.max_modes_per_dim = max_modes_per_dim

    def cap(self, n: int) -> int:
        if self.max_modes_per_dim is not None:
            return int(self.max_modes_per_dim)
        return {1: 256, 2: 32, 3: 12}[n]


def box_quadrature_axes(box: Box, order: int, breakpoints=None):
    """Composite Gauss-Legendre nodes and weights on each side of ``box``.

    ``breakpoints(axis)`` may list interior points where the integrand
    jumps; every resulting sub-interval gets ``order`` nodes.
    """
    x, w = leggauss(int(order))
    axes = []
    for j, L in enumerate(box.lengths):
        cuts = [0.0, L]
        if breakpoints is not None:
            cuts += [c for c in breakpoints(j) if 0.0 < c < L]
        cuts = sorted(set(cuts))
        nodes, weights = [], []
        for a, b in zip(cuts[:-1], cuts[1:]):
            nodes.append(a + (b - a) * (1 + x) / 2)
            weights.append(w * (b - a) / 2)
        axes.append((np.concatenate(nodes), np.concatenate(weights)))
    return axes


def _sine_table(M, L, nodes):
    m = np.arange(1, M + 1)[:, None]
    return math.sqrt(2.0 / L) * np.sin(m * math.pi * nodes[None, :] / L)


def sine_potential_matrix(box: Box, modes_per_dim, potential, order=None):
    """V_mn = int_box V u_m u_n over tensor sine modes in lexicographic order.

    Default rule: 2 * max(M_j) + 8 Gauss-Legendre nodes per side, per
    smooth piece of V.
    """
    M = tuple(int(v) for v in np.broadcast_to(modes_per_dim, (box.n,)))
    size = int(np.prod(M))
    if is_zero(potential):
        return np.zeros((size, size))
    if order is None:
        order = 2 * max(M) + 8
    bp = getattr(potential, "breakpoints", None)
    axes = box_quadrature_axes(box, order, bp)
    mesh = np.stack(np.meshgrid(*(a[0] for a in axes), indexing="ij"), axis=-1)
    Vw = np.asarray(potential(mesh), dtype=float)
    for j, (_, w) in enumerate(axes):
        shape = [1] * box.n
        shape[j] = -1
        Vw = Vw * w.reshape(shape)
    tables = [_sine_table(Mj, L, a[0]) for Mj, L, a in zip(M, box.lengths, axes)]
    if box.n == 1:
        U = tables[0]
        out = (U * Vw) @ U.T
    elif box.n == 2:
        U1, U2 = tables
        # X[a, m2, n2] = sum_b Vw[a, b] U2[m2, b] U2[n2, b]
        P2 = (U2[:, None, :] * U2[None, :, :]).reshape(M[1] ** 2, -1)
        X = Vw @ P2.T
        P1 = (U1[:, None, :] * U1[None, :, :]).reshape(M[0] ** 2, -1)
        out = (P1 @ X).reshape(M[0], M[0], M[1], M[1]).transpose(0, 2, 1, 3).reshape(size, size)
    else:
        U1, U2, U3 = tables
        out = np.einsum("ia,ja,kb,lb,pc,qc,abc->ikpjlq", U1, U1, U2, U2, U3, U3, Vw, optimize=True)
        out = out.reshape(size, size)
    asym = np.max(np.abs(out - out.T)) if size else 0.0
    scale = max(1.0, float(np.max(np.abs(out))))
    if asym > ASYMMETRY_TOL * scale:
        raise QuadratureError(f"potential matrix asymmetry {asym:.3g} exceeds tolerance")
    return 0.5 * (out + out.T)


def _grid_potential_matrix(modes, potential):
    grid = modes[0].descriptor.grid
    U = np.stack([m.descriptor.values for m in modes])
    V = np.asarray(potential(grid.points), dtype=float)
    out = (U * (V * grid.cell_volume)) @ U.T
    asym = np.max(np.abs(out - out.T))
    if asym > ASYMMETRY_TOL * max(1.0, float(np.max(np.abs(out)))):
        raise QuadratureError(f"potential matrix asymmetry {asym:.3g} exceeds tolerance")
    return 0.5 * (out + out.T)


def assemble_local_hamiltonian(modes, alpha, potential, quad=None):
    """H = diag(lambda_m^(alpha/2)) + V_hat in the basis ``modes``.

    ``quad`` is the Gauss-Legendre order per side for analytic sine modes
    (default 2 * max index + 8); grid modes use the discrete inner product.
    """
    alpha = check_alpha(alpha)
    lam = np.array([m.eigenvalue for m in modes], dtype=float)
    H = np.diag(lam ** (alpha / 2))
    if is_zero(potential):
        return H
    first = modes[0].descriptor
    if isinstance(first, AnalyticSine):
        box = Box(first.lengths)
        idx = np.array([m.descriptor.indices for m in modes])
        M = tuple(int(v) for v in idx.max(axis=0))
        full = sine_potential_matrix(box, M, potential, quad)
        # map each mode to its lexicographic position in the full tensor set
        pos = np.ravel_multi_index(tuple((idx - 1).T), M)
        V = full[np.ix_(pos, pos)]
    elif isinstance(first, GridVector):
        V = _grid_potential_matrix(modes, potential)
    else:
        raise DomainError("unsupported mode descriptor")
    return H + V


def _modes_for(domain, basis):
    if isinstance(basis, AnalyticBox):
        if not isinstance(domain, Box):
            raise DomainError("the analytic basis needs a box domain")
        return box_eigenpairs(domain, basis.modes_per_dim)
    if isinstance(basis, FiniteDifferenceMask):
        return fd_masked_eigenpairs(domain, basis.h, basis.mode_count)
    raise DomainError(f"unsupported basis {basis!r}")


def _echo(domain, basis, alpha, potential):
    return {
        "problem": "local",
        "alpha": alpha,
        "domain": repr(domain),
        "basis": repr(basis),
        "potential": potential.describe() if hasattr(potential, "describe") else repr(potential),
    }


def _solve_once(domain, basis, alpha, potential):
    modes = _modes_for(domain, basis)
    H = assemble_local_hamiltonian(modes, alpha, potential)
    w, v = symmetric_eigh(H)
    return modes, w, v


def default_basis(domain):
    if isinstance(domain, Box):
        return AnalyticBox((16,) * domain.n if domain.n > 1 else (32,))
    return FiniteDifferenceMask(h=1 / 64, mode_count=40)


def solve_local_gap(domain, basis=None, alpha=1.0, potential=None, options: LocalOptions | None = None):
    """Two smallest eigenvalues and the gap of the local operator.

    For the analytic box basis with a non-zero potential, modes per side
    are doubled until the gap changes by at most ``rel_tol`` relative or
    the cap is hit; the last change is recorded in the metadata.
    """
    alpha = check_alpha(alpha)
    potential = Zero() if potential is None else potential
    basis = default_basis(domain) if basis is None else basis
    options = options or LocalOptions()
    modes, w, v = _solve_once(domain, basis, alpha, potential)
    change = None
    if isinstance(basis, AnalyticBox) and options.refine and not is_zero(potential):
        cap = options.cap(domain.n)
        while True:
            nxt = tuple(min(2 * m, cap) for m in basis.modes_per_dim)
            if nxt == basis.modes_per_dim:
                break
            modes2, w2, v2 = _solve_once(domain, AnalyticBox(nxt), alpha, potential)
            d_old, d_new = w[1] - w[0], w2[1] - w2[0]
            change = abs(d_new - d_old) / max(abs(d_new), 1e-300)
            basis, modes, w, v = AnalyticBox(nxt), modes2, w2, v2
            if change <= options.rel_tol:
                break
    diam = diameters(domain)
    bounds = [(b.name, b.value) for b in evaluate_bounds("local", domain.n, alpha, diam=diam)]
    meta = {"basis": basis, "size": len(modes), "gap_change": change}
    if isinstance(basis, FiniteDifferenceMask):
        meta["note"] = "discrete spectral power of the FD Laplacian"
    spec = Spectrum(w, v, basis, meta)
    report = make_report(w, bounds, _echo(domain, basis, alpha, potential))
    return spec, report
