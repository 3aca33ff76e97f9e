"""Whole-space FSO with harmonic (plus trigonometric) potentials, and the
finite-well study.

For V = sum_j gamma_j^2 x_j^2 the Fourier transform turns the problem into
the local operator -sum_j gamma_j^2 d^2/dk_j^2 + |k|^alpha. Two
discretizations of that operator are provided:

* Hermite-Galerkin (default): products of Hermite functions in k_j/sigma_j,
  truncated to total degree < N. The |k|^alpha entries are computed in polar
  coordinates with a generalized Gauss-Laguerre rule in r^2, which is exact
  for the radial part, and a trapezoidal rule in angle.
* Finite differences on a truncated k-box with Dirichlet walls.

A term a cos(w.x) becomes (a/2)(T_w + T_-w) with (T_w f)(k) = f(k - w); a sin
term becomes (a/2i)(T_w - T_-w), which is imaginary. Both discretizations use
a basis of definite parity under k -> -k; multiplying the odd members by i
turns the Hermitian matrix into a real symmetric one (see ``_realify``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import scipy.linalg

from .asymptotics_bounds import evaluate_bounds, wholespace_gap_lower_bound
from .classical_fso import KQuadrature, assemble_classical_hamiltonian
from .errors import DomainError, SolverError
from .geometry import Box, check_alpha
from .potentials import Quadratic, QuadraticPlusTrig, TrigTerm, Well
from .spectrum import Spectrum, fix_signs, make_report, symmetric_eigh

__all__ = [
    "HarmonicSpec",
    "KGridSpec",
    "HermiteSpec",
    "assemble_fourier_space_hamiltonian",
    "assemble_hermite_hamiltonian",
    "solve_wholespace_gap",
    "wholespace_gap_lower_bound",
    "solve_well",
    "TruncationWarning",
    "EnclosureWarning",
]

TRUNCATION_MASS = 1e-6
ENCLOSURE_MASS = 1e-4
RAYLEIGH_TOL = 1e-8
# beyond this the Gaussian factors in the quadrature weights underflow
MAX_HERMITE_ORDER = 512
# k-grid matrices larger than this go through shift-invert Lanczos
SPARSE_THRESHOLD = 1500


class TruncationWarning(UserWarning):
    pass


class EnclosureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HarmonicSpec:
    """V(x) = sum_j gamma_j^2 x_j^2."""

    gammas: tuple

    def __post_init__(self):
        g = tuple(float(v) for v in np.atleast_1d(self.gammas))
        if not g or any(not v > 0 for v in g):
            raise DomainError("all gamma_j must be positive")
        if len(g) > 2:
            raise DomainError("whole-space solver supports n = 1, 2")
        object.__setattr__(self, "gammas", g)

    @property
    def n(self) -> int:
        return len(self.gammas)

    @property
    def gamma(self) -> float:
        return min(self.gammas)

    @property
    def eta(self) -> float:
        return max(self.gammas) / min(self.gammas)

    @classmethod
    def from_eta(cls, gamma: float, eta: float = 1.0, n: int = 2):
        if n == 1:
            return cls((gamma,))
        return cls((gamma, gamma * eta))

    def potential(self, trig_terms=()) -> QuadraticPlusTrig:
        return QuadraticPlusTrig(Quadratic(tuple(g * g for g in self.gammas)), tuple(trig_terms))


@dataclass(frozen=True)
class KGridSpec:
    """Truncated k-box (-R, R)^n with spacing h; 2R/h must be an integer."""

    radius: float
    spacing: float

    def __post_init__(self):
        if not (self.radius > 0 and self.spacing > 0):
            raise DomainError("radius and spacing must be positive")
        ratio = 2 * self.radius / self.spacing
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise DomainError("2 R / h must be an integer")

    @property
    def cells(self) -> int:
        return int(round(2 * self.radius / self.spacing))

    def nodes(self) -> np.ndarray:
        return -self.radius + self.spacing * np.arange(1, self.cells)

    @classmethod
    def default(cls, harm: HarmonicSpec, alpha, trig_terms=(), cells: int = 256):
        """R = 12 max(gamma)^(2/(2+alpha)), h = 2R/cells, then shrunk so
        every trig frequency is a multiple of h."""
        a = check_alpha(alpha)
        R = 12.0 * max(harm.gammas) ** (2 / (2 + a))
        h = 2 * R / cells
        freqs = [abs(w) for t in trig_terms for w in t.frequency if w != 0]
        if freqs:
            w0 = min(freqs)
            h = w0 / math.ceil(w0 / h - 1e-12)
            R = h * cells / 2
        return cls(R, h)


@dataclass(frozen=True)
class HermiteSpec:
    """Hermite-Galerkin controls: total degree < order; angular nodes
    (2D) default to a multiple of the order scaled by the anisotropy."""

    order: int | None = None
    angular_nodes: int | None = None

    def resolve(self, n: int) -> int:
        if self.order is not None:
            if not 4 <= int(self.order) <= MAX_HERMITE_ORDER:
                raise DomainError(f"Hermite order must lie in [4, {MAX_HERMITE_ORDER}]")
            return int(self.order)
        return 400 if n == 1 else 48


def _check_trig(harm, trig_terms):
    for t in trig_terms:
        if not isinstance(t, TrigTerm):
            raise DomainError("trig terms must be TrigTerm instances")
        if len(t.frequency) != harm.n:
            raise DomainError("trig frequency dimension does not match the potential")


def _realify(H: sp.spmatrix, A: sp.spmatrix, odd: np.ndarray):
    """Real symmetric form of H - (i/2) A, A real antisymmetric.

    In a basis of definite parity H (parity-even operators) has no
    even/odd couplings and A (from the sin terms) only has those. With the
    odd basis vectors multiplied by i the (even, odd) block of -(i/2) A
    becomes A_eo / 2 and the (odd, even) block -A_oe / 2 = A_eo^T / 2.
    """
    De = sp.diags((~odd).astype(float))
    Do = sp.diags(odd.astype(float))
    return (H + 0.5 * (De @ A @ Do - Do @ A @ De)).tocsr()


# ---------------------------------------------------------------------------
# finite differences on the k-box


def _fd_shift(nodes, h, w):
    """(T_w f)(k) = f(k - w) on the grid, zero outside the box."""
    s = int(round(w / h))
    n = nodes.size
    return sp.eye(n, k=-s, format="csr") if s else sp.eye(n, format="csr")


def _fd_axis_laplacian(n, h):
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def assemble_fourier_space_hamiltonian(harm: HarmonicSpec, alpha, trig_terms=(), kgrid: KGridSpec | None = None):
    """-sum gamma_j^2 d^2/dk_j^2 + |k|^alpha + trig shifts on the k-box.

    Returns ``(H, odd_mask)`` with H sparse, real symmetric and expressed in
    the parity basis e_i = (d_i + d_-i)/sqrt2, i(d_i - d_-i)/sqrt2 (plus the
    node at 0 when present); ``odd_mask`` marks the odd members.
    """
    a = check_alpha(alpha)
    trig_terms = tuple(trig_terms)
    _check_trig(harm, trig_terms)
    kgrid = kgrid or KGridSpec.default(harm, a, trig_terms)
    h = kgrid.spacing
    nodes = kgrid.nodes()
    for t in trig_terms:
        for w in t.frequency:
            if abs(w / h - round(w / h)) > 1e-9 * max(1.0, abs(w / h)):
                raise DomainError(f"trig frequency {w} is not a multiple of the k spacing {h}")
    m = nodes.size
    eye = sp.eye(m, format="csr")
    if harm.n == 1:
        H = harm.gammas[0] ** 2 * _fd_axis_laplacian(m, h) + sp.diags(np.abs(nodes) ** a)
        grids = [nodes]
    else:
        Lap = _fd_axis_laplacian(m, h)
        K1, K2 = np.meshgrid(nodes, nodes, indexing="ij")
        H = (harm.gammas[0] ** 2 * sp.kron(Lap, eye) + harm.gammas[1] ** 2 * sp.kron(eye, Lap)
             + sp.diags(np.hypot(K1, K2).ravel() ** a))
        grids = [nodes, nodes]
    H = sp.csr_matrix(H)
    A = sp.csr_matrix(H.shape)
    for t in trig_terms:
        T = _fd_shift(grids[0], h, t.frequency[0])
        for j in range(1, harm.n):
            T = sp.kron(T, _fd_shift(grids[j], h, t.frequency[j]), format="csr")
        if t.kind == "cos":
            H = H + 0.5 * t.amplitude * (T + T.T)
        else:
            A = A + t.amplitude * (T - T.T)
    # parity basis: pair node i with its mirror image
    size = H.shape[0]
    mirror = np.arange(size)[::-1]
    rows, cols, vals, odd = [], [], [], []
    c = 1 / math.sqrt(2)
    for i in range(size):
        j = mirror[i]
        if j < i:
            continue
        col = len(odd)
        if j == i:
            rows.append(i)
            cols.append(col)
            vals.append(1.0)
            odd.append(False)
            continue
        rows.extend([i, j, i, j])
        cols.extend([col, col, col + 1, col + 1])
        vals.extend([c, c, c, -c])
        odd.extend([False, True])
    P = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    odd = np.array(odd)
    Hp = (P.T @ H @ P).tocsr()
    Ap = (P.T @ A @ P).tocsr()
    out = _realify(Hp, Ap, odd)
    out = 0.5 * (out + out.T)
    return out.tocsr(), odd, P


# ---------------------------------------------------------------------------
# Hermite-Galerkin


def hermite_functions(N: int, u) -> np.ndarray:
    """psi_0..psi_{N-1} at u by the normalized three-term recurrence."""
    u = np.asarray(u, dtype=float)
    P = np.zeros((N,) + u.shape)
    P[0] = math.pi**-0.25 * np.exp(-0.5 * u * u)
    if N > 1:
        P[1] = math.sqrt(2.0) * u * P[0]
    for m in range(1, N - 1):
        P[m + 1] = math.sqrt(2.0 / (m + 1)) * u * P[m] - math.sqrt(m / (m + 1)) * P[m - 1]
    return P


def _second_derivative_1d(N: int) -> np.ndarray:
    """-d^2/du^2 in the Hermite functions: (2m+1)/2 and -sqrt((m+1)(m+2))/2."""
    D = np.diag((2.0 * np.arange(N) + 1.0) / 2.0)
    m = np.arange(N - 2)
    off = -np.sqrt((m + 1.0) * (m + 2.0)) / 2.0
    D[m, m + 2] = off
    D[m + 2, m] = off
    return D


def gauss_laguerre_scaled(q: int, a: float):
    """Nodes t and scaled weights w e^t of the q-point rule for t^a e^-t.

    Nodes are eigenvalues of the Jacobi matrix. The weights use the
    Christoffel form w = 1 / sum_k p_k(t)^2 over orthonormal p_k, evaluated
    with the factor e^-t/2 carried along, so w e^t keeps full relative
    accuracy even where w itself underflows.
    """
    i = np.arange(q, dtype=float)
    off = np.sqrt(i[1:] * (i[1:] + a))
    t = scipy.linalg.eigh_tridiagonal(2.0 * i + a + 1.0, off, eigvals_only=True)
    g_prev = np.zeros_like(t)
    g = np.exp(-0.5 * t - 0.5 * math.lgamma(a + 1.0))
    total = g * g
    for k in range(q - 1):
        b_prev = off[k - 1] if k else 0.0
        g_next = ((t - (2.0 * k + a + 1.0)) * g - b_prev * g_prev) / off[k]
        g_prev, g = g, g_next
        total += g * g
    return t, 1.0 / total


def gauss_hermite_scaled(q: int):
    """Nodes v and scaled weights w e^(v^2) of the q-point rule for e^(-v^2)."""
    i = np.arange(1, q, dtype=float)
    v = scipy.linalg.eigh_tridiagonal(np.zeros(q), np.sqrt(i / 2.0), eigvals_only=True)
    return v, 1.0 / np.sum(hermite_functions(q, v) ** 2, axis=0)


def _shift_1d(N: int, s: float) -> np.ndarray:
    """t_mn = int psi_m(u) psi_n(u - s) du by Gauss-Hermite (exact)."""
    v, w = gauss_hermite_scaled(N + 2)
    A = hermite_functions(N, v + s / 2)
    B = hermite_functions(N, v - s / 2)
    return (A * w) @ B.T


@lru_cache(maxsize=64)
def _abs_power_1d(N: int, alpha: float) -> np.ndarray:
    """int |u|^alpha psi_m psi_n du; t = u^2 and Gauss-Laguerre weight t^((alpha-1)/2)."""
    t, w = gauss_laguerre_scaled(N // 2 + 4, (alpha - 1) / 2)
    P = hermite_functions(N, np.sqrt(t))
    out = (P * w) @ P.T
    par = np.add.outer(np.arange(N), np.arange(N)) % 2
    out[par == 1] = 0.0
    return 0.5 * (out + out.T)


def _index_2d(N: int) -> np.ndarray:
    return np.array([(s - m2, m2) for s in range(N) for m2 in range(s + 1)], dtype=int)


@lru_cache(maxsize=64)
def _abs_power_2d(N: int, alpha: float, s1: float, s2: float, n_theta: int) -> np.ndarray:
    """int |k|^alpha Psi_a Psi_b over the triangular product basis.

    In u = k/sigma: |k|^alpha = r^alpha A(theta)^(alpha/2),
    A = s1^2 cos^2 + s2^2 sin^2. The integral vanishes unless both index
    parities match, and then the integrand is even under both reflections,
    so the angular rule covers the first quadrant only.
    """
    idx = _index_2d(N)
    t, wt = gauss_laguerre_scaled(N // 2 + 4, alpha / 2)
    th = (np.arange(n_theta) + 0.5) * (math.pi / 2) / n_theta
    wth = np.full(n_theta, (math.pi / 2) / n_theta) * 4.0
    A = (s1 * np.cos(th)) ** 2 + (s2 * np.sin(th)) ** 2
    r = np.sqrt(t)
    U1 = np.outer(r, np.cos(th)).ravel()
    U2 = np.outer(r, np.sin(th)).ravel()
    # r^(alpha+1) dr = t^(alpha/2) dt / 2; e^t undoes the Gaussian in the weight
    w = 0.5 * np.outer(wt, wth * A ** (alpha / 2)).ravel()
    P1 = hermite_functions(N, U1)
    P2 = hermite_functions(N, U2)
    size = idx.shape[0]
    out = np.zeros((size, size))
    for p1 in (0, 1):
        for p2 in (0, 1):
            sel = np.flatnonzero((idx[:, 0] % 2 == p1) & (idx[:, 1] % 2 == p2))
            B = P1[idx[sel, 0]] * P2[idx[sel, 1]]
            out[np.ix_(sel, sel)] = (B * w) @ B.T
    return 0.5 * (out + out.T)


def _hermite_scales(harm: HarmonicSpec, alpha: float):
    # width of the Gaussian minimizing gamma^2/s^2 + s^alpha (up to constants)
    return tuple((2.0 * g * g / alpha) ** (1.0 / (2.0 + alpha)) for g in harm.gammas)


def _default_angular_nodes(N, s1, s2):
    ratio = max(s1, s2) / min(s1, s2)
    return int(2 * N + 32 * math.ceil(ratio))


def assemble_hermite_hamiltonian(harm: HarmonicSpec, alpha, trig_terms=(), spec: HermiteSpec | None = None):
    """Hermite-Galerkin matrix of the k-space operator.

    Returns ``(H, odd_mask, parts)``: H dense real symmetric, the odd-parity
    mask and the kinetic, |k|^alpha and potential parts separately (used by
    the energy check).
    """
    a = check_alpha(alpha)
    trig_terms = tuple(trig_terms)
    _check_trig(harm, trig_terms)
    spec = spec or HermiteSpec()
    N = spec.resolve(harm.n)
    s = _hermite_scales(harm, a)
    D = _second_derivative_1d(N)
    if harm.n == 1:
        kin = (harm.gammas[0] / s[0]) ** 2 * D
        frac = s[0] ** a * _abs_power_1d(N, a)
        odd = np.arange(N) % 2 == 1
        shift = lambda w: _shift_1d(N, w[0] / s[0])  # noqa: E731
    else:
        idx = _index_2d(N)
        i1, i2 = idx[:, 0], idx[:, 1]
        same1 = i1[:, None] == i1[None, :]
        same2 = i2[:, None] == i2[None, :]
        kin = ((harm.gammas[0] / s[0]) ** 2 * D[np.ix_(i1, i1)] * same2
               + (harm.gammas[1] / s[1]) ** 2 * D[np.ix_(i2, i2)] * same1)
        nt = spec.angular_nodes or _default_angular_nodes(N, *s)
        frac = _abs_power_2d(N, a, s[0], s[1], nt)
        odd = (i1 + i2) % 2 == 1

        def shift(w):
            T1 = _shift_1d(N, w[0] / s[0]) if w[0] else np.eye(N)
            T2 = _shift_1d(N, w[1] / s[1]) if w[1] else np.eye(N)
            return T1[np.ix_(i1, i1)] * T2[np.ix_(i2, i2)]

    V = np.zeros_like(kin)
    A = np.zeros_like(kin)
    for t in trig_terms:
        T = shift(t.frequency)
        if t.kind == "cos":
            V += 0.5 * t.amplitude * (T + T.T)
        else:
            A += t.amplitude * (T - T.T)
    pot = _realify(sp.csr_matrix(V), sp.csr_matrix(A), odd).toarray()
    H = kin + frac + pot
    H = 0.5 * (H + H.T)
    return H, odd, {"kinetic": kin, "fractional": frac, "potential": pot, "scales": s, "order": N}


def _bound_gammas(harm, trig_terms):
    """(gamma1, gamma2) with gamma1^2 <= Hess V / 2 <= gamma2^2, or None
    when V is not uniformly convex."""
    if trig_terms:
        lo, hi = harm.potential(trig_terms).hessian_bounds()
        if not lo > 0:
            return None
        return math.sqrt(lo), math.sqrt(hi)
    return min(harm.gammas), max(harm.gammas)


def _echo(harm, alpha, trig_terms, method, disc):
    return {
        "problem": "wholespace",
        "alpha": alpha,
        "gammas": list(harm.gammas),
        "trig": [{"amplitude": t.amplitude, "kind": t.kind, "frequency": list(t.frequency)} for t in trig_terms],
        "method": method,
        "discretization": repr(disc),
    }


def solve_wholespace_gap(harm: HarmonicSpec, alpha, trig_terms=(), kgrid=None, method: str = "hermite",
                         hermite: HermiteSpec | None = None, count: int = 6):
    """Lowest eigenvalues and gap; the report carries the whole-space bound.

    method='hermite' (default) or 'fd' (``kgrid`` then sets the k-box).
    Each eigenvector's energy is recomputed from the separately assembled
    kinetic, fractional and potential parts and compared with its
    eigenvalue. A TruncationWarning is issued when the ground state has
    more than 1e-6 of its mass in the outermost shell (top Hermite degree,
    or the grid layer next to the wall).
    """
    a = check_alpha(alpha)
    trig_terms = tuple(trig_terms)
    notes = []
    if method == "hermite":
        hermite = hermite or HermiteSpec()
        H, odd, parts = assemble_hermite_hamiltonian(harm, a, trig_terms, hermite)
        w, v = symmetric_eigh(H, count)
        N = parts["order"]
        if harm.n == 1:
            outer = np.arange(N) >= N - 2
        else:
            outer = _index_2d(N).sum(axis=1) >= N - 2
        energy = [float(v[:, i] @ (parts["kinetic"] + parts["fractional"] + parts["potential"]) @ v[:, i])
                  for i in range(w.size)]
        disc = hermite
        meta = {"order": N, "scales": parts["scales"]}
    elif method == "fd":
        kgrid = kgrid or KGridSpec.default(harm, a, trig_terms)
        H, odd, P = assemble_fourier_space_hamiltonian(harm, a, trig_terms, kgrid)
        w, v = _sparse_lowest(H, count)
        m = kgrid.nodes().size
        shape = (m,) * harm.n
        edge = np.zeros(shape, dtype=bool)
        for j in range(harm.n):
            sl = [slice(None)] * harm.n
            sl[j] = [0, m - 1]
            edge[tuple(sl)] = True
        # mass per node: |P v|^2 (the phases drop out)
        outer_nodes = edge.ravel()
        vn = np.abs(P @ v) ** 2
        energy = [float(v[:, i] @ (H @ v[:, i])) for i in range(w.size)]
        disc = kgrid
        meta = {"kgrid": kgrid}
        outer = None
    else:
        raise DomainError("method must be 'hermite' or 'fd'")
    for i, e in enumerate(energy):
        if abs(e - w[i]) > RAYLEIGH_TOL * max(1.0, abs(w[i])):
            raise SolverError(f"energy check failed for eigenpair {i}: {e} vs {w[i]}")
    mass = float(np.sum(v[outer, 0] ** 2)) if outer is not None else float(vn[outer_nodes, 0].sum())
    meta["outer_mass"] = mass
    if mass > TRUNCATION_MASS:
        msg = f"ground state has {mass:.2e} of its mass at the truncation boundary"
        warnings.warn(msg, TruncationWarning, stacklevel=2)
        notes.append(msg)
    gammas = _bound_gammas(harm, trig_terms)
    if gammas is None:
        bounds = []
        notes.append("potential is not uniformly convex; no bound applies")
    else:
        bounds = [(b.name, b.value) for b in evaluate_bounds("wholespace", harm.n, a, gammas=gammas)]
    spec = Spectrum(w, v, method, meta)
    report = make_report(w, bounds, _echo(harm, a, trig_terms, method, disc), notes)
    return spec, report


def _sparse_lowest(H, count):
    size = H.shape[0]
    if size <= SPARSE_THRESHOLD:
        return symmetric_eigh(H.toarray(), count)
    try:
        # minimum-degree ordering on A + A^T keeps the 2D factor small
        lu = spla.splu(H.tocsc(), permc_spec="MMD_AT_PLUS_A")
        op = spla.LinearOperator(H.shape, matvec=lu.solve, dtype=float)
        k = min(count + 4, size - 1)
        _, q = spla.eigsh(H, k=k, sigma=0.0, which="LM", OPinv=op, v0=np.ones(size), tol=0.0)
    except (spla.ArpackError, RuntimeError) as exc:
        raise SolverError(f"sparse eigensolve failed: {exc}") from exc
    q, _ = np.linalg.qr(q)
    small = q.T @ (H @ q)
    w, y = symmetric_eigh(0.5 * (small + small.T), count)
    return w, fix_signs(q @ y)


# ---------------------------------------------------------------------------
# finite well


def solve_well(inner: Box, V0: float, alpha, enclosure_factor: float = 4.0, modes=None, kq=None):
    """Classical FSO on a box ``enclosure_factor`` times larger than
    ``inner``, with V = 0 on the centred inner box and V0 elsewhere.

    Modes per side default to 96 (1D) or 16 (2D) per inner length. The
    jump of V0 makes the sine expansion converge slowly, so the 1D default
    is four times the direct classical default.
    """
    a = check_alpha(alpha)
    if not V0 > 0:
        raise DomainError("V0 must be positive")
    if not enclosure_factor >= 4:
        raise DomainError("enclosure_factor must be at least 4")
    if inner.n not in (1, 2):
        raise DomainError("well study supports n = 1, 2")
    outer = Box(tuple(enclosure_factor * L for L in inner.lengths))
    origin = tuple((enclosure_factor - 1) * L / 2 for L in inner.lengths)
    well = Well(inner, V0, origin)
    if modes is None:
        base = 96 if inner.n == 1 else 16
        modes = (int(math.ceil(base * enclosure_factor)),) * inner.n
    M = tuple(int(m) for m in np.broadcast_to(modes, (inner.n,)))
    H = assemble_classical_hamiltonian(outer, a, M, well, kq or KQuadrature())
    w, v = symmetric_eigh(H, 6)
    notes = []
    mass = _near_wall_mass(outer, inner, M, v[:, 0])
    if mass > ENCLOSURE_MASS:
        msg = f"ground state has {mass:.2e} of its mass within one inner diameter of the enclosure wall"
        warnings.warn(msg, EnclosureWarning, stacklevel=2)
        notes.append(msg)
    echo = {"problem": "well", "alpha": a, "inner": list(inner.lengths), "V0": float(V0),
            "enclosure_factor": float(enclosure_factor), "modes": list(M)}
    spec = Spectrum(w, v, "sine", {"modes": M, "enclosure": outer, "wall_mass": mass})
    return spec, make_report(w, [], echo, notes)


def _near_wall_mass(outer: Box, inner: Box, M, coef) -> float:
    """Mass of the sine expansion ``coef`` within one inner diameter of the wall."""
    D = math.sqrt(sum(L * L for L in inner.lengths))
    x, wq = np.polynomial.legendre.leggauss(2 * max(M) + 16)
    axes = []
    for L, Mj in zip(outer.lengths, M):
        pts = L * (1 + x) / 2
        m = np.arange(1, Mj + 1)[:, None]
        axes.append((pts, wq * L / 2, math.sqrt(2 / L) * np.sin(m * math.pi * pts / L)))
    if outer.n == 1:
        (pts, wts, U), = axes
        f = coef @ U
        near = (pts < D) | (pts > outer.lengths[0] - D)
        return float(np.sum((f * f * wts)[near]))
    (p1, w1, U1), (p2, w2, U2) = axes
    C = coef.reshape(M[0], M[1])
    f = U1.T @ C @ U2
    X, Y = np.meshgrid(p1, p2, indexing="ij")
    near = (X < D) | (X > outer.lengths[0] - D) | (Y < D) | (Y > outer.lengths[1] - D)
    return float(np.sum((f * f * np.outer(w1, w2))[near]))
