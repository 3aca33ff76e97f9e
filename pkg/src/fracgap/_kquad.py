"""Fourier-space quadrature for zero-extended sine modes.

All routines work in the dimensionless variable kappa = k L, in which the
sine modes of (0, L) become those of the unit interval. With

    g_m(kappa) = int_0^1 sqrt(2) sin(m pi x) exp(-i kappa x) dx

the stiffness of the modes on (0, L) is

    S_mn = L^-alpha / pi * int_0^inf kappa^alpha Re(g_m conj(g_n)) dkappa,

and Re(g_m conj(g_n)) vanishes identically unless m and n share parity.
The half line is split into a first panel carrying the kappa^alpha
singularity (Gauss-Jacobi), Gauss-Legendre panels up to K, and a tail
integrated from the exact large-kappa expansion of the integrand.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

SMALL_Z = 1e-4
BLOCK_ENTRIES = 1 << 23


def expm1_ratio(z):
    """(exp(z) - 1)/z with a Taylor branch near z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < SMALL_Z
    zs = z[small]
    out[small] = 1.0 + zs / 2.0 + zs * zs / 6.0 + zs**3 / 24.0
    zl = z[~small]
    out[~small] = np.expm1(zl) / zl
    return out


def unit_transform(m, kappa):
    """g_m(kappa) for integer array ``m`` (rows) and ``kappa`` (columns)."""
    m = np.atleast_1d(np.asarray(m, dtype=float))[:, None]
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))[None, :]
    a = m * math.pi
    return (math.sqrt(2.0) / 2j) * (expm1_ratio(1j * (a - kappa)) - expm1_ratio(-1j * (a + kappa)))


@lru_cache(maxsize=64)
def _gauss_legendre(q):
    return leggauss(q)


@lru_cache(maxsize=64)
def _gauss_jacobi(q, beta):
    return roots_jacobi(q, 0.0, beta)


def half_line_nodes(K, width, q, alpha=None):
    """Panel nodes on [0, Kend], Kend = width * ceil(K / width).

    With ``alpha`` the weights include kappa^alpha (the first panel uses
    Gauss-Jacobi so the singularity at 0 is exact). Returns
    ``(nodes, weights, Kend, first_panel_size)``.
    """
    npan = max(1, int(math.ceil(K / width - 1e-12)))
    xg, wg = _gauss_legendre(q)
    if alpha is None:
        k0 = width * (1 + xg) / 2
        w0 = wg * width / 2
    else:
        xj, wj = _gauss_jacobi(q, float(alpha))
        k0 = width * (1 + xj) / 2
        w0 = wj * (width / 2) ** (1 + alpha)
    starts = width * np.arange(1, npan)
    k = (starts[:, None] + width * (1 + xg[None, :]) / 2).ravel()
    w = np.tile(wg * width / 2, npan - 1)
    if alpha is not None:
        w = w * k**alpha
    return np.concatenate([k0, k]), np.concatenate([w0, w]), width * npan, q


def cos_tail(beta, K, terms=60):
    """int_K^inf x^beta cos x dx for beta < -1, by repeated integration by parts."""
    res = 0.0
    coef = 1.0
    b = beta
    for _ in range(terms):
        term = coef * (-(K**b) * math.sin(K) - b * K ** (b - 1) * math.cos(K))
        res += term
        coef *= -b * (b - 1)
        b -= 2.0
        if abs(term) <= 1e-18 * max(abs(res), 1e-300):
            break
    return res


def tail_matrix(M, power, K, tol=1e-17, max_terms=200):
    """(1/pi) int_K^inf kappa^power Re(g_m conj g_n) dkappa for m, n = 1..M.

    Uses 1/((k^2-a^2)(k^2-b^2)) = sum_j c_j k^(-4-2j) with
    c_j = sum_{p+q=j} a^2p b^2q, valid for K > M pi.
    """
    m = np.arange(1, M + 1, dtype=float)
    a2 = (m * math.pi) ** 2
    A2, B2 = np.meshgrid(a2, a2, indexing="ij")
    same = (np.add.outer(np.arange(M), np.arange(M)) % 2) == 0
    s = np.where(np.arange(1, M + 1) % 2 == 0, 1.0, -1.0)[:, None]  # (-1)^m
    if a2[-1] >= K * K:
        raise ValueError("tail expansion needs K above the largest mode frequency")
    total = np.zeros((M, M))
    pa = np.ones_like(A2)
    pb = np.ones_like(B2)
    csum = np.ones_like(A2)  # c_0
    for j in range(max_terms):
        beta = power - 4.0 - 2.0 * j
        plain = K ** (beta + 1) / (-(beta + 1))
        osc = cos_tail(beta, K)
        t = csum * (plain - s * osc)
        total += t
        if np.max(np.abs(csum)) * 2.0 * K ** (beta + 1) < tol * max(np.max(np.abs(total)), 1e-300):
            break
        # c_{j+1} = a^2 c_j + b^{2(j+1)}
        pb = pb * B2
        csum = A2 * csum + pb
    mm = np.outer(m, m)
    return np.where(same, 4.0 * mm * math.pi * total, 0.0)


def real_products(G):
    """Re(G_m conj G_n) for every pair, shape (M, M, nodes)."""
    return G.real[:, None, :] * G.real[None, :, :] + G.imag[:, None, :] * G.imag[None, :, :]


def stiffness_1d(M, alpha, K, width, q=16, tail=True):
    """Unit-interval stiffness matrix (L = 1), M x M."""
    k, w, Kend, _ = half_line_nodes(K, width, q, alpha)
    G = unit_transform(np.arange(1, M + 1), k)
    S = ((G.real * w) @ G.real.T + (G.imag * w) @ G.imag.T) / math.pi
    if tail:
        S = S + tail_matrix(M, alpha, Kend)
    return 0.5 * (S + S.T), Kend


def _corner_nodes(c1, c2, alpha, q_r, q_t):
    """Polar rule on [0,c1] x [0,c2] for |k|^alpha f(k) dk."""
    xr, wr = _gauss_jacobi(q_r, float(alpha) + 1.0)
    xt, wt = _gauss_legendre(q_t)
    theta_star = math.atan2(c2, c1)
    pts, wts = [], []
    for lo, hi, edge in ((0.0, theta_star, 0), (theta_star, math.pi / 2, 1)):
        th = lo + (hi - lo) * (1 + xt) / 2
        wth = wt * (hi - lo) / 2
        rmax = c1 / np.cos(th) if edge == 0 else c2 / np.sin(th)
        # rho = rmax (1+x)/2; weight rho^(alpha+1) absorbed by Jacobi rule
        rho = rmax[:, None] * (1 + xr[None, :]) / 2
        w = wth[:, None] * wr[None, :] * (rmax[:, None] / 2) ** (alpha + 2)
        pts.append(np.stack([rho * np.cos(th)[:, None], rho * np.sin(th)[:, None]], axis=-1).reshape(-1, 2))
        wts.append(w.ravel())
    return np.concatenate(pts), np.concatenate(wts)


def _binomial_coefs(alpha, ratio, tol=1e-13, max_terms=60):
    """Coefficients of (1+r^2)^(alpha/2) = sum_p b_p r^(2p), truncated for |r| <= ratio."""
    out = [1.0]
    b = 1.0
    for p in range(max_terms):
        b = b * (alpha / 2 - p) / (p + 1)
        if b == 0.0:
            break
        out.append(b)
        if abs(b) * ratio ** (2 * (p + 1)) < tol:
            break
    return out


def stiffness_2d(M1, M2, L1, L2, alpha, K1, K2, width1, width2, q=16, tail=True, q_corner=24):
    """Stiffness tensor S[m1, n1, m2, n2] for sine modes on (0,L1) x (0,L2).

    K_j and width_j are in the kappa_j = k_j L_j variables. The quadrant is
    split into the tensor grid [0,K1] x [0,K2] (polar rule on the corner
    panel), two strips where one coordinate dominates and |k|^alpha is
    expanded binomially, and a far region where both transforms are
    replaced by their large-kappa expansion.
    """
    k1, w1, E1, q1 = half_line_nodes(K1, width1, q)
    k2, w2, E2, q2 = half_line_nodes(K2, width2, q)
    G1 = unit_transform(np.arange(1, M1 + 1), k1)
    G2 = unit_transform(np.arange(1, M2 + 1), k2)
    F1 = real_products(G1).reshape(M1 * M1, -1)
    F2 = real_products(G2).reshape(M2 * M2, -1)
    # row blocks keep the |k|^alpha weight table within ~64 MB
    S = np.zeros((M1 * M1, M2 * M2))
    s2 = (k2 / L2) ** 2
    rows = max(1, BLOCK_ENTRIES // k2.size)
    for i0 in range(0, k1.size, rows):
        i1 = min(i0 + rows, k1.size)
        W = np.add.outer((k1[i0:i1] / L1) ** 2, s2) ** (alpha / 2)
        W *= np.outer(w1[i0:i1], w2)
        if i0 < q1:
            W[: q1 - i0, :q2] = 0.0
        S += (F1[:, i0:i1] @ W) @ F2.T
    pts, wc = _corner_nodes(width1 / L1, width2 / L2, alpha, q_corner, q_corner)
    C1 = real_products(unit_transform(np.arange(1, M1 + 1), pts[:, 0] * L1)).reshape(M1 * M1, -1)
    C2 = real_products(unit_transform(np.arange(1, M2 + 1), pts[:, 1] * L2)).reshape(M2 * M2, -1)
    S += (C1 * (wc * L1 * L2)) @ C2.T
    if tail:
        # strips need k_other / k <= 1/2 for the binomial series
        H1 = _half_point(min(E1, E2 * L1 / L2), width1)
        H2 = _half_point(min(E2, E1 * L2 / L1), width2)
        S += _strip(F2, k2, w2, H2, M1, E1, L1, L2, alpha)
        S += _strip(F1, k1, w1, H1, M2, E2, L2, L1, alpha).T
        S += _far_region(M1, M2, L1, L2, alpha, H1, H2, H1 / E1, H2 / E2)
    S = S.reshape(M1, M1, M2, M2) / math.pi**2
    return S, (E1, E2)


def _half_point(K, width):
    """A panel boundary near K/2, preferably a multiple of pi."""
    r = math.pi / width
    if abs(r - round(r)) < 1e-9:
        return math.pi * max(1, int(K / (2 * math.pi) + 1e-9))
    return width * max(1, int(round(K / width)) // 2)


def _strip(F_other, k_other, w_other, H_other, M, K, L, L_other, alpha):
    """kappa > K in one direction, kappa_other < H_other in the other."""
    keep = k_other < H_other
    Fo = F_other[:, keep]
    ko = k_other[keep]
    wo = w_other[keep]
    ratio = (H_other / L_other) / (K / L)
    out = np.zeros((M * M, F_other.shape[0]))
    for p, b in enumerate(_binomial_coefs(alpha, ratio)):
        T = math.pi * tail_matrix(M, alpha - 2 * p, K).reshape(-1)
        mom = Fo @ (wo * ko ** (2 * p))
        out += b * L ** (2 * p - alpha) * L_other ** (-2 * p) * np.outer(T, mom)
    return out


def _far_region(M1, M2, L1, L2, alpha, H1, H2, u0, v0, q=24, orders=4):
    """{kappa1 > H1, kappa2 > H2} minus [H1, H1/u0] x [H2, H2/v0].

    There Re(g_m conj g_n) = 4 m n pi^2 (1 - s cos kappa) sum_p c_p kappa^(-4-2p);
    only the non-oscillating part is kept, the cosine parts being smaller
    by a factor O(1/H). With kappa = H/u the region becomes the unit
    square minus [u0,1] x [v0,1].
    """
    x, w = _gauss_legendre(q)
    A = (H1 / L1) ** 2
    B = (H2 / L2) ** 2

    def rule(lo, hi):
        return lo + (hi - lo) * (1 + x) / 2, w * (hi - lo) / 2

    blocks = [(rule(0.0, u0), rule(0.0, v0)), (rule(0.0, u0), rule(v0, 1.0)), (rule(u0, 1.0), rule(0.0, v0))]

    def coefs(M):
        m = np.arange(1, M + 1, dtype=float)
        a2 = (m * math.pi) ** 2
        A2, B2 = np.meshgrid(a2, a2, indexing="ij")
        same = (np.add.outer(np.arange(M), np.arange(M)) % 2) == 0
        pref = np.where(same, 4.0 * math.pi**2 * np.outer(m, m), 0.0)
        out, c, pb = [], np.ones_like(A2), np.ones_like(B2)
        for _ in range(orders):
            out.append((pref * c).reshape(-1))
            pb = pb * B2
            c = A2 * c + pb
        return out

    c1, c2 = coefs(M1), coefs(M2)
    moments = np.zeros((orders, orders))
    for (u, wu), (v, wv) in blocks:
        U, V = np.meshgrid(u, v, indexing="ij")
        base = (A * V * V + B * U * U) ** (alpha / 2) * (U * V) ** (2 - alpha)
        for p1 in range(orders):
            for p2 in range(orders):
                moments[p1, p2] += wu @ (base * U ** (2 * p1) * V ** (2 * p2)) @ wv
    total = np.zeros((M1 * M1, M2 * M2))
    for p1 in range(orders):
        for p2 in range(orders):
            val = moments[p1, p2] / (H1 ** (3 + 2 * p1) * H2 ** (3 + 2 * p2))
            total += val * np.outer(c1[p1], c2[p2])
    return total
