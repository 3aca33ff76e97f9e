import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from fracgap.eigenbasis import AnalyticBox, FiniteDifferenceMask, box_eigenpairs, fd_dirichlet_laplacian, fd_masked_eigenpairs
from fracgap.errors import DomainError
from fracgap.geometry import Box, Ellipse2D

PI2 = math.pi**2
# first zero of J0 squared, frozen from scipy
J01_SQ = 5.783185962946784


def test_j01_oracle():
    assert jn_zeros(0, 1)[0] ** 2 == pytest.approx(J01_SQ, rel=1e-15)


def test_box_1d_spectrum():
    lam = [m.eigenvalue for m in box_eigenpairs(Box((1.0,)), (3,))]
    assert np.allclose(lam, [PI2, 4 * PI2, 9 * PI2], rtol=1e-15)


def test_box_2d_spectrum():
    lam = [m.eigenvalue for m in box_eigenpairs(Box((1.0, 0.5)), (2, 2))]
    assert lam[0] == pytest.approx(5 * PI2, rel=1e-15)
    assert lam[1] == pytest.approx(8 * PI2, rel=1e-15)


def test_square_degeneracy():
    modes = box_eigenpairs(Box((1.0, 1.0)), (2, 2))
    assert modes[1].eigenvalue == modes[2].eigenvalue == pytest.approx(5 * PI2, rel=1e-15)
    assert modes[1].descriptor.indices < modes[2].descriptor.indices


def test_sine_modes_orthonormal():
    box = Box((0.7, 1.3))
    x, w = np.polynomial.legendre.leggauss(40)
    pts = [L * (x + 1) / 2 for L in box.lengths]
    wts = np.outer(w * box.lengths[0] / 2, w * box.lengths[1] / 2)
    mesh = np.stack(np.meshgrid(*pts, indexing="ij"), axis=-1)
    modes = box_eigenpairs(box, (3, 3))
    vals = [m.descriptor(mesh) for m in modes]
    G = np.array([[np.sum(a * b * wts) for b in vals] for a in vals])
    assert np.max(np.abs(G - np.eye(len(modes)))) < 1e-12


def test_spec_invariants():
    with pytest.raises(DomainError):
        AnalyticBox((1,))
    with pytest.raises(DomainError):
        FiniteDifferenceMask(0.0, 4)
    with pytest.raises(DomainError):
        FiniteDifferenceMask(0.1, 1)


@pytest.mark.parametrize("domain", [Box((1.0, 1.0)), Ellipse2D(1.0, 0.6), Box((1.0,))])
def test_fd_orthonormal_and_rayleigh(domain):
    h = 1 / 24
    modes = fd_masked_eigenpairs(domain, h, 8)
    A, _ = fd_dirichlet_laplacian(domain, h)
    V = np.array([m.descriptor.values for m in modes]).T
    cell = modes[0].descriptor.grid.cell_volume
    G = cell * V.T @ V
    assert np.max(np.abs(G - np.eye(8))) <= 1e-10
    lam = np.array([m.eigenvalue for m in modes])
    rq = cell * np.einsum("ij,ij->j", V, A @ V)
    assert np.max(np.abs(rq - lam) / lam) <= 1e-10
    assert np.all(np.diff(lam) >= -1e-12) and lam[0] < lam[1]


def test_fd_matrix_symmetric():
    A, _ = fd_dirichlet_laplacian(Ellipse2D(1.0, 0.4), 1 / 20)
    assert abs(A - A.T).max() == 0.0


def test_fd_square_converges_to_box():
    errs = [abs(fd_masked_eigenpairs(Box((1.0, 1.0)), h, 2)[0].eigenvalue - 2 * PI2) for h in (1 / 16, 1 / 32, 1 / 64)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_fd_disk_second_order():
    hs = (1 / 32, 1 / 64, 1 / 128)
    errs = [abs(fd_masked_eigenpairs(Ellipse2D(1.0, 1.0), h, 2)[0].eigenvalue - J01_SQ) for h in hs]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.5 <= p <= 2.5 for p in orders), orders
    assert errs[-1] < 1e-2


def test_fd_insufficient_resolution():
    with pytest.raises(DomainError):
        fd_masked_eigenpairs(Ellipse2D(0.1, 0.05), 0.05, 10)
