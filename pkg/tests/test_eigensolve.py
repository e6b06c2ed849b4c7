"""Eigenvalue extraction: LAPACK / Lanczos paths and the shooting cross-check."""

import numpy as np
import pytest
import scipy.sparse as sp

from magbands import assembly, eigensolve
from magbands.errors import InvalidParameterError, SolverError


def _laplacian_fiber(n, h, kind="effective"):
    inv = 1.0 / h**2
    m = sp.diags([np.full(n, 2.0 * inv), np.full(n - 1, -inv), np.full(n - 1, -inv)],
                 [0, 1, -1], format="csr")
    grid = assembly.Grid.line(0.5 * h * (n + 1), n)
    return assembly.FiberMatrix(kind, 0.0, m, grid, {})


def test_lowest_eigs_tridiagonal_exact_spectrum():
    n, h = 200, 0.01
    fib = _laplacian_fiber(n, h)
    vals = eigensolve.lowest_eigs(fib, 5)
    exact = (4.0 / h**2) * np.sin(np.arange(1, 6) * np.pi / (2 * (n + 1))) ** 2
    np.testing.assert_allclose(vals, exact, rtol=1e-12)
    assert np.all(np.diff(vals) > 0)


def test_lowest_eigs_2d_kronecker_exact_spectrum():
    # 2D Dirichlet Laplacian as a FiberMatrix; spectrum is the sum of the
    # two 1D discrete spectra.
    n_s, n_u = 24, 16
    grid = assembly.Grid.box(3.0, n_s, n_u)
    hs, hu = grid.h_s, grid.h_u
    ls = sp.diags([np.full(n_s, 2 / hs**2), np.full(n_s - 1, -1 / hs**2),
                   np.full(n_s - 1, -1 / hs**2)], [0, 1, -1])
    lu = sp.diags([np.full(n_u, 2 / hu**2), np.full(n_u - 1, -1 / hu**2),
                   np.full(n_u - 1, -1 / hu**2)], [0, 1, -1])
    m = (sp.kron(ls, sp.identity(n_u)) + sp.kron(sp.identity(n_s), lu)).tocsr()
    fib = assembly.FiberMatrix("layer", 0.0, m, grid, {})
    got = eigensolve.lowest_eigs(fib, 6)
    es = (4 / hs**2) * np.sin(np.arange(1, n_s + 1) * np.pi / (2 * (n_s + 1))) ** 2
    eu = (4 / hu**2) * np.sin(np.arange(1, n_u + 1) * np.pi / (2 * (n_u + 1))) ** 2
    exact = np.sort((es[:, None] + eu[None, :]).ravel())[:6]
    np.testing.assert_allclose(got, exact, rtol=1e-9)


def test_lowest_eigs_vectors_are_orthonormal_eigenpairs():
    fib = assembly.assemble_transverse(0.4, 1.0, 0.8, assembly.Grid.interval(96))
    vals, vecs = eigensolve.lowest_eigs(fib, 4, return_vectors=True)
    gram = vecs.T @ vecs
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)
    resid = fib.matrix @ vecs - vecs * vals[None, :]
    assert np.linalg.norm(resid) < 1e-8 * (1 + np.abs(vals).max())


def test_lowest_eigs_k_range_validation():
    fib = _laplacian_fiber(40, 0.05)
    with pytest.raises(InvalidParameterError):
        eigensolve.lowest_eigs(fib, 0)
    with pytest.raises(InvalidParameterError):
        eigensolve.lowest_eigs(fib, 11)  # beyond n // 4


def test_lowest_eigs_deterministic():
    layer_fib = _laplacian_fiber(60, 0.05)
    a = eigensolve.lowest_eigs(layer_fib, 3)
    b = eigensolve.lowest_eigs(layer_fib, 3)
    np.testing.assert_array_equal(a, b)


# --- shooting method ---------------------------------------------------------------

def test_shooting_harmonic_oscillator_levels():
    for idx, exact in [(1, 1.0), (2, 3.0), (3, 5.0), (4, 7.0)]:
        lam = eigensolve.shooting_eig_1d(lambda x: x * x, -12.0, 12.0, idx, rtol=1e-10)
        assert lam == pytest.approx(exact, rel=1e-8)


def test_shooting_shifted_oscillator_brackets_away_from_origin():
    # q(x) = (x - 3)^2 + 5 forces the bracket search to relocate.
    lam = eigensolve.shooting_eig_1d(lambda x: (x - 3.0) ** 2 + 5.0, -10.0, 16.0, 2,
                                     rtol=1e-10)
    assert lam == pytest.approx(8.0, rel=1e-8)


def test_shooting_square_well_exact():
    # Pure Dirichlet box (-1, 1): eigenvalues (k pi / 2)^2.
    for idx in (1, 2, 3):
        lam = eigensolve.shooting_eig_1d(lambda x: 0.0, -1.0, 1.0, idx, rtol=1e-11)
        assert lam == pytest.approx((idx * np.pi / 2) ** 2, rel=1e-9)


def test_shooting_index_validation():
    with pytest.raises(InvalidParameterError):
        eigensolve.shooting_eig_1d(lambda x: x * x, -5.0, 5.0, 0)
    with pytest.raises(InvalidParameterError):
        eigensolve.shooting_eig_1d(lambda x: x * x, -5.0, 5.0, 1.5)


def test_shooting_agrees_with_matrix_on_transverse_fiber():
    # Same operator through two unrelated discretizations.
    xi, b0, a, n = 0.3, 1.0, 0.7, 768
    fib = assembly.assemble_transverse(xi, b0, a, assembly.Grid.interval(n))
    mat_vals = eigensolve.lowest_eigs(fib, 3)
    for idx in (1, 2, 3):
        # Rescale u -> a u so the shooting problem has unit stiffness.
        lam = eigensolve.shooting_eig_1d(
            lambda u: a * a * (xi - b0 * a * u) ** 2, -1.0, 1.0, idx, rtol=1e-10) / (a * a)
        h = fib.grid.h_u
        assert abs(lam - mat_vals[idx - 1]) < max(1e-6, 30.0 * h * h * (1 + abs(lam)))
