"""Lowest eigenvalues of the assembled fiber matrices.

1D (tridiagonal) problems go through LAPACK's symmetric tridiagonal
solver.  2D problems use shift-invert Lanczos with the shift placed
just below the smallest diagonal entry minus the Gershgorin radius,
which for these M-matrices sits slightly below the spectrum.  Every
batch of eigenpairs is residual-checked before being returned.

A shooting method (Pruefer phase, bisected) is provided as an
independent cross-check for 1D fibers; it never touches the matrices.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import InvalidParameterError, SolverError

_RESIDUAL_TOL = 1e-9
_V0_SEED = 0x5EED


def _residual_check(m, vals, vecs):
    r = m @ vecs - vecs * vals[None, :]
    scale = 1.0 + np.abs(vals)
    worst = np.linalg.norm(r, axis=0) / scale
    return float(np.max(worst)), worst


def _gershgorin_floor(m):
    d = m.diagonal()
    absrow = np.abs(m).sum(axis=1)
    radius = np.asarray(absrow).ravel() - np.abs(d)
    return float(np.min(d - radius))


def lowest_eigs(fiber, k, return_vectors=False):
    """The k smallest eigenvalues of a FiberMatrix, ascending.

    Eigenpairs are verified against the matrix; a residual above
    1e-9 (1 + |lambda|) triggers one retry with a larger Krylov space
    and then a SolverError.
    """
    m = fiber.matrix
    n = m.shape[0]
    if not 1 <= k <= n // 4:
        raise InvalidParameterError(
            f"k={k} out of range for dimension {n} (need 1 <= k <= n//4)")

    if fiber.is_1d:
        d = m.diagonal().astype(float)
        e = m.diagonal(1).astype(float)
        vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
        worst, _ = _residual_check(m, vals, vecs)
        if worst > _RESIDUAL_TOL:
            raise SolverError(f"tridiagonal eigensolve residual {worst:.2e}")
        if return_vectors:
            return vals, vecs
        return vals

    sigma = _gershgorin_floor(m) - 1.0
    rng = np.random.default_rng(_V0_SEED)
    v0 = rng.standard_normal(n)

    ncv = None
    for attempt in range(2):
        try:
            vals, vecs = spla.eigsh(m, k=k, sigma=sigma, which="LM",
                                    v0=v0, ncv=ncv, tol=0)
        except (spla.ArpackError, RuntimeError) as exc:
            if attempt:
                raise SolverError(f"shift-invert Lanczos failed: {exc}") from exc
            ncv = min(n, max(4 * k + 1, 40))
            continue
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        worst, _ = _residual_check(m, vals, vecs)
        if worst <= _RESIDUAL_TOL:
            if return_vectors:
                return vals, vecs
            return vals
        ncv = min(n, max(4 * k + 1, 40))
    raise SolverError(
        f"eigenpair residual {worst:.2e} above {_RESIDUAL_TOL:.0e} after retry")


# --- shooting cross-check ------------------------------------------------------

def _pruefer_phase(q_of, lam, x_left, x_right, rtol):
    """Integrate theta' = cos^2 theta + (lam - q) sin^2 theta from the left wall.

    theta(left) = 0; Dirichlet zeros of the solution are crossings of
    theta through multiples of pi, so theta(right)/pi counts eigenvalues
    below lam (plus the boundary phase).
    """

    def rhs(x, th):
        c = np.cos(th[0])
        s_ = np.sin(th[0])
        return [c * c + (lam - q_of(x)) * s_ * s_]

    sol = solve_ivp(rhs, (x_left, x_right), [0.0], method="DOP853",
                    rtol=rtol, atol=1e-12)
    if not sol.success:
        raise SolverError(f"phase integration failed: {sol.message}")
    return float(sol.y[0, -1])


def shooting_eig_1d(q_of, x_left, x_right, index, rtol=1e-11,
                    bracket=None, max_expand=60):
    """index-th Dirichlet eigenvalue (1-based) of -y'' + q y on an interval.

    Matrix-free Sturm oscillation count via the Pruefer phase: the
    right-wall phase is continuous and strictly increasing in lambda, and
    the eigenvalue is its crossing of index * pi, located with brentq on
    a bracket grown from the sampled potential minimum.
    """
    if index < 1 or index != int(index):
        raise InvalidParameterError("eigenvalue index must be a positive integer")
    target = int(index) * np.pi

    if bracket is None:
        xs = np.linspace(x_left, x_right, 513)
        qs = np.array([q_of(x) for x in xs])
        lo = float(np.min(qs))
        hi = lo + max(1.0, abs(lo)) * 0.5
    else:
        lo, hi = map(float, bracket)

    cache = {}

    def phase(lam):
        if lam not in cache:
            cache[lam] = _pruefer_phase(q_of, lam, x_left, x_right, rtol)
        return cache[lam]

    span = hi - lo
    for _ in range(max_expand):
        if phase(hi) >= target:
            break
        if phase(lo) >= target:
            lo = hi
        hi += span
        span *= 2.0
    else:
        raise SolverError("could not bracket the requested eigenvalue")
    span = max(span, 1.0)
    for _ in range(max_expand):
        if phase(lo) < target:
            break
        lo -= span
        span *= 2.0
    else:
        raise SolverError("could not bracket the requested eigenvalue")

    return brentq(lambda lam: phase(lam) - target, lo, hi,
                  xtol=1e-12, rtol=1e-13, maxiter=200)
