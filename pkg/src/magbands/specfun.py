"""Special functions and rational approximation utilities.

Provides the confluent hypergeometric function 1F1 (power series with a
stiff-free ODE fallback), normalized harmonic oscillator eigenfunctions,
Dirichlet interval modes, and best rational approximation by continued
fractions.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidParameterError, SolverError

_SERIES_CAP = 500
_SERIES_EPS = 1e-16  # stop once |term| < eps * |partial sum|
_CANCEL_LIMIT = 3e3  # peak-term / result ratio beyond which the series is distrusted


def kummer_1f1(alpha, beta, x):
    """Confluent hypergeometric function 1F1(alpha; beta; x).

    Power series with compensated summation, accurate to about 1e-12
    relative for |x| <= 30 when cancellation stays mild.  Heavy
    cancellation (large |alpha x|) and larger arguments fall back to
    integrating the defining ODE  x y'' + (beta - x) y' - alpha y = 0
    from a short Taylor start.
    """
    alpha, beta, x = float(alpha), float(beta), float(x)
    if beta <= 0.0 and beta == math.floor(beta):
        raise InvalidParameterError(f"1F1 undefined at non-positive integer beta={beta}")
    if x == 0.0:
        return 1.0

    if abs(x) <= 30.0:
        val, ok = _kummer_series(alpha, beta, x)
        if ok:
            return val
    return _kummer_ode(alpha, beta, x)


def _kummer_series(alpha, beta, x):
    term = 1.0
    total = 1.0
    comp = 0.0  # Kahan compensation
    peak = 1.0
    for k in range(1, _SERIES_CAP + 1):
        term *= x * (alpha + k - 1.0) / (k * (beta + k - 1.0))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        peak = max(peak, abs(term))
        if term == 0.0:  # polynomial case, series terminated exactly
            return total, True
        if abs(term) < _SERIES_EPS * abs(total):
            ok = peak <= _CANCEL_LIMIT * max(abs(total), 1e-300)
            return total, ok
    return total, False


def _kummer_ode(alpha, beta, x):
    # Taylor start just off the regular singular point at 0.
    x0 = 1e-3 * np.sign(x)
    y0, _ = _kummer_series(alpha, beta, x0)
    y0p = (alpha / beta) * _kummer_series(alpha + 1.0, beta + 1.0, x0)[0]

    def rhs(t, y):
        return [y[1], ((t - beta) * y[1] + alpha * y[0]) / t]

    scale = max(1.0, abs(y0))
    sol = solve_ivp(rhs, (x0, x), [y0, y0p], method="DOP853",
                    rtol=1e-12, atol=1e-14 * scale, dense_output=False)
    if not sol.success:
        raise SolverError(f"1F1 ODE integration failed: {sol.message}")
    return float(sol.y[0, -1])


def hermite_psi(m, b0, x):
    """Normalized eigenfunction of -d^2/dx^2 + b0^2 x^2 for level m >= 0.

    psi_m(x) = (2^m m!)^{-1/2} (b0/pi)^{1/4} exp(-b0 x^2/2) H_m(sqrt(b0) x),
    evaluated with the stable normalized three-term recurrence carried out
    directly on the Gaussian-weighted functions.
    """
    if m < 0 or m != int(m):
        raise InvalidParameterError("oscillator level must be a non-negative integer")
    if b0 <= 0.0:
        raise InvalidParameterError("field strength must be positive")
    x = np.asarray(x, dtype=float)
    t = np.sqrt(b0) * x
    prev = np.zeros_like(t)
    cur = (b0 / np.pi) ** 0.25 * np.exp(-0.5 * t * t)
    for k in range(1, int(m) + 1):
        prev, cur = cur, np.sqrt(2.0 / k) * t * cur - np.sqrt((k - 1.0) / k) * prev
    return cur


def dirichlet_mode(n, u):
    """Normalized Dirichlet mode on (-1, 1): cos(n pi u/2) for odd n,
    sin(n pi u/2) for even n."""
    if n < 1 or n != int(n):
        raise InvalidParameterError("Dirichlet mode index must be a positive integer")
    u = np.asarray(u, dtype=float)
    arg = 0.5 * n * np.pi * u
    return np.cos(arg) if n % 2 == 1 else np.sin(arg)


def dirichlet_energy(n):
    """Dirichlet eigenvalue (n pi / 2)^2 on the unit-half-width interval."""
    n = np.asarray(n)
    if np.any(n < 1) or np.any(n != n.astype(int)):
        raise InvalidParameterError("Dirichlet mode index must be a positive integer")
    return (0.5 * n * np.pi) ** 2


@dataclass(frozen=True)
class RationalApprox:
    """Best rational approximation p/q with q <= n_max.

    Satisfies |q*theta - p| <= 1/(n_max + 1), with p, q coprime.
    """

    p: int
    q: int
    n_max: int
    residual: float


def dirichlet_approx(theta, n_max):
    """Best rational approximation of theta with denominator at most n_max.

    Walks the continued fraction expansion and returns the last convergent
    whose denominator does not exceed n_max.  The classical approximation
    theorem guarantees |q*theta - p| <= 1/(n_max + 1).
    """
    theta = float(theta)
    if theta <= 0.0:
        raise InvalidParameterError("theta must be positive")
    n_max = int(n_max)
    if n_max < 1:
        raise InvalidParameterError("denominator bound must be at least 1")

    h2, h1 = 0, 1  # convergent numerators (two back, one back)
    k2, k1 = 1, 0  # convergent denominators
    x = theta
    p, q = int(math.floor(theta)), 1
    for _ in range(64):
        a = int(math.floor(x))
        h = a * h1 + h2
        k = a * k1 + k2
        if k > n_max:
            break
        p, q = h, k
        frac = x - a
        if frac < 1e-14:  # theta is (numerically) rational, expansion ends
            break
        h2, h1 = h1, h
        k2, k1 = k1, k
        x = 1.0 / frac
    return RationalApprox(p=p, q=q, n_max=n_max, residual=abs(q * theta - p))
