"""Exact and semi-analytic results for straight layers.

For a flat layer perpendicular to the field the fiber spectrum is the
double ladder

    lambda_{m,n} = B0 (2m+1) + (n pi / (2a))^2,   m >= 0, n >= 1,

summing Landau levels and Dirichlet energies.  (A tilted straight layer
still has flat bands, by translating the fiber in s, but the tilt
couples the two ladders and shifts the values.)  Whether two ladder
rungs can coincide is governed by the commensurability parameter
theta = 8 B0 (a/pi)^2: rational theta produces infinitely many exact
coincidences, irrational theta produces arbitrarily small gaps via
continued-fraction approximants.

For the field-parallel layer (gamma = pi/2) the bottom of the spectrum
mu(B0, a) is the smallest root of a Kummer-function condition; this
module solves it with certified bracketing and evaluates both asymptotic
expansions.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidParameterError, SolverError
from .specfun import dirichlet_approx, dirichlet_energy, kummer_1f1


def flat_spectrum(b0, a, m_max, n_max):
    """Sorted eigenvalues B0(2m+1) + (n pi / 2a)^2 with their (m, n) labels."""
    if b0 <= 0.0 or a <= 0.0:
        raise InvalidParameterError("b0 and a must be positive")
    if m_max < 0 or n_max < 1:
        raise InvalidParameterError("need m_max >= 0 and n_max >= 1")
    m = np.arange(m_max + 1)
    n = np.arange(1, n_max + 1)
    vals = b0 * (2 * m[:, None] + 1) + dirichlet_energy(n)[None, :] / a**2
    flat = vals.ravel()
    order = np.argsort(flat, kind="stable")
    labels = [(int(i // n_max), int(i % n_max) + 1) for i in order]
    return flat[order], labels


def theta_parameter(b0, a):
    """Commensurability parameter theta = 8 B0 (a / pi)^2."""
    return 8.0 * b0 * (a / math.pi) ** 2


# --- degeneracy analysis -----------------------------------------------------------

@dataclass
class DegeneracyReport:
    """Exact coincidences or near-pairs of the flat-layer double ladder."""

    theta: object
    rationality: str
    exact_coincidences: list = field(default_factory=list)
    near_pairs: list = field(default_factory=list)

    def __post_init__(self):
        for m, n, mt, nt in self.exact_coincidences:
            th = Fraction(self.theta)
            if th * m + n * n != th * mt + nt * nt:
                raise SolverError(
                    f"quadruple ({m},{n},{mt},{nt}) fails the exact identity")


@dataclass
class NearDegeneratePair:
    """A ladder pair with an explicitly bounded small gap."""

    pair: tuple
    pair_tilde: tuple
    gap: float
    bound: float
    n_cap: int
    p: int
    q: int
    exact: bool = False


def degeneracy_enumerate(count=10, *, theta=None, b0=None, a=None,
                         assume_irrational=False, eps=0.1):
    """Coincidence structure of the double ladder for the given theta.

    theta must be an exact rational (Fraction, int, or (p, q)) for the
    exact branch: floats cannot witness rationality, so a float theta or
    a (b0, a) pair is only accepted together with assume_irrational=True
    and is delegated to the near-degenerate construction.
    """
    if theta is None:
        if b0 is None or a is None:
            raise InvalidParameterError("give either theta or both b0 and a")
        theta = theta_parameter(b0, a)

    if isinstance(theta, tuple):
        theta = Fraction(*theta)
    if isinstance(theta, (int, Fraction)) and not isinstance(theta, float):
        th = Fraction(theta)
        if th <= 0:
            raise InvalidParameterError("theta must be positive")
        p, q = th.numerator, th.denominator
        quads = []
        for n in range(1, count + 1):
            m, mt, nt = q * (2 * n + p), 0, n + p
            quads.append((m, n, mt, nt))
        return DegeneracyReport(th, f"rational({p}/{q})", quads, [])

    if not assume_irrational:
        raise InvalidParameterError(
            "float theta cannot decide rationality; pass an exact rational "
            "or set assume_irrational=True for the near-degenerate branch")
    pair = near_degenerate_pair(float(theta), eps)
    return DegeneracyReport(float(theta), "irrational-float", [], [pair])


def near_degenerate_pair(theta, eps):
    """A ladder pair with gap |theta m + n^2 - theta m~ - n~^2| below eps.

    Uses the continued-fraction approximant p/q with q <= N and
    N >= ceil(2/eps) - 1, then builds n + n~ = p with |n~ - n| set by the
    parity of p, and m - m~ = q (n~ - n).  The resulting gap obeys
    gap = |n~ - n| |q theta - p| <= 2/(N+1) <= eps.  A rational theta hit
    exactly by an approximant yields a genuine coincidence with gap 0.
    """
    theta = float(theta)
    if theta <= 0.0 or eps <= 0.0:
        raise InvalidParameterError("theta and eps must be positive")

    n_cap = max(1, math.ceil(2.0 / eps) - 1)
    for _ in range(64):
        approx = dirichlet_approx(theta, n_cap)
        if approx.p >= 3:
            break
        n_cap *= 2
    else:
        raise SolverError("no approximant with p >= 3 found")

    p, q = approx.p, approx.q
    if p % 2 == 1:
        n, nt = (p - 1) // 2, (p + 1) // 2
    else:
        n, nt = p // 2 - 1, p // 2 + 1
    d = nt - n
    m, mt = q * d, 0

    gap = abs(theta * m + n * n - theta * mt - nt * nt)
    bound = 2.0 / (n_cap + 1)
    if gap > bound:
        raise SolverError(
            f"constructed gap {gap:.3e} misses its bound {bound:.3e}")
    return NearDegeneratePair((m, n), (mt, nt), gap, bound, n_cap, p, q,
                              exact=(gap == 0.0))


# --- parallel-layer spectral bottom --------------------------------------------------

def _kummer_condition(mu, b):
    return kummer_1f1(-mu / (4.0 * b) + 0.25, 0.5, b)


def _bottom_canonical(b):
    """Smallest mu-root of the Kummer condition at half-width 1."""
    lo = b
    f_lo = _kummer_condition(lo, b)  # equals 1: the walk starts above mu > B0
    step = b
    for _ in range(100000):
        hi = lo + step
        f_hi = _kummer_condition(hi, b)
        if f_hi == 0.0:
            return hi
        if f_lo > 0.0 > f_hi or f_lo < 0.0 < f_hi:
            return brentq(_kummer_condition, lo, hi, args=(b,),
                          xtol=1e-14, rtol=8.9e-16, maxiter=200)
        lo, f_lo = hi, f_hi
    raise SolverError("no sign change while walking the spectral condition")


def bottom_parallel(b0, a):
    """Bottom mu(B0, a) of the field-parallel layer spectrum.

    Solves the canonical half-width problem at B0 a^2 and rescales by
    a^-2; the upward walk in steps of B0 a^2 cannot skip the first root
    because the even-mode eigenvalues are spaced wider than the step.
    """
    if b0 <= 0.0 or a <= 0.0:
        raise InvalidParameterError("b0 and a must be positive")
    b = b0 * a * a
    return _bottom_canonical(b) / (a * a)


def bottom_asymptotics(b0):
    """Weak-field expansion, strong-field expansion, and the lower bound."""
    if b0 <= 0.0:
        raise InvalidParameterError("b0 must be positive")
    pi2 = math.pi ** 2
    weak = (pi2 / 4.0
            + (1.0 / 3.0 - 2.0 / pi2) * b0 ** 2
            + (4.0 / (45.0 * pi2) - 20.0 / (3.0 * pi2 ** 2) + 56.0 / pi2 ** 3)
            * b0 ** 4)
    strong = b0 + math.sqrt(2.0) * math.pi ** -0.25 \
        * b0 ** 1.25 * math.exp(-b0 / 2.0)
    return {"weak": weak, "strong": strong, "lower": b0}


@dataclass
class BottomCurve:
    """mu(B0, 1) samples with both asymptotes and the strict lower bound."""

    b0: np.ndarray
    mu: np.ndarray
    weak_asy: np.ndarray
    strong_asy: np.ndarray
    lower_bound: np.ndarray

    def __post_init__(self):
        if np.any(self.mu <= self.lower_bound):
            worst = int(np.argmin(self.mu - self.lower_bound))
            raise SolverError(
                f"mu({self.b0[worst]:g}) = {self.mu[worst]:.6g} violates "
                "the strict lower bound mu > B0")

    def rows(self):
        cols = (self.b0, self.mu, self.weak_asy, self.strong_asy,
                self.lower_bound)
        return list(zip(*(np.asarray(c, dtype=float) for c in cols)))


def _bottom_one(b0):
    return bottom_parallel(b0, 1.0)


def bottom_curve(b0_grid, a=1.0, workers=None):
    """mu(B0, a) over a grid, with asymptote and lower-bound columns."""
    b0_grid = np.asarray(b0_grid, dtype=float)
    if np.any(b0_grid <= 0.0) or np.any(b0_grid > 30.0):
        raise InvalidParameterError("b0 grid must lie in (0, 30]")
    if a != 1.0:
        raise InvalidParameterError(
            "the reference curve is defined at a = 1; use bottom_parallel "
            "with the scaling identity for other half-widths")

    if workers is not None and workers > 1 and b0_grid.size > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            mu = np.array(list(pool.map(_bottom_one, b0_grid)))
    else:
        mu = np.array([_bottom_one(b) for b in b0_grid])

    asy = [bottom_asymptotics(b) for b in b0_grid]
    weak = np.array([d["weak"] for d in asy])
    strong = np.array([d["strong"] for d in asy])
    lower = np.array([d["lower"] for d in asy])
    return BottomCurve(b0_grid, mu, weak, strong, lower)
