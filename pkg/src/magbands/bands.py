"""Band structures over the longitudinal momentum and derived studies.

The direct-integral picture reduces spectral questions about the full
operator to eigenvalue curves xi -> lambda_m[xi] of the fiber operators.
This module scans those curves and implements the headline diagnostics:

  * flat_band_detect       windowed constancy verdict per branch
  * asymptote_match        bent-layer branch limits vs half-plane levels
  * bent_thresholds        thickness threshold a_0(eps) and its bounds
  * field_monotonicity     sorted-level shift bound for the straight layer
  * thin_limit_study       effective-model convergence rate in the
                           half-width a
  * suff_condition_check   structural sufficient conditions for
                           non-constant bands
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import assembly, eigensolve, geometry
from .errors import InvalidParameterError, SolverError
from .specfun import dirichlet_energy

# pi^2 enclosure used by the exact-arithmetic branch of the
# monotonicity check (50 significant digits; verified in the tests).
PI_SQ_LO = Fraction("9.8696044010893586188344909998761511353136994072407")
PI_SQ_HI = Fraction("9.8696044010893586188344909998761511353136994072408")


@dataclass
class BandStructure:
    """Eigenvalue branches lambda_m[xi] on a momentum grid.

    branches has shape (len(xi), k); row j holds the k lowest fiber
    eigenvalues at xi[j] in ascending order, so column m-1 is the m-th
    branch in the 1-based labeling.
    """

    xi: np.ndarray
    branches: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.branches = np.asarray(self.branches, dtype=float)
        if self.xi.ndim != 1 or np.any(np.diff(self.xi) <= 0):
            raise InvalidParameterError("xi samples must be strictly increasing")
        if self.branches.shape[0] != self.xi.size:
            raise InvalidParameterError("branch matrix does not match xi grid")
        if not np.all(np.isfinite(self.branches)):
            raise SolverError("non-finite branch values")
        if np.any(np.diff(self.branches, axis=1) < 0):
            raise SolverError("branch rows are not sorted")

    @property
    def k(self):
        return self.branches.shape[1]

    def branch(self, m):
        """The m-th branch (1-based) as an array over the xi grid."""
        if not 1 <= m <= self.k:
            raise InvalidParameterError(f"branch index {m} out of range")
        return self.branches[:, m - 1]


def _solve_layer(args):
    layer, xi, grid, e_max, k = args
    return eigensolve.lowest_eigs(assembly.assemble_fiber(layer, xi, grid, e_max), k)


def _solve_transverse(args):
    b0, a, xi, grid, _e_max, k = args
    return eigensolve.lowest_eigs(assembly.assemble_transverse(xi, b0, a, grid), k)


def _solve_effective(args):
    profile, b0, xi, grid, e_max, k = args
    return eigensolve.lowest_eigs(
        assembly.assemble_effective(profile, b0, xi, grid, e_max), k)


def _solve_iwatsuka(args):
    spec, xi, grid, e_max, k = args
    return eigensolve.lowest_eigs(
        assembly.assemble_iwatsuka(spec, xi, grid, e_max), k)


def _reraise_with_xi(exc, xi):
    head = exc.args[0] if exc.args else exc
    exc.args = (f"xi={xi:g}: {head}",) + tuple(exc.args[1:])
    raise exc


def _run_scan(solver, tasks, xis, workers):
    """Solve one fiber per xi; order-fixed so results are deterministic."""
    rows = [None] * len(tasks)
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(solver, t) for t in tasks]
            for i, fut in enumerate(futures):
                try:
                    rows[i] = fut.result()
                except Exception as exc:
                    _reraise_with_xi(exc, xis[i])
    else:
        for i, t in enumerate(tasks):
            try:
                rows[i] = solver(t)
            except Exception as exc:
                _reraise_with_xi(exc, xis[i])
    return np.vstack(rows)


def scan_layer_bands(layer, xi_grid, k, grid, e_max=None, workers=None):
    xi_grid = np.asarray(xi_grid, dtype=float)
    tasks = [(layer, xi, grid, e_max, k) for xi in xi_grid]
    rows = _run_scan(_solve_layer, tasks, xi_grid, workers)
    meta = {"grid": grid, "b0": layer.b0, "a": layer.a,
            "profile": layer.profile.family,
            "profile_params": dict(layer.profile.params), "e_max": e_max}
    return BandStructure(xi_grid, rows, "layer", meta)


def scan_transverse_bands(b0, a, xi_grid, k, grid, workers=None):
    xi_grid = np.asarray(xi_grid, dtype=float)
    tasks = [(b0, a, xi, grid, None, k) for xi in xi_grid]
    rows = _run_scan(_solve_transverse, tasks, xi_grid, workers)
    return BandStructure(xi_grid, rows, "transverse",
                         {"grid": grid, "b0": b0, "a": a})


def scan_effective_bands(profile, b0, xi_grid, k, grid, e_max=None, workers=None):
    xi_grid = np.asarray(xi_grid, dtype=float)
    tasks = [(profile, b0, xi, grid, e_max, k) for xi in xi_grid]
    rows = _run_scan(_solve_effective, tasks, xi_grid, workers)
    meta = {"grid": grid, "b0": b0, "profile": profile.family,
            "profile_params": dict(profile.params), "e_max": e_max}
    return BandStructure(xi_grid, rows, "effective", meta)


def scan_iwatsuka_bands(spec, xi_grid, k, grid, e_max=None, workers=None):
    xi_grid = np.asarray(xi_grid, dtype=float)
    tasks = [(spec, xi, grid, e_max, k) for xi in xi_grid]
    rows = _run_scan(_solve_iwatsuka, tasks, xi_grid, workers)
    return BandStructure(xi_grid, rows, "iwatsuka",
                         {"grid": grid, "b0": spec.b0, "e_max": e_max})


def band_scan(kind, xi_grid, k, *, layer=None, profile=None, b0=None, a=None,
              spec=None, grid=None, e_max=None, workers=None):
    """Dispatch a band scan by operator kind; see the scan_* functions."""
    if kind == "layer":
        return scan_layer_bands(layer, xi_grid, k, grid, e_max, workers)
    if kind == "transverse":
        return scan_transverse_bands(b0, a, xi_grid, k, grid, workers)
    if kind == "effective":
        return scan_effective_bands(profile, b0, xi_grid, k, grid, e_max, workers)
    if kind == "iwatsuka":
        return scan_iwatsuka_bands(spec, xi_grid, k, grid, e_max, workers)
    raise InvalidParameterError(f"unknown band kind {kind!r}")


# --- flat-band detection --------------------------------------------------------

def flat_band_detect(bands, tol_rel=1e-6):
    """Windowed constancy verdict per branch.

    A branch is flagged flat when its oscillation (max - min)/(1 + |mean|)
    over the scanned window stays below tol_rel.  This is a statement
    about the window only; the report carries the window for that reason.
    """
    if bands.xi.size < 5:
        raise InvalidParameterError("flat-band detection needs >= 5 xi samples")
    out = []
    for m in range(1, bands.k + 1):
        vals = bands.branch(m)
        amp = float((vals.max() - vals.min()) / (1.0 + abs(vals.mean())))
        out.append({"branch": m, "flat": amp < tol_rel, "amplitude": amp,
                    "window": (float(bands.xi[0]), float(bands.xi[-1])),
                    "tol_rel": tol_rel})
    return out


# --- asymptote matching ---------------------------------------------------------

def halfplane_levels(alpha, b0, a, h_s, n_u, k):
    """k lowest levels of the straight-tail comparison operator.

    The operator is assembled on a box with the given longitudinal step
    (so discretization cancels against a band scan using the same steps)
    and a half-length grown until the walls clear the k-th level.
    """
    cap = b0 * (2 * k + 3) + 10.0
    half = (math.sqrt(cap) / max(alpha * b0, 1e-12) + a) * 1.25
    n_s = max(8, int(math.ceil(2.0 * half / h_s)) - 1)
    half = 0.5 * h_s * (n_s + 1)
    grid = assembly.Grid.box(half, n_s, n_u)
    fib = assembly.assemble_halfplane(alpha, b0, a, grid, e_max=None)
    return eigensolve.lowest_eigs(fib, k), grid


def asymptote_match(bands, alpha_plus, alpha_minus, b0, a, k=None):
    """Compare branch values at the window ends with half-plane levels.

    The xi -> -infinity end runs into the alpha_plus tail and the
    xi -> +infinity end into the alpha_minus tail.  Matching grid steps
    are used for the comparison operators so that the common transverse
    discretization error cancels in the residuals.
    """
    if bands.kind != "layer":
        raise InvalidParameterError("asymptote matching expects layer bands")
    k = bands.k if k is None else min(k, bands.k)
    grid = bands.meta["grid"]
    sigma_plus, _ = halfplane_levels(alpha_plus, b0, a, grid.h_s, grid.n_u, k)
    sigma_minus, _ = halfplane_levels(alpha_minus, b0, a, grid.h_s, grid.n_u, k)

    res_min = np.abs(bands.branches[0, :k] - sigma_plus)
    res_max = np.abs(bands.branches[-1, :k] - sigma_minus)

    warnings = []
    if bands.xi.size >= 3:
        prev_min = np.abs(bands.branches[1, :k] - sigma_plus)
        prev_max = np.abs(bands.branches[-2, :k] - sigma_minus)
        if np.any(res_min > prev_min + 1e-12):
            warnings.append(
                "window too narrow at the lower end: residual still growing")
        if np.any(res_max > prev_max + 1e-12):
            warnings.append(
                "window too narrow at the upper end: residual still growing")

    return {"sigma_plus": sigma_plus, "sigma_minus": sigma_minus,
            "residual_xi_min": res_min, "residual_xi_max": res_max,
            "warnings": warnings}


# --- bent-layer thickness thresholds --------------------------------------------

@dataclass
class BentThresholds:
    """Thickness threshold data for a bent layer with slopes alpha+- ."""

    alpha_plus: float
    alpha_minus: float
    b0: float
    eps0: float
    eps_star: float
    a0_star: float
    closed_form_bound: float
    eps_samples: np.ndarray
    a0_samples: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.eps_star < self.eps0:
            raise SolverError("maximizer left the admissible interval")
        if self.a0_star < 0.0:
            raise SolverError("negative threshold value")
        if self.closed_form_bound > float(np.max(self.a0_samples)) + 1e-9:
            raise SolverError("closed-form bound exceeds the sampled maximum")


def _g(alpha, eps):
    return math.sqrt(alpha * alpha + alpha * math.sqrt(1.0 - alpha * alpha) * eps)


def _a0(eps, ap, am, b0):
    num = _g(am, -eps) - _g(ap, eps)
    den = (1.0 - ap * ap
           + (ap * math.sqrt(1.0 - ap * ap) + am * math.sqrt(1.0 - am * am)) / eps)
    if num <= 0.0 or den <= 0.0:
        return 0.0
    return math.sqrt(num / den) / math.sqrt(b0)


def _golden_max(f, lo, hi, tol=1e-12):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol * max(1.0, abs(lo) + abs(hi)):
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def bent_thresholds(alpha_plus, alpha_minus, b0, n_samples=201):
    """Threshold half-width a_0 below which sigma_m(a+) < sigma_m(a-).

    Evaluates eps0, maximizes a_0(eps) on (0, eps0) by golden-section
    search, and reports the closed-form lower bound on the supremum.
    """
    ap, am = float(alpha_plus), float(alpha_minus)
    if not (0.0 < ap < am <= 1.0):
        raise InvalidParameterError("need 0 < alpha_plus < alpha_minus <= 1")
    if b0 <= 0.0:
        raise InvalidParameterError("b0 must be positive")

    den = ap * math.sqrt(1.0 - ap * ap) + am * math.sqrt(1.0 - am * am)
    eps0 = (am * am - ap * ap) / den

    pad = 1e-9 * eps0
    eps_star, a0_star = _golden_max(lambda e: _a0(e, ap, am, b0), pad, eps0 - pad)
    bound = (am * am - ap * ap) / (
        2.0 * math.sqrt(2.0) * math.sqrt(1.0 + math.sqrt(1.5)) * math.sqrt(b0))

    eps = np.linspace(eps0 / n_samples, eps0 * (1.0 - 1.0 / n_samples), n_samples)
    vals = np.array([_a0(e, ap, am, b0) for e in eps])
    return BentThresholds(ap, am, b0, eps0, eps_star, a0_star, bound, eps, vals)


# --- field monotonicity for the straight parallel layer -------------------------

def _level_table(b, a, m_cap, n_cap):
    m = np.arange(m_cap + 1)
    n = np.arange(1, n_cap + 1)
    vals = b * (2 * m[:, None] + 1) + dirichlet_energy(n)[None, :] / a**2
    flat = vals.ravel()
    order = np.argsort(flat, kind="stable")
    labels = [(int(i // n_cap), int(i % n_cap) + 1) for i in order]
    return flat[order], labels


def _exact_margin(b, b_tilde, a, lab, lab_t):
    """Sign of sigma_m(b_tilde) - sigma_m(b) - (b_tilde - b), exactly.

    The inputs are binary floats, hence exact rationals; each level is
    rational + rational * pi^2, so the margin is r + t*pi^2 and its sign
    follows from exact arithmetic plus a pi^2 enclosure.
    """
    fb, fbt, fa = Fraction(b), Fraction(b_tilde), Fraction(a)
    (m1, n1), (m2, n2) = lab, lab_t
    r = fbt * (2 * m2 + 1) - fb * (2 * m1 + 1) - (fbt - fb)
    t = Fraction(n2 * n2 - n1 * n1, 4) / (fa * fa)
    if t == 0:
        if r == 0:
            return 0
        return 1 if r > 0 else -1
    lo = r + t * (PI_SQ_LO if t > 0 else PI_SQ_HI)
    hi = r + t * (PI_SQ_HI if t > 0 else PI_SQ_LO)
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    raise SolverError("pi^2 enclosure too coarse for an exact verdict")


def field_monotonicity_check(b, b_tilde, a, m_max, window=40):
    """Check sigma_m(1, b_tilde) - sigma_m(1, b) >= b_tilde - b for m <= m_max.

    Levels come from the closed form b(2m+1) + a^-2 (n pi / 2)^2, sorted.
    The enumeration window is validated (the m_max-th level must lie
    below every boundary candidate) and enlarged on demand.  Margins
    within float noise of zero are settled in exact arithmetic, so the
    verdict carries no numerical tolerance.
    """
    if not 0.0 < b < b_tilde:
        raise InvalidParameterError("need 0 < b < b_tilde")
    if a <= 0.0 or m_max < 1:
        raise InvalidParameterError("need a > 0 and m_max >= 1")

    cap = int(window)
    for _ in range(6):
        lev, lab = _level_table(b, a, cap, cap)
        lev_t, lab_t = _level_table(b_tilde, a, cap, cap)
        boundary = min(
            b * (2 * (cap + 1) + 1) + dirichlet_energy(1) / a**2,
            b + dirichlet_energy(cap + 1) / a**2)
        if lev[m_max - 1] < boundary and lev_t[m_max - 1] < boundary:
            break
        cap *= 2
    else:
        raise SolverError("could not validate the enumeration window")

    shift = b_tilde - b
    margins = lev_t[:m_max] - lev[:m_max] - shift
    equalities = []
    holds = True
    for m in range(m_max):
        if abs(margins[m]) < 1e-9 * (1.0 + abs(lev[m])):
            sign = _exact_margin(b, b_tilde, a, lab[m], lab_t[m])
            if sign == 0:
                equalities.append(m + 1)
                margins[m] = 0.0
            elif sign < 0:
                holds = False
        elif margins[m] < 0:
            holds = False
    return {"holds": holds, "margins": margins, "equality_branches": equalities,
            "window": cap, "shift": shift,
            "levels": lev[:m_max], "levels_tilde": lev_t[:m_max],
            "labels": lab[:m_max], "labels_tilde": lab_t[:m_max]}


# --- thin-layer convergence study ------------------------------------------------

@dataclass
class ThinLimitReport:
    """Per-half-width model error and the fitted convergence order."""

    a_values: np.ndarray
    deltas: np.ndarray
    slope: float
    xi: float
    refined: bool
    details: dict = field(default_factory=dict)


def _discrete_transverse_ground(h_u):
    """Lowest eigenvalue of the three-point Dirichlet Laplacian on (-1, 1)."""
    return (4.0 / h_u**2) * math.sin(math.pi * h_u / 4.0) ** 2


def _thin_delta(profile, b0, xi, a, half, n_s, n_u):
    layer = geometry.LayerConfig(profile, a, b0)
    e_max = _discrete_transverse_ground(2.0 / (n_u + 1)) / a**2 + 3.0 * b0 + 1.0
    box = assembly.Grid.box(half, n_s, n_u)
    lam = eigensolve.lowest_eigs(
        assembly.assemble_fiber(layer, xi, box, e_max), 1)[0]
    line = assembly.Grid.line(half, n_s)
    nu = eigensolve.lowest_eigs(
        assembly.assemble_effective(profile, b0, xi, line, None), 1)[0]
    trans = _discrete_transverse_ground(box.h_u) / a**2
    return abs(lam - trans - nu)


def thin_limit_study(profile, b0, xi, a_list, n_s=2047, n_u=64, half=None):
    """Model error of the effective fiber as the half-width a shrinks.

    delta(a) = |lambda_1^2D[xi] - a^-2 E1_h - nu_1[xi]| where E1_h is the
    discrete transverse ground energy on the same u-grid (so the pure
    transverse discretization error cancels instead of swamping the O(a)
    model error) and nu_1 comes from the effective fiber on the same
    s-grid.  Returns the per-a errors and the log-log slope.
    """
    a_list = [float(a) for a in a_list]
    if len(a_list) < 2 or np.any(np.diff(a_list) >= 0):
        raise InvalidParameterError("a_list must be descending with >= 2 entries")
    for a in a_list:
        if a * profile.kappa_sup >= 1.0:
            raise InvalidParameterError(f"half-width {a:g} violates a*kappa < 1")

    if half is None:
        lo, hi = profile.support
        reach = math.sqrt(3.0 * b0 + 11.0) / b0 + abs(xi) / b0
        half = max(abs(lo), abs(hi), 0.0) + max(reach, 4.0)

    refined = False
    for _ in range(2):
        deltas = np.array(
            [_thin_delta(profile, b0, xi, a, half, n_s, n_u) for a in a_list])
        if np.all(np.diff(deltas) < 0.0) or np.all(deltas < 1e-12):
            break
        refined = True
        n_s, n_u = 2 * n_s + 1, 2 * n_u

    loga = np.log(np.asarray(a_list))
    logd = np.log(np.maximum(deltas, 1e-300))
    slope = float(np.polyfit(loga, logd, 1)[0])
    return ThinLimitReport(np.asarray(a_list), deltas, slope, float(xi), refined,
                           {"n_s": n_s, "n_u": n_u, "half": half, "b0": b0})


# --- structural sufficient conditions --------------------------------------------

def suff_condition_check(profile, b0):
    """Which structural non-constancy conditions the profile satisfies.

    Checks the one-sided-fold tail condition, the bent-tail condition,
    the effective-model slope/curvature inequality (in both orientations)
    and the compact-right-perturbation condition.  Each entry reports a
    verdict plus the numbers behind it.
    """
    st = geometry.slope_stats(profile)
    lo, hi = profile.support
    (xm, _zm), (xp, _zp) = profile.tangent_tails()

    fold_holds = xp * xm < 0.0
    fold = {"holds": bool(fold_holds),
            "witness": {"xdot_plus": xp, "xdot_minus": xm,
                        "x_limits_same_sign": bool(fold_holds)}}

    bent_holds = (0.0 < xp <= 1.0 and 0.0 < xm <= 1.0 and xp != xm
                  and lo < hi)
    bent = {"holds": bool(bent_holds),
            "witness": {"alpha_plus": xp, "alpha_minus": xm}}

    def cond1(x_lo, x_hi, k_lo, k_hi):
        prereq = x_hi > 0.0 and x_lo > 0.0 and x_hi >= x_lo
        ineq = (k_hi - k_lo) < 4.0 * b0 * (x_hi - x_lo)
        return {"holds": bool(prereq and ineq),
                "witness": {"xdot_inf_plus": x_hi, "xdot_sup_minus": x_lo,
                            "kappa_sq_inf_plus": k_hi, "kappa_sq_sup_minus": k_lo,
                            "prerequisite": bool(prereq),
                            "inequality": bool(ineq)}}

    c1 = cond1(xm, xp, st.kappa_sq_minus, st.kappa_sq_plus)
    c1m = cond1(xp, xm, st.kappa_sq_plus, st.kappa_sq_minus)

    pad = max(1.0, hi - lo)
    ss = np.linspace(min(lo, 0.0), hi + pad, 2001)
    xdot = np.cos(profile.phi(ss))
    c2_holds = (lo >= 0.0 and xm == 1.0 and xp > 0.0
                and bool(np.all(xdot >= -1e-15)) and profile.kappa_sup > 0.0)
    c2 = {"holds": bool(c2_holds),
          "witness": {"support_start": lo, "left_slope": xm,
                      "xdot_min_right": float(xdot.min()),
                      "xdot_inf_plus": xp,
                      "not_identity": profile.kappa_sup > 0.0}}

    return {"fold": fold, "bent": bent, "effective_cond_1": c1,
            "effective_cond_1_mirrored": c1m, "effective_cond_2": c2}
