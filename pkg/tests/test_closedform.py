"""Closed-form layer: double ladder, degeneracy dichotomy, spectral bottom."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.sparse.linalg import eigsh

from magbands import assembly, closedform
from magbands.errors import InvalidParameterError, SolverError


# --- flat double ladder -----------------------------------------------------------

def test_flat_spectrum_matches_brute_force():
    b0, a = 1.3, 0.8
    vals, labels = closedform.flat_spectrum(b0, a, m_max=8, n_max=8)
    brute = sorted(
        (b0 * (2 * m + 1) + (n * np.pi / (2 * a)) ** 2, m, n)
        for m in range(9) for n in range(1, 9))
    assert np.all(np.diff(vals) >= 0)
    for got_val, (m, n), (val, bm, bn) in zip(vals, labels, brute):
        assert got_val == pytest.approx(val, rel=1e-14)
        assert (m, n) == (bm, bn)


def test_flat_spectrum_ground_state_labels():
    # Lowest level is always (m=0, n=1).
    for b0, a in [(0.5, 1.0), (2.0, 0.3), (1.0, 2.0)]:
        vals, labels = closedform.flat_spectrum(b0, a, 4, 4)
        assert labels[0] == (0, 1)
        assert vals[0] == pytest.approx(b0 + (np.pi / (2 * a)) ** 2, rel=1e-14)


def test_theta_parameter():
    assert closedform.theta_parameter(1.0, np.pi) == pytest.approx(8.0, rel=1e-15)
    assert closedform.theta_parameter(np.pi**2 / 8.0, 1.0) == pytest.approx(1.0, rel=1e-15)


# --- degeneracy dichotomy ----------------------------------------------------------

def test_exact_coincidences_integer_identity():
    rep = closedform.degeneracy_enumerate(count=12, theta=1)
    assert rep.rationality.startswith("rational")
    assert len(rep.exact_coincidences) >= 12
    for m, n, mt, nt in rep.exact_coincidences:
        assert Fraction(1) * m + n * n == Fraction(1) * mt + nt * nt
        assert m != mt or n != nt
        assert min(m, mt) >= 0 and min(n, nt) >= 1


def test_exact_coincidences_general_rational():
    rep = closedform.degeneracy_enumerate(count=10, theta=(3, 7))
    th = Fraction(3, 7)
    assert len(rep.exact_coincidences) >= 10
    seen = set()
    for quad in rep.exact_coincidences:
        m, n, mt, nt = quad
        assert th * m + n * n == th * mt + nt * nt
        level = th * m + n * n
        assert level not in seen  # distinct levels, not permutations
        seen.add(level)


def test_degeneracy_report_rejects_false_quadruple():
    with pytest.raises(SolverError):
        closedform.DegeneracyReport(
            theta=Fraction(1), rationality="rational(1/1)",
            exact_coincidences=[(1, 1, 0, 3)])


def test_float_theta_requires_irrationality_flag():
    with pytest.raises(InvalidParameterError):
        closedform.degeneracy_enumerate(theta=np.sqrt(2.0))
    rep = closedform.degeneracy_enumerate(theta=np.sqrt(2.0), assume_irrational=True)
    assert rep.near_pairs


def test_near_pair_sqrt2_structure():
    pair = closedform.near_degenerate_pair(np.sqrt(2.0), eps=2.0 / 21.0)
    assert pair.n_cap == 20
    assert pair.q <= 20
    assert (pair.p, pair.q) == (17, 12)
    m, n = pair.pair
    mt, nt = pair.pair_tilde
    theta = np.sqrt(2.0)
    gap = abs(theta * m + n * n - theta * mt - nt * nt)
    assert gap == pytest.approx(pair.gap, rel=1e-12)
    assert pair.gap <= pair.bound <= 2.0 / 21.0 + 1e-15
    assert not pair.exact


def test_near_pair_property_random_theta():
    rng = np.random.default_rng(2718281828)
    for _ in range(200):
        theta = float(rng.uniform(0.05, 6.0))
        eps = float(rng.uniform(0.02, 0.4))
        pair = closedform.near_degenerate_pair(theta, eps)
        m, n = pair.pair
        mt, nt = pair.pair_tilde
        assert m >= 0 and mt >= 0 and n >= 1 and nt >= 1
        assert (m, n) != (mt, nt)
        gap = abs(theta * m + n * n - theta * mt - nt * nt)
        assert gap == pytest.approx(pair.gap, abs=1e-10)
        assert pair.gap <= pair.bound + 1e-12
        assert pair.bound <= eps + 1e-12


def test_near_pair_tiny_theta_still_valid():
    pair = closedform.near_degenerate_pair(0.0123456, eps=0.1)
    assert pair.pair[1] >= 1 and pair.pair_tilde[1] >= 1
    assert pair.gap <= pair.bound


def test_degeneracy_eps_validation():
    with pytest.raises(InvalidParameterError):
        closedform.near_degenerate_pair(1.5, eps=0.0)
    with pytest.raises(InvalidParameterError):
        closedform.near_degenerate_pair(-2.0, eps=0.1)


# --- spectral bottom ----------------------------------------------------------------

def test_bottom_parallel_exact_polynomial_case():
    # At B0 a^2 = 1/2 the spectral condition terminates: the first factor
    # zero gives mu = 5 B0 exactly (here 2.5).
    assert closedform.bottom_parallel(0.5, 1.0) == pytest.approx(2.5, abs=1e-10)


def test_bottom_parallel_against_mpmath_root():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30

    def condition(mu, b):
        return mp.hyp1f1(-mu / (4 * b) + mp.mpf(1) / 4, mp.mpf(1) / 2, b)

    for b, guess in [(1.0, 2.6), (4.0, 4.6), (8.0, 8.02)]:
        ref = float(mp.findroot(lambda mu: condition(mu, b), guess))
        assert closedform.bottom_parallel(b, 1.0) == pytest.approx(ref, abs=5e-10)


def test_bottom_parallel_frozen_reference_values():
    # Independently computed (finite differences + Richardson agree to 3e-10).
    assert closedform.bottom_parallel(1.0, 1.0) == pytest.approx(2.5969196640, abs=1e-8)
    assert closedform.bottom_parallel(8.0, 1.0) == pytest.approx(8.01588931007, abs=1e-8)


def test_bottom_scaling_identity():
    rng = np.random.default_rng(99)
    for _ in range(12):
        b0 = float(rng.uniform(0.2, 8.0))
        a = float(rng.uniform(0.3, 2.0))
        if b0 * a * a > 30.0:
            continue
        lhs = closedform.bottom_parallel(b0, a)
        rhs = closedform.bottom_parallel(b0 * a * a, 1.0) / (a * a)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_bottom_parallel_agrees_with_finite_differences():
    rng = np.random.default_rng(7)
    grid = assembly.Grid.interval(1024)
    for _ in range(4):
        b0 = float(rng.uniform(0.3, 5.0))
        a = float(rng.uniform(0.5, 1.5))
        fib = assembly.assemble_transverse(0.0, b0, a, grid)
        fd = eigsh(fib.matrix, k=1, which="SA", return_eigenvectors=False)[0]
        ref = closedform.bottom_parallel(b0, a)
        h = grid.h_u
        assert abs(fd - ref) < 5.0 * h * h * (1.0 + abs(ref)) / (a * a)


def test_transverse_fiber_even_in_xi_and_minimized_at_zero():
    grid = assembly.Grid.interval(256)
    b0, a = 1.0, 1.0
    ground = {}
    for xi in (-1.5, -0.5, 0.0, 0.5, 1.5):
        fib = assembly.assemble_transverse(xi, b0, a, grid)
        ground[xi] = eigsh(fib.matrix, k=1, which="SA", return_eigenvectors=False)[0]
    assert ground[0.5] == pytest.approx(ground[-0.5], rel=5e-10)
    assert ground[1.5] == pytest.approx(ground[-1.5], rel=5e-10)
    assert ground[0.0] < min(ground[0.5], ground[1.5])


def test_bottom_asymptotics_weak_branch():
    for b0 in (0.05, 0.1, 0.2, 0.3):
        asy = closedform.bottom_asymptotics(b0)
        mu = closedform.bottom_parallel(b0, 1.0)
        assert abs(mu - asy["weak"]) <= 2e-3
        # remainder is sixth order: tighten with the measured constant
        assert abs(mu - asy["weak"]) <= 2e-4 * b0**6 + 1e-12


def test_bottom_asymptotics_weak_leading_terms():
    # mu -> pi^2/4 as B0 -> 0, quadratic correction (1/3 - 2/pi^2) B0^2.
    asy0 = closedform.bottom_asymptotics(1e-9)
    assert asy0["weak"] == pytest.approx(np.pi**2 / 4, rel=1e-12)
    b0 = 1e-3
    quad_coeff = (closedform.bottom_asymptotics(b0)["weak"] - np.pi**2 / 4) / b0**2
    assert quad_coeff == pytest.approx(1.0 / 3.0 - 2.0 / np.pi**2, rel=1e-5)


def test_bottom_strong_envelope_dominates_gap():
    # The strong-field envelope must bound the actual mu - B0 from above for
    # large fields while staying positive.
    for b0 in (8.0, 10.0, 12.0):
        mu = closedform.bottom_parallel(b0, 1.0)
        asy = closedform.bottom_asymptotics(b0)
        envelope = asy["strong"] - b0
        assert 0.0 < mu - b0 <= envelope


def test_bottom_curve_end_to_end():
    g = np.linspace(0.1, 6.0, 25)
    curve = closedform.bottom_curve(g)
    assert np.all(curve.mu > curve.lower_bound)
    rows = curve.rows()
    assert len(rows) == 25 and len(rows[0]) == 5
    np.testing.assert_allclose(curve.lower_bound, g, rtol=1e-15)


def test_bottom_curve_validation():
    with pytest.raises(InvalidParameterError):
        closedform.bottom_curve(np.array([0.0, 1.0]))
    with pytest.raises(InvalidParameterError):
        closedform.bottom_curve(np.array([1.0, 31.0]))
    with pytest.raises(InvalidParameterError):
        closedform.bottom_curve(np.array([1.0, 2.0]), a=0.5)


def test_bottom_curve_invariant_guard():
    with pytest.raises(SolverError):
        closedform.BottomCurve(
            b0=np.array([1.0]), mu=np.array([0.9]),
            weak_asy=np.array([1.0]), strong_asy=np.array([1.1]),
            lower_bound=np.array([1.0]))
