"""Band scans, flat detection, asymptote matching, and exact level arithmetic."""

import numpy as np
import pytest

from magbands import assembly, bands, closedform, geometry
from magbands.errors import InvalidParameterError, SolverError


# --- BandStructure container ---------------------------------------------------

def test_band_structure_validation():
    xi = np.array([0.0, 1.0, 2.0])
    good = np.array([[1.0, 2.0], [1.1, 2.1], [1.2, 2.2]])
    bs = bands.BandStructure(xi, good, "transverse")
    assert bs.k == 2
    np.testing.assert_array_equal(bs.branch(1), good[:, 0])
    with pytest.raises(InvalidParameterError):
        bs.branch(0)
    with pytest.raises(InvalidParameterError):
        bs.branch(3)
    with pytest.raises(InvalidParameterError):
        bands.BandStructure(np.array([0.0, 0.0, 1.0]), good, "transverse")
    with pytest.raises(InvalidParameterError):
        bands.BandStructure(xi[:2], good, "transverse")
    with pytest.raises(SolverError):
        bands.BandStructure(xi, good[:, ::-1].copy(), "transverse")


def test_flat_band_detect_verdicts():
    xi = np.linspace(-1, 1, 9)
    flat = np.full(9, 2.0)
    sloped = 3.0 + 0.01 * xi
    bs = bands.BandStructure(xi, np.column_stack([flat, sloped]), "transverse")
    rep = bands.flat_band_detect(bs, tol_rel=1e-6)
    assert rep[0]["flat"] and rep[0]["amplitude"] == 0.0
    assert not rep[1]["flat"]
    assert rep[1]["amplitude"] == pytest.approx(0.02 / 4.0, rel=1e-10)
    short = bands.BandStructure(xi[:4], np.ones((4, 1)), "transverse")
    with pytest.raises(InvalidParameterError):
        bands.flat_band_detect(short)


# --- scans -----------------------------------------------------------------------

def test_transverse_scan_even_in_xi():
    grid = assembly.Grid.interval(192)
    xi = np.linspace(-2.0, 2.0, 9)
    bs = bands.scan_transverse_bands(1.0, 0.8, xi, 4, grid)
    np.testing.assert_allclose(bs.branches, bs.branches[::-1, :], rtol=1e-11)
    assert bs.kind == "transverse"
    # rows ascend in m by construction; check the scan filled every row
    assert bs.branches.shape == (9, 4)


def test_band_scan_dispatcher_validation():
    grid = assembly.Grid.interval(64)
    xi = np.linspace(-1, 1, 5)
    with pytest.raises(InvalidParameterError):
        bands.band_scan("unknown", xi, 2, b0=1.0, a=1.0, grid=grid)
    with pytest.raises(InvalidParameterError):
        bands.band_scan("layer", xi, 2, grid=grid)  # missing layer config


def test_scan_results_independent_of_workers():
    grid = assembly.Grid.interval(128)
    xi = np.linspace(-1.5, 1.5, 7)
    serial = bands.scan_transverse_bands(1.2, 0.7, xi, 3, grid, workers=None)
    multi = bands.scan_transverse_bands(1.2, 0.7, xi, 3, grid, workers=2)
    np.testing.assert_array_equal(serial.branches, multi.branches)


# --- asymptote matching -------------------------------------------------------------

def test_tilted_layer_matches_halfplane_levels():
    # For a straight tilted layer every fiber is unitarily equivalent to the
    # xi = 0 one, whose potential is exactly the half-plane comparison
    # operator with alpha = cos(gamma).  Shared grid steps make the
    # discretization error cancel in the residuals.
    gamma, a, b0 = np.pi / 6, 0.4, 1.0
    layer = geometry.LayerConfig(geometry.build_profile("tilted", gamma=gamma), a, b0)
    grid = assembly.Grid.box(10.0, 299, 24)
    xi = np.linspace(-0.5, 0.5, 5)
    bs = bands.scan_layer_bands(layer, xi, 3, grid)
    rep = bands.asymptote_match(bs, np.cos(gamma), np.cos(gamma), b0, a)
    np.testing.assert_allclose(rep["sigma_plus"], rep["sigma_minus"], rtol=1e-14)
    assert np.max(rep["residual_xi_min"]) < 2e-3
    assert np.max(rep["residual_xi_max"]) < 2e-3
    for r in bands.flat_band_detect(bs, tol_rel=1e-5):
        assert r["flat"]


def test_asymptote_match_requires_layer_bands():
    grid = assembly.Grid.interval(64)
    bs = bands.scan_transverse_bands(1.0, 1.0, np.linspace(-1, 1, 5), 2, grid)
    with pytest.raises(InvalidParameterError):
        bands.asymptote_match(bs, 0.5, 1.0, 1.0, 1.0)


# --- bent thresholds ------------------------------------------------------------------

def test_bent_thresholds_reference_case():
    th = bands.bent_thresholds(0.5, 1.0, 1.0)
    # eps0 = (1 - 1/4) / (0.5 sqrt(3)/2) = sqrt(3) here.
    assert th.eps0 == pytest.approx(np.sqrt(3.0), rel=1e-12)
    assert 0.0 < th.eps_star < th.eps0
    bound_ref = 0.75 / (2.0 * np.sqrt(2.0) * np.sqrt(1.0 + np.sqrt(1.5)))
    assert th.closed_form_bound == pytest.approx(bound_ref, rel=1e-12)
    assert th.a0_star >= th.closed_form_bound - 1e-12
    assert th.a0_star == pytest.approx(np.max(th.a0_samples), rel=1e-3)


def test_bent_thresholds_field_scaling():
    # a0 scales like 1/sqrt(B0) at fixed slopes.
    t1 = bands.bent_thresholds(0.5, 1.0, 1.0)
    t4 = bands.bent_thresholds(0.5, 1.0, 4.0)
    assert t4.a0_star == pytest.approx(t1.a0_star / 2.0, rel=1e-9)
    assert t4.eps_star == pytest.approx(t1.eps_star, rel=1e-6)


def test_bent_thresholds_validation():
    with pytest.raises(InvalidParameterError):
        bands.bent_thresholds(1.0, 0.5, 1.0)
    with pytest.raises(InvalidParameterError):
        bands.bent_thresholds(0.5, 1.0, 0.0)


# --- exact field monotonicity -----------------------------------------------------------

def test_field_monotonicity_basic_combinations():
    for b, bt in [(0.5, 1.5), (1.0, 2.0), (1.0, 1.1)]:
        for a in (0.5, 1.0):
            rep = bands.field_monotonicity_check(b, bt, a, 10)
            assert rep["holds"]
            assert np.all(rep["margins"] >= 0.0)
            assert len(rep["levels"]) == 10


def test_field_monotonicity_equality_branch():
    # If both levels keep the oscillator label (m, n) = (0, 1), the margin is
    # exactly zero: sigma_1 = b + E_1/a^2 for both fields.
    rep = bands.field_monotonicity_check(1.0, 1.25, 0.25, 1)
    assert rep["holds"]
    assert rep["margins"][0] == 0.0
    assert rep["equality_branches"] == [1]


def test_field_monotonicity_validation():
    with pytest.raises(InvalidParameterError):
        bands.field_monotonicity_check(2.0, 1.0, 1.0, 5)
    with pytest.raises(InvalidParameterError):
        bands.field_monotonicity_check(1.0, 2.0, -1.0, 5)


def test_pi_squared_enclosure_is_tight_and_correct():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 60
    pi_sq = mp.pi**2
    from fractions import Fraction
    lo = Fraction(bands.PI_SQ_LO)
    hi = Fraction(bands.PI_SQ_HI)
    assert hi - lo == Fraction(1, 10**49)
    assert mp.mpf(lo.numerator) / lo.denominator < pi_sq
    assert mp.mpf(hi.numerator) / hi.denominator > pi_sq


# --- thin limit machinery ---------------------------------------------------------------

def test_thin_limit_study_validation():
    prof = geometry.build_profile("bump", amplitude=0.4)
    with pytest.raises(InvalidParameterError):
        bands.thin_limit_study(prof, 1.0, 0.0, [0.05, 0.1, 0.2])  # ascending
    with pytest.raises(InvalidParameterError):
        bands.thin_limit_study(prof, 1.0, 0.0, [0.2])  # single entry
    thick = 1.0 / prof.kappa_sup + 0.1
    with pytest.raises(InvalidParameterError):
        bands.thin_limit_study(prof, 1.0, 0.0, [thick, 0.1])


# --- structural sufficient conditions ------------------------------------------------------

def test_suff_conditions_by_family():
    b0 = 1.0
    fold = geometry.build_profile("fold", delta=0.3)
    rep = bands.suff_condition_check(fold, b0)
    assert rep["fold"]["holds"]
    assert not rep["bent"]["holds"]

    bent = geometry.build_profile("bent", alpha_plus=0.5, alpha_minus=1.0)
    rep = bands.suff_condition_check(bent, b0)
    assert rep["bent"]["holds"]
    assert not rep["fold"]["holds"]

    # Compactly supported right-sided perturbation of the identity line.
    bump = geometry.build_profile("bump", amplitude=0.45, center=2.0, width=2.0)
    rep = bands.suff_condition_check(bump, b0)
    assert rep["effective_cond_2"]["holds"]

    line = geometry.build_profile("iwatsuka_line")
    rep = bands.suff_condition_check(line, b0)
    assert not rep["effective_cond_2"]["holds"]  # identity is excluded
    assert not rep["fold"]["holds"]
