"""Finite-difference assembly of the fiber operators.

All operators are discretized with second-order central differences on
uniform grids with Dirichlet truncation.  The divergence-form term
-d/ds f^{-2} d/ds uses midpoint coefficients, D^T diag(f^{-2}) D, which
keeps every matrix exactly symmetric.

Five operator kinds are produced:

  layer       2D fiber of a curved magnetic Dirichlet layer:
              -d/ds f^-2 d/ds + (xi + A2)^2 - a^-2 d^2/du^2 + V
  halfplane   2D comparison operator with straight tails of slope alpha:
              -d^2/ds^2 + b0^2 (alpha s - a u sqrt(1-alpha^2))^2 - a^-2 d^2/du^2
  transverse  1D fiber of the translation-invariant parallel layer:
              -a^-2 d^2/du^2 + (xi - b0 a u)^2
  effective   1D thin-layer comparison fiber on the curve itself:
              -d^2/ds^2 + (xi + b0 x(s))^2 - kappa^2/4
  iwatsuka    1D fiber for a unidirectionally varying field:
              -d^2/dx^2 + (xi + A_y(x))^2 + W(x)

2D unknowns are ordered with the transverse index fastest, so the
bandwidth equals the transverse grid size.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import geometry
from .errors import ConfinementError, InvalidParameterError

CONFINEMENT_MARGIN = 10.0


@dataclass(frozen=True)
class Grid:
    """Uniform Dirichlet grid; 1D grids leave the unused axis as None.

    s-axis: interval [-half_length, half_length] with n_s interior nodes.
    u-axis: interval (-1, 1) with n_u interior nodes.
    """

    half_length: float | None = None
    n_s: int | None = None
    n_u: int | None = None

    def __post_init__(self):
        if (self.half_length is None) != (self.n_s is None):
            raise InvalidParameterError("give both half_length and n_s, or neither")
        if self.half_length is not None and self.half_length <= 0:
            raise InvalidParameterError("half_length must be positive")
        for n in (self.n_s, self.n_u):
            if n is not None and n < 8:
                raise InvalidParameterError("grids need at least 8 interior nodes")

    @classmethod
    def box(cls, half_length, n_s, n_u):
        return cls(half_length=float(half_length), n_s=int(n_s), n_u=int(n_u))

    @classmethod
    def line(cls, half_length, n_s):
        return cls(half_length=float(half_length), n_s=int(n_s))

    @classmethod
    def interval(cls, n_u):
        return cls(n_u=int(n_u))

    @property
    def h_s(self):
        return 2.0 * self.half_length / (self.n_s + 1)

    @property
    def h_u(self):
        return 2.0 / (self.n_u + 1)

    def s_nodes(self):
        return -self.half_length + self.h_s * np.arange(1, self.n_s + 1)

    def s_midpoints(self):
        """The n_s + 1 midpoints between consecutive nodes (walls included)."""
        return -self.half_length + self.h_s * (np.arange(self.n_s + 1) + 0.5)

    def u_nodes(self):
        return -1.0 + self.h_u * np.arange(1, self.n_u + 1)


_1D_KINDS = {"transverse", "effective", "iwatsuka"}
_2D_KINDS = {"layer", "halfplane"}


@dataclass
class FiberMatrix:
    """A discretized fiber operator together with its provenance."""

    kind: str
    xi: float
    matrix: sp.csr_matrix
    grid: Grid
    meta: dict = field(default_factory=dict)

    @property
    def is_1d(self):
        return self.kind in _1D_KINDS


def _tridiag(diag, off):
    n = len(diag)
    return sp.diags([off, diag, off], [-1, 0, 1], shape=(n, n), format="csr")


def _two_d(grid, s_diag_blocks, s_off_blocks, potential, inv_a2_over_hu2):
    """Assemble the 2D matrix in s-major ordering (u index fastest).

    s_diag_blocks, s_off_blocks: arrays of shape (n_s, n_u) and
    (n_s - 1, n_u) holding the longitudinal stencil weights per u-line.
    """
    n_s, n_u = grid.n_s, grid.n_u
    main = s_diag_blocks + 2.0 * inv_a2_over_hu2 + potential
    off_u = np.tile(np.r_[np.full(n_u - 1, -inv_a2_over_hu2), 0.0], n_s)[:-1]
    off_s = s_off_blocks.ravel()
    return sp.diags(
        [main.ravel(), off_u, off_u, off_s, off_s],
        [0, 1, -1, n_u, -n_u], format="csr")


# --- confinement rule ---------------------------------------------------------

def _check_confinement(wall_floor, e_max, kind, xi, suggest):
    """wall_floor: min over the transverse wall sections of the confining term."""
    if e_max is None:
        return
    if wall_floor < e_max + CONFINEMENT_MARGIN:
        raise ConfinementError(
            f"{kind} fiber at xi={xi:g}: wall potential {wall_floor:.3g} below "
            f"requested top {e_max:.3g} + {CONFINEMENT_MARGIN:g}; "
            f"enlarge the box (suggested half-length {suggest:.3g})",
            suggested_half_length=suggest)


def _grow_until(wall_floor_at, target, start=4.0):
    half = start
    for _ in range(200):
        if wall_floor_at(half) >= target:
            return half
        half *= 1.25
    raise ConfinementError("could not find a confining half-length")


def suggest_half_length(layer, xi, e_max, start=4.0):
    """Smallest tested half-length whose walls confine energies up to e_max."""
    u = np.linspace(-1.0, 1.0, 41)

    def floor_at(half):
        a2 = geometry.vector_potential_A2(layer, np.array([-half, half]), u)
        return float(np.min((xi + a2) ** 2))

    return _grow_until(floor_at, e_max + CONFINEMENT_MARGIN, start)


# --- assemblers ----------------------------------------------------------------

def transverse_zero_point(grid, a):
    """Discrete transverse ground energy a^-2 E1_h carried by every 2D state.

    The u-part of the 2D stencil is exactly the three-point Dirichlet
    Laplacian, so each eigenstate pays at least this much; confinement
    checks credit it against the requested energy top.
    """
    h = grid.h_u
    return (4.0 / (a * h) ** 2) * np.sin(np.pi * h / 4.0) ** 2


def assemble_fiber(layer, xi, grid, e_max=None):
    """Full 2D fiber of a curved layer at longitudinal momentum xi.

    When e_max is given, refuses grids whose Dirichlet walls sit below
    e_max + 10 in the confining part (xi + A2)^2 plus the transverse
    zero-point energy, and suggests a larger half-length instead.
    """
    if grid.n_s is None or grid.n_u is None:
        raise InvalidParameterError("layer fiber needs a 2D grid")
    xi = float(xi)
    a = layer.a
    s = grid.s_nodes()
    u = grid.u_nodes()

    wall = geometry.vector_potential_A2(
        layer, np.array([-grid.half_length, grid.half_length]), u)
    wall_floor = float(np.min((xi + wall) ** 2)) + transverse_zero_point(grid, a)
    if e_max is not None and wall_floor < e_max + CONFINEMENT_MARGIN:
        _check_confinement(
            wall_floor, e_max, "layer", xi,
            suggest_half_length(layer, xi,
                                e_max - transverse_zero_point(grid, a),
                                grid.half_length))

    a2 = geometry.vector_potential_A2(layer, s, u)
    v = geometry.curvature_potential_V(layer, s, u)
    potential = (xi + a2) ** 2 + v

    w_half = geometry.metric_factor(layer, grid.s_midpoints(), u) ** -2.0
    inv_hs2 = 1.0 / grid.h_s**2
    s_diag = (w_half[:-1, :] + w_half[1:, :]) * inv_hs2
    s_off = -w_half[1:-1, :] * inv_hs2

    m = _two_d(grid, s_diag, s_off, potential, 1.0 / (a * grid.h_u) ** 2)
    meta = {"b0": layer.b0, "a": a, "profile": layer.profile.family,
            "profile_params": dict(layer.profile.params)}
    return FiberMatrix("layer", xi, m, grid, meta)


def assemble_halfplane(alpha, b0, a, grid, e_max=None):
    """2D comparison operator for a straight tail of slope alpha in (0, 1]."""
    if not (0.0 < alpha <= 1.0):
        raise InvalidParameterError("tail slope alpha must lie in (0, 1]")
    if grid.n_s is None or grid.n_u is None:
        raise InvalidParameterError("halfplane operator needs a 2D grid")
    s = grid.s_nodes()
    u = grid.u_nodes()
    beta = np.sqrt(1.0 - alpha * alpha)

    zero_pt = transverse_zero_point(grid, a)

    def floor_at(half):
        vals = (b0 * (alpha * np.array([[-half], [half]]) - a * u[None, :] * beta)) ** 2
        return float(np.min(vals)) + zero_pt

    if e_max is not None:
        wall_floor = floor_at(grid.half_length)
        if wall_floor < e_max + CONFINEMENT_MARGIN:
            _check_confinement(
                wall_floor, e_max, "halfplane", 0.0,
                _grow_until(floor_at, e_max + CONFINEMENT_MARGIN, grid.half_length))

    potential = (b0 * (alpha * s[:, None] - a * u[None, :] * beta)) ** 2
    inv_hs2 = 1.0 / grid.h_s**2
    s_diag = np.full((grid.n_s, grid.n_u), 2.0 * inv_hs2)
    s_off = np.full((grid.n_s - 1, grid.n_u), -inv_hs2)
    m = _two_d(grid, s_diag, s_off, potential, 1.0 / (a * grid.h_u) ** 2)
    return FiberMatrix("halfplane", 0.0, m, grid, {"alpha": alpha, "b0": b0, "a": a})


def assemble_transverse(xi, b0, a, grid):
    """1D transverse fiber -a^-2 d^2/du^2 + (xi - b0 a u)^2 on (-1, 1)."""
    if grid.n_u is None:
        raise InvalidParameterError("transverse fiber needs a u-grid")
    u = grid.u_nodes()
    inv = 1.0 / (a * grid.h_u) ** 2
    diag = 2.0 * inv + (xi - b0 * a * u) ** 2
    m = _tridiag(diag, np.full(grid.n_u - 1, -inv))
    return FiberMatrix("transverse", float(xi), m, grid, {"b0": b0, "a": a})


def assemble_effective(profile, b0, xi, grid, e_max=None):
    """1D thin-layer comparison fiber -d^2/ds^2 + (xi + b0 x(s))^2 - kappa^2/4."""
    if grid.n_s is None:
        raise InvalidParameterError("effective fiber needs an s-grid")
    xi = float(xi)
    s = grid.s_nodes()

    if e_max is not None:
        xw, _ = geometry.curve_points(
            profile, np.array([-grid.half_length, grid.half_length]))
        wall_floor = float(np.min((xi + b0 * xw) ** 2))

        def floor_at(half):
            xh, _ = geometry.curve_points(profile, np.array([-half, half]))
            return float(np.min((xi + b0 * xh) ** 2))

        if wall_floor < e_max + CONFINEMENT_MARGIN:
            _check_confinement(
                wall_floor, e_max, "effective", xi,
                _grow_until(floor_at, e_max + CONFINEMENT_MARGIN, grid.half_length))

    x, _ = geometry.curve_points(profile, s)
    kap = profile.kappa(s)
    inv = 1.0 / grid.h_s**2
    diag = 2.0 * inv + (xi + b0 * x) ** 2 - 0.25 * kap * kap
    m = _tridiag(diag, np.full(grid.n_s - 1, -inv))
    meta = {"b0": b0, "profile": profile.family,
            "profile_params": dict(profile.params)}
    return FiberMatrix("effective", xi, m, grid, meta)


def assemble_iwatsuka(spec, xi, grid, e_max=None):
    """1D fiber -d^2/dx^2 + (xi + A_y(x))^2 + W(x) for a unidirectional field.

    A_y(x) = b0 (x + r(x)) with r the integrated field modulation; r comes
    from the field primitive in closed form (or cumulative quadrature for
    plain callables).
    """
    if grid.n_s is None:
        raise InvalidParameterError("iwatsuka fiber needs an x-grid")
    xi = float(xi)
    x = grid.s_nodes()
    a_y = spec.vector_potential(x)
    w = spec.well_values(x)

    if e_max is not None:
        walls = spec.vector_potential(np.array([-grid.half_length, grid.half_length]))
        wall_floor = float(np.min((xi + walls) ** 2))

        def floor_at(half):
            vals = spec.vector_potential(np.array([-half, half]))
            return float(np.min((xi + vals) ** 2))

        if wall_floor < e_max + CONFINEMENT_MARGIN:
            _check_confinement(
                wall_floor, e_max, "iwatsuka", xi,
                _grow_until(floor_at, e_max + CONFINEMENT_MARGIN, grid.half_length))

    inv = 1.0 / grid.h_s**2
    diag = 2.0 * inv + (xi + a_y) ** 2 + w
    m = _tridiag(diag, np.full(grid.n_s - 1, -inv))
    return FiberMatrix("iwatsuka", xi, m, grid, {"b0": spec.b0})
