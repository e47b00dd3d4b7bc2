"""Continuum double-well solver for the inter-pillar hopping amplitude.

Two flat-bottom potential wells (depth -V0, diameter d) on a hard-wall
domain model a pair of micropillars.  The hopping amplitude between them
is taken as half the tunnel splitting of the two lowest eigenstates,
J_sys = (E1 - E0) / 2, obtained from a finite-difference discretization
(3-point stencil in 1D, 5-point in 2D) of

    H = -hbar^2 nabla^2 / (2 m_eff) + V(r).

A cavity branch can be coupled in as a two-component block Hamiltonian
[[H_sys, delta], [delta, -hbar^2 nabla^2 / (2 m_c)]]; the ultralight
cavity branch admixes into the well states and enhances the tunneling.

Well separations are measured center to center.  Both lowest states must
lie below the outside-potential level (E < 0) for the splitting to be a
tunneling doublet; the result carries a `doublet_bound` flag, and
quantities derived from unbound states should be treated as indicative
only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .constants import KINETIC_MEV_NM2

# single-emitter linewidths (meV) used to express J_sys in units of the
# respective material's linewidth
MATERIAL_LINEWIDTHS = {"GaAs": 0.15, "WSe2": 0.18, "perovskite": 1.0}

SWEEP_VARIABLES = ("depth", "distance", "m_eff")


@dataclass(frozen=True)
class PillarGeometry:
    """Double-well problem definition.

    domain_size=None picks a domain large enough for the bound-state tails
    to decay at the hard walls (and never smaller than
    center_separation + 4 diameters); grid_spacing=None resolves the well
    diameter with 20 points in 1D and 10 in 2D.
    """

    well_depth: float = 10.0
    well_diameter: float = 10.0
    center_separation: float = 5.0
    m_eff: float = 0.05
    dimension: int = 1
    domain_size: float | None = None
    grid_spacing: float | None = None

    def __post_init__(self):
        if self.well_depth <= 0 or self.well_diameter <= 0:
            raise ValueError("well depth and diameter must be positive")
        if self.center_separation < 0:
            raise ValueError("center separation must be nonnegative")
        if self.m_eff <= 0:
            raise ValueError("m_eff must be positive")
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.grid_spacing is not None and self.grid_spacing > self.well_diameter / 10:
            raise ValueError("grid spacing must be <= well_diameter / 10")
        if self.domain_size is not None and self.domain_size < self.minimum_domain:
            raise ValueError(f"domain_size must be >= {self.minimum_domain} nm")

    @property
    def minimum_domain(self) -> float:
        return self.center_separation + 4 * self.well_diameter

    @property
    def spacing(self) -> float:
        if self.grid_spacing is not None:
            return self.grid_spacing
        return self.well_diameter / (20 if self.dimension == 1 else 10)

    @property
    def extent(self) -> float:
        if self.domain_size is not None:
            return self.domain_size
        # decay room: several tunneling lengths at a quarter of the well depth
        decay = np.sqrt(KINETIC_MEV_NM2 / (self.m_eff * 0.25 * self.well_depth))
        pad = max(2 * self.well_diameter, 8 * decay)
        return max(self.minimum_domain, self.center_separation + self.well_diameter + 2 * pad)


@dataclass(frozen=True)
class CavityParams:
    """Constant matter-light coupling delta (meV) and cavity-branch mass."""

    delta: float
    m_c: float = 1e-4

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.m_c <= 0:
            raise ValueError("m_c must be positive")


@dataclass
class HoppingEstimate:
    """Two lowest eigenvalues and the inferred hopping J = (E1 - E0)/2."""

    e0: float
    e1: float
    j_sys: float
    doublet_bound: bool
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    ground: np.ndarray | None = None
    excited: np.ndarray | None = None


def _axis(length: float, h: float) -> np.ndarray:
    """Symmetric grid with spacing exactly h, covering at least `length`.

    The cell count is kept even so a grid point sits exactly on the
    midplane, where the odd doublet state has its node.
    """
    n_cells = int(np.ceil(length / h - 1e-12))
    n_cells += n_cells % 2
    return (np.arange(n_cells + 1) - n_cells / 2) * h


def potential_1d(geometry: PillarGeometry, x: np.ndarray) -> np.ndarray:
    """Cell-averaged double-well profile.

    Averaging the sharp well edges over each grid cell keeps the
    discretization error O(h^2); sampling the step function pointwise
    would quantize the well width to the grid and converge only as O(h).
    """
    h = x[1] - x[0]
    v = np.zeros_like(x)
    half = geometry.well_diameter / 2
    for xc in (-geometry.center_separation / 2, geometry.center_separation / 2):
        overlap = np.minimum(x + h / 2, xc + half) - np.maximum(x - h / 2, xc - half)
        v -= geometry.well_depth * np.clip(overlap / h, 0.0, 1.0)
    return v


def potential_2d(geometry: PillarGeometry, x: np.ndarray, y: np.ndarray,
                 subsample: int = 4) -> np.ndarray:
    """Cell-averaged circular wells (subsample^2 points per cell)."""
    h = x[1] - x[0]
    offs = (np.arange(subsample) + 0.5) / subsample - 0.5
    v = np.zeros((len(x), len(y)))
    r2 = (geometry.well_diameter / 2) ** 2
    for xc in (-geometry.center_separation / 2, geometry.center_separation / 2):
        frac = np.zeros((len(x), len(y)))
        for ox in offs:
            dx2 = (x + ox * h - xc) ** 2
            for oy in offs:
                dy2 = (y + oy * h) ** 2
                frac += (dx2[:, None] + dy2[None, :]) <= r2
        v -= geometry.well_depth * frac / subsample**2
    return v


def _hamiltonian_1d(geometry: PillarGeometry, m: float | None = None):
    h = geometry.spacing
    x = _axis(geometry.extent, h)
    v = potential_1d(geometry, x)
    t = KINETIC_MEV_NM2 / (m or geometry.m_eff) / h**2
    return x, 2 * t + v, np.full(len(x) - 1, -t)


def _hamiltonian_2d(geometry: PillarGeometry, m: float | None = None,
                    with_wells: bool = True):
    h = geometry.spacing
    x = _axis(geometry.extent, h)
    # same decay padding around the wells in y as in x, minus the separation
    y = _axis(geometry.extent - geometry.center_separation, h)
    v = potential_2d(geometry, x, y) if with_wells else np.zeros((len(x), len(y)))
    t = KINETIC_MEV_NM2 / (m or geometry.m_eff) / h**2
    nx, ny = len(x), len(y)
    dx = sp.diags([np.ones(nx - 1)] * 2, [-1, 1], (nx, nx))
    dy = sp.diags([np.ones(ny - 1)] * 2, [-1, 1], (ny, ny))
    lap = sp.kron(dx, sp.eye(ny)) + sp.kron(sp.eye(nx), dy)
    ham = sp.diags(4 * t + v.ravel()) - t * lap
    return x, y, ham.tocsc()


def _lowest_sparse(ham, sigma: float, k: int = 2) -> tuple[np.ndarray, np.ndarray]:
    try:
        vals, vecs = eigsh(ham, k=k, sigma=sigma, which="LM")
    except ArpackNoConvergence as exc:
        raise RuntimeError(f"eigensolver did not converge: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def solve_double_well(geometry: PillarGeometry, return_states: bool = False) -> HoppingEstimate:
    """Two lowest eigenpairs of the double well and J_sys = (E1 - E0)/2."""
    if geometry.dimension == 1:
        x, diag, off = _hamiltonian_1d(geometry)
        if return_states:
            vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, 1))
        else:
            vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                                    select_range=(0, 1))
            vecs = None
        y = None
        shape = (len(x),)
    else:
        x, y, ham = _hamiltonian_2d(geometry)
        vals, vecs = _lowest_sparse(ham, sigma=-geometry.well_depth - 1.0)
        shape = (len(x), len(y))
    e0, e1 = float(vals[0]), float(vals[1])
    est = HoppingEstimate(e0=e0, e1=e1, j_sys=0.5 * (e1 - e0),
                          doublet_bound=bool(e1 < 0.0), x=x, y=y)
    if return_states and vecs is not None:
        est.ground = (vecs[:, 0] ** 2).reshape(shape)
        est.excited = (vecs[:, 1] ** 2).reshape(shape)
    return est


def solve_cavity_coupled(geometry: PillarGeometry, cavity: CavityParams) -> HoppingEstimate:
    """Lowest doublet of the matter-light block Hamiltonian."""
    if cavity.m_c >= geometry.m_eff:
        raise ValueError("cavity branch must be lighter than the matter branch")
    if geometry.dimension == 1:
        x, diag, off = _hamiltonian_1d(geometry)
        n = len(x)
        hs = sp.diags([off, diag, off], [-1, 0, 1])
        tc = KINETIC_MEV_NM2 / cavity.m_c / geometry.spacing**2
        hc = sp.diags([np.full(n - 1, -tc), np.full(n, 2 * tc), np.full(n - 1, -tc)],
                      [-1, 0, 1])
    else:
        x, y, hs = _hamiltonian_2d(geometry)
        _, _, hc = _hamiltonian_2d(geometry, m=cavity.m_c, with_wells=False)
        n = hs.shape[0]
    coupling = sp.identity(n) * cavity.delta
    block = sp.bmat([[hs, coupling], [coupling, hc]], format="csc")
    vals, _ = _lowest_sparse(block, sigma=-geometry.well_depth - 2 * cavity.delta - 1.0)
    e0, e1 = float(vals[0]), float(vals[1])
    return HoppingEstimate(e0=e0, e1=e1, j_sys=0.5 * (e1 - e0),
                           doublet_bound=bool(e1 < 0.0))


@dataclass
class PillarSweepRow:
    value: float
    j_sys: float
    doublet_bound: bool
    ratios: dict


def sweep_pillars(variable: str, grid, geometry: PillarGeometry,
                  cavity: CavityParams | None = None) -> list[PillarSweepRow]:
    """J_sys over a grid of depth, distance or effective mass.

    Each row carries J_sys / gamma_QD for the material presets.  Passing
    `cavity` sweeps the coupling delta instead (variable must then be
    "delta").
    """
    rows = []
    for value in grid:
        value = float(value)
        if cavity is not None:
            if variable != "delta":
                raise ValueError("cavity sweeps use variable='delta'")
            est = solve_cavity_coupled(geometry, CavityParams(delta=value, m_c=cavity.m_c))
        elif variable == "depth":
            est = solve_double_well(PillarGeometry(
                well_depth=value, well_diameter=geometry.well_diameter,
                center_separation=geometry.center_separation, m_eff=geometry.m_eff,
                dimension=geometry.dimension, domain_size=geometry.domain_size,
                grid_spacing=geometry.grid_spacing))
        elif variable == "distance":
            est = solve_double_well(PillarGeometry(
                well_depth=geometry.well_depth, well_diameter=geometry.well_diameter,
                center_separation=value, m_eff=geometry.m_eff,
                dimension=geometry.dimension, domain_size=geometry.domain_size,
                grid_spacing=geometry.grid_spacing))
        elif variable == "m_eff":
            est = solve_double_well(PillarGeometry(
                well_depth=geometry.well_depth, well_diameter=geometry.well_diameter,
                center_separation=geometry.center_separation, m_eff=value,
                dimension=geometry.dimension, domain_size=geometry.domain_size,
                grid_spacing=geometry.grid_spacing))
        else:
            raise ValueError(f"unknown variable {variable!r}; choose from {SWEEP_VARIABLES}")
        ratios = {mat: est.j_sys / g for mat, g in MATERIAL_LINEWIDTHS.items()}
        rows.append(PillarSweepRow(value=value, j_sys=est.j_sys,
                                   doublet_bound=est.doublet_bound, ratios=ratios))
    return rows


def write_pillar_csv(path, rows: list[PillarSweepRow]) -> None:
    """Rows `value,j_sys_meV,material,gamma_qd_meV,ratio` (one per material)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "j_sys_meV", "material", "gamma_qd_meV", "ratio"])
        for r in rows:
            for mat, gamma in MATERIAL_LINEWIDTHS.items():
                writer.writerow([f"{r.value:.9g}", f"{r.j_sys:.9g}", mat,
                                 f"{gamma:.9g}", f"{r.ratios[mat]:.9g}"])


def write_intensity_csv(path, est: HoppingEstimate, which: str = "ground") -> None:
    """Probability density map rows `x_nm,y_nm,psi_sq` (y = 0 in 1D)."""
    field = est.ground if which == "ground" else est.excited
    if field is None:
        raise ValueError("solve with return_states=True to export intensity maps")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_nm", "y_nm", "psi_sq"])
        if field.ndim == 1:
            for xv, p in zip(est.x, field):
                writer.writerow([f"{xv:.9g}", "0", f"{p:.9g}"])
        else:
            for i, xv in enumerate(est.x):
                for j, yv in enumerate(est.y):
                    writer.writerow([f"{xv:.9g}", f"{yv:.9g}", f"{field[i, j]:.9g}"])
