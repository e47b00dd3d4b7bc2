"""Noisy time evolution, emission spectra and linewidth extraction.

The chain amplitude is propagated with the noise held constant over each
noise-grid interval, so the Hamiltonian is piecewise constant and every
step propagator is an exact matrix exponential: each interval is
diagonalized once (the matrix is real symmetric tridiagonal) and the state
is advanced through all recording sub-steps in the eigenbasis.  Unitarity
therefore holds to machine precision for any step count.

The single-photon spectrum of a realization follows from the two-time
correlation C(t,t') = a*(t) a(t') of the emission-site amplitude, which
collapses the double time integral to

    S(E) = |int_0^T a(t) e^{i E t / hbar} dt|^2 / (2 pi hbar int_0^T |a|^2 dt),

evaluated with trapezoidal quadrature on an arbitrary uniform energy grid
through the chirp z-transform.  Realizations are averaged pointwise.

Width estimators: a Lorentzian least-squares fit (default weighting
sigma ~ S, the correct error model for averaged periodograms, whose
speckle is multiplicative), the direct full width at half maximum, and an
interquartile width (central 50% of spectral weight) that coincides with
the FWHM for a true Lorentzian but stays well defined for structured
spectra such as resolved tunneling doublets.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import czt, find_peaks

from .constants import HBAR_MEV_PS
from .lattice import ChainParams, build_hamiltonian, edge_mode
from .noise import NoiseParams, noise_matrix

# FWHM of the bare finite-window line |sinc(E T / 2 hbar)|^2, in units of
# hbar/T: 4 x, where sinc^2(x) = 1/2.
_SINC_FWHM = 5.566229512

MULTI_PEAK = "multi-peak spectrum"
NOT_CONVERGED = "fit did not converge"
REJECTED = "residual above threshold"


class FitError(RuntimeError):
    """Lorentzian fit failure; `reason` is one of the module constants."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}{': ' + detail if detail else ''}")
        self.reason = reason


def window_floor_fwhm(t_total: float) -> float:
    """Resolution floor: FWHM in meV of the bare observation-window line."""
    return _SINC_FWHM * HBAR_MEV_PS / t_total


@dataclass(frozen=True)
class EvolutionConfig:
    """Everything needed to propagate one noisy chain.

    emission_site and initial_site are 1-based (site 1 is the left edge,
    where the photon is collected).  initial_state is "edge_mode",
    "single_site", or a custom unit vector of length N.  dt is the
    recording/propagation grid; the noise grid noise.dt must be an integer
    multiple of it.  onsite_offset adds a constant to all onsite energies.
    """

    chain: ChainParams
    noise: NoiseParams
    emission_site: int = 1
    initial_state: object = "edge_mode"
    initial_site: int = 1
    dt: float = 0.002
    t_total: float = 400.0
    onsite_offset: float = 0.0
    linewidth_floor: float | None = None

    def __post_init__(self):
        n = self.chain.n_sites
        if not 1 <= self.emission_site <= n:
            raise ValueError(f"emission_site {self.emission_site} outside 1..{n}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.dt > self.noise.tau / 10 * (1 + 1e-9):
            raise ValueError(f"dt={self.dt} must be <= tau/10 to resolve the noise")
        if n > 1 and self.dt > 0.1 * HBAR_MEV_PS / self.chain.j0 * (1 + 1e-9):
            raise ValueError(
                f"dt={self.dt} must be <= 0.1 hbar/J0 = "
                f"{0.1 * HBAR_MEV_PS / self.chain.j0:.6g} to resolve the hopping"
            )
        sub = round(self.noise.dt / self.dt)
        if sub < 1 or abs(sub * self.dt - self.noise.dt) > 1e-9 * self.noise.dt:
            raise ValueError(
                f"noise.dt={self.noise.dt} must be an integer multiple of dt={self.dt}"
            )
        if self.linewidth_floor is not None:
            floor = 2 * np.pi * HBAR_MEV_PS / self.t_total
            if floor > self.linewidth_floor:
                warnings.warn(
                    f"spectral resolution {floor:.3g} meV exceeds the requested "
                    f"linewidth floor {self.linewidth_floor:.3g} meV; increase t_total"
                )

    @property
    def substeps(self) -> int:
        """Recording steps per noise interval."""
        return round(self.noise.dt / self.dt)

    @property
    def n_intervals(self) -> int:
        return int(np.ceil(self.t_total / self.noise.dt - 1e-9))

    @property
    def n_record(self) -> int:
        return self.n_intervals * self.substeps + 1

    def initial_vector(self) -> np.ndarray:
        n = self.chain.n_sites
        state = self.initial_state
        if isinstance(state, str):
            if state == "edge_mode":
                return edge_mode(self.chain).vector
            if state == "single_site":
                vec = np.zeros(n)
                vec[self.initial_site - 1] = 1.0
                return vec
            raise ValueError(f"unknown initial_state {state!r}")
        vec = np.asarray(state, dtype=complex)
        if vec.shape != (n,):
            raise ValueError(f"custom initial state must have shape ({n},)")
        nrm = np.linalg.norm(vec)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError("custom initial state must be normalized")
        return vec


def propagate(config: EvolutionConfig, realization: int) -> np.ndarray:
    """Evolve the initial state and record the emission-site amplitude.

    Returns a complex array a(t_m) on the grid t_m = m dt,
    m = 0..n_record-1.  Raises if the final norm drifted by more than 1e-6
    (it should stay at machine precision; a violation indicates a broken
    Hamiltonian, not a step-size problem).
    """
    chain, nz = config.chain, config.noise
    n = chain.n_sites
    sub = config.substeps
    n_int = config.n_intervals
    site = config.emission_site - 1

    eps = noise_matrix(nz, n, realization, n_steps=n_int)
    h0 = build_hamiltonian(chain)
    diag_idx = np.arange(n)
    t_sub = config.dt * np.arange(1, sub + 1)

    phi = config.initial_vector().astype(complex)
    out = np.empty(n_int * sub + 1, dtype=complex)
    out[0] = phi[site]
    h = h0.copy()
    for k in range(n_int):
        h[diag_idx, diag_idx] = eps[:, k] + config.onsite_offset
        evals, vecs = np.linalg.eigh(h)
        coef = vecs.T.conj() @ phi
        block = vecs @ (np.exp(-1j * np.outer(evals, t_sub) / HBAR_MEV_PS) * coef[:, None])
        out[1 + k * sub: 1 + (k + 1) * sub] = block[site]
        phi = block[:, -1]

    drift = abs(np.linalg.norm(phi) - 1.0)
    if drift > 1e-6:
        raise RuntimeError(f"norm drifted by {drift:.2e} after {n_int} intervals")
    return out


def run_emission(config: EvolutionConfig, threads: int = 1) -> list[np.ndarray]:
    """Propagate all noise realizations; deterministic for any thread count."""
    reals = range(config.noise.n_realizations)
    if threads <= 1:
        return [propagate(config, r) for r in reals]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda r: propagate(config, r), reals))


class TwoTimeCorrelation:
    """C(t, t') = a*(t) a(t') for a single realization's amplitude record."""

    def __init__(self, amplitudes: np.ndarray, dt: float):
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self.dt = dt

    def __call__(self, i: int, j: int) -> complex:
        """C at grid indices (i, j) = (t/dt, t'/dt)."""
        return np.conj(self.amplitudes[i]) * self.amplitudes[j]

    def matrix(self) -> np.ndarray:
        """Full kernel on the grid; O(n^2) memory, meant for small records."""
        return np.outer(np.conj(self.amplitudes), self.amplitudes)


def correlation(amplitudes: np.ndarray, dt: float) -> TwoTimeCorrelation:
    """Two-time correlation accessor built on the single-excitation factorization."""
    return TwoTimeCorrelation(amplitudes, dt)


def energy_grid(half_width: float, n_points: int, center: float = 0.0) -> np.ndarray:
    """Uniform energy grid (meV) centered on `center`."""
    return np.linspace(center - half_width, center + half_width, n_points)


def _fourier_trapezoid(a: np.ndarray, dt: float, energies: np.ndarray) -> np.ndarray:
    """Trapezoidal quadrature of int_0^T a(t) e^{i E t / hbar} dt via chirp-z."""
    de = energies[1] - energies[0]
    if not np.allclose(np.diff(energies), de, rtol=1e-9, atol=0):
        raise ValueError("energy grid must be uniform")
    w = np.exp(1j * de * dt / HBAR_MEV_PS)
    a0 = np.exp(-1j * energies[0] * dt / HBAR_MEV_PS)
    transform = czt(a, m=len(energies), w=w, a=a0)
    t_end = (len(a) - 1) * dt
    endpoint = 0.5 * a[0] + 0.5 * a[-1] * np.exp(1j * energies * t_end / HBAR_MEV_PS)
    return dt * (transform - endpoint)


@dataclass
class LorentzianFit:
    """Least-squares Lorentzian parameters; fwhm is the linewidth gamma."""

    center: float
    fwhm: float
    amplitude: float
    baseline: float
    residual_rms: float
    n_points: int
    accepted: bool


@dataclass
class EmissionRecord:
    """Spectra of one experiment: per-realization and noise-averaged."""

    energies: np.ndarray
    per_realization: np.ndarray  # shape (n_realizations, n_energies), 1/meV
    averaged: np.ndarray
    dt: float
    amplitudes: list | None = None
    fit: LorentzianFit | None = None


def spectrum(amplitudes, dt: float, energies=None, *, half_width: float = 8.0,
             n_points: int = 4001, average_correlation: bool = False,
             keep_amplitudes: bool = True) -> EmissionRecord:
    """Emission spectra from per-realization amplitude records.

    With the default averaging, per-realization normalized spectra are
    averaged pointwise.  With average_correlation=True the two-time
    correlation is noise-averaged before transforming, which amounts to
    normalizing the averaged periodogram by the averaged occupation
    instead (the two agree when |a(t)| is the same in every realization).
    """
    if len(amplitudes) == 0:
        raise ValueError("no amplitude records supplied")
    if energies is None:
        energies = energy_grid(half_width, n_points)
    energies = np.asarray(energies, dtype=float)
    if energies.size < 2:
        raise ValueError("energy grid needs at least two points")

    periodograms = []
    weights = []
    for a in amplitudes:
        a = np.asarray(a, dtype=complex)
        if a.size == 0:
            raise ValueError("empty amplitude record")
        occ = np.trapezoid(np.abs(a) ** 2, dx=dt)
        if occ <= 0:
            raise ValueError("amplitude record carries no excitation")
        periodograms.append(np.abs(_fourier_trapezoid(a, dt, energies)) ** 2)
        weights.append(occ)
    periodograms = np.asarray(periodograms)
    weights = np.asarray(weights)

    per_real = periodograms / (2 * np.pi * HBAR_MEV_PS * weights[:, None])
    if average_correlation:
        averaged = periodograms.mean(axis=0) / (2 * np.pi * HBAR_MEV_PS * weights.mean())
    else:
        averaged = per_real.mean(axis=0)
    return EmissionRecord(
        energies=energies,
        per_realization=per_real,
        averaged=averaged,
        dt=dt,
        amplitudes=list(amplitudes) if keep_amplitudes else None,
    )


def _lorentzian(e, amplitude, center, fwhm, baseline):
    half = fwhm / 2.0
    return amplitude * half**2 / ((e - center) ** 2 + half**2) + baseline


def _half_crossings(energies: np.ndarray, s: np.ndarray, level: float) -> tuple[float, float]:
    above = np.nonzero(s > level)[0]
    lo, hi = above[0], above[-1]

    def interp(i0, i1):
        if i1 < 0 or i1 >= len(s) or s[i1] == s[i0]:
            return energies[i0]
        return energies[i0] + (level - s[i0]) * (energies[i1] - energies[i0]) / (s[i1] - s[i0])

    return interp(lo, lo - 1), interp(hi, hi + 1)


def _smooth(s: np.ndarray, bins: int) -> np.ndarray:
    if bins <= 1:
        return s
    kernel = np.ones(bins) / bins
    return np.convolve(s, kernel, mode="same")


def fwhm_direct(energies: np.ndarray, s: np.ndarray, smooth_bins: int = 0) -> float:
    """Width between the outermost half-maximum crossings."""
    s = _smooth(np.asarray(s, float), smooth_bins)
    lo, hi = _half_crossings(energies, s, s.max() / 2.0)
    return hi - lo


def spectral_width_iqr(energies: np.ndarray, s: np.ndarray) -> float:
    """Width of the central 50% of spectral weight.

    Equals the FWHM for a Lorentzian line and remains meaningful for
    multi-peaked spectra, where a single half-maximum width does not.
    """
    s = np.asarray(s, dtype=float)
    w = np.gradient(energies)
    cdf = np.cumsum(s * w)
    cdf = cdf / cdf[-1]
    return float(np.interp(0.75, cdf, energies) - np.interp(0.25, cdf, energies))


def fit_lorentzian(energies: np.ndarray, s: np.ndarray, *, weighting: str = "relative",
                   core_fraction: float = 0.01, force: bool = False,
                   reject_residual: float = 0.1) -> LorentzianFit:
    """Nonlinear least-squares Lorentzian fit of a spectrum.

    Initial guesses come from the peak location and the half-maximum
    crossing width.  `weighting` sets the error model: "relative"
    (sigma ~ S, correct for averaged-periodogram speckle), "sqrt", or
    "none" (absolute residuals; appropriate for envelope fits of
    structured spectra).  Points below core_fraction * peak are excluded.

    Raises FitError for multi-peaked input, non-convergence, or a residual
    above reject_residual * peak; force=True turns the multi-peak and
    residual failures into a best-effort fit with accepted=False.
    """
    energies = np.asarray(energies, dtype=float)
    s = np.asarray(s, dtype=float)
    peak = s.max()
    i_peak = int(np.argmax(s))
    de = energies[1] - energies[0]

    # peak counting needs smoothing wide enough to kill periodogram speckle
    # but narrower than the line: take a fraction of the half-max span
    s_pre = _smooth(s, max(1, len(s) // 400))
    lo, hi = _half_crossings(energies, s_pre, s_pre.max() / 2.0)
    width0 = max(hi - lo, de)
    width_bins = int(round(width0 / de))
    s_sm = _smooth(s, max(1, len(s) // 400, width_bins // 6))
    peaks, _ = find_peaks(s_sm, height=0.35 * s_sm.max(), prominence=0.25 * s_sm.max(),
                          distance=max(1, width_bins // 4))
    multi = len(peaks) > 1
    if multi and not force:
        raise FitError(MULTI_PEAK, f"{len(peaks)} peaks detected")
    mask = s >= core_fraction * peak
    e_fit, s_fit = energies[mask], s[mask]

    if weighting == "relative":
        sigma = np.maximum(s_fit, 1e-3 * peak)
    elif weighting == "sqrt":
        sigma = np.sqrt(np.maximum(s_fit, 1e-3 * peak))
    elif weighting == "none":
        sigma = None
    else:
        raise ValueError(f"unknown weighting {weighting!r}")

    span = energies[-1] - energies[0]
    p0 = [peak - s.min(), energies[i_peak], width0, s.min()]
    bounds = ([0.0, energies[0], de / 10.0, -peak], [10 * peak, energies[-1], 4 * span, peak])
    try:
        popt, _ = curve_fit(_lorentzian, e_fit, s_fit, p0=p0, sigma=sigma,
                            bounds=bounds, maxfev=200 * (len(p0) + 1))
    except RuntimeError as exc:
        raise FitError(NOT_CONVERGED, str(exc)) from exc

    residual = float(np.sqrt(np.mean((_lorentzian(e_fit, *popt) - s_fit) ** 2)))
    rejected = residual > reject_residual * peak
    if rejected and not force:
        raise FitError(REJECTED, f"residual_rms {residual:.3g} > {reject_residual} * peak")
    return LorentzianFit(
        center=float(popt[1]),
        fwhm=float(popt[2]),
        amplitude=float(popt[0]),
        baseline=float(popt[3]),
        residual_rms=residual,
        n_points=int(mask.sum()),
        accepted=not (multi or rejected),
    )


EXPERIMENTS = ("vs_N", "vs_theta", "vs_J0", "trivial_chain")


@dataclass
class SweepRow:
    """One sweep point; gamma is the robust interquartile width."""

    param: float
    gamma: float
    gamma_over_gamma_qd: float
    gap: float
    gamma_over_gap: float
    gamma_fwhm: float
    gamma_fit: float
    fit_residual: float
    fit_accepted: bool
    note: str = ""


def _aligned_dt(noise_dt: float, dt_max: float) -> float:
    """Largest divisor of the noise grid not exceeding dt_max."""
    return noise_dt / int(np.ceil(noise_dt / dt_max - 1e-12))


def _point_config(experiment: str, value: float, base: EvolutionConfig) -> EvolutionConfig:
    chain = base.chain
    if experiment == "vs_N":
        chain = replace(chain, n_sites=int(value))
        return replace(base, chain=chain)
    if experiment == "vs_theta":
        chain = replace(chain, theta=float(value))
        return replace(base, chain=chain)
    if experiment == "vs_J0":
        chain = replace(chain, j0=float(value))
        dt = _aligned_dt(base.noise.dt, min(base.noise.tau / 10, 0.1 * HBAR_MEV_PS / value))
        return replace(base, chain=chain, dt=dt)
    if experiment == "trivial_chain":
        # uniform hopping J0/2 is exactly theta = pi/4; excitation starts on
        # the detected site since no edge mode exists in the trivial phase
        chain = replace(chain, n_sites=int(value), theta=np.pi / 4)
        return replace(base, chain=chain, initial_state="single_site", initial_site=1)
    raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")


def _width_metrics(record: EmissionRecord) -> tuple[float, float, float, float, bool, str]:
    s = record.averaged
    iqr = spectral_width_iqr(record.energies, s)
    fwhm = fwhm_direct(record.energies, s, smooth_bins=max(1, len(s) // 400))
    note = ""
    try:
        fit = fit_lorentzian(record.energies, s, weighting="none", force=True)
        gamma_fit, resid, ok = fit.fwhm, fit.residual_rms, fit.accepted
        if not ok:
            note = "forced fit"
    except FitError as exc:
        gamma_fit, resid, ok = np.nan, np.nan, False
        note = exc.reason
    return iqr, fwhm, gamma_fit, resid, ok, note


def single_emitter_config(base: EvolutionConfig) -> EvolutionConfig:
    """Isolated-emitter reference with identical noise settings."""
    chain = ChainParams(n_sites=1, j0=base.chain.j0, theta=base.chain.theta)
    dt = _aligned_dt(base.noise.dt, base.noise.tau / 10)
    return replace(base, chain=chain, dt=dt, initial_state="single_site", initial_site=1)


def sweep(experiment: str, grid, base: EvolutionConfig, *, threads: int = 1,
          half_width: float = 8.0, n_points: int = 4001) -> list[SweepRow]:
    """Run one linewidth experiment over a parameter grid.

    The isolated-emitter width gamma_QD is recomputed with the same noise,
    grid and width-extraction settings and used to normalize every row.
    """
    if len(grid) == 0:
        raise ValueError("empty sweep grid")
    ref = single_emitter_config(base)
    amps = run_emission(ref, threads=threads)
    rec = spectrum(amps, ref.dt, half_width=half_width, n_points=n_points,
                   keep_amplitudes=False)
    gamma_qd = spectral_width_iqr(rec.energies, rec.averaged)

    rows = []
    for value in grid:
        config = _point_config(experiment, value, base)
        try:
            amps = run_emission(config, threads=threads)
            rec = spectrum(amps, config.dt, half_width=half_width, n_points=n_points,
                           keep_amplitudes=False)
        except (ValueError, RuntimeError) as exc:
            rows.append(SweepRow(param=float(value), gamma=np.nan,
                                 gamma_over_gamma_qd=np.nan, gap=config.chain.gap,
                                 gamma_over_gap=np.nan, gamma_fwhm=np.nan,
                                 gamma_fit=np.nan, fit_residual=np.nan,
                                 fit_accepted=False, note=str(exc)))
            continue
        iqr, fwhm, gamma_fit, resid, ok, note = _width_metrics(rec)
        gap = config.chain.gap
        rows.append(SweepRow(
            param=float(value), gamma=iqr, gamma_over_gamma_qd=iqr / gamma_qd,
            gap=gap, gamma_over_gap=iqr / gap if gap > 0 else np.inf,
            gamma_fwhm=fwhm, gamma_fit=gamma_fit, fit_residual=resid,
            fit_accepted=ok, note=note,
        ))
    return rows


def write_sweep_csv(path, rows: list[SweepRow]) -> None:
    """Spec columns only; see write_sweep_detail_csv for diagnostics."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "gamma_meV", "gamma_over_gammaQD", "gap_meV", "gamma_over_gap"])
        for r in rows:
            writer.writerow([f"{r.param:.9g}", f"{r.gamma:.9g}", f"{r.gamma_over_gamma_qd:.9g}",
                             f"{r.gap:.9g}", f"{r.gamma_over_gap:.9g}"])


def write_sweep_detail_csv(path, rows: list[SweepRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "gamma_iqr_meV", "gamma_fwhm_meV", "gamma_fit_meV",
                         "fit_residual", "fit_accepted", "note"])
        for r in rows:
            writer.writerow([f"{r.param:.9g}", f"{r.gamma:.9g}", f"{r.gamma_fwhm:.9g}",
                             f"{r.gamma_fit:.9g}", f"{r.fit_residual:.9g}",
                             int(r.fit_accepted), r.note])


def write_spectrum_csv(path, energies: np.ndarray, s: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega_meV", "S_per_meV"])
        for e, v in zip(energies, s):
            writer.writerow([f"{e:.9g}", f"{v:.9g}"])
