"""Time-correlated Gaussian onsite noise.

Each site carries an independent stationary Gaussian process eps_j(t) with
zero mean and autocovariance

    F(dt) = epsilon^2 exp(-dt^2 / (2 tau^2)),

generated by convolving white Gaussian samples with a Gaussian filter of
width tau/sqrt(2).  The filter is truncated at +-6 tau and rescaled so the
lag-0 variance is exactly epsilon^2; the 'valid' convolution consumes extra
white samples on both ends, so every output sample is fully filtered and
the process is stationary from the first sample.

Streams are keyed by (seed, realization, site) through SeedSequence spawn
keys, which makes trajectories reproducible bit-for-bit regardless of the
order in which they are generated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve


@dataclass(frozen=True)
class NoiseParams:
    """Noise strength, correlation time and sampling grid.

    dt must resolve the correlation kernel (dt <= tau/10) and the window
    must contain many correlation times (t_total >= 20 tau).
    """

    epsilon: float
    tau: float
    dt: float
    t_total: float
    n_realizations: int = 10
    seed: int = 12345

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.dt <= 0 or self.dt > self.tau / 10 * (1 + 1e-9):
            raise ValueError(f"dt={self.dt} must satisfy 0 < dt <= tau/10 = {self.tau / 10}")
        if self.t_total < 20 * self.tau:
            raise ValueError(f"t_total={self.t_total} must be >= 20 tau = {20 * self.tau}")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be positive")

    @property
    def n_steps(self) -> int:
        """Number of grid points t = 0, dt, ..., covering t_total."""
        return int(round(self.t_total / self.dt)) + 1


@dataclass(frozen=True)
class NoiseTrajectory:
    site_index: int
    samples: np.ndarray  # meV, on the uniform grid of NoiseParams


def autocovariance(delta_t, epsilon: float, tau: float):
    """Target kernel F(dt) = epsilon^2 exp(-dt^2 / (2 tau^2)) in meV^2."""
    delta_t = np.asarray(delta_t, dtype=float)
    return epsilon**2 * np.exp(-(delta_t**2) / (2.0 * tau**2))


def spectral_density(omega, epsilon: float, tau: float):
    """Fourier transform of the kernel: epsilon^2 tau sqrt(2 pi) e^{-(omega tau)^2/2}.

    omega is an angular frequency in 1/ps; the result is in meV^2 ps.
    """
    omega = np.asarray(omega, dtype=float)
    return epsilon**2 * tau * np.sqrt(2.0 * np.pi) * np.exp(-((omega * tau) ** 2) / 2.0)


def _filter_kernel(dt: float, tau: float, epsilon: float) -> np.ndarray:
    """Gaussian filter of width tau/sqrt(2), truncated at +-6 tau.

    Normalized so that the exact discrete lag-0 autocovariance of the
    filtered white noise equals epsilon^2.
    """
    half = int(np.ceil(6.0 * tau / dt))
    t = np.arange(-half, half + 1) * dt
    h = np.exp(-(t**2) / (tau**2))  # kernel width tau/sqrt(2): t^2/(2 (tau/sqrt2)^2)
    return h * (epsilon / np.sqrt(np.sum(h**2)))


def _rng(seed: int, realization: int, site: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(realization, site)))


def trajectory(params: NoiseParams, realization: int, site: int,
               n_steps: int | None = None) -> np.ndarray:
    """One site's noise samples eps_j(t_m) for t_m = m dt, m = 0..n_steps-1."""
    n = params.n_steps if n_steps is None else int(n_steps)
    h = _filter_kernel(params.dt, params.tau, params.epsilon)
    white = _rng(params.seed, realization, site).standard_normal(n + len(h) - 1)
    return fftconvolve(white, h, mode="valid")


def sample_trajectories(params: NoiseParams, n_sites: int, realization: int,
                        n_steps: int | None = None) -> list[NoiseTrajectory]:
    """Independent trajectories for sites 0..n_sites-1 of one realization."""
    if not 0 <= realization < params.n_realizations:
        raise ValueError(f"realization {realization} outside 0..{params.n_realizations - 1}")
    return [
        NoiseTrajectory(site_index=j, samples=trajectory(params, realization, j, n_steps))
        for j in range(n_sites)
    ]


def noise_matrix(params: NoiseParams, n_sites: int, realization: int,
                 n_steps: int | None = None) -> np.ndarray:
    """Stacked trajectories as an (n_sites, n_steps) array."""
    trajs = sample_trajectories(params, n_sites, realization, n_steps)
    return np.vstack([t.samples for t in trajs])


def estimate_autocovariance(samples: np.ndarray, lag_indices) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo autocovariance at the given lags with jackknife errors.

    Parameters
    ----------
    samples : numpy.ndarray, shape (n_traj, n_steps)
        Independent trajectories (known zero mean).
    lag_indices : sequence of int

    Returns
    -------
    (mean, se) : per-lag estimate and leave-one-out jackknife standard error.
    """
    samples = np.atleast_2d(samples)
    n_traj = samples.shape[0]
    means = np.empty(len(lag_indices))
    ses = np.empty(len(lag_indices))
    for i, lag in enumerate(lag_indices):
        if lag == 0:
            per = np.mean(samples * samples, axis=1)
        else:
            per = np.mean(samples[:, :-lag] * samples[:, lag:], axis=1)
        total = per.sum()
        loo = (total - per) / (n_traj - 1)
        means[i] = total / n_traj
        ses[i] = np.sqrt((n_traj - 1) / n_traj * np.sum((loo - loo.mean()) ** 2))
    return means, ses


def write_trajectories_csv(path, params: NoiseParams, n_sites: int, realization: int) -> None:
    """Dump one realization as rows of `t_ps,site,value_meV`."""
    trajs = sample_trajectories(params, n_sites, realization)
    t = np.arange(params.n_steps) * params.dt
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ps", "site", "value_meV"])
        for traj in trajs:
            for tm, v in zip(t, traj.samples):
                writer.writerow([f"{tm:.9g}", traj.site_index, f"{v:.9g}"])
