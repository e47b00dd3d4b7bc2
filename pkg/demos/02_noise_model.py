"""The onsite noise process: trajectories, marginals, autocovariance.

Every site fluctuates independently with the Gaussian kernel
F(dt) = epsilon^2 exp(-dt^2 / 2 tau^2); the demo checks the generated
process against the kernel and against the analytic spectral density.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sshemit import NoiseParams, autocovariance, spectral_density, trajectory
from sshemit.noise import estimate_autocovariance

params = NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=50.0,
                     n_realizations=2000, seed=2024)

samples = np.vstack([trajectory(params, r, 0) for r in range(params.n_realizations)])
lags = np.arange(0, 41, 2)
est, se = estimate_autocovariance(samples, lags)
target = autocovariance(lags * params.dt, params.epsilon, params.tau)

print("lag(ps)  estimate   target     z")
for lag, e, s, t in zip(lags * params.dt, est, se, target):
    print(f"{lag:6.2f}  {e:+.5f}  {t:+.5f}  {(e - t) / s:+5.2f}")

fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
t = np.arange(params.n_steps) * params.dt
axes[0].plot(t, samples[0], lw=0.8)
axes[0].set(xlabel="t (ps)", ylabel="eps (meV)", title="one trajectory")

axes[1].hist(samples.ravel(), bins=80, density=True)
x = np.linspace(-2, 2, 200)
axes[1].plot(x, np.exp(-x**2 / (2 * 0.25)) / np.sqrt(2 * np.pi * 0.25), "k")
axes[1].set(xlabel="eps (meV)", title="marginal vs N(0, eps^2)")

axes[2].errorbar(lags * params.dt, est, 3 * se, fmt="o", ms=3, label="sampled (3 s.e.)")
axes[2].plot(lags * params.dt, target, "k-", label="kernel")
axes[2].legend()
axes[2].set(xlabel="lag (ps)", ylabel="meV^2", title="autocovariance")

fig.tight_layout()
fig.savefig("demo02_noise.png", dpi=150)
print(f"\nspectral density at omega=0: {spectral_density(0.0, 0.5, 0.5):.4f} meV^2 ps")
print("wrote demo02_noise.png")
