import concurrent.futures

import numpy as np
import pytest
from scipy.integrate import quad

from sshemit.noise import (
    NoiseParams,
    _filter_kernel,
    autocovariance,
    estimate_autocovariance,
    noise_matrix,
    sample_trajectories,
    spectral_density,
    trajectory,
    write_trajectories_csv,
)

PARAMS = NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=50.0,
                     n_realizations=2000, seed=909)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseParams(epsilon=0.5, tau=0.5, dt=0.2, t_total=50.0)
        with pytest.raises(ValueError):
            NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=5.0)
        with pytest.raises(ValueError):
            NoiseParams(epsilon=-0.1, tau=0.5, dt=0.05, t_total=50.0)

    def test_n_steps(self):
        assert PARAMS.n_steps == 1001


class TestKernel:
    def test_exact_variance_calibration(self):
        h = _filter_kernel(0.05, 0.5, 0.5)
        assert np.sum(h**2) == pytest.approx(0.25, rel=1e-14)

    def test_autocovariance_values(self):
        # lag 0 and lag tau*sqrt(2) from the definition
        assert autocovariance(0.0, 0.5, 0.5) == pytest.approx(0.25)
        assert autocovariance(0.5 * np.sqrt(2), 0.5, 0.5) == pytest.approx(0.25 / np.e)

    def test_filtered_process_kernel_shape(self):
        # discrete filter autocorrelation matches the Gaussian target
        h = _filter_kernel(0.05, 0.5, 0.5)
        for lag in (5, 10, 20, 40):
            got = np.sum(h[:-lag] * h[lag:])
            want = autocovariance(lag * 0.05, 0.5, 0.5)
            assert got == pytest.approx(want, rel=1e-6)


class TestStatistics:
    def test_autocovariance_monte_carlo(self):
        samples = np.vstack([trajectory(PARAMS, r, 0) for r in range(500)])
        lags = [0, 10, 20, 40]  # 0, tau, 2 tau, 4 tau
        est, se = estimate_autocovariance(samples, lags)
        target = autocovariance(np.array(lags) * PARAMS.dt, 0.5, 0.5)
        z = (est - target) / se
        assert np.all(np.abs(z) < 3.0), z

    def test_gaussian_marginals(self):
        # thin by 10 tau so samples are effectively independent
        stride = int(10 * PARAMS.tau / PARAMS.dt)
        chunks = [trajectory(PARAMS, r, 0)[::stride] for r in range(2000)]
        x = np.concatenate(chunks)
        n = x.size
        assert n > 2e4
        skew = np.mean(x**3) / np.std(x) ** 3
        kurt = np.mean(x**4) / np.std(x) ** 4 - 3.0
        assert abs(skew) < 3 * np.sqrt(6.0 / n)
        assert abs(kurt) < 3 * np.sqrt(24.0 / n)

    def test_cross_site_independence(self):
        m = noise_matrix(PARAMS, 4, 0)
        n = m.shape[1]
        for a in range(4):
            for b in range(a + 1, 4):
                cov = np.mean(m[a] * m[b])
                # n/correlation-length effective samples of variance eps^4
                se = 0.25 / np.sqrt(n * PARAMS.dt / (PARAMS.tau * np.sqrt(np.pi)))
                assert abs(cov) < 3 * se


class TestSpectralDensity:
    def test_zero_frequency(self):
        assert spectral_density(0.0, 0.5, 0.5) == pytest.approx(
            0.25 * 0.5 * np.sqrt(2 * np.pi))
        assert spectral_density(0.0, 0.5, 0.5) == pytest.approx(0.313329, abs=1e-6)

    def test_fourier_inversion_at_zero_lag(self):
        val, _ = quad(lambda w: spectral_density(w, 0.5, 0.5), -40, 40)
        assert val / (2 * np.pi) == pytest.approx(0.25, rel=1e-10)


class TestDeterminism:
    def test_bit_identical_streams(self):
        a = trajectory(PARAMS, 3, 2)
        b = trajectory(PARAMS, 3, 2)
        assert a.tobytes() == b.tobytes()

    def test_order_independent(self):
        pairs = [(r, s) for r in range(3) for s in range(2)]
        forward = {p: trajectory(PARAMS, *p) for p in pairs}
        backward = {p: trajectory(PARAMS, *p) for p in reversed(pairs)}
        for p in pairs:
            assert forward[p].tobytes() == backward[p].tobytes()

    def test_thread_count_invariance(self):
        def gen(r):
            return trajectory(PARAMS, r, 0)

        serial = [gen(r) for r in range(6)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
            threaded = list(pool.map(gen, range(6)))
        for a, b in zip(serial, threaded):
            assert a.tobytes() == b.tobytes()

    def test_distinct_streams(self):
        assert not np.allclose(trajectory(PARAMS, 0, 0), trajectory(PARAMS, 0, 1))
        assert not np.allclose(trajectory(PARAMS, 0, 0), trajectory(PARAMS, 1, 0))


def test_sample_trajectories_shape_and_bounds():
    trajs = sample_trajectories(PARAMS, 3, 0)
    assert [t.site_index for t in trajs] == [0, 1, 2]
    assert all(t.samples.shape == (PARAMS.n_steps,) for t in trajs)
    with pytest.raises(ValueError):
        sample_trajectories(PARAMS, 2, PARAMS.n_realizations)


def test_csv_dump(tmp_path):
    small = NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=10.0,
                        n_realizations=1, seed=4)
    path = tmp_path / "noise.csv"
    write_trajectories_csv(path, small, n_sites=2, realization=0)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t_ps,site,value_meV"
    assert len(lines) == 1 + 2 * small.n_steps
