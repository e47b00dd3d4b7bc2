import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import erfc

from sshemit.constants import HBAR_MEV_PS
from sshemit.dynamics import EvolutionConfig, _smooth, run_emission, spectrum
from sshemit.dyson import (
    SelfEnergy,
    lorentzian_spectrum,
    self_energy_lowest_order,
    self_energy_self_consistent,
    write_iteration_csv,
)
from sshemit.lattice import ChainParams
from sshemit.noise import NoiseParams


def fixed_point_closed_form(epsilon, tau, kernel_exponent):
    """Independent oracle: the fixed point solves
    sigma = sigma_lowest e^{a sigma^2} erfc(sigma sqrt(a)),
    with a = 2 q tau^2 / (2 hbar^2) for kernel exp(-q (w tau)^2)."""
    sigma_low = epsilon**2 * tau * np.sqrt(np.pi / 2) / HBAR_MEV_PS
    a = kernel_exponent * (tau / HBAR_MEV_PS) ** 2

    def f(s):
        return s - sigma_low * np.exp(a * s**2) * erfc(s * np.sqrt(a))

    return brentq(f, 1e-6, sigma_low)


class TestLowestOrder:
    def test_closed_form(self):
        se = self_energy_lowest_order(0.5, 0.5)
        assert se.value.real == 0.0
        expected = -0.25 * 0.5 * np.sqrt(np.pi) / (HBAR_MEV_PS * np.sqrt(2))
        assert se.value.imag == pytest.approx(expected, rel=1e-14)
        assert se.linewidth == pytest.approx(0.476030, abs=1e-6)
        # quoted analytic value 0.470 meV holds to 2%
        assert se.linewidth == pytest.approx(0.470, rel=0.02)

    def test_zero_noise(self):
        assert self_energy_lowest_order(0.0, 0.5).value == 0j

    def test_quadratic_scaling(self):
        g1 = self_energy_lowest_order(0.5, 0.5).linewidth
        g2 = self_energy_lowest_order(1.0, 0.5).linewidth
        assert g2 == pytest.approx(4 * g1, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            self_energy_lowest_order(-0.1, 0.5)
        with pytest.raises(ValueError):
            self_energy_lowest_order(0.5, 0.0)


class TestSelfConsistent:
    def test_reference_kernel_fixed_point(self):
        # narrowed kernel (q=1): the published-trace convention
        se = self_energy_self_consistent(0.5, 0.5, kernel_exponent=1.0)
        assert se.converged and se.iterations <= 10
        assert -se.value.imag == pytest.approx(0.2017, rel=0.01)
        assert se.linewidth == pytest.approx(0.403, rel=0.01)
        oracle = fixed_point_closed_form(0.5, 0.5, 1.0)
        assert -se.value.imag == pytest.approx(oracle, abs=2e-6)
        assert abs(se.value.real) < 1e-9

    def test_matched_kernel_fixed_point(self):
        # kernel matching noise.spectral_density (q=0.5)
        se = self_energy_self_consistent(0.5, 0.5)
        oracle = fixed_point_closed_form(0.5, 0.5, 0.5)
        assert oracle == pytest.approx(0.21046, abs=2e-5)
        assert -se.value.imag == pytest.approx(oracle, abs=2e-6)

    def test_fixed_point_residual(self):
        from sshemit.dyson import _born_integral

        se = self_energy_self_consistent(0.5, 0.5, tol=1e-8, kernel_exponent=1.0)
        resub = _born_integral(se.value, 0.5, 0.5, 1.0)
        assert abs(resub - se.value) < 1e-8

    def test_zero_noise_immediate(self):
        se = self_energy_self_consistent(0.0, 0.5)
        assert se.value == 0j and se.iterations == 1

    def test_damped_iteration_converges(self):
        se = self_energy_self_consistent(0.5, 0.5, mixing=0.5, max_iter=60,
                                         kernel_exponent=1.0)
        assert se.converged
        assert -se.value.imag == pytest.approx(0.2018, abs=1e-3)

    def test_narrower_than_lowest_order(self):
        low = self_energy_lowest_order(0.5, 0.5)
        for q in (0.5, 1.0):
            sc = self_energy_self_consistent(0.5, 0.5, kernel_exponent=q)
            assert -sc.value.imag < -low.value.imag

    def test_errors(self):
        with pytest.raises(ValueError):
            self_energy_self_consistent(0.5, 0.5, init=1e-3j)
        with pytest.raises(RuntimeError, match="convergence"):
            self_energy_self_consistent(0.5, 0.5, max_iter=2)

    def test_trace_csv(self, tmp_path):
        se = self_energy_self_consistent(0.5, 0.5, kernel_exponent=1.0)
        path = tmp_path / "trace.csv"
        write_iteration_csv(path, se)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iter,re_sigma_meV,im_sigma_meV"
        assert len(lines) == 1 + se.iterations


class TestLorentzianSpectrum:
    def test_peak_height_and_width(self):
        se = SelfEnergy(value=-0.2j, method="test")
        e = np.linspace(-40, 40, 400001)
        s = lorentzian_spectrum(se, e)
        assert s.max() == pytest.approx(1 / (np.pi * 0.2), rel=1e-6)
        half = e[s > s.max() / 2]
        assert half[-1] - half[0] == pytest.approx(0.4, rel=1e-3)
        # integral matches the analytic arctan coverage of the window
        cover = 2 / np.pi * np.arctan(40 / 0.2)
        assert np.trapezoid(s, e) == pytest.approx(cover, rel=1e-6)

    def test_requires_decay(self):
        with pytest.raises(ValueError):
            lorentzian_spectrum(SelfEnergy(value=0.1 + 0j, method="t"), np.array([0.0]))

    def test_overlays_simulated_single_emitter_line(self):
        # cross-module check: the self-consistent Lorentzian tracks the
        # simulated averaged line much better than lowest order; pointwise
        # agreement is limited by periodogram speckle, so compare smoothed
        nz = NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=400.0,
                         n_realizations=40, seed=12345)
        cfg = EvolutionConfig(chain=ChainParams(1, 1.0, 0.3), noise=nz, dt=0.05,
                              t_total=400.0, initial_state="single_site")
        rec = spectrum(run_emission(cfg), cfg.dt,
                       energies=np.linspace(-4, 4, 2001), keep_amplitudes=False)
        s_sim = _smooth(rec.averaged, 51)
        peak = s_sim.max()

        def overlay_dev(sigma):
            model = _smooth(lorentzian_spectrum(sigma, rec.energies), 51)
            return np.max(np.abs(model - s_sim)) / peak

        dev_low = overlay_dev(self_energy_lowest_order(0.5, 0.5))
        dev_sc = overlay_dev(self_energy_self_consistent(0.5, 0.5))
        dev_sc_narrow = overlay_dev(
            self_energy_self_consistent(0.5, 0.5, kernel_exponent=1.0))
        assert dev_sc < 0.10
        assert dev_sc_narrow < 0.10
        assert dev_sc < dev_low
