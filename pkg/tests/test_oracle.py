import numpy as np
import pytest
from scipy.linalg import expm

from sshemit.constants import HBAR_MEV_PS
from sshemit.dynamics import EvolutionConfig, correlation, energy_grid, propagate, spectrum
from sshemit.lattice import ChainParams, build_hamiltonian
from sshemit.noise import NoiseParams, noise_matrix
from sshemit.oracle import (
    ManyBodyChain,
    correlation_many_body,
    correlation_matrix,
    evolve_many_body,
    lowering_operator,
    spectrum_from_correlation,
    total_number_operator,
)


def setup_case(n, seed=17, t_total=30.0, epsilon=0.5, theta=0.2 * np.pi):
    chain = ChainParams(n_sites=n, j0=1.0, theta=theta)
    nz = NoiseParams(epsilon=epsilon, tau=0.5, dt=0.05, t_total=t_total,
                     n_realizations=1, seed=seed)
    cfg = EvolutionConfig(chain=chain, noise=nz, dt=0.05, t_total=t_total,
                          initial_state="single_site")
    eps = noise_matrix(nz, n, 0, n_steps=cfg.n_intervals)
    return chain, cfg, eps


def single_site_vector(n):
    vec = np.zeros(n)
    vec[0] = 1.0
    return vec


class TestEvolution:
    def test_excitation_number_conserved(self):
        chain, cfg, eps = setup_case(4)
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, cfg.initial_vector(), cfg.dt)
        n_tot = total_number_operator(4)
        occ = np.real(np.einsum("ti,ij,tj->t", np.conj(hist.states), n_tot, hist.states))
        np.testing.assert_allclose(occ, 1.0, atol=1e-10)

    def test_norm_conservation_long(self):
        chain = ChainParams(n_sites=2, j0=1.0, theta=0.2 * np.pi)
        nz = NoiseParams(epsilon=0.5, tau=0.5, dt=0.05, t_total=500.0,
                         n_realizations=1, seed=9)
        eps = noise_matrix(nz, 2, 0, n_steps=10000)
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, np.array([1.0, 0.0]), 0.05)
        norms = np.linalg.norm(hist.states, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_dimer_rabi(self):
        chain = ChainParams(n_sites=2, j0=1.0, theta=np.pi / 2)
        mb = ManyBodyChain(chain)
        eps = np.zeros((2, 400))
        hist = evolve_many_body(mb, eps, np.array([1.0, 0.0]), 0.05)
        t = np.arange(401) * 0.05
        occ_site1 = np.array([correlation_many_body(mb, hist, 0, i, i).real
                              for i in range(0, 401, 20)])
        np.testing.assert_allclose(occ_site1, np.cos(t[::20] / HBAR_MEV_PS) ** 2,
                                   atol=1e-10)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            ManyBodyChain(ChainParams(n_sites=14, j0=1.0, theta=0.3))


class TestSingleExcitationReduction:
    def test_sector_matches_single_particle_propagator(self):
        # the mathematically exact statement behind the free-particle
        # reduction: within the one-excitation block the 2^N evolution is
        # the N x N propagator
        chain, cfg, eps = setup_case(4, seed=23)
        mb = ManyBodyChain(chain)
        psi0 = single_site_vector(4)
        hist = evolve_many_body(mb, eps, psi0, 0.05)
        # single-particle side, independently via expm
        amp = psi0.astype(complex)
        for k in range(eps.shape[1]):
            h = build_hamiltonian(chain, onsite=eps[:, k])
            amp = expm(-1j * h * 0.05 / HBAR_MEV_PS) @ amp
        vacuum = np.eye(2**4)[0]
        basis = np.array([lowering_operator(j, 4).T @ vacuum for j in range(4)])
        extracted = basis.conj() @ hist.states[-1]
        np.testing.assert_allclose(extracted, amp, atol=1e-10)


class TestCorrelation:
    def test_diagonal_is_occupation(self):
        chain, cfg, eps = setup_case(4)
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, single_site_vector(4), 0.05)
        c = correlation_many_body(mb, hist, 0, 40, 40)
        assert 0.0 <= c.real <= 1.0 + 1e-12
        assert abs(c.imag) < 1e-12

    def test_hermitian_symmetry(self):
        chain, cfg, eps = setup_case(4)
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, cfg.initial_vector(), cfg.dt)
        m = correlation_matrix(mb, hist, 0)
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)

    def test_matches_free_particle_factorization(self):
        # 20 random (t, t') pairs against a*(t) a(t') from the dynamics module
        chain, cfg, eps = setup_case(6, seed=41)
        amp = propagate(cfg, 0)
        c_free = correlation(amp, cfg.dt)
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, cfg.initial_vector(), cfg.dt)
        rng = np.random.default_rng(8)
        n_t = hist.states.shape[0]
        for _ in range(20):
            j, i = np.sort(rng.integers(0, n_t, size=2))
            got = correlation_many_body(mb, hist, 0, int(i), int(j))
            want = c_free(int(i), int(j))
            assert got == pytest.approx(want, abs=1e-8)


class TestSpectrumEquivalence:
    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_pointwise_agreement(self, n):
        chain, cfg, eps = setup_case(n, seed=55, t_total=30.0)
        amp = propagate(cfg, 0)
        energies = energy_grid(5.0, 161)
        s_free = spectrum([amp], cfg.dt, energies=energies).averaged
        mb = ManyBodyChain(chain)
        hist = evolve_many_body(mb, eps, cfg.initial_vector(), cfg.dt)
        c = correlation_matrix(mb, hist, 0)
        s_many = spectrum_from_correlation(c, cfg.dt, energies)
        assert np.max(np.abs(s_many - s_free)) < 1e-6 * s_free.max()
