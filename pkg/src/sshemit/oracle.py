"""Brute-force many-body verifier for small chains.

Evolves the full 2^N state vector of the two-level-emitter chain (exact
matrix exponential per noise interval, built from Kronecker-product ladder
operators) and evaluates two-time correlations by the textbook recipe:
apply the lowering operator at t', evolve to t, apply again and overlap.
No free-particle reduction enters anywhere, so agreement with the
`dynamics` module establishes the single-excitation factorization
C(t,t') = a*(t) a(t') numerically.

Memory is 2^N per state and 2^N x 2^N per propagator; N <= 12 enforced,
tests use N <= 6.
"""

from __future__ import annotations

import numpy as np

from .constants import HBAR_MEV_PS
from .lattice import ChainParams, hopping_sequence

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # lowers |1> -> |0>
_NUMBER = np.array([[0.0, 0.0], [0.0, 1.0]])
_MAX_SITES = 12


def _site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-site operator at `site` (0-based) into the 2^n space."""
    out = np.array([[1.0]])
    for j in range(n):
        out = np.kron(out, op if j == site else np.eye(2))
    return out


def lowering_operator(site: int, n: int) -> np.ndarray:
    return _site_operator(_SIGMA_MINUS, site, n)


def number_operator(site: int, n: int) -> np.ndarray:
    return _site_operator(_NUMBER, site, n)


def total_number_operator(n: int) -> np.ndarray:
    return sum(number_operator(j, n) for j in range(n))


class ManyBodyChain:
    """Precomputed operator content of the chain Hamiltonian."""

    def __init__(self, params: ChainParams):
        if params.n_sites > _MAX_SITES:
            raise ValueError(f"n_sites must be <= {_MAX_SITES} for the many-body oracle")
        self.params = params
        n = params.n_sites
        self.number_ops = np.stack([number_operator(j, n) for j in range(n)])
        hop = np.zeros((2**n, 2**n))
        hops = hopping_sequence(params)
        for j in range(n - 1):
            raise_j = lowering_operator(j, n).T
            lower_j1 = lowering_operator(j + 1, n)
            term = raise_j @ lower_j1
            hop += hops[j] * (term + term.T)
        self.hopping = hop

    def hamiltonian(self, onsite: np.ndarray) -> np.ndarray:
        return self.hopping + np.tensordot(onsite, self.number_ops, axes=1)

    def single_excitation_state(self, amplitudes: np.ndarray) -> np.ndarray:
        """Embed a single-particle vector into the one-excitation sector."""
        n = self.params.n_sites
        state = np.zeros(2**n, dtype=complex)
        for j, amp in enumerate(amplitudes):
            basis = np.zeros(2**n)
            basis[0] = 1.0
            state += amp * lowering_operator(j, n).T @ basis
        return state


class StateHistory:
    """States on the noise grid plus the per-interval propagators."""

    def __init__(self, states: np.ndarray, propagators: np.ndarray, dt: float):
        self.states = states          # (n_intervals + 1, 2^N)
        self.propagators = propagators  # (n_intervals, 2^N, 2^N)
        self.dt = dt

    def evolve_between(self, vec: np.ndarray, i_from: int, i_to: int) -> np.ndarray:
        """Apply the stored propagators from grid index i_from to i_to >= i_from."""
        for k in range(i_from, i_to):
            vec = self.propagators[k] @ vec
        return vec


def evolve_many_body(chain: ManyBodyChain, noise: np.ndarray, initial: np.ndarray,
                     dt: float) -> StateHistory:
    """Exact step-wise evolution under piecewise-constant noise.

    Parameters
    ----------
    noise : (N, n_intervals) onsite energies, constant over each interval.
    initial : single-particle amplitude vector of length N (unit norm).
    dt : interval length in ps.
    """
    n_sites, n_int = noise.shape
    if n_sites != chain.params.n_sites:
        raise ValueError("noise row count must equal the number of sites")
    psi = chain.single_excitation_state(np.asarray(initial, dtype=complex))
    dim = psi.size
    states = np.empty((n_int + 1, dim), dtype=complex)
    props = np.empty((n_int, dim, dim), dtype=complex)
    states[0] = psi
    for k in range(n_int):
        evals, vecs = np.linalg.eigh(chain.hamiltonian(noise[:, k]))
        props[k] = (vecs * np.exp(-1j * evals * dt / HBAR_MEV_PS)) @ vecs.T.conj()
        psi = props[k] @ psi
        states[k + 1] = psi
    return StateHistory(states=states, propagators=props, dt=dt)


def correlation_many_body(chain: ManyBodyChain, history: StateHistory, site: int,
                          i: int, j: int) -> complex:
    """<sigma_site^+(t_i) sigma_site^-(t_j)> for grid indices i >= j.

    sigma^- is applied at t_j, the result evolved to t_i, and the overlap
    taken with sigma^- applied to the state at t_i.
    """
    if not 0 <= j <= i < history.states.shape[0]:
        raise IndexError("need grid indices with 0 <= j <= i")
    lower = lowering_operator(site, chain.params.n_sites)
    chi = history.evolve_between(lower @ history.states[j], j, i)
    return complex(np.vdot(lower @ history.states[i], chi))


def correlation_matrix(chain: ManyBodyChain, history: StateHistory, site: int) -> np.ndarray:
    """Full two-time kernel C[i, j] on the grid (Hermitian by construction)."""
    n_t = history.states.shape[0]
    lower = lowering_operator(site, chain.params.n_sites)
    lowered = history.states @ lower.T  # row i: sigma^- psi(t_i)
    c = np.empty((n_t, n_t), dtype=complex)
    for j in range(n_t):
        chi = lowered[j]
        c[j, j] = np.vdot(lowered[j], chi)
        for i in range(j + 1, n_t):
            chi = history.propagators[i - 1] @ chi
            c[i, j] = np.vdot(lowered[i], chi)
    iu = np.triu_indices(n_t, k=1)
    c[iu] = np.conj(c.T[iu])
    return c


def spectrum_from_correlation(c: np.ndarray, dt: float, energies: np.ndarray) -> np.ndarray:
    """Double-integral spectrum on a uniform time grid.

    S(E) = sum_ij w_i w_j C_ij e^{-i E (t_i - t_j)/hbar}
           / (2 pi hbar sum_i w_i C_ii)  with trapezoid weights w.
    """
    n_t = c.shape[0]
    t = np.arange(n_t) * dt
    w = np.full(n_t, dt)
    w[0] = w[-1] = dt / 2
    norm = 2 * np.pi * HBAR_MEV_PS * float(np.real(np.sum(w * np.diag(c))))
    phases = np.exp(1j * np.outer(t, np.asarray(energies)) / HBAR_MEV_PS)  # (n_t, n_E)
    u = w[:, None] * phases
    return np.real(np.einsum("ie,ij,je->e", np.conj(u), c, u)) / norm
