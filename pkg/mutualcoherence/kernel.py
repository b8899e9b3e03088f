"""Two-time contraction kernels of stationary mode systems."""
import functools
import logging
import operator
import threading
import unittest
from typing import Any

import cachetools
import numpy as np
import scipy.linalg

from . import config
from .errors import UnstableSystem
from .linalg import ComplexMatrix, SpectralDecomposition, diagonalize, lyapunov_residual, max_norm
from .system import ModeParams, ModeSystem, build_mode_system, build_two_mode_example

log = logging.getLogger(__name__)


def greens_kernel(decomp: SpectralDecomposition, diffusion: Any, t: float, s: float) -> ComplexMatrix:  # pylint: disable=invalid-name
    """Return the eigenbasis kernel 𝒢(t, s) of the stationary solution of the Langevin equation.

    With N = U⁻¹ D U⁻¹†, the entries are N_ij e^{−λ_i (t−s)} / (λ_i + λ_j*) for t ≥ s and N_ij e^{−λ_j* (s−t)} / (λ_i + λ_j*) for t < s.
    """
    diffusion = np.asarray(diffusion, dtype=complex)
    if diffusion.ndim == 1:
        diffusion = np.diag(diffusion)
    lambdas = decomp.lambdas
    denominators = lambdas[:, np.newaxis] + lambdas.conj()[np.newaxis, :]
    if not np.all(denominators.real > 0):
        raise UnstableSystem(f"The eigenvalues {np.round(lambdas, 6)} admit no stationary kernel.")
    noise = decomp.Uinv @ diffusion @ decomp.Uinv.conj().T
    if t >= s:
        decay = np.exp(-lambdas[:, np.newaxis] * (t - s))
    else:
        decay = np.exp(-lambdas.conj()[np.newaxis, :] * (s - t))
    return noise / denominators * decay


class TwoTimeKernel:
    """Pair covariance C(t, s) = U 𝒢(t, s) U† of a stationary system, cached by the time difference t − s.

    Entry C[u][d] is the contraction ⟨x_d†(s) x_u(t)⟩.
    """

    def __init__(self, decomposition: SpectralDecomposition, diffusion: Any):
        self.decomposition = decomposition
        self.diffusion = np.asarray(diffusion)
        self._cache: cachetools.LRUCache = cachetools.LRUCache(maxsize=config.KERNEL_CACHE_MAXSIZE)
        self._lock = threading.Lock()
        self.at_lag(0.0)  # Validates stability.

    @cachetools.cachedmethod(operator.attrgetter("_cache"), lock=operator.attrgetter("_lock"))
    def at_lag(self, lag: float) -> ComplexMatrix:
        """Return C(lag, 0)."""
        unitary = self.decomposition.U
        covariance = unitary @ greens_kernel(self.decomposition, self.diffusion, lag, 0.0) @ unitary.conj().T
        covariance.setflags(write=False)
        return covariance

    def __call__(self, t: float, s: float) -> ComplexMatrix:  # pylint: disable=invalid-name
        return self.at_lag(t - s)

    @property
    def equal_time(self) -> ComplexMatrix:
        """Return the stationary covariance C(0, 0) whose entry [u][d] is ⟨x_d† x_u⟩."""
        return self.at_lag(0.0)


@functools.lru_cache(maxsize=config.KERNEL_CACHE_MAXSIZE)
def two_time_kernel(system: ModeSystem) -> TwoTimeKernel:
    """Return the shared kernel of the given system."""
    log.debug("Creating the two-time kernel of %s.", system)
    return TwoTimeKernel(system.decomposition, system.diffusion)


def pair_covariance(system: ModeSystem, t: float, s: float) -> ComplexMatrix:  # pylint: disable=invalid-name
    """Return C(t, s) whose entry [u][d] is the contraction of undaggered mode u at time t with daggered mode d at time s."""
    return two_time_kernel(system)(t, s)


def steady_covariance(system: ModeSystem) -> ComplexMatrix:
    """Return the equal-time stationary covariance."""
    return two_time_kernel(system).equal_time


# pylint: disable=missing-class-docstring,missing-function-docstring
def random_stable_system(rng: np.random.Generator, dim: int) -> ModeSystem:
    """Return a random stable system of the given dimension, for tests."""
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    shift = max(0.0, -np.linalg.eigvals(matrix).real.min()) + rng.uniform(0.1, 1.0)
    n_optical = int(rng.integers(1, dim)) if dim > 1 else 1
    return ModeSystem(n_optical=n_optical, n_matter=dim - n_optical, drift=matrix + shift * np.eye(dim), diffusion=rng.uniform(0, 1, size=dim))


REFERENCE_SYSTEM_ARGS = (0.15, 0.25, 0.01, 0.1, 1.0)


class TestGreensKernel(unittest.TestCase):
    def test_single_mode(self):
        kappa, nbar = 0.3, 0.2
        decomp = diagonalize([[kappa / 2]])
        for lag in (0.0, 0.7, 4.0):
            kernel = greens_kernel(decomp, [nbar * kappa], lag, 0.0)
            self.assertAlmostEqual(kernel[0, 0], nbar * np.exp(-kappa / 2 * lag), places=14)

    def test_vacuum(self):
        decomp = build_two_mode_example(*REFERENCE_SYSTEM_ARGS).decomposition
        np.testing.assert_array_equal(greens_kernel(decomp, [0, 0], 1.0, 0.3), np.zeros((2, 2)))

    def test_symmetry(self):
        system = build_two_mode_example(*REFERENCE_SYSTEM_ARGS)
        rng = np.random.default_rng(5)
        for t, s in rng.uniform(-5, 5, size=(10, 2)):
            forward = greens_kernel(system.decomposition, system.diffusion, t, s)
            backward = greens_kernel(system.decomposition, system.diffusion, s, t)
            np.testing.assert_allclose(forward, backward.conj().T, rtol=1e-12, atol=1e-15)
        equal = greens_kernel(system.decomposition, system.diffusion, 1.5, 1.5)
        np.testing.assert_allclose(equal, equal.conj().T, atol=1e-15)

    def test_unstable(self):
        with self.assertRaises(UnstableSystem):
            greens_kernel(diagonalize([[-0.5]]), [1.0], 1.0, 0.0)


class TestPairCovariance(unittest.TestCase):
    def test_reference_lyapunov(self):
        system = build_two_mode_example(*REFERENCE_SYSTEM_ARGS)
        covariance = pair_covariance(system, 0, 0)
        self.assertLessEqual(lyapunov_residual(system.drift, covariance, system.diffusion_matrix), 1e-10)
        np.testing.assert_allclose(covariance, scipy.linalg.solve_continuous_lyapunov(system.drift, system.diffusion_matrix), rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(covariance.diagonal().real, [0.065728, 0.066563], rtol=1e-3)

    def test_random_lyapunov(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            system = random_stable_system(rng, int(rng.integers(2, 9)))
            covariance = steady_covariance(system)
            residual = lyapunov_residual(system.drift, covariance, system.diffusion_matrix)
            self.assertLessEqual(residual, 1e-10 * max_norm(system.diffusion_matrix))

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        system = random_stable_system(rng, 4)
        for t, s in rng.uniform(0, 10, size=(10, 2)):
            np.testing.assert_allclose(pair_covariance(system, t, s), pair_covariance(system, s, t).conj().T, rtol=1e-10, atol=1e-14)

    def test_uncoupled_thermal_mode(self):
        kappa, nbar = 0.25, 0.1
        system = build_mode_system([], [ModeParams(kappa, nbar)], np.zeros((1, 0)))
        for t, s in ((0.0, 0.0), (3.0, 1.0), (1.0, 3.0)):
            self.assertAlmostEqual(pair_covariance(system, t, s)[0, 0], nbar * np.exp(-kappa / 2 * abs(t - s)), places=14)

    def test_vacuum(self):
        system = build_two_mode_example(0.15, 0.25, 0, 0, 1)
        np.testing.assert_array_equal(pair_covariance(system, 2.0, 0.5), np.zeros((2, 2)))

    def test_decay(self):
        system = build_two_mode_example(*REFERENCE_SYSTEM_ARGS)
        self.assertLess(max_norm(pair_covariance(system, 300, 0)), 1e-14)

    def test_cached(self):
        system = build_two_mode_example(*REFERENCE_SYSTEM_ARGS)
        self.assertIs(pair_covariance(system, 1.5, 0.5), pair_covariance(system, 2.0, 1.0))


# python -m unittest -v mutualcoherence.kernel
