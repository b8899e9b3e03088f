"""Brute-force truncated Fock space oracle for stationary multi-time correlators.

The steady state of the thermal master equation is reached by propagation, and multi-time correlators follow from the quantum regression procedure.
This is the slow trusted path against which the Wick expansion is checked.
"""
import dataclasses
import functools
import logging
import unittest
from functools import cached_property
from typing import List, Tuple

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import config
from .errors import CutoffTooSmall, DimensionMismatch, NotConverged, UnsupportedSpec
from .kernel import pair_covariance, steady_covariance
from .linalg import max_norm
from .system import ModeKind, ModeParams, ModeSystem, build_mode_system, build_two_mode_example
from .util.timeit import Timer
from .wick import CorrelationSpec, FieldEvent, G3Kind, default_g3_weights, g3_spec, wick_correlation

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class FockConfig:
    """Truncation and steady-state convergence settings of the oracle."""

    cutoff: int = config.FOCK_CUTOFF_DEFAULT  # Number of Fock states per mode.
    tolerance: float = config.FOCK_TOLERANCE_DEFAULT  # Bound on the max-norm of L[ρ] at steady state.
    edge_tolerance: float = config.FOCK_EDGE_TOLERANCE_DEFAULT  # Bound on the population of the highest Fock state of any mode.
    max_time: float = config.FOCK_MAX_TIME_DEFAULT
    time_step: float = config.FOCK_TIME_STEP_DEFAULT

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValueError(f"The cutoff must be at least 2, but it is {self.cutoff}.")
        for name in ("tolerance", "edge_tolerance", "max_time", "time_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"The {name} must be positive, but it is {getattr(self, name)}.")


@dataclasses.dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density operator over the truncated product Fock basis, with the first mode most significant."""

    matrix: np.ndarray
    cutoff: int
    num_modes: int

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        dim = self.cutoff**self.num_modes
        if matrix.shape != (dim, dim):
            raise DimensionMismatch(f"The density matrix must have shape {(dim, dim)}, but it has shape {matrix.shape}.")
        if (error := max_norm(matrix - matrix.conj().T)) > 1e-10:
            raise ValueError(f"The density matrix is not Hermitian; its anti-Hermitian part has norm {error:.3g}.")
        if abs(trace := np.trace(matrix) - 1) > 1e-10:
            raise ValueError(f"The density matrix has trace 1{trace.real:+.3g}.")
        if (lowest := np.linalg.eigvalsh(matrix).min()) < -1e-9:
            raise ValueError(f"The density matrix has the negative eigenvalue {lowest:.3g}.")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def populations(self, mode: int) -> np.ndarray:
        """Return the Fock state populations of the given mode."""
        diagonal = self.matrix.diagonal().real.reshape((self.cutoff,) * self.num_modes)
        other_axes = tuple(axis for axis in range(self.num_modes) if axis != mode)
        return diagonal.sum(axis=other_axes)

    def mean_occupation(self, mode: int) -> float:
        """Return ⟨x† x⟩ of the given mode."""
        return float(self.populations(mode) @ np.arange(self.cutoff))

    @property
    def edge_population(self) -> float:
        """Return the total population of the basis states in which any mode has its highest Fock state occupied."""
        diagonal = self.matrix.diagonal().real.reshape((self.cutoff,) * self.num_modes)
        inner = diagonal[(slice(0, self.cutoff - 1),) * self.num_modes].sum()
        return float(diagonal.sum() - inner)


def relative_error(value: complex, reference: complex) -> float:
    """Return |value − reference| / |reference|, or the absolute error if the reference is zero."""
    return float(abs(value - reference) / abs(reference)) if reference != 0 else float(abs(value))


def _annihilator(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


class FockOracle:
    """Truncated master equation of a one- or two-mode system.

    The Hamiltonian h = (M − M†)/(2i) and loss rates κ_k = 2 Re M_kk are recovered from the drift, whose damping part must be diagonal.
    Reservoir k induces the jumps √(κ_k(n̄_k+1)) x_k and √(κ_k n̄_k) x_k†.
    """

    def __init__(self, system: ModeSystem, cfg: FockConfig):
        if not 1 <= system.dim <= config.ORACLE_MODES_MAX:
            raise UnsupportedSpec(f"The oracle supports 1 to {config.ORACLE_MODES_MAX} modes, but the {system} has {system.dim}.")
        drift = system.drift
        damping = (drift + drift.conj().T) / 2
        if max_norm(damping - np.diag(damping.diagonal())) > 1e-12 * max_norm(drift):
            raise UnsupportedSpec("The oracle requires a diagonal damping part of the drift.")
        kappas = 2 * damping.diagonal().real
        if not np.all(kappas > 0):
            raise UnsupportedSpec(f"The oracle requires positive loss rates, but they are {kappas}.")
        self.system, self.cfg = system, cfg
        self.nbars = system.diffusion / kappas
        self.dim = cfg.cutoff**system.dim

        single = _annihilator(cfg.cutoff)
        identity = np.eye(cfg.cutoff)
        self.annihilators: List[np.ndarray] = []
        for mode in range(system.dim):
            factors = [single if axis == mode else identity for axis in range(system.dim)]
            self.annihilators.append(functools.reduce(np.kron, factors))
        hamiltonian_coefficients = (drift - drift.conj().T) / 2j
        hamiltonian = sum(hamiltonian_coefficients[k, l] * self.annihilators[k].conj().T @ self.annihilators[l] for k in range(system.dim) for l in range(system.dim))
        jumps = []
        for mode, (kappa, nbar) in enumerate(zip(kappas, self.nbars)):
            jumps.append(np.sqrt(kappa * (nbar + 1)) * self.annihilators[mode])
            if nbar > 0:
                jumps.append(np.sqrt(kappa * nbar) * self.annihilators[mode].conj().T)
        self.liouvillian = self._liouvillian(np.asarray(hamiltonian, dtype=complex), jumps)
        log.debug("Built the %sx%s Liouvillian of the %s at cutoff %s having %s nonzeros.", *self.liouvillian.shape, system, cfg.cutoff, self.liouvillian.nnz)

    def __str__(self) -> str:
        return f"Fock oracle of the {self.system} at cutoff {self.cfg.cutoff}"

    def _liouvillian(self, hamiltonian: np.ndarray, jumps: List[np.ndarray]) -> scipy.sparse.csr_matrix:
        """Return L acting on row-major vectorized operators, using vec(A X B) = (A ⊗ Bᵀ) vec(X)."""
        identity = scipy.sparse.identity(self.dim, dtype=complex, format="csr")
        hamiltonian = scipy.sparse.csr_matrix(hamiltonian)
        liouvillian = -1j * (scipy.sparse.kron(hamiltonian, identity) - scipy.sparse.kron(identity, hamiltonian.T))
        for jump in jumps:
            jump = scipy.sparse.csr_matrix(jump)
            rate = (jump.conj().T @ jump).tocsr()
            liouvillian = liouvillian + scipy.sparse.kron(jump, jump.conj()) - 0.5 * scipy.sparse.kron(rate, identity) - 0.5 * scipy.sparse.kron(identity, rate.T)
        return scipy.sparse.csr_matrix(liouvillian)

    def residual(self, operator: np.ndarray) -> float:
        """Return the max-norm of L[X]."""
        return max_norm(self.liouvillian @ operator.reshape(-1))

    def evolve(self, operator: np.ndarray, duration: float) -> np.ndarray:
        """Return exp(L·duration)[X]."""
        if duration == 0:
            return operator
        if duration < 0:
            raise ValueError(f"The evolution duration must be nonnegative, but it is {duration}.")
        vector = scipy.sparse.linalg.expm_multiply(self.liouvillian * duration, operator.reshape(-1))
        return vector.reshape(self.dim, self.dim)

    def _thermal_product(self) -> np.ndarray:
        ratios = self.nbars / (1 + self.nbars)
        populations = [ratio ** np.arange(self.cfg.cutoff) for ratio in ratios]
        diagonal = functools.reduce(np.kron, [p / p.sum() for p in populations])
        return np.diag(diagonal).astype(complex)

    @cached_property
    def steady_state(self) -> DensityMatrix:
        """Return the steady state, reached from the product of the reservoir thermal states."""
        timer = Timer()
        rho, elapsed = self._thermal_product(), 0.0
        while (residual := self.residual(rho)) > self.cfg.tolerance:
            if elapsed >= self.cfg.max_time:
                raise NotConverged(f"The {self} did not reach the residual {self.cfg.tolerance:.3g} within the time {self.cfg.max_time:g}; the residual is {residual:.3g}.")
            rho = self.evolve(rho, self.cfg.time_step)
            rho = (rho + rho.conj().T) / 2
            rho /= np.trace(rho).real
            elapsed += self.cfg.time_step
        state = DensityMatrix(rho, cutoff=self.cfg.cutoff, num_modes=self.system.dim)
        if (edge := state.edge_population) > self.cfg.edge_tolerance:
            raise CutoffTooSmall(f"The {self} leaves the population {edge:.3g} in the highest Fock states, exceeding {self.cfg.edge_tolerance:.3g}. Increase the cutoff.")
        log.debug("Reached the steady state of the %s after the time %g with the residual %.3g in %s.", self, elapsed, residual, timer)
        return state

    def field(self, event: FieldEvent) -> np.ndarray:
        """Return the matrix of the field operator of the event."""
        if event.weights.size != self.system.dim:
            raise DimensionMismatch(f"The event {event} has {event.weights.size} weights, but the {self.system} has {self.system.dim} modes.")
        operator = sum(weight * annihilator for weight, annihilator in zip(event.weights, self.annihilators))
        return operator.conj().T if event.daggered else operator

    def correlation(self, spec: CorrelationSpec) -> complex:
        """Return the stationary correlator of the time-nested string via quantum regression.

        The daggered times must be nondecreasing from left to right and the undaggered times nondecreasing from right to left.
        """
        left, right = spec.daggered, spec.undaggered
        if max(len(left), len(right)) > config.ORACLE_EVENTS_MAX:
            raise UnsupportedSpec(f"The oracle supports up to {config.ORACLE_EVENTS_MAX} events per side, but {spec} has more.")
        left_times, right_times = [event.time for event in left], [event.time for event in reversed(right)]
        if (left_times != sorted(left_times)) or (right_times != sorted(right_times)):
            raise UnsupportedSpec(f"The times of {spec} do not increase from the outside of the string to its inside.")

        # Each step is (time, depth from the outside, multiply from the left, operator).
        steps: List[Tuple[float, int, bool, np.ndarray]] = [(event.time, depth, False, self.field(event)) for depth, event in enumerate(left)]
        steps += [(event.time, depth, True, self.field(event)) for depth, event in enumerate(reversed(right))]
        steps.sort(key=lambda step: step[:2])
        operator = np.array(self.steady_state.matrix)
        now = steps[0][0] if steps else 0.0
        for time, _depth, from_left, field in steps:
            operator = self.evolve(operator, time - now)
            now = time
            operator = field @ operator if from_left else operator @ field
        return complex(np.trace(operator))


@functools.lru_cache(maxsize=8)
def fock_oracle(system: ModeSystem, cfg: FockConfig) -> FockOracle:
    """Return the shared oracle of the given system and settings."""
    return FockOracle(system, cfg)


def steady_state(system: ModeSystem, cfg: FockConfig = FockConfig()) -> DensityMatrix:
    """Return the truncated steady state of the thermal master equation of the system."""
    return fock_oracle(system, cfg).steady_state


def multitime_correlation(system: ModeSystem, cfg: FockConfig, spec: CorrelationSpec) -> complex:
    """Return the stationary time-nested correlator via quantum regression on the truncated steady state."""
    return fock_oracle(system, cfg).correlation(spec)


# pylint: disable=missing-class-docstring,missing-function-docstring
def _random_operator(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


class TestReferenceOracle(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        cls.cfg = FockConfig()
        cls.state = steady_state(cls.system, cls.cfg)

    def test_populations(self):
        covariance = steady_covariance(self.system)
        for mode in range(2):
            self.assertLessEqual(relative_error(self.state.mean_occupation(mode), covariance[mode, mode].real), 0.01)

    def test_density_invariants(self):
        matrix = self.state.matrix
        self.assertLessEqual(max_norm(matrix - matrix.conj().T), 1e-10)
        self.assertAlmostEqual(np.trace(matrix), 1, delta=1e-10)
        self.assertGreaterEqual(np.linalg.eigvalsh(matrix).min(), -1e-9)
        self.assertLessEqual(fock_oracle(self.system, self.cfg).residual(matrix), self.cfg.tolerance)

    def test_trace_preservation(self):
        oracle = fock_oracle(self.system, self.cfg)
        vacuum = np.zeros((oracle.dim, oracle.dim), dtype=complex)
        vacuum[0, 0] = 1
        self.assertAlmostEqual(np.trace(oracle.evolve(vacuum, 5.0)), 1, delta=1e-9)
        operator = _random_operator(np.random.default_rng(11), oracle.dim)
        self.assertAlmostEqual(np.trace(oracle.evolve(operator, 3.0)), np.trace(operator), delta=1e-9 * abs(np.trace(operator)) + 1e-9)

    def test_equal_time_occupation(self):
        matter = self.system.unit_weights(ModeKind.MATTER)
        spec = CorrelationSpec((FieldEvent(True, matter, 0.0), FieldEvent(False, matter, 0.0)))
        self.assertAlmostEqual(multitime_correlation(self.system, self.cfg, spec), self.state.mean_occupation(1), delta=1e-12)

    def test_pair_correlations(self):
        optical, matter = self.system.unit_weights(ModeKind.OPTICAL), self.system.unit_weights(ModeKind.MATTER)
        for (d_weights, d_index), (u_weights, u_index) in ((optical, 0), (matter, 1)), ((matter, 1), (optical, 0)), ((matter, 1), (matter, 1)):
            for d_time, u_time in ((0.0, 1.5), (2.0, 0.5)):
                spec = CorrelationSpec((FieldEvent(True, d_weights, d_time), FieldEvent(False, u_weights, u_time)))
                expected = pair_covariance(self.system, u_time, d_time)[u_index, d_index]
                self.assertLessEqual(relative_error(multitime_correlation(self.system, self.cfg, spec), expected), 0.01)

    def test_g3_equivalence(self):
        weights = default_g3_weights(self.system)
        for tau1, tau2 in config.ORACLE_POINTS_DEFAULT:
            for kind in G3Kind:
                spec = g3_spec(kind, *weights, 0.0, tau2, tau1)
                self.assertLessEqual(relative_error(multitime_correlation(self.system, self.cfg, spec), wick_correlation(self.system, spec)), 0.01, (kind, tau1, tau2))

    def test_not_nested(self):
        matter = self.system.unit_weights(ModeKind.MATTER)
        spec = CorrelationSpec((FieldEvent(True, matter, 1.0), FieldEvent(True, matter, 0.0), FieldEvent(False, matter, 0.0), FieldEvent(False, matter, 1.0)))
        with self.assertRaises(UnsupportedSpec):
            multitime_correlation(self.system, self.cfg, spec)

    def test_too_many_events(self):
        matter = self.system.unit_weights(ModeKind.MATTER)
        spec = CorrelationSpec(tuple(FieldEvent(True, matter, 0.0) for _ in range(4)) + tuple(FieldEvent(False, matter, 0.0) for _ in range(4)))
        with self.assertRaises(UnsupportedSpec):
            multitime_correlation(self.system, self.cfg, spec)


class TestOracleSystems(unittest.TestCase):
    def test_vacuum(self):
        system = build_two_mode_example(0.15, 0.25, 0, 0, 1)
        state = steady_state(system, FockConfig(cutoff=4))
        self.assertEqual(state.matrix[0, 0], 1)
        spec = g3_spec(G3Kind.X, *default_g3_weights(system), 0.0, 0.5, 1.0)
        self.assertLessEqual(abs(multitime_correlation(system, FockConfig(cutoff=4), spec)), 1e-12)

    def test_geometric_populations(self):
        kappa, nbar = 0.25, 0.1
        system = build_mode_system([], [ModeParams(kappa, nbar)], np.zeros((1, 0)))
        populations = steady_state(system, FockConfig(cutoff=12)).populations(0)
        ratio = nbar / (1 + nbar)
        np.testing.assert_allclose(populations, ratio ** np.arange(12) / (1 + nbar), rtol=1e-8, atol=1e-14)
        self.assertAlmostEqual(steady_state(system, FockConfig(cutoff=12)).mean_occupation(0), nbar, delta=1e-9)

    def test_decoupled_factorization(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 0)
        spec = g3_spec(G3Kind.X, *default_g3_weights(system), 0.0, 0.0, 0.0)
        self.assertLessEqual(relative_error(multitime_correlation(system, FockConfig(), spec), 2 * 0.1**2 * 0.01), 0.01)

    def test_cutoff_doubling(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.01, 1)
        spec = g3_spec(G3Kind.X, *default_g3_weights(system), 0.0, 0.5, 1.0)
        coarse, fine = multitime_correlation(system, FockConfig(cutoff=6), spec), multitime_correlation(system, FockConfig(cutoff=12), spec)
        self.assertLessEqual(relative_error(coarse, fine), 0.01)

    def test_cutoff_too_small(self):
        system = build_two_mode_example(0.15, 0.25, 0.5, 0.5, 1)
        with self.assertRaises(CutoffTooSmall):
            steady_state(system, FockConfig(cutoff=3))

    def test_not_converged(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        with self.assertRaises(NotConverged):
            steady_state(system, FockConfig(cutoff=4, max_time=10, time_step=10))

    def test_unsupported_systems(self):
        with self.assertRaises(UnsupportedSpec):
            FockOracle(ModeSystem(n_optical=1, n_matter=1, drift=[[0.1, 0.05], [0.05, 0.1]], diffusion=[0, 0]), FockConfig(cutoff=3))
        with self.assertRaises(UnsupportedSpec):
            FockOracle(build_mode_system([ModeParams(1), ModeParams(1)], [ModeParams(1)], [[0.1, 0.2]]), FockConfig(cutoff=3))

    def test_config(self):
        with self.assertRaises(ValueError):
            FockConfig(cutoff=1)
        with self.assertRaises(ValueError):
            FockConfig(tolerance=0)


# python -m unittest -v mutualcoherence.oracle
