"""Linearly coupled optical and matter-wave mode systems.

A system of R optical modes followed by S matter modes obeys the Langevin equation dx/dt = −M x + B ξ with diffusion D = B B† = diag(n̄ κ).
Rates and times are in units of the coupling constant g.
"""
import dataclasses
import enum
import logging
import unittest
from functools import cached_property
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, UnstableSystem, UnsupportedAnomalousCoupling
from .linalg import ComplexMatrix, SpectralDecomposition, as_complex_matrix, diagonalize

log = logging.getLogger(__name__)


class ModeKind(str, enum.Enum):
    """Kind of a mode."""

    OPTICAL = "optical"
    MATTER = "matter"


@dataclasses.dataclass(frozen=True)
class ModeParams:
    """Loss rate, reservoir thermal occupation and frequency of a single mode."""

    kappa: float
    nbar: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"The loss rate must be positive, but it is {self.kappa}.")
        if not self.nbar >= 0:
            raise ValueError(f"The thermal occupation must be nonnegative, but it is {self.nbar}.")


@dataclasses.dataclass(frozen=True, eq=False)
class ModeSystem:
    """Immutable linear mode system with its drift matrix and diagonal diffusion."""

    n_optical: int
    n_matter: int
    drift: ComplexMatrix
    diffusion: np.ndarray  # Diagonal entries n̄κ.

    def __post_init__(self):
        drift = as_complex_matrix(self.drift, "drift")
        diffusion = np.array(self.diffusion, dtype=float).reshape(-1)
        if (self.n_optical < 0) or (self.n_matter < 0):
            raise ValueError(f"Mode counts must be nonnegative, but they are {self.n_optical} and {self.n_matter}.")
        if drift.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"The drift must have shape {(self.dim, self.dim)}, but it has shape {drift.shape}.")
        if diffusion.shape != (self.dim,):
            raise DimensionMismatch(f"The diffusion must have {self.dim} entries, but it has {diffusion.size}.")
        if not (np.all(np.isfinite(diffusion)) and np.all(diffusion >= 0)):
            raise ValueError(f"The diffusion entries must be finite and nonnegative, but they are {diffusion}.")
        diffusion.setflags(write=False)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "diffusion", diffusion)

        eigenvalues = np.linalg.eigvals(drift) if self.dim else np.zeros(0)
        if not np.all(eigenvalues.real > 0):
            raise UnstableSystem(f"The drift has eigenvalues {np.round(eigenvalues, 6)} of which not all have a positive real part.")
        log.debug("Initialized %s.", self)

    def __str__(self) -> str:
        return f"mode system of {self.n_optical} optical and {self.n_matter} matter modes"

    @property
    def dim(self) -> int:
        """Return the total number of modes."""
        return self.n_optical + self.n_matter

    @property
    def labels(self) -> Tuple[ModeKind, ...]:
        """Return the kind of each mode, optical modes first."""
        return (ModeKind.OPTICAL,) * self.n_optical + (ModeKind.MATTER,) * self.n_matter

    @property
    def diffusion_matrix(self) -> np.ndarray:
        """Return the diffusion as a diagonal matrix."""
        return np.diag(self.diffusion).astype(complex)

    @cached_property
    def decomposition(self) -> SpectralDecomposition:
        """Return the spectral decomposition of the drift."""
        return diagonalize(self.drift)

    def mode_index(self, kind: ModeKind, index: int = 0) -> int:
        """Return the position in the mode vector of the given mode of the given kind."""
        count, offset = (self.n_optical, 0) if kind == ModeKind.OPTICAL else (self.n_matter, self.n_optical)
        if not 0 <= index < count:
            raise IndexError(f"The {self} has no {kind.value} mode {index}.")
        return offset + index

    def unit_weights(self, kind: ModeKind, index: int = 0) -> np.ndarray:
        """Return a weight vector selecting a single mode."""
        weights = np.zeros(self.dim, dtype=complex)
        weights[self.mode_index(kind, index)] = 1
        return weights

    def supports_only(self, weights: Any, kind: ModeKind) -> bool:
        """Return whether the given weight vector is nonzero only on modes of the given kind."""
        mask = np.array([label == kind for label in self.labels])
        return bool(np.all(np.asarray(weights)[~mask] == 0))


def build_mode_system(
    optical: Sequence[ModeParams],
    matter: Sequence[ModeParams],
    couplings: Any,
    anomalous_couplings: Optional[Any] = None,
) -> ModeSystem:
    """Return the mode system of the effective model of linearly coupled optical and matter modes.

    `couplings[i][α]` couples matter mode i to optical mode α through ħ(g a_α† c_i + h.c.).
    Parametric couplings ħ(g a_α c_i + h.c.) are not number conserving and are rejected when nonzero.
    """
    num_optical, num_matter = len(optical), len(matter)
    couplings = np.array(couplings, dtype=complex).reshape(num_matter, num_optical)
    if anomalous_couplings is not None and np.any(np.asarray(anomalous_couplings) != 0):
        raise UnsupportedAnomalousCoupling("Parametric couplings that create optical and matter quanta in pairs are unsupported.")
    modes = [*optical, *matter]
    drift = np.diag([mode.kappa / 2 + 1j * mode.omega for mode in modes]).astype(complex)
    drift[:num_optical, num_optical:] += 1j * couplings.T
    drift[num_optical:, :num_optical] += 1j * couplings.conj()
    diffusion = [mode.nbar * mode.kappa for mode in modes]
    return ModeSystem(n_optical=num_optical, n_matter=num_matter, drift=drift, diffusion=diffusion)


def build_two_mode_example(kappa1: float, kappa2: float, nbar1: float, nbar2: float, g: float) -> ModeSystem:  # pylint: disable=invalid-name
    """Return the two-mode system with drift [[κ1/2, ig], [ig, κ2/2]] and diffusion diag(n̄1κ1, n̄2κ2).

    Mode 1 is optical and mode 2 is matter.
    """
    if g == 0:
        log.debug("The two-mode example is decoupled.")
    return build_mode_system([ModeParams(kappa1, nbar1)], [ModeParams(kappa2, nbar2)], [[g]])


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestBuildTwoModeExample(unittest.TestCase):
    def test_reference_system(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        np.testing.assert_array_equal(system.drift, [[0.075, 1j], [1j, 0.125]])
        np.testing.assert_allclose(system.diffusion, [0.0015, 0.025])
        self.assertEqual(system.labels, (ModeKind.OPTICAL, ModeKind.MATTER))

    def test_eigenvalues(self):
        lambdas = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1).decomposition.lambdas
        np.testing.assert_allclose(lambdas, [0.1 - 0.999687j, 0.1 + 0.999687j], atol=1e-6)

    def test_vacuum_reservoirs(self):
        system = build_two_mode_example(0.2, 0.2, 0, 0, 0.5)
        np.testing.assert_array_equal(system.diffusion, [0, 0])

    def test_invalid(self):
        with self.assertRaises(ValueError):
            build_two_mode_example(0, 0.25, 0.01, 0.1, 1)
        with self.assertRaises(ValueError):
            build_two_mode_example(0.15, 0.25, -0.01, 0.1, 1)


class TestModeSystem(unittest.TestCase):
    def test_unstable(self):
        with self.assertRaises(UnstableSystem):
            ModeSystem(n_optical=1, n_matter=1, drift=[[-0.1, 0], [0, 0.2]], diffusion=[0, 0])

    def test_shapes(self):
        with self.assertRaises(DimensionMismatch):
            ModeSystem(n_optical=1, n_matter=1, drift=np.eye(3), diffusion=[0, 0])
        with self.assertRaises(ValueError):
            ModeSystem(n_optical=1, n_matter=0, drift=[[1]], diffusion=[-1])

    def test_weights(self):
        system = build_mode_system([ModeParams(1), ModeParams(1)], [ModeParams(1)], [[0.1, 0.2]])
        np.testing.assert_array_equal(system.unit_weights(ModeKind.MATTER), [0, 0, 1])
        self.assertTrue(system.supports_only([1, 2j, 0], ModeKind.OPTICAL))
        self.assertFalse(system.supports_only([1, 0, 1], ModeKind.OPTICAL))
        with self.assertRaises(IndexError):
            system.mode_index(ModeKind.MATTER, 1)

    def test_general_drift(self):
        system = build_mode_system([ModeParams(0.2, omega=1.5)], [ModeParams(0.4, 0.3)], [[0.5 + 0.5j]])
        expected = [[0.1 + 1.5j, 1j * (0.5 + 0.5j)], [1j * (0.5 - 0.5j), 0.2]]
        np.testing.assert_allclose(system.drift, expected)
        np.testing.assert_allclose(system.diffusion, [0, 0.12])

    def test_anomalous(self):
        with self.assertRaises(UnsupportedAnomalousCoupling):
            build_mode_system([ModeParams(1)], [ModeParams(1)], [[1]], anomalous_couplings=[[0.1]])
        build_mode_system([ModeParams(1)], [ModeParams(1)], [[1]], anomalous_couplings=[[0]])


# python -m unittest -v mutualcoherence.system
