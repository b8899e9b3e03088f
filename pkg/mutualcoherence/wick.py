"""Normally ordered multi-time correlators of stationary mode systems via the Wick expansion.

A balanced normally ordered correlator of a zero-mean number-conserving Gaussian state is the permanent of its matrix of pair contractions.
"""
import dataclasses
import enum
import itertools
import logging
import math
import unittest
from typing import Any, List, Sequence, Tuple

import numpy as np

from . import config
from .errors import DimensionMismatch, NotNormallyOrdered, TooManyEvents, ZeroDenominator
from .kernel import pair_covariance, steady_covariance
from .linalg import permanent
from .system import ModeKind, ModeSystem, build_two_mode_example

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class FieldEvent:
    """A field operator Σ_m w_m x_m at a time, or its adjoint when daggered.

    The weights are the mode-function values at the detector position and are conjugated by the contraction when daggered.
    """

    daggered: bool
    weights: np.ndarray
    time: float
    label: str = ""

    def __post_init__(self):
        weights = np.array(self.weights, dtype=complex).reshape(-1)
        if not np.any(weights != 0):
            raise ValueError("A field event must have at least one nonzero weight.")
        if not np.all(np.isfinite(weights)):
            raise ValueError(f"The field event weights {weights} are not finite.")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "time", float(self.time))

    def __str__(self) -> str:
        name = self.label or "x"
        return f"{name}{'†' if self.daggered else ''}({self.time:g})"


@dataclasses.dataclass(frozen=True, eq=False)
class CorrelationSpec:
    """Normally ordered string of field events."""

    events: Tuple[FieldEvent, ...]

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        daggers = [event.daggered for event in events]
        if daggers != sorted(daggers, reverse=True):
            raise NotNormallyOrdered(f"The event string {self} has a daggered event to the right of an undaggered one.")

    def __str__(self) -> str:
        return "⟨" + " ".join(str(event) for event in self.events) + "⟩"

    @property
    def daggered(self) -> List[FieldEvent]:
        """Return the daggered events in string order."""
        return [event for event in self.events if event.daggered]

    @property
    def undaggered(self) -> List[FieldEvent]:
        """Return the undaggered events in string order."""
        return [event for event in self.events if not event.daggered]

    @property
    def is_balanced(self) -> bool:
        """Return whether the numbers of daggered and undaggered events are equal."""
        return len(self.daggered) == len(self.undaggered)


@dataclasses.dataclass(frozen=True)
class WickTerm:
    """A single pairing of the Wick expansion with its product of contractions.

    `pairing[k]` is the index, among the daggered events, of the event contracted with undaggered event k.
    """

    pairing: Tuple[int, ...]
    value: complex


def contraction_matrix(system: ModeSystem, spec: CorrelationSpec) -> np.ndarray:
    """Return K with K[u][d] = w_u · C(t_u, t_d) · w_d† for the undaggered events u and daggered events d."""
    for event in spec.events:
        if event.weights.size != system.dim:
            raise DimensionMismatch(f"The event {event} has {event.weights.size} weights, but the {system} has {system.dim} modes.")
    daggered, undaggered = spec.daggered, spec.undaggered
    matrix = np.empty((len(undaggered), len(daggered)), dtype=complex)
    for row, u_event in enumerate(undaggered):
        for col, d_event in enumerate(daggered):
            matrix[row, col] = u_event.weights @ pair_covariance(system, u_event.time, d_event.time) @ d_event.weights.conj()
    return matrix


def _check_size(spec: CorrelationSpec) -> int:
    num_pairs = len(spec.undaggered)
    if num_pairs > config.WICK_EVENTS_MAX:
        raise TooManyEvents(f"The correlator has {num_pairs} event pairs which exceeds {config.WICK_EVENTS_MAX}.")
    return num_pairs


def wick_correlation(system: ModeSystem, spec: CorrelationSpec) -> complex:
    """Return the stationary value of the normally ordered correlator.

    An unbalanced correlator is exactly zero.
    """
    if not spec.is_balanced:
        return 0j
    _check_size(spec)
    return permanent(contraction_matrix(system, spec))


def wick_terms(system: ModeSystem, spec: CorrelationSpec) -> List[WickTerm]:
    """Return the individual pairings of the Wick expansion, which sum to `wick_correlation`."""
    if not spec.is_balanced:
        return []
    num_pairs = _check_size(spec)
    matrix = contraction_matrix(system, spec)
    return [WickTerm(pairing=perm, value=complex(math.prod(matrix[row, col] for row, col in enumerate(perm)))) for perm in itertools.permutations(range(num_pairs))]


class G3Kind(str, enum.Enum):
    """Operator arrangement of a third-order mixed correlator."""

    X = "x"  # Ψ†(r1,t1) Ψ†(r2,t2) E⁻(r3,t3) E⁺(r3,t3) Ψ(r2,t2) Ψ(r1,t1)
    Y = "y"  # Ψ†(r1,t1) E⁻(r3,t2) Ψ†(r2,t3) Ψ(r2,t3) E⁺(r3,t2) Ψ(r1,t1)


def _check_g3_weights(system: ModeSystem, weights_r1: Any, weights_r2: Any, weights_r3: Any) -> None:
    for name, weights, kind in (("weights_r1", weights_r1, ModeKind.MATTER), ("weights_r2", weights_r2, ModeKind.MATTER), ("weights_r3", weights_r3, ModeKind.OPTICAL)):
        if np.size(weights) != system.dim:
            raise DimensionMismatch(f"The {name} has {np.size(weights)} entries, but the {system} has {system.dim} modes.")
        if not system.supports_only(weights, kind):
            raise ValueError(f"The {name} must select {kind.value} modes only.")


def g3_spec(kind: G3Kind, weights_r1: Any, weights_r2: Any, weights_r3: Any, t1: float, t2: float, t3: float) -> CorrelationSpec:
    """Return the event string of the third-order correlator of the given kind."""
    # pylint: disable=invalid-name
    psi1 = dict(weights=weights_r1, time=t1, label="Ψ1")
    if G3Kind(kind) == G3Kind.X:
        psi2, field = dict(weights=weights_r2, time=t2, label="Ψ2"), dict(weights=weights_r3, time=t3, label="E3")
        outer, inner = psi2, field
    else:
        psi2, field = dict(weights=weights_r2, time=t3, label="Ψ2"), dict(weights=weights_r3, time=t2, label="E3")
        outer, inner = field, psi2
    order = (psi1, outer, inner)
    events = [FieldEvent(daggered=True, **event) for event in order] + [FieldEvent(daggered=False, **event) for event in reversed(order)]
    return CorrelationSpec(tuple(events))


def g3_x(system: ModeSystem, weights_r1: Any, weights_r2: Any, weights_r3: Any, t1: float, t2: float, t3: float) -> complex:  # pylint: disable=invalid-name
    """Return ⟨Ψ†(r1,t1) Ψ†(r2,t2) E⁻(r3,t3) E⁺(r3,t3) Ψ(r2,t2) Ψ(r1,t1)⟩."""
    _check_g3_weights(system, weights_r1, weights_r2, weights_r3)
    return wick_correlation(system, g3_spec(G3Kind.X, weights_r1, weights_r2, weights_r3, t1, t2, t3))


def g3_y(system: ModeSystem, weights_r1: Any, weights_r2: Any, weights_r3: Any, t1: float, t2: float, t3: float) -> complex:  # pylint: disable=invalid-name
    """Return ⟨Ψ†(r1,t1) E⁻(r3,t2) Ψ†(r2,t3) Ψ(r2,t3) E⁺(r3,t2) Ψ(r1,t1)⟩."""
    _check_g3_weights(system, weights_r1, weights_r2, weights_r3)
    return wick_correlation(system, g3_spec(G3Kind.Y, weights_r1, weights_r2, weights_r3, t1, t2, t3))


def default_g3_weights(system: ModeSystem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return unit weights on the first matter mode at r1 and r2 and on the first optical mode at r3."""
    matter = system.unit_weights(ModeKind.MATTER)
    return matter, matter, system.unit_weights(ModeKind.OPTICAL)


def intensity(system: ModeSystem, weights: Any) -> float:
    """Return the stationary second-order self-correlation ⟨F† F⟩ of the field F = Σ_m w_m x_m."""
    weights = np.asarray(weights, dtype=complex)
    return float((weights @ steady_covariance(system) @ weights.conj()).real)


def unnormalized_g3(kind: G3Kind, system: ModeSystem, weights: Sequence[Any], tau1: float, tau2: float) -> complex:
    """Return the third-order correlator at t1 = 0, τ1 = t3 − t1 and τ2 = t2 − t1."""
    g3_function = g3_x if G3Kind(kind) == G3Kind.X else g3_y
    weights_r1, weights_r2, weights_r3 = weights
    return g3_function(system, weights_r1, weights_r2, weights_r3, 0.0, tau2, tau1)


def normalized_g3(kind: G3Kind, system: ModeSystem, weights: Sequence[Any], tau1: float, tau2: float) -> float:
    """Return the third-order correlator divided by the product of the stationary intensities at r1, r2 and r3."""
    if not (tau1 >= 0 and tau2 >= 0):
        raise ValueError(f"The delays must be nonnegative, but they are τ1={tau1} and τ2={tau2}.")
    denominator = math.prod(intensity(system, w) for w in weights)
    if not denominator > config.DENOMINATOR_FLOOR:
        raise ZeroDenominator(f"The stationary intensities at r1, r2 and r3 have the vanishing product {denominator:.3g}; the reservoirs are likely all in vacuum.")
    value = unnormalized_g3(kind, system, weights, tau1, tau2) / denominator
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        log.warning("The normalized g3_%s at τ1=%s and τ2=%s has an imaginary part of %.3g.", G3Kind(kind).value, tau1, tau2, value.imag)
    return float(value.real)


# pylint: disable=missing-class-docstring,missing-function-docstring
def reference_system() -> ModeSystem:
    return build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1.0)


def _events(*specs: Tuple[bool, Any, float]) -> CorrelationSpec:
    return CorrelationSpec(tuple(FieldEvent(daggered=d, weights=w, time=t) for d, w, t in specs))


class TestCorrelationSpec(unittest.TestCase):
    def test_not_normally_ordered(self):
        with self.assertRaises(NotNormallyOrdered):
            _events((False, [1, 0], 0), (True, [1, 0], 0))

    def test_event_validation(self):
        with self.assertRaises(ValueError):
            FieldEvent(daggered=True, weights=[0, 0], time=0)


class TestWickCorrelation(unittest.TestCase):
    def test_single_pair_thermal(self):
        system = reference_system()
        optical, matter = system.unit_weights(ModeKind.OPTICAL), system.unit_weights(ModeKind.MATTER)
        covariance = steady_covariance(system)
        self.assertAlmostEqual(wick_correlation(system, _events((True, matter, 1.0), (False, matter, 1.0))), covariance[1, 1], places=15)
        self.assertAlmostEqual(wick_correlation(system, _events((True, optical, 0.0), (False, matter, 2.0))), pair_covariance(system, 2.0, 0.0)[1, 0], places=15)

    def test_unbalanced(self):
        system = reference_system()
        spec = _events((True, [1, 0], 0), (True, [0, 1], 1), (False, [1, 0], 0))
        self.assertEqual(wick_correlation(system, spec), 0)
        self.assertEqual(wick_terms(system, spec), [])

    def test_vacuum(self):
        system = build_two_mode_example(0.15, 0.25, 0, 0, 1)
        spec = _events((True, [1, 1j], 0), (True, [0, 1], 1.5), (False, [1, 0], 0.2), (False, [0.5, 1], 3))
        self.assertEqual(wick_correlation(system, spec), 0)

    def test_too_many(self):
        system = reference_system()
        spec = _events(*([(True, [1, 0], 0)] * 9 + [(False, [1, 0], 0)] * 9))
        with self.assertRaises(TooManyEvents):
            wick_correlation(system, spec)

    def test_weight_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            wick_correlation(reference_system(), _events((True, [1, 0, 0], 0), (False, [1, 0, 0], 0)))

    def test_permutation_sum(self):
        from .kernel import random_stable_system  # pylint: disable=import-outside-toplevel

        rng = np.random.default_rng(8)
        for num_pairs in range(1, 5):
            for _ in range(5):
                system = random_stable_system(rng, int(rng.integers(2, 5)))
                specs = [(True, rng.normal(size=system.dim) + 1j * rng.normal(size=system.dim), rng.uniform(0, 3)) for _ in range(num_pairs)]
                specs += [(False, rng.normal(size=system.dim) + 1j * rng.normal(size=system.dim), rng.uniform(0, 3)) for _ in range(num_pairs)]
                spec = _events(*specs)
                matrix = contraction_matrix(system, spec)
                explicit = sum(math.prod(matrix[u, d] for u, d in enumerate(perm)) for perm in itertools.permutations(range(num_pairs)))
                value = wick_correlation(system, spec)
                self.assertLessEqual(abs(value - explicit), 1e-12 * abs(explicit))
                self.assertAlmostEqual(sum(term.value for term in wick_terms(system, spec)), value, delta=1e-12 * abs(value))

    def test_six_term_structure(self):
        system = reference_system()
        t1, t2, t3 = 0.0, 0.4, 1.1  # pylint: disable=invalid-name
        o, m = 0, 1  # pylint: disable=invalid-name
        c = lambda t, s, u, d: pair_covariance(system, t, s)[u, d]  # noqa: E731  # pylint: disable=unnecessary-lambda-assignment
        expected = [
            c(t3, t1, o, m) * c(t2, t2, m, m) * c(t1, t3, m, o),
            c(t3, t1, o, m) * c(t1, t2, m, m) * c(t2, t3, m, o),
            c(t2, t1, m, m) * c(t3, t2, o, m) * c(t1, t3, m, o),
            c(t2, t1, m, m) * c(t1, t2, m, m) * c(t3, t3, o, o),
            c(t1, t1, m, m) * c(t3, t2, o, m) * c(t2, t3, m, o),
            c(t1, t1, m, m) * c(t2, t2, m, m) * c(t3, t3, o, o),
        ]
        spec = g3_spec(G3Kind.X, *default_g3_weights(system), t1, t2, t3)
        terms = wick_terms(system, spec)
        self.assertEqual(len(terms), 6)
        for value in expected:
            self.assertTrue(any(abs(term.value - value) <= 1e-15 for term in terms), value)
        self.assertAlmostEqual(sum(expected), g3_x(system, *default_g3_weights(system), t1, t2, t3), delta=1e-15)


class TestG3(unittest.TestCase):
    def test_decoupled_factorization(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 0)
        weights = default_g3_weights(system)
        for function in (g3_x, g3_y):
            value = function(system, *weights, 0.7, 0.7, 0.7)
            self.assertAlmostEqual(value, 2 * 0.1**2 * 0.01, delta=1e-15)

    def test_vacuum(self):
        system = build_two_mode_example(0.15, 0.25, 0, 0, 1)
        weights = default_g3_weights(system)
        self.assertEqual(g3_x(system, *weights, 0, 1, 2), 0)
        self.assertEqual(g3_y(system, *weights, 0, 1, 2), 0)

    def test_equal_times(self):
        system = reference_system()
        weights = default_g3_weights(system)
        self.assertAlmostEqual(g3_x(system, *weights, 1.3, 1.3, 1.3), g3_y(system, *weights, 1.3, 1.3, 1.3), delta=1e-15)

    def test_hermiticity_realization(self):
        from .kernel import random_stable_system  # pylint: disable=import-outside-toplevel

        rng = np.random.default_rng(9)
        for _ in range(20):
            system = random_stable_system(rng, int(rng.integers(2, 6)))
            weights = []
            for kind in (ModeKind.MATTER, ModeKind.MATTER, ModeKind.OPTICAL):
                mask = np.array([label == kind for label in system.labels])
                weights.append(np.where(mask, rng.normal(size=system.dim) + 1j * rng.normal(size=system.dim), 0))
            if not np.any(weights[0]):
                continue  # No matter modes.
            times = rng.uniform(0, 4, size=3)
            for function in (g3_x, g3_y):
                value = function(system, *weights, *times)
                self.assertLessEqual(abs(value.imag), 1e-9 * abs(value.real))
                self.assertGreaterEqual(value.real, -1e-9)

    def test_weight_support(self):
        system = reference_system()
        optical, matter = system.unit_weights(ModeKind.OPTICAL), system.unit_weights(ModeKind.MATTER)
        with self.assertRaises(ValueError):
            g3_x(system, optical, matter, optical, 0, 0, 0)
        with self.assertRaises(ValueError):
            g3_y(system, matter, matter, matter, 0, 0, 0)


class TestNormalizedG3(unittest.TestCase):
    def test_thermal_bunching(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 0)
        self.assertAlmostEqual(normalized_g3(G3Kind.X, system, default_g3_weights(system), 0, 0), 2, places=12)

    def test_large_delays(self):
        system = reference_system()
        weights = default_g3_weights(system)
        for kind in G3Kind:
            self.assertAlmostEqual(normalized_g3(kind, system, weights, 400, 200), 1, delta=1e-3)
            self.assertAlmostEqual(normalized_g3(kind, system, weights, 200, 400), 1, delta=1e-3)

    def test_large_equal_delays(self):
        system = reference_system()
        covariance = steady_covariance(system)
        optical_matter = abs(covariance[0, 1]) ** 2 / (covariance[0, 0].real * covariance[1, 1].real)
        self.assertGreater(optical_matter, 1e-3)  # The equal-time optical and matter fields stay correlated.
        for kind in G3Kind:
            self.assertAlmostEqual(normalized_g3(kind, system, default_g3_weights(system), 50, 50), 1 + optical_matter, delta=1e-3)

    def test_equal_time_diagonal(self):
        system = reference_system()
        weights = default_g3_weights(system)
        for tau in (0, 1, 2, 5, 10):
            self.assertAlmostEqual(normalized_g3(G3Kind.X, system, weights, tau, tau), normalized_g3(G3Kind.Y, system, weights, tau, tau), delta=1e-9)

    def test_bunching_like(self):
        system = reference_system()
        weights = default_g3_weights(system)
        for tau1 in (1, 2, 5):
            self.assertGreater(normalized_g3(G3Kind.X, system, weights, tau1, 0), normalized_g3(G3Kind.X, system, weights, tau1, 10))

    def test_nonnegative(self):
        system = reference_system()
        weights = default_g3_weights(system)
        for tau1, tau2 in np.random.default_rng(10).uniform(0, 10, size=(20, 2)):
            for kind in G3Kind:
                self.assertGreaterEqual(normalized_g3(kind, system, weights, tau1, tau2), 0)

    def test_zero_denominator(self):
        system = build_two_mode_example(0.15, 0.25, 0, 0, 1)
        with self.assertRaises(ZeroDenominator):
            normalized_g3(G3Kind.X, system, default_g3_weights(system), 1, 0.5)

    def test_negative_delay(self):
        with self.assertRaises(ValueError):
            normalized_g3(G3Kind.X, reference_system(), default_g3_weights(reference_system()), -1, 0)


# python -m unittest -v mutualcoherence.wick
