"""Gated multi-detector schemes and the correlators and exchange terms they measure.

Detectors are switched on together and switched off one by one. The gate-off ordering selects the single operator ordering whose times increase from the outside of the string to its inside.
"""
import dataclasses
import enum
import itertools
import logging
import math
import unittest
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import config
from .errors import InvalidRankPermutation, TermCountOverflow, UnsupportedDetectorCount
from .fermi import DeltaTerm, FermiOpString, annihilate, create, fermi_vacuum_expectation
from .system import ModeKind, ModeSystem, build_two_mode_example
from .wick import CorrelationSpec, FieldEvent, G3Kind, g3_spec, wick_correlation

log = logging.getLogger(__name__)


class DetectorKind(str, enum.Enum):
    """Kind of a detector."""

    MAXWELL = "maxwell"  # Photodetector measuring E⁻ E⁺.
    SCHRODINGER = "schrodinger"  # Photoionization detector measuring Ψ† Ψ.

    @property
    def mode_kind(self) -> ModeKind:
        """Return the kind of mode the detector is sensitive to."""
        return ModeKind.OPTICAL if self == DetectorKind.MAXWELL else ModeKind.MATTER


@dataclasses.dataclass(frozen=True)
class DetectorSpec:
    """A detector at a labeled position with the rank of its gate-off time."""

    id: str  # pylint: disable=invalid-name
    kind: DetectorKind
    position_label: str
    gate_rank: int

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "kind", DetectorKind(self.kind))
        if not self.position_label:
            raise ValueError(f"The detector {self.id} has no position label.")

    @property
    def time_symbol(self) -> str:
        """Return the symbol of the gate-off time."""
        return f"t{self.id}"


@dataclasses.dataclass(frozen=True)
class DetectionPlan:
    """Detectors whose gate ranks form a permutation of 1..N+M."""

    detectors: Tuple[DetectorSpec, ...]

    def __post_init__(self):
        detectors = tuple(self.detectors)
        object.__setattr__(self, "detectors", detectors)
        if len({detector.id for detector in detectors}) != len(detectors):
            raise ValueError(f"The detector ids {[d.id for d in detectors]} are not unique.")
        ranks = sorted(detector.gate_rank for detector in detectors)
        if ranks != list(range(1, len(detectors) + 1)):
            raise InvalidRankPermutation(f"The gate ranks {[d.gate_rank for d in detectors]} are not a permutation of 1..{len(detectors)}.")

    def __str__(self) -> str:
        return f"plan of {self.num_maxwell} Maxwell and {self.num_schrodinger} Schrödinger detectors"

    def of_kind(self, kind: DetectorKind) -> List[DetectorSpec]:
        """Return the detectors of the given kind in plan order."""
        return [detector for detector in self.detectors if detector.kind == kind]

    @property
    def num_maxwell(self) -> int:
        """Return the number N of Maxwell detectors."""
        return len(self.of_kind(DetectorKind.MAXWELL))

    @property
    def num_schrodinger(self) -> int:
        """Return the number M of Schrödinger detectors."""
        return len(self.of_kind(DetectorKind.SCHRODINGER))

    def by_rank(self) -> List[DetectorSpec]:
        """Return the detectors sorted by gate rank."""
        return sorted(self.detectors, key=lambda detector: detector.gate_rank)

    def with_ranks(self, ranks: Sequence[int]) -> "DetectionPlan":
        """Return the plan with the given gate ranks assigned in plan order."""
        if len(ranks) != len(self.detectors):
            raise InvalidRankPermutation(f"The {len(ranks)} gate ranks do not match the {len(self.detectors)} detectors.")
        return DetectionPlan(tuple(dataclasses.replace(detector, gate_rank=rank) for detector, rank in zip(self.detectors, ranks)))

    def all_gatings(self) -> List["DetectionPlan"]:
        """Return the plans of all (N+M)! gate-off orderings of the detectors."""
        count_amplitude_terms(self.num_maxwell, self.num_schrodinger)
        return [self.with_ranks(ranks) for ranks in itertools.permutations(range(1, len(self.detectors) + 1))]


class OperatorKind(str, enum.Enum):
    """Symbolic field operator."""

    E_MINUS = "E-"
    E_PLUS = "E+"
    PSI_DAGGER = "Psi+"
    PSI = "Psi"

    @property
    def daggered(self) -> bool:
        """Return whether the operator is a creation or negative-frequency operator."""
        return self in (OperatorKind.E_MINUS, OperatorKind.PSI_DAGGER)

    @property
    def conjugate(self) -> "OperatorKind":
        """Return the adjoint operator."""
        return _CONJUGATES[self]

    @property
    def detector_kind(self) -> DetectorKind:
        """Return the kind of detector that measures the operator."""
        return DetectorKind.MAXWELL if self in (OperatorKind.E_MINUS, OperatorKind.E_PLUS) else DetectorKind.SCHRODINGER


_CONJUGATES = {
    OperatorKind.E_MINUS: OperatorKind.E_PLUS,
    OperatorKind.E_PLUS: OperatorKind.E_MINUS,
    OperatorKind.PSI_DAGGER: OperatorKind.PSI,
    OperatorKind.PSI: OperatorKind.PSI_DAGGER,
}
_DAGGERED_KIND = {DetectorKind.MAXWELL: OperatorKind.E_MINUS, DetectorKind.SCHRODINGER: OperatorKind.PSI_DAGGER}


@dataclasses.dataclass(frozen=True)
class FieldOperator:
    """Symbolic field operator at a labeled position and gate-time symbol."""

    kind: OperatorKind
    position_label: str
    time_symbol: str

    def __str__(self) -> str:
        return f"{self.kind.value}[{self.position_label}@{self.time_symbol}]"

    @property
    def conjugate(self) -> "FieldOperator":
        """Return the adjoint operator."""
        return dataclasses.replace(self, kind=self.kind.conjugate)


@dataclasses.dataclass(frozen=True)
class OperatorString:
    """Ordered product of symbolic field operators.

    Its canonical text form joins the operators with single spaces, e.g. `E-[r1@t1] E+[r1@t1]`.
    """

    operators: Tuple[FieldOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))

    def __str__(self) -> str:
        return " ".join(str(operator) for operator in self.operators)

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def left(self) -> Tuple[FieldOperator, ...]:
        """Return the left half."""
        return self.operators[: len(self) // 2]

    @property
    def right(self) -> Tuple[FieldOperator, ...]:
        """Return the right half."""
        return self.operators[len(self) // 2 :]

    @property
    def is_mirror(self) -> bool:
        """Return whether the right half is the reversed adjoint of the left half."""
        return (len(self) % 2 == 0) and all(op.kind.daggered for op in self.left) and tuple(op.conjugate for op in reversed(self.right)) == self.left

    def replace_times(self, mapping: Mapping[Tuple[int, str], str]) -> "OperatorString":
        """Return the string with the time symbols of the operators at the given (index, current symbol) keys replaced."""
        operators = list(self.operators)
        for (index, symbol), new_symbol in mapping.items():
            if operators[index].time_symbol != symbol:
                raise ValueError(f"The operator {operators[index]} at index {index} does not have time symbol {symbol}.")
            operators[index] = dataclasses.replace(operators[index], time_symbol=new_symbol)
        return OperatorString(tuple(operators))


class ContributionClass(str, enum.Enum):
    """Class of a contribution to the joint detection signal."""

    DIRECT = "direct"
    BOSON_EXCHANGE = "boson_exchange"  # Both the electrons and the ions are exchanged.
    FERMION_CROSS = "fermion_cross"  # Either the electrons or the ions are exchanged.


@dataclasses.dataclass(frozen=True)
class ContributionTerm:
    """Symbolic contribution with its efficiency names, operator string and numeric prefactor and sign."""

    term_class: ContributionClass
    efficiency_factors: Tuple[str, ...]
    operator_string: OperatorString
    survives_counting_rate: bool
    prefactor: int = 1
    sign: int = 1

    def __post_init__(self):
        if (self.term_class == ContributionClass.FERMION_CROSS) and self.survives_counting_rate:
            raise ValueError("A fermion cross term cannot contribute to the counting rate.")
        if self.sign not in (-1, 1):
            raise ValueError(f"The sign must be ±1, but it is {self.sign}.")

    def __str__(self) -> str:
        sign = "+" if self.sign > 0 else "-"
        prefactor = f"{self.prefactor}·" if self.prefactor != 1 else ""
        return f"{sign}{prefactor}{'·'.join(self.efficiency_factors)}·⟨{self.operator_string}⟩"


def count_amplitude_terms(num_maxwell: int, num_schrodinger: int) -> int:
    """Return the number (N+M)! of orderings in the detection amplitude of N Maxwell and M Schrödinger detectors."""
    if (num_maxwell < 0) or (num_schrodinger < 0):
        raise ValueError(f"The detector counts must be nonnegative, but they are {num_maxwell} and {num_schrodinger}.")
    if (order := num_maxwell + num_schrodinger) > config.AMPLITUDE_ORDER_MAX:
        raise TermCountOverflow(f"The detector count {order} exceeds {config.AMPLITUDE_ORDER_MAX}.")
    return math.factorial(order)


def select_ordering(plan: DetectionPlan) -> OperatorString:
    """Return the operator string selected by the gate-off ordering of the plan.

    The daggered half lists detectors by ascending gate rank, and the undaggered half is its reversed adjoint.
    """
    left = [FieldOperator(_DAGGERED_KIND[detector.kind], detector.position_label, detector.time_symbol) for detector in plan.by_rank()]
    return OperatorString(tuple(left) + tuple(operator.conjugate for operator in reversed(left)))


def _efficiency(name: str, *labels: str) -> str:
    return f"{name}({','.join(labels)})"


def direct_contribution(plan: DetectionPlan) -> ContributionTerm:
    """Return the direct term of the plan, weighted by the efficiency of every detector at its own position."""
    return ContributionTerm(
        term_class=ContributionClass.DIRECT,
        efficiency_factors=tuple(_efficiency("eta_m", detector.position_label) for detector in plan.of_kind(DetectorKind.MAXWELL))
        + tuple(_efficiency("eta_s", detector.position_label) for detector in plan.of_kind(DetectorKind.SCHRODINGER)),
        operator_string=select_ordering(plan),
        survives_counting_rate=True,
    )


def enumerate_contributions(plan: DetectionPlan, distinguishable: bool = False) -> List[ContributionTerm]:
    """Return the contributions to the broadband joint detection signal of the plan.

    An indistinguishable pair of Schrödinger detectors yields direct, boson exchange and fermion cross terms.
    A distinguishable pair, a single Schrödinger detector or none yields the direct term only.
    """
    if (num_schrodinger := plan.num_schrodinger) > 2:
        raise UnsupportedDetectorCount(f"The {plan} has {num_schrodinger} Schrödinger detectors, but the exchange contributions are derived for at most 2.")
    maxwell_factors = tuple(_efficiency("eta_m", detector.position_label) for detector in plan.of_kind(DetectorKind.MAXWELL))
    schrodinger = plan.of_kind(DetectorKind.SCHRODINGER)
    direct = direct_contribution(plan)
    direct_string = direct.operator_string
    terms = [direct]
    if distinguishable or num_schrodinger < 2:
        return terms

    first, second = schrodinger
    psi_indices = {op.time_symbol: index for index, op in enumerate(direct_string.operators) if op.kind == OperatorKind.PSI}
    exchange_string = direct_string.replace_times(
        {(psi_indices[first.time_symbol], first.time_symbol): second.time_symbol, (psi_indices[second.time_symbol], second.time_symbol): first.time_symbol}
    )
    terms.append(
        ContributionTerm(
            term_class=ContributionClass.BOSON_EXCHANGE,
            efficiency_factors=maxwell_factors + (_efficiency("eta_s", first.position_label, second.position_label), _efficiency("eta_s", second.position_label, first.position_label)),
            operator_string=exchange_string,
            survives_counting_rate=True,
        )
    )

    earlier = min(schrodinger, key=lambda detector: detector.gate_rank)
    collapse = {(index, op.time_symbol): earlier.time_symbol for index, op in enumerate(direct_string.operators) if op.kind.detector_kind == DetectorKind.SCHRODINGER}
    terms.append(
        ContributionTerm(
            term_class=ContributionClass.FERMION_CROSS,
            efficiency_factors=maxwell_factors + (_efficiency("eta_x", first.position_label, second.position_label),),
            operator_string=direct_string.replace_times(collapse),
            survives_counting_rate=False,
            prefactor=2,
            sign=-1,
        )
    )
    log.debug("Enumerated %s contributions for the %s.", len(terms), plan)
    return terms


def electron_pair_overlap(plan: DetectionPlan) -> List[DeltaTerm]:
    """Return the vacuum overlap of the electron pair released at the two Schrödinger detectors, as momentum and spin deltas.

    Primed labels belong to the emitted pair and unprimed labels to the detected pair. The direct overlap is positive and the exchanged one negative.
    """
    if (num_schrodinger := plan.num_schrodinger) != 2:
        raise UnsupportedDetectorCount(f"The {plan} has {num_schrodinger} Schrödinger detectors, but an electron pair needs exactly 2.")
    first, second = (detector.id for detector in sorted(plan.of_kind(DetectorKind.SCHRODINGER), key=lambda detector: detector.gate_rank))
    string = FermiOpString(
        (annihilate(f"q{first}", f"s{first}"), annihilate(f"q{second}", f"s{second}"), create(f"q{second}'", f"s{second}'"), create(f"q{first}'", f"s{first}'"))
    )
    return fermi_vacuum_expectation(string)


def counting_rate_terms(plan: DetectionPlan, distinguishable: bool = False) -> List[ContributionTerm]:
    """Return the contributions that survive in the joint counting rate."""
    return [term for term in enumerate_contributions(plan, distinguishable) if term.survives_counting_rate]


def contribution_correlation(term: ContributionTerm, system: ModeSystem, positions: Mapping[str, Sequence[complex]], times: Mapping[str, float]) -> CorrelationSpec:
    """Return the correlator of the operator string of the term.

    `positions` maps each position label to the mode-function weights there, and `times` maps each time symbol to its value.
    """
    events = []
    for operator in term.operator_string.operators:
        if (weights := positions.get(operator.position_label)) is None:
            raise ValueError(f"The position {operator.position_label} has no mode weights.")
        if (time := times.get(operator.time_symbol)) is None:
            raise ValueError(f"The time symbol {operator.time_symbol} has no value.")
        if len(weights) != system.dim:
            raise ValueError(f"The weights at {operator.position_label} have {len(weights)} entries, but the {system} has {system.dim} modes.")
        if not system.supports_only(weights, operator.kind.detector_kind.mode_kind):
            raise ValueError(f"The weights at {operator.position_label} must select {operator.kind.detector_kind.mode_kind.value} modes only.")
        events.append(FieldEvent(daggered=operator.kind.daggered, weights=weights, time=time, label=str(operator)))
    return CorrelationSpec(tuple(events))


def contribution_value(
    term: ContributionTerm,
    system: ModeSystem,
    positions: Mapping[str, Sequence[complex]],
    times: Mapping[str, float],
    efficiencies: Optional[Mapping[str, float]] = None,
) -> complex:
    """Return sign · prefactor · Π efficiencies · correlator of the term.

    Efficiencies missing from the given mapping are taken as 1.
    """
    efficiencies = efficiencies or {}
    factor = term.sign * term.prefactor * math.prod(efficiencies.get(name, 1.0) for name in term.efficiency_factors)
    return factor * wick_correlation(system, contribution_correlation(term, system, positions, times))


# pylint: disable=missing-class-docstring,missing-function-docstring
def _plan(ranks: Dict[str, int]) -> DetectionPlan:
    kinds = {"1": DetectorKind.MAXWELL, "2": DetectorKind.MAXWELL, "3": DetectorKind.SCHRODINGER, "4": DetectorKind.SCHRODINGER}
    return DetectionPlan(tuple(DetectorSpec(id_, kinds[id_], f"r{id_}", rank) for id_, rank in ranks.items()))


ASCENDING_PLAN_STRING = "E-[r1@t1] E-[r2@t2] Psi+[r3@t3] Psi+[r4@t4] Psi[r4@t4] Psi[r3@t3] E+[r2@t2] E+[r1@t1]"
INTERLEAVED_PLAN_STRING = "Psi+[r3@t3] E-[r1@t1] Psi+[r4@t4] E-[r2@t2] E+[r2@t2] Psi[r4@t4] E+[r1@t1] Psi[r3@t3]"


class TestDetectionPlan(unittest.TestCase):
    def test_invalid_ranks(self):
        with self.assertRaises(InvalidRankPermutation):
            _plan({"1": 1, "2": 1, "3": 2, "4": 3})
        with self.assertRaises(InvalidRankPermutation):
            _plan({"1": 0, "2": 1, "3": 2, "4": 3})

    def test_duplicate_ids(self):
        with self.assertRaises(ValueError):
            DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 1), DetectorSpec("1", DetectorKind.MAXWELL, "r2", 2)))

    def test_counts(self):
        plan = _plan({"1": 1, "2": 2, "3": 3, "4": 4})
        self.assertEqual((plan.num_maxwell, plan.num_schrodinger), (2, 2))
        self.assertEqual(len(plan.all_gatings()), 24)


class TestCountAmplitudeTerms(unittest.TestCase):
    def test_values(self):
        self.assertEqual(count_amplitude_terms(2, 2), 24)
        self.assertEqual(count_amplitude_terms(0, 1), 1)
        self.assertEqual(count_amplitude_terms(3, 2), 120)
        self.assertEqual(count_amplitude_terms(0, 0), 1)

    def test_overflow(self):
        self.assertEqual(count_amplitude_terms(6, 6), math.factorial(12))
        with self.assertRaises(TermCountOverflow):
            count_amplitude_terms(7, 6)


class TestSelectOrdering(unittest.TestCase):
    def test_ascending(self):
        self.assertEqual(str(select_ordering(_plan({"1": 1, "2": 2, "3": 3, "4": 4}))), ASCENDING_PLAN_STRING)

    def test_interleaved(self):
        self.assertEqual(str(select_ordering(_plan({"1": 2, "2": 4, "3": 1, "4": 3}))), INTERLEAVED_PLAN_STRING)

    def test_single_maxwell(self):
        plan = DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 1),))
        self.assertEqual(str(select_ordering(plan)), "E-[r1@t1] E+[r1@t1]")

    def test_distinct_gatings(self):
        plan = _plan({"1": 1, "2": 2, "3": 3, "4": 4})
        strings = {str(select_ordering(gating)) for gating in plan.all_gatings()}
        self.assertEqual(len(strings), count_amplitude_terms(2, 2))

    def test_mirror(self):
        for gating in _plan({"1": 1, "2": 2, "3": 3, "4": 4}).all_gatings():
            ordering = select_ordering(gating)
            self.assertTrue(ordering.is_mirror)
            self.assertEqual([op.time_symbol for op in ordering.left], [d.time_symbol for d in gating.by_rank()])


class TestEnumerateContributions(unittest.TestCase):
    def test_indistinguishable(self):
        terms = enumerate_contributions(_plan({"1": 1, "2": 2, "3": 3, "4": 4}))
        self.assertEqual([term.term_class for term in terms], [ContributionClass.DIRECT, ContributionClass.BOSON_EXCHANGE, ContributionClass.FERMION_CROSS])
        direct, exchange, cross = terms
        self.assertEqual(direct.efficiency_factors, ("eta_m(r1)", "eta_m(r2)", "eta_s(r3)", "eta_s(r4)"))
        self.assertEqual(exchange.efficiency_factors, ("eta_m(r1)", "eta_m(r2)", "eta_s(r3,r4)", "eta_s(r4,r3)"))
        self.assertEqual(cross.efficiency_factors, ("eta_m(r1)", "eta_m(r2)", "eta_x(r3,r4)"))
        self.assertEqual((cross.prefactor, cross.sign, cross.survives_counting_rate), (2, -1, False))
        self.assertEqual(str(direct.operator_string), ASCENDING_PLAN_STRING)
        self.assertEqual(str(exchange.operator_string), "E-[r1@t1] E-[r2@t2] Psi+[r3@t3] Psi+[r4@t4] Psi[r4@t3] Psi[r3@t4] E+[r2@t2] E+[r1@t1]")
        self.assertEqual(str(cross.operator_string), "E-[r1@t1] E-[r2@t2] Psi+[r3@t3] Psi+[r4@t3] Psi[r4@t3] Psi[r3@t3] E+[r2@t2] E+[r1@t1]")

    def test_distinguishable_subset(self):
        for gating in _plan({"1": 1, "2": 2, "3": 3, "4": 4}).all_gatings():
            distinguishable = enumerate_contributions(gating, distinguishable=True)
            self.assertEqual(len(distinguishable), 1)
            self.assertEqual(distinguishable[0], enumerate_contributions(gating)[0])

    def test_counting_rate(self):
        plan = _plan({"1": 1, "2": 2, "3": 3, "4": 4})
        self.assertEqual([term.term_class for term in counting_rate_terms(plan)], [ContributionClass.DIRECT, ContributionClass.BOSON_EXCHANGE])
        self.assertEqual(len(counting_rate_terms(plan, distinguishable=True)), 1)

    def test_direct_contribution(self):
        plan = DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 2), DetectorSpec("2", DetectorKind.MAXWELL, "r2", 1)))
        term = direct_contribution(plan)
        self.assertEqual(term.efficiency_factors, ("eta_m(r1)", "eta_m(r2)"))
        self.assertEqual(str(term.operator_string), "E-[r2@t2] E-[r1@t1] E+[r1@t1] E+[r2@t2]")
        self.assertEqual(direct_contribution(_plan({"1": 1, "2": 2, "3": 3, "4": 4})), enumerate_contributions(_plan({"1": 1, "2": 2, "3": 3, "4": 4}))[0])

    def test_fewer_schrodinger(self):
        for count in (0, 1):
            plan = DetectionPlan(tuple(DetectorSpec(str(i), DetectorKind.SCHRODINGER, f"r{i}", i) for i in range(1, count + 1)) + (DetectorSpec("m", DetectorKind.MAXWELL, "rm", count + 1),))
            for distinguishable in (False, True):
                self.assertEqual(enumerate_contributions(plan, distinguishable), [direct_contribution(plan)])
                self.assertEqual(counting_rate_terms(plan, distinguishable), [direct_contribution(plan)])

    def test_maxwell_only(self):
        plan = DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 2), DetectorSpec("2", DetectorKind.MAXWELL, "r2", 1)))
        terms = counting_rate_terms(plan)
        self.assertEqual([term.term_class for term in terms], [ContributionClass.DIRECT])
        self.assertEqual(terms[0].efficiency_factors, ("eta_m(r1)", "eta_m(r2)"))

    def test_electron_pair_overlap(self):
        terms = electron_pair_overlap(_plan({"1": 2, "2": 4, "3": 1, "4": 3}))
        self.assertEqual([str(term) for term in terms], ["+δ(q3,q3')δ(q4,q4')δ(s3,s3')δ(s4,s4')", "-δ(q3,q4')δ(q4,q3')δ(s3,s4')δ(s4,s3')"])
        self.assertEqual([term.sign for term in electron_pair_overlap(_plan({"1": 1, "2": 2, "3": 4, "4": 3}))], [1, -1])
        with self.assertRaises(UnsupportedDetectorCount):
            electron_pair_overlap(DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 1),)))

    def test_too_many_schrodinger(self):
        plan = DetectionPlan(tuple(DetectorSpec(str(i), DetectorKind.SCHRODINGER, f"r{i}", i) for i in range(1, 4)))
        with self.assertRaises(UnsupportedDetectorCount):
            enumerate_contributions(plan)
        with self.assertRaises(UnsupportedDetectorCount):
            counting_rate_terms(plan, distinguishable=True)


class TestContributionValue(unittest.TestCase):
    def test_g3_pattern(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        optical, matter = system.unit_weights(ModeKind.OPTICAL), system.unit_weights(ModeKind.MATTER)
        plan = DetectionPlan(
            (
                DetectorSpec("1", DetectorKind.SCHRODINGER, "r1", 1),
                DetectorSpec("2", DetectorKind.SCHRODINGER, "r2", 2),
                DetectorSpec("3", DetectorKind.MAXWELL, "r3", 3),
            )
        )
        times = {"t1": 0.0, "t2": 0.5, "t3": 1.0}
        direct = enumerate_contributions(plan, distinguishable=True)[0]
        positions = {"r1": matter, "r2": matter, "r3": optical}
        expected = wick_correlation(system, g3_spec(G3Kind.X, matter, matter, optical, 0.0, 0.5, 1.0))
        self.assertAlmostEqual(contribution_value(direct, system, positions, times, {"eta_m(r3)": 0.5}), 0.5 * expected, delta=1e-15)

    def test_cross_sign(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        matter = system.unit_weights(ModeKind.MATTER)
        plan = DetectionPlan((DetectorSpec("1", DetectorKind.SCHRODINGER, "r1", 1), DetectorSpec("2", DetectorKind.SCHRODINGER, "r2", 2)))
        cross = enumerate_contributions(plan)[2]
        value = contribution_value(cross, system, {"r1": matter, "r2": matter}, {"t1": 0.0, "t2": 2.0})
        occupation = wick_correlation(system, CorrelationSpec((FieldEvent(True, matter, 0.0), FieldEvent(False, matter, 0.0))))
        self.assertAlmostEqual(value, -2 * 2 * occupation**2, delta=1e-15)

    def test_missing_position(self):
        system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        term = direct_contribution(DetectionPlan((DetectorSpec("1", DetectorKind.MAXWELL, "r1", 1),)))
        with self.assertRaises(ValueError):
            contribution_correlation(term, system, {}, {"t1": 0.0})
        with self.assertRaises(ValueError):
            contribution_correlation(term, system, {"r1": system.unit_weights(ModeKind.MATTER)}, {"t1": 0.0})
        np.testing.assert_array_equal(contribution_correlation(term, system, {"r1": [1, 0]}, {"t1": 0.0}).events[0].weights, [1, 0])


# python -m unittest -v mutualcoherence.detection
