"""Vacuum expectation values of strings of labeled fermion operators.

Labels are kept symbolic, so that a value is a signed sum of products of Kronecker deltas between operator labels.
"""
import dataclasses
import logging
import math
import unittest
from typing import List, Sequence, Tuple

from . import config
from .errors import StringTooLong

log = logging.getLogger(__name__)

LABEL_KINDS = ("momentum", "spin", "channel")


@dataclasses.dataclass(frozen=True)
class FermiOp:
    """Fermion creation or annihilation operator with a momentum tag and optional spin and channel tags."""

    created: bool
    momentum: str
    spin: str = ""
    channel: str = ""

    def __post_init__(self):
        if not self.momentum:
            raise ValueError("A fermion operator must have a momentum tag.")

    def __str__(self) -> str:
        labels = ",".join(label for label in self.labels if label)
        return f"a{'†' if self.created else ''}({labels})"

    @property
    def labels(self) -> Tuple[str, str, str]:
        """Return the tags in the order momentum, spin, channel."""
        return self.momentum, self.spin, self.channel


def create(momentum: str, spin: str = "", channel: str = "") -> FermiOp:
    """Return a creation operator."""
    return FermiOp(True, momentum, spin, channel)


def annihilate(momentum: str, spin: str = "", channel: str = "") -> FermiOp:
    """Return an annihilation operator."""
    return FermiOp(False, momentum, spin, channel)


@dataclasses.dataclass(frozen=True)
class FermiOpString:
    """Ordered product of fermion operators sharing the same set of tag kinds."""

    ops: Tuple[FermiOp, ...]

    def __post_init__(self):
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        if len({tuple(bool(label) for label in op.labels) for op in ops}) > 1:
            raise ValueError(f"The operators of {self} do not share the same tag kinds.")

    def __str__(self) -> str:
        return " ".join(str(op) for op in self.ops)


@dataclasses.dataclass(frozen=True)
class Delta:
    """Kronecker delta between two labels."""

    first: str
    second: str

    def __str__(self) -> str:
        return f"δ({self.first},{self.second})"


@dataclasses.dataclass(frozen=True)
class DeltaTerm:
    """Signed product of Kronecker deltas."""

    sign: int
    deltas: Tuple[Delta, ...]

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + "".join(str(delta) for delta in self.deltas)


def _contractions(ops: Sequence[FermiOp]) -> List[Tuple[int, List[Tuple[FermiOp, FermiOp]]]]:
    """Return the signed lists of (annihilator, creator) pairs that contract the string on the vacuum."""
    if not ops:
        return [(1, [])]
    head, tail = ops[0], ops[1:]
    if head.created:
        return []  # ⟨0| a† = 0
    contractions = []
    for index, op in enumerate(tail):
        if not op.created:
            continue
        sign = -1 if index % 2 else 1  # Anticommuting the head past `index` operators.
        for sub_sign, pairs in _contractions(tail[:index] + tail[index + 1 :]):
            contractions.append((sign * sub_sign, [(head, op), *pairs]))
    return contractions


def fermi_vacuum_expectation(string: FermiOpString) -> List[DeltaTerm]:
    """Return the vacuum expectation value of the string as signed products of label deltas.

    Each term contracts every annihilator with a creator to its right. Within a term, the deltas are grouped by tag kind in the order momentum, spin, channel.
    Positive terms are listed first. An empty list means the value is zero.
    """
    if len(string.ops) > config.FERMI_STRING_LEN_MAX:
        raise StringTooLong(f"The fermion string has {len(string.ops)} operators which exceeds {config.FERMI_STRING_LEN_MAX}.")
    terms = []
    for sign, pairs in _contractions(string.ops):
        deltas = [Delta(annihilator.labels[kind], creator.labels[kind]) for kind in range(len(LABEL_KINDS)) for annihilator, creator in pairs if annihilator.labels[kind]]
        terms.append(DeltaTerm(sign, tuple(deltas)))
    terms.sort(key=lambda term: term.sign < 0)
    log.debug("The vacuum expectation of %s has %s terms.", string, len(terms))
    return terms


def expectation_str(terms: Sequence[DeltaTerm]) -> str:
    """Return the sum of the terms as text."""
    return " ".join(str(term) for term in terms) if terms else "0"


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestFermiVacuumExpectation(unittest.TestCase):
    def test_two_particle(self):
        string = FermiOpString((annihilate("q1", "s1"), annihilate("q2", "s2"), create("q3", "s3"), create("q4", "s4")))
        terms = fermi_vacuum_expectation(string)
        self.assertEqual([str(term) for term in terms], ["+δ(q1,q4)δ(q2,q3)δ(s1,s4)δ(s2,s3)", "-δ(q1,q3)δ(q2,q4)δ(s1,s3)δ(s2,s4)"])
        self.assertEqual(expectation_str(terms), "+δ(q1,q4)δ(q2,q3)δ(s1,s4)δ(s2,s3) -δ(q1,q3)δ(q2,q4)δ(s1,s3)δ(s2,s4)")

    def test_single(self):
        self.assertEqual(fermi_vacuum_expectation(FermiOpString((annihilate("q"), create("q'")))), [DeltaTerm(1, (Delta("q", "q'"),))])

    def test_normal_ordered(self):
        string = FermiOpString((create("q"), annihilate("q'")))
        self.assertEqual(fermi_vacuum_expectation(string), [])
        self.assertEqual(expectation_str(fermi_vacuum_expectation(string)), "0")

    def test_empty(self):
        self.assertEqual(fermi_vacuum_expectation(FermiOpString(())), [DeltaTerm(1, ())])

    def test_unbalanced(self):
        self.assertEqual(fermi_vacuum_expectation(FermiOpString((annihilate("q1"), annihilate("q2"), create("q3")))), [])

    def test_interleaved(self):
        string = FermiOpString((annihilate("q1"), create("q2"), annihilate("q3"), create("q4")))
        self.assertEqual([str(term) for term in fermi_vacuum_expectation(string)], ["+δ(q1,q2)δ(q3,q4)"])

    def test_term_count(self):
        for num in range(1, 5):
            string = FermiOpString(tuple(annihilate(f"q{i}") for i in range(num)) + tuple(create(f"p{i}") for i in range(num)))
            terms = fermi_vacuum_expectation(string)
            self.assertEqual(len(terms), math.factorial(num))
            self.assertEqual(len({term.deltas for term in terms}), math.factorial(num))
            self.assertEqual(sum(term.sign for term in terms), 0 if num > 1 else 1)

    def test_creator_transposition(self):
        for num in range(2, 5):
            annihilators = tuple(annihilate(f"q{i}", f"s{i}") for i in range(num))
            creators = [create(f"p{i}", f"u{i}") for i in range(num)]
            swapped = creators.copy()
            swapped[0], swapped[1] = creators[1], creators[0]
            signs = {term.deltas: term.sign for term in fermi_vacuum_expectation(FermiOpString(annihilators + tuple(creators)))}
            swapped_signs = {term.deltas: term.sign for term in fermi_vacuum_expectation(FermiOpString(annihilators + tuple(swapped)))}
            self.assertEqual(signs.keys(), swapped_signs.keys())
            for deltas, sign in signs.items():
                self.assertEqual(swapped_signs[deltas], -sign)

    def test_channel_grouping(self):
        string = FermiOpString((annihilate("q1", "s1", "e"), create("q2", "s2", "e")))
        self.assertEqual(str(fermi_vacuum_expectation(string)[0]), "+δ(q1,q2)δ(s1,s2)δ(e,e)")

    def test_errors(self):
        with self.assertRaises(StringTooLong):
            fermi_vacuum_expectation(FermiOpString(tuple(annihilate(f"q{i}") for i in range(5)) + tuple(create(f"p{i}") for i in range(5))))
        with self.assertRaises(ValueError):
            FermiOpString((annihilate("q1", "s1"), create("q2")))
        with self.assertRaises(ValueError):
            annihilate("")


# python -m unittest -v mutualcoherence.fermi
