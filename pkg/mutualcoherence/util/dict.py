"""Mapping utilities."""
import unittest
from typing import Any, Dict, Iterator, Mapping, Tuple


def _flat_items(data: Mapping[str, Any], prefix: str = "") -> Iterator[Tuple[str, Any]]:
    for key, value in data.items():
        if isinstance(value, Mapping) and value:
            yield from _flat_items(value, f"{prefix}{key}.")
        else:
            yield f"{prefix}{key}", value


def flatten(data: Mapping[str, Any]) -> Dict[str, Any]:
    """Return the leaves of a nested mapping keyed by their dotted paths."""
    return dict(_flat_items(data))


def dict_str(data: Mapping[str, Any]) -> str:
    """Return a one-line string of the leaves of a nested mapping, such as `grid.tau1.max=10, kind=x`."""
    return ", ".join(f"{key}={value:g}" if isinstance(value, float) else f"{key}={value}" for key, value in flatten(data).items())


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestDictStr(unittest.TestCase):
    def test_flat(self):
        self.assertEqual(dict_str({"kind": "x", "g": 1.0}), "kind=x, g=1")
        self.assertEqual(dict_str({}), "")

    def test_nested(self):
        data = {"system": {"kappa1": 0.15, "g": 1}, "grid": {"tau1": {"steps": 21}}, "oracle": {}}
        self.assertEqual(flatten(data), {"system.kappa1": 0.15, "system.g": 1, "grid.tau1.steps": 21, "oracle": {}})
        self.assertEqual(dict_str(data), "system.kappa1=0.15, system.g=1, grid.tau1.steps=21, oracle={}")


# python -m unittest -v mutualcoherence.util.dict
