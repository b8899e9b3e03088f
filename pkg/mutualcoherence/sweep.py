"""Parallel evaluation of normalized third-order correlators over delay grids."""
import concurrent.futures
import dataclasses
import io
import logging
import unittest
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from . import config
from .system import ModeSystem, build_two_mode_example
from .util.timeit import Timer
from .wick import G3Kind, default_g3_weights, normalized_g3

log = logging.getLogger(__name__)

COLUMNS = ["tau1", "tau2", "g3"]


@dataclasses.dataclass(frozen=True)
class GridAxis:
    """Evenly spaced delays from `min` to `max` inclusive."""

    min: float = 0.0  # pylint: disable=redefined-builtin
    max: float = 10.0  # pylint: disable=redefined-builtin
    steps: int = 21

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError(f"A grid axis must have at least 2 steps, but it has {self.steps}.")
        if not 0 <= self.min < self.max:
            raise ValueError(f"A grid axis must satisfy 0 ≤ min < max, but it spans {self.min} to {self.max}.")

    @property
    def values(self) -> np.ndarray:
        """Return the delays of the axis."""
        return np.linspace(self.min, self.max, self.steps)


def sweep_g3(kind: G3Kind, system: ModeSystem, weights: Sequence[np.ndarray], tau1_axis: GridAxis, tau2_axis: GridAxis, threads: int = config.SWEEP_THREADS_DEFAULT) -> pd.DataFrame:
    """Return the normalized correlator at every grid point, with rows sorted by (tau1, tau2)."""
    timer = Timer()
    points: List[Tuple[float, float]] = [(float(tau1), float(tau2)) for tau1 in tau1_axis.values for tau2 in tau2_axis.values]
    log.debug("Sweeping g3_%s over %s grid points using %s threads.", G3Kind(kind).value, len(points), threads)

    def _evaluate(point: Tuple[float, float]) -> Tuple[float, float, float]:
        tau1, tau2 = point
        return tau1, tau2, normalized_g3(kind, system, weights, tau1, tau2)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads, thread_name_prefix="Sweeper") as executor:
            rows = list(executor.map(_evaluate, points))
    else:
        rows = [_evaluate(point) for point in points]
    df = pd.DataFrame(rows, columns=COLUMNS).sort_values(["tau1", "tau2"], kind="mergesort", ignore_index=True)
    log.info("Swept g3_%s over %s grid points in %s at %.0f points/s.", G3Kind(kind).value, len(df), timer, timer.rate(len(df)))
    return df


def grid_csv(df: pd.DataFrame) -> str:
    """Return the grid as CSV text with fixed numeric formatting and newline line endings."""
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestSweepG3(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.system = build_two_mode_example(0.15, 0.25, 0.01, 0.1, 1)
        cls.weights = default_g3_weights(cls.system)
        cls.axis = GridAxis(0, 10, 21)

    def test_shape_and_order(self):
        df = sweep_g3(G3Kind.X, self.system, self.weights, self.axis, GridAxis(0, 10, 11), threads=4)
        self.assertEqual(list(df.columns), COLUMNS)
        self.assertEqual(len(df), 21 * 11)
        self.assertTrue(df.equals(df.sort_values(["tau1", "tau2"], ignore_index=True)))

    def test_deterministic(self):
        serial = grid_csv(sweep_g3(G3Kind.Y, self.system, self.weights, self.axis, self.axis, threads=1))
        parallel = grid_csv(sweep_g3(G3Kind.Y, self.system, self.weights, self.axis, self.axis, threads=8))
        self.assertEqual(serial, parallel)
        self.assertTrue(serial.startswith("tau1,tau2,g3\n0.000000000000e+00,0.000000000000e+00,"))
        self.assertNotIn("\r", serial)

    def test_bunching_like(self):
        df = sweep_g3(G3Kind.X, self.system, self.weights, self.axis, self.axis, threads=4).set_index(["tau1", "tau2"])["g3"]
        for tau1 in (1.0, 2.0, 5.0):
            self.assertGreater(df[(tau1, 0.0)], df[(tau1, 10.0)])

    def test_diagonal(self):
        x_grid = sweep_g3(G3Kind.X, self.system, self.weights, self.axis, self.axis, threads=4)
        y_grid = sweep_g3(G3Kind.Y, self.system, self.weights, self.axis, self.axis, threads=4)
        diagonal = x_grid["tau1"] == x_grid["tau2"]
        np.testing.assert_allclose(x_grid.loc[diagonal, "g3"], y_grid.loc[diagonal, "g3"], rtol=0, atol=1e-9)

    def test_axis_validation(self):
        with self.assertRaises(ValueError):
            GridAxis(0, 10, 1)
        with self.assertRaises(ValueError):
            GridAxis(-1, 10, 5)
        np.testing.assert_array_equal(GridAxis(0, 1, 3).values, [0, 0.5, 1])


# python -m unittest -v mutualcoherence.sweep
