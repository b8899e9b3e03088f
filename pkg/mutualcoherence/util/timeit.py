"""Wall-time measurement for progress logs."""
import timeit
import unittest


class Timer:
    """Elapsed wall time since creation, with a throughput rate for counted work."""

    def __init__(self, precision: int = 1):
        self._precision = precision
        self._start = timeit.default_timer()

    def __call__(self) -> float:
        return timeit.default_timer() - self._start

    def rate(self, count: int) -> float:
        """Return the number of completed items per second, or inf if no measurable time has elapsed."""
        elapsed = self()
        return count / elapsed if elapsed > 0 else float("inf")

    def __str__(self) -> str:
        return f"{self():.{self._precision}f}s"


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestTimer(unittest.TestCase):
    def test_monotonic(self):
        timer = Timer()
        first = timer()
        self.assertGreaterEqual(first, 0)
        self.assertGreaterEqual(timer(), first)

    def test_str(self):
        self.assertRegex(str(Timer(precision=3)), r"^\d+\.\d{3}s$")

    def test_rate(self):
        self.assertGreater(Timer().rate(10), 0)
        self.assertEqual(Timer().rate(0), 0)


# python -m unittest -v mutualcoherence.util.timeit
