"""complex number utilities."""
import unittest


def complex_str(value: complex, precision: int = 6) -> str:
    """Return a compact string of a complex number, omitting an imaginary part that is negligible relative to its magnitude."""
    value = complex(value)
    if abs(value.imag) <= 1e-12 * abs(value):
        return f"{value.real:.{precision}g}"
    return f"{value.real:.{precision}g}{value.imag:+.{precision}g}i"


# pylint: disable=missing-class-docstring,missing-function-docstring
class TestComplexStr(unittest.TestCase):
    def test_real(self):
        self.assertEqual(complex_str(0.5), "0.5")
        self.assertEqual(complex_str(2 + 1e-20j), "2")
        self.assertEqual(complex_str(0), "0")

    def test_complex(self):
        self.assertEqual(complex_str(0.1 - 0.999687j), "0.1-0.999687i")
        self.assertEqual(complex_str(1j, precision=3), "0+1i")


# python -m unittest -v mutualcoherence.util.complex
