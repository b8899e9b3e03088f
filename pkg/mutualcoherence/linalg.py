"""Small dense complex linear algebra.

Matrices are numpy complex arrays. The dimensions involved are small (a handful of modes), so clarity is preferred over speed.
"""
import dataclasses
import itertools
import logging
import math
import unittest
from collections import defaultdict
from typing import Any, Dict

import numpy as np

from . import config
from .errors import DimensionMismatch, DimensionTooLarge, NonDiagonalizable

log = logging.getLogger(__name__)

ComplexMatrix = np.ndarray


def as_complex_matrix(data: Any, name: str = "matrix") -> ComplexMatrix:
    """Return the given data as a read-only finite 2-D complex array."""
    matrix = np.array(data, dtype=complex, ndmin=2)
    if matrix.ndim != 2:
        raise DimensionMismatch(f"The {name} must be 2-dimensional, but it has shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"The {name} has non-finite entries.")
    matrix.setflags(write=False)
    return matrix


def max_norm(matrix: np.ndarray) -> float:
    """Return the largest absolute entry of the given array, or 0 if it is empty."""
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def _require_square(matrix: ComplexMatrix, name: str) -> int:
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionMismatch(f"The {name} must be square, but it has shape {matrix.shape}.")
    return rows


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigendecomposition M = U diag(lambdas) U⁻¹ with right eigenvectors as the columns of U."""

    lambdas: np.ndarray
    U: ComplexMatrix  # pylint: disable=invalid-name
    Uinv: ComplexMatrix  # pylint: disable=invalid-name

    @property
    def dim(self) -> int:
        """Return the matrix dimension."""
        return len(self.lambdas)

    def reconstruct(self) -> ComplexMatrix:
        """Return U diag(lambdas) U⁻¹."""
        return (self.U * self.lambdas) @ self.Uinv


def diagonalize(matrix: Any, tol: float = config.EIGEN_TOLERANCE_DEFAULT) -> SpectralDecomposition:
    """Return the spectral decomposition of a square complex matrix.

    Eigenvalues are sorted by real part, then by imaginary part.
    `NonDiagonalizable` is raised for a defective or near-defective matrix, i.e. when the condition number of the eigenvector matrix exceeds 1/tol.
    """
    matrix = as_complex_matrix(matrix)
    dim = _require_square(matrix, "matrix to diagonalize")
    if dim > config.EIGEN_DIM_MAX:
        raise DimensionTooLarge(f"The matrix to diagonalize has dimension {dim} which exceeds {config.EIGEN_DIM_MAX}.")
    if dim == 0:
        empty = as_complex_matrix(np.zeros((0, 0)))
        return SpectralDecomposition(lambdas=np.zeros(0, dtype=complex), U=empty, Uinv=empty)

    lambdas, eigvecs = np.linalg.eig(matrix)
    order = np.lexsort((np.round(lambdas.imag, config.EIGEN_SORT_DECIMALS), np.round(lambdas.real, config.EIGEN_SORT_DECIMALS)))
    lambdas, eigvecs = lambdas[order], eigvecs[:, order]

    condition = np.linalg.cond(eigvecs)
    if not (np.isfinite(condition) and condition <= 1 / tol):
        raise NonDiagonalizable(f"The eigenvector matrix has condition number {condition:.3g} exceeding {1 / tol:.3g}. The matrix is defective or nearly so; perturb its parameters.")
    eigvecs_inv = np.linalg.inv(eigvecs)
    decomp = SpectralDecomposition(lambdas=lambdas, U=as_complex_matrix(eigvecs), Uinv=as_complex_matrix(eigvecs_inv))
    decomp.lambdas.setflags(write=False)

    reconstruction_error = max_norm(decomp.reconstruct() - matrix)
    identity_error = max_norm(decomp.U @ decomp.Uinv - np.eye(dim))
    if (reconstruction_error > tol * max_norm(matrix)) or (identity_error > tol):
        raise NonDiagonalizable(
            f"The eigendecomposition is inaccurate with reconstruction error {reconstruction_error:.3g} and inverse error {identity_error:.3g}. Perturb the matrix parameters."
        )
    log.debug("Diagonalized a %sx%s matrix having eigenvector condition number %.3g and eigenvalues %s.", dim, dim, condition, lambdas)
    return decomp


def permanent(matrix: Any) -> complex:
    """Return the permanent of a square complex matrix, i.e. the sum over all permutations σ of Π_i K[i, σ(i)].

    The sum is accumulated row by row over the subsets of used columns, which shares partial products between permutations without any cancelling terms.
    """
    matrix = as_complex_matrix(matrix)
    dim = _require_square(matrix, "permanent argument")
    if dim > config.PERMANENT_DIM_MAX:
        raise DimensionTooLarge(f"The permanent argument has dimension {dim} which exceeds {config.PERMANENT_DIM_MAX}.")
    partial: Dict[int, complex] = {0: 1 + 0j}  # Maps a bitmask of used columns to its summed partial product.
    for row in range(dim):
        extended: Dict[int, complex] = defaultdict(complex)
        for used, value in partial.items():
            for col in range(dim):
                if not used & (1 << col):
                    extended[used | (1 << col)] += value * matrix[row, col]
        partial = extended
    return complex(partial.get((1 << dim) - 1, 0))


def lyapunov_residual(drift: Any, covariance: Any, diffusion: Any) -> float:
    """Return the max-norm of M·C + C·M† − D."""
    drift, covariance, diffusion = as_complex_matrix(drift, "drift"), as_complex_matrix(covariance, "covariance"), as_complex_matrix(diffusion, "diffusion")
    dims = {_require_square(drift, "drift"), _require_square(covariance, "covariance"), _require_square(diffusion, "diffusion")}
    if len(dims) != 1:
        raise DimensionMismatch(f"The drift, covariance and diffusion have differing shapes {drift.shape}, {covariance.shape} and {diffusion.shape}.")
    return max_norm(drift @ covariance + covariance @ drift.conj().T - diffusion)


# pylint: disable=missing-class-docstring,missing-function-docstring
def _brute_force_permanent(matrix: np.ndarray) -> complex:
    dim = len(matrix)
    return complex(sum(math.prod(matrix[row, col] for row, col in enumerate(perm)) for perm in itertools.permutations(range(dim))))


def _random_complex(rng: np.random.Generator, shape: Any) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


class TestDiagonalize(unittest.TestCase):
    def test_diagonal(self):
        decomp = diagonalize(np.diag([1.0, 2.0]))
        np.testing.assert_allclose(decomp.lambdas, [1, 2])
        np.testing.assert_allclose(np.abs(decomp.U), np.eye(2), atol=1e-12)
        decomp = diagonalize(np.diag([2.0, 1.0]))  # Sorting swaps the eigenvector columns.
        np.testing.assert_allclose(decomp.lambdas, [1, 2])
        np.testing.assert_allclose(np.abs(decomp.U), [[0, 1], [1, 0]], atol=1e-12)

    def test_symmetric(self):
        decomp = diagonalize([[2, 1], [1, 2]])
        np.testing.assert_allclose(decomp.lambdas, [1, 3], atol=1e-12)

    def test_two_mode_drift(self):
        decomp = diagonalize([[0.075, 1j], [1j, 0.125]])
        imag = math.sqrt(1 - 0.025**2)
        np.testing.assert_allclose(decomp.lambdas, [0.1 - 1j * imag, 0.1 + 1j * imag], rtol=0, atol=1e-9)
        np.testing.assert_allclose(decomp.lambdas.imag, [-0.999687, 0.999687], rtol=0, atol=1e-6)

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        for dim in range(1, 9):
            matrix = _random_complex(rng, (dim, dim))
            decomp = diagonalize(matrix)
            self.assertLessEqual(max_norm(decomp.reconstruct() - matrix), 1e-10 * max_norm(matrix))
            self.assertLessEqual(max_norm(decomp.U @ decomp.Uinv - np.eye(dim)), 1e-10)
            keys = [(round(z.real, 12), round(z.imag, 12)) for z in decomp.lambdas]
            self.assertEqual(keys, sorted(keys))

    def test_deterministic(self):
        matrix = _random_complex(np.random.default_rng(1), (6, 6))
        first, second = diagonalize(matrix), diagonalize(matrix)
        np.testing.assert_array_equal(first.lambdas, second.lambdas)
        np.testing.assert_array_equal(first.U, second.U)

    def test_defective(self):
        with self.assertRaises(NonDiagonalizable):
            diagonalize([[1, 1], [0, 1]])

    def test_errors(self):
        with self.assertRaises(DimensionMismatch):
            diagonalize(np.ones((2, 3)))
        with self.assertRaises(DimensionTooLarge):
            diagonalize(np.eye(config.EIGEN_DIM_MAX + 1))

    def test_read_only(self):
        decomp = diagonalize(np.diag([1.0, 2.0]))
        with self.assertRaises(ValueError):
            decomp.U[0, 0] = 5


class TestPermanent(unittest.TestCase):
    def test_all_ones(self):
        self.assertAlmostEqual(permanent(np.ones((2, 2))), 2)
        self.assertAlmostEqual(permanent(np.ones((3, 3))), 6)
        self.assertAlmostEqual(permanent(np.ones((5, 5))), 120)

    def test_empty(self):
        self.assertEqual(permanent(np.zeros((0, 0))), 1)

    def test_brute_force(self):
        rng = np.random.default_rng(2)
        for dim in range(1, 6):
            for _ in range(5):
                radius, phase = np.sqrt(rng.uniform(size=(dim, dim))), rng.uniform(0, 2 * np.pi, size=(dim, dim))
                matrix = radius * np.exp(1j * phase)  # Entries in the unit disk.
                expected = _brute_force_permanent(matrix)
                self.assertLessEqual(abs(permanent(matrix) - expected), 1e-12 * max(1.0, abs(expected)))

    def test_zero_row(self):
        matrix = _random_complex(np.random.default_rng(3), (4, 4))
        matrix[2] = 0
        self.assertEqual(permanent(matrix), 0)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        matrix = _random_complex(rng, (5, 5))
        expected = permanent(matrix)
        rows, cols = rng.permutation(5), rng.permutation(5)
        self.assertAlmostEqual(permanent(matrix[rows][:, cols]), expected, places=10)

    def test_errors(self):
        with self.assertRaises(DimensionTooLarge):
            permanent(np.ones((9, 9)))
        with self.assertRaises(DimensionMismatch):
            permanent(np.ones((2, 3)))


class TestLyapunovResidual(unittest.TestCase):
    def test_scalar_stationarity(self):
        kappa, nbar = 0.3, 0.2
        self.assertAlmostEqual(lyapunov_residual([[kappa / 2]], [[nbar]], [[nbar * kappa]]), 0, places=15)

    def test_zero_covariance(self):
        diffusion = np.diag([0.5, 2.0])
        self.assertEqual(lyapunov_residual(np.eye(2), np.zeros((2, 2)), diffusion), 2.0)

    def test_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            lyapunov_residual(np.eye(2), np.eye(3), np.eye(2))


# python -m unittest -v mutualcoherence.linalg
