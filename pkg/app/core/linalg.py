"""
Linear algebra kernel over the scalar backends.

Exact rank, reduced echelon forms, null spaces and inverses go through sympy;
the float backend uses numpy.linalg. Matrices act on column vectors: column j of
a matrix is the image of the j-th basis vector.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

from app.core.scalars import Backend
from app.utils.exceptions import DimensionMismatchError, InfeasibleSystemError, ValidationError

logger = logging.getLogger(__name__)


def to_sympy(matrix: np.ndarray) -> sympy.Matrix:
    """Convert a backend matrix to a sympy Matrix without losing exactness."""
    matrix = np.atleast_2d(matrix)
    rows, cols = matrix.shape
    entries = []
    for value in matrix.flat:
        if isinstance(value, Fraction):
            entries.append(sympy.Rational(value.numerator, value.denominator))
        elif isinstance(value, (int, np.integer)):
            entries.append(sympy.Integer(int(value)))
        else:
            entries.append(sympy.Float(float(value)))
    return sympy.Matrix(rows, cols, entries)


def from_sympy(matrix: sympy.Matrix, backend: Backend) -> np.ndarray:
    """Convert a sympy Matrix back to a backend array."""
    out = backend.zeros(matrix.shape)
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            entry = matrix[i, j]
            if backend.exact:
                entry = sympy.Rational(entry)
                out[i, j] = Fraction(int(entry.p), int(entry.q))
            else:
                out[i, j] = float(entry)
    return out


def _zero_test(backend: Backend):
    tol = backend.tol
    return lambda x: bool(abs(x) <= tol)


def rank(matrix: np.ndarray, backend: Backend) -> int:
    """Rank of a matrix (exact under the exact backend)."""
    matrix = np.atleast_2d(matrix)
    if matrix.size == 0:
        return 0
    if backend.exact:
        return to_sympy(matrix).rank()
    values = matrix.astype(float)
    scale = max(1.0, float(np.abs(values).max()))
    return int(np.linalg.matrix_rank(values, tol=backend.tol * scale * max(values.shape)))


def rref(matrix: np.ndarray, backend: Backend) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Reduced row echelon form.

    Returns:
        Tuple of (reduced matrix, pivot column indices)
    """
    matrix = np.atleast_2d(matrix)
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        return matrix.copy(), ()
    symbolic = to_sympy(matrix)
    if backend.exact:
        reduced, pivots = symbolic.rref(simplify=False)
    else:
        reduced, pivots = symbolic.rref(iszerofunc=_zero_test(backend), simplify=False)
    return from_sympy(reduced, backend), tuple(pivots)


def nullspace(matrix: np.ndarray, backend: Backend) -> np.ndarray:
    """
    Basis of the null space as the columns of the returned matrix.

    Under the exact backend the basis is the one read off the reduced echelon
    form, so it is canonical.
    """
    matrix = np.atleast_2d(matrix)
    cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return backend.identity(cols)
    if backend.exact:
        vectors = to_sympy(matrix).nullspace(simplify=False)
        if not vectors:
            return backend.zeros((cols, 0))
        return from_sympy(sympy.Matrix.hstack(*vectors), backend)
    values = matrix.astype(float)
    _, singular, vh = np.linalg.svd(values)
    scale = max(1.0, float(singular.max()) if singular.size else 1.0)
    nonzero = int((singular > backend.tol * scale * max(values.shape)).sum())
    return vh[nonzero:].T.copy()


def inverse(matrix: np.ndarray, backend: Backend) -> np.ndarray:
    """
    Inverse of a square matrix.

    Raises:
        ValidationError: If the matrix is singular
    """
    matrix = np.atleast_2d(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"Cannot invert a {matrix.shape} matrix")
    if rank(matrix, backend) < matrix.shape[0]:
        raise ValidationError("Singular matrix", error_code="singular")
    if backend.exact:
        return from_sympy(to_sympy(matrix).inv(), backend)
    return np.linalg.inv(matrix.astype(float))


def determinant(matrix: np.ndarray, backend: Backend):
    matrix = np.atleast_2d(matrix)
    if matrix.shape[0] == 0:
        return backend.one
    if backend.exact:
        value = sympy.Rational(to_sympy(matrix).det())
        return Fraction(int(value.p), int(value.q))
    return float(np.linalg.det(matrix.astype(float)))


def solve_affine(
    coefficients: np.ndarray,
    rhs: np.ndarray,
    backend: Backend,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Solve A x = b completely.

    Returns:
        Tuple of (particular solution, matrix whose columns span the homogeneous solutions)

    Raises:
        InfeasibleSystemError: With a certificate y such that yA = 0 and y·b != 0
    """
    coefficients = np.atleast_2d(coefficients)
    rows, cols = coefficients.shape
    rhs = np.asarray(rhs).reshape(rows, 1)

    augmented = np.concatenate([coefficients, rhs], axis=1)
    reduced, pivots = rref(augmented, backend)
    if cols in pivots:
        certificate = _infeasibility_certificate(coefficients, rhs[:, 0], backend)
        raise InfeasibleSystemError(
            "Linear system is infeasible",
            error_code="infeasible",
            details={"certificate": certificate, "pivot_row": pivots.index(cols)},
        )

    particular = backend.zeros(cols)
    for row, pivot in enumerate(pivots):
        particular[pivot] = reduced[row, cols]
    return particular, nullspace(coefficients, backend)


def _infeasibility_certificate(coefficients: np.ndarray, rhs: np.ndarray, backend: Backend) -> List:
    left = nullspace(coefficients.T, backend)
    for k in range(left.shape[1]):
        y = left[:, k]
        if not backend.is_zero(np.dot(y, rhs)):
            return list(y)
    return []


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[a, b] = ab - ba."""
    return a @ b - b @ a


def adjoint(matrix: np.ndarray, gram: np.ndarray, backend: Backend) -> np.ndarray:
    """Adjoint with respect to the Gram matrix: x* = g^-1 x^T g."""
    return inverse(gram, backend) @ matrix.T @ gram


def is_symmetric(matrix: np.ndarray, backend: Backend) -> bool:
    return backend.all_zero(matrix - matrix.T)


def leading_minors(matrix: np.ndarray, backend: Backend) -> List:
    """Leading principal minors, in increasing size."""
    return [determinant(matrix[:k, :k], backend) for k in range(1, matrix.shape[0] + 1)]


def is_positive_definite(matrix: np.ndarray, backend: Backend) -> bool:
    """Sylvester's criterion on a symmetric matrix."""
    return all(backend.is_positive(minor) for minor in leading_minors(matrix, backend))


def block_diagonal(blocks: Sequence[np.ndarray], backend: Backend) -> np.ndarray:
    size = sum(block.shape[0] for block in blocks)
    out = backend.zeros((size, size))
    offset = 0
    for block in blocks:
        k = block.shape[0]
        out[offset:offset + k, offset:offset + k] = block
        offset += k
    return out


def gram_schmidt(vectors: Sequence[np.ndarray], gram: np.ndarray, backend: Backend) -> List[np.ndarray]:
    """
    Orthonormalize vectors with respect to g.

    Under the exact backend this only succeeds when every norm is a rational square.
    """
    result: List[np.ndarray] = []
    for vector in vectors:
        w = np.array(vector, copy=True)
        for e in result:
            w = w - (e @ gram @ w) * e
        norm_sq = w @ gram @ w
        if backend.is_zero(norm_sq):
            continue
        result.append(w / backend.sqrt(norm_sq))
    return result


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Linear subspace given by a basis in reduced column-echelon form.

    The basis is canonical under the exact backend, so equal subspaces have equal
    basis matrices.
    """

    ambient: int
    basis: np.ndarray
    backend: Backend

    @classmethod
    def span(cls, vectors: Sequence[np.ndarray], ambient: int, backend: Backend) -> "Subspace":
        vectors = [np.asarray(v) for v in vectors]
        for v in vectors:
            if v.shape != (ambient,):
                raise DimensionMismatchError(f"Vector of shape {v.shape} in ambient dimension {ambient}")
        if not vectors:
            return cls(ambient, backend.zeros((ambient, 0)), backend)
        rows = backend.zeros((len(vectors), ambient))
        for i, v in enumerate(vectors):
            rows[i] = v
        reduced, pivots = rref(rows, backend)
        return cls(ambient, reduced[:len(pivots)].T.copy(), backend)

    @classmethod
    def from_columns(cls, matrix: np.ndarray, backend: Backend) -> "Subspace":
        return cls.span([matrix[:, k] for k in range(matrix.shape[1])], matrix.shape[0], backend)

    @classmethod
    def zero(cls, ambient: int, backend: Backend) -> "Subspace":
        return cls.span([], ambient, backend)

    @classmethod
    def whole(cls, ambient: int, backend: Backend) -> "Subspace":
        return cls.from_columns(backend.identity(ambient), backend)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def vectors(self) -> List[np.ndarray]:
        return [self.basis[:, k] for k in range(self.dim)]

    def contains(self, vector: np.ndarray) -> bool:
        if self.backend.all_zero(vector):
            return True
        stacked = np.concatenate([self.basis, np.asarray(vector).reshape(-1, 1)], axis=1)
        return rank(stacked, self.backend) == self.dim

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors)

    def equals(self, other: "Subspace") -> bool:
        if self.ambient != other.ambient or self.dim != other.dim:
            return False
        if self.backend.exact:
            return self.backend.all_zero(self.basis - other.basis)
        return self.is_subspace_of(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.vectors + other.vectors, self.ambient, self.backend)

    def orthogonal_complement(self, gram: np.ndarray) -> "Subspace":
        """{x : g(s, x) = 0 for all s in the subspace}."""
        if self.dim == 0:
            return Subspace.whole(self.ambient, self.backend)
        return Subspace.from_columns(nullspace(self.basis.T @ gram, self.backend), self.backend)

    def is_invariant(self, matrix: np.ndarray) -> bool:
        return all(self.contains(matrix @ v) for v in self.vectors)
