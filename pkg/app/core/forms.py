"""
Exterior algebra of invariant forms on a metric Lie algebra.

Conventions (fixed throughout the package):
  - k-forms store coefficients on strictly increasing index tuples and are
    evaluated in the determinant convention, so (α∧β)(X,Y) = α(X)β(Y) - α(Y)β(X)
    for 1-forms and e^{01}(e_0, e_1) = 1.
  - The Chevalley–Eilenberg differential is
    dα(X_0..X_k) = Σ_{i<j} (-1)^{i+j} α([X_i,X_j], X_0..^i..^j..X_k),
    with no 1/(k+1) normalization.
  - The codifferential is δα = -Σ g^{ij} (∇_{e_i} α)(e_j, ...), using the inverse
    Gram matrix so no orthonormal frame is needed.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import LieAlgebra, ad, bracket
from app.core.linalg import determinant
from app.core.scalars import Backend
from app.utils.exceptions import DimensionMismatchError, FormDegreeError

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


def sort_with_sign(indices: Sequence[int]) -> Tuple[int, Optional[Index]]:
    """
    Sort an index tuple, returning the permutation sign.

    Returns:
        (0, None) if an index repeats, else (sign, sorted tuple)
    """
    if len(set(indices)) < len(indices):
        return 0, None
    inversions = sum(
        1 for a in range(len(indices)) for b in range(a + 1, len(indices)) if indices[a] > indices[b]
    )
    return (-1 if inversions % 2 else 1), tuple(sorted(indices))


@dataclass(frozen=True, eq=False)
class KForm:
    """Antisymmetric k-linear form on a dim-dimensional space."""

    dim: int
    degree: int
    coefficients: Mapping[Index, object]
    backend: Backend

    @classmethod
    def build(cls, dim: int, degree: int, coefficients: Mapping[Sequence[int], object], backend: Backend) -> "KForm":
        """Normalize arbitrary index tuples (sorting with sign) and drop zeros."""
        if degree < 0:
            raise FormDegreeError(f"Negative degree {degree}")
        normalized: Dict[Index, object] = {}
        if degree <= dim:
            for indices, value in coefficients.items():
                indices = tuple(indices)
                if len(indices) != degree:
                    raise FormDegreeError(f"Index tuple {indices} does not match degree {degree}")
                if any(not 0 <= i < dim for i in indices):
                    raise DimensionMismatchError(f"Index tuple {indices} out of range for dimension {dim}")
                sign, key = sort_with_sign(indices)
                if sign == 0:
                    continue
                normalized[key] = normalized.get(key, backend.zero) + sign * backend.scalar(value)
        normalized = {k: v for k, v in normalized.items() if v != 0}
        return cls(dim, degree, normalized, backend)

    @classmethod
    def zero(cls, dim: int, degree: int, backend: Backend) -> "KForm":
        return cls(dim, degree, {}, backend)

    @classmethod
    def scalar(cls, dim: int, value, backend: Backend) -> "KForm":
        return cls.build(dim, 0, {(): value}, backend)

    @classmethod
    def from_vector(cls, coefficients: Sequence, backend: Backend) -> "KForm":
        """1-form with α(e_i) = coefficients[i]."""
        return cls.build(len(coefficients), 1, {(i,): c for i, c in enumerate(coefficients)}, backend)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, backend: Backend) -> "KForm":
        """2-form with α(e_i, e_j) = matrix[i, j]; the matrix must be antisymmetric."""
        dim = matrix.shape[0]
        if not backend.all_zero(matrix + matrix.T):
            raise FormDegreeError("2-form matrix must be antisymmetric")
        return cls.build(dim, 2, {(i, j): matrix[i, j] for i in range(dim) for j in range(i + 1, dim)}, backend)

    def component(self, indices: Sequence[int]):
        """α(e_{i_1}, ..., e_{i_k}) for any index tuple."""
        sign, key = sort_with_sign(tuple(indices))
        if sign == 0:
            return self.backend.zero
        return sign * self.coefficients.get(key, self.backend.zero)

    def evaluate(self, *vectors: np.ndarray):
        """Multilinear evaluation on k vectors."""
        if len(vectors) != self.degree:
            raise FormDegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        if self.degree == 0:
            return self.coefficients.get((), self.backend.zero)
        total = self.backend.zero
        for key, value in self.coefficients.items():
            minor = np.array([[v[i] for i in key] for v in vectors], dtype=self.backend.dtype)
            total += value * _small_determinant(minor, self.backend)
        return total

    def is_zero(self) -> bool:
        return all(self.backend.is_zero(v) for v in self.coefficients.values())

    def equals(self, other: "KForm") -> bool:
        return (self - other).is_zero()

    def max_abs(self):
        return max((abs(v) for v in self.coefficients.values()), default=self.backend.zero)

    def _check_compatible(self, other: "KForm") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"Forms on dimensions {self.dim} and {other.dim}")
        if self.degree != other.degree:
            raise FormDegreeError(f"Cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check_compatible(other)
        merged = dict(self.coefficients)
        for key, value in other.coefficients.items():
            merged[key] = merged.get(key, self.backend.zero) + value
        return KForm.build(self.dim, self.degree, merged, self.backend)

    def __neg__(self) -> "KForm":
        return self.scale(-1)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def scale(self, factor) -> "KForm":
        factor = self.backend.scalar(factor)
        return KForm.build(self.dim, self.degree, {k: v * factor for k, v in self.coefficients.items()}, self.backend)

    def as_vector(self) -> np.ndarray:
        if self.degree != 1:
            raise FormDegreeError("as_vector requires a 1-form")
        out = self.backend.zeros(self.dim)
        for (i,), value in self.coefficients.items():
            out[i] = value
        return out

    def as_matrix(self) -> np.ndarray:
        if self.degree != 2:
            raise FormDegreeError("as_matrix requires a 2-form")
        out = self.backend.zeros((self.dim, self.dim))
        for (i, j), value in self.coefficients.items():
            out[i, j] = value
            out[j, i] = -value
        return out

    def top_coefficient(self):
        """Coefficient on e^{0..dim-1} (zero unless degree == dim)."""
        if self.degree != self.dim:
            return self.backend.zero
        return self.coefficients.get(tuple(range(self.dim)), self.backend.zero)


def _small_determinant(matrix: np.ndarray, backend: Backend):
    size = matrix.shape[0]
    if size <= 4:
        total = backend.zero
        for perm in itertools.permutations(range(size)):
            sign, _ = sort_with_sign(perm)
            term = backend.one * sign
            for row, col in enumerate(perm):
                term = term * matrix[row, col]
            total += term
        return total
    return determinant(matrix, backend)


def _check_same_dim(a: KForm, b: KForm) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Forms on dimensions {a.dim} and {b.dim}")


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product; zero when deg a + deg b exceeds the dimension."""
    _check_same_dim(a, b)
    degree = a.degree + b.degree
    result: Dict[Index, object] = {}
    if degree <= a.dim:
        for left, x in a.coefficients.items():
            for right, y in b.coefficients.items():
                sign, key = sort_with_sign(left + right)
                if sign:
                    result[key] = result.get(key, a.backend.zero) + sign * x * y
    return KForm.build(a.dim, degree, result, a.backend)


def form_power(a: KForm, exponent: int) -> KForm:
    """a ∧ a ∧ ... (exponent times); the 0-th power is the constant 1."""
    result = KForm.scalar(a.dim, 1, a.backend)
    for _ in range(exponent):
        result = wedge(result, a)
    return result


def _check_algebra(algebra: LieAlgebra, form: KForm) -> None:
    if algebra.dim != form.dim:
        raise DimensionMismatchError(f"{form.degree}-form on dimension {form.dim} for algebra of dimension {algebra.dim}")


def _evaluate_first_slot(form: KForm, vector: np.ndarray, rest: Index):
    """α(w, e_rest) by linearity in the first slot."""
    total = form.backend.zero
    for m, coeff in enumerate(vector):
        if coeff != 0:
            total += coeff * form.component((m,) + rest)
    return total


def ce_differential(algebra: LieAlgebra, form: KForm) -> KForm:
    """Chevalley–Eilenberg differential; satisfies d∘d = 0 by the Jacobi identity."""
    _check_algebra(algebra, form)
    k = form.degree
    dim = algebra.dim
    result: Dict[Index, object] = {}
    if k + 1 <= dim and form.coefficients:
        for tup in itertools.combinations(range(dim), k + 1):
            total = form.backend.zero
            for i, j in itertools.combinations(range(k + 1), 2):
                image = algebra.constants[tup[i], tup[j]]
                rest = tuple(t for s, t in enumerate(tup) if s not in (i, j))
                value = _evaluate_first_slot(form, image, rest)
                total += value if (i + j) % 2 == 0 else -value
            result[tup] = total
    return KForm.build(dim, k + 1, result, form.backend)


def interior_vector(form: KForm, vector: np.ndarray) -> KForm:
    """Contraction in the first slot: (i_x α)(Y...) = α(x, Y...)."""
    if form.degree < 1:
        raise FormDegreeError("Interior product of a 0-form")
    if np.shape(vector) != (form.dim,):
        raise DimensionMismatchError(f"Vector of shape {np.shape(vector)} for a form on dimension {form.dim}")
    result = {
        rest: _evaluate_first_slot(form, vector, rest)
        for rest in itertools.combinations(range(form.dim), form.degree - 1)
    }
    return KForm.build(form.dim, form.degree - 1, result, form.backend)


def interior_J(structure: HermitianStructure, form: KForm) -> KForm:
    """(i_J α)(X_1..X_k) = Σ_i α(X_1..JX_i..X_k); for 1-forms this is α∘J."""
    if structure.dim != form.dim:
        raise DimensionMismatchError("Structure and form dimensions differ")
    J = structure.J
    result: Dict[Index, object] = {}
    for tup in itertools.combinations(range(form.dim), form.degree):
        total = form.backend.zero
        for slot, index in enumerate(tup):
            for m in range(form.dim):
                if J[m, index] != 0:
                    replaced = tup[:slot] + (m,) + tup[slot + 1:]
                    total += J[m, index] * form.component(replaced)
        result[tup] = total
    return KForm.build(form.dim, form.degree, result, form.backend)


def flat(structure: HermitianStructure, vector: np.ndarray) -> KForm:
    """Index lowering x -> g(x, ·)."""
    return KForm.from_vector(list(structure.g @ vector), structure.backend)


def sharp(structure: HermitianStructure, form: KForm) -> np.ndarray:
    """Index raising α -> g^{-1} α."""
    return structure.g_inverse @ form.as_vector()


@dataclass(frozen=True, eq=False)
class Connection:
    """Christoffel symbols: ∇_{e_i} e_j = Σ_k christoffel[i, j, k] e_k."""

    christoffel: np.ndarray
    backend: Backend = field(repr=False)

    def covariant_derivative(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """∇_x y for invariant vector fields."""
        return np.tensordot(np.tensordot(x, self.christoffel, axes=(0, 0)), y, axes=(0, 0))

    def torsion_residual(self, algebra: LieAlgebra) -> np.ndarray:
        """∇_i e_j - ∇_j e_i - [e_i, e_j] for all basis pairs."""
        return self.christoffel - self.christoffel.transpose(1, 0, 2) - algebra.constants

    def metric_residual(self, structure: HermitianStructure) -> np.ndarray:
        """g(∇_i e_j, e_k) + g(e_j, ∇_i e_k) for all basis triples."""
        lowered = np.tensordot(self.christoffel, structure.g, axes=(2, 0))
        return lowered + lowered.transpose(0, 2, 1)


def levi_civita(algebra: LieAlgebra, structure: HermitianStructure) -> Connection:
    """
    Levi-Civita connection of an invariant metric via the Koszul formula
    2g(∇_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y).
    """
    if algebra.dim != structure.dim:
        raise DimensionMismatchError("Algebra and structure dimensions differ")
    backend = algebra.backend
    dim = algebra.dim
    # lowered[a, b, c] = g([e_a, e_b], e_c)
    lowered = np.tensordot(algebra.constants, structure.g, axes=(2, 0))
    half = backend.scalar(Fraction(1, 2))
    koszul = backend.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            for l in range(dim):
                koszul[i, j, l] = half * (lowered[i, j, l] - lowered[j, l, i] + lowered[l, i, j])
    christoffel = np.tensordot(koszul, structure.g_inverse, axes=(2, 0))
    return Connection(christoffel, backend)


def covariant_derivative_form(connection: Connection, index: int, form: KForm) -> KForm:
    """(∇_{e_i} α)(Y_1..Y_k) = -Σ_s α(.., ∇_{e_i} Y_s, ..) for an invariant form α."""
    gamma = connection.christoffel[index]
    result: Dict[Index, object] = {}
    for tup in itertools.combinations(range(form.dim), form.degree):
        total = form.backend.zero
        for slot, j in enumerate(tup):
            for m in range(form.dim):
                if gamma[j, m] != 0:
                    replaced = tup[:slot] + (m,) + tup[slot + 1:]
                    total -= gamma[j, m] * form.component(replaced)
        result[tup] = total
    return KForm.build(form.dim, form.degree, result, form.backend)


def codifferential(
    algebra: LieAlgebra,
    structure: HermitianStructure,
    form: KForm,
    connection: Optional[Connection] = None,
) -> KForm:
    """δα = -Σ_{i,j} g^{ij} (∇_{e_i} α)(e_j, ·)."""
    if form.degree < 1:
        raise FormDegreeError("Codifferential of a 0-form")
    _check_algebra(algebra, form)
    connection = connection or levi_civita(algebra, structure)
    g_inv = structure.g_inverse
    derivatives = [covariant_derivative_form(connection, i, form) for i in range(form.dim)]
    result: Dict[Index, object] = {}
    for rest in itertools.combinations(range(form.dim), form.degree - 1):
        total = form.backend.zero
        for i in range(form.dim):
            for j in range(form.dim):
                if g_inv[i, j] != 0:
                    total -= g_inv[i, j] * derivatives[i].component((j,) + rest)
        result[rest] = total
    return KForm.build(form.dim, form.degree - 1, result, form.backend)


def lie_derivative_metric(algebra: LieAlgebra, structure: HermitianStructure, x: np.ndarray) -> np.ndarray:
    """(L_x g)(Y, Z) = -g([x,Y],Z) - g(Y,[x,Z]) as a symmetric matrix."""
    ad_x = ad(algebra, x)
    return -(ad_x.T @ structure.g + structure.g @ ad_x)


def lie_derivative_J(algebra: LieAlgebra, structure: HermitianStructure, x: np.ndarray) -> np.ndarray:
    """(L_x J)(Y) = [x, JY] - J[x, Y]."""
    ad_x = ad(algebra, x)
    return ad_x @ structure.J - structure.J @ ad_x


def lie_derivative_form(algebra: LieAlgebra, x: np.ndarray, form: KForm) -> KForm:
    """(L_x α)(Y_1..Y_k) = -Σ_s α(.., [x, Y_s], ..) for invariant α."""
    _check_algebra(algebra, form)
    ad_x = ad(algebra, x)
    result: Dict[Index, object] = {}
    for tup in itertools.combinations(range(form.dim), form.degree):
        total = form.backend.zero
        for slot, j in enumerate(tup):
            for m in range(form.dim):
                if ad_x[m, j] != 0:
                    replaced = tup[:slot] + (m,) + tup[slot + 1:]
                    total -= ad_x[m, j] * form.component(replaced)
        result[tup] = total
    return KForm.build(form.dim, form.degree, result, form.backend)


def cartan_residual(algebra: LieAlgebra, x: np.ndarray, form: KForm) -> KForm:
    """L_x α - (i_x dα + d i_x α); zero for every invariant form."""
    derivative = interior_vector(ce_differential(algebra, form), x)
    if form.degree >= 1:
        derivative = derivative + ce_differential(algebra, interior_vector(form, x))
    return lie_derivative_form(algebra, x, form) - derivative
