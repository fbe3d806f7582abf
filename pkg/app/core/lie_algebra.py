"""
Finite-dimensional Lie algebras given by structure constants.

The tensor `constants[i, j, k]` holds c_{ij}^k, so that [e_i, e_j] = sum_k c_{ij}^k e_k.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.linalg import Subspace, inverse, rank
from app.core.scalars import Backend, get_backend
from app.utils.exceptions import DimensionMismatchError, LieAlgebraError, ValidationError
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)

Vector = np.ndarray
BracketTable = Mapping[Tuple[int, int], Mapping[int, object]]


@dataclass(frozen=True)
class JacobiReport:
    """Outcome of the exhaustive Jacobi check."""

    holds: bool
    triple: Optional[Tuple[int, int, int]] = None
    residual: Optional[Vector] = None

    def describe(self) -> str:
        if self.holds:
            return "Jacobi identity holds"
        residual = [format_rational(x) for x in self.residual]
        return f"Jacobi identity fails on basis triple {self.triple}: residual {residual}"


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """
    Lie algebra of dimension `dim` with dense structure constants.

    Construction validates antisymmetry and the Jacobi identity eagerly and
    raises LieAlgebraError with the violating indices.
    """

    constants: np.ndarray
    backend: Backend
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        shape = np.shape(self.constants)
        if len(shape) != 3 or len(set(shape)) != 1 or shape[0] < 1:
            raise DimensionMismatchError(f"Structure constants must be a dim×dim×dim tensor, got {shape}")
        if self.names and len(self.names) != shape[0]:
            raise DimensionMismatchError(f"{len(self.names)} basis names for dimension {shape[0]}")

        antisymmetry = _antisymmetry_violation(self.constants, self.backend)
        if antisymmetry is not None:
            i, j, k = antisymmetry
            logger.warning(f"Rejected structure constants: antisymmetry fails at {antisymmetry}")
            raise LieAlgebraError(
                f"Antisymmetry fails: c_{i}{j}^{k} != -c_{j}{i}^{k}",
                error_code="antisymmetry",
                details={"indices": list(antisymmetry)},
            )

        report = _jacobi_report(self.constants, self.backend)
        if not report.holds:
            logger.warning(report.describe())
            raise LieAlgebraError(
                report.describe(),
                error_code="jacobi",
                details={
                    "triple": list(report.triple),
                    "residual": [format_rational(x) for x in report.residual],
                },
            )

    @property
    def dim(self) -> int:
        return self.constants.shape[0]

    def name(self, index: int) -> str:
        return self.names[index] if self.names else f"e{index}"

    def basis_vector(self, index: int) -> Vector:
        return self.backend.basis_vector(self.dim, index)

    def vector(self, values: Sequence) -> Vector:
        vector = self.backend.array(values)
        if vector.shape != (self.dim,):
            raise DimensionMismatchError(f"Vector of length {len(values)} in dimension {self.dim}")
        return vector


def from_brackets(
    dim: int,
    brackets: BracketTable,
    backend: Optional[Backend] = None,
    names: Sequence[str] = (),
) -> LieAlgebra:
    """
    Build an algebra from the brackets [e_i, e_j] for i < j, antisymmetrizing.

    Args:
        dim: Dimension
        brackets: Mapping (i, j) -> {k: coefficient}
        backend: Scalar backend (defaults to the configured one)
        names: Optional basis names

    Returns:
        Validated LieAlgebra
    """
    backend = backend or get_backend()
    if dim < 1:
        raise ValidationError(f"Dimension must be positive, got {dim}")
    constants = backend.zeros((dim, dim, dim))
    for (i, j), terms in brackets.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValidationError(f"Bracket indices ({i}, {j}) out of range")
        if i == j:
            raise ValidationError(f"Bracket [e{i}, e{i}] must not be specified")
        sign = 1 if i < j else -1
        a, b = min(i, j), max(i, j)
        for k, coeff in terms.items():
            if not 0 <= k < dim:
                raise ValidationError(f"Result index {k} out of range")
            value = backend.scalar(coeff) * sign
            constants[a, b, k] += value
            constants[b, a, k] -= value
    return LieAlgebra(constants, backend, tuple(names))


def abelian(dim: int, backend: Optional[Backend] = None, names: Sequence[str] = ()) -> LieAlgebra:
    backend = backend or get_backend()
    return LieAlgebra(backend.zeros((dim, dim, dim)), backend, tuple(names))


def bracket(algebra: LieAlgebra, x: Vector, y: Vector) -> Vector:
    """[x, y] = sum x^i y^j c_{ij}^k e_k."""
    _check_vector(algebra, x)
    _check_vector(algebra, y)
    return np.tensordot(np.tensordot(x, algebra.constants, axes=(0, 0)), y, axes=(0, 0))


def ad(algebra: LieAlgebra, x: Vector) -> np.ndarray:
    """Matrix of ad_x; column j is [x, e_j]."""
    _check_vector(algebra, x)
    return np.tensordot(x, algebra.constants, axes=(0, 0)).T.copy()


def _check_vector(algebra: LieAlgebra, x: Vector) -> None:
    if np.shape(x) != (algebra.dim,):
        raise DimensionMismatchError(f"Vector of shape {np.shape(x)} in dimension {algebra.dim}")


def _antisymmetry_violation(constants: np.ndarray, backend: Backend) -> Optional[Tuple[int, int, int]]:
    dim = constants.shape[0]
    for i in range(dim):
        for j in range(i, dim):
            for k in range(dim):
                if not backend.is_zero(constants[i, j, k] + constants[j, i, k]):
                    return (i, j, k)
    return None


def _jacobi_report(constants: np.ndarray, backend: Backend) -> JacobiReport:
    # nested[i, j, k, m] = [[e_i, e_j], e_k]^m
    nested = np.tensordot(constants, constants, axes=([2], [0]))
    dim = constants.shape[0]
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                residual = nested[i, j, k] + nested[j, k, i] + nested[k, i, j]
                if not backend.all_zero(residual):
                    return JacobiReport(False, (i, j, k), residual)
    return JacobiReport(True)


def check_jacobi(
    algebra: Union[LieAlgebra, np.ndarray],
    backend: Optional[Backend] = None,
) -> JacobiReport:
    """
    Exhaustive Jacobi check over all basis triples i < j < k.

    Accepts a validated algebra or a raw antisymmetric tensor (the latter is how
    corrupted input is inspected before construction is attempted).
    """
    if isinstance(algebra, LieAlgebra):
        return _jacobi_report(algebra.constants, algebra.backend)
    backend = backend or get_backend()
    constants = np.asarray(algebra)
    if _antisymmetry_violation(constants, backend) is not None:
        raise LieAlgebraError("Jacobi check requires antisymmetric constants", error_code="antisymmetry")
    return _jacobi_report(constants, backend)


def bracket_span(algebra: LieAlgebra, first: Subspace, second: Subspace) -> Subspace:
    """Span of [a, b] over basis vectors a of `first`, b of `second`."""
    images = [bracket(algebra, a, b) for a in first.vectors for b in second.vectors]
    return Subspace.span(images, algebra.dim, algebra.backend)


def derived_subalgebra(algebra: LieAlgebra) -> Subspace:
    """[g, g] as a subspace in reduced column-echelon form."""
    images = [
        algebra.constants[i, j].copy()
        for i in range(algebra.dim)
        for j in range(i + 1, algebra.dim)
    ]
    return Subspace.span(images, algebra.dim, algebra.backend)


def derived_series(algebra: LieAlgebra) -> List[int]:
    """
    Dimensions of g ⊇ g^(1) ⊇ g^(2) ⊇ ... until the series reaches 0 or stabilizes.

    A stabilized nonzero term is listed twice, so the algebra is solvable iff
    the last entry is 0.
    """
    current = Subspace.whole(algebra.dim, algebra.backend)
    dims = [current.dim]
    while current.dim > 0:
        following = bracket_span(algebra, current, current)
        dims.append(following.dim)
        if following.dim == current.dim:
            break
        current = following
    return dims


def is_solvable(algebra: LieAlgebra) -> bool:
    return derived_series(algebra)[-1] == 0


def is_abelian(algebra: LieAlgebra) -> bool:
    return algebra.backend.all_zero(algebra.constants)


def ad_traces(algebra: LieAlgebra) -> List:
    """trace(ad_{e_i}) for each basis vector."""
    return [sum(algebra.constants[i, j, j] for j in range(algebra.dim)) for i in range(algebra.dim)]


def is_unimodular(algebra: LieAlgebra) -> bool:
    """trace(ad_x) = 0 for all x; linear in x, so basis vectors suffice."""
    return all(algebra.backend.is_zero(t) for t in ad_traces(algebra))


def is_ideal(algebra: LieAlgebra, subspace: Subspace) -> bool:
    """[g, S] ⊆ S."""
    whole = Subspace.whole(algebra.dim, algebra.backend)
    return bracket_span(algebra, whole, subspace).is_subspace_of(subspace)


def derivation_violation(algebra: LieAlgebra, matrix: np.ndarray) -> Optional[Tuple[Tuple[int, int], Vector]]:
    """
    First basis pair (i, j) where D[e_i, e_j] != [De_i, e_j] + [e_i, De_j].

    Returns:
        None if D is a derivation, else ((i, j), residual)
    """
    if matrix.shape != (algebra.dim, algebra.dim):
        raise DimensionMismatchError(f"Endomorphism of shape {matrix.shape} in dimension {algebra.dim}")
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            x, y = algebra.basis_vector(i), algebra.basis_vector(j)
            residual = (
                matrix @ bracket(algebra, x, y)
                - bracket(algebra, matrix @ x, y)
                - bracket(algebra, x, matrix @ y)
            )
            if not algebra.backend.all_zero(residual):
                return (i, j), residual
    return None


def is_derivation(algebra: LieAlgebra, matrix: np.ndarray) -> bool:
    return derivation_violation(algebra, matrix) is None


def direct_sum(first: LieAlgebra, second: LieAlgebra) -> LieAlgebra:
    """Block-diagonal structure constants; the two summands commute."""
    backend = first.backend
    n1, n2 = first.dim, second.dim
    constants = backend.zeros((n1 + n2,) * 3)
    constants[:n1, :n1, :n1] = first.constants
    constants[n1:, n1:, n1:] = second.constants
    names = ()
    if first.names and second.names:
        names = first.names + second.names
    return LieAlgebra(constants, backend, names)


def in_basis(algebra: LieAlgebra, basis: np.ndarray, names: Sequence[str] = ()) -> LieAlgebra:
    """
    Express a subalgebra (or the whole algebra) in the basis given by the columns of `basis`.

    Raises:
        LieAlgebraError: If the columns do not span a subalgebra
    """
    backend = algebra.backend
    dim, size = basis.shape
    if dim != algebra.dim or rank(basis, backend) < size:
        raise DimensionMismatchError("Basis columns must be independent vectors of the algebra")
    left_inverse = inverse(basis.T @ basis, backend) @ basis.T
    constants = backend.zeros((size, size, size))
    for a in range(size):
        for b in range(a + 1, size):
            image = bracket(algebra, basis[:, a], basis[:, b])
            coords = left_inverse @ image
            if not backend.all_zero(basis @ coords - image):
                raise LieAlgebraError(
                    "Columns do not span a subalgebra",
                    error_code="not_subalgebra",
                    details={"pair": [a, b]},
                )
            constants[a, b] = coords
            constants[b, a] = -coords
    return LieAlgebra(constants, backend, tuple(names))


def bracket_table(algebra: LieAlgebra) -> Dict[Tuple[int, int], Dict[int, object]]:
    """Nonzero brackets [e_i, e_j], i < j, as {(i, j): {k: c_ij^k}}."""
    table: Dict[Tuple[int, int], Dict[int, object]] = {}
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            terms = {
                k: algebra.constants[i, j, k]
                for k in range(algebra.dim)
                if not algebra.backend.is_zero(algebra.constants[i, j, k])
            }
            if terms:
                table[(i, j)] = terms
    return table
