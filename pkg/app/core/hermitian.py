"""
Almost Hermitian structures (g, J) on a Lie algebra basis.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from app.core.linalg import (
    block_diagonal,
    inverse,
    is_positive_definite,
    is_symmetric,
    leading_minors,
)
from app.core.scalars import Backend, get_backend
from app.utils.exceptions import DimensionMismatchError, HermitianStructureError, ValidationError
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HermitianStructure:
    """
    Gram matrix g and almost complex structure J.

    Validated on construction: g symmetric positive definite, J^2 = -Id and
    J^T g J = g.
    """

    g: np.ndarray
    J: np.ndarray
    backend: Backend

    def __post_init__(self):
        backend = self.backend
        size = self.g.shape[0]
        if self.g.shape != (size, size) or self.J.shape != (size, size):
            raise DimensionMismatchError(f"g {self.g.shape} and J {self.J.shape} must be square of equal size")
        if size % 2:
            raise HermitianStructureError(f"Almost complex structures need even dimension, got {size}")
        if not is_symmetric(self.g, backend):
            raise HermitianStructureError("Gram matrix is not symmetric", error_code="metric_not_symmetric")
        if not is_positive_definite(self.g, backend):
            minors = [format_rational(m) for m in leading_minors(self.g, backend)]
            raise HermitianStructureError(
                "Gram matrix is not positive definite",
                error_code="metric_not_positive",
                details={"leading_minors": minors},
            )
        square = self.J @ self.J + backend.identity(size)
        if not backend.all_zero(square):
            raise HermitianStructureError(
                "J^2 != -Id",
                error_code="j_not_complex",
                details={"residual": _render(square)},
            )
        compatibility = self.J.T @ self.g @ self.J - self.g
        if not backend.all_zero(compatibility):
            raise HermitianStructureError(
                "g(JX, JY) != g(X, Y)",
                error_code="j_not_orthogonal",
                details={"residual": _render(compatibility)},
            )

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @cached_property
    def g_inverse(self) -> np.ndarray:
        return inverse(self.g, self.backend)

    def inner(self, x: np.ndarray, y: np.ndarray):
        return x @ self.g @ y

    def norm_sq(self, x: np.ndarray):
        return x @ self.g @ x

    def rescaled(self, factor) -> "HermitianStructure":
        """g -> factor * g; J unchanged."""
        factor = self.backend.scalar(factor)
        if not self.backend.is_positive(factor):
            raise ValidationError(f"Rescaling factor must be positive, got {factor}")
        return HermitianStructure(self.g * factor, self.J.copy(), self.backend)

    def in_basis(self, basis: np.ndarray) -> "HermitianStructure":
        """
        Restrict to a J-invariant subspace, expressed in the basis given by the columns.

        Raises:
            HermitianStructureError: If the span is not J-invariant
        """
        backend = self.backend
        left_inverse = inverse(basis.T @ basis, backend) @ basis.T
        image = self.J @ basis
        restricted_j = left_inverse @ image
        if not backend.all_zero(basis @ restricted_j - image):
            raise HermitianStructureError("Subspace is not J-invariant", error_code="not_j_invariant")
        return HermitianStructure(basis.T @ self.g @ basis, restricted_j, backend)


def standard_complex_structure(dim: int, backend: Optional[Backend] = None) -> np.ndarray:
    """J e_{2k} = e_{2k+1}, J e_{2k+1} = -e_{2k}."""
    backend = backend or get_backend()
    if dim % 2:
        raise HermitianStructureError(f"Odd dimension {dim}")
    J = backend.zeros((dim, dim))
    for k in range(0, dim, 2):
        J[k + 1, k] = backend.one
        J[k, k + 1] = -backend.one
    return J


def standard_structure(dim: int, backend: Optional[Backend] = None) -> HermitianStructure:
    """g = Id with the standard J on pairs of basis vectors."""
    backend = backend or get_backend()
    return HermitianStructure(backend.identity(dim), standard_complex_structure(dim, backend), backend)


def rescale_metric(structure: HermitianStructure, factor) -> HermitianStructure:
    """Multiply g by a positive rational factor (|θ|^2 scales by 1/factor)."""
    return structure.rescaled(factor)


def direct_sum_structures(first: HermitianStructure, second: HermitianStructure) -> HermitianStructure:
    backend = first.backend
    return HermitianStructure(
        block_diagonal([first.g, second.g], backend),
        block_diagonal([first.J, second.J], backend),
        backend,
    )


def _render(matrix: np.ndarray):
    return [[format_rational(x) for x in row] for row in matrix]
