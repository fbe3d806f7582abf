"""
Classification of triples in A_{1,1}, i.e. of 4-dimensional unimodular integrable
LCK Lie algebras: the family 𝔤_b (v = 0) and the single algebra 𝔡₄ (rank v = 1).
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import LieAlgebra
from app.core.linalg import inverse, nullspace, rank
from app.core.scalars import Backend, get_backend
from app.core.triples import KahlerTriple, check_triple
from app.utils.exceptions import ClassificationError, NotApplicableError
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)

FAMILY_GB = "Gb"
D4 = "D4"


@dataclass(frozen=True, eq=False)
class Dim4Class:
    """Classification tag with the adapted orthonormal basis (X, JX) as columns."""

    tag: str
    basis: np.ndarray
    backend: Backend
    b: Optional[object] = None

    def describe(self) -> str:
        if self.tag == D4:
            return D4
        return f"FamilyGb({format_rational(self.b)})"


def _float_triple(triple: KahlerTriple) -> KahlerTriple:
    backend = get_backend("float")
    algebra = LieAlgebra(backend.convert(triple.algebra.constants), backend, triple.algebra.names)
    structure = HermitianStructure(backend.convert(triple.structure.g), backend.convert(triple.structure.J), backend)
    return KahlerTriple(algebra, structure, backend.convert(triple.u), backend.convert(triple.v), triple.c)


def _unit(triple: KahlerTriple, vector: np.ndarray) -> np.ndarray:
    return vector / triple.backend.sqrt(triple.structure.norm_sq(vector))


def _kernel_vector(matrix: np.ndarray, backend: Backend) -> np.ndarray:
    """Kernel vector with its first nonzero coordinate positive."""
    vector = nullspace(matrix, backend)[:, 0]
    for x in vector:
        if not backend.is_zero(x):
            return vector if x > 0 else -vector
    raise ClassificationError("Empty kernel vector")


def _adapted_basis(triple: KahlerTriple, rank_v: int) -> np.ndarray:
    backend = triple.backend
    if rank_v == 0:
        start = backend.basis_vector(2, 0)
    else:
        start = _kernel_vector(triple.v, backend)
    X = _unit(triple, start)
    JX = triple.structure.J @ X
    basis = backend.zeros((2, 2))
    basis[:, 0] = X
    basis[:, 1] = JX
    return basis


def classify_dim4(triple: KahlerTriple) -> Dim4Class:
    """
    Tag a triple of A_{1,1} as FamilyGb(b) or D4.

    Under the exact backend the orthonormal basis needs rational square roots; when
    they are not available the triple is moved to the float backend.

    Raises:
        ClassificationError: If the triple is not in A_{1,1} or does not match the normal forms
    """
    if triple.dim != 2:
        raise ClassificationError(f"Expected dim 𝔥 = 2, got {triple.dim}", error_code="wrong_dimension")
    report = check_triple(triple)
    if not report.in_a or not triple.backend.equal(triple.c, 1):
        raise ClassificationError(
            "Triple is not in A_{1,1}",
            error_code="not_in_a11",
            details={"failed": report.failed, "abelian": report.abelian, "c": format_rational(triple.c)},
        )

    rank_v = rank(triple.v, triple.backend)
    if rank_v == 2:
        raise ClassificationError("v has rank 2, which no valid triple allows", error_code="v_rank_two")
    try:
        basis = _adapted_basis(triple, rank_v)
    except NotApplicableError:
        logger.info("Orthonormal basis needs irrational square roots, switching to the float backend")
        triple = _float_triple(triple)
        basis = _adapted_basis(triple, rank_v)

    backend = triple.backend
    basis_inverse = inverse(basis, backend)
    u = basis_inverse @ triple.u @ basis
    v = basis_inverse @ triple.v @ basis
    half = backend.scalar(Fraction(1, 2))

    if rank_v == 0:
        X, JX = basis[:, 0], basis[:, 1]
        b = triple.structure.inner(triple.u @ X, JX)
        expected = backend.array([[-half, -b], [b, -half]])
        if not backend.equal(triple.structure.inner(triple.u @ X, X), -half) or not backend.all_zero(u - expected):
            raise ClassificationError(
                "u does not have the 𝔤_b normal form",
                error_code="bad_normal_form",
                details={"u": [[format_rational(x) for x in row] for row in u]},
            )
        result = Dim4Class(FAMILY_GB, basis, backend, b)
    else:
        expected_u = backend.array([[0, 0], [0, -1]])
        expected_v = backend.array([[0, 1], [0, 0]])
        if not backend.all_zero(u - expected_u) or not backend.all_zero(v - expected_v):
            raise ClassificationError(
                "u, v do not have the 𝔡₄ normal form",
                error_code="bad_normal_form",
                details={
                    "u": [[format_rational(x) for x in row] for row in u],
                    "v": [[format_rational(x) for x in row] for row in v],
                },
            )
        result = Dim4Class(D4, basis, backend)
    logger.info(f"Classified dimension-4 triple as {result.describe()}")
    return result


def triples_isomorphic_dim4(first: KahlerTriple, second: KahlerTriple) -> bool:
    """Both 𝔡₄, or both 𝔤_b with literally equal b (b and -b are kept apart)."""
    a, b = classify_dim4(first), classify_dim4(second)
    if a.tag != b.tag:
        return False
    if a.tag == D4:
        return True
    backend = a.backend if not a.backend.exact else b.backend
    return backend.equal(a.b, b.b)


def random_orthonormal_basis_dim2(
    rng: random.Random,
    backend: Optional[Backend] = None,
    bound: int = 50,
) -> np.ndarray:
    """
    Exact orthonormal basis (X, JX) for g = Id and the standard J, with X a rational
    point (cos, sin) = ((1 - t²)/(1 + t²), 2t/(1 + t²)) on the unit circle.
    """
    backend = backend or get_backend()
    t = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    cos = (1 - t * t) / (1 + t * t)
    sin = 2 * t / (1 + t * t)
    if rng.random() < 0.5:
        cos, sin = -cos, -sin
    return backend.array([[cos, -sin], [sin, cos]])
