"""
Kähler triples (𝔥, u, v) with [u, v] = c v, the four matrix conditions, the
semidirect product 𝔯_{2,c} ⋉_{u,v} 𝔥 and the correspondence between classes.

Matrices act on the 𝔥-basis with columns as images. In the semidirect product
the basis is (U, V, 𝔥-basis).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.hermitian import (
    HermitianStructure,
    direct_sum_structures,
    standard_complex_structure,
    standard_structure,
)
from app.core.forms import flat
from app.core.lck_analysis import HermitianLieAlgebra
from app.core.lie_algebra import (
    LieAlgebra,
    abelian,
    bracket,
    derivation_violation,
    direct_sum,
    from_brackets,
    in_basis,
    is_abelian,
)
from app.core.linalg import adjoint, block_diagonal, commutator, inverse
from app.core.scalars import Backend, get_backend
from app.utils.exceptions import (
    CorrespondenceError,
    DimensionMismatchError,
    NotApplicableError,
    TripleError,
    ValidationError,
)
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)

BRACKET_CONDITION = "[u,v] = cv"
INTEGRABILITY_CONDITION = "[v+uJ,J] = 0"
V_CONDITION = "v*J + Jv = 0"
U_CONDITION = "J + u*J + Ju = 0"
CONDITIONS = (BRACKET_CONDITION, INTEGRABILITY_CONDITION, V_CONDITION, U_CONDITION)


@dataclass(frozen=True, eq=False)
class KahlerTriple:
    """
    Kähler algebra 𝔥 (dim 2n) with derivations u, v and constant c.

    Validated on construction: 𝔥 is Kähler and u, v are derivations of 𝔥.
    """

    algebra: LieAlgebra
    structure: HermitianStructure
    u: np.ndarray
    v: np.ndarray
    c: object

    def __post_init__(self):
        object.__setattr__(self, "c", self.algebra.backend.scalar(self.c))
        self.validate()

    @property
    def backend(self) -> Backend:
        return self.algebra.backend

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def n(self) -> int:
        return self.dim // 2

    def validate(self) -> None:
        """
        Raises:
            DimensionMismatchError: On shape mismatches or 𝔥 = 0
            TripleError: If 𝔥 is not Kähler or u, v are not derivations
        """
        dim = self.algebra.dim
        if self.structure.dim != dim:
            raise DimensionMismatchError(f"Structure of dimension {self.structure.dim} on 𝔥 of dimension {dim}")
        if dim < 2:
            raise DimensionMismatchError("𝔥 must be nonzero")
        for name, matrix in (("u", self.u), ("v", self.v)):
            if np.shape(matrix) != (dim, dim):
                raise DimensionMismatchError(f"{name} has shape {np.shape(matrix)}, expected ({dim}, {dim})")

        kahler = HermitianLieAlgebra(self.algebra, self.structure).is_kahler()
        if not kahler:
            raise TripleError(
                "𝔥 is not Kähler",
                error_code="not_kahler",
                details={"witness": kahler.witness.describe()},
            )
        for name, matrix in (("u", self.u), ("v", self.v)):
            violation = derivation_violation(self.algebra, matrix)
            if violation is not None:
                pair, residual = violation
                raise TripleError(
                    f"{name} is not a derivation of 𝔥",
                    error_code="not_derivation",
                    details={"matrix": name, "pair": list(pair), "residual": [format_rational(x) for x in residual]},
                )

    def with_matrices(self, u: np.ndarray, v: np.ndarray, c) -> "KahlerTriple":
        return KahlerTriple(self.algebra, self.structure, u, v, self.backend.scalar(c))


@dataclass(frozen=True, eq=False)
class TripleReport:
    """Residual matrices of the four conditions plus the [v+Ju, J] diagnostic."""

    residuals: Dict[str, np.ndarray]
    diagnostic: np.ndarray
    abelian: bool
    backend: Backend

    @property
    def failed(self) -> List[str]:
        return [name for name in CONDITIONS if not self.backend.all_zero(self.residuals[name])]

    @property
    def in_h(self) -> bool:
        return not self.failed

    @property
    def in_a(self) -> bool:
        return self.in_h and self.abelian

    @property
    def norms(self) -> Dict[str, object]:
        return {name: self.backend.max_abs(matrix) for name, matrix in self.residuals.items()}

    @property
    def diagnostic_norm(self):
        return self.backend.max_abs(self.diagnostic)


def check_triple(triple: KahlerTriple) -> TripleReport:
    """Evaluate the four matrix conditions with u* = g^-1 u^T g."""
    backend = triple.backend
    J, g = triple.structure.J, triple.structure.g
    u, v, c = triple.u, triple.v, triple.c
    identity = backend.identity(triple.dim)
    u_star = adjoint(u, g, backend)
    v_star = adjoint(v, g, backend)
    residuals = {
        BRACKET_CONDITION: commutator(u, v) - v * c,
        INTEGRABILITY_CONDITION: commutator(v + u @ J, J),
        V_CONDITION: v_star @ J + J @ v,
        U_CONDITION: J + u_star @ J + J @ u,
    }
    report = TripleReport(
        residuals=residuals,
        diagnostic=commutator(v + J @ u, J),
        abelian=is_abelian(triple.algebra),
        backend=backend,
    )
    logger.debug(f"Triple conditions: failed={report.failed}, abelian={report.abelian}")
    return report


def semidirect(triple: KahlerTriple) -> Tuple[LieAlgebra, HermitianStructure]:
    """
    𝔯_{2,c} ⋉_{u,v} 𝔥 with the product Hermitian structure.

    Raises:
        LieAlgebraError: If the brackets fail Jacobi, i.e. [u, v] != c v
    """
    backend = triple.backend
    m = triple.dim
    dim = m + 2
    constants = backend.zeros((dim, dim, dim))
    constants[0, 1, 1] = triple.c
    constants[1, 0, 1] = -triple.c
    for j in range(m):
        for k in range(m):
            constants[0, 2 + j, 2 + k] = triple.u[k, j]
            constants[2 + j, 0, 2 + k] = -triple.u[k, j]
            constants[1, 2 + j, 2 + k] = triple.v[k, j]
            constants[2 + j, 1, 2 + k] = -triple.v[k, j]
    constants[2:, 2:, 2:] = triple.algebra.constants

    names: Tuple[str, ...] = ()
    if triple.algebra.names:
        names = ("U", "V") + tuple(triple.algebra.names)
    algebra = LieAlgebra(constants, backend, names)
    structure = HermitianStructure(
        block_diagonal([backend.identity(2), triple.structure.g], backend),
        block_diagonal([standard_complex_structure(2, backend), triple.structure.J], backend),
        backend,
    )
    logger.info(f"Semidirect product of dimension {dim} built with c={format_rational(triple.c)}")
    return algebra, structure


def semidirect_lck_check(triple: KahlerTriple):
    """
    dΩ = U^♭∧Ω on the semidirect product, U the first basis vector.

    This is the form fixed by the construction; a product violating the last two
    conditions may still be LCK with a rescaled Lee form.
    """
    algebra, structure = semidirect(triple)
    context = HermitianLieAlgebra(algebra, structure)
    return context.conformal_check(flat(structure, algebra.basis_vector(0)))


# Correspondence A_{n,c} <-> A_{n,1}


def _require_abelian(triple: KahlerTriple) -> None:
    if not is_abelian(triple.algebra):
        raise CorrespondenceError("The correspondence only applies to abelian 𝔥", error_code="non_abelian")


def correspondence(triple: KahlerTriple) -> KahlerTriple:
    """(𝔥, u, v) ↦ (𝔥, u/c + ((1 - c)/(2c)) Id, v/c), landing in c = 1."""
    backend = triple.backend
    c = triple.c
    if backend.is_zero(c):
        raise CorrespondenceError("c = 0 has no correspondence", error_code="c_zero")
    _require_abelian(triple)
    shift = (1 - c) / (2 * c)
    u = triple.u / c + backend.identity(triple.dim) * shift
    return triple.with_matrices(u, triple.v / c, 1)


def inverse_correspondence(triple: KahlerTriple, c) -> KahlerTriple:
    """(𝔥, u, v) in c = 1 ↦ (𝔥, c u - ((1 - c)/2) Id, c v)."""
    backend = triple.backend
    c = backend.scalar(c)
    if backend.is_zero(c):
        raise CorrespondenceError("c = 0 has no correspondence", error_code="c_zero")
    if not backend.equal(triple.c, 1):
        raise CorrespondenceError(
            f"Inverse correspondence starts from c = 1, got c = {format_rational(triple.c)}",
            error_code="c_not_one",
        )
    _require_abelian(triple)
    u = triple.u * c - backend.identity(triple.dim) * ((1 - c) / 2)
    return triple.with_matrices(u, triple.v * c, c)


def transport(triple: KahlerTriple, to_c) -> KahlerTriple:
    """Move a triple from its class c to class to_c through c = 1."""
    to_c = triple.backend.scalar(to_c)
    if triple.backend.equal(triple.c, to_c):
        return triple
    normalized = triple if triple.backend.equal(triple.c, 1) else correspondence(triple)
    if triple.backend.equal(to_c, 1):
        return normalized
    return inverse_correspondence(normalized, to_c)


# Builders


def build_r2c(c, backend: Optional[Backend] = None) -> Tuple[LieAlgebra, HermitianStructure]:
    """[U, V] = c V with g = Id and JU = V."""
    backend = backend or get_backend()
    algebra = from_brackets(2, {(0, 1): {1: backend.scalar(c)}}, backend, names=("U", "V"))
    return algebra, standard_structure(2, backend)


def build_abelian_kahler(n: int, backend: Optional[Backend] = None) -> Tuple[LieAlgebra, HermitianStructure]:
    """Abelian 𝔥 of dimension 2n with g = Id and J X_k = JX_k."""
    backend = backend or get_backend()
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    names = []
    for k in range(1, n + 1):
        names += [f"X{k}", f"JX{k}"]
    return abelian(2 * n, backend, names), standard_structure(2 * n, backend)


def _matrix(rows, backend: Backend) -> np.ndarray:
    return backend.array([[backend.scalar(x) for x in row] for row in rows])


def build_gb(b, backend: Optional[Backend] = None) -> KahlerTriple:
    """𝔤_b: u = [[-1/2, -b], [b, -1/2]], v = 0, c = 1 on the abelian plane."""
    backend = backend or get_backend()
    b = backend.scalar(b)
    half = backend.scalar(Fraction(1, 2))
    algebra, structure = build_abelian_kahler(1, backend)
    u = _matrix([[-half, -b], [b, -half]], backend)
    return KahlerTriple(algebra, structure, u, backend.zeros((2, 2)), backend.one)


def build_d4(backend: Optional[Backend] = None) -> KahlerTriple:
    """𝔡₄: u X = 0, u JX = -JX, v X = 0, v JX = X, c = 1."""
    backend = backend or get_backend()
    algebra, structure = build_abelian_kahler(1, backend)
    u = _matrix([[0, 0], [0, -1]], backend)
    v = _matrix([[0, 1], [0, 0]], backend)
    return KahlerTriple(algebra, structure, u, v, backend.one)


def build_dim(n: int, backend: Optional[Backend] = None) -> KahlerTriple:
    """
    Unimodular example in dimension 2n + 2: c = n with, on each of the n planes,
    u = diag((n-1)/2, -(n+1)/2) and v = [[0, n], [0, 0]].
    """
    backend = backend or get_backend()
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    algebra, structure = build_abelian_kahler(n, backend)
    u_block = _matrix([[Fraction(n - 1, 2), 0], [0, Fraction(-(n + 1), 2)]], backend)
    v_block = _matrix([[0, n], [0, 0]], backend)
    u = block_diagonal([u_block] * n, backend)
    v = block_diagonal([v_block] * n, backend)
    return KahlerTriple(algebra, structure, u, v, backend.scalar(n))


def build_counterexample(backend: Optional[Backend] = None) -> KahlerTriple:
    """
    Non-abelian 𝔥 with [A, B] = A, JA = B, and uA = -A, uB = 0, vA = 0, vB = -A, c = -1.
    Satisfies the four conditions but its semidirect product is not unimodular.
    """
    backend = backend or get_backend()
    algebra = from_brackets(2, {(0, 1): {0: 1}}, backend, names=("A", "B"))
    structure = standard_structure(2, backend)
    u = _matrix([[-1, 0], [0, 0]], backend)
    v = _matrix([[0, -1], [0, 0]], backend)
    return KahlerTriple(algebra, structure, u, v, backend.scalar(-1))


def direct_sum_triples(first: KahlerTriple, second: KahlerTriple) -> KahlerTriple:
    """(𝔥₁ ⊕ 𝔥₂, u₁ ⊕ u₂, v₁ ⊕ v₂) for triples with the same c."""
    backend = first.backend
    if not backend.equal(first.c, second.c):
        raise TripleError(
            f"Direct sum needs equal c, got {format_rational(first.c)} and {format_rational(second.c)}",
            error_code="c_mismatch",
        )
    return KahlerTriple(
        direct_sum(first.algebra, second.algebra),
        direct_sum_structures(first.structure, second.structure),
        block_diagonal([first.u, second.u], backend),
        block_diagonal([first.v, second.v], backend),
        first.c,
    )


def change_basis(triple: KahlerTriple, basis: np.ndarray) -> KahlerTriple:
    """Express the triple in the 𝔥-basis given by the columns of `basis`."""
    backend = triple.backend
    basis_inverse = inverse(basis, backend)
    return KahlerTriple(
        in_basis(triple.algebra, basis),
        triple.structure.in_basis(basis),
        basis_inverse @ triple.u @ basis,
        basis_inverse @ triple.v @ basis,
        triple.c,
    )


def extract_triple(algebra: LieAlgebra, structure: HermitianStructure) -> KahlerTriple:
    """
    Decompose an integrable LCK algebra as 𝔯_{2,c} ⋉_{u,v} 𝔥.

    The metric is first rescaled by |θ|² so that |θ| = 1 (θ itself does not change),
    then 𝔥 = ⟨U, V⟩^⊥, u = ad_U|𝔥, v = ad_V|𝔥 and c = κ/|θ|² where [U, V] = κ V.

    Raises:
        NotApplicableError: If the structure is not integrable LCK
    """
    context = HermitianLieAlgebra(algebra, structure)
    integrable = context.is_integrable_lck()
    if not integrable:
        raise NotApplicableError(
            "Only integrable LCK structures decompose as semidirect products",
            error_code="not_integrable_lck",
            details={"reason": integrable.witness.describe() if integrable.witness else integrable.note},
        )
    backend = algebra.backend
    lee = context.lee
    scale = lee.norm_sq
    rescaled = structure.rescaled(scale)
    U = lee.U / scale
    V = lee.V / scale
    c = context.normalized_c()
    if c is None:
        raise NotApplicableError("[U, V] is not a multiple of V", error_code="uv_not_aligned")

    basis = context.kahler_ideal().basis
    h_algebra = in_basis(algebra, basis)
    h_structure = rescaled.in_basis(basis)
    left_inverse = inverse(basis.T @ basis, backend) @ basis.T
    u = backend.zeros((basis.shape[1], basis.shape[1]))
    v = backend.zeros((basis.shape[1], basis.shape[1]))
    for j in range(basis.shape[1]):
        u[:, j] = left_inverse @ bracket(algebra, U, basis[:, j])
        v[:, j] = left_inverse @ bracket(algebra, V, basis[:, j])
    logger.info(f"Extracted triple with n={basis.shape[1] // 2}, c={format_rational(c)}")
    return KahlerTriple(h_algebra, h_structure, u, v, c)
