"""
Geometric predicates on Hermitian Lie algebras: Kähler, LCK, Vaisman,
integrable LCK and LCS-of-the-first-kind detection, Lee data, and the residuals
of the identities relating dη, δθ and [U, V].

All structures are invariant, so |θ| is constant and grad|θ|^2 = 0 wherever an
identity involves it.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.forms import (
    Connection,
    KForm,
    ce_differential,
    codifferential,
    form_power,
    interior_J,
    interior_vector,
    levi_civita,
    lie_derivative_J,
    lie_derivative_metric,
    sharp,
    wedge,
)
from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import (
    LieAlgebra,
    bracket,
    derived_series,
    derived_subalgebra,
    is_ideal,
    is_unimodular,
)
from app.core.linalg import Subspace, rank
from app.utils.exceptions import DimensionMismatchError, NotApplicableError
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)

FLAG_ORDER = (
    "hermitian",
    "kahler",
    "lck",
    "vaisman",
    "integrable_lck",
    "lcs_first_kind",
    "gauduchon",
    "unimodular",
    "solvable",
)

V_VANISHES = "not applicable — anti-Lee vector vanishes"


@dataclass(frozen=True)
class Witness:
    """Smallest violating basis index tuple (lexicographic) and the residual there."""

    claim: str
    indices: Tuple[int, ...]
    residual: object
    component: Optional[int] = None

    def describe(self) -> str:
        where = f"{self.indices}" + (f"[{self.component}]" if self.component is not None else "")
        return f"{self.claim} fails at {where}: residual {format_rational(self.residual)}"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a predicate; `holds` is None when the predicate does not apply."""

    holds: Optional[bool]
    witness: Optional[Witness] = None
    note: str = ""

    def __bool__(self) -> bool:
        return bool(self.holds)


@dataclass(frozen=True, eq=False)
class LeeData:
    """Lee and anti-Lee forms with their metric duals (dim = 2n + 2)."""

    theta: KForm
    eta: KForm
    U: np.ndarray
    V: np.ndarray
    norm_sq: object
    n: int


@dataclass(frozen=True, eq=False)
class DetaReport:
    """Residuals of dη = (δθ/|θ|² + n) η∧θ and [U,V] = (δθ + n|θ|²) V."""

    form_residual: KForm
    vector_residual: np.ndarray
    form_coefficient: object
    vector_coefficient: object
    holds: bool


@dataclass(frozen=True)
class ClaimResult:
    """One structural claim: status is pass, fail, skipped or outside_hypothesis."""

    name: str
    status: str
    detail: str = ""
    witness: Optional[Witness] = None


@dataclass
class StructureReport:
    flags: Dict[str, Optional[bool]]
    witnesses: Dict[str, Witness] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)
    claims: List[ClaimResult] = field(default_factory=list)
    lee: Optional[LeeData] = None


def _first_nonzero_form(form: KForm, claim: str) -> Optional[Witness]:
    for key in sorted(form.coefficients):
        value = form.coefficients[key]
        if not form.backend.is_zero(value):
            return Witness(claim, key, value)
    return None


def _first_nonzero_vector(vector: np.ndarray, indices: Tuple[int, ...], claim: str, backend) -> Optional[Witness]:
    for k, value in enumerate(vector):
        if not backend.is_zero(value):
            return Witness(claim, indices, value, component=k)
    return None


class HermitianLieAlgebra:
    """
    A Lie algebra with an almost Hermitian structure, caching the Levi-Civita
    connection, the fundamental form and the Lee data between predicates.
    """

    def __init__(self, algebra: LieAlgebra, structure: HermitianStructure):
        if algebra.dim != structure.dim:
            raise DimensionMismatchError(
                f"Algebra of dimension {algebra.dim} with structure of dimension {structure.dim}"
            )
        self.algebra = algebra
        self.structure = structure
        self.backend = algebra.backend

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def connection(self) -> Connection:
        return levi_civita(self.algebra, self.structure)

    @cached_property
    def omega(self) -> KForm:
        """Ω(X, Y) = g(X, JY)."""
        return KForm.from_matrix(self.structure.g @ self.structure.J, self.backend)

    @cached_property
    def d_omega(self) -> KForm:
        return ce_differential(self.algebra, self.omega)

    @cached_property
    def lee(self) -> LeeData:
        """
        η = (1/n) δΩ, θ = i_J η, U and V their metric duals.

        Raises:
            NotApplicableError: dim = 2 (n = 0), where the normalization is undefined
        """
        n = self.dim // 2 - 1
        if n < 1:
            raise NotApplicableError(
                f"Lee data needs dim = 2n + 2 with n >= 1, got dim {self.dim}",
                error_code="n_zero",
            )
        delta_omega = codifferential(self.algebra, self.structure, self.omega, self.connection)
        eta = delta_omega.scale(Fraction(1, n))
        theta = interior_J(self.structure, eta)
        U = sharp(self.structure, theta)
        V = sharp(self.structure, eta)
        norm_sq = theta.evaluate(U)
        logger.debug(f"Lee data computed: n={n}, |θ|²={norm_sq}")
        return LeeData(theta=theta, eta=eta, U=U, V=V, norm_sq=norm_sq, n=n)

    @cached_property
    def d_eta(self) -> KForm:
        return ce_differential(self.algebra, self.lee.eta)

    @cached_property
    def delta_theta(self):
        return codifferential(self.algebra, self.structure, self.lee.theta, self.connection).coefficients.get(
            (), self.backend.zero
        )

    def vector_vanishes(self, vector: np.ndarray) -> bool:
        return self.backend.all_zero(vector)

    # Predicates

    def nijenhuis(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """N_J(x, y) = -[x,y] + [Jx,Jy] - J[Jx,y] - J[x,Jy]."""
        A, J = self.algebra, self.structure.J
        return (
            -bracket(A, x, y)
            + bracket(A, J @ x, J @ y)
            - J @ bracket(A, J @ x, y)
            - J @ bracket(A, x, J @ y)
        )

    def is_hermitian(self) -> Verdict:
        A = self.algebra
        for i, j in itertools.combinations(range(self.dim), 2):
            value = self.nijenhuis(A.basis_vector(i), A.basis_vector(j))
            witness = _first_nonzero_vector(value, (i, j), "N_J = 0", self.backend)
            if witness:
                return Verdict(False, witness)
        return Verdict(True)

    def is_kahler(self) -> Verdict:
        hermitian = self.is_hermitian()
        if not hermitian:
            return hermitian
        witness = _first_nonzero_form(self.d_omega, "dΩ = 0")
        return Verdict(witness is None, witness)

    def conformal_check(self, theta: KForm) -> Verdict:
        """dθ = 0 and dΩ = θ∧Ω for a prescribed 1-form θ."""
        witness = _first_nonzero_form(ce_differential(self.algebra, theta), "dθ = 0")
        if witness:
            return Verdict(False, witness)
        witness = _first_nonzero_form(self.d_omega - wedge(theta, self.omega), "dΩ = θ∧Ω")
        return Verdict(witness is None, witness)

    def is_lck(self) -> Verdict:
        """dθ = 0 and dΩ = θ∧Ω for the Lee form; integrability of J is reported by is_hermitian."""
        return self.conformal_check(self.lee.theta)

    def is_integrable_lck(self) -> Verdict:
        """LCK with η∧dη = 0 and N_J = 0; not applicable when V = 0."""
        lck = self.is_lck()
        if not lck:
            return lck
        if self.vector_vanishes(self.lee.V):
            return Verdict(None, note=V_VANISHES)
        witness = _first_nonzero_form(wedge(self.lee.eta, self.d_eta), "η∧dη = 0")
        if witness:
            return Verdict(False, witness)
        hermitian = self.is_hermitian()
        if not hermitian:
            return hermitian
        return Verdict(True)

    def is_vaisman(self) -> Verdict:
        """LCK with ∇_{e_i} U = 0 for every basis vector."""
        lck = self.is_lck()
        if not lck:
            return lck
        U = self.lee.U
        for i in range(self.dim):
            derivative = self.connection.covariant_derivative(self.algebra.basis_vector(i), U)
            witness = _first_nonzero_vector(derivative, (i,), "∇U = 0", self.backend)
            if witness:
                return Verdict(False, witness)
        return Verdict(True)

    def is_lcs_first_kind(self) -> Verdict:
        """dθ = 0, rank dη = 2n and θ∧η∧(dη)^n a volume form."""
        lee = self.lee
        witness = _first_nonzero_form(ce_differential(self.algebra, lee.theta), "dθ = 0")
        if witness:
            return Verdict(False, witness)
        d_eta_rank = rank(self.d_eta.as_matrix(), self.backend)
        if d_eta_rank != 2 * lee.n:
            return Verdict(False, Witness("rank dη = 2n", (), self.backend.scalar(d_eta_rank - 2 * lee.n)))
        volume = wedge(wedge(lee.theta, lee.eta), form_power(self.d_eta, lee.n))
        top = volume.top_coefficient()
        if self.backend.is_zero(top):
            return Verdict(False, Witness("θ∧η∧(dη)^n ≠ 0", tuple(range(self.dim)), top))
        return Verdict(True)

    def is_gauduchon(self) -> Verdict:
        value = self.delta_theta
        if self.backend.is_zero(value):
            return Verdict(True)
        return Verdict(False, Witness("δθ = 0", (), value))

    # Identities

    def theorem_delta_residual(self):
        """|θ|² δθ + dη(U,V) + n|θ|⁴."""
        lee = self.lee
        return lee.norm_sq * self.delta_theta + self.d_eta.evaluate(lee.U, lee.V) + lee.n * lee.norm_sq ** 2

    def theorem_deta_check(self) -> DetaReport:
        """dη - (δθ/|θ|² + n) η∧θ and [U,V] - (δθ + n|θ|²) V; grad|θ|² = 0 here."""
        lee = self.lee
        if self.backend.is_zero(lee.norm_sq):
            raise NotApplicableError(V_VANISHES, error_code="v_zero")
        form_coefficient = self.delta_theta / lee.norm_sq + lee.n
        vector_coefficient = self.delta_theta + lee.n * lee.norm_sq
        form_residual = self.d_eta - wedge(lee.eta, lee.theta).scale(form_coefficient)
        vector_residual = bracket(self.algebra, lee.U, lee.V) - lee.V * vector_coefficient
        holds = form_residual.is_zero() and self.backend.all_zero(vector_residual)
        return DetaReport(form_residual, vector_residual, form_coefficient, vector_coefficient, holds)

    def sss_residual(self) -> KForm:
        """|θ|⁴ dη - dη(U,V) θ∧η."""
        lee = self.lee
        return self.d_eta.scale(lee.norm_sq ** 2) - wedge(lee.theta, lee.eta).scale(
            self.d_eta.evaluate(lee.U, lee.V)
        )

    def lee_identities_residual(self) -> Tuple[KForm, KForm]:
        """(i_U Ω + η, i_V Ω - θ)."""
        lee = self.lee
        return (
            interior_vector(self.omega, lee.U) + lee.eta,
            interior_vector(self.omega, lee.V) - lee.theta,
        )

    def ijdeta_residual(self) -> KForm:
        """i_J dη, zero on every Hermitian structure."""
        return interior_J(self.structure, self.d_eta)

    def lie_v_residual(self) -> np.ndarray:
        """(L_V g)(Y,Z) - g(Y, ((L_V J)∘J) Z) as a matrix."""
        V = self.lee.V
        lie_g = lie_derivative_metric(self.algebra, self.structure, V)
        lie_j = lie_derivative_J(self.algebra, self.structure, V)
        return lie_g - self.structure.g @ lie_j @ self.structure.J

    def anti_lee_killing_check(self) -> Verdict:
        """If V is Killing then L_V J = 0 and [U, V] = 0; vacuous otherwise."""
        lee = self.lee
        if not self.backend.all_zero(lie_derivative_metric(self.algebra, self.structure, lee.V)):
            return Verdict(True, note="V is not Killing")
        lie_j = lie_derivative_J(self.algebra, self.structure, lee.V)
        for j in range(self.dim):
            witness = _first_nonzero_vector(lie_j[:, j], (j,), "L_V J = 0", self.backend)
            if witness:
                return Verdict(False, witness)
        witness = _first_nonzero_vector(bracket(self.algebra, lee.U, lee.V), (), "[U, V] = 0", self.backend)
        return Verdict(witness is None, witness)

    def bracket_coefficient(self):
        """κ with [U, V] = κ V, or None if [U, V] is not a multiple of V."""
        lee = self.lee
        if self.backend.is_zero(lee.norm_sq):
            return None
        image = bracket(self.algebra, lee.U, lee.V)
        kappa = self.structure.inner(image, lee.V) / lee.norm_sq
        if not self.backend.all_zero(image - lee.V * kappa):
            return None
        return kappa

    def normalized_c(self):
        """κ/|θ|², the bracket constant after rescaling the metric to |θ| = 1."""
        kappa = self.bracket_coefficient()
        if kappa is None:
            return None
        return kappa / self.lee.norm_sq

    # Structural theorems

    def kahler_ideal(self) -> Subspace:
        """⟨U, V⟩^⊥."""
        lee = self.lee
        return Subspace.span([lee.U, lee.V], self.dim, self.backend).orthogonal_complement(self.structure.g)

    def u_perp(self) -> Subspace:
        return Subspace.span([self.lee.U], self.dim, self.backend).orthogonal_complement(self.structure.g)

    def structural_theorem_suite(self) -> List[ClaimResult]:
        """
        Ideal / Kähler claims for ⟨U,V⟩^⊥ and, for unimodular algebras, solvability,
        [g,g] = U^⊥ and abelianness of the ideal.

        Raises:
            NotApplicableError: If the structure is not integrable LCK
        """
        integrable = self.is_integrable_lck()
        if not integrable:
            raise NotApplicableError(
                "Structural claims need an integrable LCK structure",
                error_code="not_integrable_lck",
                details={"reason": integrable.witness.describe() if integrable.witness else integrable.note},
            )
        A, backend, lee = self.algebra, self.backend, self.lee
        claims: List[ClaimResult] = []

        kappa = self.bracket_coefficient()
        claims.append(ClaimResult(
            "uv_subalgebra",
            "pass" if kappa is not None else "fail",
            f"[U,V] = {format_rational(kappa)}·V" if kappa is not None else "[U,V] not in ⟨V⟩",
        ))

        ideal = self.kahler_ideal()
        claims.append(ClaimResult("kahler_ideal.ideal", "pass" if is_ideal(A, ideal) else "fail",
                                  f"dim ⟨U,V⟩^⊥ = {ideal.dim}"))
        claims.append(ClaimResult("kahler_ideal.j_invariant",
                                  "pass" if ideal.is_invariant(self.structure.J) else "fail"))
        closed_witness = None
        vectors = ideal.vectors
        for a, b, c in itertools.combinations(range(len(vectors)), 3):
            value = self.d_omega.evaluate(vectors[a], vectors[b], vectors[c])
            if not backend.is_zero(value):
                closed_witness = Witness("dω = 0 on ⟨U,V⟩^⊥", (a, b, c), value)
                break
        claims.append(ClaimResult("kahler_ideal.closed", "fail" if closed_witness else "pass",
                                  witness=closed_witness))

        derived = derived_subalgebra(A)
        u_perp = self.u_perp()
        claims.append(ClaimResult("derived_in_u_perp",
                                  "pass" if derived.is_subspace_of(u_perp) else "fail",
                                  f"dim [g,g] = {derived.dim}, dim U^⊥ = {u_perp.dim}"))

        unimodular = is_unimodular(A)
        c = self.normalized_c()
        equal = derived.equals(u_perp)
        detail = f"dim [g,g] = {derived.dim}, dim U^⊥ = {u_perp.dim}, c = {format_rational(c) if c is not None else '?'}"
        hypothesis = unimodular or (c is not None and c > -1 and not backend.is_zero(c))
        if hypothesis:
            claims.append(ClaimResult("derived_equals_u_perp", "pass" if equal else "fail", detail))
        else:
            claims.append(ClaimResult("derived_equals_u_perp", "outside_hypothesis",
                                      detail + (" (equal)" if equal else " (proper subspace)")))

        if not unimodular:
            for name in ("solvable", "h_abelian", "uv_equals_nv"):
                claims.append(ClaimResult(name, "skipped", "algebra is not unimodular"))
            return claims

        series = derived_series(A)
        solvable = series[-1] == 0 and len(series) <= 5
        claims.append(ClaimResult("solvable", "pass" if solvable else "fail", f"derived series {series}"))
        h_abelian = all(
            backend.all_zero(bracket(A, x, y))
            for x, y in itertools.combinations(ideal.vectors, 2)
        )
        claims.append(ClaimResult("h_abelian", "pass" if h_abelian else "fail"))
        target = lee.n * lee.norm_sq
        uvnv = kappa is not None and backend.equal(kappa, target)
        claims.append(ClaimResult("uv_equals_nv", "pass" if uvnv else "fail",
                                  f"[U,V] = {format_rational(kappa) if kappa is not None else '?'}·V, "
                                  f"n|θ|² = {format_rational(target)}"))
        return claims

    def analyze(self) -> StructureReport:
        """Every flag of the structure report, with witnesses for false flags."""
        report = StructureReport(flags={})

        def record(name: str, verdict: Verdict) -> None:
            report.flags[name] = verdict.holds
            if verdict.witness is not None and not verdict.holds:
                report.witnesses[name] = verdict.witness
            if verdict.note:
                report.notes[name] = verdict.note

        record("hermitian", self.is_hermitian())
        record("kahler", self.is_kahler())
        try:
            lee = self.lee
        except NotApplicableError as e:
            lee = None
            for name in ("lck", "vaisman", "integrable_lck", "lcs_first_kind", "gauduchon"):
                record(name, Verdict(None, note=e.message))
        if lee is not None:
            report.lee = lee
            record("lck", self.is_lck())
            record("vaisman", self.is_vaisman())
            record("integrable_lck", self.is_integrable_lck())
            record("lcs_first_kind", self.is_lcs_first_kind())
            record("gauduchon", self.is_gauduchon())
        unimodular = is_unimodular(self.algebra)
        record("unimodular", Verdict(unimodular, None if unimodular else self._unimodular_witness()))
        series = derived_series(self.algebra)
        solvable = series[-1] == 0
        record("solvable", Verdict(
            solvable,
            None if solvable else Witness("derived series reaches 0", tuple(series), self.backend.scalar(series[-1])),
        ))

        if report.flags.get("integrable_lck"):
            report.claims = self.structural_theorem_suite()
            if report.flags.get("vaisman"):
                report.notes["vaisman_and_integrable"] = "Vaisman and integrable LCK flags both hold"
        if report.flags.get("vaisman") and lee is not None and not self.vector_vanishes(lee.U):
            lcs = report.flags.get("lcs_first_kind")
            report.notes["vaisman_lcs_first_kind"] = (
                "Vaisman structure has an underlying LCS structure of the first kind"
                if lcs else "Vaisman structure without LCS structure of the first kind"
            )
        logger.info("Structure report: " + ", ".join(f"{k}={v}" for k, v in report.flags.items()))
        return report

    def _unimodular_witness(self) -> Optional[Witness]:
        A = self.algebra
        for i in range(A.dim):
            trace = sum(A.constants[i, j, j] for j in range(A.dim))
            if not self.backend.is_zero(trace):
                return Witness("trace(ad_x) = 0", (i,), trace)
        return None


# Functional entry points


def fundamental_form(algebra: LieAlgebra, structure: HermitianStructure) -> KForm:
    return HermitianLieAlgebra(algebra, structure).omega


def lee_data(algebra: LieAlgebra, structure: HermitianStructure) -> LeeData:
    return HermitianLieAlgebra(algebra, structure).lee


def nijenhuis(algebra: LieAlgebra, structure: HermitianStructure, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return HermitianLieAlgebra(algebra, structure).nijenhuis(x, y)


def is_hermitian(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_hermitian()


def is_kahler(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_kahler()


def is_lck(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_lck()


def is_integrable_lck(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_integrable_lck()


def is_vaisman(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_vaisman()


def is_lcs_first_kind(algebra: LieAlgebra, structure: HermitianStructure) -> Verdict:
    return HermitianLieAlgebra(algebra, structure).is_lcs_first_kind()


def theorem_delta_residual(algebra: LieAlgebra, structure: HermitianStructure):
    return HermitianLieAlgebra(algebra, structure).theorem_delta_residual()


def theorem_deta_check(algebra: LieAlgebra, structure: HermitianStructure) -> DetaReport:
    return HermitianLieAlgebra(algebra, structure).theorem_deta_check()


def structural_theorem_suite(algebra: LieAlgebra, structure: HermitianStructure) -> List[ClaimResult]:
    return HermitianLieAlgebra(algebra, structure).structural_theorem_suite()


def analyze(algebra: LieAlgebra, structure: HermitianStructure) -> StructureReport:
    return HermitianLieAlgebra(algebra, structure).analyze()
