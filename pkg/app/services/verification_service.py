"""
Verification suite: replays every checkable identity and theorem on the example
corpus and prints one verdict per check.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from app.core.classification import (
    D4,
    FAMILY_GB,
    classify_dim4,
    random_orthonormal_basis_dim2,
    triples_isomorphic_dim4,
)
from app.core.forms import cartan_residual, ce_differential, lie_derivative_form
from app.core.lck_analysis import HermitianLieAlgebra
from app.core.lie_algebra import ad_traces, derived_subalgebra, is_unimodular
from app.core.scalars import Backend, get_backend
from app.core.triples import (
    INTEGRABILITY_CONDITION,
    U_CONDITION,
    V_CONDITION,
    KahlerTriple,
    build_abelian_kahler,
    build_counterexample,
    build_d4,
    build_dim,
    build_gb,
    change_basis,
    check_triple,
    correspondence,
    direct_sum_triples,
    semidirect,
    semidirect_lck_check,
    transport,
)
from app.models.report_models import CheckResultModel, VerificationSummaryModel
from app.services.example_registry import Example, corpus
from app.utils.exceptions import BaseAppException, ValidationError
from app.utils.validators import format_rational

logger = logging.getLogger(__name__)

GROUPS = (
    "identities",
    "residuals",
    "structure",
    "conditions",
    "counterexample",
    "dim4",
    "builders",
    "correspondence",
)

# Aliases accepted by --only, each standing for its topic groups
SECTIONS = {
    "section2": ("identities",),
    "section3": ("residuals",),
    "section4": ("structure",),
    "section5": ("conditions", "counterexample", "correspondence"),
    "section6": ("dim4",),
    "section7": ("builders",),
}


def expand_groups(names: Sequence[str]) -> List[str]:
    """Replace section names by their groups, keeping first occurrences in order."""
    expanded: List[str] = []
    for name in names:
        for group in SECTIONS.get(name, (name,)):
            if group not in expanded:
                expanded.append(group)
    return expanded


Outcome = Tuple[bool, str]


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        suffix = f" ({self.detail})" if self.detail else ""
        return f"[{verdict}] {self.group}: {self.name}{suffix}"


def violating_triples(backend: Optional[Backend] = None) -> List[Tuple[KahlerTriple, Tuple[str, ...]]]:
    """
    Triples on the abelian plane that keep [u, v] = c v (so the semidirect product is
    a Lie algebra) but break exactly the listed conditions.
    """
    backend = backend or get_backend()
    algebra, structure = build_abelian_kahler(1, backend)
    zero = backend.zeros((2, 2))
    identity = backend.identity(2)
    cases: List[Tuple[KahlerTriple, Tuple[str, ...]]] = []
    # trace u = -1 but u does not commute with J
    for a in (0, 1, -2, Fraction(1, 3), Fraction(-3, 4), 2, Fraction(5, 2)):
        u = backend.array([[a, 0], [0, -1 - backend.scalar(a)]])
        cases.append((KahlerTriple(algebra, structure, u, zero, 1), (INTEGRABILITY_CONDITION,)))
    # u = t Id with t != -1/2
    for t in (0, 1, -1, Fraction(1, 4), Fraction(-2, 3), 3, Fraction(-7, 5)):
        u = identity * backend.scalar(t)
        cases.append((KahlerTriple(algebra, structure, u, zero, 1), (U_CONDITION,)))
    # v = s Id commutes with everything, so c = 0; v*J + Jv = 2sJ
    half = backend.scalar(Fraction(-1, 2))
    for s in (1, -1, 2, Fraction(1, 2), Fraction(-3, 2), 5, Fraction(2, 7)):
        v = identity * backend.scalar(s)
        cases.append((KahlerTriple(algebra, structure, identity * half, v, 0), (V_CONDITION,)))
    return cases


class VerificationService:
    """Runs the named check groups; each check yields one verdict line."""

    def __init__(
        self,
        examples: Optional[Sequence[Example]] = None,
        backend: Optional[Backend] = None,
        seed: int = 2024,
    ):
        self.backend = backend or get_backend()
        self._examples = tuple(examples) if examples is not None else None
        self.seed = seed
        self._groups: Dict[str, Callable[[], Iterator[Tuple[str, Callable[[], Outcome]]]]] = {
            "identities": self._identities,
            "residuals": self._residuals,
            "structure": self._structure,
            "conditions": self._conditions,
            "counterexample": self._counterexample,
            "dim4": self._dim4,
            "builders": self._builders,
            "correspondence": self._correspondence,
        }

    @property
    def examples(self) -> Tuple[Example, ...]:
        if self._examples is None:
            self._examples = corpus(self.backend)
        return self._examples

    def run(self, only: Optional[Sequence[str]] = None, on_result: Optional[Callable[[CheckResult], None]] = None):
        """
        Run the selected groups (all by default).

        Args:
            only: Group or section names to run
            on_result: Called with each result as soon as it is available

        Returns:
            VerificationSummaryModel
        """
        selected = expand_groups(only) if only else list(GROUPS)
        unknown = [name for name in selected if name not in self._groups]
        if unknown:
            raise ValidationError(
                f"Unknown check group(s): {', '.join(unknown)}; choose from {', '.join(GROUPS + tuple(SECTIONS))}",
                error_code="unknown_group",
            )
        results: List[CheckResult] = []
        for group in selected:
            for name, check in self._groups[group]():
                result = self._evaluate(group, name, check)
                results.append(result)
                if on_result:
                    on_result(result)
        failures = [r for r in results if not r.passed]
        logger.info(f"Verification: {len(results) - len(failures)}/{len(results)} checks passed")
        return VerificationSummaryModel(
            passed=not failures,
            total=len(results),
            failures=len(failures),
            first_failure=f"{failures[0].group}: {failures[0].name}" if failures else None,
            results=[CheckResultModel(group=r.group, name=r.name, passed=r.passed, detail=r.detail) for r in results],
        )

    @staticmethod
    def _evaluate(group: str, name: str, check: Callable[[], Outcome]) -> CheckResult:
        try:
            passed, detail = check()
        except BaseAppException as e:
            logger.warning(f"Check '{name}' raised {type(e).__name__}: {e.message}")
            return CheckResult(group, name, False, f"{type(e).__name__}: {e.message}")
        return CheckResult(group, name, passed, detail)

    def _lck_examples(self) -> Iterator[Tuple[Example, HermitianLieAlgebra]]:
        for example in self.examples:
            yield example, HermitianLieAlgebra(example.algebra, example.structure)

    # Groups

    def _identities(self):
        for example, context in self._lck_examples():
            label = self._label(example)
            backend = context.backend

            def lee_identities(context=context) -> Outcome:
                first, second = context.lee_identities_residual()
                return first.is_zero() and second.is_zero(), ""

            def ijdeta(context=context) -> Outcome:
                return context.ijdeta_residual().is_zero(), ""

            def lie_v(context=context, backend=backend) -> Outcome:
                return backend.all_zero(context.lie_v_residual()), ""

            def lie_v_omega(context=context) -> Outcome:
                V = context.lee.V
                residual = cartan_residual(context.algebra, V, context.omega)
                return residual.is_zero() and lie_derivative_form(context.algebra, V, context.omega).is_zero(), ""

            def d_squared(context=context) -> Outcome:
                dd_omega = ce_differential(context.algebra, context.d_omega)
                dd_eta = ce_differential(context.algebra, context.d_eta)
                return dd_omega.is_zero() and dd_eta.is_zero(), ""

            def connection(context=context, backend=backend) -> Outcome:
                torsion = context.connection.torsion_residual(context.algebra)
                metric = context.connection.metric_residual(context.structure)
                return backend.all_zero(torsion) and backend.all_zero(metric), ""

            yield f"{label}: i_UΩ = -η and i_VΩ = θ", lee_identities
            yield f"{label}: i_J dη = 0", ijdeta
            yield f"{label}: L_V g = g((L_V J)J)", lie_v
            yield f"{label}: L_V Ω = 0 by the Cartan formula", lie_v_omega
            yield f"{label}: d∘d = 0", d_squared
            yield f"{label}: Levi-Civita connection torsion-free and metric", connection

    def _residuals(self):
        for example, context in self._lck_examples():
            label = self._label(example)

            def delta(context=context) -> Outcome:
                value = context.theorem_delta_residual()
                return context.backend.is_zero(value), f"residual {format_rational(value)}"

            def deta(context=context) -> Outcome:
                report = context.theorem_deta_check()
                return report.holds, f"coefficient {format_rational(report.vector_coefficient)}"

            def sss(context=context) -> Outcome:
                return context.sss_residual().is_zero(), ""

            def killing(context=context) -> Outcome:
                verdict = context.anti_lee_killing_check()
                return bool(verdict), verdict.note

            yield f"{label}: |θ|²δθ + dη(U,V) + n|θ|⁴ = 0", delta
            yield f"{label}: dη = (δθ/|θ|² + n) η∧θ and [U,V] = (δθ + n|θ|²)V", deta
            yield f"{label}: |θ|⁴dη = dη(U,V) θ∧η", sss
            yield f"{label}: Killing anti-Lee vector commutes with U", killing

    def _structure(self):
        for example, context in self._lck_examples():
            label = self._label(example)

            def suite(context=context) -> Outcome:
                claims = context.structural_theorem_suite()
                failed = [claim.name for claim in claims if claim.status == "fail"]
                outside = [claim.name for claim in claims if claim.status == "outside_hypothesis"]
                detail = f"failed: {', '.join(failed)}" if failed else (
                    f"outside hypothesis: {', '.join(outside)}" if outside else "")
                return not failed, detail

            def vaisman(context=context) -> Outcome:
                if not context.is_vaisman():
                    return True, "not Vaisman"
                return bool(context.is_lcs_first_kind()), "Vaisman"

            yield f"{label}: structural claims", suite
            yield f"{label}: Vaisman implies LCS of the first kind", vaisman

    def _conditions(self):
        for example in self.examples:
            if example.triple is None:
                continue
            label = self._label(example)

            def passing(example=example) -> Outcome:
                report = check_triple(example.triple)
                integrable = HermitianLieAlgebra(example.algebra, example.structure).is_integrable_lck()
                return report.in_h and bool(integrable), ""

            yield f"{label}: conditions hold and the product is integrable LCK", passing

        for index, (triple, broken) in enumerate(violating_triples(self.backend)):

            def failing(triple=triple, broken=broken) -> Outcome:
                report = check_triple(triple)
                algebra, structure = semidirect(triple)
                hermitian = HermitianLieAlgebra(algebra, structure).is_hermitian()
                lck = semidirect_lck_check(triple)
                expected_hermitian = INTEGRABILITY_CONDITION not in broken
                expected_lck = U_CONDITION not in broken and V_CONDITION not in broken
                ok = (
                    report.failed == list(broken)
                    and bool(hermitian) == expected_hermitian
                    and bool(lck) == expected_lck
                    and (hermitian.witness is not None) != expected_hermitian
                    and (lck.witness is not None) != expected_lck
                )
                witnesses = [v.witness.describe() for v in (hermitian, lck) if v.witness is not None]
                return ok, "; ".join(witnesses)

            yield f"violating triple {index + 1} ({', '.join(broken)})", failing

    def _counterexample(self):
        backend = self.backend

        def membership() -> Outcome:
            report = check_triple(build_counterexample(backend))
            return report.in_h and not report.in_a, "in H_{1,-1}, not in A_{1,-1}"

        def integrable() -> Outcome:
            algebra, structure = semidirect(build_counterexample(backend))
            return bool(HermitianLieAlgebra(algebra, structure).is_integrable_lck()), ""

        def unimodularity() -> Outcome:
            algebra, _ = semidirect(build_counterexample(backend))
            trace = ad_traces(algebra)[0]
            return (not is_unimodular(algebra)) and backend.equal(trace, -2), f"trace ad_U = {format_rational(trace)}"

        def derived() -> Outcome:
            algebra, structure = semidirect(build_counterexample(backend))
            context = HermitianLieAlgebra(algebra, structure)
            derived_dim, u_perp = derived_subalgebra(algebra).dim, context.u_perp()
            ok = derived_dim == 2 and u_perp.dim == 3 and derived_subalgebra(algebra).is_subspace_of(u_perp)
            return ok, f"dim [g,g] = {derived_dim}, dim U^⊥ = {u_perp.dim}"

        yield "counterexample is in H_{1,-1} but not A_{1,-1}", membership
        yield "counterexample product is integrable LCK", integrable
        yield "counterexample product is not unimodular", unimodularity
        yield "[g,g] is a proper subspace of U^⊥", derived

    def _dim4(self):
        backend = self.backend

        def d4() -> Outcome:
            return classify_dim4(build_d4(backend)).tag == D4, ""

        yield "d4 classifies as D4", d4
        for b in ("0", "1", "-2", "7/2", "3"):

            def family(b=b) -> Outcome:
                result = classify_dim4(build_gb(b, backend))
                return result.tag == FAMILY_GB and backend.equal(result.b, backend.scalar(b)), result.describe()

            yield f"g_{b} classifies as FamilyGb({b})", family

        rng = random.Random(self.seed)
        for index in range(5):
            basis = random_orthonormal_basis_dim2(rng, backend)
            b = Fraction(rng.randint(-20, 20), rng.randint(1, 9))

            def invariance(basis=basis, b=b) -> Outcome:
                rotated = change_basis(build_gb(b, backend), basis)
                rotated_d4 = change_basis(build_d4(backend), basis)
                result = classify_dim4(rotated)
                ok = (
                    result.tag == FAMILY_GB
                    and backend.equal(result.b, b)
                    and classify_dim4(rotated_d4).tag == D4
                )
                return ok, result.describe()

            yield f"classification invariant under basis change {index + 1}", invariance

        def isomorphism() -> Outcome:
            ok = (
                triples_isomorphic_dim4(build_gb(3, backend), build_gb(3, backend))
                and not triples_isomorphic_dim4(build_gb(3, backend), build_gb(4, backend))
                and not triples_isomorphic_dim4(build_d4(backend), build_gb(0, backend))
            )
            return ok, ""

        yield "isomorphism agrees with the parameter", isomorphism

    def _builders(self):
        backend = self.backend
        for n in range(1, 6):

            def builder(n=n) -> Outcome:
                triple = build_dim(n, backend)
                report = check_triple(triple)
                algebra, structure = semidirect(triple)
                context = HermitianLieAlgebra(algebra, structure)
                trace_u = sum(triple.u[k, k] for k in range(triple.dim))
                kappa = context.bracket_coefficient()
                ok = (
                    report.in_a
                    and backend.equal(triple.c, n)
                    and is_unimodular(algebra)
                    and backend.equal(trace_u, -n)
                    and bool(context.is_integrable_lck())
                    and kappa is not None
                    and backend.equal(kappa, n * context.lee.norm_sq)
                )
                return ok, f"trace u = {format_rational(trace_u)}"

            def blocks(n=n) -> Outcome:
                image = correspondence(build_dim(n, backend))
                expected = build_d4(backend)
                for _ in range(n - 1):
                    expected = direct_sum_triples(expected, build_d4(backend))
                ok = backend.all_zero(image.u - expected.u) and backend.all_zero(image.v - expected.v)
                return ok, ""

            yield f"dimension {2 * n + 2} example is in A_{{{n},{n}}} and unimodular", builder
            yield f"dimension {2 * n + 2} example maps to {n} copies of d4", blocks

    def _correspondence(self):
        backend = self.backend
        for c in ("-1", "1/2", "2", "5"):
            for source in ("d4", "gb"):

                def round_trip(c=c, source=source) -> Outcome:
                    base = build_d4(backend) if source == "d4" else build_gb(Fraction(3, 2), backend)
                    moved = transport(base, c)
                    back = transport(moved, 1)
                    ok = (
                        check_triple(moved).in_a
                        and check_triple(back).in_a
                        and backend.all_zero(back.u - base.u)
                        and backend.all_zero(back.v - base.v)
                    )
                    return ok, ""

                yield f"{source}: A_{{1,1}} -> A_{{1,{c}}} -> A_{{1,1}}", round_trip

    @staticmethod
    def _label(example: Example) -> str:
        return example.label or example.name
