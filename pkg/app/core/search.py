"""
Search for derivation pairs (u, v) satisfying the four triple conditions on a given
Kähler algebra 𝔥.

Three of the conditions (and the derivation equations) are linear in the 8n²
entries of u and v and are solved exactly. The remaining condition [u, v] = c v is
bilinear: candidate points of the exact affine solution space are proposed by
coordinate descent in floating point, rounded to rationals, and accepted only after
an exact check.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.hermitian import HermitianStructure
from app.core.lie_algebra import LieAlgebra, bracket, is_abelian
from app.core.linalg import adjoint, commutator, solve_affine
from app.core.scalars import Backend, get_backend
from app.core.triples import (
    KahlerTriple,
    build_abelian_kahler,
    build_d4,
    build_gb,
    check_triple,
    transport,
)
from app.utils.exceptions import TripleError, ValidationError
from config.settings import get_settings

logger = logging.getLogger(__name__)

# Grid denominators for snapping a minimum; a snap counts only near the minimum or as a secant base
GRID_DENOMINATORS = (1, 2, 3, 4, 5, 6, 8, 10, 12)
SEED_STRIDE = 1_000_003


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """
    Linear block A x = b over x = (vec u, vec v) (row-major entries, u first) and the
    bilinear residual (u, v) ↦ [u, v] - c v.
    """

    algebra: LieAlgebra
    structure: HermitianStructure
    c: object
    coefficients: np.ndarray
    rhs: np.ndarray
    fix_v_zero: bool = False

    @property
    def backend(self) -> Backend:
        return self.algebra.backend

    @property
    def size(self) -> int:
        return self.algebra.dim

    @property
    def unknowns(self) -> int:
        return 2 * self.size * self.size

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        m = self.size
        return x[: m * m].reshape(m, m), x[m * m:].reshape(m, m)

    def linear_residual(self, x: np.ndarray) -> np.ndarray:
        return self.coefficients @ x - self.rhs

    def bilinear_residual(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return commutator(u, v) - v * self.c

    def triple(self, x: np.ndarray) -> KahlerTriple:
        u, v = self.split(x)
        return KahlerTriple(self.algebra, self.structure, u.copy(), v.copy(), self.c)


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """particular + span(basis columns), exact."""

    particular: np.ndarray
    basis: np.ndarray
    backend: Backend

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def point(self, coords: Sequence) -> np.ndarray:
        coords = self.backend.array(list(coords)) if len(coords) else self.backend.zeros(0)
        if len(coords) != self.dimension:
            raise ValidationError(f"Expected {self.dimension} coordinates, got {len(coords)}")
        if not self.dimension:
            return self.particular.copy()
        return self.particular + self.basis @ coords

    def random_coords(self, rng: random.Random, radius: int, denominator: int) -> List[Fraction]:
        span = radius * denominator
        return [Fraction(rng.randint(-span, span), denominator) for _ in range(self.dimension)]

    def random_point(self, rng: random.Random, radius: int = 3, denominator: int = 4) -> np.ndarray:
        return self.point(self.random_coords(rng, radius, denominator))


def _linear_block(
    algebra: LieAlgebra,
    structure: HermitianStructure,
    u: np.ndarray,
    v: np.ndarray,
    fix_v_zero: bool,
    include_derivations: bool,
) -> List[np.ndarray]:
    backend = algebra.backend
    J, g = structure.J, structure.g
    blocks = [
        commutator(v + u @ J, J).ravel(),
        (adjoint(v, g, backend) @ J + J @ v).ravel(),
        (J + adjoint(u, g, backend) @ J + J @ u).ravel(),
    ]
    if include_derivations:
        for D in (u, v):
            for i in range(algebra.dim):
                for j in range(i + 1, algebra.dim):
                    x, y = algebra.basis_vector(i), algebra.basis_vector(j)
                    residual = (
                        D @ bracket(algebra, x, y)
                        - bracket(algebra, D @ x, y)
                        - bracket(algebra, x, D @ y)
                    )
                    blocks.append(residual)
    if fix_v_zero:
        blocks.append(v.ravel())
    return blocks


def build_constraint_system(
    algebra: LieAlgebra,
    structure: HermitianStructure,
    c,
    fix_v_zero: bool = False,
) -> ConstraintSystem:
    """
    Flatten the linear conditions into one exact system.

    Every condition is affine in x, so column k of A is R(e_k) - R(0) and b = -R(0).
    """
    backend = algebra.backend
    m = algebra.dim
    if structure.dim != m:
        raise ValidationError(f"Structure of dimension {structure.dim} on algebra of dimension {m}")
    unknowns = 2 * m * m
    include_derivations = not is_abelian(algebra)

    def residual(x: np.ndarray) -> np.ndarray:
        u, v = x[: m * m].reshape(m, m), x[m * m:].reshape(m, m)
        return np.concatenate(_linear_block(algebra, structure, u, v, fix_v_zero, include_derivations))

    base = residual(backend.zeros(unknowns))
    coefficients = backend.zeros((base.shape[0], unknowns))
    for k in range(unknowns):
        coefficients[:, k] = residual(backend.basis_vector(unknowns, k)) - base
    logger.info(
        f"Constraint system: {unknowns} unknowns, {base.shape[0]} equations, "
        f"derivations={'yes' if include_derivations else 'no'}, fix_v_zero={fix_v_zero}"
    )
    return ConstraintSystem(algebra, structure, backend.scalar(c), coefficients, -base, fix_v_zero)


def solve_linear(system: ConstraintSystem) -> AffineSubspace:
    """
    Exact solution set of the linear block.

    Raises:
        InfeasibleSystemError: With a certificate row combination
    """
    particular, basis = solve_affine(system.coefficients, system.rhs, system.backend)
    space = AffineSubspace(particular, basis, system.backend)
    logger.info(f"Linear block solved: affine dimension {space.dimension}")
    return space


class BilinearSearch:
    """
    Coordinate descent on |[u, v] - c v|² over the affine coordinates.

    Along a coordinate line the residual is R0 + t R1 + t² R2, so each step minimizes
    a quartic by taking the best real root of its derivative. A minimum is turned into
    an exact candidate by continued-fraction rounding; when that misses the solution
    set, an exact grid point of the same component is moved along a rational secant
    towards the minimum.
    """

    def __init__(
        self,
        system: ConstraintSystem,
        space: AffineSubspace,
        sweeps: int,
        tol: float,
        max_denominator: int,
        radius: int,
        denominator: int,
        rounding_radius: float = 1e-6,
        secant_denominator: int = 1000,
        repair_radius: float = 1e-2,
        require_v_nonzero: bool = False,
    ):
        self.system = system
        self.space = space
        self.sweeps = sweeps
        self.tol = tol
        self.max_denominator = max_denominator
        self.radius = radius
        self.denominator = denominator
        self.rounding_radius = rounding_radius
        self.secant_denominator = secant_denominator
        self.repair_radius = repair_radius
        self.require_v_nonzero = require_v_nonzero
        m = system.size
        self._particular = np.asarray(space.particular, dtype=float)
        self._basis = np.asarray(space.basis, dtype=float)
        self._c = float(system.c)
        self._m = m

    def _split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        m = self._m
        return x[: m * m].reshape(m, m), x[m * m:].reshape(m, m)

    def objective(self, coords: np.ndarray) -> float:
        u, v = self._split(self._particular + self._basis @ coords)
        residual = u @ v - v @ u - self._c * v
        return float(np.sum(residual * residual))

    def _line_step(self, coords: np.ndarray, k: int) -> float:
        u0, v0 = self._split(self._particular + self._basis @ coords)
        du, dv = self._split(self._basis[:, k])
        r0 = u0 @ v0 - v0 @ u0 - self._c * v0
        r1 = du @ v0 - v0 @ du + u0 @ dv - dv @ u0 - self._c * dv
        r2 = du @ dv - dv @ du
        a = [np.sum(p * q) for p, q in ((r2, r2), (r1, r2), (r1, r1), (r0, r2), (r0, r1), (r0, r0))]
        r22, r12, r11, r02, r01, r00 = a
        cubic = [4 * r22, 6 * r12, 2 * r11 + 4 * r02, 2 * r01]
        if max(abs(x) for x in cubic) < 1e-300:
            return 0.0
        candidates = [0.0]
        for root in np.roots(np.trim_zeros(cubic, "f")):
            if abs(root.imag) < 1e-9:
                candidates.append(float(root.real))

        def value(t: float) -> float:
            return r00 + 2 * t * r01 + t * t * (r11 + 2 * r02) + 2 * t ** 3 * r12 + t ** 4 * r22

        return min(candidates, key=value)

    def descend(self, coords: np.ndarray) -> np.ndarray:
        coords = np.array(coords, dtype=float)
        for _ in range(self.sweeps):
            for k in range(len(coords)):
                coords[k] += self._line_step(coords, k)
            if self.objective(coords) < self.tol * self.tol:
                break
        return coords

    @staticmethod
    def _distance(coords: Sequence[Fraction], minimum: np.ndarray) -> float:
        if not len(coords):
            return 0.0
        return max(abs(float(q) - z) for q, z in zip(coords, minimum))

    def _denominator_bounds(self) -> List[int]:
        bounds, bound = [], 10
        while bound < self.max_denominator:
            bounds.append(bound)
            bound *= 10
        return bounds + [self.max_denominator]

    def _roundings(self, minimum: np.ndarray) -> Iterable[List[Fraction]]:
        """Best approximants by increasing denominator bound, then grid points, all near the minimum."""
        for bound in self._denominator_bounds():
            coords = [Fraction(z).limit_denominator(bound) for z in minimum]
            if self._distance(coords, minimum) <= self.rounding_radius:
                yield coords
        for coords in self._snaps(minimum):
            if self._distance(coords, minimum) <= self.rounding_radius:
                yield coords

    @staticmethod
    def _snaps(minimum: np.ndarray) -> Iterable[List[Fraction]]:
        for q in GRID_DENOMINATORS:
            yield [Fraction(round(float(z) * q), q) for z in minimum]

    def _secant_parameter(self, base: Sequence[Fraction], direction: Sequence[Fraction]):
        """
        Nonzero t with P + t d on the bilinear set, for an exact solution P.

        The residual along the line is t R1 + t² R2; t is exact only when R1 and R2
        are parallel, which the final exact check decides.
        """
        backend = self.system.backend
        u0, v0 = self.system.split(self.space.point(base))
        du, dv = self.system.split(self.space.basis @ backend.array(list(direction)))
        r1 = commutator(du, v0) + commutator(u0, dv) - dv * self.system.c
        r2 = commutator(du, dv)
        norm = np.sum(r2 * r2)
        if backend.is_zero(norm):
            return None
        t = -np.sum(r1 * r2) / norm
        return None if backend.is_zero(t) else t

    def _secant_repairs(self, minimum: np.ndarray) -> Iterable[List[Fraction]]:
        seen = set()
        for base in self._snaps(minimum):
            key = tuple(base)
            if key in seen:
                continue
            seen.add(key)
            if self._exact_hit(base) is None:
                continue
            direction = [
                Fraction(z - float(p)).limit_denominator(self.secant_denominator)
                for p, z in zip(base, minimum)
            ]
            if not any(direction):
                continue
            t = self._secant_parameter(base, direction)
            if t is None:
                continue
            coords = [p + t * d for p, d in zip(base, direction)]
            if self._distance(coords, minimum) <= self.repair_radius:
                yield coords

    def _exact_hit(self, coords: Sequence[Fraction]) -> Optional[KahlerTriple]:
        x = self.space.point(coords)
        try:
            triple = self.system.triple(x)
        except TripleError:
            return None
        return triple if check_triple(triple).in_h else None

    def verify(self, coords: Sequence[Fraction]) -> Optional[KahlerTriple]:
        """Exact acceptance gate."""
        triple = self._exact_hit(coords)
        if triple is not None and self.require_v_nonzero and self.system.backend.all_zero(triple.v):
            return None
        return triple

    def run_sample(self, seed: int, index: int) -> Optional[KahlerTriple]:
        rng = random.Random(seed * SEED_STRIDE + index)
        start = self.space.random_coords(rng, self.radius, self.denominator)
        if not self.space.dimension:
            return self.verify([])
        exact_hit = self.verify(start)
        if exact_hit is not None:
            return exact_hit
        minimum = self.descend(np.array([float(z) for z in start]))
        if self.objective(minimum) > max(self.tol, 1e-6):
            return None
        seen = set()
        for stage in (self._roundings, self._secant_repairs):
            for coords in stage(minimum):
                key = tuple(coords)
                if key in seen:
                    continue
                seen.add(key)
                hit = self.verify(coords)
                if hit is not None:
                    return hit
        return None


def canonical_key(triple: KahlerTriple) -> Tuple:
    return tuple(triple.u.ravel().tolist()) + tuple(triple.v.ravel().tolist()) + (triple.c,)


def deduplicate(triples: Iterable[KahlerTriple]) -> List[KahlerTriple]:
    """Drop repeated (u, v, c), keeping first occurrences in order."""
    seen = set()
    unique = []
    for triple in triples:
        key = canonical_key(triple)
        if key not in seen:
            seen.add(key)
            unique.append(triple)
    return unique


def make_search(
    system: ConstraintSystem,
    tol: Optional[float] = None,
    sweeps: Optional[int] = None,
    max_denominator: Optional[int] = None,
    require_v_nonzero: bool = False,
) -> BilinearSearch:
    if not system.backend.exact:
        raise ValidationError("The bilinear search verifies exactly and needs the exact backend")
    if require_v_nonzero and system.fix_v_zero:
        raise ValidationError("v cannot be both fixed to zero and required nonzero", error_code="conflicting_options")
    settings = get_settings()
    space = solve_linear(system)
    return BilinearSearch(
        system,
        space,
        sweeps=sweeps if sweeps is not None else settings.SEARCH_SWEEPS,
        tol=tol if tol is not None else settings.LCK_TOL,
        max_denominator=max_denominator or settings.SEARCH_MAX_DENOMINATOR,
        radius=settings.SEARCH_SAMPLE_RADIUS,
        denominator=settings.SEARCH_SAMPLE_DENOMINATOR,
        rounding_radius=settings.SEARCH_ROUNDING_RADIUS,
        secant_denominator=settings.SEARCH_SECANT_DENOMINATOR,
        repair_radius=settings.SEARCH_REPAIR_RADIUS,
        require_v_nonzero=require_v_nonzero,
    )


def search_bilinear(
    system: ConstraintSystem,
    samples: int,
    seed: int,
    tol: Optional[float] = None,
    require_v_nonzero: bool = False,
) -> List[KahlerTriple]:
    """
    Sample, descend, round and verify exactly; deterministic given (seed, samples).

    Each sample index i uses its own generator seeded with seed * 1_000_003 + i, so the
    index range can be split across workers without changing the result. With
    require_v_nonzero, exact points with v = 0 are rejected like failed candidates.
    """
    if samples <= 0:
        return []
    search = make_search(system, tol=tol, require_v_nonzero=require_v_nonzero)
    hits = []
    for index in range(samples):
        hit = search.run_sample(seed, index)
        if hit is not None:
            hits.append(hit)
    result = deduplicate(hits)
    logger.info(f"Bilinear search: {samples} samples, {len(result)} verified triples")
    return result


@dataclass(frozen=True, eq=False)
class GbFamily:
    """The 𝔤_b family carried to class c: u(b) = offset + b slope, v = 0."""

    algebra: LieAlgebra
    structure: HermitianStructure
    c: object
    offset: np.ndarray
    slope: np.ndarray

    def member(self, b) -> KahlerTriple:
        b = self.algebra.backend.scalar(b)
        return KahlerTriple(
            self.algebra, self.structure, self.offset + self.slope * b, self.algebra.backend.zeros((2, 2)), self.c
        )


@dataclass(frozen=True, eq=False)
class NilpotentSplit:
    """Both branches of the case split on v: the v = 0 family and the rank-one triple (absent for c = 0)."""

    family: GbFamily
    instances: List[KahlerTriple]
    rank_one: Optional[KahlerTriple]

    @property
    def triples(self) -> List[KahlerTriple]:
        return self.instances + ([self.rank_one] if self.rank_one is not None else [])


def _gb_in_class(b, c, backend: Backend) -> KahlerTriple:
    triple = build_gb(b, backend)
    if backend.is_zero(c):
        return triple.with_matrices(triple.u, triple.v, c)
    return transport(triple, c)


def enumerate_nilpotent_v_dim2(
    algebra: LieAlgebra,
    structure: HermitianStructure,
    c,
    samples: Sequence = (0, 1, -2, Fraction(7, 2)),
) -> NilpotentSplit:
    """
    Exact case split on v for abelian 𝔥 of dimension 2: v = 0 gives the 𝔤_b family
    (parametric form plus instances at the given b), rank v = 1 gives the single 𝔡₄
    triple. Both are built in c = 1 and carried to c. For c = 0 the rank-1 branch is
    empty: [u, v] = 0 with [v + uJ, J] = 0 forces v = 0, so only the 𝔤_b matrices
    with c = 0 remain.
    """
    backend = algebra.backend
    if algebra.dim != 2 or not is_abelian(algebra):
        raise ValidationError("Enumeration needs an abelian 𝔥 of dimension 2", error_code="wrong_algebra")
    _, standard = build_abelian_kahler(1, backend)
    if not backend.all_zero(structure.g - standard.g) or not backend.all_zero(structure.J - standard.J):
        raise ValidationError("Enumeration expects g = Id and the standard J", error_code="nonstandard_structure")
    c = backend.scalar(c)
    origin, unit = _gb_in_class(0, c, backend), _gb_in_class(1, c, backend)
    family = GbFamily(origin.algebra, origin.structure, c, origin.u, unit.u - origin.u)
    instances = [_gb_in_class(b, c, backend) for b in samples]
    rank_one = None if backend.is_zero(c) else transport(build_d4(backend), c)
    return NilpotentSplit(family, instances, rank_one)


def default_system(n: int, c, fix_v_zero: bool = False, backend: Optional[Backend] = None) -> ConstraintSystem:
    """Constraint system on the abelian Kähler algebra of dimension 2n."""
    backend = backend or get_backend("exact")
    algebra, structure = build_abelian_kahler(n, backend)
    return build_constraint_system(algebra, structure, c, fix_v_zero)
