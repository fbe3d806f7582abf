"""
Randomized property tests over seeded random Lie algebras.
"""

import itertools
import random
from fractions import Fraction

import pytest

from app.core.classification import random_orthonormal_basis_dim2
from app.core.forms import KForm, ce_differential, interior_J
from app.core.hermitian import HermitianStructure, standard_structure
from app.core.lck_analysis import HermitianLieAlgebra
from app.core.lie_algebra import LieAlgebra, ad, derived_series, direct_sum, in_basis, is_unimodular
from app.core.linalg import rank
from app.core.triples import (
    build_counterexample,
    build_d4,
    build_gb,
    build_r2c,
    change_basis,
    direct_sum_triples,
    semidirect,
    transport,
)
from app.services.example_registry import corpus


def _random_rational(rng, bound=3, denominator=3):
    return Fraction(rng.randint(-bound * denominator, bound * denominator), rng.randint(1, denominator))


def _random_invertible(rng, backend, size):
    while True:
        matrix = backend.array([[rng.randint(-2, 2) for _ in range(size)] for _ in range(size)])
        if rank(matrix, backend) == size:
            return matrix


def _random_algebra(rng, backend):
    """A dimension-4 algebra from the named families, in a random basis."""
    choice = rng.randrange(4)
    if choice == 0:
        algebra, _ = semidirect(build_d4(backend))
    elif choice == 1:
        algebra, _ = semidirect(build_gb(_random_rational(rng), backend))
    elif choice == 2:
        algebra, _ = semidirect(build_counterexample(backend))
    else:
        first, _ = build_r2c(_random_rational(rng), backend)
        second, _ = build_r2c(_random_rational(rng), backend)
        algebra = direct_sum(first, second)
    return in_basis(algebra, _random_invertible(rng, backend, 4))


def _random_form(rng, backend, dim, degree):
    coefficients = {
        indices: _random_rational(rng)
        for indices in itertools.combinations(range(dim), degree)
    }
    return KForm.build(dim, degree, coefficients, backend)


def test_unimodularity_matches_random_traces(exact, rng):
    for _ in range(10):
        algebra = _random_algebra(rng, exact)
        traces = [
            sum(ad(algebra, algebra.vector([_random_rational(rng) for _ in range(4)]))[k, k] for k in range(4))
            for _ in range(20)
        ]
        assert is_unimodular(algebra) == all(t == 0 for t in traces)


def test_derived_series_decreases(exact, rng):
    for _ in range(10):
        series = derived_series(_random_algebra(rng, exact))
        assert all(a > b for a, b in zip(series, series[1:-1]))


def test_d_squared_vanishes_on_random_forms(exact, rng):
    for _ in range(10):
        algebra = _random_algebra(rng, exact)
        for _ in range(10):
            for degree in (1, 2):
                form = _random_form(rng, exact, 4, degree)
                assert ce_differential(algebra, ce_differential(algebra, form)).is_zero()


def test_interior_j_twice_negates_one_forms(exact, rng):
    structure = standard_structure(4, exact).rescaled(Fraction(5, 2))
    for _ in range(20):
        theta = _random_form(rng, exact, 4, 1)
        assert interior_J(structure, interior_J(structure, theta)).equals(-theta)


@pytest.mark.parametrize("seed", range(5))
def test_float_backend_agrees_with_exact(exact, floating, seed):
    rng = random.Random(seed)
    for _ in range(20):
        algebra = _random_algebra(rng, exact)
        approximate = LieAlgebra(floating.convert(algebra.constants), floating)
        assert derived_series(approximate) == derived_series(algebra)
        assert is_unimodular(approximate) == is_unimodular(algebra)


def _random_triple(rng, backend):
    """A valid triple of class c on the plane or its double, in a random orthonormal basis."""
    choice = rng.randrange(3)
    if choice == 0:
        triple = build_gb(_random_rational(rng), backend)
    elif choice == 1:
        triple = build_d4(backend)
    else:
        return transport(direct_sum_triples(build_d4(backend), build_gb(_random_rational(rng), backend)), 2)
    triple = change_basis(triple, random_orthonormal_basis_dim2(rng, backend))
    return transport(triple, rng.choice([Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(5)]))


def _form_residuals(algebra, structure, coefficients):
    backend = algebra.backend
    context = HermitianLieAlgebra(algebra, structure)
    form = KForm.build(algebra.dim, 2, coefficients, backend)
    i_u, i_v = context.lee_identities_residual()
    return {
        "d_squared": ce_differential(algebra, ce_differential(algebra, form)).max_abs(),
        "torsion": backend.max_abs(context.connection.torsion_residual(algebra)),
        "metric": backend.max_abs(context.connection.metric_residual(structure)),
        "i_J_d_eta": context.ijdeta_residual().max_abs(),
        "i_U_omega": i_u.max_abs(),
        "i_V_omega": i_v.max_abs(),
        "lie_V": backend.max_abs(context.lie_v_residual()),
        "norm_sq": context.lee.norm_sq,
    }


def _assert_backends_agree(algebra, structure, floating, rng):
    coefficients = {
        indices: _random_rational(rng) for indices in itertools.combinations(range(algebra.dim), 2)
    }
    exact_values = _form_residuals(algebra, structure, coefficients)
    approximate = HermitianStructure(floating.convert(structure.g), floating.convert(structure.J), floating)
    float_values = _form_residuals(
        LieAlgebra(floating.convert(algebra.constants), floating), approximate, coefficients
    )
    for name, value in exact_values.items():
        if name == "norm_sq":
            assert abs(float(value) - float_values[name]) <= floating.tol * max(1.0, abs(float(value)))
        else:
            assert value == 0, name
            assert float_values[name] <= 100 * floating.tol, name


def test_form_invariants_agree_on_corpus(exact, floating):
    rng = random.Random(7)
    for example in corpus(exact):
        _assert_backends_agree(example.algebra, example.structure, floating, rng)


@pytest.mark.parametrize("seed", range(4))
def test_form_invariants_agree_on_random_triples(exact, floating, seed):
    rng = random.Random(seed)
    for _ in range(5):
        algebra, structure = semidirect(_random_triple(rng, exact))
        _assert_backends_agree(algebra, structure, floating, rng)
