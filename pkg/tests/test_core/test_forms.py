"""
Tests for invariant forms, the Chevalley–Eilenberg differential and the
Levi-Civita connection.
"""

import itertools

import pytest

from app.core.forms import (
    KForm,
    cartan_residual,
    ce_differential,
    codifferential,
    flat,
    form_power,
    interior_J,
    interior_vector,
    levi_civita,
    lie_derivative_form,
    sharp,
    sort_with_sign,
    wedge,
)
from app.core.hermitian import standard_structure
from app.core.triples import build_r2c, semidirect
from app.utils.exceptions import FormDegreeError


def _basis_form(dim, indices, backend):
    return KForm.build(dim, len(indices), {tuple(indices): 1}, backend)


def test_sort_with_sign():
    assert sort_with_sign((1, 0)) == (-1, (0, 1))
    assert sort_with_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_with_sign((1, 1)) == (0, None)


def test_wedge_evaluates_in_determinant_convention(exact):
    e0 = _basis_form(2, (0,), exact)
    e1 = _basis_form(2, (1,), exact)
    form = wedge(e0, e1)
    x, y = exact.basis_vector(2, 0), exact.basis_vector(2, 1)
    assert form.evaluate(x, y) == 1
    assert form.evaluate(y, x) == -1
    assert wedge(e1, e0).equals(-form)


def test_wedge_beyond_dimension_vanishes(exact):
    e01 = _basis_form(2, (0, 1), exact)
    assert wedge(e01, e01).is_zero()
    assert form_power(e01, 1).equals(e01)
    assert form_power(e01, 0).evaluate() == 1


def test_differential_of_r2(exact):
    """[e0, e1] = e1: de^0 = 0 and de^1 = -e^{01}."""
    algebra, _ = build_r2c(1, exact)
    assert ce_differential(algebra, _basis_form(2, (0,), exact)).is_zero()
    assert ce_differential(algebra, _basis_form(2, (1,), exact)).component((0, 1)) == -1


def test_d_squared_vanishes_on_d4(d4_triple):
    algebra, _ = semidirect(d4_triple)
    backend = algebra.backend
    for degree in (1, 2):
        for indices in itertools.combinations(range(4), degree):
            form = _basis_form(4, indices, backend)
            assert ce_differential(algebra, ce_differential(algebra, form)).is_zero()


def test_interior_products(exact):
    e01 = _basis_form(2, (0, 1), exact)
    assert interior_vector(e01, exact.basis_vector(2, 0)).component((1,)) == 1
    assert interior_vector(e01, exact.basis_vector(2, 1)).component((0,)) == -1
    with pytest.raises(FormDegreeError):
        interior_vector(KForm.scalar(2, 1, exact), exact.basis_vector(2, 0))


def test_interior_j_of_one_form(exact):
    """(i_J e^0)(X) = e^0(JX): J e_1 = -e_0, so i_J e^0 = -e^1."""
    structure = standard_structure(2, exact)
    result = interior_J(structure, _basis_form(2, (0,), exact))
    assert result.component((1,)) == -1
    assert result.component((0,)) == 0


def test_flat_and_sharp_are_inverse(exact):
    structure = standard_structure(2, exact).rescaled(2)
    vector = exact.array([1, "1/3"])
    assert exact.all_zero(sharp(structure, flat(structure, vector)) - vector)


def test_levi_civita_is_torsion_free_and_metric(d4_triple):
    algebra, structure = semidirect(d4_triple)
    connection = levi_civita(algebra, structure)
    assert algebra.backend.all_zero(connection.torsion_residual(algebra))
    assert algebra.backend.all_zero(connection.metric_residual(structure))


def test_codifferential_of_closed_one_form_on_r2(exact):
    """δe^0 = -Σ (∇_i e^0)(e_i) = trace(ad_{e_0}) on an orthonormal basis."""
    algebra, structure = build_r2c(1, exact)
    assert codifferential(algebra, structure, _basis_form(2, (0,), exact)).evaluate() == 1


def test_cartan_formula_on_d4(d4_triple):
    algebra, _ = semidirect(d4_triple)
    backend = algebra.backend
    form = _basis_form(4, (0, 3), backend) + _basis_form(4, (1, 2), backend)
    for k in range(4):
        assert cartan_residual(algebra, backend.basis_vector(4, k), form).is_zero()
    assert not lie_derivative_form(algebra, backend.basis_vector(4, 0), form).is_zero()


def test_kform_matrix_round_trip(exact):
    matrix = exact.array([[0, 2], [-2, 0]])
    form = KForm.from_matrix(matrix, exact)
    assert exact.all_zero(form.as_matrix() - matrix)
    with pytest.raises(FormDegreeError):
        KForm.from_matrix(exact.identity(2), exact)
