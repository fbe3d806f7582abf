"""
File formats for algebras and triples.

Rationals are written as strings "p/q" (or "p"); brackets are stored only for i < j.
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.utils.validators import format_rational, is_rational_string


def _rational_field(value):
    """Accept JSON integers as well as rational strings; store the string form."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return str(value)
    if not is_rational_string(value):
        raise ValueError(f"{value!r} is not a rational 'p/q' with nonzero q")
    return value.strip()


def _check_matrix(rows: List[List[str]], size: int, name: str) -> None:
    if len(rows) != size or any(len(row) != size for row in rows):
        raise ValueError(f"{name} must be a {size}×{size} matrix")


class BracketTerm(BaseModel):
    """One term c_ij^k e_k of a bracket."""

    k: int = Field(..., ge=0, description="Index of the result basis vector")
    coeff: str = Field(..., description="Rational coefficient as 'p/q'")

    @field_validator("coeff", mode="before")
    @classmethod
    def validate_coeff(cls, v):
        return _rational_field(v)


class BracketRecord(BaseModel):
    """[e_i, e_j] for i < j."""

    i: int = Field(..., ge=0)
    j: int = Field(..., ge=0)
    terms: List[BracketTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_order(self):
        if self.i >= self.j:
            raise ValueError(f"brackets are stored for i < j only, got ({self.i}, {self.j})")
        seen = set()
        for term in self.terms:
            if term.k in seen:
                raise ValueError(f"repeated result index {term.k} in bracket ({self.i}, {self.j})")
            seen.add(term.k)
        return self


class AlgebraDocument(BaseModel):
    """Lie algebra with metric and almost complex structure."""

    dim: int = Field(..., ge=1, description="Dimension of the algebra")
    basis: List[str] = Field(default_factory=list, description="Basis vector names")
    brackets: List[BracketRecord] = Field(default_factory=list, description="Nonzero brackets, i < j")
    metric: List[List[str]] = Field(..., description="Gram matrix g of rational strings")
    J: List[List[str]] = Field(..., description="Almost complex structure, column j = J e_j")

    @field_validator("metric", "J", mode="before")
    @classmethod
    def validate_entries(cls, v):
        if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
            raise ValueError("expected a list of rows")
        return [[_rational_field(x) for x in row] for row in v]

    @model_validator(mode="after")
    def validate_shapes(self):
        if not self.basis:
            self.basis = [f"e{k}" for k in range(self.dim)]
        if len(self.basis) != self.dim:
            raise ValueError(f"basis has {len(self.basis)} names for dim {self.dim}")
        _check_matrix(self.metric, self.dim, "metric")
        _check_matrix(self.J, self.dim, "J")
        pairs = set()
        for record in self.brackets:
            if record.j >= self.dim:
                raise ValueError(f"bracket index {record.j} out of range for dim {self.dim}")
            if (record.i, record.j) in pairs:
                raise ValueError(f"bracket ({record.i}, {record.j}) given twice")
            pairs.add((record.i, record.j))
            for term in record.terms:
                if term.k >= self.dim:
                    raise ValueError(f"result index {term.k} out of range for dim {self.dim}")
        return self

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "dim": 4,
                "basis": ["U", "V", "X", "JX"],
                "brackets": [
                    {"i": 0, "j": 1, "terms": [{"k": 1, "coeff": "1"}]},
                    {"i": 0, "j": 3, "terms": [{"k": 3, "coeff": "-1"}]},
                    {"i": 1, "j": 3, "terms": [{"k": 2, "coeff": "1"}]},
                ],
                "metric": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
                "J": [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]],
            }
        }
    )


class TripleDocument(BaseModel):
    """Kähler algebra 𝔥 with derivations u, v and constant c."""

    h: AlgebraDocument
    u: List[List[str]] = Field(..., description="Matrix of u on the 𝔥-basis")
    v: List[List[str]] = Field(..., description="Matrix of v on the 𝔥-basis")
    c: str = Field(..., description="Rational constant with [u, v] = c v")
    n: int = Field(..., ge=1, description="Half the dimension of 𝔥")

    @field_validator("u", "v", mode="before")
    @classmethod
    def validate_entries(cls, v):
        if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
            raise ValueError("expected a list of rows")
        return [[_rational_field(x) for x in row] for row in v]

    @field_validator("c", mode="before")
    @classmethod
    def validate_c(cls, v):
        return _rational_field(v)

    @model_validator(mode="after")
    def validate_shapes(self):
        _check_matrix(self.u, self.h.dim, "u")
        _check_matrix(self.v, self.h.dim, "v")
        if 2 * self.n != self.h.dim:
            raise ValueError(f"n = {self.n} does not match dim 𝔥 = {self.h.dim}")
        return self


def render_matrix(matrix) -> List[List[str]]:
    return [[format_rational(x) for x in row] for row in matrix]
