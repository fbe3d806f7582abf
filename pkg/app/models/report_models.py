"""
Report models for JSON output of the command-line tools.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.utils.validators import format_rational


class WitnessModel(BaseModel):
    """Violating basis indices and the residual there."""

    claim: str
    indices: List[int]
    residual: str
    component: Optional[int] = None


class ClaimModel(BaseModel):
    name: str
    status: str = Field(..., pattern="^(pass|fail|skipped|outside_hypothesis)$")
    detail: str = ""
    witness: Optional[WitnessModel] = None


class LeeModel(BaseModel):
    """Lee data as rational strings."""

    theta: List[str] = Field(..., description="θ(e_k)")
    eta: List[str] = Field(..., description="η(e_k)")
    U: List[str]
    V: List[str]
    norm_sq: str = Field(..., description="|θ|²")
    n: int


class StructureReportModel(BaseModel):
    """Flags of `check`; None marks a predicate that does not apply."""

    flags: Dict[str, Optional[bool]]
    witnesses: Dict[str, WitnessModel] = Field(default_factory=dict)
    notes: Dict[str, str] = Field(default_factory=dict)
    claims: List[ClaimModel] = Field(default_factory=list)
    lee: Optional[LeeModel] = None


class TripleReportModel(BaseModel):
    """Residual norms of the four triple conditions."""

    in_h: bool = Field(..., description="Member of H_{n,c}")
    in_a: bool = Field(..., description="Member of A_{n,c}")
    c: str
    n: int
    residual_norms: Dict[str, str]
    failed: List[str]
    diagnostic_norm: str = Field(..., description="max |[v+Ju, J]|, shown for comparison")


class ClassificationModel(BaseModel):
    tag: str = Field(..., pattern="^(Gb|D4)$")
    b: Optional[str] = None
    basis: List[List[str]]
    label: str


class CheckResultModel(BaseModel):
    """One line of the verification suite."""

    group: str
    name: str
    passed: bool
    detail: str = ""


class VerificationSummaryModel(BaseModel):
    passed: bool
    total: int
    failures: int
    first_failure: Optional[str] = None
    results: List[CheckResultModel] = Field(default_factory=list)


def witness_model(witness) -> WitnessModel:
    return WitnessModel(
        claim=witness.claim,
        indices=list(witness.indices),
        residual=format_rational(witness.residual),
        component=witness.component,
    )
