"""
Text and JSON rendering of reports for the command-line tools.
"""

import json
from typing import List, Optional

from app.core.classification import Dim4Class
from app.core.lck_analysis import FLAG_ORDER, LeeData, StructureReport
from app.core.triples import KahlerTriple, TripleReport
from app.models.document_models import render_matrix
from app.models.report_models import (
    ClaimModel,
    ClassificationModel,
    LeeModel,
    StructureReportModel,
    TripleReportModel,
    witness_model,
)
from app.utils.validators import format_rational

PASS_MARK = "✓"
FAIL_MARK = "✗"


def _rationals(values) -> List[str]:
    return [format_rational(x) for x in values]


def lee_model(lee: LeeData) -> LeeModel:
    dim = len(lee.U)
    return LeeModel(
        theta=_rationals(lee.theta.component((k,)) for k in range(dim)),
        eta=_rationals(lee.eta.component((k,)) for k in range(dim)),
        U=_rationals(lee.U),
        V=_rationals(lee.V),
        norm_sq=format_rational(lee.norm_sq),
        n=lee.n,
    )


def structure_report_model(report: StructureReport) -> StructureReportModel:
    return StructureReportModel(
        flags=dict(report.flags),
        witnesses={name: witness_model(w) for name, w in report.witnesses.items()},
        notes=dict(report.notes),
        claims=[
            ClaimModel(
                name=claim.name,
                status=claim.status,
                detail=claim.detail,
                witness=witness_model(claim.witness) if claim.witness else None,
            )
            for claim in report.claims
        ],
        lee=lee_model(report.lee) if report.lee is not None else None,
    )


def triple_report_model(triple: KahlerTriple, report: TripleReport) -> TripleReportModel:
    return TripleReportModel(
        in_h=report.in_h,
        in_a=report.in_a,
        c=format_rational(triple.c),
        n=triple.n,
        residual_norms={name: format_rational(norm) for name, norm in report.norms.items()},
        failed=report.failed,
        diagnostic_norm=format_rational(report.diagnostic_norm),
    )


def classification_model(result: Dim4Class) -> ClassificationModel:
    return ClassificationModel(
        tag=result.tag,
        b=format_rational(result.b) if result.b is not None else None,
        basis=render_matrix(result.basis),
        label=result.describe(),
    )


def render_structure_text(report: StructureReport, triple_report: Optional[TripleReport] = None) -> str:
    """Flag lines with the witness of every false flag, then claims and notes."""
    width = max(len(name) for name in FLAG_ORDER) + 2
    lines = []
    for name in FLAG_ORDER:
        if name not in report.flags:
            continue
        holds = report.flags[name]
        if holds is None:
            lines.append(f"{name:<{width}}{report.notes.get(name, 'not applicable')}")
            continue
        lines.append(f"{name:<{width}}{PASS_MARK if holds else FAIL_MARK}")
        if not holds and name in report.witnesses:
            lines.append(f"    witness: {report.witnesses[name].describe()}")
    if report.lee is not None:
        lines.append(f"|theta|^2 = {format_rational(report.lee.norm_sq)}, n = {report.lee.n}")
    if report.claims:
        lines.append("structural claims:")
        for claim in report.claims:
            suffix = f" ({claim.detail})" if claim.detail else ""
            lines.append(f"    [{claim.status}] {claim.name}{suffix}")
            if claim.witness is not None:
                lines.append(f"        witness: {claim.witness.describe()}")
    for key, note in report.notes.items():
        if key not in report.flags:
            lines.append(f"note: {note}")
    if triple_report is not None:
        lines.append("triple conditions:")
        for name, norm in triple_report.norms.items():
            mark = FAIL_MARK if name in triple_report.failed else PASS_MARK
            lines.append(f"    {mark} {name} (max residual {format_rational(norm)})")
        lines.append(f"    [v+Ju, J] diagnostic: {format_rational(triple_report.diagnostic_norm)}")
    return "\n".join(lines) + "\n"


def dump_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def to_json(model) -> str:
    return dump_json(model.model_dump())
