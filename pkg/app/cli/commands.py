"""
Subcommand handlers. Each takes the parsed arguments and returns an exit code;
errors propagate as application exceptions and are mapped to exit codes in main.
"""

import logging
import sys
from argparse import Namespace

from app.cli.rendering import (
    classification_model,
    dump_json,
    render_structure_text,
    structure_report_model,
    to_json,
    triple_report_model,
)
from app.core.classification import classify_dim4
from app.core.lck_analysis import analyze
from app.core.triples import KahlerTriple, check_triple, semidirect, transport
from app.services.document_service import DocumentService
from app.services.example_registry import build_example
from app.services.search_service import SearchService, classification_line
from app.services.verification_service import VerificationService
from app.utils.exceptions import ValidationError
from app.utils.validators import parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3


def cmd_check(args: Namespace) -> int:
    """Analyze an algebra document, or the semidirect product of a triple document."""
    documents = DocumentService()
    loaded = documents.load_any(args.path)
    triple_report = None
    if isinstance(loaded, KahlerTriple):
        triple_report = check_triple(loaded)
        algebra, structure = semidirect(loaded)
    else:
        algebra, structure = loaded
    report = analyze(algebra, structure)

    if args.report == "json":
        payload = structure_report_model(report)
        if triple_report is not None:
            data = {"structure": payload.model_dump(), "triple": triple_report_model(loaded, triple_report).model_dump()}
            sys.stdout.write(dump_json(data))
        else:
            sys.stdout.write(to_json(payload))
    else:
        sys.stdout.write(render_structure_text(report, triple_report))
    return EXIT_OK


def cmd_example(args: Namespace) -> int:
    documents = DocumentService()
    params = {"b": args.b, "n": args.n, "c": args.c}
    example = build_example(args.name, documents.backend, **{k: v for k, v in params.items() if v is not None})
    documents.write(documents.algebra_to_document(example.algebra, example.structure), args.output)
    if args.triple:
        if example.triple is None:
            raise ValidationError(f"Example '{args.name}' has no triple", error_code="no_triple")
        documents.write(documents.triple_to_document(example.triple), args.triple)
    return EXIT_OK


def cmd_semidirect(args: Namespace) -> int:
    documents = DocumentService()
    algebra, structure = documents.load_algebra(args.h)
    u = documents.read_matrix(args.u, algebra.dim, "u")
    v = documents.read_matrix(args.v, algebra.dim, "v")
    triple = KahlerTriple(algebra, structure, u, v, documents.backend.scalar(parse_rational(args.c)))
    report = check_triple(triple)
    if report.failed:
        logger.warning(f"Triple fails: {', '.join(report.failed)}")
    product, product_structure = semidirect(triple)
    documents.write(documents.algebra_to_document(product, product_structure), args.output)
    return EXIT_OK


def cmd_classify4(args: Namespace) -> int:
    documents = DocumentService()
    result = classify_dim4(documents.load_triple(args.path))
    if args.report == "json":
        sys.stdout.write(to_json(classification_model(result)))
    else:
        sys.stdout.write(result.describe() + "\n")
    return EXIT_OK


def cmd_correspond(args: Namespace) -> int:
    documents = DocumentService()
    triple = documents.load_triple(args.path)
    moved = transport(triple, parse_rational(args.to_c))
    documents.write(documents.triple_to_document(moved), args.output)
    return EXIT_OK


def cmd_search(args: Namespace) -> int:
    if args.samples < 0:
        raise ValidationError(f"--samples must be non-negative, got {args.samples}")
    documents = DocumentService()
    service = SearchService(workers=args.workers)
    hits = service.run(
        args.n,
        parse_rational(args.c),
        args.samples,
        args.seed,
        tol=args.tol,
        fix_v_zero=args.fix_v_zero,
        require_v_nonzero=args.require_v_nonzero,
    )
    documents.write([documents.triple_to_document(hit) for hit in hits], args.output)
    if args.n == 1:
        for index, hit in enumerate(hits):
            print(f"hit {index}: {classification_line(hit)}", file=sys.stderr)
    print(f"{len(hits)} verified triple(s)", file=sys.stderr)
    return EXIT_OK


def cmd_verify_paper(args: Namespace) -> int:
    service = VerificationService(seed=args.seed)
    text = args.report == "text"
    summary = service.run(only=args.only, on_result=(lambda r: print(r.line())) if text else None)
    if text:
        verdict = "OK" if summary.passed else f"FAIL (first failure: {summary.first_failure})"
        print(f"[verify] {verdict} ({summary.total - summary.failures}/{summary.total} checks passed)")
    else:
        sys.stdout.write(to_json(summary))
    return EXIT_OK if summary.passed else EXIT_FAILED
