"""
Argument parser for the lck command-line tool.
"""

import argparse

from app.cli import commands
from app.services.example_registry import EXAMPLES
from app.services.verification_service import GROUPS, SECTIONS


def _add_report(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--report",
        choices=("text", "json"),
        default="text",
        help="Output format (default: text)",
    )


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--output", default=None, help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lck",
        description="Exact analysis, construction and search of LCK structures on Lie algebras.",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="Override LOG_LEVEL for this run",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    check = subparsers.add_parser("check", help="Report every structure flag of an algebra or triple document")
    check.add_argument("path", help="Algebra or triple document ('-' for stdin)")
    _add_report(check)
    check.set_defaults(handler=commands.cmd_check)

    example = subparsers.add_parser("example", help="Write a named example as an algebra document")
    example.add_argument("name", choices=sorted(EXAMPLES))
    example.add_argument("--b", default=None, help="Rational parameter of the gb family")
    example.add_argument("--n", type=int, default=None, help="Half the dimension of the Kähler ideal (dim)")
    example.add_argument("--c", default=None, help="Rational parameter of r2c")
    example.add_argument("--triple", default=None, metavar="PATH", help="Also write the triple document to PATH")
    _add_output(example)
    example.set_defaults(handler=commands.cmd_example)

    semidirect = subparsers.add_parser("semidirect", help="Build r2c ⋉ h from a Kähler algebra and (u, v)")
    semidirect.add_argument("--c", required=True, help="Rational constant c")
    semidirect.add_argument("--h", required=True, help="Kähler algebra document")
    semidirect.add_argument("--u", required=True, help="Matrix file or inline JSON rows")
    semidirect.add_argument("--v", required=True, help="Matrix file or inline JSON rows")
    _add_output(semidirect)
    semidirect.set_defaults(handler=commands.cmd_semidirect)

    classify4 = subparsers.add_parser("classify4", help="Classify a triple on a 2-dimensional Kähler algebra")
    classify4.add_argument("path", help="Triple document")
    _add_report(classify4)
    classify4.set_defaults(handler=commands.cmd_classify4)

    correspond = subparsers.add_parser("correspond", help="Move a triple with abelian h to another constant c")
    correspond.add_argument("--to-c", required=True, help="Target rational constant")
    correspond.add_argument("path", help="Triple document")
    _add_output(correspond)
    correspond.set_defaults(handler=commands.cmd_correspond)

    search = subparsers.add_parser("search", help="Sample rational triples on the abelian Kähler algebra")
    search.add_argument("--n", type=int, required=True, help="Half the dimension of h")
    search.add_argument("--c", required=True, help="Rational constant c")
    search.add_argument("--samples", type=int, default=100)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--tol", type=float, default=None, help="Descent tolerance")
    search.add_argument("--workers", type=int, default=None, help="Worker threads (default: SEARCH_WORKERS)")
    search.add_argument("--fix-v-zero", action="store_true", help="Restrict to v = 0")
    search.add_argument("--require-v-nonzero", action="store_true", help="Keep only triples with v != 0")
    _add_output(search)
    search.set_defaults(handler=commands.cmd_search)

    verify = subparsers.add_parser("verify-paper", help="Run the built-in verification suite")
    verify.add_argument(
        "--only",
        action="append",
        choices=GROUPS + tuple(SECTIONS),
        default=None,
        help="Check group or section; repeatable",
    )
    verify.add_argument("--seed", type=int, default=2024, help="Seed of the randomized checks")
    _add_report(verify)
    verify.set_defaults(handler=commands.cmd_verify_paper)

    return parser
