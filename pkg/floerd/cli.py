"""Command-line entry point: ``floerd <command> ...``.

Exit codes: 0 on success, 1 for precondition or mathematical errors, 2 for
file I/O errors. Results go to stdout, logs to stderr.
"""
import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from floerd.core.config import settings
from floerd.core.exceptions import FloerdException, ReportIOError
from floerd.core.logging_config import setup_logging
from floerd.services.complex_service import ComplexService
from floerd.services.expression_parser import ExpressionParser
from floerd.services.knot_service import KnotService
from floerd.services.metabolizer_service import MetabolizerService
from floerd.services.obstruction_service import FORMATS, ObstructionService
from floerd.services.surgery_service import SurgeryService

logger = logging.getLogger(__name__)


def dump(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), indent=2) + "\n"


def write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"Cannot write {out}: {e.strerror or e}", path=out) from e


def parse_vector(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ==============================================
# COMANDOS
# ==============================================

def cmd_validate(args: argparse.Namespace) -> int:
    report = ComplexService.validate(ComplexService.read(args.file))
    sys.stdout.write(dump(report))
    return 0 if report.valid else 1


def cmd_complex(args: argparse.Namespace) -> int:
    c = ExpressionParser.evaluate(args.knot, allow_large=args.allow_large)
    write_output(ComplexService.dumps(c), args.out)
    return 0


def cmd_constraints(args: argparse.Namespace) -> int:
    if args.torus is not None:
        report = KnotService.check_staircase_constraints(args.torus)
    else:
        report = KnotService.check_double_constraints(ExpressionParser.evaluate(args.knot))
    sys.stdout.write(dump(report))
    return 0 if report.passed else 1


def cmd_homology(args: argparse.Namespace) -> int:
    c = ExpressionParser.evaluate(args.knot)
    report = ComplexService.quotient_homology(c, args.m, window=args.window, tower_only=args.tower_only)
    write_output(dump(report), args.out)
    return 0


def cmd_d(args: argparse.Namespace) -> int:
    c = ExpressionParser.evaluate(args.knot)
    result = SurgeryService.d_invariant(c, args.q, args.m, window=args.window, knot=c.name)
    write_output(dump(result), args.out)
    return 0


def cmd_dbar(args: argparse.Namespace) -> int:
    c = ExpressionParser.evaluate(args.knot)
    table = asyncio.run(SurgeryService.dbar_table(c, args.p, knot=c.name, all_m=args.all_m, window=args.window))
    text = ObstructionService.emit(table, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    sys.stdout.write(dump(SurgeryService.theorem_bounds(args.p)))
    return 0


def cmd_metab_enumerate(args: argparse.Namespace) -> int:
    metabolizers = MetabolizerService.enumerate_metabolizers(args.p, args.n, args.form)
    data = [MetabolizerService.to_schema(m, args.form).model_dump(mode="json") for m in metabolizers]
    sys.stdout.write(json.dumps(data, indent=2) + "\n")
    return 0


def cmd_metab_special_vector(args: argparse.Namespace) -> int:
    metabolizer = MetabolizerService.from_generators(args.p, args.gens, args.form)
    sys.stdout.write(dump(MetabolizerService.special_vector(metabolizer)))
    return 0


def cmd_metab_rho(args: argparse.Namespace) -> int:
    sys.stdout.write(dump(MetabolizerService.rho_permutation(args.p, args.a)))
    return 0


def cmd_metab_verify(args: argparse.Namespace) -> int:
    table = ObstructionService.read_table(args.dbar) if args.dbar else None
    verdict = MetabolizerService.verify_appendix_theorem(args.p, args.n, args.form, table, a=args.a)
    sys.stdout.write(dump(verdict))
    return 0


def cmd_obstruct(args: argparse.Namespace) -> int:
    report = asyncio.run(ObstructionService.obstruct(
        args.p, knot=args.knot, bounds_only=args.bounds_only, window=args.window, n=args.n, form=args.form,
    ))
    text = ObstructionService.emit(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("floerd.main:app", host=args.host, port=args.port, reload=settings.DEBUG)
    return 0


# ==============================================
# PARSER
# ==============================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floerd",
        description="Knot Floer complexes, surgery d-invariants and metabolizer obstructions.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING... (default from settings)")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", help="validate a complex JSON document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser("complex", help="build the complex of a knot expression")
    p.add_argument("--knot", required=True)
    p.add_argument("--out")
    p.add_argument("--allow-large", action="store_true", help="ignore FLOERD_MAX_GENERATORS")
    p.set_defaults(func=cmd_complex)

    p = commands.add_parser("constraints", help="check the filtration bounds of a model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--knot", help="check the doubled-trefoil bounds")
    group.add_argument("--torus", type=int, metavar="P", help="check the T(P-1,P) staircase bounds")
    p.set_defaults(func=cmd_constraints)

    p = commands.add_parser("homology", help="homology of the truncated quotient complex")
    p.add_argument("--knot", required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--window", type=int)
    p.add_argument("--tower-only", action="store_true", help="skip acyclic components")
    p.add_argument("--out")
    p.set_defaults(func=cmd_homology)

    p = commands.add_parser("d", help="d-invariant of a large surgery")
    p.add_argument("--knot", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--window", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_d)

    p = commands.add_parser("dbar", help="d-bar table of S^3_{p^2}(K)")
    p.add_argument("--knot", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--all-m", action="store_true")
    p.add_argument("--window", type=int)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dbar)

    p = commands.add_parser("bounds", help="symbolic bounds for S^3_{p^2}(L_p)")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    metab = commands.add_parser("metab", help="linking forms and metabolizers").add_subparsers(
        dest="metab_command", required=True
    )
    p = metab.add_parser("enumerate")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--form")
    p.set_defaults(func=cmd_metab_enumerate)

    p = metab.add_parser("special-vector")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--gens", type=parse_vector, action="append", required=True, help="generator, repeatable")
    p.add_argument("--form", help="require a metabolizer of this linking form")
    p.set_defaults(func=cmd_metab_special_vector)

    p = metab.add_parser("rho")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=int)
    p.set_defaults(func=cmd_metab_rho)

    p = metab.add_parser("verify")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--form")
    p.add_argument("--a", type=int)
    p.add_argument("--dbar", help="d-bar table or obstruction report JSON")
    p.set_defaults(func=cmd_metab_verify)

    p = commands.add_parser("obstruct", help="end-to-end obstruction report")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--knot", help="knot expression (default lp:<p>)")
    p.add_argument("--bounds-only", action="store_true")
    p.add_argument("--window", type=int)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--form")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_obstruct)

    p = commands.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default=settings.SERVER_HOST)
    p.add_argument("--port", type=int, default=settings.SERVER_PORT)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level)
    try:
        return args.func(args)
    except FloerdException as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        sys.stderr.write(json.dumps(e.to_dict(), default=str) + "\n")
        return e.exit_code
    except OSError as e:
        logger.error(f"Error de E/S: {e}")
        sys.stderr.write(json.dumps({"error": "ReportIOError", "message": str(e)}) + "\n")
        return 2
