"""
Command-line front-end.

Every verb builds a Scenario from its flags; ``run --config scenario.json``
reads the Scenario from a file instead. Results go to ``--out`` (or standard
output), diagnostics to standard error. Exit status: 0 success, 1 invalid
input, 2 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import orjson

from src.config.manager import ConfigManager
from src.core.errors import ErrorHandler, NumericalError, ScenarioValidationError
from src.core.logging import get_logger, log_structured, setup_logging
from src.runner.base import CommandOutput, Scenario, Table
from src.runner.commands import COMMAND_CLASSES
from src.utils.file_utils import ArtifactWriter, companion_path


logger = get_logger("runner")

# flags that are not command parameters
_SCENARIO_FLAGS = {"command", "output_path", "format", "config"}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as validation failures."""

    def error(self, message: str):
        raise ScenarioValidationError(self.prog, message)


def _add_output_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--out", dest="output_path", default=None,
                        help="Output file (standard output when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], default=None,
                        help="Output format (default: from --out suffix, else csv)")


def _add_bc_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--bc", choices=["dirichlet", "neumann", "robin", "whole-line"],
                        default=argparse.SUPPRESS)
    parser.add_argument("--sigma", type=float, default=argparse.SUPPRESS,
                        help="Robin parameter, sigma >= 0")


def _add_potential_flags(parser: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    parser.add_argument("--potential", choices=["gaussian-bumps", "sech2", "mollified-delta", "zero", "csv"],
                        default=s)
    parser.add_argument("--seed", type=int, default=s, help="RNG seed for gaussian-bumps")
    parser.add_argument("--n-bumps", dest="n_bumps", type=int, default=s)
    parser.add_argument("--amplitude", type=float, default=s)
    parser.add_argument("--support", type=float, default=s)
    parser.add_argument("--alpha-re", dest="alpha_re", type=float, default=s)
    parser.add_argument("--alpha-im", dest="alpha_im", type=float, default=s)
    parser.add_argument("--c-re", dest="c_re", type=float, default=s)
    parser.add_argument("--c-im", dest="c_im", type=float, default=s)
    parser.add_argument("--b", type=float, default=s)
    parser.add_argument("--width", type=float, default=s)
    parser.add_argument("--potential-file", dest="potential_file", default=s,
                        help="CSV with columns x,re_v,im_v")
    parser.add_argument("--nodes", type=int, default=s)
    _add_bc_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per verb."""
    s = argparse.SUPPRESS
    parser = _Parser(prog="hs-enclosure", description="Halfline Schrodinger spectral enclosures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="Dirichlet enclosure curve and whole-line circle")
    p.add_argument("--n", type=int, default=s)
    _add_output_flags(p)

    p = sub.add_parser("gfun", help="Tabulate g(a)")
    p.add_argument("--a", nargs="+", type=float, default=s)
    p.add_argument("--a-min", dest="a_min", type=float, default=s)
    p.add_argument("--a-max", dest="a_max", type=float, default=s)
    p.add_argument("--points", type=int, default=s)
    _add_output_flags(p)

    p = sub.add_parser("extremal", help="Extremal Dirichlet delta potential")
    p.add_argument("--m", type=float, default=s)
    p.add_argument("--theta", type=float, default=s, help="Radians")
    _add_output_flags(p)

    p = sub.add_parser("delta-eigs", help="Eigenvalues of c delta(x - b)")
    p.add_argument("--c-re", dest="c_re", type=float, default=s)
    p.add_argument("--c-im", dest="c_im", type=float, default=s)
    p.add_argument("--b", type=float, default=s)
    _add_bc_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("verify-bs", help="Birman-Schwinger norm bound check")
    _add_potential_flags(p)
    p.add_argument("--mu", nargs=2, type=float, action="append", metavar=("RE", "IM"), default=s)
    _add_output_flags(p)

    for verb, text in (("shoot", "Shooting eigenvalue search"), ("audit", "Enclosure audit")):
        p = sub.add_parser(verb, help=text)
        _add_potential_flags(p)
        p.add_argument("--lambda-seed", dest="seeds", nargs=2, type=float, action="append",
                       metavar=("RE", "IM"), default=s)
        _add_output_flags(p)

    p = sub.add_parser("keller", help="Keller constant against the sech^2 family")
    p.add_argument("--gamma", nargs="+", type=float, default=s)
    _add_output_flags(p)

    p = sub.add_parser("run", help="Execute a scenario file")
    p.add_argument("--config", required=True, help="JSON file holding one Scenario object")
    _add_output_flags(p)

    return parser


def scenario_from_args(args: argparse.Namespace) -> Scenario:
    """Turn parsed flags into a validated Scenario."""
    if args.command == "run":
        data = load_scenario_file(args.config)
        if args.output_path is not None:
            data["output_path"] = args.output_path
        if args.format is not None:
            data["format"] = args.format
        return Scenario.from_mapping(data)

    parameters = {k: v for k, v in vars(args).items() if k not in _SCENARIO_FLAGS}
    return Scenario.from_mapping({
        "command": args.command,
        "parameters": parameters,
        "output_path": args.output_path,
        "format": args.format,
    })


def load_scenario_file(path: str) -> Dict[str, Any]:
    """Decode a scenario JSON file."""
    try:
        data = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise ScenarioValidationError("run", f"scenario file not found: {path}")
    except orjson.JSONDecodeError as e:
        raise ScenarioValidationError("run", f"scenario file is not valid JSON: {e}")

    if not isinstance(data, dict):
        raise ScenarioValidationError("run", "scenario file must hold one JSON object")
    return data


def _document(command: str, output: CommandOutput, table: Table) -> Dict[str, Any]:
    return {
        "command": command,
        "status": output.status,
        "summary": output.content,
        "metadata": output.metadata,
        "records": table.records(),
    }


def emit(scenario: Scenario, output: CommandOutput, stdout: TextIO,
         writer: Optional[ArtifactWriter] = None) -> List[Path]:
    """
    Write a command's tables in the scenario's format.

    Args:
        scenario: The executed scenario
        output: Command result
        stdout: Stream used when no output path is given
        writer: Artifact writer

    Returns:
        Paths written (empty when streaming to stdout)
    """
    writer = writer or ArtifactWriter()
    fmt = scenario.resolved_format()

    def render(table: Table) -> bytes:
        if fmt == "json":
            return writer.render_json(_document(scenario.command, output, table))
        return writer.render_csv(table.header, table.rows).encode("utf-8")

    if scenario.output_path is None:
        stdout.write(render(output.table).decode("utf-8"))
        return []

    main_path = Path(scenario.output_path)
    written = []
    if fmt == "json":
        written.append(writer.write_json(main_path, _document(scenario.command, output, output.table)))
    else:
        written.append(writer.write_csv(main_path, output.table.header, output.table.rows))

    for suffix, table in sorted(output.companions.items()):
        path = companion_path(main_path, suffix)
        if fmt == "json":
            written.append(writer.write_json(path, _document(scenario.command, output, table)))
        else:
            written.append(writer.write_csv(path, table.header, table.rows))
    return written


def run_scenario(scenario: Scenario, config: Optional[ConfigManager] = None,
                 stdout: Optional[TextIO] = None) -> int:
    """
    Execute one scenario and write its artifacts.

    Args:
        scenario: Validated scenario
        config: Configuration manager
        stdout: Stream for results without an output path

    Returns:
        Exit status 0

    Raises:
        NumericalError: when the command reports a failed check
    """
    config = config or ConfigManager()
    command = COMMAND_CLASSES[scenario.command](config)
    params = command.validate(scenario.parameters)
    output = command.execute(params)
    written = emit(scenario, output, stdout or sys.stdout)

    log_structured(logger, logging.INFO, output.content, command=scenario.command,
                   status=output.status, files=[str(p) for p in written])
    if not output.ok:
        raise NumericalError(output.content, {"command": scenario.command, **output.metadata})
    return ErrorHandler.EXIT_OK


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    CLI entry point.

    Args:
        argv: Arguments without the program name
        stdout: Stream for results without an output path

    Returns:
        Exit status
    """
    handler = ErrorHandler()
    try:
        config = ConfigManager()
        setup_logging(config.section("logging"))
        scenario = scenario_from_args(build_parser().parse_args(argv))
        return run_scenario(scenario, config, stdout)
    except Exception as e:
        code = handler.exit_code_for(e)
        print(handler.format_user_error(e), file=sys.stderr)
        return code
