"""
Command-line interface for sympball.

Provides argument parsing, the subcommands and the mapping from errors to
exit codes.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import jinja2

from . import __version__
from .balls import ExactnessThresholds, analyze_split, analyze_subspace
from .campaign import CampaignSettings, run_campaign
from .config import Config, VALID_FORMATS
from .exceptions import SympballError, ValidationError
from .matrix_file import (
    dumps_matrix,
    read_matrix_file,
    read_subspace_file,
    write_json,
    write_matrix_file,
    write_text,
)
from .report import TextReporter
from .symplectic import (
    lemma1_check,
    random_symplectic,
    symplectic_residual,
    symplectic_spectrum,
    williamson,
)
from .utils import ensure_directory

logger = logging.getLogger("sympball")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO_ERROR = 2
# Outside the documented table: a defect in sympball itself.
EXIT_INTERNAL = 70


def setup_logging(level: str = "INFO", log_file: Optional[Path] = None) -> None:
    """
    Configure logging.

    Results go to stdout, so log records are written to stderr.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR).
        log_file: Optional log file path.
    """
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file:
        ensure_directory(log_file.parent)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=log_format,
        handlers=handlers,
        force=True,
    )


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="sympball",
        description=f"sympball v{__version__} - projections of symplectic balls",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s spectrum --input m.json
  %(prog)s project --input s.json --na 1 --radius 2
  %(prog)s verify --n 2 3 --cases 50 --seed 7
  %(prog)s gen-sp --n 3 --spread 0.5 --seed 1 --out s.json
        """
    )

    # Global options
    parser.add_argument(
        '--config', '-c',
        help='Configuration file path (JSON, optional)'
    )
    parser.add_argument(
        '--format', '-f',
        choices=VALID_FORMATS,
        help='Output format (overrides config, default: json)'
    )
    parser.add_argument(
        '--debug',
        action='store_true',
        help='Enable debug logging'
    )
    parser.add_argument(
        '--log-file',
        type=Path,
        help='Also write log records to this file'
    )
    parser.add_argument(
        '--version', '-v',
        action='version',
        version=f'%(prog)s {__version__}'
    )

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    spectrum = commands.add_parser('spectrum', help='Symplectic spectrum and M + iJ >= 0 test')
    spectrum.add_argument('--input', '-i', required=True, type=Path, help='MatrixFile with M')
    spectrum.add_argument('--out', '-o', type=Path, help='Write the result here instead of stdout')

    decompose = commands.add_parser('williamson', help='Williamson normal form M = S^T D S')
    decompose.add_argument('--input', '-i', required=True, type=Path, help='MatrixFile with M')
    decompose.add_argument('--out', '-o', type=Path, help='Write the result here instead of stdout')

    project = commands.add_parser('project', help='Project S(B(R)) onto a block or complex subspace')
    project.add_argument('--input', '-i', required=True, type=Path, help='MatrixFile with S')
    project.add_argument('--na', type=int, help='Degrees of freedom kept (first n_A)')
    project.add_argument('--radius', '-r', type=float, default=1.0, help='Ball radius (default: 1)')
    project.add_argument('--subspace', type=Path, help='Subspace file spanning a complex subspace')
    project.add_argument('--out', '-o', type=Path, help='Write the result here instead of stdout')

    verify = commands.add_parser('verify', help='Run a randomized verification campaign')
    verify.add_argument('--n', type=int, nargs='+', help='Degrees of freedom (config: verify.n)')
    verify.add_argument('--cases', type=int, help='Cases per size (config: verify.cases)')
    verify.add_argument('--spread', type=float, nargs='+', help='Generator spreads (config: verify.spread)')
    verify.add_argument('--seed', type=int, help='Master seed (config: verify.seed)')
    verify.add_argument('--samples', type=int, help='Containment samples per case (config: verify.samples)')
    verify.add_argument('--workers', type=int, help='Worker threads (config: verify.max_workers)')
    verify.add_argument('--out', '-o', type=Path, help='Write the report here instead of stdout')

    generate = commands.add_parser('gen-sp', help='Write a random symplectic matrix')
    generate.add_argument('--n', type=int, required=True, help='Degrees of freedom')
    generate.add_argument('--spread', type=float, default=1.0, help='Generator spread (default: 1)')
    generate.add_argument('--seed', type=int, default=0, help='Seed (default: 0)')
    generate.add_argument('--out', '-o', type=Path, help='MatrixFile path (stdout if omitted)')

    return parser.parse_args(argv)


# ============================================================================
# OUTPUT
# ============================================================================

def emit(document: Dict[str, Any], template: str, fmt: str, out: Optional[Path] = None,
         schema_name: Optional[str] = None) -> None:
    """Write a result document as JSON or rendered text to ``out`` or stdout."""
    if fmt == 'text':
        text = TextReporter().render(template, document)
    else:
        text = write_json(document, schema_name=schema_name)
    if out:
        write_text(out, text)
        logger.info(f"Result written to {out}")
    else:
        sys.stdout.write(text)


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_spectrum(args: argparse.Namespace, config: Config, fmt: str) -> int:
    source = read_matrix_file(args.input)
    tol = config.tolerance
    spectrum = symplectic_spectrum(source.matrix, source.n, tol)
    positivity = lemma1_check(source.matrix, source.n, tol)
    emit({
        "n": source.n,
        "spectrum": list(spectrum),
        "psd": positivity.psd,
        "min_spec": positivity.min_spec,
        "embedding_psd": positivity.embedding_psd,
    }, 'spectrum', fmt, args.out)
    return EXIT_OK


def cmd_williamson(args: argparse.Namespace, config: Config, fmt: str) -> int:
    source = read_matrix_file(args.input)
    decomposition = williamson(source.matrix, source.n, config.tolerance)
    emit({
        "n": source.n,
        "S": decomposition.S.tolist(),
        "Lambda": [float(v) for v in decomposition.Lambda],
        "residuals": decomposition.residuals(source.matrix),
    }, 'williamson', fmt, args.out)
    return EXIT_OK


def cmd_project(args: argparse.Namespace, config: Config, fmt: str) -> int:
    source = read_matrix_file(args.input)
    tol = config.tolerance
    thresholds = ExactnessThresholds.from_config(config.exactness)
    if args.subspace:
        subspace = read_subspace_file(args.subspace)
        analysis = analyze_subspace(source.matrix, subspace, args.radius,
                                    tol=tol, thresholds=thresholds)
    else:
        if args.na is None:
            raise ValidationError("--na is required without --subspace", field="na")
        analysis = analyze_split(source.matrix, args.na, args.radius,
                                 tol=tol, thresholds=thresholds)
    if analysis.borderline:
        logger.warning("Exactness is borderline: at least one criterion lies in its tolerance band")
    document = analysis.to_dict()
    document["subspace"] = bool(args.subspace)
    emit(document, 'projection', fmt, args.out, schema_name='projection_analysis')
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config, fmt: str) -> int:
    overrides = {
        'verify.n': args.n,
        'verify.cases': args.cases,
        'verify.spread': args.spread,
        'verify.seed': args.seed,
        'verify.samples': args.samples,
        'verify.max_workers': args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            config.set(key, value)
    settings = CampaignSettings.from_config(config)
    report = run_campaign(settings, config.tolerance,
                          ExactnessThresholds.from_config(config.exactness))
    emit(report.to_dict(), 'campaign', fmt, args.out, schema_name='campaign_report')
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_gen_sp(args: argparse.Namespace, config: Config, fmt: str) -> int:
    s = random_symplectic(args.n, args.spread, args.seed, config.tolerance)
    if args.out is None:
        sys.stdout.write(dumps_matrix(s))
        return EXIT_OK
    path = write_matrix_file(args.out, s)
    document = {
        "n": args.n,
        "spread": args.spread,
        "seed": args.seed,
        "path": str(path),
        "residual": symplectic_residual(s),
    }
    emit(document, 'generated', fmt)
    return EXIT_OK


COMMANDS = {
    'spectrum': cmd_spectrum,
    'williamson': cmd_williamson,
    'project': cmd_project,
    'verify': cmd_verify,
    'gen-sp': cmd_gen_sp,
}


def run(args: argparse.Namespace) -> int:
    """
    Main execution logic.

    Args:
        args: Parsed command-line arguments.

    Returns:
        Exit code: 0 ok, 1 invariant failure, 2 I/O, parse or template error,
        3 not positive definite, 4 not symplectic, 5 not a complex subspace,
        70 unexpected internal error.
    """
    try:
        config = Config(args.config)
        if not args.debug:
            logger.setLevel(config.log_level)
        fmt = args.format or config.output['format']
        return COMMANDS[args.command](args, config, fmt)
    except SympballError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except (OSError, jinja2.TemplateError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_IO_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_INTERNAL


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point."""
    args = parse_args(argv)

    # Setup logging
    log_level = "DEBUG" if args.debug else "INFO"
    setup_logging(level=log_level, log_file=args.log_file)

    sys.exit(run(args))


if __name__ == "__main__":
    main()
