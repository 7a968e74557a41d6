"""
CLI entry point for humbert-series.
Handles argument parsing, configuration, output formatting and exit codes.
"""

import os
import sys
import json
import logging
import argparse
from dataclasses import replace
from fractions import Fraction

from dotenv import load_dotenv

from humbert_series import __version__
from humbert_series.errors import ConfigError, HumbertError
from humbert_series.kernels import DEFAULT_CONTROL, SeriesControl
from humbert_series.oracle import Identity, compare_formal
from humbert_series.verify import (
    ALL_METHODS,
    csv_report,
    evaluate,
    json_report,
    load_grid_spec,
    locus_y,
    parse_scalar,
    run_grid,
    summarize,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 4


# ─── Argument Parsing ────────────────────────────────────────────────────────


def parse_args(argv=None):
    """Parse command-line arguments.

    Args:
        argv: Argument list (default: sys.argv[1:]). Testable.
    """
    parser = argparse.ArgumentParser(
        description="Evaluate and cross-verify Humbert's functions Phi2, Phi3 and Psi2.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s eval --function phi3 --params b=1,c=2 --x 1 --y 0
  %(prog)s eval --function psi2 --params a=1,b=1,c=2 --x 0.5 --y 0.25 --method series2f1 --format json
  %(prog)s verify --spec grid.json --out report.csv --format csv
  %(prog)s oracle --identity eq15 --params b=1/2,c=5/2 --deg 8
  %(prog)s identities
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log series traces (DEBUG).")

    commands = parser.add_subparsers(dest="command", required=True)

    ev = commands.add_parser("eval", help="Evaluate one function by one method.")
    ev.add_argument("--function", type=str.lower, choices=["phi2", "phi3", "psi2"], required=True)
    ev.add_argument("--params", required=True, help="Comma list, e.g. a=1.5,b=2,c=3 (complex: 1+2j)")
    ev.add_argument("--x", required=True, help="x as <re>[,<im>]")
    ev.add_argument("--y", default=None,
                    help="y as <re>[,<im>] (optional for diag2f2, gaussterms, equalargs3f3)")
    ev.add_argument("--method", type=str.lower, choices=ALL_METHODS, default="direct")
    ev.add_argument("--rel-tol", type=float, default=None)
    ev.add_argument("--max-terms", type=int, default=None)
    ev.add_argument("--small-run", type=int, default=None)
    ev.add_argument("--format", choices=["json", "plain"], default="plain")

    vf = commands.add_parser("verify", help="Run a grid-sweep verification from a JSON spec file.")
    vf.add_argument("--spec", required=True, help="Path to the grid spec (JSON).")
    vf.add_argument("--out", default=None, help="Report path (default: stdout).")
    vf.add_argument("--format", choices=["json", "csv"], default="json")
    vf.add_argument("--gate", type=float, default=None, help="Override the spec file's gate.")
    vf.add_argument("--workers", type=int, default=None,
                    help="Worker threads (default: HUMBERT_WORKERS, then the spec file).")

    orc = commands.add_parser("oracle", help="Exact formal-series certificate for an identity.")
    orc.add_argument("--identity", type=str.lower,
                     choices=[identity.value.lower() for identity in Identity], required=True)
    orc.add_argument("--params", required=True, help="Rational values, e.g. b=1/2,c=5/2")
    orc.add_argument("--deg", type=int, default=8, help="Degree cap in x (default: 8).")
    orc.add_argument("--deg-t", type=int, default=None, help="Degree cap in t (default: --deg).")
    orc.add_argument("--printed", action="store_true",
                     help="Use the printed eq15 upper parameter -k-b+1 instead of -k-c+b+1.")

    ids = commands.add_parser("identities", help="List identity ids and adopted corrections.")
    ids.add_argument("--format", choices=["json", "plain"], default="plain")

    return parser.parse_args(argv)


# ─── Config ──────────────────────────────────────────────────────────────────


def get_config_dir() -> str:
    """Configuration directory: ~/.config/humbert-series/ on all platforms."""
    return os.path.join(os.path.expanduser("~"), ".config", "humbert-series")


def load_env() -> None:
    """Load .env from the config directory, then the project directory.

    Earlier files win; already-set environment variables are never overridden.
    """
    project_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    load_dotenv(os.path.join(get_config_dir(), ".env"))
    load_dotenv(os.path.join(project_dir, ".env"))


def _env_number(name: str, default, cast):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ConfigError(f"{name}={raw!r} is not a valid {cast.__name__}") from e


def build_control(args) -> SeriesControl:
    """SeriesControl from CLI flags, falling back to HUMBERT_* environment variables."""
    rel_tol = getattr(args, "rel_tol", None)
    max_terms = getattr(args, "max_terms", None)
    small_run = getattr(args, "small_run", None)
    return SeriesControl(
        rel_tol=rel_tol if rel_tol is not None
        else _env_number("HUMBERT_REL_TOL", DEFAULT_CONTROL.rel_tol, float),
        max_terms=max_terms if max_terms is not None
        else _env_number("HUMBERT_MAX_TERMS", DEFAULT_CONTROL.max_terms, int),
        small_run=small_run if small_run is not None
        else _env_number("HUMBERT_SMALL_RUN", DEFAULT_CONTROL.small_run, int),
    )


# ─── Logging Setup ───────────────────────────────────────────────────────────


def setup_logging(machine_output: bool, verbose: bool = False):
    """Configure logging on stderr.

    With machine-readable output, suppress info logs so stdout stays parseable.
    """
    if verbose:
        level = logging.DEBUG
    else:
        level = logging.WARNING if machine_output else logging.INFO
    logging.basicConfig(level=level, format="%(message)s")


# ─── Input Parsing ───────────────────────────────────────────────────────────


def parse_assignments(text: str) -> dict[str, str]:
    """Split 'a=1.5,b=2,c=3' into {'a': '1.5', 'b': '2', 'c': '3'}."""
    values = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ConfigError(f"Invalid parameter assignment {item!r}; expected name=value")
        values[name.strip().lower()] = value.strip()
    return values


def parse_point(text: str) -> complex:
    """Parse '<re>' or '<re>,<im>'."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise ConfigError(f"Invalid coordinate {text!r}: {e}") from e
    raise ConfigError(f"Invalid coordinate {text!r}; expected <re>[,<im>]")


def parse_rational_params(text: str) -> dict[str, Fraction]:
    params = {}
    for name, value in parse_assignments(text).items():
        try:
            params[name] = Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"Parameter {name}={value!r} is not a rational number") from e
    return params


# ─── Output ──────────────────────────────────────────────────────────────────


def _scalar_dict(value: complex) -> dict:
    return {"re": value.real, "im": value.imag}


def format_plain(value: complex) -> str:
    if value.imag == 0:
        return f"{value.real:.15g}"
    return f"{value.real:.15g}{value.imag:+.15g}j"


IDENTITY_NOTES = {
    Identity.EQ13: ("Psi2(b; b, c; x, y) = exp(x+y) Phi3(c-b; c; -y, x y)",
                    "right side read as Phi3 (one upper parameter), not two-parameter Phi2"),
    Identity.EQ14: ("Psi2(a; b, c; x, y) = sum_k (a)_k/(b)_k 2F1(-k, -k-b+1; c; y/x) x^k/k!",
                    "none; requires x != 0"),
    Identity.EQ15: ("Phi3(b; c; x, y) = exp(x+y/x) sum_k (-y/x)^k/k! 2F1(-k, -k-c+b+1; c; x^2/y)",
                    "upper parameter -k-c+b+1 (printed form -k-b+1 is rejected by the oracle)"),
    Identity.EQ16: ("Phi2(a, b; c; x, y) = sum_m (a)_m/(c)_m 2F1(-m, b; 1-a-m; y/x) x^m/m!",
                    "Phi2 taken as the standard two-parameter Humbert series"),
    Identity.EQ26: ("exp(x) 1F1(c-b; c; -x) = 1F1(b; c; x)",
                    "none (Kummer's first transformation)"),
    Identity.EQ31: ("Phi3(b; c; x, x^2) = exp(2x) sum_k (-x)^k/k! 2F1(-k, -k-c+b+1; c; 1)",
                    "single (-x)^k/k! factor; the duplicated (-y/x)^k factor is dropped"),
    Identity.EQ33: ("Phi3(b; c; x, x^2) = exp(2x) 2F2(c-b/2, c-b/2-1/2; c, 2c-b-1; -4x)",
                    "none"),
    Identity.EQ34: ("Psi2(b; b, 2b; x, x) = 2F2(3b/2, (3b-1)/2; 2b, 3b-1; 4x)",
                    "none"),
    Identity.BC3F3: ("Psi2(a; b, c; x, x) = 3F3(a, (c+b)/2, (c+b-1)/2; b, c, c+b-1; 4x)",
                     "left side read as Psi2(a; b, c; x, x) so that a is bound"),
}


# ─── Commands ────────────────────────────────────────────────────────────────


def run_eval(args) -> int:
    json_mode = args.format == "json"
    params = {name: parse_scalar(value) for name, value in parse_assignments(args.params).items()}
    x = parse_point(args.x)
    if args.y is not None:
        y = parse_point(args.y)
    else:
        y = locus_y(args.method, x)
        if y is None:
            raise ConfigError(f"--y is required for method {args.method}")

    ctrl = build_control(args)
    outcome = evaluate(args.function, args.method, params, x, y, ctrl)
    logger.info(f"{args.function} by {args.method}: {outcome.terms} terms, "
                f"est_error {outcome.est_error:.2e}, condition {outcome.condition:.2e}")

    if json_mode:
        print(json.dumps({
            "function": args.function,
            "params": {name: _scalar_dict(v) for name, v in params.items()},
            "x": _scalar_dict(x),
            "y": _scalar_dict(y),
            "method": args.method,
            "value": _scalar_dict(outcome.value),
            "terms": outcome.terms,
            "est_error": outcome.est_error,
            "converged": outcome.converged,
        }, indent=2))
    else:
        print(format_plain(outcome.value))
    return EXIT_OK


def run_verify(args) -> int:
    spec, gate = load_grid_spec(args.spec)
    if args.gate is not None:
        gate = args.gate
    workers = args.workers
    if workers is None:
        workers = _env_number("HUMBERT_WORKERS", None, int)
    if workers is not None:
        spec = replace(spec, workers=workers)

    records = run_grid(spec, gate)
    summary = summarize(records)
    report = csv_report(records) if args.format == "csv" else json_report(records)

    if args.out:
        try:
            with open(args.out, "w", newline="") as f:
                f.write(report)
        except OSError as e:
            raise ConfigError(f"cannot write report {args.out}: {e}") from e
        logger.info(f"Report written to {args.out}")
    else:
        sys.stdout.write(report)

    logger.info(f"{summary['total']} records: {summary['pass']} pass, {summary['fail']} fail, "
                f"{summary['skipped']} skipped; max rel err {summary['max_rel_err']:.3e}")
    if summary["fail"]:
        logger.warning(f"Verification failed at {summary['fail']} grid point(s)")
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def run_oracle(args) -> int:
    params = parse_rational_params(args.params)
    deg_t = args.deg if args.deg_t is None else args.deg_t
    variant = "printed" if args.printed else "corrected"
    certificate = compare_formal(args.identity.upper(), params, args.deg, deg_t, variant)
    print(json.dumps(certificate.as_dict(), indent=2))
    return EXIT_OK if certificate.equal else EXIT_VERIFICATION_FAILED


def run_identities(args) -> int:
    entries = [
        {"id": identity.value.lower(), "identity": formula, "correction": correction}
        for identity, (formula, correction) in IDENTITY_NOTES.items()
    ]
    if args.format == "json":
        print(json.dumps(entries, indent=2))
    else:
        for entry in entries:
            print(f"{entry['id']:<6} {entry['identity']}")
            print(f"       correction: {entry['correction']}")
    return EXIT_OK


COMMANDS = {
    "eval": run_eval,
    "verify": run_verify,
    "oracle": run_oracle,
    "identities": run_identities,
}


# ─── Main ────────────────────────────────────────────────────────────────────


def main(argv=None) -> int:
    """Main entry point. Returns the process exit code."""
    load_env()
    args = parse_args(argv)
    json_mode = getattr(args, "format", "plain") == "json"
    machine_output = args.command in ("oracle",) or getattr(args, "format", "plain") != "plain"
    setup_logging(machine_output, args.verbose)

    try:
        return COMMANDS[args.command](args)
    except HumbertError as e:
        if json_mode:
            print(json.dumps({"success": False, "error": str(e)}))
        else:
            print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
