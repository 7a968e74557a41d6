"""
Grid-sweep verification: evaluate one function by several representations
at every (parameters x point) combination, compare them pairwise, and
produce JSON or CSV reports.
"""

import csv
import io
import itertools
import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from humbert_series.errors import ConfigError, DomainError, InvalidParameter, NotConverged
from humbert_series.humbert import (
    Phi2Params,
    Phi3Params,
    Psi2Params,
    phi2_direct,
    phi3_direct,
    psi2_direct,
)
from humbert_series.kernels import DEFAULT_CONTROL, TINY, EvalOutcome, Scalar, SeriesControl
from humbert_series.representations import (
    phi2_via_2f1_series,
    phi3_diagonal_2f2,
    phi3_gauss_terms,
    phi3_via_2f1_series,
    psi2_equal_args_3f3,
    psi2_via_2f1_series,
    psi2_via_phi3,
)
from humbert_series.workers import create_executor

logger = logging.getLogger(__name__)


class FunctionId(str, Enum):
    PHI2 = "PHI2"
    PHI3 = "PHI3"
    PSI2 = "PSI2"


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED_DOMAIN = "SKIPPED(domain)"
    SKIPPED_POLE = "SKIPPED(pole)"


FUNCTION_PARAMETERS: dict[FunctionId, tuple[str, ...]] = {
    FunctionId.PHI2: ("a", "b", "c"),
    FunctionId.PHI3: ("b", "c"),
    FunctionId.PSI2: ("a", "b", "c"),
}

METHODS: dict[FunctionId, tuple[str, ...]] = {
    FunctionId.PHI2: ("direct", "series2f1"),
    FunctionId.PHI3: ("direct", "series2f1", "diag2f2", "gaussterms"),
    FunctionId.PSI2: ("direct", "series2f1", "phi3shift", "equalargs3f3"),
}

ALL_METHODS = ("direct", "series2f1", "phi3shift", "diag2f2", "equalargs3f3", "gaussterms")

# Relative tolerance for "y lies on the locus y = x^2 (or y = x)".
LOCUS_TOL = 1e-12


# ─── Dispatch ────────────────────────────────────────────────────────────────


def locus_y(method: str, x: Scalar) -> Scalar | None:
    """The y a one-variable method implies, or None for two-variable methods."""
    if method in ("diag2f2", "gaussterms"):
        return x * x
    if method == "equalargs3f3":
        return x
    return None


def _require_locus(method: str, x: Scalar, y: Scalar) -> None:
    target = locus_y(method, x)
    if target is not None and abs(y - target) > LOCUS_TOL * max(1.0, abs(target)):
        raise DomainError(f"method {method} needs y = {target}, got y = {y}")


def evaluate(
    function_id: FunctionId | str,
    method: str,
    params: Mapping[str, Scalar],
    x: Scalar,
    y: Scalar,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> EvalOutcome:
    """Evaluate ``function_id`` at (x, y) by the named method.

    Raises:
        ConfigError: unknown method/function or missing parameter.
        DomainError: point outside the method's domain.
        InvalidParameter / NotConverged: from the evaluator.
    """
    try:
        if not isinstance(function_id, FunctionId):
            function_id = FunctionId(str(function_id).upper())
    except ValueError as e:
        raise ConfigError(f"unknown function {function_id!r}") from e
    if method not in METHODS[function_id]:
        raise ConfigError(
            f"method {method!r} does not apply to {function_id.value}; "
            f"choose from {', '.join(METHODS[function_id])}"
        )
    missing = [name for name in FUNCTION_PARAMETERS[function_id] if name not in params]
    if missing:
        raise ConfigError(f"{function_id.value} needs parameter(s) {', '.join(missing)}")

    x, y = complex(x), complex(y)
    _require_locus(method, x, y)

    if function_id is FunctionId.PHI3:
        p = Phi3Params(b=params["b"], c=params["c"])
        if method == "direct":
            return phi3_direct(p, x, y, ctrl)
        if method == "series2f1":
            return phi3_via_2f1_series(p, x, y, ctrl)
        if method == "diag2f2":
            return phi3_diagonal_2f2(p, x, ctrl)
        return phi3_gauss_terms(p, x, ctrl)

    if function_id is FunctionId.PSI2:
        p = Psi2Params(a=params["a"], b=params["b"], c=params["c"])
        if method == "direct":
            return psi2_direct(p, x, y, ctrl)
        if method == "series2f1":
            return psi2_via_2f1_series(p, x, y, ctrl)
        if method == "phi3shift":
            if p.a != p.b:
                raise DomainError(f"phi3shift applies only on the slice a = b, got a = {p.a}, b = {p.b}")
            return psi2_via_phi3(p, x, y, ctrl)
        return psi2_equal_args_3f3(p.a, p.b, p.c, x, ctrl)

    p = Phi2Params(a=params["a"], b=params["b"], c=params["c"])
    if method == "direct":
        return phi2_direct(p, x, y, ctrl)
    return phi2_via_2f1_series(p, x, y, ctrl)


# ─── Grid Specs and Records ─────────────────────────────────────────────────


@dataclass(frozen=True)
class GridSpec:
    function_id: FunctionId
    representation_ids: tuple[str, ...]
    parameter_values: Mapping[str, tuple[Scalar, ...]]
    points: tuple[tuple[Scalar, Scalar], ...]
    ctrl: SeriesControl = DEFAULT_CONTROL
    workers: int = 1

    def validate(self) -> None:
        """Raise ConfigError unless every list is non-empty and applicable."""
        if not self.representation_ids:
            raise ConfigError("grid spec lists no representations")
        for method in self.representation_ids:
            if method not in METHODS[self.function_id]:
                raise ConfigError(f"representation {method!r} does not apply to {self.function_id.value}")
        if len(set(self.representation_ids)) != len(self.representation_ids):
            raise ConfigError("grid spec lists a representation twice")
        for name in FUNCTION_PARAMETERS[self.function_id]:
            if not self.parameter_values.get(name):
                raise ConfigError(f"grid spec gives no values for parameter {name!r}")
        if not self.points:
            raise ConfigError("grid spec has an empty points list")


@dataclass(frozen=True)
class VerificationRecord:
    function_id: FunctionId
    params: Mapping[str, Scalar]
    x: Scalar
    y: Scalar
    outcomes: Mapping[str, EvalOutcome]
    pairwise_rel_err: Mapping[str, float]
    status: Status
    note: str = ""

    @property
    def max_rel_err(self) -> float:
        return max(self.pairwise_rel_err.values(), default=0.0)


def rel_err(u: Scalar, v: Scalar) -> float:
    """Symmetric relative difference |u - v| / max(|u|, |v|, 1e-300)."""
    return abs(u - v) / max(abs(u), abs(v), TINY)


def pair_key(first: str, second: str) -> str:
    return f"{first}:{second}"


def _evaluate_point(
    spec: GridSpec, gate: float, params: dict[str, Scalar], x: Scalar, y: Scalar
) -> VerificationRecord:
    outcomes: dict[str, EvalOutcome] = {}
    notes = []
    skips = []
    skip_status = None

    for method in spec.representation_ids:
        try:
            outcomes[method] = evaluate(spec.function_id, method, params, x, y, spec.ctrl)
        except DomainError as e:
            skips.append(f"{method}: {e}")
            skip_status = skip_status or Status.SKIPPED_DOMAIN
        except InvalidParameter as e:
            skips.append(f"{method}: {e}")
            skip_status = skip_status or Status.SKIPPED_POLE
        except NotConverged as e:
            notes.append(f"{method}: {e}")
            if e.outcome is not None:
                outcomes[method] = e.outcome

    pairwise = {}
    converged = [m for m in spec.representation_ids if m in outcomes and outcomes[m].converged]
    for first, second in itertools.combinations(converged, 2):
        pairwise[pair_key(first, second)] = rel_err(outcomes[first].value, outcomes[second].value)

    # A method that does not apply at the point skips the record; pairs among
    # the methods that did converge are still reported.
    if skip_status is not None:
        return VerificationRecord(
            spec.function_id, params, x, y, outcomes, pairwise, skip_status, "; ".join(skips + notes)
        )

    failed = bool(notes) or any(err > gate for err in pairwise.values())
    status = Status.FAIL if failed else Status.PASS
    if status is Status.FAIL:
        logger.debug(f"FAIL at params={params} x={x} y={y}: {pairwise} {notes}")
    return VerificationRecord(
        spec.function_id, params, x, y, outcomes, pairwise, status, "; ".join(notes)
    )


def run_grid(spec: GridSpec, gate: float) -> list[VerificationRecord]:
    """Evaluate every (parameters x point) combination of the spec.

    Records come back in lexicographic order over the input lists
    (parameters in a, b, c order, then points), whatever the worker count.
    """
    spec.validate()
    if not (isinstance(gate, (int, float)) and gate > 0):
        raise ConfigError(f"gate must be a positive number, got {gate!r}")

    names = FUNCTION_PARAMETERS[spec.function_id]
    jobs = [
        (dict(zip(names, combo)), x, y)
        for combo in itertools.product(*(spec.parameter_values[name] for name in names))
        for x, y in spec.points
    ]
    logger.info(f"Verifying {spec.function_id.value} by {', '.join(spec.representation_ids)} "
                f"at {len(jobs)} grid points...")

    with create_executor(spec.workers) as executor:
        records = list(executor.map(lambda job: _evaluate_point(spec, gate, *job), jobs))
    return records


def summarize(records: Sequence[VerificationRecord]) -> dict:
    """Counts per status plus the worst pairwise error over PASS and FAIL records."""
    passed = sum(1 for r in records if r.status is Status.PASS)
    failed = sum(1 for r in records if r.status is Status.FAIL)
    compared = [r for r in records if r.status in (Status.PASS, Status.FAIL)]

    worst = max(compared, key=lambda r: r.max_rel_err, default=None)
    argmax = None
    if worst is not None and worst.pairwise_rel_err:
        argmax = {
            "params": {name: _scalar_dict(v) for name, v in worst.params.items()},
            "x": _scalar_dict(worst.x),
            "y": _scalar_dict(worst.y),
        }
    return {
        "total": len(records),
        "pass": passed,
        "fail": failed,
        "skipped": len(records) - passed - failed,
        "max_rel_err": worst.max_rel_err if worst is not None else 0.0,
        "argmax_point": argmax,
    }


# ─── Spec Files ──────────────────────────────────────────────────────────────


def parse_scalar(value) -> Scalar:
    """Accept 1.5, [re, im], {"re": .., "im": ..} or a string like "1+2j"."""
    try:
        if isinstance(value, bool):
            raise TypeError("booleans are not numbers")
        if isinstance(value, (int, float)):
            return complex(value)
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, dict):
            return complex(float(value["re"]), float(value.get("im", 0.0)))
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot read {value!r} as a number: {e}") from e
    raise ConfigError(f"cannot read {value!r} as a number")


def grid_spec_from_dict(data: dict) -> tuple[GridSpec, float]:
    """Build a GridSpec and its gate from the decoded spec-file JSON."""
    if not isinstance(data, dict):
        raise ConfigError("spec file must contain a JSON object")
    try:
        function_id = FunctionId(str(data["function"]).upper())
    except KeyError as e:
        raise ConfigError("spec file has no 'function' field") from e
    except ValueError as e:
        raise ConfigError(f"unknown function {data['function']!r}") from e

    representations = data.get("representations") or []
    if not isinstance(representations, list):
        raise ConfigError("'representations' must be a list")

    raw_params = data.get("params") or {}
    if not isinstance(raw_params, dict):
        raise ConfigError("'params' must map parameter names to lists of values")
    params = {}
    for name, values in raw_params.items():
        if not isinstance(values, list):
            values = [values]
        params[name] = tuple(parse_scalar(v) for v in values)

    points = []
    for point in data.get("points") or []:
        if not isinstance(point, list) or len(point) != 2:
            raise ConfigError(f"each point must be [x, y], got {point!r}")
        points.append((parse_scalar(point[0]), parse_scalar(point[1])))

    ctrl_data = data.get("ctrl") or {}
    try:
        ctrl = SeriesControl(**{**DEFAULT_CONTROL.as_dict(), **ctrl_data})
    except TypeError as e:
        raise ConfigError(f"unknown field in 'ctrl': {e}") from e

    gate = data.get("gate", 1e-8)
    if isinstance(gate, bool) or not isinstance(gate, (int, float)) or gate <= 0:
        raise ConfigError(f"gate must be a positive number, got {gate!r}")

    workers = data.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"workers must be an integer >= 1, got {workers!r}")

    spec = GridSpec(
        function_id=function_id,
        representation_ids=tuple(str(r).lower() for r in representations),
        parameter_values=params,
        points=tuple(points),
        ctrl=ctrl,
        workers=workers,
    )
    spec.validate()
    return spec, float(gate)


def load_grid_spec(path: str) -> tuple[GridSpec, float]:
    """Read a verify spec file (JSON)."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read spec file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in spec file {path}: {e}") from e
    return grid_spec_from_dict(data)


# ─── Reports ─────────────────────────────────────────────────────────────────


def _scalar_dict(value: Scalar) -> dict:
    return {"re": value.real, "im": value.imag}


def record_to_dict(record: VerificationRecord) -> dict:
    return {
        "function": record.function_id.value,
        "params": {name: _scalar_dict(v) for name, v in record.params.items()},
        "x": _scalar_dict(record.x),
        "y": _scalar_dict(record.y),
        "outcomes": {method: o.as_dict() for method, o in record.outcomes.items()},
        "pairwise_rel_err": dict(record.pairwise_rel_err),
        "status": record.status.value,
        "note": record.note,
    }


def json_report(records: Sequence[VerificationRecord]) -> str:
    report = {"summary": summarize(records), "records": [record_to_dict(r) for r in records]}
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


CSV_COLUMNS = ["function", "method_pair", "a", "b", "c",
               "x_re", "x_im", "y_re", "y_im", "rel_err", "status"]


def _csv_param(value: Scalar | None) -> str:
    if value is None:
        return ""
    if value.imag == 0:
        return repr(value.real)
    return repr(value)


def csv_report(records: Sequence[VerificationRecord]) -> str:
    """One row per compared pair; records without pairs get a single row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        base = [_csv_param(record.params.get(name)) for name in ("a", "b", "c")]
        coords = [repr(record.x.real), repr(record.x.imag), repr(record.y.real), repr(record.y.imag)]
        pairs = sorted(record.pairwise_rel_err.items()) or [("", None)]
        for pair, err in pairs:
            writer.writerow([record.function_id.value, pair, *base, *coords,
                             "" if err is None else repr(err), record.status.value])
    return buffer.getvalue()
