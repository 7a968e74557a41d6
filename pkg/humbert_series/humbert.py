"""
Humbert's confluent double series Phi2, Phi3 and Psi2 by direct summation.

Each summand factors as row(n) * col(k) * diag(n+k), so the double series is
summed one anti-diagonal N = n+k at a time. These evaluators are the
reference values every alternative representation is checked against.
"""

import logging
import math
from dataclasses import dataclass
from math import factorial

from humbert_series.errors import InvalidParameter, NotConverged
from humbert_series.kernels import (
    DEFAULT_CONTROL,
    TINY,
    CompensatedSum,
    EvalOutcome,
    Scalar,
    SeriesControl,
    is_finite,
    is_nonpositive_integer,
    pochhammer,
)

logger = logging.getLogger(__name__)


# ─── Parameter Sets ──────────────────────────────────────────────────────────


def _require_regular(name: str, value: Scalar) -> None:
    if is_nonpositive_integer(value):
        raise InvalidParameter(f"{name} = {value} is a nonpositive integer (pole)")


@dataclass(frozen=True)
class Phi3Params:
    """Parameters of Phi3(b; c; x, y)."""

    b: Scalar
    c: Scalar

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.c))
        _require_regular("c", self.c)


@dataclass(frozen=True)
class Psi2Params:
    """Parameters of Psi2(a; b, c; x, y)."""

    a: Scalar
    b: Scalar
    c: Scalar

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _require_regular("b", self.b)
        _require_regular("c", self.c)


@dataclass(frozen=True)
class Phi2Params:
    """Parameters of Phi2(a, b; c; x, y)."""

    a: Scalar
    b: Scalar
    c: Scalar

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _require_regular("c", self.c)


# ─── Coefficients ────────────────────────────────────────────────────────────
# Generic over int, Fraction and complex: the formal oracle reuses them.


def _checked_ratio(numerator, denominator):
    try:
        return numerator / denominator
    except ZeroDivisionError as e:
        raise InvalidParameter("coefficient denominator vanishes (parameter pole)") from e


def phi3_coefficient(b, c, n: int, k: int):
    """Coefficient of x^n y^k in Phi3(b; c; x, y)."""
    return _checked_ratio(pochhammer(b, n), pochhammer(c, n + k) * factorial(n) * factorial(k))


def psi2_coefficient(a, b, c, n: int, k: int):
    """Coefficient of x^n y^k in Psi2(a; b, c; x, y)."""
    return _checked_ratio(
        pochhammer(a, n + k),
        pochhammer(b, n) * pochhammer(c, k) * factorial(n) * factorial(k),
    )


def phi2_coefficient(a, b, c, m: int, n: int):
    """Coefficient of x^m y^n in Phi2(a, b; c; x, y)."""
    return _checked_ratio(
        pochhammer(a, m) * pochhammer(b, n),
        pochhammer(c, m + n) * factorial(m) * factorial(n),
    )


# ─── Anti-diagonal Summation ────────────────────────────────────────────────


@dataclass(frozen=True)
class _Factor:
    """One factor f_n = (upper)_n / (lower)_n * argument^n / n! of a summand.

    Missing pieces are omitted; with no argument there is no power or factorial.
    """

    upper: Scalar | None = None
    lower: Scalar | None = None
    argument: Scalar | None = None

    def advance(self, value: Scalar, n: int) -> Scalar:
        if self.upper is not None:
            value *= self.upper + n
        if self.lower is not None:
            value /= self.lower + n
        if self.argument is not None:
            value *= self.argument / (n + 1)
        return value


def _fsum_complex(values: list[Scalar]) -> Scalar:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _sum_antidiagonals(
    row: _Factor, col: _Factor, diag: _Factor, ctrl: SeriesControl, label: str
) -> EvalOutcome:
    rows = [1 + 0j]
    cols = [1 + 0j]
    diag_value = 1 + 0j
    acc = CompensatedSum()
    run = 0
    largest = 0.0

    for order in range(ctrl.max_terms):
        if order > 0:
            rows.append(row.advance(rows[-1], order - 1))
            cols.append(col.advance(cols[-1], order - 1))
            diag_value = diag.advance(diag_value, order - 1)

        products = [rows[n] * cols[order - n] for n in range(order + 1)]
        diagonal = _fsum_complex(products) * diag_value
        magnitude = math.fsum(abs(p) for p in products) * abs(diag_value)
        largest = max(largest, magnitude)

        acc.add(diagonal)
        partial = acc.value
        if not is_finite(partial):
            raise NotConverged(f"{label}: partial sum is not finite at total degree {order}")

        if magnitude <= ctrl.rel_tol * abs(partial):
            run += 1
            if run >= ctrl.small_run:
                logger.debug(f"{label}: converged after {order + 1} anti-diagonals")
                return EvalOutcome(
                    value=partial,
                    terms=order + 1,
                    est_error=magnitude * ctrl.small_run,
                    converged=True,
                    condition=largest / max(abs(partial), TINY),
                )
        else:
            run = 0

    partial = acc.value
    outcome = EvalOutcome(
        value=partial,
        terms=ctrl.max_terms,
        est_error=magnitude * ctrl.small_run,
        converged=False,
        condition=largest / max(abs(partial), TINY),
    )
    raise NotConverged(f"{label} did not converge within {ctrl.max_terms} anti-diagonals", outcome)


# ─── Direct Evaluators ───────────────────────────────────────────────────────


def phi3_direct(
    p: Phi3Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi3(b; c; x, y) = sum (b)_n / (c)_{n+k} x^n y^k / (n! k!)."""
    return _sum_antidiagonals(
        row=_Factor(upper=p.b, argument=complex(x)),
        col=_Factor(argument=complex(y)),
        diag=_Factor(lower=p.c),
        ctrl=ctrl,
        label="Phi3",
    )


def psi2_direct(
    p: Psi2Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Psi2(a; b, c; x, y) = sum (a)_{n+k} / ((b)_n (c)_k) x^n y^k / (n! k!)."""
    return _sum_antidiagonals(
        row=_Factor(lower=p.b, argument=complex(x)),
        col=_Factor(lower=p.c, argument=complex(y)),
        diag=_Factor(upper=p.a),
        ctrl=ctrl,
        label="Psi2",
    )


def phi2_direct(
    p: Phi2Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi2(a, b; c; x, y) = sum (a)_m (b)_n / (c)_{m+n} x^m y^n / (m! n!)."""
    return _sum_antidiagonals(
        row=_Factor(upper=p.a, argument=complex(x)),
        col=_Factor(upper=p.b, argument=complex(y)),
        diag=_Factor(lower=p.c),
        ctrl=ctrl,
        label="Phi2",
    )
