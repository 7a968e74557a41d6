"""
Alternative representations of Phi2, Phi3 and Psi2: outer series of
terminating 2F1 polynomials, the exponential shift between Psi2 and Phi3,
and the one-variable reductions on the loci y = x^2 and y = x.

Every evaluator here must agree with the direct double series in
humbert.py wherever both are defined.
"""

import itertools
import logging
from dataclasses import replace
from typing import Iterator

from humbert_series.errors import DomainError, InvalidParameter
from humbert_series.humbert import Phi2Params, Phi3Params, Psi2Params, phi3_direct
from humbert_series.kernels import (
    DEFAULT_CONTROL,
    EPSILON,
    EvalOutcome,
    Scalar,
    SeriesControl,
    exp_checked,
    gauss_2f1_unit,
    hyp2f1_terminating,
    is_nonpositive_integer,
    pfq,
    sum_terms,
)

logger = logging.getLogger(__name__)

# Below this magnitude a divisor x (or y) is treated as zero.
SMALL_ARGUMENT = 1e-8


def _require_nonzero(name: str, value: Scalar) -> None:
    if abs(value) < SMALL_ARGUMENT:
        raise DomainError(f"{name} = {value} is below {SMALL_ARGUMENT:g}; representation divides by {name}")


def _require_regular(name: str, value: Scalar) -> None:
    if is_nonpositive_integer(value):
        raise InvalidParameter(f"{name} = {value} is a nonpositive integer (pole)")


def _with_cancellation(outcome: EvalOutcome) -> EvalOutcome:
    """Fold the cancellation indicator into the error estimate."""
    return replace(
        outcome,
        est_error=outcome.est_error + outcome.condition * EPSILON * abs(outcome.value),
    )


def _outer_sum(
    terms: Iterator[Scalar], ctrl: SeriesControl, label: str, prefactor: Scalar = 1
) -> EvalOutcome:
    outcome = sum_terms(terms, ctrl, label=label)
    logger.debug(f"{label}: outer series used {outcome.terms} terms, "
                 f"condition {outcome.condition:.2e}")
    return _with_cancellation(outcome.scaled(prefactor))


# ─── Outer Series of Terminating 2F1 ────────────────────────────────────────


def _phi3_outer_terms(b: Scalar, c: Scalar, ratio: Scalar, z: Scalar) -> Iterator[Scalar]:
    weight = 1 + 0j
    for k in itertools.count():
        yield weight * hyp2f1_terminating(k, -k - c + b + 1, c, z)
        weight *= -ratio / (k + 1)


def phi3_via_2f1_series(
    p: Phi3Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi3(b; c; x, y) = exp(x + y/x) sum_k (-y/x)^k / k! 2F1(-k, -k-c+b+1; c; x^2/y).

    Requires |x|, |y| >= SMALL_ARGUMENT.
    """
    x, y = complex(x), complex(y)
    _require_nonzero("x", x)
    _require_nonzero("y", y)
    ratio = y / x
    terms = _phi3_outer_terms(p.b, p.c, ratio, x * x / y)
    return _outer_sum(terms, ctrl, "Phi3 2F1-series", exp_checked(x + ratio))


def _psi2_outer_terms(a: Scalar, b: Scalar, c: Scalar, x: Scalar, ratio: Scalar) -> Iterator[Scalar]:
    weight = 1 + 0j
    for k in itertools.count():
        yield weight * hyp2f1_terminating(k, -k - b + 1, c, ratio)
        weight *= (a + k) / (b + k) * x / (k + 1)


def psi2_via_2f1_series(
    p: Psi2Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Psi2(a; b, c; x, y) = sum_k (a)_k / (b)_k 2F1(-k, -k-b+1; c; y/x) x^k / k!."""
    x, y = complex(x), complex(y)
    _require_nonzero("x", x)
    terms = _psi2_outer_terms(p.a, p.b, p.c, x, y / x)
    return _outer_sum(terms, ctrl, "Psi2 2F1-series")


def _phi2_outer_terms(a: Scalar, b: Scalar, c: Scalar, x: Scalar, ratio: Scalar) -> Iterator[Scalar]:
    weight = 1 + 0j
    for m in itertools.count():
        yield weight * hyp2f1_terminating(m, b, 1 - a - m, ratio)
        weight *= (a + m) / (c + m) * x / (m + 1)


def phi2_via_2f1_series(
    p: Phi2Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi2(a, b; c; x, y) = sum_m (a)_m / (c)_m 2F1(-m, b; 1-a-m; y/x) x^m / m!.

    ``a`` must not be a nonpositive integer: the terminating polynomial's
    lower parameter 1-a-m would vanish inside its range.
    """
    x, y = complex(x), complex(y)
    _require_nonzero("x", x)
    _require_regular("a", p.a)
    terms = _phi2_outer_terms(p.a, p.b, p.c, x, y / x)
    return _outer_sum(terms, ctrl, "Phi2 2F1-series")


# ─── Exponential Shift ───────────────────────────────────────────────────────


def psi2_via_phi3(
    p: Psi2Params, x: Scalar, y: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Psi2(b; b, c; x, y) = exp(x + y) Phi3(c-b; c; -y, x y).

    Only defined on the slice a = b.
    """
    if p.a != p.b:
        raise InvalidParameter(f"exponential shift needs a = b, got a = {p.a}, b = {p.b}")
    x, y = complex(x), complex(y)
    inner = phi3_direct(Phi3Params(b=p.c - p.b, c=p.c), -y, x * y, ctrl)
    return _with_cancellation(inner.scaled(exp_checked(x + y)))


# ─── Reductions on y = x^2 and y = x ────────────────────────────────────────


def _require_diagonal_regular(p: Phi3Params) -> None:
    _require_regular("c", p.c)
    _require_regular("2c-b-1", 2 * p.c - p.b - 1)


def phi3_diagonal_2f2(
    p: Phi3Params, x: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi3(b; c; x, x^2) = exp(2x) 2F2(c-b/2, c-b/2-1/2; c, 2c-b-1; -4x)."""
    _require_diagonal_regular(p)
    x = complex(x)
    b, c = p.b, p.c
    inner = pfq([c - b / 2, c - b / 2 - 0.5], [c, 2 * c - b - 1], -4 * x, ctrl)
    return _with_cancellation(inner.scaled(exp_checked(2 * x)))


def _gauss_terms(b: Scalar, c: Scalar, x: Scalar) -> Iterator[Scalar]:
    weight = 1 + 0j
    for k in itertools.count():
        yield weight * gauss_2f1_unit(-k, -k - c + b + 1, c)
        weight *= -x / (k + 1)


def phi3_gauss_terms(
    p: Phi3Params, x: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Phi3(b; c; x, x^2) = exp(2x) sum_k (-x)^k / k! 2F1(-k, -k-c+b+1; c; 1).

    Each unit-argument 2F1 is closed by Gauss's summation theorem.
    """
    _require_diagonal_regular(p)
    x = complex(x)
    return _outer_sum(_gauss_terms(p.b, p.c, x), ctrl, "Phi3 Gauss terms", exp_checked(2 * x))


def psi2_equal_args_3f3(
    a: Scalar, b: Scalar, c: Scalar, x: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL
) -> EvalOutcome:
    """Psi2(a; b, c; x, x) = 3F3(a, (c+b)/2, (c+b-1)/2; b, c, c+b-1; 4x).

    With a = b and c = 2b this collapses to
    Psi2(b; b, 2b; x, x) = 2F2(3b/2, (3b-1)/2; 2b, 3b-1; 4x).
    """
    a, b, c, x = complex(a), complex(b), complex(c), complex(x)
    _require_regular("b", b)
    _require_regular("c", c)
    _require_regular("c+b-1", c + b - 1)
    inner = pfq([a, (c + b) / 2, (c + b - 1) / 2], [b, c, c + b - 1], 4 * x, ctrl)
    return _with_cancellation(inner)
