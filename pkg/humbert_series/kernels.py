"""
One-variable building blocks shared by every higher module:
Pochhammer symbols, compensated accumulation, the generalized
hypergeometric series pFq, terminating 2F1 sums and Gauss's unit-argument sum.
"""

import cmath
import logging
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from scipy.special import loggamma

from humbert_series.errors import ConfigError, InvalidParameter, NotConverged

logger = logging.getLogger(__name__)

Scalar = complex

EPSILON = sys.float_info.epsilon
TINY = 1e-300


# ─── Truncation Policy and Results ──────────────────────────────────────────


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for every infinite series in the package.

    A series stops once ``small_run`` consecutive terms satisfy
    |term| <= rel_tol * |partial sum|, or fails after ``max_terms`` terms.
    """

    rel_tol: float = 1e-14
    max_terms: int = 5000
    small_run: int = 3

    def __post_init__(self):
        if not (isinstance(self.rel_tol, (int, float)) and math.isfinite(self.rel_tol)
                and self.rel_tol > 0):
            raise ConfigError(f"rel_tol must be a positive finite number, got {self.rel_tol!r}")
        if not isinstance(self.max_terms, int) or self.max_terms < 1:
            raise ConfigError(f"max_terms must be an integer >= 1, got {self.max_terms!r}")
        if not isinstance(self.small_run, int) or self.small_run < 1:
            raise ConfigError(f"small_run must be an integer >= 1, got {self.small_run!r}")

    def as_dict(self) -> dict:
        return {"rel_tol": self.rel_tol, "max_terms": self.max_terms, "small_run": self.small_run}


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class EvalOutcome:
    """Result of a series evaluation.

    ``condition`` is the largest intermediate magnitude divided by |value|;
    values far above 1 mean the sum cancelled heavily.
    """

    value: Scalar
    terms: int
    est_error: float
    converged: bool
    condition: float = 1.0

    def scaled(self, factor: Scalar) -> "EvalOutcome":
        """Multiply the value (and its error bound) by a prefactor."""
        return replace(
            self,
            value=self.value * factor,
            est_error=self.est_error * abs(factor),
        )

    def as_dict(self) -> dict:
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "terms": self.terms,
            "est_error": self.est_error,
            "converged": self.converged,
            "condition": self.condition,
        }


# ─── Compensated Accumulation ───────────────────────────────────────────────


def _neumaier(total: float, carry: float, value: float) -> tuple[float, float]:
    t = total + value
    if abs(total) >= abs(value):
        carry += (total - t) + value
    else:
        carry += (value - t) + total
    return t, carry


class CompensatedSum:
    """Running complex sum with Neumaier compensation on each component."""

    def __init__(self):
        self._re = 0.0
        self._re_carry = 0.0
        self._im = 0.0
        self._im_carry = 0.0

    def add(self, value: Scalar) -> None:
        self._re, self._re_carry = _neumaier(self._re, self._re_carry, value.real)
        self._im, self._im_carry = _neumaier(self._im, self._im_carry, value.imag)

    @property
    def value(self) -> Scalar:
        return complex(self._re + self._re_carry, self._im + self._im_carry)


def is_finite(value: Scalar) -> bool:
    return cmath.isfinite(value)


def exp_checked(z: Scalar) -> Scalar:
    """exp(z), raising InvalidParameter instead of overflowing."""
    try:
        value = cmath.exp(z)
    except OverflowError as e:
        raise InvalidParameter(f"exp({z}) overflows double precision") from e
    if not is_finite(value):
        raise InvalidParameter(f"exp({z}) overflows double precision")
    return value


def sum_terms(
    terms: Iterable[Scalar],
    ctrl: SeriesControl = DEFAULT_CONTROL,
    *,
    terminating: bool = False,
    label: str = "series",
) -> EvalOutcome:
    """Sum a stream of series terms under the run-of-small-terms stopping rule.

    A terminating stream is summed to exhaustion and reported exact;
    otherwise the stream is cut after ``ctrl.small_run`` consecutive small
    terms, and est_error is |last term| * small_run.
    """
    acc = CompensatedSum()
    count = 0
    run = 0
    largest = 0.0
    magnitude = 0.0

    for term in terms:
        acc.add(term)
        count += 1
        magnitude = abs(term)
        largest = max(largest, magnitude)
        partial = acc.value
        if not is_finite(partial):
            raise NotConverged(f"{label}: partial sum is not finite after {count} terms")
        if terminating:
            continue

        if magnitude <= ctrl.rel_tol * abs(partial):
            run += 1
            if run >= ctrl.small_run:
                logger.debug(f"{label}: stopped after {count} terms")
                return _outcome(partial, count, magnitude * ctrl.small_run, True, largest)
        else:
            run = 0

        if count >= ctrl.max_terms:
            outcome = _outcome(partial, count, magnitude * ctrl.small_run, False, largest)
            raise NotConverged(
                f"{label} did not converge within {ctrl.max_terms} terms "
                f"(last |term| = {magnitude:.3e})",
                outcome,
            )

    return _outcome(acc.value, count, 0.0, True, largest)


def _outcome(value: Scalar, count: int, tail: float, converged: bool, largest: float) -> EvalOutcome:
    condition = largest / max(abs(value), TINY)
    return EvalOutcome(value=value, terms=count, est_error=tail, converged=converged,
                       condition=condition)


# ─── Pochhammer Symbols ─────────────────────────────────────────────────────


def is_nonpositive_integer(value) -> bool:
    """True for 0, -1, -2, ... given as int, float, Fraction or complex."""
    if isinstance(value, Fraction):
        return value.denominator == 1 and value <= 0
    value = complex(value)
    return value.imag == 0 and value.real <= 0 and value.real == math.floor(value.real)


def pochhammer(a, n: int):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1.

    Generic over int, Fraction, float and complex; the result has the type of ``a``.
    Exactly zero when a is a nonpositive integer with -a < n.
    """
    if n < 0:
        raise InvalidParameter(f"pochhammer index must be nonnegative, got {n}")
    result = type(a)(1)
    for j in range(n):
        result *= a + j
    return result


# ─── Generalized Hypergeometric Series ──────────────────────────────────────


def _first_vanishing_index(params: Sequence[Scalar]) -> int | None:
    """Smallest k such that some (p)_{k+1} = 0, i.e. p = -k."""
    indices = [int(-p.real) for p in params if is_nonpositive_integer(p)]
    return min(indices) if indices else None


def _pfq_terms(upper: list[Scalar], lower: list[Scalar], z: Scalar, stop: int | None):
    term = 1 + 0j
    n = 0
    while True:
        yield term
        if stop is not None and n >= stop:
            return
        for u in upper:
            term *= u + n
        for l in lower:
            term /= l + n
        term *= z / (n + 1)
        n += 1


def pfq(
    upper: Sequence[Scalar],
    lower: Sequence[Scalar],
    z: Scalar,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> EvalOutcome:
    """Generalized hypergeometric series pFq(upper; lower; z).

    A nonpositive-integer upper parameter -k makes the series a polynomial
    of degree k, summed exactly. A nonpositive-integer lower parameter -m is
    only admissible when such a k exists with k <= m.

    Raises:
        InvalidParameter: lower Pochhammer vanishes before termination.
        NotConverged: ctrl.max_terms reached.
    """
    upper = [complex(u) for u in upper]
    lower = [complex(l) for l in lower]
    z = complex(z)

    stop = _first_vanishing_index(upper)
    pole = _first_vanishing_index(lower)
    if pole is not None and (stop is None or stop > pole):
        raise InvalidParameter(
            f"lower parameter {-pole} makes the {len(upper)}F{len(lower)} series singular"
        )

    label = f"{len(upper)}F{len(lower)}"
    return sum_terms(_pfq_terms(upper, lower, z, stop), ctrl,
                     terminating=stop is not None, label=label)


def kummer_1f1(b: Scalar, c: Scalar, x: Scalar, ctrl: SeriesControl = DEFAULT_CONTROL) -> EvalOutcome:
    """exp(x) * 1F1(c-b; c; -x), the Kummer-transformed form of 1F1(b; c; x)."""
    b, c, x = complex(b), complex(c), complex(x)
    return pfq([c - b], [c], -x, ctrl).scaled(exp_checked(x))


# ─── Terminating 2F1 and Gauss's Sum ────────────────────────────────────────


def _exact_terminating_sum(k: int, beta: Fraction, gamma: Fraction, z: Fraction) -> Fraction:
    term = Fraction(1)
    total = Fraction(1)
    for j in range(k):
        term = term * (j - k) * (beta + j) * z / ((gamma + j) * (j + 1))
        total += term
    return total


def _float_terminating_sum(k: int, beta: Scalar, gamma: Scalar, z: Scalar) -> Scalar:
    acc = CompensatedSum()
    term = 1 + 0j
    acc.add(term)
    for j in range(k):
        term = term * (j - k) * (beta + j) * z / ((gamma + j) * (j + 1))
        acc.add(term)
    return acc.value


def hyp2f1_terminating(k: int, beta: Scalar, gamma: Scalar, z: Scalar) -> Scalar:
    """2F1(-k, beta; gamma; z) as the finite (k+1)-term polynomial sum.

    Real inputs are summed exactly in rational arithmetic (every double is a
    dyadic rational) and rounded once; complex inputs use compensated floats.

    Raises:
        InvalidParameter: (gamma)_j = 0 for some j <= k.
    """
    if k < 0:
        raise InvalidParameter(f"terminating degree must be nonnegative, got {k}")
    beta, gamma, z = complex(beta), complex(gamma), complex(z)
    if is_nonpositive_integer(gamma) and -gamma.real < k:
        raise InvalidParameter(f"lower parameter {gamma.real:g} vanishes within degree {k}")

    if beta.imag == 0 and gamma.imag == 0 and z.imag == 0:
        exact = _exact_terminating_sum(
            k, Fraction(beta.real), Fraction(gamma.real), Fraction(z.real)
        )
        return complex(float(exact))
    return _float_terminating_sum(k, beta, gamma, z)


def gauss_2f1_unit(a: Scalar, b: Scalar, c: Scalar) -> Scalar:
    """2F1(a, b; c; 1) by Gauss's summation theorem.

    Terminating case (a or b a nonpositive integer -k): (c-b)_k / (c)_k.
    Otherwise requires Re(c-a-b) > 0 and uses log-Gamma differences.
    A Gamma pole in the denominator makes the sum exactly zero.
    """
    a, b, c = complex(a), complex(b), complex(c)

    candidates = [(int(-p.real), q) for p, q in ((a, b), (b, a)) if is_nonpositive_integer(p)]
    if candidates:
        k, other = min(candidates, key=lambda pair: pair[0])
        denominator = pochhammer(c, k)
        if denominator == 0:
            raise InvalidParameter(f"(c)_{k} vanishes for c = {c}")
        return pochhammer(c - other, k) / denominator

    if (c - a - b).real <= 0:
        raise InvalidParameter(f"Gauss's sum requires Re(c-a-b) > 0, got {(c - a - b).real:g}")
    if is_nonpositive_integer(c):
        raise InvalidParameter(f"Gamma(c) has a pole at c = {c.real:g}")
    if is_nonpositive_integer(c - a) or is_nonpositive_integer(c - b):
        return 0j

    log_ratio = complex(loggamma(c) + loggamma(c - a - b) - loggamma(c - a) - loggamma(c - b))
    return exp_checked(log_ratio)
