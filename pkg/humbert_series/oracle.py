"""
Exact-rational truncated expansions of both sides of every identity.

Two-variable identities are expanded after substituting y = t*x, which turns
the y/x and x^2/y arguments of the terminating 2F1 factors into polynomials,
so each coefficient of x^i t^j is a finite exact sum. Identities living on a
one-dimensional locus (y = x^2, y = x, or a single variable) produce
univariate tables with keys (i, 0) only.

No floating-point arithmetic happens in this module.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from humbert_series.errors import CapExceeded, InvalidParameter
from humbert_series.humbert import phi2_coefficient, phi3_coefficient, psi2_coefficient
from humbert_series.kernels import pochhammer

logger = logging.getLogger(__name__)

MAX_DEGREE = 12


class Identity(str, Enum):
    EQ13 = "EQ13"
    EQ14 = "EQ14"
    EQ15 = "EQ15"
    EQ16 = "EQ16"
    EQ26 = "EQ26"
    EQ31 = "EQ31"
    EQ33 = "EQ33"
    EQ34 = "EQ34"
    BC3F3 = "BC3F3"


class Side(str, Enum):
    LHS = "LHS"
    RHS = "RHS"


VARIANTS = ("corrected", "printed")

IDENTITY_PARAMETERS: dict[Identity, tuple[str, ...]] = {
    Identity.EQ13: ("b", "c"),
    Identity.EQ14: ("a", "b", "c"),
    Identity.EQ15: ("b", "c"),
    Identity.EQ16: ("a", "b", "c"),
    Identity.EQ26: ("b", "c"),
    Identity.EQ31: ("b", "c"),
    Identity.EQ33: ("b", "c"),
    Identity.EQ34: ("b",),
    Identity.BC3F3: ("a", "b", "c"),
}

UNIVARIATE = frozenset(
    {Identity.EQ26, Identity.EQ31, Identity.EQ33, Identity.EQ34, Identity.BC3F3}
)


# ─── Coefficient Tables ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class RationalCoeffTable:
    """Exact coefficients of x^i t^j, i <= max_deg_x, j <= max_deg_t.

    Absent keys are zero.
    """

    max_deg_x: int
    max_deg_t: int
    coeff: Mapping[tuple[int, int], Fraction]

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.coeff.get(key, Fraction(0))

    def evaluate(self, x: Fraction, t: Fraction = Fraction(0)) -> Fraction:
        """Exact value of the truncated polynomial at (x, t)."""
        return sum((value * x**i * t**j for (i, j), value in self.coeff.items()), Fraction(0))

    def as_dict(self) -> dict:
        return {
            "max_deg_x": self.max_deg_x,
            "max_deg_t": self.max_deg_t,
            "coeff": {f"{i},{j}": str(v) for (i, j), v in sorted(self.coeff.items())},
        }


class _Truncated:
    """Mutable bivariate polynomial truncated to a degree box."""

    def __init__(self, max_x: int, max_t: int):
        self.max_x = max_x
        self.max_t = max_t
        self.coeff: dict[tuple[int, int], Fraction] = {}

    @classmethod
    def from_terms(cls, max_x: int, max_t: int, terms: Iterable[tuple[int, int, Fraction]]):
        series = cls(max_x, max_t)
        for i, j, value in terms:
            series.add(i, j, value)
        return series

    def add(self, i: int, j: int, value) -> None:
        if i > self.max_x or j > self.max_t or value == 0:
            return
        self.coeff[(i, j)] = self.coeff.get((i, j), Fraction(0)) + value

    def __mul__(self, other: "_Truncated") -> "_Truncated":
        result = _Truncated(self.max_x, self.max_t)
        for (i1, j1), v1 in self.coeff.items():
            for (i2, j2), v2 in other.coeff.items():
                result.add(i1 + i2, j1 + j2, v1 * v2)
        return result

    def table(self) -> RationalCoeffTable:
        nonzero = {key: Fraction(v) for key, v in self.coeff.items() if v != 0}
        return RationalCoeffTable(self.max_x, self.max_t, MappingProxyType(nonzero))


def _exp_series(argument: dict[tuple[int, int], Fraction], max_x: int, max_t: int) -> _Truncated:
    """exp of a polynomial with zero constant term, truncated to the box."""
    arg = _Truncated.from_terms(max_x, max_t, ((i, j, v) for (i, j), v in argument.items()))
    result = _Truncated.from_terms(max_x, max_t, [(0, 0, Fraction(1))])
    power = _Truncated.from_terms(max_x, max_t, [(0, 0, Fraction(1))])
    # every power raises the total degree by at least one
    for n in range(1, max_x + max_t + 1):
        power = power * arg
        if not power.coeff:
            break
        for (i, j), value in power.coeff.items():
            result.add(i, j, value / factorial(n))
    return result


def _pfq_coefficient(upper: list[Fraction], lower: list[Fraction], scale: Fraction, i: int) -> Fraction:
    numerator = Fraction(1)
    denominator = Fraction(factorial(i))
    for u in upper:
        numerator *= pochhammer(u, i)
    for l in lower:
        denominator *= pochhammer(l, i)
    return numerator * scale**i / denominator


def _univariate_pfq(upper, lower, scale: Fraction, max_x: int) -> _Truncated:
    return _Truncated.from_terms(
        max_x, 0, ((i, 0, _pfq_coefficient(upper, lower, scale, i)) for i in range(max_x + 1))
    )


# ─── Identity Sides ──────────────────────────────────────────────────────────
# Each side receives the parameter map, the variant and the degree box.


def _psi2_bivariate(a, b, c, max_x: int, max_t: int) -> _Truncated:
    # Psi2(a; b, c; x, t x): x^n (t x)^k -> (n + k, k)
    return _Truncated.from_terms(max_x, max_t, (
        (n + k, k, psi2_coefficient(a, b, c, n, k))
        for k in range(min(max_t, max_x) + 1)
        for n in range(max_x - k + 1)
    ))


def _phi3_bivariate(b, c, max_x: int, max_t: int) -> _Truncated:
    return _Truncated.from_terms(max_x, max_t, (
        (n + k, k, phi3_coefficient(b, c, n, k))
        for k in range(min(max_t, max_x) + 1)
        for n in range(max_x - k + 1)
    ))


def _phi3_on_parabola(b, c, max_x: int) -> _Truncated:
    # Phi3(b; c; x, x^2): x^n x^(2k)
    return _Truncated.from_terms(max_x, 0, (
        (n + 2 * k, 0, phi3_coefficient(b, c, n, k))
        for k in range(max_x // 2 + 1)
        for n in range(max_x - 2 * k + 1)
    ))


def _psi2_on_diagonal(a, b, c, max_x: int) -> _Truncated:
    return _Truncated.from_terms(max_x, 0, (
        (n + k, 0, psi2_coefficient(a, b, c, n, k))
        for k in range(max_x + 1)
        for n in range(max_x - k + 1)
    ))


def _terminating_2f1_coefficient(k: int, beta, gamma, j: int) -> Fraction:
    return pochhammer(Fraction(-k), j) * pochhammer(beta, j) / (pochhammer(gamma, j) * factorial(j))


def _eq13_lhs(p, variant, max_x, max_t):
    return _psi2_bivariate(p["b"], p["b"], p["c"], max_x, max_t)


def _eq13_rhs(p, variant, max_x, max_t):
    b, c = p["b"], p["c"]
    # Phi3(c-b; c; -t x, t x^2): (-t x)^n (t x^2)^k -> (n + 2k, n + k)
    phi3 = _Truncated.from_terms(max_x, max_t, (
        (n + 2 * k, n + k, (-1) ** n * phi3_coefficient(c - b, c, n, k))
        for k in range(max_t + 1)
        for n in range(max_t - k + 1)
        if n + 2 * k <= max_x
    ))
    shift = _exp_series({(1, 0): Fraction(1), (1, 1): Fraction(1)}, max_x, max_t)
    return shift * phi3


def _eq14_lhs(p, variant, max_x, max_t):
    return _psi2_bivariate(p["a"], p["b"], p["c"], max_x, max_t)


def _eq14_rhs(p, variant, max_x, max_t):
    a, b, c = p["a"], p["b"], p["c"]
    # x^k (y/x)^j = x^k t^j with j <= k
    return _Truncated.from_terms(max_x, max_t, (
        (k, j, pochhammer(a, k) / (pochhammer(b, k) * factorial(k))
         * _terminating_2f1_coefficient(k, -k - b + 1, c, j))
        for k in range(max_x + 1)
        for j in range(min(k, max_t) + 1)
    ))


def _eq15_lhs(p, variant, max_x, max_t):
    return _phi3_bivariate(p["b"], p["c"], max_x, max_t)


def _eq15_upper(k: int, b, c, variant: str):
    if variant == "printed":
        return -k - b + 1
    return -k - c + b + 1


def _eq15_rhs(p, variant, max_x, max_t):
    b, c = p["b"], p["c"]
    # (-y/x)^k (x^2/y)^j = (-1)^k x^j t^(k-j); a target (i, j') needs k <= i + j'
    outer = _Truncated.from_terms(max_x, max_t, (
        (j, k - j, Fraction((-1) ** k, factorial(k))
         * _terminating_2f1_coefficient(k, _eq15_upper(k, b, c, variant), c, j))
        for k in range(max_x + max_t + 1)
        for j in range(max(0, k - max_t), min(k, max_x) + 1)
    ))
    shift = _exp_series({(1, 0): Fraction(1), (0, 1): Fraction(1)}, max_x, max_t)
    return shift * outer


def _eq16_lhs(p, variant, max_x, max_t):
    a, b, c = p["a"], p["b"], p["c"]
    return _Truncated.from_terms(max_x, max_t, (
        (m + n, n, phi2_coefficient(a, b, c, m, n))
        for n in range(min(max_t, max_x) + 1)
        for m in range(max_x - n + 1)
    ))


def _eq16_rhs(p, variant, max_x, max_t):
    a, b, c = p["a"], p["b"], p["c"]
    return _Truncated.from_terms(max_x, max_t, (
        (m, j, pochhammer(a, m) / (pochhammer(c, m) * factorial(m))
         * _terminating_2f1_coefficient(m, b, 1 - a - m, j))
        for m in range(max_x + 1)
        for j in range(min(m, max_t) + 1)
    ))


def _eq26_lhs(p, variant, max_x, max_t):
    return _univariate_pfq([p["b"]], [p["c"]], Fraction(1), max_x)


def _eq26_rhs(p, variant, max_x, max_t):
    b, c = p["b"], p["c"]
    return _exp_series({(1, 0): Fraction(1)}, max_x, 0) * _univariate_pfq(
        [c - b], [c], Fraction(-1), max_x
    )


def _parabola_lhs(p, variant, max_x, max_t):
    return _phi3_on_parabola(p["b"], p["c"], max_x)


def _eq31_rhs(p, variant, max_x, max_t):
    b, c = p["b"], p["c"]
    # Gauss's sum closes 2F1(-k, -k-c+b+1; c; 1) to (2c+k-b-1)_k / (c)_k
    gauss_terms = _Truncated.from_terms(max_x, 0, (
        (k, 0, Fraction((-1) ** k, factorial(k)) * pochhammer(2 * c + k - b - 1, k) / pochhammer(c, k))
        for k in range(max_x + 1)
    ))
    return _exp_series({(1, 0): Fraction(2)}, max_x, 0) * gauss_terms


def _eq33_rhs(p, variant, max_x, max_t):
    b, c = p["b"], p["c"]
    reduced = _univariate_pfq(
        [c - b / 2, c - b / 2 - Fraction(1, 2)], [c, 2 * c - b - 1], Fraction(-4), max_x
    )
    return _exp_series({(1, 0): Fraction(2)}, max_x, 0) * reduced


def _eq34_lhs(p, variant, max_x, max_t):
    b = p["b"]
    return _psi2_on_diagonal(b, b, 2 * b, max_x)


def _eq34_rhs(p, variant, max_x, max_t):
    b = p["b"]
    return _univariate_pfq(
        [3 * b / 2, (3 * b - 1) / 2], [2 * b, 3 * b - 1], Fraction(4), max_x
    )


def _bc3f3_lhs(p, variant, max_x, max_t):
    return _psi2_on_diagonal(p["a"], p["b"], p["c"], max_x)


def _bc3f3_rhs(p, variant, max_x, max_t):
    a, b, c = p["a"], p["b"], p["c"]
    return _univariate_pfq(
        [a, (c + b) / 2, (c + b - 1) / 2], [b, c, c + b - 1], Fraction(4), max_x
    )


_SIDES: dict[tuple[Identity, Side], Callable[..., _Truncated]] = {
    (Identity.EQ13, Side.LHS): _eq13_lhs,
    (Identity.EQ13, Side.RHS): _eq13_rhs,
    (Identity.EQ14, Side.LHS): _eq14_lhs,
    (Identity.EQ14, Side.RHS): _eq14_rhs,
    (Identity.EQ15, Side.LHS): _eq15_lhs,
    (Identity.EQ15, Side.RHS): _eq15_rhs,
    (Identity.EQ16, Side.LHS): _eq16_lhs,
    (Identity.EQ16, Side.RHS): _eq16_rhs,
    (Identity.EQ26, Side.LHS): _eq26_lhs,
    (Identity.EQ26, Side.RHS): _eq26_rhs,
    (Identity.EQ31, Side.LHS): _parabola_lhs,
    (Identity.EQ31, Side.RHS): _eq31_rhs,
    (Identity.EQ33, Side.LHS): _parabola_lhs,
    (Identity.EQ33, Side.RHS): _eq33_rhs,
    (Identity.EQ34, Side.LHS): _eq34_lhs,
    (Identity.EQ34, Side.RHS): _eq34_rhs,
    (Identity.BC3F3, Side.LHS): _bc3f3_lhs,
    (Identity.BC3F3, Side.RHS): _bc3f3_rhs,
}


# ─── Public Operations ───────────────────────────────────────────────────────


def _normalize_params(identity: Identity, params: Mapping[str, object]) -> dict[str, Fraction]:
    normalized = {}
    for name in IDENTITY_PARAMETERS[identity]:
        if name not in params:
            raise InvalidParameter(f"{identity.value} needs parameter '{name}'")
        value = params[name]
        if isinstance(value, float):
            raise InvalidParameter(f"parameter {name} must be rational, got float {value!r}")
        try:
            normalized[name] = Fraction(value)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidParameter(f"parameter {name} = {value!r} is not a rational number") from e
    return normalized


def _check_degrees(max_deg_x: int, max_deg_t: int) -> None:
    for name, degree in (("max_deg_x", max_deg_x), ("max_deg_t", max_deg_t)):
        if degree < 0:
            raise InvalidParameter(f"{name} must be nonnegative, got {degree}")
        if degree > MAX_DEGREE:
            raise CapExceeded(f"{name} = {degree} exceeds the cap of {MAX_DEGREE}")


def expand_formal(
    identity_id: Identity | str,
    side: Side | str,
    params: Mapping[str, object],
    max_deg_x: int,
    max_deg_t: int,
    variant: str = "corrected",
) -> RationalCoeffTable:
    """Exact truncated expansion of one side of an identity.

    Raises:
        InvalidParameter: missing/non-rational parameter or a pole.
        CapExceeded: a degree above MAX_DEGREE.
    """
    identity = Identity(identity_id)
    side = Side(side)
    if variant not in VARIANTS:
        raise InvalidParameter(f"variant must be one of {VARIANTS}, got {variant!r}")
    _check_degrees(max_deg_x, max_deg_t)
    p = _normalize_params(identity, params)
    if identity in UNIVARIATE:
        max_deg_t = 0

    try:
        series = _SIDES[(identity, side)](p, variant, max_deg_x, max_deg_t)
    except ZeroDivisionError as e:
        raise InvalidParameter(
            f"{identity.value} {side.value}: a denominator vanishes for parameters "
            f"{ {k: str(v) for k, v in p.items()} }"
        ) from e

    table = series.table()
    logger.debug(f"{identity.value} {side.value}: {len(table.coeff)} nonzero coefficients")
    return table


@dataclass(frozen=True)
class Mismatch:
    i: int
    j: int
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class Certificate:
    """Outcome of an exact coefficient-wise comparison of both sides."""

    identity: Identity
    variant: str
    params: Mapping[str, Fraction]
    max_deg_x: int
    max_deg_t: int
    equal: bool
    first_mismatch: Mismatch | None = None

    def as_dict(self) -> dict:
        mismatch = None
        if self.first_mismatch is not None:
            m = self.first_mismatch
            mismatch = {"i": m.i, "j": m.j, "lhs": str(m.lhs), "rhs": str(m.rhs)}
        return {
            "identity": self.identity.value,
            "variant": self.variant,
            "params": {name: str(value) for name, value in self.params.items()},
            "max_deg_x": self.max_deg_x,
            "max_deg_t": self.max_deg_t,
            "equal": self.equal,
            "first_mismatch": mismatch,
        }


def compare_formal(
    identity_id: Identity | str,
    params: Mapping[str, object],
    max_deg_x: int,
    max_deg_t: int,
    variant: str = "corrected",
) -> Certificate:
    """Compare both sides coefficient by coefficient.

    The reported mismatch is the one of lowest total degree i + j.
    """
    identity = Identity(identity_id)
    lhs = expand_formal(identity, Side.LHS, params, max_deg_x, max_deg_t, variant)
    rhs = expand_formal(identity, Side.RHS, params, max_deg_x, max_deg_t, variant)

    mismatch = None
    keys = sorted(set(lhs.coeff) | set(rhs.coeff), key=lambda key: (key[0] + key[1], key[0], key[1]))
    for key in keys:
        if lhs[key] != rhs[key]:
            mismatch = Mismatch(i=key[0], j=key[1], lhs=lhs[key], rhs=rhs[key])
            break

    certificate = Certificate(
        identity=identity,
        variant=variant,
        params=MappingProxyType(_normalize_params(identity, params)),
        max_deg_x=max_deg_x,
        max_deg_t=lhs.max_deg_t,
        equal=mismatch is None,
        first_mismatch=mismatch,
    )
    logger.info(f"{identity.value} ({variant}) at degrees ({max_deg_x}, {lhs.max_deg_t}): "
                f"{'equal' if certificate.equal else 'MISMATCH'}")
    return certificate
