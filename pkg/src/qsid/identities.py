"""Identity registry, verification driver, and the specialized-character chain check."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Callable

from . import products as P
from .basis import DEGREE_GUARD, VARIANTS_BY_NAME, BasisError, zbasis_series
from .partitions import count_A, count_B
from .qseries import (
    QSeries, SeriesError, as_exponent, equal_up_to, make_monomial, shift, substitute_power,
)
from .report import VerificationReport

ORDER_ENV = "QSID_DEFAULT_ORDER"
PARAM_KEYS = ("l", "s", "r", "u")


class IdentityError(ValueError):
    """Unknown identity, parameters outside its domain, or a malformed suite config."""


@lru_cache(maxsize=None)
def _defaults_text() -> str:
    return resources.files("qsid").joinpath("data/defaults.json").read_text()


def defaults() -> dict[str, Any]:
    return json.loads(_defaults_text())


def default_reading(kind: str) -> str:
    return defaults()["readings"][kind]


Builder = Callable[[dict[str, int], Fraction, str | None], QSeries]


@dataclass(frozen=True)
class IdentityCase:
    name: str
    description: str
    params: tuple[str, ...]
    check: Callable[[dict[str, int]], str | None]
    lhs: Builder
    rhs: Builder
    reading_kind: str | None = None
    readings: tuple[str, ...] = ()

    def domain_error(self, params: dict[str, int]) -> str | None:
        missing = [k for k in self.params if k not in params]
        if missing:
            return f"{self.name} requires parameter(s) {', '.join(missing)}"
        extra = [k for k in params if k not in self.params]
        if extra:
            return f"{self.name} does not take parameter(s) {', '.join(extra)}"
        return self.check(params)


def _odd(p: dict[str, int], name: str) -> str | None:
    l = p["l"]
    return None if l >= 3 and l % 2 else f"{name} requires odd l >= 3"


def _even(p: dict[str, int], name: str) -> str | None:
    l = p["l"]
    return None if l >= 2 and l % 2 == 0 else f"{name} requires even l >= 2"


def _no_check(p: dict[str, int]) -> None:
    return None


def _perturb_denom(a: QSeries, e: Fraction) -> int:
    return math.lcm(a.denom, e.denominator)


def _counts_series(counts: list[int], order: Fraction) -> QSeries:
    return QSeries.from_terms(enumerate(counts), order, 1)


def _thm12_lhs(p, t, reading):
    n_max = math.ceil(t) - 1
    return _counts_series(list(count_A(p["l"], n_max).counts), Fraction(n_max + 1))


def _thm12_rhs(p, t, reading):
    l = p["l"]
    n_max = math.ceil(t) - 1
    tables = [count_B(l, s, n_max).counts for s in range((l - 1) // 2 + 1)]
    total = [sum(col) for col in zip(*tables)]
    # the empty partition counts once on each side
    return _counts_series(total, Fraction(n_max + 1))


def _thm13_reading(reading):
    return reading or default_reading("thm13")


def _basis_degree(l: int, t: Fraction) -> int:
    """Smallest degree bound whose series is known up to ``q**t``."""
    deg = math.ceil(t / l) - 1
    if deg > DEGREE_GUARD:
        raise IdentityError(
            f"order {t} needs basis degree {deg}, over the enumeration guard "
            f"{DEGREE_GUARD} (max order {l * (DEGREE_GUARD + 1)} at l={l})"
        )
    return deg


def _vacuum_basis_lhs(p, t, reading):
    l, s = p["l"], p["s"]
    variant = VARIANTS_BY_NAME[reading or default_reading("basis")]
    deg = _basis_degree(l, t)
    return zbasis_series(l, s, variant, deg)


def _kappa_shift_lhs(p, t, reading):
    return P.theta_kappa(p["l"], p["l"] + p["u"], t)


def _kappa_shift_rhs(p, t, reading):
    l, u = p["l"], p["u"]
    return shift(P.theta_kappa(l, l - u, t + u), -u)


def _r_range(p):
    return None if 0 < p["r"] < p["l"] else "kappa_product requires 0 < r < l"


def _s_range(p):
    return None if p["l"] >= 1 and 0 <= p["s"] <= p["l"] else "requires 0 <= s <= l"


def _vacuum_basis_check(p):
    if p["l"] < 2:
        return "vacuum_basis requires l >= 2"
    return _s_range(p)


def _shift_check(p):
    return None if 1 <= p["u"] < p["l"] else "kappa_shift requires 1 <= u < l"


REGISTRY: dict[str, IdentityCase] = {}


def _register(case: IdentityCase) -> None:
    REGISTRY[case.name] = case


_register(IdentityCase(
    "schur", "prod 1/((1-q^{6n-1})(1-q^{6n-5})) = prod (1+q^n)/(1+q^{3n})",
    (), _no_check,
    lambda p, t, r: P.schur_lhs(t), lambda p, t, r: P.schur_rhs(t),
))
_register(IdentityCase(
    "thm11", "odd-l product = sum over s of restricted products",
    ("l",), lambda p: _odd(p, "thm11"),
    lambda p, t, r: P.thm11_lhs(p["l"], t), lambda p, t, r: P.thm11_rhs(p["l"], t),
))
_register(IdentityCase(
    "thm11_schur", "odd-l sum side at l=3 equals the Schur product",
    (), _no_check,
    lambda p, t, r: P.thm11_rhs(3, t), lambda p, t, r: P.schur_lhs(t),
))
_register(IdentityCase(
    "thm12", "A_l(n) = sum_s B_{l,s}(n) as count tables",
    ("l",), lambda p: _odd(p, "thm12"),
    _thm12_lhs, _thm12_rhs,
))
_register(IdentityCase(
    "thm13a", "even-l identity, half-integer form",
    ("l",), lambda p: _even(p, "thm13"),
    lambda p, t, r: P.thm13a_lhs(p["l"], t),
    lambda p, t, r: P.thm13a_rhs(p["l"], t, _thm13_reading(r)),
    "thm13", P.THM13_READINGS,
))
_register(IdentityCase(
    "thm13b", "even-l identity, integer form",
    ("l",), lambda p: _even(p, "thm13"),
    lambda p, t, r: P.thm13b_lhs(p["l"], t),
    lambda p, t, r: P.thm13b_rhs(p["l"], t, _thm13_reading(r)),
    "thm13", P.THM13_READINGS,
))
_register(IdentityCase(
    "thm13_square_lhs", "product side of the half-integer form at q^2 = integer form",
    ("l",), lambda p: _even(p, "thm13"),
    lambda p, t, r: substitute_power(P.thm13a_lhs(p["l"], t / 2), 2),
    lambda p, t, r: P.thm13b_lhs(p["l"], t),
))
_register(IdentityCase(
    "thm13_square_rhs", "sum side of the half-integer form at q^2 = integer form",
    ("l",), lambda p: _even(p, "thm13"),
    lambda p, t, r: substitute_power(P.thm13a_rhs(p["l"], t / 2, _thm13_reading(r)), 2),
    lambda p, t, r: P.thm13b_rhs(p["l"], t, _thm13_reading(r)),
    "thm13", P.THM13_READINGS,
))
_register(IdentityCase(
    "gauss", "sum q^{2n^2-n} = prod (1-q^{2n})^2/(1-q^n)",
    (), _no_check,
    lambda p, t, r: P.gauss_lhs(t), lambda p, t, r: P.gauss_rhs(t),
))
_register(IdentityCase(
    "dimq_symmetry", "dim_q L(Lambda_s) = dim_q L(Lambda_{l-s})",
    ("l", "s"), _s_range,
    lambda p, t, r: P.dimq_L(p["l"], p["s"], t),
    lambda p, t, r: P.dimq_L(p["l"], p["l"] - p["s"], t),
))
_register(IdentityCase(
    "kappa_ll", "kappa(l, l) theta sum = 2 prod (1-q^{4n})^2/(1-q^{2n}) in the chosen variable",
    ("l",), lambda p: None if p["l"] >= 1 else "kappa_ll requires l >= 1",
    lambda p, t, r: P.kappa(p["l"], p["l"], t),
    lambda p, t, r: P.kappa_l_l(p["l"], t, r or default_reading("kappa_ll")),
    "kappa_ll", tuple(P.KAPPA_LL_READINGS),
))
_register(IdentityCase(
    "kappa_product", "kappa(l, r) theta sum = five-family product",
    ("l", "r"), _r_range,
    lambda p, t, r: P.kappa(p["l"], p["r"], t),
    lambda p, t, r: P.kappa_product(p["l"], p["r"], t),
))
_register(IdentityCase(
    "kappa_shift", "kappa(l, l+u) = q^{-u} kappa(l, l-u)",
    ("l", "u"), _shift_check,
    _kappa_shift_lhs, _kappa_shift_rhs,
))
_register(IdentityCase(
    "vacuum_basis", "difference-condition basis series = vacuum-space product",
    ("l", "s"), _vacuum_basis_check,
    _vacuum_basis_lhs, lambda p, t, r: P.chq_omega(p["l"], p["s"], t),
    "basis", tuple(VARIANTS_BY_NAME),
))
_register(IdentityCase(
    "chain_theta_even", "lattice theta side = closed form (even l)",
    ("l",), lambda p: _even(p, "closed_even"),
    lambda p, t, r: P.eq83(p["l"], t),
    lambda p, t, r: P.eq84_rhs(p["l"], t, r or default_reading("closed_even")),
    "closed_even", tuple(P.EQ84_READINGS),
))
_register(IdentityCase(
    "chain_theta_odd", "lattice theta side = closed form (odd l)",
    ("l",), lambda p: _odd(p, "closed_odd"),
    lambda p, t, r: P.eq83(p["l"], t), lambda p, t, r: P.eq85_rhs(p["l"], t),
))
_register(IdentityCase(
    "chain_sum_even", "closed form = sum over s of vacuum character times q-dimension (even l)",
    ("l",), lambda p: _even(p, "closed_even"),
    lambda p, t, r: P.eq84_rhs(p["l"], t, default_reading("closed_even")),
    lambda p, t, r: P.eq86_rhs(p["l"], t, r or default_reading("sum_prefactor")),
    "sum_prefactor", tuple(P.EQ86_READINGS),
))
_register(IdentityCase(
    "chain_sum_odd", "closed form = sum over s of vacuum character times q-dimension (odd l)",
    ("l",), lambda p: _odd(p, "closed_odd"),
    lambda p, t, r: P.eq85_rhs(p["l"], t),
    lambda p, t, r: P.eq86_rhs(p["l"], t, r or default_reading("sum_prefactor")),
    "sum_prefactor", tuple(P.EQ86_READINGS),
))
_register(IdentityCase(
    "master", "lattice theta side = sum over s of vacuum character times q-dimension",
    ("l",), lambda p: None if 2 <= p["l"] <= 8 else "master requires 2 <= l <= 8",
    lambda p, t, r: P.eq83(p["l"], t),
    lambda p, t, r: P.eq86_rhs(p["l"], t, r or default_reading("sum_prefactor")),
    "sum_prefactor", tuple(P.EQ86_READINGS),
))


def max_order() -> Fraction:
    return Fraction(defaults()["max_order"])


def check_order(t: Fraction) -> None:
    if t <= 0:
        raise IdentityError("order must be positive")
    if t > max_order():
        raise IdentityError(f"order {t} exceeds the cap {max_order()}")


def default_order(name: str, params: dict[str, int]) -> Fraction:
    env = os.environ.get(ORDER_ENV)
    if env:
        try:
            return Fraction(env)
        except ValueError:
            raise IdentityError(f"{ORDER_ENV}={env!r} is not a rational order") from None
    spec = defaults()["orders"].get(name, 200)
    if isinstance(spec, dict):
        return Fraction(spec["per_l"] * params["l"])
    return Fraction(spec)


def _normalize_params(params: dict[str, Any] | None) -> dict[str, int]:
    out = {}
    for k, v in (params or {}).items():
        if k not in PARAM_KEYS:
            raise IdentityError(f"unknown parameter {k!r}; expected one of {PARAM_KEYS}")
        if isinstance(v, bool) or not isinstance(v, int):
            try:
                v = int(str(v), 10)
            except ValueError:
                raise IdentityError(f"parameter {k} must be an integer, got {v!r}") from None
        out[k] = v
    return out


def lookup(name: str) -> IdentityCase:
    try:
        return REGISTRY[name]
    except KeyError:
        raise IdentityError(
            f"unknown identity {name!r}; known identities: {', '.join(REGISTRY)}"
        ) from None


def validate(name: str, params: dict[str, Any] | None, reading: str | None = None) -> tuple[IdentityCase, dict[str, int]]:
    case = lookup(name)
    p = _normalize_params(params)
    err = case.domain_error(p)
    if err:
        raise IdentityError(err)
    if reading is not None and reading not in case.readings:
        choices = ", ".join(case.readings) or "none"
        raise IdentityError(f"{name} has no reading {reading!r}; readings: {choices}")
    return case, p


def verify(
    name: str,
    params: dict[str, Any] | None = None,
    order: Any = None,
    reading: str | None = None,
    swap: bool = False,
    perturb: tuple[Any, int] | None = None,
) -> VerificationReport:
    """Build both sides of a registered identity and compare them below ``order``.

    ``perturb=(e, c)`` adds ``c*q**e`` to the right side before comparing; it
    exists to exercise the failure path.
    """
    case, p = validate(name, params, reading)
    t = Fraction(order) if order is not None else default_order(name, p)
    check_order(t)
    start = time.perf_counter()
    try:
        left = case.lhs(p, t, reading)
        right = case.rhs(p, t, reading)
    except (SeriesError, BasisError) as exc:
        raise IdentityError(str(exc)) from exc
    if perturb is not None:
        e, c = as_exponent(perturb[0]), perturb[1]
        if e < right.order:
            right = right + make_monomial(c, e, right.order, _perturb_denom(right, e))
    if swap:
        left, right = right, left
    rep = equal_up_to(left, right, t)
    note = f"reading={reading}" if reading else ""
    return replace(
        rep, name=name, params=p, note=note,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


def readings_that_verify(name: str, params: dict[str, Any], order: Any = None) -> list[str]:
    """Every enumerated reading under which the identity checks out to ``order``."""
    case = lookup(name)
    return [r for r in case.readings if verify(name, params, order, reading=r).passed]


def master_check(l: int, order: Any = 200) -> VerificationReport:
    """Check both links of the chain: theta side = closed form = sum over s.

    The closed form is the even-l or odd-l expression as appropriate.
    """
    if not 2 <= l <= 8:
        raise IdentityError("master_check requires 2 <= l <= 8")
    t = Fraction(order)
    start = time.perf_counter()
    theta_side = P.eq83(l, t)
    if l % 2 == 0:
        closed = P.eq84_rhs(l, t, default_reading("closed_even"))
    else:
        closed = P.eq85_rhs(l, t)
    summed = P.eq86_rhs(l, t, default_reading("sum_prefactor"))
    first = equal_up_to(theta_side, closed, t)
    rep = first if not first.passed else equal_up_to(closed, summed, t)
    link = "theta=closed" if not first.passed else "closed=sum"
    return replace(
        rep, name="master", params={"l": l},
        note="" if rep.passed else f"failed link {link}",
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


@dataclass(frozen=True)
class SuiteCase:
    name: str
    params: dict[str, int]
    order: Fraction | None = None
    reading: str | None = None
    perturb: tuple[Fraction, int] | None = None


def parse_suite(config: Any) -> list[SuiteCase]:
    """Validate a suite config (a JSON list of cases) before anything runs."""
    if isinstance(config, dict) and "suite" in config:
        config = config["suite"]
    if not isinstance(config, list):
        raise IdentityError("suite config must be a JSON list of cases")
    cases = []
    for i, item in enumerate(config):
        if not isinstance(item, dict) or "name" not in item:
            raise IdentityError(f"case {i}: expected an object with a 'name'")
        unknown = set(item) - {"name", "params", "order", "reading", "perturb"}
        if unknown:
            raise IdentityError(f"case {i}: unknown field(s) {sorted(unknown)}")
        params = item.get("params") or {}
        if not isinstance(params, dict):
            raise IdentityError(f"case {i}: 'params' must be an object")
        reading = item.get("reading")
        try:
            _, p = validate(item["name"], params, reading)
            order = item.get("order")
            order = None if order is None else Fraction(str(order))
            if order is not None:
                check_order(order)
        except (IdentityError, ValueError, ZeroDivisionError) as exc:
            raise IdentityError(f"case {i}: {exc}") from None
        perturb = item.get("perturb")
        if perturb is not None:
            try:
                perturb = (as_exponent(perturb["exponent"]), int(perturb["coeff"]))
            except (TypeError, KeyError, ValueError, SeriesError):
                raise IdentityError(
                    f"case {i}: 'perturb' must be {{\"exponent\": e, \"coeff\": c}}"
                ) from None
        cases.append(SuiteCase(item["name"], p, order, reading, perturb))
    return cases


def _run_case(case: SuiteCase) -> VerificationReport:
    return verify(case.name, case.params, case.order, case.reading, perturb=case.perturb)


def run_suite(config: Any = None, jobs: int = 1) -> list[VerificationReport]:
    """Run every case; reports come back in config order whatever ``jobs`` is."""
    cases = parse_suite(defaults()["suite"] if config is None else config)
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_case, cases))
    return [_run_case(c) for c in cases]
