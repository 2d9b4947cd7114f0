"""Exact truncated q-series with rational exponents.

A :class:`QSeries` stores integer coefficients densely on the lattice
``(1/denom) * Z``: slot ``i`` holds the coefficient of ``q**((min_exp + i) / denom)``.
The series is known for every exponent strictly below ``trunc / denom``; nothing
beyond that point is ever read.  Every operation returns a new series carrying
the tightest truncation it can justify.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Union

from .report import Mismatch, VerificationReport

ExponentLike = Union[int, Fraction, str]

DEFAULT_DENOM = 8


class SeriesError(ValueError):
    """Raised for inputs the series arithmetic cannot represent."""


def as_exponent(value: ExponentLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("exponent must be rational, got bool")
    try:
        if isinstance(value, (int, str)):
            return Fraction(value)
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return Fraction(int(value[0]), int(value[1]))
    except ZeroDivisionError:
        raise SeriesError(f"exponent {value!r} has a zero denominator") from None
    raise TypeError(f"cannot interpret {value!r} as an exponent")


def _scaled(e: Fraction, denom: int) -> int:
    num = e * denom
    if num.denominator != 1:
        raise SeriesError(f"exponent {e} is not a multiple of 1/{denom}")
    return num.numerator


@dataclass(frozen=True)
class QSeries:
    denom: int
    min_exp: int
    trunc: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.denom <= 0:
            raise SeriesError("denominator must be positive")
        if self.trunc < self.min_exp:
            raise SeriesError("truncation below the first stored exponent")
        if len(self.coeffs) != self.trunc - self.min_exp:
            raise SeriesError(
                f"expected {self.trunc - self.min_exp} coefficients, got {len(self.coeffs)}"
            )

    # -- construction -------------------------------------------------

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[tuple[ExponentLike, int]],
        trunc: ExponentLike,
        denom: int | None = None,
    ) -> "QSeries":
        """Build a series from ``(exponent, coefficient)`` pairs.

        Terms at or beyond ``trunc`` are dropped.  When ``denom`` is omitted the
        smallest denominator that represents every exponent is used.
        """
        pairs = [(as_exponent(e), int(c)) for e, c in terms]
        t = as_exponent(trunc)
        if denom is None:
            denom = lcm(t.denominator, *(e.denominator for e, _ in pairs))
        lo = min([e for e, _ in pairs if e < t], default=Fraction(0))
        lo = min(lo, t)
        start = _scaled(lo, denom)
        stop = _scaled(t, denom)
        buf = [0] * (stop - start)
        for e, c in pairs:
            k = _scaled(e, denom)
            if k < stop:
                buf[k - start] += c
        return cls(denom, start, stop, tuple(buf))

    # -- inspection ---------------------------------------------------

    @property
    def order(self) -> Fraction:
        """Exponent below which the series is known."""
        return Fraction(self.trunc, self.denom)

    @property
    def start(self) -> Fraction:
        return Fraction(self.min_exp, self.denom)

    def valuation(self) -> Fraction | None:
        """Smallest exponent with a nonzero coefficient, or None if all known terms vanish."""
        for i, c in enumerate(self.coeffs):
            if c:
                return Fraction(self.min_exp + i, self.denom)
        return None

    def terms(self) -> Iterator[tuple[Fraction, int]]:
        """Nonzero ``(exponent, coefficient)`` pairs in ascending exponent order."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.min_exp + i, self.denom), c

    def __getitem__(self, e: ExponentLike) -> int:
        return coeff(self, e)

    def __add__(self, other: "QSeries") -> "QSeries":
        return add(self, other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return add(self, negate(other))

    def __neg__(self) -> "QSeries":
        return negate(self)

    def __mul__(self, other: Union["QSeries", int]) -> "QSeries":
        if isinstance(other, int):
            return scale(self, other)
        return mul(self, other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        shown = []
        for e, c in self.terms():
            shown.append(f"{c}*q^{e}")
            if len(shown) == 8:
                shown.append("...")
                break
        body = " + ".join(shown) if shown else "0"
        return f"QSeries({body} + O(q^{self.order}))"

    def to_triples(self) -> list[tuple[int, int, str]]:
        """Serialize as ``(numerator, denominator, coefficient)`` with reduced exponents."""
        return [(e.numerator, e.denominator, str(c)) for e, c in self.terms()]

    def lifted(self, denom: int) -> "QSeries":
        """Same series stored on the finer lattice ``(1/denom) * Z``."""
        if denom == self.denom:
            return self
        if denom % self.denom:
            raise SeriesError(f"cannot lift denominator {self.denom} to {denom}")
        k = denom // self.denom
        buf = [0] * ((self.trunc - self.min_exp) * k)
        buf[::k] = self.coeffs
        return QSeries(denom, self.min_exp * k, self.trunc * k, tuple(buf))

    def reduced(self) -> "QSeries":
        """Same series on the coarsest lattice that still represents it."""
        g = gcd(self.denom, self.min_exp, self.trunc)
        for i, c in enumerate(self.coeffs):
            if g == 1:
                break
            if c:
                g = gcd(g, i)
        if g == 1:
            return self
        return QSeries(self.denom // g, self.min_exp // g, self.trunc // g, self.coeffs[::g])

    def truncated(self, order: ExponentLike) -> "QSeries":
        """Forget every term at or above ``order`` (which must not exceed the known order)."""
        t = as_exponent(order)
        if t > self.order:
            raise SeriesError(f"cannot extend truncation from {self.order} to {t}")
        denom = lcm(self.denom, t.denominator)
        s = self.lifted(denom)
        stop = _scaled(t, denom)
        if stop <= s.min_exp:
            return QSeries(denom, stop, stop, ())
        return QSeries(denom, s.min_exp, stop, s.coeffs[: stop - s.min_exp])


def _common(a: QSeries, b: QSeries) -> tuple[QSeries, QSeries]:
    d = lcm(a.denom, b.denom)
    return a.lifted(d), b.lifted(d)


def make_monomial(
    c: int, e: ExponentLike, trunc: ExponentLike, denom: int = DEFAULT_DENOM
) -> QSeries:
    """``c * q**e + O(q**trunc)`` on the lattice ``(1/denom) * Z``."""
    e, t = as_exponent(e), as_exponent(trunc)
    if t <= e:
        raise SeriesError(f"truncation {t} must exceed the exponent {e}")
    start, stop = _scaled(e, denom), _scaled(t, denom)
    return QSeries(denom, start, stop, (int(c),) + (0,) * (stop - start - 1))


def one(trunc: ExponentLike, denom: int = 1) -> QSeries:
    return make_monomial(1, 0, trunc, denom)


def add(a: QSeries, b: QSeries) -> QSeries:
    a, b = _common(a, b)
    start = min(a.min_exp, b.min_exp)
    stop = min(a.trunc, b.trunc)
    if stop <= start:
        return QSeries(a.denom, stop, stop, ())
    buf = [0] * (stop - start)
    for s in (a, b):
        off = s.min_exp - start
        for i, c in enumerate(s.coeffs[: max(0, stop - s.min_exp)]):
            buf[off + i] += c
    return QSeries(a.denom, start, stop, tuple(buf))


def negate(a: QSeries) -> QSeries:
    return QSeries(a.denom, a.min_exp, a.trunc, tuple(-c for c in a.coeffs))


def scale(a: QSeries, k: int) -> QSeries:
    return QSeries(a.denom, a.min_exp, a.trunc, tuple(k * c for c in a.coeffs))


def shift(a: QSeries, e: ExponentLike) -> QSeries:
    """Multiply by the exact monomial ``q**e``; the truncation moves with it."""
    e = as_exponent(e)
    a = a.lifted(lcm(a.denom, e.denominator))
    k = _scaled(e, a.denom)
    return QSeries(a.denom, a.min_exp + k, a.trunc + k, a.coeffs)


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Truncated Cauchy product.

    The result is known below ``min(a.trunc + b.min_exp, b.trunc + a.min_exp)``.
    """
    a, b = _common(a, b)
    start = a.min_exp + b.min_exp
    stop = min(a.trunc + b.min_exp, b.trunc + a.min_exp)
    n = stop - start
    if n <= 0:
        return QSeries(a.denom, stop, stop, ())
    # iterate over the sparser operand
    if sum(1 for c in a.coeffs if c) > sum(1 for c in b.coeffs if c):
        a, b = b, a
    buf = [0] * n
    bc = b.coeffs
    for i, c in enumerate(a.coeffs[:n]):
        if not c:
            continue
        m = min(n - i, len(bc))
        seg = buf[i : i + m]
        buf[i : i + m] = [x + c * y for x, y in zip(seg, bc[:m])]
    return QSeries(a.denom, start, stop, tuple(buf))


def inverse(a: QSeries) -> QSeries:
    """Multiplicative inverse of a series whose leading coefficient is +1 or -1."""
    lead = None
    for i, c in enumerate(a.coeffs):
        if c:
            lead = i
            break
    if lead is None or a.coeffs[lead] not in (1, -1):
        raise SeriesError("non-invertible leading term")
    u = a.coeffs[lead:]
    u0 = u[0]
    e0 = a.min_exp + lead
    n = len(u)
    # sparse recurrence v[k] = -u0 * sum_{j>=1} u[j] v[k-j]
    support = [(j, c) for j, c in enumerate(u) if c and j]
    v = [0] * n
    v[0] = u0
    for k in range(1, n):
        acc = 0
        for j, c in support:
            if j > k:
                break
            acc += c * v[k - j]
        v[k] = -u0 * acc
    # a = q^e0 * u, known below a.trunc, so 1/a is known below a.trunc - 2*e0
    return QSeries(a.denom, -e0, a.trunc - 2 * e0, tuple(v))


def mul_binomial_power(a: QSeries, sign: int, e: ExponentLike, p: int) -> QSeries:
    """``a * (1 + sign*q**e)**p`` by repeated one-factor updates.

    Multiplication is a shifted add; division is the matching forward
    recurrence.  The truncation of ``a`` is preserved.
    """
    if sign not in (1, -1):
        raise SeriesError("sign must be +1 or -1")
    e = as_exponent(e)
    if e <= 0:
        raise SeriesError(f"divergent factor: exponent {e} must be positive")
    a = a.lifted(lcm(a.denom, e.denominator))
    step = _scaled(e, a.denom)
    buf = list(a.coeffs)
    n = len(buf)
    if step >= n or p == 0:
        return a
    if p > 0:
        for _ in range(p):
            buf[step:] = [x + sign * y for x, y in zip(buf[step:], buf)]
    else:
        for _ in range(-p):
            for i in range(step, n):
                buf[i] -= sign * buf[i - step]
    return QSeries(a.denom, a.min_exp, a.trunc, tuple(buf))


def substitute_power(a: QSeries, u: ExponentLike) -> QSeries:
    """Replace ``q`` by ``q**u`` for a positive rational ``u``."""
    u = as_exponent(u)
    if u <= 0:
        raise SeriesError("substitution power must be positive")
    num, den = u.numerator, u.denominator
    denom = a.denom * den
    if num == 1:
        out = QSeries(denom, a.min_exp, a.trunc, a.coeffs)
    else:
        buf = [0] * ((a.trunc - a.min_exp) * num)
        buf[::num] = a.coeffs
        out = QSeries(denom, a.min_exp * num, a.trunc * num, tuple(buf))
    return out.reduced()


def coeff(a: QSeries, e: ExponentLike) -> int:
    e = as_exponent(e)
    if e >= a.order:
        raise SeriesError(f"exponent {e} is beyond truncation {a.order}")
    num = e * a.denom
    if num.denominator != 1:
        return 0
    k = num.numerator - a.min_exp
    if k < 0:
        return 0
    return a.coeffs[k]


def equal_up_to(a: QSeries, b: QSeries, order: ExponentLike) -> VerificationReport:
    """Compare coefficients of every exponent below ``order``."""
    t = as_exponent(order)
    if t > a.order or t > b.order:
        raise SeriesError(
            f"order {t} exceeds a known truncation ({a.order}, {b.order})"
        )
    a, b = _common(a, b)
    d = lcm(a.denom, t.denominator)
    a, b = a.lifted(d), b.lifted(d)
    stop = _scaled(t, d)
    start = min(a.min_exp, b.min_exp)
    for k in range(start, stop):
        ca = a.coeffs[k - a.min_exp] if k >= a.min_exp else 0
        cb = b.coeffs[k - b.min_exp] if k >= b.min_exp else 0
        if ca != cb:
            return VerificationReport(
                order=t, passed=False, mismatch=Mismatch(Fraction(k, d), ca, cb)
            )
    return VerificationReport(order=t, passed=True)


def series_sum(items: Iterable[QSeries]) -> QSeries:
    items = list(items)
    if not items:
        raise SeriesError("empty sum has no truncation")
    out = items[0]
    for s in items[1:]:
        out = add(out, s)
    return out
