"""Difference-condition bases for the vacuum spaces and their generating functions.

A basis monomial is a weakly increasing sequence ``n_1 <= ... <= n_k`` of
negative half-integers.  Internally each index is stored as the positive
integer ``m = -2n`` so a sequence becomes a partition ``m_1 >= ... >= m_k``,
and the monomial contributes ``q**(l * sum(m))``.

With ``r = (l-1)//2`` for odd ``l`` and ``r = l//2`` for even ``l`` every
reading shares the gap condition ``n_p <= n_{p+r} - 1`` (``m_p - m_{p+r} >= 2``)
and a tail condition ``n_{k-sigma} <= -1`` (at most ``sigma`` entries equal
``-1/2``).  The readings differ in how ``sigma`` depends on ``s`` and in the
extra parity clause imposed for even ``l``; :func:`select_condition_variant`
picks the one whose series matches the product formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .products import chq_omega
from .qseries import QSeries, equal_up_to
from .report import Mismatch

DEGREE_GUARD = 60


class BasisError(ValueError):
    pass


def gap(l: int) -> int:
    return (l - 1) // 2 if l % 2 else l // 2


@dataclass(frozen=True)
class ConditionVariant:
    """A named reading of the basis conditions.

    sigma_rule:
        ``"printed"`` -- sigma(s) = s for s <= r, else r + 1 - s (a negative
        value leaves the tail unconstrained);
        ``"mirror"`` -- sigma(s) = s for s <= r, else l - s.
    parity_rule (even ``l`` only):
        ``"printed"`` -- if n_p - n_{p+r} < -1 then n_p + ... + n_{p+r} is an integer;
        ``"close"`` -- if n_{p+r-1} - n_p <= 1/2 then -2(n_p + ... + n_{p+r-1})
        has the parity of sigma.
    """

    name: str
    sigma_rule: str
    parity_rule: str


VARIANTS = (
    ConditionVariant("as-printed", "printed", "printed"),
    ConditionVariant("printed-sigma/close-window", "printed", "close"),
    ConditionVariant("mirror-sigma/printed-window", "mirror", "printed"),
    ConditionVariant("mirror-sigma/close-window", "mirror", "close"),
)
VARIANTS_BY_NAME = {v.name: v for v in VARIANTS}


@dataclass(frozen=True)
class BasisConditions:
    """Conditions a variant resolves to for one ``(l, s)``.

    ``max_ones`` is capped at ``r``: the gap condition already forbids more
    than ``r`` entries equal to ``-1/2``, so larger limits are equivalent.
    """

    l: int
    r: int
    max_ones: int
    parity: str | None = None
    parity_target: int = 0


def sigma(rule: str, l: int, s: int) -> int | None:
    """Tail length, or None when the tail condition is vacuous."""
    r = gap(l)
    if s <= r:
        return s
    if rule == "printed":
        v = r + 1 - s
    elif rule == "mirror":
        v = l - s
    else:
        raise BasisError(f"unknown sigma rule {rule!r}")
    return v if v >= 0 else None


def resolve(variant: ConditionVariant, l: int, s: int) -> BasisConditions:
    if l < 2:
        raise BasisError("basis enumeration needs l >= 2")
    if not 0 <= s <= l:
        raise BasisError(f"need 0 <= s <= l, got l={l}, s={s}")
    r = gap(l)
    sig = sigma(variant.sigma_rule, l, s)
    ones = r if sig is None else min(sig, r)
    if l % 2:
        return BasisConditions(l, r, ones)
    if variant.parity_rule not in ("printed", "close"):
        raise BasisError(f"unknown parity rule {variant.parity_rule!r}")
    return BasisConditions(l, r, ones, variant.parity_rule, ones % 2)


def _parity_ok(cond: BasisConditions, seq: list[int]) -> bool:
    """Check the parity clause on the window that ends at the last entry."""
    j = len(seq) - 1
    if cond.parity == "printed":
        p = j - cond.r
        if p < 0:
            return True
        if seq[p] - seq[j] > 2:
            return sum(seq[p:]) % 2 == 0
        return True
    if cond.parity == "close":
        p = j - cond.r + 1
        if p < 0:
            return True
        if seq[p] - seq[j] <= 1:
            return sum(seq[p:]) % 2 == cond.parity_target
        return True
    return True


def iter_parts(cond: BasisConditions, deg_max: int) -> Iterator[tuple[int, ...]]:
    """All admissible partitions ``m_1 >= m_2 >= ...`` with ``sum(m) <= deg_max``.

    Every condition is a window condition, so admissible sequences are closed
    under taking prefixes and the search can prune at the first violation.
    """
    seq: list[int] = []

    def rec(total: int, ones: int) -> Iterator[tuple[int, ...]]:
        yield tuple(seq)
        k = len(seq)
        hi = deg_max - total
        if seq:
            hi = min(hi, seq[-1])
        if k >= cond.r:
            hi = min(hi, seq[k - cond.r] - 2)
        for m in range(hi, 0, -1):
            if m == 1 and ones >= cond.max_ones:
                continue
            seq.append(m)
            if _parity_ok(cond, seq):
                yield from rec(total + m, ones + (m == 1))
            seq.pop()

    yield from rec(0, 0)


@dataclass(frozen=True)
class BasisSequence:
    """Indices ``n_1 <= ... <= n_k`` of a basis monomial, as negative half-integers."""

    entries: tuple[Fraction, ...]

    @classmethod
    def from_parts(cls, parts: tuple[int, ...]) -> "BasisSequence":
        return cls(tuple(Fraction(-m, 2) for m in parts))

    def weight(self, l: int) -> int:
        return int(sum(-2 * l * n for n in self.entries))


def enumerate_basis(l: int, s: int, variant: ConditionVariant, deg_max: int) -> list[BasisSequence]:
    _guard(deg_max)
    cond = resolve(variant, l, s)
    return [BasisSequence.from_parts(p) for p in iter_parts(cond, deg_max)]


def _guard(deg_max: int) -> None:
    if deg_max < 0:
        raise BasisError("degree bound must be nonnegative")
    if deg_max > DEGREE_GUARD:
        raise BasisError(
            f"degree bound {deg_max} exceeds the enumeration guard {DEGREE_GUARD}"
        )


def zbasis_series(l: int, s: int, variant: ConditionVariant | str, deg_max: int) -> QSeries:
    """Generating function of the basis, known below ``q**(l*(deg_max+1))``."""
    if isinstance(variant, str):
        variant = VARIANTS_BY_NAME[variant]
    _guard(deg_max)
    cond = resolve(variant, l, s)
    counts = [0] * (deg_max + 1)
    for parts in iter_parts(cond, deg_max):
        counts[sum(parts)] += 1
    terms = [(l * d, c) for d, c in enumerate(counts) if c]
    return QSeries.from_terms(terms, l * (deg_max + 1), 1)


@dataclass(frozen=True)
class VariantSelection:
    l: int
    s: int
    deg_max: int
    selected: BasisConditions | None
    matching: tuple[str, ...]
    mismatches: dict[str, Mismatch] = field(default_factory=dict)
    nonzero_terms: int = 0

    @property
    def unique(self) -> bool:
        return self.selected is not None

    def describe(self) -> str:
        if self.selected is None:
            kind = "no variant" if not self.matching else "ambiguous"
            return f"l={self.l} s={self.s}: {kind} ({', '.join(self.matching) or '-'})"
        return (
            f"l={self.l} s={self.s}: {', '.join(self.matching)}"
            f" [max_ones={self.selected.max_ones}, parity={self.selected.parity}]"
        )


def select_condition_variant(l: int, s: int, deg_max: int = DEGREE_GUARD) -> VariantSelection:
    """Find the readings whose basis series agrees with the product formula.

    Variants that resolve to the same conditions for this ``(l, s)`` count as
    one; the selection is unique when exactly one class of conditions matches.
    """
    order = l * (deg_max + 1)
    target = chq_omega(l, s, order)
    classes: dict[BasisConditions, list[str]] = {}
    mismatches: dict[str, Mismatch] = {}
    cache: dict[BasisConditions, QSeries] = {}
    for v in VARIANTS:
        cond = resolve(v, l, s)
        if cond not in cache:
            cache[cond] = zbasis_series(l, s, v, deg_max)
        rep = equal_up_to(cache[cond], target, order)
        if rep.passed:
            classes.setdefault(cond, []).append(v.name)
        else:
            mismatches[v.name] = rep.mismatch
    matching = tuple(name for names in classes.values() for name in names)
    selected = next(iter(classes)) if len(classes) == 1 else None
    nonzero = sum(1 for _ in target.terms())
    return VariantSelection(l, s, deg_max, selected, matching, mismatches, nonzero)
