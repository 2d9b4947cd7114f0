"""Partition counts and exhaustive enumeration for the A_l / B_{l,s} families.

``A_l(n)`` counts partitions of ``n`` into distinct parts that are not
multiples of ``l``.  ``B_{l,s}(n)`` counts decompositions

    n = offset + 2*k_1 + ... + 2*k_i + l*r_1 + ... + l*r_j

where every ``k_p`` and ``r_q`` avoids the residues ``0, s+1, -(s+1)`` modulo
``l + 2``, repetition is allowed, and ``offset = ((l - 2s)**2 - 1) / 8``.  The
two families are tagged: ``2*5`` and ``5*2`` are different parts.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .report import Mismatch, VerificationReport

ENUMERATION_LIMIT = 60


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class PartFamily:
    """Parts ``scale * k`` for ``k >= 1`` with ``k mod modulus`` not in ``excluded``."""

    scale: int
    modulus: int
    excluded: frozenset[int]
    distinct: bool = False

    def __post_init__(self) -> None:
        if self.scale <= 0 or self.modulus <= 0:
            raise PartitionError("scale and modulus must be positive")
        excl = frozenset(r % self.modulus for r in self.excluded)
        if len(excl) >= self.modulus:
            raise PartitionError("every residue is excluded; no part survives")
        object.__setattr__(self, "excluded", excl)

    def multipliers(self, limit: int) -> list[int]:
        """Allowed ``k`` with ``scale * k <= limit``."""
        return [
            k for k in range(1, limit // self.scale + 1)
            if k % self.modulus not in self.excluded
        ]


@dataclass(frozen=True)
class PartSpec:
    families: tuple[PartFamily, ...]
    offset: int = 0


def spec_A(l: int) -> PartSpec:
    _check_odd(l)
    return PartSpec((PartFamily(1, l, frozenset({0}), distinct=True),))


def b_offset(l: int, s: int) -> int:
    return ((l - 2 * s) ** 2 - 1) // 8


def spec_B(l: int, s: int) -> PartSpec:
    _check_odd(l)
    if not 0 <= s <= (l - 1) // 2:
        raise PartitionError(f"B_(l,s) requires 0 <= s <= (l-1)/2, got l={l}, s={s}")
    banned = frozenset({0, s + 1, -(s + 1)})
    return PartSpec(
        (PartFamily(2, l + 2, banned), PartFamily(l, l + 2, banned)),
        b_offset(l, s),
    )


def _check_odd(l: int) -> None:
    if l < 3 or l % 2 == 0:
        raise PartitionError(f"requires odd l >= 3, got l={l}")


@dataclass(frozen=True)
class CountTable:
    l: int
    s: int | None
    n_max: int
    counts: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.counts[n]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count"])
        for n, c in enumerate(self.counts):
            w.writerow([n, c])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, l: int, s: int | None = None) -> "CountTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["n", "count"]:
            raise PartitionError("expected a header row 'n,count'")
        counts = []
        for i, (n, c) in enumerate(rows[1:]):
            if int(n) != i:
                raise PartitionError(f"row {i + 1}: expected n={i}, got {n}")
            counts.append(int(c))
        return cls(l, s, len(counts) - 1, tuple(counts))


def count_spec(spec: PartSpec, n_max: int) -> list[int]:
    """Knapsack count of tagged partitions of every ``n <= n_max``."""
    counts = [0] * (n_max + 1)
    if spec.offset > n_max:
        return counts
    budget = n_max - spec.offset
    ways = [0] * (budget + 1)
    ways[0] = 1
    for fam in spec.families:
        for k in fam.multipliers(budget):
            part = fam.scale * k
            if fam.distinct:
                for n in range(budget, part - 1, -1):
                    ways[n] += ways[n - part]
            else:
                for n in range(part, budget + 1):
                    ways[n] += ways[n - part]
    counts[spec.offset:] = ways
    return counts


def count_A(l: int, n_max: int) -> CountTable:
    return CountTable(l, None, n_max, tuple(count_spec(spec_A(l), n_max)))


def count_B(l: int, s: int, n_max: int) -> CountTable:
    return CountTable(l, s, n_max, tuple(count_spec(spec_B(l, s), n_max)))


Partition = tuple[tuple[int, ...], ...]


def _family_choices(fam: PartFamily, limit: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Multisets (or sets) of multipliers, descending, with total part size ``<= limit``."""
    ks = fam.multipliers(limit)

    def rec(i: int, left: int, acc: list[int]) -> Iterator[tuple[tuple[int, ...], int]]:
        yield tuple(acc), limit - left
        for j in range(i, len(ks)):
            k = ks[j]
            if fam.scale * k > left:
                continue
            acc.append(k)
            yield from rec(j + 1 if fam.distinct else j, left - fam.scale * k, acc)
            acc.pop()

    ks.sort(reverse=True)
    yield from rec(0, limit, [])


def enumerate_partitions(spec: PartSpec, n: int) -> list[Partition]:
    """Every tagged partition of ``n``: one descending multiplier tuple per family.

    The empty partition is returned when ``n`` equals the offset.
    """
    if n > ENUMERATION_LIMIT:
        raise PartitionError(
            f"n={n} exceeds the exhaustive-search limit {ENUMERATION_LIMIT}; "
            "use count_A / count_B for larger n"
        )
    target = n - spec.offset
    if target < 0:
        return []
    out: list[Partition] = []

    def rec(fi: int, left: int, acc: list[tuple[int, ...]]) -> None:
        if fi == len(spec.families):
            if left == 0:
                out.append(tuple(acc))
            return
        fam = spec.families[fi]
        for ks, used in _family_choices(fam, left):
            acc.append(ks)
            rec(fi + 1, left - used, acc)
            acc.pop()

    rec(0, target, [])
    out.sort(key=lambda p: [[-k for k in ks] for ks in p])
    return out


def format_partition(spec: PartSpec, p: Partition) -> str:
    """Render like ``2(2+2+2)+3`` or ``1+2+12``."""
    if len(spec.families) == 1 and spec.families[0].scale == 1:
        body = "+".join(str(k) for k in sorted(p[0]))
        return (body or "0") + (f"+{spec.offset}" if spec.offset else "")
    pieces = []
    for fam, ks in zip(spec.families, p):
        if ks:
            pieces.append(f"{fam.scale}(" + "+".join(str(k) for k in sorted(ks)) + ")")
    if spec.offset or not pieces:
        pieces.append(str(spec.offset))
    return "+".join(pieces)


def verify_thm12(l: int, n_max: int) -> VerificationReport:
    """Check ``A_l(n) = sum_s B_{l,s}(n)`` for ``1 <= n <= n_max``."""
    a = count_A(l, n_max)
    bs = [count_B(l, s, n_max) for s in range((l - 1) // 2 + 1)]
    for n in range(1, n_max + 1):
        total = sum(b[n] for b in bs)
        if a[n] != total:
            return VerificationReport(
                order=Fraction(n_max + 1), passed=False,
                mismatch=Mismatch(Fraction(n), a[n], total),
                name="thm12", params={"l": l},
            )
    return VerificationReport(order=Fraction(n_max + 1), passed=True,
                              name="thm12", params={"l": l})


def table_rows(l: int, n_max: int) -> list[list[int]]:
    """Rows ``[n, A_l(n), B_{l,0}(n), ..., B_{l,r}(n)]`` for ``1 <= n <= n_max``."""
    a = count_A(l, n_max)
    bs = [count_B(l, s, n_max) for s in range((l - 1) // 2 + 1)]
    return [[n, a[n], *(b[n] for b in bs)] for n in range(1, n_max + 1)]


def table_header(l: int) -> list[str]:
    return ["n", f"A_{l}"] + [f"B_{l}_{s}" for s in range((l - 1) // 2 + 1)]


def table_csv(l: int, n_max: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table_header(l))
    w.writerows(table_rows(l, n_max))
    return buf.getvalue()
