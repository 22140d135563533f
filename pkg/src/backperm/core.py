"""Fundamental types: permutations, subset masks, exact rational distributions,
cost functions, and the total-cost evaluator.

Conventions used throughout the package:

- Ground-set elements are the 1-based integers ``1..n``.
- Subsets of ``[n]`` are stored as integer bitmasks where element ``i``
  occupies bit ``i - 1``.
- A permutation is an insertion order: ``order[i]`` is the element added at
  step ``i + 1``.
- All probabilities and weights are exact ``fractions.Fraction`` values;
  only entropies (which involve logarithms) are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    DuplicateElement,
    InvalidDistribution,
    OutOfRange,
    ParseError,
    TooLarge,
)

# Default resource caps; every function taking a cap exposes it as a parameter.
DEFAULT_ENUM_LIMIT = 8        # largest n for explicit S_n enumeration
DEFAULT_LATTICE_CAP = 20      # largest n for dense subset-lattice work
DEFAULT_SUPPORT_CAP = 1_000_000   # largest explicit distribution support
DEFAULT_FAMILY_CAP = 1_000_000    # largest explicit permutation family


# ---------------------------------------------------------------------------
# subset masks


def full_mask(n: int) -> int:
    """Mask of the whole ground set ``[n]``."""
    return (1 << n) - 1


def element_bit(x: int) -> int:
    return 1 << (x - 1)


def mask_of(elements: Iterable[int]) -> int:
    """Mask of a collection of elements.

    >>> bin(mask_of([1, 3]))
    '0b101'
    """
    m = 0
    for x in elements:
        m |= 1 << (x - 1)
    return m


def mask_elements(mask: int) -> list[int]:
    """Elements of a mask in ascending order.

    >>> mask_elements(0b101)
    [1, 3]
    """
    out = []
    x = 1
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


def mask_size(mask: int) -> int:
    return mask.bit_count()


def iter_submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` (including 0 and ``mask`` itself),
    in descending numeric order."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


# ---------------------------------------------------------------------------
# rationals


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational: {text!r}") from exc


def format_fraction(value: Fraction | int) -> str:
    """Canonical ``"p/q"`` form (denominator always present)."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    """An insertion order over ``[n]``; ``order[i]`` is inserted at step i+1."""

    order: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.order)

    def prefix_mask(self, i: int) -> int:
        """Mask of the first ``i`` inserted elements."""
        return mask_of(self.order[:i])

    def prefix_masks(self) -> list[int]:
        """Masks of all prefixes, sizes 0..n."""
        out = [0]
        m = 0
        for x in self.order:
            m |= 1 << (x - 1)
            out.append(m)
        return out


def make_permutation(order: Sequence[int]) -> Permutation:
    """Validate and build a permutation from an insertion order.

    >>> make_permutation([2, 3, 1]).order
    (2, 3, 1)
    """
    n = len(order)
    if n == 0:
        raise OutOfRange("permutation must have length at least 1")
    seen = 0
    for x in order:
        if not isinstance(x, int) or x < 1 or x > n:
            raise OutOfRange(f"entry {x!r} outside [1, {n}]")
        bit = 1 << (x - 1)
        if seen & bit:
            raise DuplicateElement(f"element {x} repeated")
        seen |= bit
    return Permutation(tuple(order))


def _all_orders(n: int) -> Iterator[tuple[int, ...]]:
    import itertools

    return itertools.permutations(range(1, n + 1))


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class PermutationDistribution:
    """Finite-support distribution over S_n with exact rational probabilities."""

    n: int
    support: tuple[tuple[Permutation, Fraction], ...]

    def __post_init__(self) -> None:
        seen: set[tuple[int, ...]] = set()
        total = Fraction(0)
        for perm, prob in self.support:
            if perm.n != self.n:
                raise InvalidDistribution(
                    f"permutation over [{perm.n}] in a distribution over [{self.n}]"
                )
            if prob <= 0:
                raise InvalidDistribution("probabilities must be strictly positive")
            if perm.order in seen:
                raise InvalidDistribution(f"duplicate permutation {perm.order}")
            seen.add(perm.order)
            total += prob
        if total != 1:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")

    def prob_of(self, perm: Permutation) -> Fraction:
        for member, prob in self.support:
            if member.order == perm.order:
                return prob
        return Fraction(0)


def distribution_from_pairs(
    n: int, pairs: Iterable[tuple[Sequence[int], Fraction]]
) -> PermutationDistribution:
    support = tuple(
        (make_permutation(order), Fraction(prob)) for order, prob in pairs
    )
    return PermutationDistribution(n, support)


def uniform_distribution(n: int, limit: int = DEFAULT_ENUM_LIMIT) -> PermutationDistribution:
    """The uniform distribution over S_n, enumerated explicitly."""
    if n < 1:
        raise OutOfRange("n must be at least 1")
    if n > limit:
        raise TooLarge(f"n = {n} exceeds explicit-enumeration limit {limit}")
    prob = Fraction(1, math.factorial(n))
    support = tuple((Permutation(order), prob) for order in _all_orders(n))
    return PermutationDistribution(n, support)


# ---------------------------------------------------------------------------
# cost functions


@dataclass(frozen=True)
class CostFunction:
    """Cost ``c(x, Y)`` of adding ``x`` last to the subset ``Y`` (given as mask).

    ``normalized`` asserts E_{x ~ U(Y)}[c(x, Y)] <= 1 for every Y; it is a
    claim by the constructor, relied on by efficiency audits.
    """

    n: int
    evaluate: Callable[[int, int], Fraction]
    normalized: bool = False

    def __call__(self, x: int, y_mask: int) -> Fraction:
        if not (y_mask >> (x - 1)) & 1:
            raise OutOfRange(f"element {x} not in the queried subset")
        return self.evaluate(x, y_mask)

    @staticmethod
    def from_table(n: int, table: dict[tuple[int, int], Fraction], normalized: bool = False) -> "CostFunction":
        """Dense-table form; useful for oracles at small n."""
        if n > 16:
            raise TooLarge("dense cost tables are limited to n <= 16")

        def evaluate(x: int, y_mask: int) -> Fraction:
            return table.get((x, y_mask), Fraction(0))

        return CostFunction(n, evaluate, normalized)


def zero_cost(n: int) -> CostFunction:
    return CostFunction(n, lambda x, y: Fraction(0), normalized=True)


def unit_cost(n: int) -> CostFunction:
    return CostFunction(n, lambda x, y: Fraction(1), normalized=True)


def total_cost(c: CostFunction, perm: Permutation) -> Fraction:
    """Exact total cost: the sum of c(order[i], prefix through i)."""
    total = Fraction(0)
    mask = 0
    for x in perm.order:
        mask |= 1 << (x - 1)
        total += c(x, mask)
    return total


# ---------------------------------------------------------------------------
# permutation families


@dataclass(frozen=True)
class PermutationFamily:
    """An explicit multiset of ``t`` permutations meant for uniform sampling."""

    n: int
    members: tuple[Permutation, ...]

    @property
    def t(self) -> int:
        return len(self.members)

    def __post_init__(self) -> None:
        for member in self.members:
            if member.n != self.n:
                raise InvalidDistribution("family member over the wrong ground set")

    def distinct(self) -> bool:
        return len({m.order for m in self.members}) == len(self.members)

    def as_distribution(self) -> PermutationDistribution:
        """Uniform distribution over the members (duplicates aggregated)."""
        counts: dict[tuple[int, ...], int] = {}
        for member in self.members:
            counts[member.order] = counts.get(member.order, 0) + 1
        support = tuple(
            (Permutation(order), Fraction(count, self.t))
            for order, count in sorted(counts.items())
        )
        return PermutationDistribution(self.n, support)


# ---------------------------------------------------------------------------
# text formats
#
# family file:        "n t" header, then t lines "pi(1) ... pi(n)"
# distribution file:  "n m" header, then m lines "p/q v1 v2 ... vn"


def format_family(family: PermutationFamily) -> str:
    lines = [f"{family.n} {family.t}"]
    lines.extend(" ".join(str(x) for x in m.order) for m in family.members)
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> PermutationFamily:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty family file")
    try:
        n, t = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ParseError(f"bad family header: {lines[0]!r}") from exc
    if len(lines) - 1 != t:
        raise ParseError(f"expected {t} rows, found {len(lines) - 1}")
    members = []
    for line in lines[1:]:
        try:
            order = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise ParseError(f"bad family row: {line!r}") from exc
        if len(order) != n:
            raise ParseError(f"row of length {len(order)}, expected {n}")
        members.append(make_permutation(order))
    return PermutationFamily(n, tuple(members))


def format_distribution(dist: PermutationDistribution) -> str:
    lines = [f"{dist.n} {len(dist.support)}"]
    for perm, prob in dist.support:
        lines.append(format_fraction(prob) + " " + " ".join(str(x) for x in perm.order))
    return "\n".join(lines) + "\n"


def parse_distribution(text: str) -> PermutationDistribution:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty distribution file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ParseError(f"bad distribution header: {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} rows, found {len(lines) - 1}")
    pairs = []
    for line in lines[1:]:
        toks = line.split()
        if len(toks) != n + 1:
            raise ParseError(f"bad distribution row: {line!r}")
        prob = parse_fraction(toks[0])
        order = []
        for tok in toks[1:]:
            try:
                order.append(int(tok))
            except ValueError as exc:
                raise ParseError(f"bad distribution row: {line!r}") from exc
        pairs.append((order, prob))
    try:
        return distribution_from_pairs(n, pairs)
    except (InvalidDistribution, DuplicateElement, OutOfRange) as exc:
        raise ParseError(str(exc)) from exc
