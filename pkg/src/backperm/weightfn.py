"""Weight functions on the subset lattice and the single-batch machinery:
mass and entropy functionals, dyadic level truncation, the shadow operator,
the Lovasz form of the Kruskal-Katona bound, and the single-batch
adversarial audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import format_fraction, full_mask, mask_elements, mask_size, parse_fraction
from .errors import (
    DegenerateLevel,
    Infeasible,
    InvalidDistribution,
    MixedLevels,
    NonConvergence,
    OutOfRange,
    ParseError,
)


@dataclass(frozen=True)
class WeightFunction:
    """Sparse map from subsets of [n] to (0, 1]; absent subsets weigh 0."""

    n: int
    values: dict[int, Fraction]

    def __post_init__(self) -> None:
        cleaned = {}
        limit = full_mask(self.n)
        for mask, value in self.values.items():
            if mask & ~limit:
                raise OutOfRange(f"mask {mask:#x} outside the lattice of [{self.n}]")
            if value == 0:
                continue
            if not (0 < value <= 1):
                raise OutOfRange(f"weight {value} outside (0, 1]")
            cleaned[mask] = Fraction(value)
        object.__setattr__(self, "values", cleaned)

    def __getitem__(self, mask: int) -> Fraction:
        return self.values.get(mask, Fraction(0))

    def level(self) -> int | None:
        """The common subset size of the support, or None if mixed/empty."""
        sizes = {mask_size(mask) for mask in self.values}
        if len(sizes) == 1:
            return sizes.pop()
        return None


def S_of(w: WeightFunction) -> Fraction:
    """Total mass: the exact sum of all stored weights."""
    return sum(w.values.values(), Fraction(0))


def H_of(w: WeightFunction) -> float:
    """Entropy-like functional: sum of w(A) * ln(1/w(A)) over the support."""
    return -sum(float(v) * math.log(v) for v in w.values.values()) + 0.0


def level_truncate(w: WeightFunction, i: int) -> WeightFunction:
    """Dyadic truncation: keep subsets with w(A) >= 2^-i at weight 2^-(i+1)."""
    threshold = Fraction(1, 1 << i)
    kept = Fraction(1, 1 << (i + 1))
    return WeightFunction(
        w.n, {mask: kept for mask, value in w.values.items() if value >= threshold}
    )


def shadow(w: WeightFunction) -> WeightFunction:
    """The shadow: (Dw)(B) is the largest weight of a one-element extension."""
    out: dict[int, Fraction] = {}
    for mask, value in w.values.items():
        for x in mask_elements(mask):
            child = mask & ~(1 << (x - 1))
            if value > out.get(child, Fraction(0)):
                out[child] = value
    return WeightFunction(w.n, out)


def dyadic_level(value: Fraction) -> int:
    """Smallest non-negative j with value >= 2^-j (value must be in (0, 1])."""
    if not (0 < value <= 1):
        raise OutOfRange(f"value {value} outside (0, 1]")
    num, den = value.numerator, value.denominator
    j = 0
    while (num << j) < den:
        j += 1
    return j


def truncation_sum_S(w: WeightFunction) -> Fraction:
    """Closed form of the infinite sum of S(pi_i w) over i >= 0.

    Per subset the tail sums to exactly 2^-j where j is its dyadic level, so
    the total lies in [S(w)/2, S(w)].
    """
    return sum(
        (Fraction(1, 1 << dyadic_level(v)) for v in w.values.values()), Fraction(0)
    )


def truncation_sum_H(w: WeightFunction) -> float:
    """Closed form of the infinite sum of H(pi_i w) over i >= 0.

    Per subset with dyadic level j the tail is ln(2) * 2^-j * (j + 2).
    """
    exact = Fraction(0)
    for v in w.values.values():
        j = dyadic_level(v)
        exact += Fraction(j + 2, 1 << j)
    return float(exact) * math.log(2)


# ---------------------------------------------------------------------------
# the Lovasz form of the Kruskal-Katona bound


def generalized_binomial(x: float, k: int) -> float:
    """binom(x, k) = x (x-1) ... (x-k+1) / k! for real x."""
    value = 1.0
    for i in range(k):
        value *= x - i
    return value / math.factorial(k)


def ell_k(k: int, x: float, rel_tol: float = 1e-12, max_iter: int = 500) -> float:
    """The unique non-negative root of ell -> binom(k-1+ell, k) = x.

    Solved by bisection on the bracket [0, k * x^(1/k) + k].
    """
    if k < 1:
        raise OutOfRange("k must be at least 1")
    if x < 0:
        raise OutOfRange("x must be non-negative")
    if x == 0:
        return 0.0
    if k == 1:
        return float(x)
    lo = 0.0
    hi = k * float(x) ** (1.0 / k) + k
    if generalized_binomial(k - 1 + hi, k) < x:
        raise NonConvergence("bracket upper end below target")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if generalized_binomial(k - 1 + mid, k) < x:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * max(1.0, lo):
            return 0.5 * (lo + hi)
    raise NonConvergence(f"no convergence after {max_iter} iterations")


@dataclass(frozen=True)
class ShadowBound:
    """Measured shadow size of a set family against the Kruskal-Katona bound."""

    size: int
    k: int
    actual: int
    bound: float


def shadow_bound_check(members: Iterable[int]) -> ShadowBound:
    """For a family A at level k, compare |shadow(A)| with |A| * k / ell_k(|A|)."""
    family = set(members)
    if not family:
        raise OutOfRange("family must be nonempty")
    sizes = {mask_size(mask) for mask in family}
    if len(sizes) != 1:
        raise MixedLevels(f"family spans levels {sorted(sizes)}")
    k = sizes.pop()
    if k == 0:
        raise DegenerateLevel("family at level 0 has no shadow")
    lower = set()
    for mask in family:
        for x in mask_elements(mask):
            lower.add(mask & ~(1 << (x - 1)))
    size = len(family)
    bound = size * k / ell_k(k, size)
    return ShadowBound(size, k, len(lower), bound)


# ---------------------------------------------------------------------------
# subset distributions and the single-batch audit


@dataclass(frozen=True)
class SubsetDistribution:
    """Distribution over the size-k subsets of [n], exact probabilities."""

    n: int
    k: int
    support: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        limit = full_mask(self.n)
        total = Fraction(0)
        seen = set()
        for mask, prob in self.support:
            if mask & ~limit or mask_size(mask) != self.k:
                raise InvalidDistribution(
                    f"mask {mask:#x} is not a size-{self.k} subset of [{self.n}]"
                )
            if prob <= 0:
                raise InvalidDistribution("probabilities must be strictly positive")
            if mask in seen:
                raise InvalidDistribution(f"duplicate subset {mask:#x}")
            seen.add(mask)
            total += prob
        if total != 1:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")

    def entropy(self) -> float:
        return -sum(float(p) * math.log(p) for _, p in self.support) + 0.0


def uniform_subset_distribution(n: int, k: int) -> SubsetDistribution:
    masks = [m for m in range(1 << n) if m.bit_count() == k]
    prob = Fraction(1, len(masks))
    return SubsetDistribution(n, k, tuple((m, prob) for m in masks))


@dataclass(frozen=True)
class SingleBatchAudit:
    ratio: Fraction
    shadow_mass: Fraction
    entropy: float

    def to_json(self) -> dict:
        return {
            "ratio": format_fraction(self.ratio),
            "shadow_mass": format_fraction(self.shadow_mass),
            "entropy": self.entropy,
        }


def single_batch_audit(dist: SubsetDistribution) -> SingleBatchAudit:
    """Run the single-batch adversary against a subset distribution.

    Builds the complement weight function w(A) = Pr[S = [n] \\ A], the cost
    charging k+1 to the element whose removal leaves the most probable sample
    (ties to the smallest element), and checks the exact identity

        E[c(s, S + s)] = (k+1)/(n-k) * S(shadow(w))

    where s is uniform over the complement of the sampled S.  The two sides
    are computed by independent code paths.
    """
    n, k = dist.n, dist.k
    if k == 0 or k == n:
        raise DegenerateLevel("single batch needs 0 < k < n")
    probs = {mask: p for mask, p in dist.support}

    def adversary_choice(b_mask: int) -> int:
        best_x = 0
        best_p = Fraction(-1)
        for x in mask_elements(b_mask):
            p = probs.get(b_mask & ~(1 << (x - 1)), Fraction(0))
            if p > best_p:
                best_p = p
                best_x = x
        return best_x

    charged = Fraction(0)
    for a_mask, prob in dist.support:
        for x in range(1, n + 1):
            bit = 1 << (x - 1)
            if a_mask & bit:
                continue
            b_mask = a_mask | bit
            if adversary_choice(b_mask) == x:
                charged += prob
    ratio = charged * (k + 1) / (n - k)

    complement = full_mask(n)
    w = WeightFunction(n, {complement ^ mask: p for mask, p in dist.support})
    shadow_mass = S_of(shadow(w))

    if ratio != Fraction(k + 1, n - k) * shadow_mass:
        raise Infeasible("single-batch identity violated; internal error")
    return SingleBatchAudit(ratio, shadow_mass, dist.entropy())


# ---------------------------------------------------------------------------
# text format: "n m" header, then "p/q mask" rows (masks as unsigned ints)


def format_weight_function(w: WeightFunction) -> str:
    lines = [f"{w.n} {len(w.values)}"]
    for mask in sorted(w.values):
        lines.append(f"{format_fraction(w.values[mask])} {mask}")
    return "\n".join(lines) + "\n"


def parse_weight_function(text: str) -> WeightFunction:
    n, rows = _parse_mask_rows(text)
    return WeightFunction(n, dict(rows))


def format_subset_distribution(dist: SubsetDistribution) -> str:
    lines = [f"{dist.n} {len(dist.support)}"]
    for mask, prob in sorted(dist.support):
        lines.append(f"{format_fraction(prob)} {mask}")
    return "\n".join(lines) + "\n"


def parse_subset_distribution(text: str) -> SubsetDistribution:
    n, rows = _parse_mask_rows(text)
    if not rows:
        raise ParseError("empty subset distribution")
    k = mask_size(rows[0][0])
    try:
        return SubsetDistribution(n, k, tuple(rows))
    except InvalidDistribution as exc:
        raise ParseError(str(exc)) from exc


def _parse_mask_rows(text: str) -> tuple[int, list[tuple[int, Fraction]]]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ParseError(f"bad header: {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} rows, found {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"bad row: {line!r}")
        value = parse_fraction(toks[0])
        try:
            mask = int(toks[1])
        except ValueError as exc:
            raise ParseError(f"bad row: {line!r}") from exc
        rows.append((mask, value))
    return n, rows
