"""Brute-force ground truth by direct support enumeration.

These oracles deliberately share no code with the graph-based audit paths, so
agreement tests between the two are meaningful.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import CostFunction, PermutationDistribution, mask_size, total_cost
from .errors import ElementNotInSet


def _require_member(y_mask: int, x: int) -> None:
    if not (y_mask >> (x - 1)) & 1:
        raise ElementNotInSet(f"element {x} not in the queried set")


def brute_minwise(dist: PermutationDistribution, y_mask: int, x: int) -> Fraction:
    """Pr[x appears before every other member of Y], by enumeration."""
    _require_member(y_mask, x)
    total = Fraction(0)
    for perm, prob in dist.support:
        for value in perm.order:
            if (y_mask >> (value - 1)) & 1:
                if value == x:
                    total += prob
                break
    return total


def brute_maxwise(dist: PermutationDistribution, y_mask: int, x: int) -> Fraction:
    """Pr[x appears after every other member of Y], by enumeration."""
    _require_member(y_mask, x)
    total = Fraction(0)
    for perm, prob in dist.support:
        for value in reversed(perm.order):
            if (y_mask >> (value - 1)) & 1:
                if value == x:
                    total += prob
                break
    return total


def brute_conditional_last(
    dist: PermutationDistribution, y_mask: int, x: int
) -> Fraction | None:
    """Pr[pi(|Y|) = x | pi([|Y|]) = Y], or None when Y has zero support."""
    _require_member(y_mask, x)
    k = mask_size(y_mask)
    hit = Fraction(0)
    joint = Fraction(0)
    for perm, prob in dist.support:
        mask = 0
        for value in perm.order[:k]:
            mask |= 1 << (value - 1)
        if mask == y_mask:
            hit += prob
            if perm.order[k - 1] == x:
                joint += prob
    if hit == 0:
        return None
    return joint / hit


def brute_expected_cost(dist: PermutationDistribution, c: CostFunction) -> Fraction:
    """Exact expected total cost over the support."""
    return sum(
        (prob * total_cost(c, perm) for perm, prob in dist.support), Fraction(0)
    )


def exact_entropy(dist: PermutationDistribution) -> float:
    """Entropy of the distribution in nats."""
    return -sum(float(p) * math.log(p) for _, p in dist.support) + 0.0
