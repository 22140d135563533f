"""Shared corpus of test distributions and graphs."""

from __future__ import annotations

import random
from fractions import Fraction

from backperm.core import (
    PermutationDistribution,
    distribution_from_pairs,
    uniform_distribution,
)
from backperm.transition import TransitionGraph


def rotation_distribution(n: int) -> PermutationDistribution:
    """Uniform over the n cyclic rotations of (1, ..., n)."""
    base = list(range(1, n + 1))
    pairs = [(base[r:] + base[:r], Fraction(1, n)) for r in range(n)]
    return distribution_from_pairs(n, pairs)


def point_mass(order: list[int]) -> PermutationDistribution:
    return distribution_from_pairs(len(order), [(order, Fraction(1))])


def random_distribution(
    n: int, max_support: int, rng: random.Random
) -> PermutationDistribution:
    """Random support of distinct permutations with random rational weights."""
    target = rng.randint(1, max_support)
    perms: set[tuple[int, ...]] = set()
    while len(perms) < target:
        order = list(range(1, n + 1))
        rng.shuffle(order)
        perms.add(tuple(order))
    weights = [rng.randint(1, 100) for _ in perms]
    total = sum(weights)
    return distribution_from_pairs(
        n,
        [(list(order), Fraction(w, total)) for order, w in zip(sorted(perms), weights)],
    )


def two_branching_level_graph() -> TransitionGraph:
    """n = 3 graph with branching at both non-trivial levels; top edges are
    (1/2, 1/4, 1/4), size-2 nodes split evenly.  All edge reciprocals are
    integers, so it is pebbleable."""
    F = Fraction
    node = {
        0b111: F(1),
        0b110: F(1, 2),
        0b101: F(1, 4),
        0b011: F(1, 4),
        0b100: F(3, 8),
        0b010: F(3, 8),
        0b001: F(1, 4),
        0: F(1),
    }
    edge = {
        (0b111, 1): F(1, 2),
        (0b111, 2): F(1, 4),
        (0b111, 3): F(1, 4),
        (0b110, 2): F(1, 2),
        (0b110, 3): F(1, 2),
        (0b101, 1): F(1, 2),
        (0b101, 3): F(1, 2),
        (0b011, 1): F(1, 2),
        (0b011, 2): F(1, 2),
        (0b100, 3): F(1),
        (0b010, 2): F(1),
        (0b001, 1): F(1),
    }
    graph = TransitionGraph(3, node, edge)
    graph.validate()
    return graph


def named_corpus() -> list[tuple[str, PermutationDistribution]]:
    """Small named distributions exercised by the agreement and certificate
    suites (all n <= 6)."""
    from backperm.construct import DkParams, dk_distribution, lcm_family

    corpus: list[tuple[str, PermutationDistribution]] = []
    for n in range(1, 6):
        corpus.append((f"uniform-{n}", uniform_distribution(n)))
    corpus.append(("uniform-6", uniform_distribution(6)))
    corpus.append(("point-1", point_mass([1])))
    corpus.append(("point-123", point_mass([1, 2, 3])))
    corpus.append(("point-312", point_mass([3, 1, 2])))
    corpus.append(("point-6", point_mass([2, 4, 6, 1, 3, 5])))
    for n in (2, 3, 4, 5, 6):
        corpus.append((f"rotations-{n}", rotation_distribution(n)))
    for n in (2, 3, 4, 5, 6):
        corpus.append((f"lcm-{n}", lcm_family(n).as_distribution()))
    corpus.append(("dk-1-1", dk_distribution(DkParams(1, 1))))
    corpus.append(("dk-1-2", dk_distribution(DkParams(1, 2))))
    corpus.append(("dk-2-1", dk_distribution(DkParams(2, 1))))
    return corpus
