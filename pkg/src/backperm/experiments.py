"""Empirical harnesses: quicksort comparison counts, the single-batch
minimum-spanning-forest filter, and a generic incremental-cost driver.

Trials draw their randomness from per-trial derived seeds, so runs are
reproducible and trials could be evaluated in any order.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

from .core import (
    CostFunction,
    Permutation,
    PermutationFamily,
    parse_fraction,
    total_cost,
)
from .errors import DuplicateWeights, OutOfRange, ParseError


@dataclass(frozen=True)
class ExperimentResult:
    trials: int
    mean: float
    variance: float
    seed: int
    source: str
    values: tuple[float, ...] = field(repr=False, default=())
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "mean": self.mean,
            "variance": self.variance,
            "seed": self.seed,
            "source": self.source,
            "extra": self.extra,
        }


def _trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def _mean_variance(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    variance = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, variance


# ---------------------------------------------------------------------------
# permutation sources


class PermutationSource(Protocol):
    def sample(self, rng: random.Random) -> Permutation: ...

    def describe(self) -> str: ...


class UniformSource:
    def __init__(self, n: int):
        self.n = n

    def sample(self, rng: random.Random) -> Permutation:
        order = list(range(1, self.n + 1))
        rng.shuffle(order)
        return Permutation(tuple(order))

    def describe(self) -> str:
        return f"uniform(n={self.n})"


class FamilySource:
    """Uniform over the members of an explicit family."""

    def __init__(self, family: PermutationFamily):
        self.family = family

    def sample(self, rng: random.Random) -> Permutation:
        return self.family.members[rng.randrange(self.family.t)]

    def describe(self) -> str:
        return f"family(n={self.family.n}, t={self.family.t})"


class FixedSource:
    def __init__(self, perm: Permutation):
        self.perm = perm

    def sample(self, rng: random.Random) -> Permutation:
        return self.perm

    def describe(self) -> str:
        return f"fixed({','.join(str(x) for x in self.perm.order)})"


# ---------------------------------------------------------------------------
# quicksort comparisons


def comparisons_by_pair_rule(perm: Permutation) -> int:
    """Comparison count via the pair rule: x and y are compared exactly when
    one of them precedes, in the permutation, every key strictly between them."""
    n = perm.n
    pos = [0] * (n + 1)
    for index, x in enumerate(perm.order):
        pos[x] = index
    count = 0
    for x in range(1, n):
        run_min = pos[x]
        for y in range(x + 1, n + 1):
            run_min = min(run_min, pos[y])
            if run_min == pos[x] or run_min == pos[y]:
                count += 1
    return count


def comparisons_by_quicksort(perm: Permutation) -> int:
    """Comparison count from an instrumented quicksort whose pivots are taken
    in permutation order (first-inserted key of each segment pivots it)."""
    n = perm.n
    pos = [0] * (n + 1)
    for index, x in enumerate(perm.order):
        pos[x] = index
    count = 0
    stack = [list(range(1, n + 1))]
    while stack:
        segment = stack.pop()
        if len(segment) < 2:
            continue
        pivot = min(segment, key=lambda key: pos[key])
        count += len(segment) - 1
        stack.append([key for key in segment if key < pivot])
        stack.append([key for key in segment if key > pivot])
    return count


def expected_uniform_comparisons(n: int) -> Fraction:
    """Exact expected comparisons under a uniform pivot order: 2(n+1)H_n - 4n."""
    harmonic = sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))
    return 2 * (n + 1) * harmonic - 4 * n


def quicksort_comparisons(
    source: PermutationSource, n: int, trials: int, seed: int
) -> ExperimentResult:
    """Sample comparison counts of quicksort with pivots from the source."""
    if trials < 1:
        raise OutOfRange("trials must be at least 1")
    values = []
    for trial in range(trials):
        perm = source.sample(_trial_rng(seed, trial))
        if perm.n != n:
            raise OutOfRange(f"source yielded a permutation over [{perm.n}], not [{n}]")
        values.append(float(comparisons_by_pair_rule(perm)))
    mean, variance = _mean_variance(values)
    return ExperimentResult(trials, mean, variance, seed, source.describe(), tuple(values))


# ---------------------------------------------------------------------------
# weighted graphs and the single-batch MST filter


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with pairwise-distinct edge weights."""

    n: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self) -> None:
        weights = set()
        for u, v, w in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n) or u == v:
                raise OutOfRange(f"bad edge ({u}, {v})")
            if w in weights:
                raise DuplicateWeights(f"edge weight {w} repeated")
            weights.add(w)

    @property
    def m(self) -> int:
        return len(self.edges)


def complete_graph(n: int, seed: int) -> WeightedGraph:
    """K_n with distinct random integer weights (a seeded shuffle of 1..m)."""
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    weights = list(range(1, len(pairs) + 1))
    random.Random(seed).shuffle(weights)
    edges = tuple(
        (u, v, Fraction(w)) for (u, v), w in zip(pairs, weights)
    )
    return WeightedGraph(n, edges)


def parse_weighted_graph(text: str) -> WeightedGraph:
    """Edge-list text: "n m" header then "u v w" rows."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty graph file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ParseError(f"bad graph header: {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} edges, found {len(lines) - 1}")
    edges = []
    for line in lines[1:]:
        toks = line.split()
        if len(toks) != 3:
            raise ParseError(f"bad edge row: {line!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError as exc:
            raise ParseError(f"bad edge row: {line!r}") from exc
        edges.append((u, v, parse_fraction(toks[2])))
    return WeightedGraph(n, tuple(edges))


def format_weighted_graph(graph: WeightedGraph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    for u, v, w in graph.edges:
        token = str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"
        lines.append(f"{u} {v} {token}")
    return "\n".join(lines) + "\n"


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n + 1))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def minimum_spanning_forest(graph: WeightedGraph, edge_ids: Iterable[int]) -> list[int]:
    """Kruskal on a subset of edge indices; returns forest edge indices."""
    ids = sorted(edge_ids, key=lambda i: graph.edges[i][2])
    uf = _UnionFind(graph.n)
    forest = []
    for i in ids:
        u, v, _ = graph.edges[i]
        if uf.union(u, v):
            forest.append(i)
    return forest


def _forest_path_max(
    graph: WeightedGraph, forest: Sequence[int], start: int, goal: int
) -> Fraction | None:
    """Largest edge weight on the forest path start..goal, or None if disconnected."""
    adjacency: dict[int, list[tuple[int, Fraction]]] = {}
    for i in forest:
        u, v, w = graph.edges[i]
        adjacency.setdefault(u, []).append((v, w))
        adjacency.setdefault(v, []).append((u, w))
    best: dict[int, Fraction] = {start: Fraction(0)}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for neighbor, w in adjacency.get(node, ()):
            if neighbor not in best:
                best[neighbor] = max(best[node], w)
                frontier.append(neighbor)
    return best.get(goal)


def is_f_light(graph: WeightedGraph, forest: Sequence[int], edge_id: int) -> bool:
    """An edge is F-light unless the forest connects its endpoints by a path
    with no heavier edge."""
    u, v, w = graph.edges[edge_id]
    path_max = _forest_path_max(graph, forest, u, v)
    return path_max is None or path_max > w


class UniformSubsetSampler:
    """Uniform size-k subsets of the edge index range."""

    def __init__(self, m: int, size: int):
        if not 0 <= size <= m:
            raise OutOfRange(f"sample size {size} outside [0, {m}]")
        self.m = m
        self.size = size

    def sample(self, rng: random.Random) -> frozenset[int]:
        return frozenset(rng.sample(range(self.m), self.size))

    def describe(self) -> str:
        return f"uniform-subsets(m={self.m}, size={self.size})"


def kkt_single_batch(
    graph: WeightedGraph,
    p: Fraction,
    sampler: UniformSubsetSampler | None,
    trials: int,
    seed: int,
) -> ExperimentResult:
    """Sample S of size p*m, build its minimum spanning forest F, and count
    the edges that survive the F-heavy filter (F plus the F-light rest).

    The summary records both normalizations: the remaining-edge count against
    the n/p bound, and the per-element light rate among non-sampled edges.
    """
    if trials < 1:
        raise OutOfRange("trials must be at least 1")
    p = Fraction(p)
    if not 0 < p < 1:
        raise OutOfRange("p must be in (0, 1)")
    scaled = p * graph.m
    size = math.floor(scaled)
    if scaled != size:
        warnings.warn(f"p*m = {scaled} not integral; sampling {size} edges", stacklevel=2)
    if sampler is None:
        sampler = UniformSubsetSampler(graph.m, size)
    values = []
    light_rates = []
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        sampled = sampler.sample(rng)
        forest = minimum_spanning_forest(graph, sampled)
        light = sum(
            1
            for i in range(graph.m)
            if i not in sampled and is_f_light(graph, forest, i)
        )
        values.append(float(len(forest) + light))
        outside = graph.m - len(sampled)
        light_rates.append(light / outside if outside else 0.0)
    mean, variance = _mean_variance(values)
    extra = {
        "bound_n_over_p": float(Fraction(graph.n) / p),
        "mean_light_rate": sum(light_rates) / trials,
        "sample_size": size,
    }
    return ExperimentResult(
        trials, mean, variance, seed, sampler.describe(), tuple(values), extra
    )


# ---------------------------------------------------------------------------
# generic incremental-cost driver


def incremental_cost_experiment(
    source: PermutationSource, c: CostFunction, n: int, trials: int, seed: int
) -> ExperimentResult:
    """Mean total cost of permutations drawn from the source."""
    if trials < 1:
        raise OutOfRange("trials must be at least 1")
    values = []
    for trial in range(trials):
        perm = source.sample(_trial_rng(seed, trial))
        if perm.n != n:
            raise OutOfRange(f"source yielded a permutation over [{perm.n}], not [{n}]")
        values.append(float(total_cost(c, perm)))
    mean, variance = _mean_variance(values)
    return ExperimentResult(trials, mean, variance, seed, source.describe(), tuple(values))
