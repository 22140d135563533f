"""Explicit family constructions: the balanced even-split rounding (integral
max flow), the pebble algorithm that rounds a transition graph into a family,
the optimal lcm(1..n) family, and the recursive block-shuffle distribution
with its combined alpha-uniform family.
"""

from __future__ import annotations

import itertools
import math
import random
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .audit import minimal_backwards_alpha
from .core import (
    DEFAULT_ENUM_LIMIT,
    DEFAULT_FAMILY_CAP,
    Permutation,
    PermutationDistribution,
    PermutationFamily,
    full_mask,
    mask_size,
)
from .errors import (
    Infeasible,
    NonIntegerReciprocal,
    OutOfRange,
    PreconditionViolated,
    SizeMismatch,
    TooLarge,
)
from .transition import TransitionGraph, build_transition_graph, graphs_equal, uniform_transition_graph


# ---------------------------------------------------------------------------
# even split via integral max flow


@dataclass(frozen=True)
class EvenSplitInstance:
    """Partition sizes |V_1|..|V_k| and target fractions summing to one."""

    part_sizes: tuple[int, ...]
    deltas: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if any(size < 0 for size in self.part_sizes):
            raise OutOfRange("part sizes must be non-negative")
        if any(d < 0 for d in self.deltas):
            raise OutOfRange("fractions must be non-negative")
        if sum(self.deltas, Fraction(0)) != 1:
            raise OutOfRange("fractions must sum to exactly 1")


def _max_flow(edges: list[list[int]], adj: list[list[int]], source: int, sink: int) -> int:
    """Edmonds-Karp on a residual edge list; deterministic (BFS, insertion order)."""
    total = 0
    num_nodes = len(adj)
    while True:
        parent = [-1] * num_nodes
        parent[source] = -2
        queue = deque([source])
        while queue and parent[sink] == -1:
            u = queue.popleft()
            for ei in adj[u]:
                to, cap = edges[ei]
                if cap > 0 and parent[to] == -1:
                    parent[to] = ei
                    queue.append(to)
        if parent[sink] == -1:
            return total
        bottleneck = None
        v = sink
        while v != source:
            ei = parent[v]
            cap = edges[ei][1]
            bottleneck = cap if bottleneck is None else min(bottleneck, cap)
            v = edges[ei ^ 1][0]
        v = sink
        while v != source:
            ei = parent[v]
            edges[ei][1] -= bottleneck
            edges[ei ^ 1][1] += bottleneck
            v = edges[ei ^ 1][0]
        total += bottleneck


def even_split(instance: EvenSplitInstance) -> list[list[int]]:
    """Integral assignment matrix with per-part floor/ceil brackets and global
    column sums within the floor/ceil bracket of the totals.

    Cell (j, i) holds how many items of part j go to target i; row j sums to
    the part size, cell (j, i) lies in [floor(d_i s_j), ceil(d_i s_j)], and
    column i sums to within [floor(d_i |V|), ceil(d_i |V|)].  Solved by an
    integral maximum flow over the fractional cells, with a first phase that
    pins the column lower bounds.
    """
    sizes = instance.part_sizes
    deltas = instance.deltas
    k, r = len(sizes), len(deltas)
    total_items = sum(sizes)
    floors = [[math.floor(deltas[i] * sizes[j]) for i in range(r)] for j in range(k)]
    alphas = [sizes[j] - sum(floors[j]) for j in range(k)]
    col_floor = [sum(floors[j][i] for j in range(k)) for i in range(r)]
    scaled = [deltas[i] * total_items for i in range(r)]
    betas = [math.ceil(scaled[i]) - col_floor[i] for i in range(r)]
    gammas = [math.floor(scaled[i]) - col_floor[i] for i in range(r)]

    source, sink = 0, k + r + 1
    edges: list[list[int]] = []
    adj: list[list[int]] = [[] for _ in range(k + r + 2)]

    def add(u: int, v: int, cap: int) -> int:
        edges.append([v, cap])
        edges.append([u, 0])
        adj[u].append(len(edges) - 2)
        adj[v].append(len(edges) - 1)
        return len(edges) - 2

    for j in range(k):
        add(source, 1 + j, alphas[j])
    cell_edges: dict[tuple[int, int], int] = {}
    for j in range(k):
        for i in range(r):
            if deltas[i] * sizes[j] != floors[j][i]:
                cell_edges[(j, i)] = add(1 + j, 1 + k + i, 1)
    sink_edges = [add(1 + k + i, sink, gammas[i]) for i in range(r)]

    # Phase 1 pins every column at its global floor; phase 2 relaxes the
    # column capacities to their ceilings and saturates the source.
    flow = _max_flow(edges, adj, source, sink)
    if flow != sum(gammas):
        raise Infeasible("even split: column lower bounds unreachable")
    for i in range(r):
        edges[sink_edges[i]][1] += betas[i] - gammas[i]
    flow += _max_flow(edges, adj, source, sink)
    if flow != sum(alphas):
        raise Infeasible("even split: source not saturated")

    counts = [list(row) for row in floors]
    for (j, i), ei in cell_edges.items():
        counts[j][i] += edges[ei ^ 1][1]
    for j in range(k):
        if sum(counts[j]) != sizes[j]:
            raise Infeasible("even split: row sum mismatch")
    return counts


# ---------------------------------------------------------------------------
# pebble rounding of a transition graph


def graph_extremes(graph: TransitionGraph) -> tuple[Fraction, Fraction, Fraction]:
    """(minimal node weight, minimal edge weight, most probable walk probability)."""
    delta_v = min(graph.node_weight.values())
    delta_e = min(graph.edge_weight.values())
    best: dict[int, Fraction] = {full_mask(graph.n): Fraction(1)}
    for size in range(graph.n, 0, -1):
        for mask in [m for m in best if mask_size(m) == size]:
            here = best[mask]
            for x, w in graph.outgoing(mask):
                child = mask & ~(1 << (x - 1))
                value = here * w
                if value > best.get(child, Fraction(0)):
                    best[child] = value
    return delta_v, delta_e, best[0]


def pebble_t_bounds(graph: TransitionGraph, epsilon: Fraction) -> tuple[Fraction, Fraction]:
    """The pebble count window [8n / (delta_V delta_E eps), 1/p]."""
    epsilon = Fraction(epsilon)
    if not (0 < epsilon <= 1):
        raise OutOfRange("epsilon must be in (0, 1]")
    delta_v, delta_e, max_walk = graph_extremes(graph)
    lower = Fraction(8 * graph.n) / (delta_v * delta_e * epsilon)
    return lower, 1 / max_walk


def pebble_family(
    graph: TransitionGraph,
    t: int,
    epsilon: Fraction = Fraction(1, 2),
    force: bool = False,
) -> PermutationFamily:
    """Round a transition graph into t explicit permutations.

    Pebbles start on the full set and move level by level; at each node they
    are partitioned by the path walked so far and split across the outgoing
    edges with ``even_split``, so every path count stays within the chained
    floor/ceil bracket of t times its walk probability.

    When t * w(S) * w(S, S') is an integer on every edge the resulting family
    reproduces the graph exactly.  ``force=True`` skips the precondition
    checks (integer-reciprocal edges and the t window); the exactness clause
    and the achieved ratios can then be verified directly on the output.
    """
    if t < 1:
        raise OutOfRange("t must be at least 1")
    if not force:
        for (mask, s), w in graph.edge_weight.items():
            if w.numerator != 1:
                raise NonIntegerReciprocal(
                    f"edge ({mask:#x}, {s}) has weight {w} with non-integer reciprocal"
                )
        lower, upper = pebble_t_bounds(graph, epsilon)
        if not (lower <= t <= upper):
            raise PreconditionViolated(
                f"t = {t} outside the admissible window [{lower}, {upper}]"
            )
    groups: dict[int, dict[tuple[int, ...], int]] = {full_mask(graph.n): {(): t}}
    for _size in range(graph.n, 0, -1):
        next_groups: dict[int, dict[tuple[int, ...], int]] = {}
        for mask in sorted(groups):
            node_groups = groups[mask]
            paths = sorted(node_groups)
            targets = graph.outgoing(mask)
            instance = EvenSplitInstance(
                tuple(node_groups[path] for path in paths),
                tuple(w for _, w in targets),
            )
            counts = even_split(instance)
            for j, path in enumerate(paths):
                for i, (x, _) in enumerate(targets):
                    moved = counts[j][i]
                    if moved:
                        child = mask & ~(1 << (x - 1))
                        bucket = next_groups.setdefault(child, {})
                        key = path + (x,)
                        bucket[key] = bucket.get(key, 0) + moved
        groups = next_groups
    members: list[Permutation] = []
    for path, count in groups.get(0, {}).items():
        members.extend([Permutation(tuple(reversed(path)))] * count)
    members.sort(key=lambda perm: perm.order)
    return PermutationFamily(graph.n, tuple(members))


# ---------------------------------------------------------------------------
# the optimal exact family


def lcm_family(n: int, cap: int = DEFAULT_FAMILY_CAP) -> PermutationFamily:
    """The size-lcm(1..n) family whose uniform distribution has the uniform
    transition graph (hence is exact minwise and exact backwards uniform).

    The pebble window precondition is skipped: exactness needs only the
    integrality of t * w(S) * w(S, S'), which lcm(1..n) provides on every
    edge of the uniform graph.
    """
    if n < 1:
        raise OutOfRange("n must be at least 1")
    t = math.lcm(*range(1, n + 1))
    if t > cap:
        raise TooLarge(f"lcm(1..{n}) = {t} exceeds family cap {cap}")
    graph = uniform_transition_graph(n)
    return pebble_family(graph, t, epsilon=Fraction(1), force=True)


@dataclass(frozen=True)
class LcmCheck:
    a: int  # lcm over k of binom(n, k) * k
    b: int  # lcm(1..n)
    equal: bool


def lcm_check(n: int) -> LcmCheck:
    """Verify lcm_k (binom(n,k) * k) = lcm(1..n) with exact integers."""
    if n < 1:
        raise OutOfRange("n must be at least 1")
    a = math.lcm(*(math.comb(n, k) * k for k in range(1, n + 1)))
    b = math.lcm(*range(1, n + 1))
    return LcmCheck(a, b, a == b)


# ---------------------------------------------------------------------------
# the recursive block-shuffle distribution


@dataclass(frozen=True)
class DkParams:
    """Recursion depth k and block parameter t; the ground set has 2^k * t elements."""

    k: int
    t: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.t < 1:
            raise OutOfRange("k and t must be at least 1")

    @property
    def size(self) -> int:
        return (1 << self.k) * self.t


def _dk_walk(k: int, t: int, elems: list[int], rng: random.Random) -> list[int]:
    if k == 1:
        out = list(elems)
        rng.shuffle(out)
        return out
    half = len(elems) // 2
    left = _dk_walk(k - 1, t, elems[:half], rng)
    right = _dk_walk(k - 1, t, elems[half:], rng)
    tail = left[-t:] + right[-t:]
    rng.shuffle(tail)
    return left[: half - t] + right[: half - t] + tail


def dk_sample(params: DkParams, ground: Sequence[int], seed: int) -> tuple[int, ...]:
    """One sample of the recursive distribution over an arbitrary ground set.

    The ground set is handled by ordering its elements ascending and applying
    the recursion to ranks, so only the relative order of elements matters.
    Identical seeds yield identical outputs.
    """
    elems = sorted(ground)
    if len(elems) != params.size or len(set(elems)) != len(elems):
        raise SizeMismatch(
            f"ground set must have exactly {params.size} distinct elements"
        )
    rng = random.Random(seed)
    return tuple(_dk_walk(params.k, params.t, elems, rng))


def _dk_exact(k: int, t: int, elems: tuple[int, ...]) -> dict[tuple[int, ...], Fraction]:
    if k == 1:
        prob = Fraction(1, math.factorial(len(elems)))
        return {perm: prob for perm in itertools.permutations(elems)}
    half = len(elems) // 2
    left = _dk_exact(k - 1, t, elems[:half])
    right = _dk_exact(k - 1, t, elems[half:])
    shuffle_prob = Fraction(1, math.factorial(2 * t))
    out: dict[tuple[int, ...], Fraction] = {}
    for p0, pr0 in left.items():
        head0 = p0[: half - t]
        for p1, pr1 in right.items():
            base = pr0 * pr1 * shuffle_prob
            body = head0 + p1[: half - t]
            for tail in itertools.permutations(p0[half - t :] + p1[half - t :]):
                order = body + tail
                out[order] = out.get(order, Fraction(0)) + base
    return out


def dk_distribution(params: DkParams, limit: int = DEFAULT_ENUM_LIMIT) -> PermutationDistribution:
    """The exact distribution of the recursive algorithm over [2^k * t]."""
    size = params.size
    if size > limit:
        raise TooLarge(f"ground size {size} exceeds explicit limit {limit}")
    table = _dk_exact(params.k, params.t, tuple(range(1, size + 1)))
    support = tuple(
        (Permutation(order), prob) for order, prob in sorted(table.items())
    )
    return PermutationDistribution(size, support)


# ---------------------------------------------------------------------------
# combined alpha-uniform family


def _next_power_of_two(x: int) -> int:
    return 1 << (x - 1).bit_length()


@dataclass(frozen=True)
class AlphaUniformResult:
    family: PermutationFamily
    achieved_alpha: Fraction
    n: int
    alpha: int
    k: int
    t: int
    notes: tuple[str, ...]


def alpha_uniform_family(
    n: int,
    alpha: int,
    epsilon: Fraction = Fraction(1, 2),
    family_cap: int = DEFAULT_FAMILY_CAP,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> AlphaUniformResult:
    """Build a family targeting backwards alpha-uniformity from the recursive
    distribution with k = lg(alpha) and t = n / alpha, rounded exactly by
    pebbling; the achieved alpha of the output is audited and reported.

    n and alpha are rounded up to powers of two (with a warning) when needed.
    """
    if n < 2 or alpha < 2:
        raise OutOfRange("n and alpha must be at least 2")
    notes: list[str] = []
    n2 = _next_power_of_two(n)
    a2 = _next_power_of_two(alpha)
    if n2 != n:
        notes.append(f"n rounded up to the power of two {n2}")
    if a2 != alpha:
        notes.append(f"alpha rounded up to the power of two {a2}")
    for note in notes:
        warnings.warn(note, stacklevel=2)
    if a2 > n2:
        raise PreconditionViolated(f"alpha = {a2} exceeds n = {n2}")
    k = a2.bit_length() - 1
    t = n2 // a2
    if k == 1:
        # Depth-one recursion is the uniform distribution over S_n, so the
        # exact rounding is the lcm family.
        family = lcm_family(n2, cap=family_cap)
        target = uniform_transition_graph(n2)
    else:
        dist = dk_distribution(DkParams(k, t), limit=enum_limit)
        target = build_transition_graph(dist)
        pebbles = math.lcm(
            *(
                (graph_w * edge_w).denominator
                for (mask, _s), edge_w in target.edge_weight.items()
                for graph_w in (target.node_weight[mask],)
            )
        )
        if pebbles > family_cap:
            raise TooLarge(f"exact pebble count {pebbles} exceeds cap {family_cap}")
        family = pebble_family(target, pebbles, epsilon=epsilon, force=True)
    achieved_graph = build_transition_graph(family.as_distribution())
    if not graphs_equal(achieved_graph, target):
        raise Infeasible("exact pebbling failed to reproduce the target graph")
    achieved = minimal_backwards_alpha(achieved_graph)
    return AlphaUniformResult(family, achieved, n2, a2, k, t, tuple(notes))
