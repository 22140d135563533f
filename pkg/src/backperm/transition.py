"""Transition graphs on the subset lattice.

The transition graph of a permutation distribution stores, for every prefix
set S with positive probability, the node weight ``w(S) = Pr[pi([|S|]) = S]``
and, for each s in S, the edge weight
``w(S, S \\ {s}) = Pr[pi(|S|) = s | pi([|S|]) = S]``.

Graphs are stored sparsely: only positive-weight nodes and edges are kept.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    DEFAULT_LATTICE_CAP,
    DEFAULT_SUPPORT_CAP,
    Permutation,
    PermutationDistribution,
    format_fraction,
    full_mask,
    mask_elements,
    mask_size,
    parse_fraction,
)
from .errors import DimensionMismatch, InvalidGraph, OutOfRange, TooLarge


@dataclass(frozen=True)
class TransitionGraph:
    """Sparse node/edge weights of a distribution on the subset lattice of [n].

    ``node_weight`` maps mask -> w(S) for positive-support S (always including
    the full set and the empty set, both weight 1).  ``edge_weight`` maps
    ``(mask, s)`` -> w(S, S \\ {s}) for positive edges only.
    """

    n: int
    node_weight: dict[int, Fraction]
    edge_weight: dict[tuple[int, int], Fraction]

    def weight(self, mask: int) -> Fraction:
        return self.node_weight.get(mask, Fraction(0))

    def edge(self, mask: int, element: int) -> Fraction:
        return self.edge_weight.get((mask, element), Fraction(0))

    def outgoing(self, mask: int) -> list[tuple[int, Fraction]]:
        """Positive edges out of a node, elements ascending."""
        out = []
        for x in mask_elements(mask):
            w = self.edge_weight.get((mask, x))
            if w is not None:
                out.append((x, w))
        return out

    def nodes_by_size(self) -> dict[int, list[int]]:
        """Positive-support masks grouped by subset size."""
        levels: dict[int, list[int]] = {}
        for mask in self.node_weight:
            levels.setdefault(mask_size(mask), []).append(mask)
        for masks in levels.values():
            masks.sort()
        return levels

    def validate(self) -> None:
        """Check all structural invariants; raise InvalidGraph on violation."""
        full = full_mask(self.n)
        if self.node_weight.get(full) != 1:
            raise InvalidGraph("full-set node must have weight 1")
        if self.node_weight.get(0) != 1:
            raise InvalidGraph("empty-set node must have weight 1")
        for mask, w in self.node_weight.items():
            if mask & ~full:
                raise InvalidGraph(f"node {mask:#x} outside the lattice of [{self.n}]")
            if not (0 < w <= 1):
                raise InvalidGraph(f"node weight {w} outside (0, 1]")
        for (mask, s), w in self.edge_weight.items():
            if mask not in self.node_weight:
                raise InvalidGraph("edge out of a zero-weight node")
            if not (mask >> (s - 1)) & 1:
                raise InvalidGraph(f"edge drops {s}, not a member of its node")
            if not (0 < w <= 1):
                raise InvalidGraph(f"edge weight {w} outside (0, 1]")
        for mask in self.node_weight:
            if mask == 0:
                continue
            total = sum((w for _, w in self.outgoing(mask)), Fraction(0))
            if total != 1:
                raise InvalidGraph(
                    f"outgoing weights of node {mask:#x} sum to {total}, not 1"
                )
        # Node weights must be consistent with the incoming edge weights.
        for mask, w in self.node_weight.items():
            if mask == full:
                continue
            incoming = Fraction(0)
            for x in range(1, self.n + 1):
                bit = 1 << (x - 1)
                if mask & bit:
                    continue
                parent = mask | bit
                pw = self.node_weight.get(parent)
                if pw is None:
                    continue
                ew = self.edge_weight.get((parent, x))
                if ew is not None:
                    incoming += pw * ew
            if incoming != w:
                raise InvalidGraph(
                    f"node {mask:#x} has weight {w} but incoming mass {incoming}"
                )


def build_transition_graph(dist: PermutationDistribution) -> TransitionGraph:
    """Transition graph of an explicit distribution."""
    node: dict[int, Fraction] = {0: Fraction(1)}
    joint: dict[tuple[int, int], Fraction] = {}
    for perm, prob in dist.support:
        mask = 0
        for x in perm.order:
            mask |= 1 << (x - 1)
            node[mask] = node.get(mask, Fraction(0)) + prob
            key = (mask, x)
            joint[key] = joint.get(key, Fraction(0)) + prob
    edge = {key: p / node[key[0]] for key, p in joint.items()}
    return TransitionGraph(dist.n, node, edge)


def uniform_transition_graph(n: int, cap: int = DEFAULT_LATTICE_CAP) -> TransitionGraph:
    """The transition graph of U(S_n), built analytically (no enumeration of S_n)."""
    if n < 1:
        raise OutOfRange("n must be at least 1")
    if n > cap:
        raise TooLarge(f"n = {n} exceeds lattice cap {cap}")
    node: dict[int, Fraction] = {}
    edge: dict[tuple[int, int], Fraction] = {}
    level_weight = [Fraction(1, math.comb(n, k)) for k in range(n + 1)]
    drop_weight = [None] + [Fraction(1, k) for k in range(1, n + 1)]
    for mask in range(1 << n):
        k = mask.bit_count()
        node[mask] = level_weight[k]
        if k:
            w = drop_weight[k]
            for x in mask_elements(mask):
                edge[(mask, x)] = w
    return TransitionGraph(n, node, edge)


def memoryless_distribution(
    graph: TransitionGraph, support_cap: int = DEFAULT_SUPPORT_CAP
) -> PermutationDistribution:
    """The distribution of independent backwards random walks on the graph.

    Distinct walks yield distinct permutations, and each permutation's
    probability is the product of the edge weights along its walk.
    """
    support: list[tuple[Permutation, Fraction]] = []
    stack: list[tuple[int, Fraction, tuple[int, ...]]] = [
        (full_mask(graph.n), Fraction(1), ())
    ]
    while stack:
        mask, prob, drops = stack.pop()
        if mask == 0:
            support.append((Permutation(drops[::-1]), prob))
            if len(support) > support_cap:
                raise TooLarge(f"memoryless support exceeds cap {support_cap}")
            continue
        for x, w in graph.outgoing(mask):
            stack.append((mask & ~(1 << (x - 1)), prob * w, drops + (x,)))
    support.sort(key=lambda pair: pair[0].order)
    return PermutationDistribution(graph.n, tuple(support))


class MemorylessSampler:
    """Seeded sampler of the memoryless distribution of a graph.

    Each sampler owns its generator state; identical seeds yield identical
    permutation streams.  Transition choices are made with exact integer
    thresholds so the sampling distribution is exactly memoryless.
    """

    def __init__(self, graph: TransitionGraph, seed: int):
        self.graph = graph
        self.seed = seed
        self._rng = random.Random(seed)
        self._tables: dict[int, tuple[int, list[tuple[int, int]]]] = {}

    def _table(self, mask: int) -> tuple[int, list[tuple[int, int]]]:
        cached = self._tables.get(mask)
        if cached is not None:
            return cached
        out = self.graph.outgoing(mask)
        denom = math.lcm(*(w.denominator for _, w in out))
        cum = 0
        rows = []
        for x, w in out:
            cum += int(w * denom)
            rows.append((x, cum))
        table = (denom, rows)
        self._tables[mask] = table
        return table

    def sample(self) -> Permutation:
        mask = full_mask(self.graph.n)
        drops = []
        while mask:
            denom, rows = self._table(mask)
            r = self._rng.randrange(denom)
            for x, cum in rows:
                if r < cum:
                    drops.append(x)
                    mask &= ~(1 << (x - 1))
                    break
        return Permutation(tuple(reversed(drops)))


def sample_memoryless(graph: TransitionGraph, seed: int) -> Permutation:
    """One walk of the memoryless distribution, deterministic in the seed."""
    return MemorylessSampler(graph, seed).sample()


def graphs_equal(g1: TransitionGraph, g2: TransitionGraph) -> bool:
    """Exact equality of positive-support node and edge weight maps."""
    if g1.n != g2.n:
        raise DimensionMismatch(f"graphs over [{g1.n}] and [{g2.n}]")
    return g1.node_weight == g2.node_weight and g1.edge_weight == g2.edge_weight


# ---------------------------------------------------------------------------
# JSON form: masks as unsigned integers, weights as "p/q"


def graph_to_json(graph: TransitionGraph) -> dict:
    return {
        "n": graph.n,
        "nodes": [
            {"mask": mask, "weight": format_fraction(w)}
            for mask, w in sorted(graph.node_weight.items())
        ],
        "edges": [
            {"mask": mask, "drop": s, "weight": format_fraction(w)}
            for (mask, s), w in sorted(graph.edge_weight.items())
        ],
    }


def graph_from_json(data: dict) -> TransitionGraph:
    n = int(data["n"])
    node = {int(row["mask"]): parse_fraction(row["weight"]) for row in data["nodes"]}
    edge = {
        (int(row["mask"]), int(row["drop"])): parse_fraction(row["weight"])
        for row in data["edges"]
    }
    graph = TransitionGraph(n, node, edge)
    graph.validate()
    return graph


def graph_dumps(graph: TransitionGraph) -> str:
    return json.dumps(graph_to_json(graph), sort_keys=True)


def graph_loads(text: str) -> TransitionGraph:
    return graph_from_json(json.loads(text))
