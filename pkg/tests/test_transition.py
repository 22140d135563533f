import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from conftest import named_corpus, point_mass, random_distribution, rotation_distribution
from backperm.core import make_permutation, uniform_distribution
from backperm.errors import DimensionMismatch, InvalidGraph, TooLarge
from backperm.oracle import exact_entropy
from backperm.transition import (
    MemorylessSampler,
    build_transition_graph,
    graph_dumps,
    graph_loads,
    graphs_equal,
    memoryless_distribution,
    sample_memoryless,
    uniform_transition_graph,
)

F = Fraction


def test_point_mass_graph():
    g = build_transition_graph(point_mass([1, 2, 3]))
    assert g.weight(0b001) == 1
    assert g.weight(0b011) == 1
    assert g.edge(0b011, 2) == 1
    g.validate()


def test_uniform_graph_from_enumeration():
    g = build_transition_graph(uniform_distribution(3))
    assert g.weight(0b011) == F(1, 3)
    assert g.edge(0b011, 1) == F(1, 2)
    g.validate()


def test_rotation_graph():
    g = build_transition_graph(rotation_distribution(3))
    for mask in (0b011, 0b110, 0b101):
        assert g.weight(mask) == F(1, 3)
    assert g.edge(0b011, 2) == 1  # element 2 is always last in {1, 2}
    g.validate()


def test_uniform_transition_graph_values():
    g = uniform_transition_graph(2)
    assert sorted(g.node_weight) == [0b00, 0b01, 0b10, 0b11]
    assert g.weight(0b01) == F(1, 2)
    assert g.edge(0b11, 1) == F(1, 2)
    g3 = uniform_transition_graph(3)
    assert g3.weight(0b010) == F(1, 3)


def test_uniform_transition_graph_matches_enumeration():
    for n in (1, 2, 3, 4, 5):
        analytic = uniform_transition_graph(n)
        from_support = build_transition_graph(uniform_distribution(n))
        assert graphs_equal(analytic, from_support)


def test_uniform_transition_graph_cap():
    with pytest.raises(TooLarge):
        uniform_transition_graph(25)


def test_memoryless_uniform():
    dist = memoryless_distribution(uniform_transition_graph(3))
    assert len(dist.support) == 6
    assert all(p == F(1, 6) for _, p in dist.support)


def test_memoryless_point_mass_and_rotations():
    for base in (point_mass([2, 1, 3]), rotation_distribution(3)):
        g = build_transition_graph(base)
        again = memoryless_distribution(g)
        assert sorted((p.order, pr) for p, pr in again.support) == sorted(
            (p.order, pr) for p, pr in base.support
        )


def test_memoryless_probability_is_walk_product():
    rng = random.Random(3)
    for _ in range(10):
        g = build_transition_graph(random_distribution(5, 12, rng))
        dist = memoryless_distribution(g)
        for perm, prob in dist.support:
            mask = (1 << 5) - 1
            product = F(1)
            for x in reversed(perm.order):
                product *= g.edge(mask, x)
                mask &= ~(1 << (x - 1))
            assert product == prob


def test_graph_roundtrip_through_memoryless():
    rng = random.Random(4)
    for _ in range(15):
        g = build_transition_graph(random_distribution(5, 15, rng))
        g2 = build_transition_graph(memoryless_distribution(g))
        assert graphs_equal(g, g2)


def test_memoryless_maximizes_entropy():
    rng = random.Random(5)
    for _ in range(15):
        dist = random_distribution(5, 15, rng)
        g = build_transition_graph(dist)
        assert exact_entropy(memoryless_distribution(g)) >= exact_entropy(dist) - 1e-9


def test_sampler_determinism():
    g = uniform_transition_graph(6)
    assert sample_memoryless(g, 123).order == sample_memoryless(g, 123).order
    assert sample_memoryless(build_transition_graph(point_mass([3, 1, 2])), 99).order == (3, 1, 2)


def test_sampler_prefix_frequencies():
    # empirical prefix-set frequencies of G^U_8 within 4 sigma of 1/C(8, k)
    g = uniform_transition_graph(8)
    sampler = MemorylessSampler(g, seed=2024)
    trials = 100_000
    counts: dict[int, Counter] = {2: Counter(), 4: Counter(), 6: Counter()}
    for _ in range(trials):
        masks = sampler.sample().prefix_masks()
        for k in counts:
            counts[k][masks[k]] += 1
    for k, counter in counts.items():
        p = 1 / math.comb(8, k)
        sigma = math.sqrt(trials * p * (1 - p))
        assert len(counter) == math.comb(8, k)
        for count in counter.values():
            assert abs(count - trials * p) <= 4 * sigma


def test_graphs_equal_and_mismatch():
    g3 = uniform_transition_graph(3)
    assert graphs_equal(g3, uniform_transition_graph(3))
    assert not graphs_equal(g3, build_transition_graph(rotation_distribution(3)))
    with pytest.raises(DimensionMismatch):
        graphs_equal(g3, uniform_transition_graph(4))


def test_json_round_trip():
    for dist in (rotation_distribution(4), uniform_distribution(3)):
        g = build_transition_graph(dist)
        again = graph_loads(graph_dumps(g))
        assert graphs_equal(g, again)


def test_validate_rejects_bad_graphs():
    g = uniform_transition_graph(2)
    broken = type(g)(2, dict(g.node_weight), dict(g.edge_weight))
    broken.edge_weight[(0b11, 1)] = F(2, 3)
    with pytest.raises(InvalidGraph):
        broken.validate()


def test_corpus_graphs_validate():
    for name, dist in named_corpus():
        build_transition_graph(dist).validate()
