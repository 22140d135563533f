import itertools
import math
import random
from fractions import Fraction

import pytest

from conftest import rotation_distribution, two_branching_level_graph
from backperm.audit import check_backwards_uniform, equivalence_report
from backperm.construct import (
    AlphaUniformResult,
    DkParams,
    EvenSplitInstance,
    alpha_uniform_family,
    dk_distribution,
    dk_sample,
    even_split,
    graph_extremes,
    lcm_check,
    lcm_family,
    pebble_family,
    pebble_t_bounds,
)
from backperm.core import Permutation, full_mask, make_permutation, mask_of
from backperm.errors import (
    NonIntegerReciprocal,
    OutOfRange,
    PreconditionViolated,
    SizeMismatch,
    TooLarge,
)
from backperm.transition import (
    TransitionGraph,
    build_transition_graph,
    graphs_equal,
    uniform_transition_graph,
)

F = Fraction


# ---------------------------------------------------------------------------
# even split


def test_even_split_examples():
    counts = even_split(EvenSplitInstance((3,), (F(1, 2), F(1, 2))))
    assert sorted(counts[0]) == [1, 2]
    counts = even_split(EvenSplitInstance((2, 2), (F(1, 2), F(1, 2))))
    assert counts == [[1, 1], [1, 1]]
    counts = even_split(EvenSplitInstance((1, 1, 1), (F(1, 3),) * 3))
    for i in range(3):
        assert sum(row[i] for row in counts) == 1


def test_even_split_brackets_random():
    rng = random.Random(1)
    for _ in range(100):
        k = rng.randint(1, 5)
        r = rng.randint(1, 5)
        sizes = tuple(rng.randint(0, 12) for _ in range(k))
        raw = [rng.randint(0, 10) for _ in range(r)]
        while sum(raw) == 0:
            raw = [rng.randint(0, 10) for _ in range(r)]
        total = sum(raw)
        deltas = tuple(F(value, total) for value in raw)
        counts = even_split(EvenSplitInstance(sizes, deltas))
        for j in range(k):
            assert sum(counts[j]) == sizes[j]
            for i in range(r):
                assert math.floor(deltas[i] * sizes[j]) <= counts[j][i]
                assert counts[j][i] <= math.ceil(deltas[i] * sizes[j])
        grand = sum(sizes)
        for i in range(r):
            column = sum(counts[j][i] for j in range(k))
            assert math.floor(deltas[i] * grand) <= column <= math.ceil(deltas[i] * grand)


def test_even_split_deterministic():
    instance = EvenSplitInstance((5, 3, 1), (F(1, 3), F(1, 6), F(1, 2)))
    assert even_split(instance) == even_split(instance)


def test_even_split_validation():
    with pytest.raises(OutOfRange):
        EvenSplitInstance((1,), (F(1, 2), F(1, 3)))
    with pytest.raises(OutOfRange):
        EvenSplitInstance((-1,), (F(1),))


# ---------------------------------------------------------------------------
# pebble rounding


def test_pebble_uniform_2():
    family = pebble_family(uniform_transition_graph(2), 2, force=True)
    assert {m.order for m in family.members} == {(1, 2), (2, 1)}


def test_pebble_uniform_3_is_s3():
    family = pebble_family(uniform_transition_graph(3), 6, force=True)
    assert family.distinct()
    assert {m.order for m in family.members} == set(
        itertools.permutations((1, 2, 3))
    )


def test_pebble_exactness_uniform_4():
    graph = uniform_transition_graph(4)
    family = pebble_family(graph, 12, force=True)
    assert family.t == 12 and family.distinct()
    assert graphs_equal(build_transition_graph(family.as_distribution()), graph)


def test_pebble_rejects_non_integer_reciprocal():
    dist = rotation_distribution(3)
    graph = build_transition_graph(dist)
    # distort: rebuild a legal graph with a 2/3 edge
    node = {
        0b111: F(1), 0b110: F(2, 3), 0b011: F(1, 3),
        0b100: F(1, 3), 0b010: F(2, 3), 0: F(1),
    }
    edge = {
        (0b111, 1): F(2, 3), (0b111, 3): F(1, 3),
        (0b110, 2): F(1, 2), (0b110, 3): F(1, 2),
        (0b011, 1): F(1),
        (0b100, 3): F(1), (0b010, 2): F(1),
    }
    bad = TransitionGraph(3, node, edge)
    bad.validate()
    with pytest.raises(NonIntegerReciprocal):
        pebble_family(bad, 6)
    # forcing still produces a family of the right size
    assert pebble_family(bad, 6, force=True).t == 6
    del dist, graph


def test_pebble_window_enforced():
    with pytest.raises(PreconditionViolated):
        pebble_family(uniform_transition_graph(3), 5)


def test_pebble_t_bounds_two_level_graph():
    graph = two_branching_level_graph()
    lower, upper = pebble_t_bounds(graph, F(1, 10))
    assert lower == F(8 * 3) / (F(1, 4) * F(1, 4) * F(1, 10))
    assert upper == 4  # most probable walk has probability 1/4
    assert graph_extremes(graph) == (F(1, 4), F(1, 4), F(1, 4))


def test_pebble_approximation_clauses():
    graph = two_branching_level_graph()
    epsilon = F(1, 10)
    lower, _ = pebble_t_bounds(graph, epsilon)
    t = 3841
    assert t >= lower
    assert any(
        (t * graph.weight(mask) * w).denominator != 1
        for (mask, s), w in graph.edge_weight.items()
    )
    family = pebble_family(graph, t, epsilon=epsilon, force=True)
    achieved = build_transition_graph(family.as_distribution())
    for mask, w in graph.node_weight.items():
        if mask == 0:
            continue
        ratio = achieved.weight(mask) / w
        assert 1 - epsilon <= ratio <= 1 + epsilon
    edge_tol = epsilon / (4 * graph.n)
    for (mask, s), w in graph.edge_weight.items():
        ratio = achieved.edge(mask, s) / w
        assert 1 - edge_tol <= ratio <= 1 + edge_tol


def test_pebble_distinct_members_inside_window():
    # t at most 1/p guarantees pairwise distinct members
    graph = uniform_transition_graph(4)
    for t in (6, 12, 24):
        family = pebble_family(graph, t, force=True)
        assert family.distinct()


# ---------------------------------------------------------------------------
# lcm family


def test_lcm_family_sizes_and_exactness():
    expected = {2: 2, 3: 6, 4: 12, 5: 60, 6: 60}
    for n, t in expected.items():
        family = lcm_family(n)
        assert family.t == t
        assert family.distinct()
        assert graphs_equal(
            build_transition_graph(family.as_distribution()),
            uniform_transition_graph(n),
        )


def test_lcm_family_cap():
    with pytest.raises(TooLarge):
        lcm_family(25)


def test_lcm_family_reproducible():
    a = lcm_family(5)
    b = lcm_family(5)
    assert a == b


def test_lcm_check_examples():
    assert lcm_check(1) == type(lcm_check(1))(1, 1, True)
    result = lcm_check(4)
    assert (result.a, result.b, result.equal) == (12, 12, True)
    assert lcm_check(8).b == 840
    assert lcm_check(8).equal


def test_lcm_check_range():
    for n in range(1, 31):
        assert lcm_check(n).equal


# ---------------------------------------------------------------------------
# the recursive block-shuffle distribution


def test_dk_sample_deterministic():
    params = DkParams(2, 2)
    ground = range(1, 9)
    assert dk_sample(params, ground, 7) == dk_sample(params, ground, 7)
    assert dk_sample(params, ground, 7) != dk_sample(params, ground, 8)


def test_dk_sample_structure():
    params = DkParams(2, 1)
    for seed in range(50):
        order = dk_sample(params, range(1, 5), seed)
        assert order[0] in (1, 2)
        assert order[1] in (3, 4)
        assert sorted(order) == [1, 2, 3, 4]


def test_dk_sample_general_ground_set():
    params = DkParams(2, 1)
    order = dk_sample(params, [10, 3, 7, 21], seed=5)
    assert sorted(order) == [3, 7, 10, 21]
    assert order[0] in (3, 7)  # smallest half first
    assert order[1] in (10, 21)


def test_dk_sample_size_mismatch():
    with pytest.raises(SizeMismatch):
        dk_sample(DkParams(2, 1), [1, 2, 3], seed=0)


def test_dk_distribution_base_case():
    dist = dk_distribution(DkParams(1, 1))
    assert [(p.order, pr) for p, pr in dist.support] == [
        ((1, 2), F(1, 2)),
        ((2, 1), F(1, 2)),
    ]
    # depth one on four elements is uniform over S_4
    d12 = dk_distribution(DkParams(1, 2))
    assert len(d12.support) == 24
    assert all(pr == F(1, 24) for _, pr in d12.support)


def test_dk_distribution_2_1():
    dist = dk_distribution(DkParams(2, 1))
    assert len(dist.support) == 8
    assert all(pr == F(1, 8) for _, pr in dist.support)
    graph = build_transition_graph(dist)
    assert graph.weight(0b0001) == F(1, 2)
    assert graph.weight(0b0100) == 0  # pi(1) = 3 impossible
    assert graph.weight(0b0001) >= F(1, 2 ** (2 * 2 * 2 * 1))


def test_dk_distribution_matches_sampler():
    # empirical check that dk_sample follows dk_distribution
    params = DkParams(2, 1)
    dist = dk_distribution(params)
    counts = {p.order: 0 for p, _ in dist.support}
    trials = 4000
    for seed in range(trials):
        counts[dk_sample(params, range(1, 5), seed)] += 1
    for order, count in counts.items():
        assert abs(count - trials / 8) < 5 * math.sqrt(trials * (1 / 8) * (7 / 8))


def test_dk_last_elements_bound():
    # Pr[X subset of last t positions] >= 2^(-2|X|k) for |X| <= t
    params = DkParams(1, 2)
    dist = dk_distribution(params)
    x_mask = mask_of([1, 2])
    prob = sum(
        (pr for p, pr in dist.support if set(p.order[-2:]) == {1, 2}), F(0)
    )
    assert prob == F(1, 6)
    assert prob >= F(1, 2 ** (2 * 2 * 1))
    del x_mask


def test_dk_cap():
    with pytest.raises(TooLarge):
        dk_distribution(DkParams(2, 4))


# ---------------------------------------------------------------------------
# combined alpha-uniform family


def test_alpha_uniform_depth_one_collapses_to_lcm():
    result = alpha_uniform_family(4, 2)
    assert result.family.t == 12
    assert result.achieved_alpha == 1
    assert result.k == 1 and result.t == 2
    assert equivalence_report(result.family.as_distribution()).all_true()


def test_alpha_uniform_4_4():
    result = alpha_uniform_family(4, 4)
    graph = build_transition_graph(result.family.as_distribution())
    assert check_backwards_uniform(graph, F(4)).passed
    assert result.achieved_alpha <= 4


def test_alpha_uniform_8_4():
    result = alpha_uniform_family(8, 4)
    assert result.k == 2 and result.t == 2
    graph = build_transition_graph(result.family.as_distribution())
    assert check_backwards_uniform(graph, F(4)).passed
    assert result.achieved_alpha <= 4


def test_alpha_uniform_rounds_up_with_warning():
    with pytest.warns(UserWarning):
        result = alpha_uniform_family(3, 2)
    assert result.n == 4
    assert result.notes


def test_alpha_uniform_rejects_alpha_above_n():
    with pytest.raises(PreconditionViolated):
        alpha_uniform_family(4, 8)
