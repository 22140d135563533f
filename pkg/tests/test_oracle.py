import math
from fractions import Fraction

import pytest

from conftest import point_mass, rotation_distribution
from backperm.core import mask_of, uniform_distribution, unit_cost
from backperm.errors import ElementNotInSet
from backperm.oracle import (
    brute_conditional_last,
    brute_expected_cost,
    brute_maxwise,
    brute_minwise,
    exact_entropy,
)

F = Fraction


def test_brute_minwise_symmetry():
    d = uniform_distribution(3)
    assert brute_minwise(d, 0b111, 2) == F(1, 3)


def test_brute_minwise_rotations():
    rot = rotation_distribution(3)
    assert brute_minwise(rot, 0b011, 1) == F(2, 3)


def test_brute_minwise_singleton():
    rot = rotation_distribution(3)
    for x in (1, 2, 3):
        assert brute_minwise(rot, 1 << (x - 1), x) == 1


def test_brute_minwise_membership_error():
    with pytest.raises(ElementNotInSet):
        brute_minwise(uniform_distribution(3), 0b011, 3)


def test_brute_maxwise_point_mass():
    d = point_mass([1, 2, 3])
    assert brute_maxwise(d, 0b011, 2) == 1
    assert brute_maxwise(d, 0b011, 1) == 0


def test_brute_conditional_last():
    d = uniform_distribution(4)
    assert brute_conditional_last(d, mask_of([1, 3]), 3) == F(1, 2)
    rot = rotation_distribution(3)
    assert brute_conditional_last(rot, 0b011, 2) == 1
    assert brute_conditional_last(rot, mask_of([1, 3]), 1) == 1


def test_brute_conditional_last_zero_support():
    d = point_mass([1, 2, 3])
    assert brute_conditional_last(d, mask_of([1, 3]), 1) is None


def test_brute_expected_cost_unit():
    for dist in (uniform_distribution(4), rotation_distribution(4)):
        assert brute_expected_cost(dist, unit_cost(4)) == 4


def test_exact_entropy_values():
    assert exact_entropy(point_mass([2, 1])) == 0.0
    assert abs(exact_entropy(uniform_distribution(3)) - math.log(6)) < 1e-12
    assert abs(exact_entropy(rotation_distribution(3)) - math.log(3)) < 1e-12
    for n in (1, 2, 3, 4, 5, 6):
        assert abs(exact_entropy(uniform_distribution(n)) - math.log(math.factorial(n))) < 1e-12
