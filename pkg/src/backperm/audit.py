"""Audits of backwards behavior: uniformity, minwise/maxwise, the adversarial
cost function, the efficiency witness, the five-way equivalence, and the
entropy lower-bound certificate.

All probability computations here go through the transition graph, never
through support enumeration; the ``oracle`` module provides the independent
enumeration-based values the tests compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    DEFAULT_LATTICE_CAP,
    CostFunction,
    PermutationDistribution,
    format_fraction,
    full_mask,
    mask_elements,
    mask_size,
)
from .errors import Infeasible, TooLarge
from .oracle import exact_entropy
from .transition import (
    TransitionGraph,
    build_transition_graph,
    graphs_equal,
    uniform_transition_graph,
)

FLOAT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Witness:
    """A set/element pair whose measured probability violates a bound."""

    set_mask: int
    element: int
    probability: Fraction

    def to_json(self) -> dict:
        return {
            "set_mask": self.set_mask,
            "set": mask_elements(self.set_mask),
            "element": self.element,
            "probability": format_fraction(self.probability),
        }


@dataclass(frozen=True)
class AuditReport:
    property: str  # "backwards-uniform" | "minwise" | "maxwise"
    parameter: Fraction
    passed: bool
    witness: Witness | None = None

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "parameter": format_fraction(self.parameter),
            "passed": self.passed,
            "witness": self.witness.to_json() if self.witness else None,
        }


# ---------------------------------------------------------------------------
# probabilities from graph weights


def minwise_probability(graph: TransitionGraph, y_mask: int, x: int) -> Fraction:
    """Pr[x first among Y] as the exact sum of w(T) * w(T, T \\ {x})
    over prefix sets T meeting Y exactly in {x}."""
    rest = full_mask(graph.n) & ~y_mask
    x_bit = 1 << (x - 1)
    total = Fraction(0)
    sub = rest
    while True:
        t_mask = sub | x_bit
        w = graph.node_weight.get(t_mask)
        if w is not None:
            e = graph.edge_weight.get((t_mask, x))
            if e is not None:
                total += w * e
        if sub == 0:
            break
        sub = (sub - 1) & rest
    return total


def maxwise_probability(graph: TransitionGraph, y_mask: int, x: int) -> Fraction:
    """Pr[x last among Y] as the exact sum of w(T) * w(T, T \\ {x})
    over prefix sets T containing Y."""
    rest = full_mask(graph.n) & ~y_mask
    total = Fraction(0)
    sub = rest
    while True:
        t_mask = sub | y_mask
        w = graph.node_weight.get(t_mask)
        if w is not None:
            e = graph.edge_weight.get((t_mask, x))
            if e is not None:
                total += w * e
        if sub == 0:
            break
        sub = (sub - 1) & rest
    return total


# ---------------------------------------------------------------------------
# definitional checks


def check_backwards_uniform(graph: TransitionGraph, alpha: Fraction) -> AuditReport:
    """Every positive node S and s in S must satisfy w(S, S\\{s}) <= alpha/|S|."""
    alpha = Fraction(alpha)
    witness = None
    for mask in sorted(graph.node_weight):
        if mask == 0:
            continue
        bound = alpha / mask_size(mask)
        for x, w in graph.outgoing(mask):
            if w > bound:
                witness = Witness(mask, x, w)
                break
        if witness:
            break
    return AuditReport("backwards-uniform", alpha, witness is None, witness)


def _check_wise(
    dist: PermutationDistribution,
    epsilon: Fraction,
    probability,
    name: str,
    cap: int,
) -> AuditReport:
    if dist.n > cap:
        raise TooLarge(f"n = {dist.n} exceeds lattice cap {cap}")
    epsilon = Fraction(epsilon)
    graph = build_transition_graph(dist)
    for y_mask in range(1, 1 << dist.n):
        size = mask_size(y_mask)
        lo = (1 - epsilon) / size
        hi = (1 + epsilon) / size
        for x in mask_elements(y_mask):
            p = probability(graph, y_mask, x)
            if p < lo or p > hi:
                return AuditReport(name, epsilon, False, Witness(y_mask, x, p))
    return AuditReport(name, epsilon, True, None)


def check_minwise(
    dist: PermutationDistribution,
    epsilon: Fraction,
    cap: int = DEFAULT_LATTICE_CAP,
) -> AuditReport:
    """Pr[x first among Y] must lie in [(1-eps)/|Y|, (1+eps)/|Y|] for all Y, x."""
    return _check_wise(dist, epsilon, minwise_probability, "minwise", cap)


def check_maxwise(
    dist: PermutationDistribution,
    epsilon: Fraction,
    cap: int = DEFAULT_LATTICE_CAP,
) -> AuditReport:
    """Pr[x last among Y] must lie in [(1-eps)/|Y|, (1+eps)/|Y|] for all Y, x."""
    return _check_wise(dist, epsilon, maxwise_probability, "maxwise", cap)


# ---------------------------------------------------------------------------
# the adversarial cost function and the efficiency witness


def _argmax_drop(graph: TransitionGraph, mask: int) -> int:
    """Element most likely to be dropped at the node; ties to the smallest."""
    best_x = 0
    best_w = Fraction(-1)
    for x in mask_elements(mask):
        w = graph.edge_weight.get((mask, x), Fraction(0))
        if w > best_w:
            best_w = w
            best_x = x
    return best_x


def adversarial_cost_function(graph: TransitionGraph) -> CostFunction:
    """The cost function charging |Y| to the element most likely to be last.

    For zero-support Y every element costs 1/|Y|; either way the per-set
    uniform mean is at most 1.
    """

    def evaluate(x: int, y_mask: int) -> Fraction:
        if y_mask in graph.node_weight:
            return Fraction(mask_size(y_mask)) if x == _argmax_drop(graph, y_mask) else Fraction(0)
        return Fraction(1, mask_size(y_mask))

    return CostFunction(graph.n, evaluate, normalized=True)


def efficiency_witness(graph: TransitionGraph) -> Fraction:
    """alpha-hat: the expected adversarial cost per element, computed exactly
    from the graph as (1/n) * sum over positive S of w(S) * |S| * max edge."""
    total = Fraction(0)
    for mask, w in graph.node_weight.items():
        if mask == 0:
            continue
        best = max(weight for _, weight in graph.outgoing(mask))
        total += w * mask_size(mask) * best
    return total / graph.n


def minimal_backwards_alpha(graph: TransitionGraph) -> Fraction:
    """The smallest alpha for which check_backwards_uniform passes."""
    best = Fraction(0)
    for mask in graph.node_weight:
        if mask == 0:
            continue
        for _, w in graph.outgoing(mask):
            best = max(best, w * mask_size(mask))
    return best


# ---------------------------------------------------------------------------
# five-way equivalence


@dataclass(frozen=True)
class EquivalenceReport:
    backwards_uniform: bool
    backwards_efficient: bool
    minwise: bool
    maxwise: bool
    uniform_graph: bool

    def values(self) -> tuple[bool, bool, bool, bool, bool]:
        return (
            self.backwards_uniform,
            self.backwards_efficient,
            self.minwise,
            self.maxwise,
            self.uniform_graph,
        )

    def all_agree(self) -> bool:
        return len(set(self.values())) == 1

    def all_true(self) -> bool:
        return all(self.values())

    def to_json(self) -> dict:
        return {
            "backwards_uniform": self.backwards_uniform,
            "backwards_efficient": self.backwards_efficient,
            "minwise": self.minwise,
            "maxwise": self.maxwise,
            "uniform_graph": self.uniform_graph,
        }


def equivalence_report(
    dist: PermutationDistribution, cap: int = DEFAULT_LATTICE_CAP
) -> EquivalenceReport:
    """Evaluate the five equivalent characterizations of exact backwards uniformity."""
    if dist.n > cap:
        raise TooLarge(f"n = {dist.n} exceeds lattice cap {cap}")
    graph = build_transition_graph(dist)
    return EquivalenceReport(
        backwards_uniform=check_backwards_uniform(graph, Fraction(1)).passed,
        backwards_efficient=efficiency_witness(graph) == 1,
        minwise=check_minwise(dist, Fraction(0), cap).passed,
        maxwise=check_maxwise(dist, Fraction(0), cap).passed,
        uniform_graph=graphs_equal(graph, uniform_transition_graph(dist.n, cap)),
    )


# ---------------------------------------------------------------------------
# entropy lower-bound certificate


def level_costs(graph: TransitionGraph) -> list[Fraction]:
    """t_i = expected adversarial cost of step i under the memoryless
    distribution: i * sum over size-i nodes of w(S) * max edge."""
    costs = [Fraction(0)] * (graph.n + 1)
    for mask, w in graph.node_weight.items():
        if mask == 0:
            continue
        size = mask_size(mask)
        best = max(weight for _, weight in graph.outgoing(mask))
        costs[size] += w * best * size
    return costs[1:]


def select_cost_window(
    costs: list[Fraction], q: int
) -> tuple[int, tuple[Fraction, ...]]:
    """Pick the window start p = n - kq >= n/2 minimizing the window sum
    t_{p+1} + ... + t_{p+q}.  The candidate windows are disjoint, so the
    minimum is at most the average (1/floor(n/2q)) * sum(t)."""
    n = len(costs)
    k_max = n // (2 * q)
    if k_max < 1:
        raise Infeasible("no admissible window start")
    best_p = -1
    best_sum = None
    for k in range(1, k_max + 1):
        p = n - k * q
        window_sum = sum(costs[p : p + q], Fraction(0))
        if best_sum is None or window_sum < best_sum:
            best_sum = window_sum
            best_p = p
    return best_p, tuple(costs[best_p : best_p + q])


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Numeric instantiation of the entropy lower bound H(D) >= floor(n/(48*alpha)).

    ``lhs`` is 2H(D) + ln(q!) and ``rhs`` is q * ln(n / (8 * alpha_hat)); the
    certificate holds when the entropy clears the floor bound and, for q >= 1,
    lhs >= rhs.
    """

    n: int
    alpha_hat: Fraction
    q: int
    p: int
    t: tuple[Fraction, ...]
    entropy: float
    lhs: float
    rhs: float
    floor_bound: int
    holds: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha_hat": format_fraction(self.alpha_hat),
            "q": self.q,
            "p": self.p,
            "t": [format_fraction(value) for value in self.t],
            "entropy": self.entropy,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "floor_bound": self.floor_bound,
            "holds": self.holds,
        }


def lower_bound_certificate(
    dist: PermutationDistribution, cap: int = DEFAULT_LATTICE_CAP
) -> LowerBoundCertificate:
    """Certify the entropy lower bound on one distribution.

    alpha-hat is computed on the memoryless distribution of the graph (a
    function of the graph alone); the entropy is that of the distribution
    itself.
    """
    if dist.n > cap:
        raise TooLarge(f"n = {dist.n} exceeds lattice cap {cap}")
    graph = build_transition_graph(dist)
    n = dist.n
    alpha_hat = efficiency_witness(graph)
    q = math.floor(Fraction(n) / (24 * alpha_hat))
    floor_bound = math.floor(Fraction(n) / (48 * alpha_hat))
    entropy = exact_entropy(dist)
    if q == 0:
        p, window = 0, ()
        lhs = 2 * entropy
        rhs = 0.0
        holds = entropy >= floor_bound - FLOAT_TOLERANCE
    else:
        costs = level_costs(graph)
        p, window = select_cost_window(costs, q)
        window_sum = sum(window, Fraction(0))
        if window_sum > 4 * alpha_hat * q:
            raise Infeasible("window averaging bound violated; internal error")
        lhs = 2 * entropy + math.lgamma(q + 1)
        rhs = q * math.log(Fraction(n) / (8 * alpha_hat))
        holds = (entropy >= floor_bound - FLOAT_TOLERANCE) and (
            lhs >= rhs - FLOAT_TOLERANCE
        )
    return LowerBoundCertificate(
        n, alpha_hat, q, p, window, entropy, lhs, rhs, floor_bound, holds
    )
