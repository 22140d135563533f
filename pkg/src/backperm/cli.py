"""Command-line front door.

Commands: construct | audit | experiment | oracle.  Every run is
deterministic under a fixed seed (default: the BACKPERM_SEED environment
variable, else 0); errors exit non-zero with a single-line JSON object on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import audit as audit_mod
from . import construct as construct_mod
from . import experiments as exp_mod
from . import oracle as oracle_mod
from .core import (
    DEFAULT_ENUM_LIMIT,
    DEFAULT_FAMILY_CAP,
    DEFAULT_LATTICE_CAP,
    PermutationFamily,
    Permutation,
    format_family,
    format_fraction,
    mask_of,
    parse_distribution,
    parse_family,
    parse_fraction,
)
from .errors import BackpermError, ParseError
from .transition import build_transition_graph, graph_loads

FLOAT_JSON = dict(sort_keys=True)


def _default_seed() -> int:
    raw = os.environ.get("BACKPERM_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"BACKPERM_SEED must be an integer, got {raw!r}")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, **FLOAT_JSON) + "\n"
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def _load_distribution(args) -> "PermutationDistribution":
    if getattr(args, "distribution", None):
        return parse_distribution(Path(args.distribution).read_text())
    family = parse_family(Path(args.family).read_text())
    return family.as_distribution()


def _rational_list(raw: str) -> list[Fraction]:
    return [parse_fraction(tok) for tok in raw.split(",") if tok.strip()]


def _permutation_source(spec: str, n: int) -> exp_mod.PermutationSource:
    if spec == "uniform":
        return exp_mod.UniformSource(n)
    if spec.startswith("family:"):
        family = parse_family(Path(spec.split(":", 1)[1]).read_text())
        if family.n != n:
            raise ParseError(f"family over [{family.n}] used with n = {n}")
        return exp_mod.FamilySource(family)
    raise ParseError(f"unknown source {spec!r}")


def _cost_function(spec: str, n: int):
    from .core import unit_cost, zero_cost

    if spec == "unit":
        return unit_cost(n)
    if spec == "zero":
        return zero_cost(n)
    if spec.startswith("adversarial:"):
        graph = graph_loads(Path(spec.split(":", 1)[1]).read_text())
        if graph.n != n:
            raise ParseError(f"graph over [{graph.n}] used with n = {n}")
        return audit_mod.adversarial_cost_function(graph)
    raise ParseError(f"unknown cost {spec!r}")


# ---------------------------------------------------------------------------
# construct


def _family_sidecar(
    construction: str, parameters: dict, seed: int, family: PermutationFamily, enum_limit: int
) -> dict:
    graph = build_transition_graph(family.as_distribution())
    audits: dict = {
        "minimal_backwards_alpha": format_fraction(audit_mod.minimal_backwards_alpha(graph)),
        "alpha_hat": format_fraction(audit_mod.efficiency_witness(graph)),
    }
    if family.n <= enum_limit:
        audits["equivalence"] = audit_mod.equivalence_report(
            family.as_distribution()
        ).to_json()
    return {
        "construction": construction,
        "parameters": parameters,
        "seed": seed,
        "achieved_alpha": audits["minimal_backwards_alpha"],
        "audits": audits,
    }


def cmd_construct(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.kind == "lcm":
        family = construct_mod.lcm_family(args.n, cap=args.family_cap)
        parameters = {"n": args.n, "t": family.t}
        construction = "lcm"
    elif args.kind == "pebble":
        graph = graph_loads(Path(args.graph).read_text())
        family = construct_mod.pebble_family(
            graph, args.t, epsilon=parse_fraction(args.epsilon), force=args.force
        )
        parameters = {"n": graph.n, "t": args.t, "epsilon": args.epsilon}
        construction = "pebble"
    elif args.kind == "dk":
        params = construct_mod.DkParams(args.k, args.t)
        members = tuple(
            Permutation(construct_mod.dk_sample(params, range(1, params.size + 1), seed + i))
            for i in range(args.samples)
        )
        family = PermutationFamily(params.size, members)
        parameters = {"k": args.k, "t": args.t, "samples": args.samples}
        construction = "dk"
    else:  # alpha-uniform
        result = construct_mod.alpha_uniform_family(
            args.n, args.alpha, epsilon=parse_fraction(args.epsilon),
            family_cap=args.family_cap,
        )
        family = result.family
        parameters = {
            "n": result.n,
            "alpha": result.alpha,
            "k": result.k,
            "t": result.t,
            "notes": list(result.notes),
        }
        construction = "alpha-uniform"
    _write(args.out, format_family(family))
    if args.meta:
        sidecar = _family_sidecar(construction, parameters, seed, family, args.enum_limit)
        _write(args.meta, json.dumps(sidecar, **FLOAT_JSON) + "\n")
    print(json.dumps({"written": args.out, "n": family.n, "t": family.t}, **FLOAT_JSON))
    return 0


# ---------------------------------------------------------------------------
# audit


def cmd_audit(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    dist = _load_distribution(args)
    graph = build_transition_graph(dist)
    report = {
        "n": dist.n,
        "support_size": len(dist.support),
        "seed": seed,
        "equivalence": audit_mod.equivalence_report(dist, cap=args.lattice_cap).to_json(),
        "alpha_hat": format_fraction(audit_mod.efficiency_witness(graph)),
        "minimal_backwards_alpha": format_fraction(
            audit_mod.minimal_backwards_alpha(graph)
        ),
        "entropy": oracle_mod.exact_entropy(dist),
        "backwards_uniform": [
            audit_mod.check_backwards_uniform(graph, alpha).to_json()
            for alpha in _rational_list(args.alpha)
        ],
        "minwise": [
            audit_mod.check_minwise(dist, eps, cap=args.lattice_cap).to_json()
            for eps in _rational_list(args.epsilon)
        ],
        "maxwise": [
            audit_mod.check_maxwise(dist, eps, cap=args.lattice_cap).to_json()
            for eps in _rational_list(args.epsilon)
        ],
        "certificate": audit_mod.lower_bound_certificate(dist, cap=args.lattice_cap).to_json(),
    }
    _emit(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# experiment


def _write_experiment(result: exp_mod.ExperimentResult, prefix: str, params: dict) -> None:
    rows = ["trial,value"]
    rows.extend(
        f"{i},{int(v) if float(v).is_integer() else v}" for i, v in enumerate(result.values)
    )
    _write(prefix + ".csv", "\n".join(rows) + "\n")
    summary = result.to_json()
    summary.update(params)
    _write(prefix + ".json", json.dumps(summary, **FLOAT_JSON) + "\n")
    print(json.dumps({"written": prefix + ".csv", "mean": result.mean}, **FLOAT_JSON))


def cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.kind == "quicksort":
        source = _permutation_source(args.source, args.n)
        result = exp_mod.quicksort_comparisons(source, args.n, args.trials, seed)
        params = {"experiment": "quicksort", "n": args.n}
    elif args.kind == "kkt":
        graph = exp_mod.parse_weighted_graph(Path(args.graph).read_text())
        result = exp_mod.kkt_single_batch(
            graph, parse_fraction(args.p), None, args.trials, seed
        )
        params = {"experiment": "kkt", "n": graph.n, "m": graph.m, "p": args.p}
    else:  # generic
        source = _permutation_source(args.source, args.n)
        cost = _cost_function(args.cost, args.n)
        result = exp_mod.incremental_cost_experiment(
            source, cost, args.n, args.trials, seed
        )
        params = {"experiment": "generic", "n": args.n, "cost": args.cost}
    _write_experiment(result, args.out, params)
    return 0


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(args) -> int:
    dist = _load_distribution(args)
    report: dict = {
        "n": dist.n,
        "support_size": len(dist.support),
        "entropy": oracle_mod.exact_entropy(dist),
    }
    if args.set:
        y_mask = mask_of(int(tok) for tok in args.set.split(","))
        x = args.element
        if x is None:
            raise ParseError("--element is required with --set")
        conditional = oracle_mod.brute_conditional_last(dist, y_mask, x)
        report.update(
            {
                "set": sorted(int(tok) for tok in args.set.split(",")),
                "element": x,
                "minwise": format_fraction(oracle_mod.brute_minwise(dist, y_mask, x)),
                "maxwise": format_fraction(oracle_mod.brute_maxwise(dist, y_mask, x)),
                "conditional_last": None if conditional is None else format_fraction(conditional),
            }
        )
    _emit(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="backperm")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="build permutation families")
    csub = construct.add_subparsers(dest="kind", required=True)
    for kind in ("lcm", "pebble", "dk", "alpha-uniform"):
        c = csub.add_parser(kind)
        c.add_argument("--out", required=True)
        c.add_argument("--meta")
        c.add_argument("--seed", type=int)
        c.add_argument("--family-cap", type=int, default=DEFAULT_FAMILY_CAP)
        c.add_argument("--enum-limit", type=int, default=DEFAULT_ENUM_LIMIT)
        c.set_defaults(func=cmd_construct)
        if kind == "lcm":
            c.add_argument("--n", type=int, required=True)
        elif kind == "pebble":
            c.add_argument("--graph", required=True)
            c.add_argument("--t", type=int, required=True)
            c.add_argument("--epsilon", default="1/2")
            c.add_argument("--force", action="store_true")
        elif kind == "dk":
            c.add_argument("--k", type=int, required=True)
            c.add_argument("--t", type=int, required=True)
            c.add_argument("--samples", type=int, required=True)
        else:
            c.add_argument("--n", type=int, required=True)
            c.add_argument("--alpha", type=int, required=True)
            c.add_argument("--epsilon", default="1/2")

    audit = sub.add_parser("audit", help="audit a family or distribution")
    group = audit.add_mutually_exclusive_group(required=True)
    group.add_argument("--family")
    group.add_argument("--distribution")
    audit.add_argument("--alpha", default="1", help="comma-separated rationals")
    audit.add_argument("--epsilon", default="0", help="comma-separated rationals")
    audit.add_argument("--lattice-cap", type=int, default=DEFAULT_LATTICE_CAP)
    audit.add_argument("--seed", type=int)
    audit.add_argument("--out")
    audit.set_defaults(func=cmd_audit)

    experiment = sub.add_parser("experiment", help="run an empirical harness")
    esub = experiment.add_subparsers(dest="kind", required=True)
    for kind in ("quicksort", "kkt", "generic"):
        e = esub.add_parser(kind)
        e.add_argument("--trials", type=int, required=True)
        e.add_argument("--seed", type=int)
        e.add_argument("--out", required=True, help="output prefix (.csv/.json)")
        e.set_defaults(func=cmd_experiment)
        if kind == "quicksort":
            e.add_argument("--n", type=int, required=True)
            e.add_argument("--source", default="uniform")
        elif kind == "kkt":
            e.add_argument("--graph", required=True)
            e.add_argument("--p", required=True)
        else:
            e.add_argument("--n", type=int, required=True)
            e.add_argument("--source", default="uniform")
            e.add_argument("--cost", default="unit")

    oracle = sub.add_parser("oracle", help="brute-force values for a distribution")
    ogroup = oracle.add_mutually_exclusive_group(required=True)
    ogroup.add_argument("--family")
    ogroup.add_argument("--distribution")
    oracle.add_argument("--set", help="comma-separated elements of Y")
    oracle.add_argument("--element", type=int)
    oracle.add_argument("--out")
    oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except BackpermError as exc:
        sys.stderr.write(
            json.dumps({"error": exc.code, "message": str(exc)}, sort_keys=True) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
