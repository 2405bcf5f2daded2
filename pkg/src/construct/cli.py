"""Command-line entry point.

Subcommands:
    synth           run the full reconstruction search on a container
    translate       emit the symbolic skeleton with slot placeholders
    validate        check a mapping against the validity constraints
    simulate        simulate a mapping and write the output trace
    make-reference  simulate a ground-truth mapping into reference.csv
    space           print the size of the injective assignment space
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from construct import check, ga, sim
from construct.container import (
    VariableDescriptor, VariableTable, load_container, write_trace,
)
from construct.errors import ConstructError
from construct.isolate import RuleConfig, load_rule_config
from construct.model import BoundModel, apply_assignment, emit_modelica
from construct import mexpr


def _add_rule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reciprocal-tolerance", type=float, default=None,
                   help="relative tolerance of the reciprocal-multiply rule")
    p.add_argument("--reciprocal-max-denominator", type=int, default=None,
                   help="largest denominator the reciprocal rule may introduce")


def _load_problem(args) -> ga.GaProblem:
    """Container -> problem, with CLI flags overriding rules.toml."""
    cm = load_container(args.container)
    rule_cfg = RuleConfig()
    if cm.root is not None and (cm.root / "rules.toml").is_file():
        rule_cfg = load_rule_config((cm.root / "rules.toml").read_text())
    import dataclasses
    if args.reciprocal_tolerance is not None:
        rule_cfg = dataclasses.replace(
            rule_cfg, reciprocal_tolerance=args.reciprocal_tolerance)
    if args.reciprocal_max_denominator is not None:
        rule_cfg = dataclasses.replace(
            rule_cfg, reciprocal_max_denominator=args.reciprocal_max_denominator)
    return cm, ga.problem_from_container(cm, rule_cfg)


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("cbc", "cbt"), required=True,
                   help="operator suite: correct-by-construction or baseline")
    p.add_argument("--pop", type=int, default=400, help="population size")
    p.add_argument("--gens", type=int, default=10, help="maximum generations")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--elitism", type=int, default=2)
    p.add_argument("--pc", type=float, default=0.9, help="crossover rate")
    p.add_argument("--pm", type=float, default=0.1, help="mutation rate")
    p.add_argument("--tournament", type=int, default=2)
    p.add_argument("--no-early-stop", action="store_true",
                   help="always run the full generation budget")
    p.add_argument("--cbt-repair", action="store_true",
                   help="repair duplicate genes after baseline crossover")


def _ga_config(args) -> ga.GaConfig:
    return ga.GaConfig(
        population_size=args.pop, max_generations=args.gens,
        crossover_rate=args.pc, mutation_rate=args.pm,
        tournament_size=args.tournament, elitism=args.elitism,
        rng_seed=args.seed, early_stop=not args.no_early_stop,
        cbt_repair=args.cbt_repair)


def _load_mapping(path: str) -> tuple:
    data = json.loads(Path(path).read_text())
    genes = data.get("genes")
    if not isinstance(genes, list) or not all(isinstance(g, int) for g in genes):
        raise ConstructError(f"{path}: expected {{\"genes\": [int, ...]}}")
    return tuple(genes)


def _model_name(container: Path) -> str:
    stem = "".join(ch if ch.isalnum() else "_" for ch in container.name)
    if not stem or stem[0].isdigit():
        stem = "M_" + stem
    return stem[0].upper() + stem[1:]


def cmd_synth(args) -> int:
    cm, problem = _load_problem(args)
    cfg = _ga_config(args)
    result = ga.run_ga(args.mode, problem, cfg)
    best_c, best_f = result.best

    report = ga.report_dict(result, args.mode, cfg)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    if args.curves:
        rows = ["mode,generation,best_mse"]
        for entry in result.per_generation:
            mse = "" if entry["best_mse"] is None else repr(entry["best_mse"])
            rows.append(f"{args.mode},{entry['gen']},{mse}")
        Path(args.curves).write_text("\n".join(rows) + "\n")

    if not best_f.is_finite:
        print("search finished: no simulatable candidate found")
        return 2
    print(f"search finished: best MSE {best_f.mse!r} "
          f"after {result.evaluations} evaluations")
    if args.out:
        bound = apply_assignment(problem.model, best_c, problem.vars)
        name = _model_name(Path(args.container))
        Path(args.out).write_text(emit_modelica(bound, name))
        print(f"wrote {args.out}")
    return 0


def cmd_translate(args) -> int:
    cm, problem = _load_problem(args)
    placeholders = []
    for slot in problem.model.slots:
        vtype = slot.inferred_type if slot.inferred_type != "Unknown" else "Real"
        placeholders.append(VariableDescriptor(
            f"sym_{slot.origin}", slot.id, vtype, "local", None))
    table = VariableTable(tuple(placeholders))
    names = tuple(v.name for v in placeholders)
    equations = tuple(
        (mexpr.map_refs(lhs, lambda r: names[r]),
         mexpr.map_refs(rhs, lambda r: names[r]))
        for lhs, rhs in problem.model.equations)
    states = frozenset(names[s.id] for s in problem.model.slots if s.is_state)
    bound = BoundModel(equations, table, states, names)
    text = emit_modelica(bound, _model_name(Path(args.container)) + "_skeleton")
    Path(args.out).write_text(text)
    print(f"wrote {args.out} ({len(equations)} equations, "
          f"{problem.num_slots} slots)")
    return 0


def cmd_validate(args) -> int:
    cm, problem = _load_problem(args)
    genes = _load_mapping(args.mapping)
    report = check.validate_assignment(problem.model, problem.vars, genes,
                                       strict_unknown=args.strict_unknown)
    if report.valid:
        print("valid: constraints C0-C4 all hold")
        return 0
    for cid, detail in report.violations:
        print(f"{cid}: {detail}")
    return 2


def cmd_simulate(args) -> int:
    cm, problem = _load_problem(args)
    if cm.input_trace is None:
        raise ConstructError("container has no traces/input.csv")
    genes = _load_mapping(args.mapping)
    bound = apply_assignment(problem.model, genes, problem.vars)
    plan = sim.causalize(bound)
    outputs = [v.name for v in problem.vars.variables if v.causality == "output"]
    result = sim.simulate(plan, cm.input_trace, outputs)
    write_trace(result, args.out)
    print(f"wrote {args.out} ({len(result.times)} samples, "
          f"{len(result.columns)} outputs)")
    return 0


def cmd_make_reference(args) -> int:
    container = Path(args.container)
    cm, problem = _load_problem(args)
    input_trace = cm.input_trace
    if args.input:
        from construct.container import load_trace
        input_trace = load_trace(args.input)
    if input_trace is None:
        raise ConstructError("no input trace given and none in the container")
    genes = _load_mapping(args.mapping)
    report = check.validate_assignment(problem.model, problem.vars, genes)
    if not report.valid:
        for cid, detail in report.violations:
            print(f"{cid}: {detail}")
        return 1
    bound = apply_assignment(problem.model, genes, problem.vars)
    plan = sim.causalize(bound)  # a ground truth must simulate; errors are fatal
    outputs = [v.name for v in problem.vars.variables if v.causality == "output"]
    result = sim.simulate(plan, input_trace, outputs)
    out = container / "traces" / "reference.csv"
    write_trace(result, out)
    print(f"wrote {out}")
    return 0


def cmd_space(args) -> int:
    print(ga.search_space_size(args.slots, args.variables))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="construct",
        description="Reconstruct controller models from decompiled binaries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="search for the best variable mapping")
    p.add_argument("container", help="container directory")
    _add_ga_flags(p)
    _add_rule_flags(p)
    p.add_argument("-o", "--out", help="write the best model here (.mo)")
    p.add_argument("--report", help="write the report JSON here")
    p.add_argument("--curves", help="write generation,best_mse rows here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("translate", help="emit the symbolic skeleton")
    p.add_argument("container")
    _add_rule_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("validate", help="check a mapping against C0-C4")
    p.add_argument("container")
    _add_rule_flags(p)
    p.add_argument("--mapping", required=True, help="JSON {\"genes\": [...]}")
    p.add_argument("--strict-unknown", action="store_true",
                   help="treat uninferred slot types as C1 violations")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="simulate a mapping")
    p.add_argument("container")
    _add_rule_flags(p)
    p.add_argument("--mapping", required=True)
    p.add_argument("-o", "--out", required=True, help="output trace CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("make-reference",
                       help="write traces/reference.csv from a ground truth")
    p.add_argument("container")
    _add_rule_flags(p)
    p.add_argument("--mapping", required=True)
    p.add_argument("--input", help="input trace (default: the container's)")
    p.set_defaults(func=cmd_make_reference)

    p = sub.add_parser("space", help="injective assignment count")
    p.add_argument("slots", type=int)
    p.add_argument("variables", type=int)
    p.set_defaults(func=cmd_space)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConstructError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
