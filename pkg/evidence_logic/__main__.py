import argparse
import json
import logging
import sys

from evidence_logic.errors import EvidenceLogicError, InvalidInputError
from evidence_logic.model_file import NamedModel, load_example, validate
from evidence_logic.models import (
    EvPseudoModel,
    KBPseudoModel,
    RelationalEvidenceModel,
    TopoEModel,
    ev_pseudo_of_rel,
    rel_of_standard_pseudo,
    rel_of_topo,
    share_update,
    topo_of_rel,
)
from evidence_logic.representation import (
    AuditConfig,
    axiom_audit,
    bounded_sat,
    evidence_from_kb,
    kb_from_evidence,
    last_pmorphism_check,
    unravel,
)
from evidence_logic.semantics import evaluate
from evidence_logic.syntax import (
    LanguageTag,
    agent_names,
    closure_set,
    expand_kb,
    formula_order,
    in_language,
    is_static,
    modal_depth,
    parse,
    parse_group,
    reduce_dynamic,
    to_static,
    to_text,
)
from evidence_logic.utils import Config, load_config

logger = logging.getLogger("evidence_logic")


def emit(args: argparse.Namespace, report: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=4, ensure_ascii=False))
    else:
        print("\n".join(lines))


def load(args: argparse.Namespace, path: str, check: bool = True) -> NamedModel:
    config: Config = args.config
    return NamedModel.from_file(path, check=check, max_carrier=config.max_carrier, max_agents=config.max_agents)


def fmt(names: list[str]) -> str:
    return "{" + ", ".join(names) + "}"


# ---------------------------------------------------------------------------
# commands

def cmd_check(args: argparse.Namespace) -> int:
    named = load(args, args.model)
    formula = parse(args.formula)
    result = evaluate(named.model, formula, trace=args.trace)
    report = {"command": "check", "formula": to_text(formula), "extension": named.names(result.extension)}
    lines = [f"{to_text(formula)}: {fmt(named.names(result.extension))}"]
    code = 0
    if args.at is not None:
        x = named.state(args.at)
        verdict = result.holds_at(x)
        report["state"] = named.states[x]
        report["holds"] = verdict
        lines.append(f"{named.states[x]} {'satisfies' if verdict else 'does not satisfy'} it")
        code = 0 if verdict else 1
    if args.trace:
        rows = sorted(result.trace.items(), key=lambda item: formula_order(item[0]))
        report["trace"] = {to_text(f): named.names(ext) for f, ext in rows}
        width = max(len(to_text(f)) for f, _ in rows)
        lines.extend(f"  {to_text(f):<{width}}  {fmt(named.names(ext))}" for f, ext in rows)
    emit(args, report, lines)
    return code


def cmd_share(args: argparse.Namespace) -> int:
    named = load(args, args.model)
    if not isinstance(named.model, TopoEModel):
        raise InvalidInputError("share updates act on topo-e-models")
    model = named.model
    group = model.group(parse_group(args.group))
    updated = share_update(model, group)
    changes = {}
    lines = []
    for i, name in enumerate(model.agents):
        before_pi, after_pi = model.partitions[i], updated.partitions[i]
        before_tau, after_tau = model.topologies[i], updated.topologies[i]
        if before_pi == after_pi and before_tau == after_tau:
            continue
        changes[name] = {
            "partition": [named.names(c) for c in after_pi.cells],
            "opens": {"before": len(before_tau.opens), "after": len(after_tau.opens)},
            "discrete": after_tau.is_discrete(),
        }
        lines.append(
            f"{name}: {len(before_tau.opens)} -> {len(after_tau.opens)} opens"
            f"{' (discrete)' if after_tau.is_discrete() else ''}, cells "
            + ", ".join(fmt(named.names(c)) for c in after_pi.cells)
        )
    if not lines:
        lines.append("no agent's evidence changes")
    result = named.with_model(updated)
    if args.output:
        result.to_file(args.output)
        lines.append(f"Generated {args.output}")
    report = {"command": "share", "group": sorted(parse_group(args.group)), "changes": changes, "model": result.to_dict()}
    emit(args, report, lines)
    return 0


def cmd_translate(args: argparse.Namespace) -> int:
    formula = parse(args.formula)
    agents = args.agents.split(",") if args.agents else None
    match args.mode:
        case "tr":
            out = expand_kb(formula)
        case "reduce":
            system = LanguageTag.KB_DYN if in_language(formula, LanguageTag.KB_DYN, agents) else LanguageTag.EV_DYN
            out = reduce_dynamic(formula, system, agents)
        case _:
            out = to_static(formula, agents)
    report = {"command": "translate", "mode": args.mode, "input": to_text(formula), "output": to_text(out)}
    lines = [to_text(out)]
    code = 0
    if args.verify:
        named = load(args, args.verify)
        before = evaluate(named.model, formula).extension
        after = evaluate(named.model, out).extension
        report["verified"] = before == after
        lines.append(f"equivalent on {args.verify}: {before == after}")
        code = 0 if before == after else 1
    emit(args, report, lines)
    return code


def convert(model, target: str, fragment: str):
    """Walk the conversion chain from the model's kind to ``target``."""
    if target == "kb_pseudo" and fragment != "iA":
        fragment = "iA"
    match model, target:
        case TopoEModel(), "topo":
            return model
        case TopoEModel(), _:
            return convert(rel_of_topo(model), target, fragment)
        case RelationalEvidenceModel(), "relational":
            return model
        case RelationalEvidenceModel(), "topo":
            return topo_of_rel(model)
        case RelationalEvidenceModel(), _:
            return convert(ev_pseudo_of_rel(model, fragment), target, fragment)
        case EvPseudoModel(), "ev_pseudo":
            return model
        case EvPseudoModel(), "kb_pseudo":
            return kb_from_evidence(model)
        case EvPseudoModel(), _:
            return convert(rel_of_standard_pseudo(model), target, fragment)
        case KBPseudoModel(), "kb_pseudo":
            return model
        case KBPseudoModel(), _:
            return convert(evidence_from_kb(model), target, fragment)
    raise InvalidInputError(f"cannot convert to {target!r}")


def cmd_convert(args: argparse.Namespace) -> int:
    named = load(args, args.model)
    result = named.with_model(convert(named.model, args.to, args.fragment))
    logger.info("converted %s model to %s", named.kind, result.kind)
    lines = [str(result)]
    if args.output:
        result.to_file(args.output)
        lines = [f"Generated {args.output}"]
    emit(args, {"command": "convert", "from": named.kind, "to": result.kind, "model": result.to_dict()}, lines)
    return 0


def cmd_sat(args: argparse.Namespace) -> int:
    formula = parse(args.formula)
    agents = args.agents.split(",") if args.agents else None
    verdict = bounded_sat(formula, args.max, args.semantics, agents=agents,
                          workers=args.config.sat_workers, fragment=args.fragment)
    report = {"command": "sat", "formula": to_text(formula), **verdict.to_dict()}
    if verdict.satisfiable:
        witness = NamedModel(verdict.model, tuple(f"s{x}" for x in range(verdict.model.carrier_size)))
        report["model"] = witness.to_dict()
        lines = [f"SAT with {verdict.bound} states at s{verdict.state}", str(witness)]
        if args.output:
            witness.to_file(args.output)
            lines.append(f"Generated {args.output}")
    else:
        lines = [f"UNSAT up to {verdict.bound} states (conclusive bound 2^{verdict.closure_size})"]
    lines.append(f"{verdict.models_examined} models examined")
    emit(args, report, lines)
    return 0 if verdict.satisfiable else 1


def cmd_audit(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else args.config.seed
    config = AuditConfig(n_models=args.n, seed=seed, max_states=args.max)
    report = axiom_audit(config, seed_models=[load_example().model])
    lines = []
    for r in report.results:
        status = "ok" if not r.unexpected else "UNEXPECTED"
        found = "counterexample" if r.counterexample else "no counterexample"
        lines.append(f"[{status}] {r.semantics:<9} {r.table:<28} {r.scheme:<40} {r.instances:>6} instances, {found}")
    lines.append("audit passed" if report.ok else f"{len(report.failures())} unexpected results")
    emit(args, {"command": "audit", **report.to_dict()}, lines)
    return 0 if report.ok else 1


def cmd_closure(args: argparse.Namespace) -> int:
    formula = parse(args.formula)
    if not is_static(formula) or not in_language(formula, LanguageTag.EV_FULL):
        formula = to_static(formula)
    agents = args.agents.split(",") if args.agents else None
    if agents is None:
        agents = agent_names(formula) or ["a"]
    if len(agents) > args.config.max_agents:
        raise InvalidInputError(f"{len(agents)} agents exceed the limit of {args.config.max_agents}")
    members = sorted(closure_set(formula, agents), key=formula_order)
    report = {"command": "closure", "formula": to_text(formula), "agents": agents,
              "size": len(members), "closure": [to_text(f) for f in members]}
    emit(args, report, [to_text(f) for f in members] + [f"{len(members)} formulas"])
    return 0


def cmd_unravel(args: argparse.Namespace) -> int:
    named = load(args, args.model)
    model = named.model
    if isinstance(model, KBPseudoModel):
        model = evidence_from_kb(model)
    elif not isinstance(model, EvPseudoModel):
        model = convert(model, "ev_pseudo", "iA")
    formula = parse(args.formula) if args.formula else None
    if formula is not None and not in_language(formula, LanguageTag.EV_FULL):
        evidence_formula = to_static(formula, model.agents)
    else:
        evidence_formula = formula
    depth = args.depth if args.depth is not None else (modal_depth(evidence_formula) if formula else 1)
    root = named.state(args.state)
    tree = unravel(model, root, depth)
    check = last_pmorphism_check(tree)
    report = {"command": "unravel", "root": named.states[root], "depth": depth,
              "histories": len(tree.histories), "grafted": tree.grafted, "pmorphism": check.to_dict()}
    scope = "everywhere" if tree.grafted else "away from the frontier"
    lines = [
        f"{len(tree.histories)} histories up to depth {depth} from {named.states[root]}"
        + (f", frontier joined to {len(tree.copies)} copy states" if tree.grafted else ""),
        f"last is {'a p-morphism ' + scope if check.ok else 'NOT a p-morphism'}"
        f" ({check.interior} histories checked for back, {check.frontier} on the frontier)",
    ]
    code = 0 if check.ok else 1
    if formula is not None:
        at_root = evaluate(tree.model, formula).holds_at(0)
        at_source = evaluate(model, formula).holds_at(root)
        report["formula"] = {"text": to_text(formula), "root": at_root, "source": at_source}
        lines.append(f"{to_text(formula)}: {at_root} at the root, {at_source} at {named.states[root]}")
    emit(args, report, lines)
    return code


def cmd_validate(args: argparse.Namespace) -> int:
    named = load(args, args.model, check=False)
    report = validate(named.model, max_carrier=args.config.max_carrier)
    lines = [f"{named.kind} model: {'valid' if report.ok else 'INVALID'}"]
    lines.extend(f"  [{v['condition']}] {v['message']}" for v in report.violations)
    lines.extend(f"  {name}: {value}" for name, value in report.properties.items())
    emit(args, {"command": "validate", **report.to_dict()}, lines)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output.")
    common.add_argument("-v", "--verbose", action="store_true", help="Log at INFO level.")

    parser = argparse.ArgumentParser(prog="evidence_logic", parents=[common],
                                     description="Multi-agent topological evidence logic toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="Evaluate a formula on a model.")
    p.add_argument("model", type=str, help="Model file.")
    p.add_argument("formula", type=str, help="Formula text.")
    p.add_argument("--at", type=str, help="State name for a single verdict.")
    p.add_argument("--trace", action="store_true", help="Print every subformula's extension.")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("share", parents=[common], help="Apply evidence sharing within a group.")
    p.add_argument("model", type=str, help="Topo model file.")
    p.add_argument("group", type=str, help="Group such as {a,b} or A.")
    p.add_argument("--output", type=str, help="Where to write the updated model.")
    p.set_defaults(handler=cmd_share)

    p = sub.add_parser("translate", parents=[common], help="Translate or reduce a formula.")
    p.add_argument("formula", type=str, help="Formula text.")
    p.add_argument("--mode", choices=("tr", "reduce", "static"), default="tr")
    p.add_argument("--agents", type=str, help="Comma-separated agent universe.")
    p.add_argument("--verify", type=str, help="Model file on which to compare both formulas.")
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser("convert", parents=[common], help="Convert a model to another kind.")
    p.add_argument("model", type=str, help="Model file.")
    p.add_argument("--to", choices=("topo", "relational", "ev_pseudo", "kb_pseudo"), required=True)
    p.add_argument("--fragment", choices=("full", "iA"), default="full")
    p.add_argument("--output", type=str, help="Where to write the converted model.")
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("sat", parents=[common], help="Bounded satisfiability search.")
    p.add_argument("formula", type=str, help="Formula text.")
    p.add_argument("--max", type=int, default=3, help="Largest number of states to try.")
    p.add_argument("--semantics", choices=("topo", "ev_pseudo"), default="topo")
    p.add_argument("--fragment", choices=("full", "iA"),
                   help="Pseudo-model signature (defaults to the smallest that fits).")
    p.add_argument("--agents", type=str, help="Comma-separated agent universe.")
    p.add_argument("--output", type=str, help="Where to write a witness model.")
    p.set_defaults(handler=cmd_sat)

    p = sub.add_parser("audit", parents=[common], help="Axiom soundness audit on random models.")
    p.add_argument("--n", type=int, default=1000, help="Random models per semantics.")
    p.add_argument("--seed", type=int, help="Random seed (defaults to EVIDENCE_SEED).")
    p.add_argument("--max", type=int, default=4, help="Largest random model.")
    p.set_defaults(handler=cmd_audit)

    p = sub.add_parser("closure", parents=[common], help="List the closure set of a formula.")
    p.add_argument("formula", type=str, help="Formula text.")
    p.add_argument("--agents", type=str, help="Comma-separated agent universe.")
    p.set_defaults(handler=cmd_closure)

    p = sub.add_parser("unravel", parents=[common], help="Unravel a model into histories.")
    p.add_argument("model", type=str, help="Model file.")
    p.add_argument("state", type=str, help="Root state.")
    p.add_argument("--depth", type=int, help="History length bound (defaults to the formula's modal depth).")
    p.add_argument("--formula", type=str, help="Compare this formula at the root and at the state.")
    p.set_defaults(handler=cmd_unravel)

    p = sub.add_parser("validate", parents=[common], help="Report every violated model condition.")
    p.add_argument("model", type=str, help="Model file.")
    p.set_defaults(handler=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config = load_config()
    except EvidenceLogicError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    level = "INFO" if args.verbose else args.config.log_level
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        return args.handler(args)
    except (EvidenceLogicError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
