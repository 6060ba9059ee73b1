"""The model zoo: topo-e-models, relational evidence models, evidence pseudo-models and KB pseudo-models.

Agents are indexed ``0..k-1`` and a group is a non-empty bitmask over agent indices.
Agent names only matter when formulas are resolved against a model; the name ``A`` is
reserved for the group of all agents.
"""
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Mapping, Sequence, TypedDict
import json
import logging
import re

from .errors import InvalidInputError
from .topology import (
    DEFAULT_MAX_CARRIER,
    Partition,
    Relation,
    StateSet,
    Topology,
    dense_open,
    full_set,
    generate_topology,
    intersect,
    is_equivalence,
    is_preorder,
    is_subrelation,
    is_weakly_directed,
    join,
    join_partition,
    members,
)

logger = logging.getLogger(__name__)

FULL_GROUP = "A"
DEFAULT_MAX_AGENTS = 8

ATOM_PATTERN = re.compile(r"[a-z][a-z0-9_]*")
AGENT_PATTERN = re.compile(r"[A-Za-z0-9_]+")

Fragment = Literal["full", "iA"]


# ---------------------------------------------------------------------------
# groups

def singletons(n_agents: int) -> list[int]:
    return [1 << i for i in range(n_agents)]


def all_groups(n_agents: int) -> list[int]:
    """Every non-empty group, smaller groups first."""
    return sorted(range(1, 1 << n_agents), key=lambda g: (g.bit_count(), g))


def fragment_groups(n_agents: int) -> list[int]:
    """Individuals and the full group."""
    return list(dict.fromkeys(singletons(n_agents) + [full_set(n_agents)]))


def groups_for(n_agents: int, fragment: Fragment) -> list[int]:
    return all_groups(n_agents) if fragment == "full" else fragment_groups(n_agents)


def check_group(group: int, n_agents: int) -> None:
    if group == 0:
        raise InvalidInputError("groups must be non-empty")
    if group < 0 or group >> n_agents:
        raise InvalidInputError(f"group {group:b} mentions agents outside 0..{n_agents - 1}")


def resolve_group(names: Iterable[str], agents: Sequence[str]) -> int:
    """Bitmask of a group given by agent names, ``A`` standing for everyone."""
    mask = 0
    for name in names:
        if name == FULL_GROUP:
            mask |= full_set(len(agents))
            continue
        try:
            mask |= 1 << agents.index(name)
        except ValueError:
            raise InvalidInputError(f"unknown agent {name!r}, model declares {list(agents)}") from None
    if mask == 0:
        raise InvalidInputError("groups must be non-empty")
    return mask


def group_names(group: int, agents: Sequence[str]) -> list[str]:
    return [agents[i] for i in members(group)]


# ---------------------------------------------------------------------------
# validation reports

class Violation(TypedDict):
    condition: str
    message: str
    witness: list[int]


class ValidationReport:
    """Every violated condition of one model, not just the first."""

    def __init__(self, kind: str, conditions: Sequence[str]):
        self.kind = kind
        self.conditions = list(conditions)
        self.violations: list[Violation] = []
        self.properties: dict[str, bool] = {}

    def add(self, condition: str, message: str, witness: Iterable[int] = ()) -> None:
        self.violations.append(Violation(condition=condition, message=message, witness=list(witness)))

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, condition: str) -> list[Violation]:
        return [v for v in self.violations if v["condition"] == condition]

    def passed(self, condition: str) -> bool:
        return not self.failed(condition)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "valid": self.ok,
            "conditions": {c: self.passed(c) for c in self.conditions},
            "properties": dict(self.properties),
            "violations": list(self.violations),
        }

    def __str__(self) -> str:
        return json.dumps(self.to_dict(), indent=4, ensure_ascii=False)


def _check_names(report: ValidationReport, agents: Sequence[str], valuation: Mapping[str, StateSet], n: int) -> None:
    if not agents:
        report.add("agents", "a model needs at least one agent")
    if len(set(agents)) != len(agents):
        report.add("agents", f"agent names are not unique: {list(agents)}")
    for name in agents:
        if name == FULL_GROUP or not AGENT_PATTERN.fullmatch(name):
            report.add("agents", f"invalid agent name {name!r}")
    for atom, ext in valuation.items():
        if not ATOM_PATTERN.fullmatch(atom):
            report.add("valuation", f"invalid atom name {atom!r}")
        if ext < 0 or ext >> n:
            report.add("valuation", f"extension of {atom!r} leaves the carrier")


def _check_relation(report: ValidationReport, condition: str, label: str, r: Relation, n: int) -> bool:
    if len(r) != n or any(row < 0 or row >> n for row in r):
        report.add(condition, f"{label} is not a relation on {n} states")
        return False
    return True


# ---------------------------------------------------------------------------
# topo-e-models

@dataclass(frozen=True)
class TopoEModel:
    carrier_size: int
    agents: tuple[str, ...]
    partitions: tuple[Partition, ...]
    topologies: tuple[Topology, ...]
    valuation: Mapping[str, StateSet] = field(default_factory=dict)

    @property
    def full_group(self) -> int:
        return full_set(len(self.agents))

    def group(self, names: Iterable[str]) -> int:
        return resolve_group(names, self.agents)


TOPO_CONDITIONS = ("carrier", "agents", "partition", "topology", "hard evidence is evidence", "valuation")


def validate_topo(model: TopoEModel, *, max_carrier: int = DEFAULT_MAX_CARRIER) -> ValidationReport:
    report = ValidationReport("topo", TOPO_CONDITIONS)
    n = model.carrier_size
    if not 1 <= n <= max_carrier:
        report.add("carrier", f"carrier size {n} outside 1..{max_carrier}")
        return report
    _check_names(report, model.agents, model.valuation, n)
    if not len(model.agents) == len(model.partitions) == len(model.topologies):
        report.add("agents", "each agent needs exactly one partition and one topology")
        return report
    for name, pi, tau in zip(model.agents, model.partitions, model.topologies):
        seen = 0
        partition_ok = pi.carrier_size == n
        for c in pi.cells:
            if c == 0 or c < 0 or c >> n:
                report.add("partition", f"agent {name}: a cell is empty or leaves the carrier")
                partition_ok = False
            elif c & seen:
                report.add("partition", f"agent {name}: cell {members(c)} overlaps another cell", members(c & seen))
                partition_ok = False
            seen |= c
        if seen != full_set(n):
            report.add("partition", f"agent {name}: cells do not cover the carrier")
            partition_ok = False
        if tau.carrier_size != n:
            report.add("topology", f"agent {name}: topology lives on {tau.carrier_size} states")
            continue
        try:
            Topology.from_opens(tau.opens, n)
        except InvalidInputError as e:
            report.add("topology", f"agent {name}: {e}")
            continue
        for s in tau.subbasis:
            if s == 0 or s not in tau.opens:
                report.add("topology", f"agent {name}: subbasis member {members(s)} is not a non-empty open")
        if partition_ok:
            for c in pi.cells:
                if c not in tau.opens:
                    report.add("hard evidence is evidence", f"agent {name}: cell {members(c)} not open", members(c))
    return report


def group_structure(model: TopoEModel, group: int) -> tuple[Partition, Topology]:
    """Pooled hard evidence (common refinement) and pooled soft evidence (join) of a group."""
    check_group(group, len(model.agents))
    idx = members(group)
    return (
        join_partition([model.partitions[i] for i in idx]),
        join([model.topologies[i] for i in idx]),
    )


def dense_group_topology(model: TopoEModel, group: int) -> Topology:
    pi, tau = group_structure(model, group)
    return dense_open(tau, pi)


def share_update(model: TopoEModel, group: int) -> TopoEModel:
    """Members of ``group`` adopt the group's partition and topology; everyone else keeps theirs."""
    pi, tau = group_structure(model, group)
    partitions = list(model.partitions)
    topologies = list(model.topologies)
    for i in members(group):
        partitions[i] = pi
        topologies[i] = tau
    logger.debug("share_%s: %d opens, %d cells", group_names(group, model.agents), len(tau.opens), len(pi.cells))
    return replace(model, partitions=tuple(partitions), topologies=tuple(topologies))


# ---------------------------------------------------------------------------
# relational evidence models

@dataclass(frozen=True)
class RelationalEvidenceModel:
    carrier_size: int
    agents: tuple[str, ...]
    preorders: tuple[Relation, ...]
    equivalences: tuple[Relation, ...]
    valuation: Mapping[str, StateSet] = field(default_factory=dict)

    @property
    def full_group(self) -> int:
        return full_set(len(self.agents))

    def group(self, names: Iterable[str]) -> int:
        return resolve_group(names, self.agents)

    # group relations are intersections and are never stored
    def group_preorder(self, group: int) -> Relation:
        check_group(group, len(self.agents))
        return intersect(*(self.preorders[i] for i in members(group)))

    def group_equivalence(self, group: int) -> Relation:
        check_group(group, len(self.agents))
        return intersect(*(self.equivalences[i] for i in members(group)))


RELATIONAL_CONDITIONS = ("agents", "preorder", "equivalence", "inclusion", "valuation")


def validate_relational(model: RelationalEvidenceModel) -> ValidationReport:
    report = ValidationReport("relational", RELATIONAL_CONDITIONS)
    n = model.carrier_size
    _check_names(report, model.agents, model.valuation, n)
    if not len(model.agents) == len(model.preorders) == len(model.equivalences):
        report.add("agents", "each agent needs exactly one preorder and one equivalence")
        return report
    for name, le, sim in zip(model.agents, model.preorders, model.equivalences):
        ok = _check_relation(report, "preorder", f"<= of {name}", le, n)
        ok = _check_relation(report, "equivalence", f"~ of {name}", sim, n) and ok
        if not ok:
            continue
        if not is_preorder(le):
            report.add("preorder", f"<= of {name} is not reflexive and transitive")
        if not is_equivalence(sim):
            report.add("equivalence", f"~ of {name} is not an equivalence relation")
        if not is_subrelation(le, sim):
            report.add("inclusion", f"<= of {name} is not contained in ~ of {name}")
    return report


# ---------------------------------------------------------------------------
# evidence pseudo-models

@dataclass(frozen=True)
class EvPseudoModel:
    """Relations for every group (``full``) or for individuals and everyone (``iA``)."""

    carrier_size: int
    agents: tuple[str, ...]
    preorders: Mapping[int, Relation]
    equivalences: Mapping[int, Relation]
    valuation: Mapping[str, StateSet] = field(default_factory=dict)
    fragment: Fragment = "full"

    @property
    def full_group(self) -> int:
        return full_set(len(self.agents))

    def group(self, names: Iterable[str]) -> int:
        return resolve_group(names, self.agents)

    def groups(self) -> list[int]:
        return sorted(self.preorders, key=lambda g: (g.bit_count(), g))

    def preorder(self, group: int) -> Relation:
        try:
            return self.preorders[group]
        except KeyError:
            raise InvalidInputError(
                f"group {group_names(group, self.agents)} is not materialized in this {self.fragment} pseudo-model"
            ) from None

    def equivalence(self, group: int) -> Relation:
        try:
            return self.equivalences[group]
        except KeyError:
            raise InvalidInputError(
                f"group {group_names(group, self.agents)} is not materialized in this {self.fragment} pseudo-model"
            ) from None


EV_PSEUDO_CONDITIONS = ("agents", "groups", "preorder", "equivalence", "anti-monotonicity", "inclusion", "valuation")


def validate_ev_pseudo(model: EvPseudoModel) -> ValidationReport:
    report = ValidationReport("ev_pseudo", EV_PSEUDO_CONDITIONS)
    n = model.carrier_size
    k = len(model.agents)
    _check_names(report, model.agents, model.valuation, n)
    expected = set(groups_for(k, model.fragment))
    if set(model.preorders) != expected or set(model.equivalences) != expected:
        report.add("groups", f"relations must be given exactly for the groups of the {model.fragment} signature")
        return report
    for g in sorted(expected):
        label = ",".join(group_names(g, model.agents))
        ok = _check_relation(report, "preorder", f"<= of {{{label}}}", model.preorders[g], n)
        ok = _check_relation(report, "equivalence", f"~ of {{{label}}}", model.equivalences[g], n) and ok
        if not ok:
            return report
        if not is_preorder(model.preorders[g]):
            report.add("preorder", f"<= of {{{label}}} is not reflexive and transitive")
        if not is_equivalence(model.equivalences[g]):
            report.add("equivalence", f"~ of {{{label}}} is not an equivalence relation")
        if not is_subrelation(model.preorders[g], model.equivalences[g]):
            report.add("inclusion", f"<= of {{{label}}} is not contained in ~ of {{{label}}}")
    for big in expected:
        for small in expected:
            if small == big or small & ~big:
                continue
            label = f"{group_names(small, model.agents)} within {group_names(big, model.agents)}"
            if not is_subrelation(model.preorders[big], model.preorders[small]):
                report.add("anti-monotonicity", f"<= grows from {label}")
            if not is_subrelation(model.equivalences[big], model.equivalences[small]):
                report.add("anti-monotonicity", f"~ grows from {label}")
    return report


def is_standard(model: EvPseudoModel) -> bool:
    """Group relations are exactly the intersections of the members' relations."""
    for g in model.preorders:
        if g.bit_count() < 2:
            continue
        idx = members(g)
        if model.preorders[g] != intersect(*(model.preorders[1 << i] for i in idx)):
            return False
        if model.equivalences[g] != intersect(*(model.equivalences[1 << i] for i in idx)):
            return False
    return True


# ---------------------------------------------------------------------------
# KB pseudo-models

@dataclass(frozen=True)
class KBPseudoModel:
    """Knowledge (``⊴``) and belief (``→``) relations for each agent and for everyone."""

    carrier_size: int
    agents: tuple[str, ...]
    knowledge: Mapping[int, Relation]
    belief: Mapping[int, Relation]
    valuation: Mapping[str, StateSet] = field(default_factory=dict)

    @property
    def full_group(self) -> int:
        return full_set(len(self.agents))

    def group(self, names: Iterable[str]) -> int:
        return resolve_group(names, self.agents)

    def labels(self) -> list[int]:
        return fragment_groups(len(self.agents))


KB_CONDITIONS = (
    "knowledge preorder",
    "belief serial",
    "belief transitive",
    "belief Euclidean",
    "inclusion",
    "strong transitivity",
    "strong Euclideanity",
    "full belief",
    "WM-Condition",
    "Super-Introspection condition",
    "CBD-Condition",
)


def validate_kb_pseudo(model: KBPseudoModel) -> ValidationReport:
    report = ValidationReport("kb_pseudo", KB_CONDITIONS)
    n = model.carrier_size
    k = len(model.agents)
    _check_names(report, model.agents, model.valuation, n)
    labels = fragment_groups(k)
    if set(model.knowledge) != set(labels) or set(model.belief) != set(labels):
        report.add("knowledge preorder", "relations must be given for every agent and for the full group")
        return report
    for g in labels:
        if not (_check_relation(report, "knowledge preorder", "knowledge", model.knowledge[g], n)
                and _check_relation(report, "belief serial", "belief", model.belief[g], n)):
            return report

    for g in labels:
        name = "A" if g == full_set(k) and k > 1 else ",".join(group_names(g, model.agents))
        know, bel = model.knowledge[g], model.belief[g]
        if not is_preorder(know):
            report.add("knowledge preorder", f"knowledge of {name} is not a preorder")
        for s in range(n):
            if bel[s] == 0:
                report.add("belief serial", f"seriality violated at {s} for {name}", [s])
            for t in members(bel[s]):
                for u in members(bel[t] & ~bel[s]):
                    report.add("belief transitive", f"{s} -> {t} -> {u} but not {s} -> {u} for {name}", [s, t, u])
                for u in members(bel[s] & ~bel[t]):
                    report.add("belief Euclidean", f"{s} -> {t} and {s} -> {u} but not {t} -> {u} for {name}", [s, t, u])
                for u in members(know[t] & ~bel[s]):
                    report.add("full belief", f"{s} -> {t} ⊴ {u} but not {s} -> {u} for {name}", [s, t, u])
            for t in members(bel[s] & ~know[s]):
                report.add("inclusion", f"{s} -> {t} but not {s} ⊴ {t} for {name}", [s, t])
            for t in members(know[s]):
                for u in members(bel[t] & ~bel[s]):
                    report.add("strong transitivity", f"{s} ⊴ {t} -> {u} but not {s} -> {u} for {name}", [s, t, u])
                for u in members(bel[s] & ~bel[t]):
                    report.add("strong Euclideanity", f"{s} ⊴ {t}, {s} -> {u} but not {t} -> {u} for {name}", [s, t, u])

    full = full_set(k)
    know_all, bel_all = model.knowledge[full], model.belief[full]
    for i, g in enumerate(singletons(k)):
        for s in range(n):
            for t in members(know_all[s] & ~(model.knowledge[g][s] | bel_all[s])):
                report.add("WM-Condition", f"{s} ⊴_A {t} but neither {s} ⊴_{model.agents[i]} {t} nor {s} ->_A {t}", [s, t])
            for t in members(know_all[s]):
                diff = model.belief[g][s] ^ model.belief[g][t]
                for u in members(diff):
                    report.add(
                        "Super-Introspection condition",
                        f"{s} ⊴_A {t} but {model.agents[i]}'s beliefs at {s} and {t} differ on {u}",
                        [s, t, u],
                    )
    common = intersect(bel_all, *(model.knowledge[g] for g in singletons(k)))
    for s in range(n):
        if common[s] == 0:
            report.add("CBD-Condition", f"no ->_A successor of {s} is known-possible by every agent", [s])

    report.properties["knowledge weakly directed"] = all(is_weakly_directed(model.knowledge[g]) for g in labels)
    return report


# ---------------------------------------------------------------------------
# maximal worlds

def max_worlds(r: Relation) -> StateSet:
    """States every successor of which reaches back: ``{s | s R w implies w R s}``."""
    out = 0
    for s, row in enumerate(r):
        if all(r[w] >> s & 1 for w in members(row)):
            out |= 1 << s
    return out


def is_max_dense(r: Relation) -> bool:
    if not is_preorder(r):
        raise InvalidInputError("max-density is defined for preorders")
    top = max_worlds(r)
    return all(row & top for row in r)


# ---------------------------------------------------------------------------
# conversions

def require_valid(report: ValidationReport) -> None:
    if not report.ok:
        first = report.violations[0]
        raise InvalidInputError(f"invalid {report.kind} model: {first['message']} ({len(report.violations)} violations)")


def rel_of_topo(model: TopoEModel, *, max_carrier: int = DEFAULT_MAX_CARRIER) -> RelationalEvidenceModel:
    """Specialization preorder inside each cell, and the cell equivalence."""
    require_valid(validate_topo(model, max_carrier=max_carrier))
    preorders = []
    equivalences = []
    for pi, tau in zip(model.partitions, model.topologies):
        sim = pi.equivalence()
        preorders.append(tuple(u & c for u, c in zip(tau.neighbourhoods, sim)))
        equivalences.append(sim)
    return RelationalEvidenceModel(
        model.carrier_size, model.agents, tuple(preorders), tuple(equivalences), dict(model.valuation)
    )


def topo_of_rel(model: RelationalEvidenceModel, *, max_carrier: int = DEFAULT_MAX_CARRIER) -> TopoEModel:
    """Up-set topologies and the quotient partitions."""
    require_valid(validate_relational(model))
    n = model.carrier_size
    topologies = tuple(generate_topology(list(dict.fromkeys(le)), n, max_carrier=max_carrier) for le in model.preorders)
    partitions = tuple(Partition.from_equivalence(sim) for sim in model.equivalences)
    return TopoEModel(n, model.agents, partitions, topologies, dict(model.valuation))


def ev_pseudo_of_rel(model: RelationalEvidenceModel, fragment: Fragment = "full") -> EvPseudoModel:
    """Standard pseudo-model: group relations materialized as intersections."""
    require_valid(validate_relational(model))
    groups = groups_for(len(model.agents), fragment)
    return EvPseudoModel(
        model.carrier_size,
        model.agents,
        {g: model.group_preorder(g) for g in groups},
        {g: model.group_equivalence(g) for g in groups},
        dict(model.valuation),
        fragment,
    )


def rel_of_standard_pseudo(model: EvPseudoModel) -> RelationalEvidenceModel:
    require_valid(validate_ev_pseudo(model))
    if not is_standard(model):
        raise InvalidInputError("pseudo-model is not standard: some group relation is not the members' intersection")
    k = len(model.agents)
    return RelationalEvidenceModel(
        model.carrier_size,
        model.agents,
        tuple(model.preorders[g] for g in singletons(k)),
        tuple(model.equivalences[g] for g in singletons(k)),
        dict(model.valuation),
    )


def check_state(model, x: int) -> None:
    if not 0 <= x < model.carrier_size:
        raise InvalidInputError(f"state {x} outside carrier of size {model.carrier_size}")
