"""Bounded unraveling of an evidence pseudo-model into a tree of histories.

A history starts at a root state and records each step with the relation it used: ``P`` for
a step along an evidence order and ``E`` for a step along an information equivalence,
together with the group whose relation was followed. The associated relational model gives
agent ``i`` the order generated by ``P``-steps of groups containing ``i`` and the equivalence
generated by all steps of groups containing ``i``. Its group relations, being intersections,
then follow exactly the steps labelled with supergroups.

Only histories of length at most ``depth`` are kept. When the source is standard, every
frontier history is joined to a copy of the submodel generated by the root along the members'
relations, and ``last`` is a p-morphism everywhere, so every formula keeps its truth value at
the root. A non-standard source has no relational copy to join. Its frontier histories lack
back steps, and as the relations are closed transitively a frontier history sits one step
from the root: the truncated tree then preserves formulas of modal depth at most one.
"""
from dataclasses import dataclass
from typing import Literal
import logging

from ..models import (
    EvPseudoModel,
    RelationalEvidenceModel,
    ValidationReport,
    check_state,
    group_names,
    is_standard,
    rel_of_standard_pseudo,
    require_valid,
    validate_ev_pseudo,
)
from ..topology import (
    Relation,
    members,
)

logger = logging.getLogger(__name__)

StepKind = Literal["P", "E"]


@dataclass(frozen=True)
class Step:
    kind: StepKind
    group: int
    state: int


@dataclass(frozen=True)
class History:
    root: int
    steps: tuple[Step, ...] = ()

    @property
    def last(self) -> int:
        return self.steps[-1].state if self.steps else self.root

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, kind: StepKind, group: int, state: int) -> "History":
        return History(self.root, self.steps + (Step(kind, group, state),))

    def show(self, states: list[str] | None = None, agents: tuple[str, ...] = ()) -> str:
        name = (lambda s: states[s]) if states else str
        parts = [name(self.root)]
        for step in self.steps:
            label = ",".join(group_names(step.group, agents)) if agents else f"{step.group:b}"
            parts.append(f"{step.kind}{{{label}}}")
            parts.append(name(step.state))
        return " ".join(parts)


@dataclass(frozen=True)
class UnraveledModel:
    """Histories take the first states of ``model``, the grafted copy states the rest."""

    model: RelationalEvidenceModel
    histories: tuple[History, ...]
    depth: int
    source: EvPseudoModel
    copies: tuple[int, ...] = ()

    @property
    def grafted(self) -> bool:
        return bool(self.copies)

    def last(self, h: int) -> int:
        if h < len(self.histories):
            return self.histories[h].last
        return self.copies[h - len(self.histories)]

    def index(self, history: History) -> int:
        return self.histories.index(history)

    @property
    def frontier(self) -> list[int]:
        return [h for h, history in enumerate(self.histories) if len(history) == self.depth]

    @property
    def open(self) -> list[int]:
        """Frontier histories without back steps."""
        return [] if self.grafted else self.frontier


def generated_states(model: EvPseudoModel, root: int) -> list[int]:
    reached = 1 << root
    while True:
        grown = reached
        for g in model.groups():
            for s in members(reached):
                grown |= model.equivalence(g)[s]
        if grown == reached:
            return members(reached)
        reached = grown


def _classes(size: int, links: list[tuple[int, int]]) -> Relation:
    """The equivalence generated by ``links``, one class mask per node."""
    leader = list(range(size))

    def find(x: int) -> int:
        while leader[x] != x:
            leader[x] = leader[leader[x]]
            x = leader[x]
        return x

    for x, y in links:
        rx, ry = find(x), find(y)
        if rx != ry:
            leader[max(rx, ry)] = min(rx, ry)
    masks: dict[int, int] = {}
    for x in range(size):
        masks[find(x)] = masks.get(find(x), 0) | 1 << x
    return tuple(masks[find(x)] for x in range(size))


def unravel(model: EvPseudoModel, root: int, depth: int, *, graft: bool = True) -> UnraveledModel:
    """Histories of length at most ``depth`` out of ``root``, as a relational evidence model.

    With ``graft`` set and a standard source, the frontier is joined to a copy of the submodel
    generated by ``root``.
    """
    require_valid(validate_ev_pseudo(model))
    check_state(model, root)
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    histories = [History(root)]
    parents: list[tuple[int, Step] | None] = [None]
    frontier = [0]
    for _ in range(depth):
        grown = []
        for h in frontier:
            s = histories[h].last
            for g in model.groups():
                for kind, relation in (("P", model.preorder(g)), ("E", model.equivalence(g))):
                    for t in members(relation[s]):
                        histories.append(histories[h].extend(kind, g, t))
                        parents.append((h, histories[-1].steps[-1]))
                        grown.append(len(histories) - 1)
        frontier = grown

    copies: list[int] = []
    per_agent = None
    if graft and is_standard(model):
        per_agent = rel_of_standard_pseudo(model)
        copies = generated_states(model, root)
    elif graft:
        logger.info("source is not standard, %d frontier histories stay open", len(frontier))
    size = len(histories) + len(copies)
    lasts = [history.last for history in histories] + copies
    node = {s: len(histories) + c for c, s in enumerate(copies)}
    logger.info("unraveled %d histories up to depth %d and %d copy states", len(histories), depth, len(copies))

    preorders: list[Relation] = []
    equivalences: list[Relation] = []
    for i in range(len(model.agents)):
        steps: list[list[int]] = [[] for _ in range(size)]
        links: list[tuple[int, int]] = []
        for child, parent in enumerate(parents):
            if parent is None:
                continue
            h, step = parent
            if not step.group >> i & 1:
                continue
            links.append((h, child))
            if step.kind == "P":
                steps[h].append(child)
        rows = [1 << x for x in range(size)]
        if per_agent is not None:
            le, sim = per_agent.preorders[i], per_agent.equivalences[i]
            for x in frontier + list(node.values()):
                rows[x] |= sum(1 << node[t] for t in members(le[lasts[x]]))
                links.extend((x, node[t]) for t in members(sim[lasts[x]]))
        # children come after their parents and the copy rows are already closed
        for h in reversed(range(len(histories))):
            for child in steps[h]:
                rows[h] |= rows[child]
        preorders.append(tuple(rows))
        equivalences.append(_classes(size, links))
    valuation = {
        p: sum(1 << x for x, s in enumerate(lasts) if ext >> s & 1)
        for p, ext in model.valuation.items()
    }
    tree = RelationalEvidenceModel(size, model.agents, tuple(preorders), tuple(equivalences), valuation)
    return UnraveledModel(tree, tuple(histories), depth, model, tuple(copies))


@dataclass
class PMorphismReport:
    report: ValidationReport
    interior: int
    frontier: int
    copies: int = 0

    @property
    def ok(self) -> bool:
        return self.report.ok

    def to_dict(self) -> dict:
        data = self.report.to_dict()
        data["interior histories"] = self.interior
        data["frontier histories"] = self.frontier
        data["copy states"] = self.copies
        return data


PMORPHISM_CONDITIONS = ("atoms", "forth", "back")


def last_pmorphism_check(unraveled: UnraveledModel, model: EvPseudoModel | None = None) -> PMorphismReport:
    """Atoms and forth everywhere, back everywhere but at open frontier histories.

    ``interior`` counts the histories checked for back.
    """
    source = model if model is not None else unraveled.source
    tree = unraveled.model
    report = ValidationReport("pmorphism", PMORPHISM_CONDITIONS)
    lasts = [unraveled.last(x) for x in range(tree.carrier_size)]
    skipped = set(unraveled.open)

    for p, ext in source.valuation.items():
        extension = tree.valuation.get(p, 0)
        for h, s in enumerate(lasts):
            if (extension >> h & 1) != (ext >> s & 1):
                report.add("atoms", f"{p} differs between node {h} and state {s}", [h])

    relations = []
    for g in source.groups():
        label = ",".join(group_names(g, source.agents))
        relations.append((label, "<=", tree.group_preorder(g), source.preorder(g)))
        relations.append((label, "~", tree.group_equivalence(g), source.equivalence(g)))

    fibres = [0] * source.carrier_size
    for h, s in enumerate(lasts):
        fibres[s] |= 1 << h

    def image(row: int) -> int:
        return sum(1 << t for t, fibre in enumerate(fibres) if row & fibre)

    for h in range(tree.carrier_size):
        for label, symbol, tree_rel, source_rel in relations:
            reached = image(tree_rel[h])
            for t in members(reached & ~source_rel[lasts[h]]):
                h2 = members(tree_rel[h] & fibres[t])[0]
                report.add("forth", f"node {h} {symbol}_{label} {h2} but not on their last states", [h, h2])
            if h in skipped:
                continue
            for missing in members(source_rel[lasts[h]] & ~reached):
                report.add(
                    "back",
                    f"state {missing} follows last({h}) along {symbol}_{label} with no node behind it",
                    [h, missing],
                )
    return PMorphismReport(report, len(unraveled.histories) - len(skipped), len(unraveled.frontier), len(unraveled.copies))
