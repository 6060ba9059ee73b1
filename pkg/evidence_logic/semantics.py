"""Truth sets of formulas on every kind of model, and the group operators on sets."""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Literal, Mapping, TypedDict
import logging

from .errors import InvalidInputError, LanguageError
from .models import (
    EvPseudoModel,
    KBPseudoModel,
    RelationalEvidenceModel,
    TopoEModel,
    check_group,
    group_structure,
    max_worlds,
    share_update,
)
from .syntax import (
    B,
    And,
    Atom,
    Box,
    Forall,
    Formula,
    K,
    LanguageTag,
    Modal,
    Not,
    Share,
    in_language,
    is_static,
    reduce_dynamic,
    to_static,
    to_text,
    walk,
)
from .topology import (
    Partition,
    StateSet,
    Topology,
    check_within,
    complement,
    full_set,
    members,
    necessity,
)

logger = logging.getLogger(__name__)

Operator = Literal["forall", "box", "diamond", "belief", "knowledge", "knowledge_dual"]
OPERATORS: tuple[Operator, ...] = ("forall", "box", "diamond", "belief", "knowledge", "knowledge_dual")


@dataclass(frozen=True)
class EvalResult:
    extension: StateSet
    carrier_size: int
    trace: Mapping[Formula, StateSet] = field(default_factory=dict, compare=False, repr=False)

    def states(self) -> list[int]:
        return members(self.extension)

    def holds_at(self, x: int) -> bool:
        if not 0 <= x < self.carrier_size:
            raise InvalidInputError(f"state {x} outside carrier of size {self.carrier_size}")
        return bool(self.extension >> x & 1)

    @property
    def is_valid(self) -> bool:
        return self.extension == full_set(self.carrier_size)

    @property
    def is_satisfiable(self) -> bool:
        return self.extension != 0


# ---------------------------------------------------------------------------
# operators on sets

def hard_evidence(pi: Partition, p: StateSet) -> StateSet:
    """``[∀](P)``: union of the cells inside ``P``."""
    out = 0
    for c in pi.cells:
        if c & ~p == 0:
            out |= c
    return out


def belief(pi: Partition, tau: Topology, p: StateSet) -> StateSet:
    return hard_evidence(pi, tau.closure(tau.interior(p)))


def knowledge(pi: Partition, tau: Topology, p: StateSet) -> StateSet:
    return tau.interior(p) & belief(pi, tau, p)


def apply_operator(name: Operator, pi: Partition, tau: Topology, p: StateSet) -> StateSet:
    n = tau.carrier_size
    match name:
        case "forall":
            return hard_evidence(pi, p)
        case "box":
            return tau.interior(p)
        case "diamond":
            return tau.closure(p)
        case "belief":
            return belief(pi, tau, p)
        case "knowledge":
            return knowledge(pi, tau, p)
        case "knowledge_dual":
            return complement(knowledge(pi, tau, complement(p, n)), n)
    raise InvalidInputError(f"unknown operator {name!r}, expected one of {OPERATORS}")


class OperatorTable(TypedDict):
    forall: StateSet
    box: StateSet
    diamond: StateSet
    belief: StateSet
    knowledge: StateSet
    knowledge_dual: StateSet


def group_operator(model: TopoEModel, name: Operator, group: int, p: StateSet) -> StateSet:
    check_within(p, model.carrier_size)
    pi, tau = group_structure(model, group)
    return apply_operator(name, pi, tau, p)


def op_table(model: TopoEModel, group: int, p: StateSet) -> OperatorTable:
    """All six group operators applied to one set."""
    check_within(p, model.carrier_size)
    pi, tau = group_structure(model, group)
    return OperatorTable(**{name: apply_operator(name, pi, tau, p) for name in OPERATORS})


@dataclass(frozen=True)
class DistributednessFailure:
    target: StateSet
    state: int
    # a family (P_i) with ⋂P_i ⊆ target and state ∈ ⋂O_i(P_i); None when the group side is larger
    family: tuple[StateSet, ...] | None


def is_distributed(model: TopoEModel, name: Operator, group: int) -> DistributednessFailure | None:
    """Check ``x ∈ O_I(P)`` iff ``x ∈ ⋂O_i(P_i)`` for some family with ``⋂P_i ⊆ P``, for every ``P``.

    Exponential in carrier size times group size; meant for tiny models.
    """
    check_group(group, len(model.agents))
    n = model.carrier_size
    idx = members(group)
    structures = [group_structure(model, 1 << i) for i in idx]
    subsets = range(1 << n)
    images = [[apply_operator(name, pi, tau, p) for p in subsets] for pi, tau in structures]

    # best[q][x]: a family with intersection q whose members all hold at x
    best: dict[StateSet, dict[int, tuple[StateSet, ...]]] = {}
    for family in product(subsets, repeat=len(idx)):
        q = full_set(n)
        val = full_set(n)
        for k, p in enumerate(family):
            q &= p
            val &= images[k][p]
        row = best.setdefault(q, {})
        for x in members(val):
            row.setdefault(x, family)

    pi, tau = group_structure(model, group)
    for p in subsets:
        covered: dict[int, tuple[StateSet, ...]] = {}
        for q, row in best.items():
            if q & ~p == 0:
                for x, family in row.items():
                    covered.setdefault(x, family)
        lhs = apply_operator(name, pi, tau, p)
        for x in range(n):
            if (lhs >> x & 1) != (x in covered):
                return DistributednessFailure(p, x, covered.get(x))
    return None


def group_monotonicity_counterexample(
    model: TopoEModel, name: Operator, group: int, p: StateSet
) -> tuple[int, int] | None:
    """``(agent, state)`` with the state in ``O_i(P)`` but not in ``O_I(P)``."""
    check_within(p, model.carrier_size)
    whole = group_operator(model, name, group, p)
    for i in members(group):
        lost = group_operator(model, name, 1 << i, p) & ~whole
        if lost:
            return i, members(lost)[0]
    return None


def belief_via_max_worlds(model: KBPseudoModel, group: int, p: StateSet) -> StateSet:
    """Belief read off the maximal worlds: every ``⊴``-maximal successor lies in ``P``."""
    try:
        know = model.knowledge[group]
    except KeyError:
        raise InvalidInputError(f"group {group:b} has no knowledge relation in this KB pseudo-model") from None
    top = max_worlds(know)
    out = 0
    for s, row in enumerate(know):
        if row & top & ~p == 0:
            out |= 1 << s
    return out


# ---------------------------------------------------------------------------
# evaluators

class Evaluator(ABC):
    """Bottom-up evaluation with a cache that lives as long as the evaluator."""

    name: str

    def __init__(self, model):
        self.model = model
        self._cache: dict[Formula, StateSet] = {}

    @property
    def carrier_size(self) -> int:
        return self.model.carrier_size

    def group(self, names: Iterable[str]) -> int:
        return self.model.group(names)

    def evaluate(self, f: Formula) -> StateSet:
        try:
            return self._cache[f]
        except KeyError:
            pass
        match f:
            case Atom(name):
                try:
                    out = self.model.valuation[name]
                except KeyError:
                    raise InvalidInputError(f"atom {name!r} is not in the model's valuation") from None
            case Not(sub):
                out = complement(self.evaluate(sub), self.carrier_size)
            case And(left, right):
                out = self.evaluate(left) & self.evaluate(right)
            case Modal():
                out = self.modal(f)
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self._cache[f] = out
        return out

    @abstractmethod
    def modal(self, f: Modal) -> StateSet:
        pass

    def result(self, f: Formula, trace: bool = False) -> EvalResult:
        ext = self.evaluate(f)
        return EvalResult(ext, self.carrier_size, dict(self._cache) if trace else {})

    def reject(self, f: Modal, hint: str) -> LanguageError:
        return LanguageError(f"{type(f).__name__} is not interpreted on {self.name} models: {hint}")


class TopoEvaluator(Evaluator):
    name = "topo"

    def __init__(self, model: TopoEModel):
        super().__init__(model)
        self._structures: dict[int, tuple[Partition, Topology]] = {}

    def structure(self, group: int) -> tuple[Partition, Topology]:
        if group not in self._structures:
            self._structures[group] = group_structure(self.model, group)
        return self._structures[group]

    def modal(self, f: Modal) -> StateSet:
        group = self.group(f.group)
        if isinstance(f, Share):
            # the argument is evaluated in the updated model, not here
            return TopoEvaluator(share_update(self.model, group)).evaluate(f.sub)
        pi, tau = self.structure(group)
        p = self.evaluate(f.sub)
        match f:
            case Box():
                return tau.interior(p)
            case Forall():
                return hard_evidence(pi, p)
            case B():
                return belief(pi, tau, p)
            case K():
                return knowledge(pi, tau, p)
        raise TypeError(f"unknown modality {f!r}")


class RelationalEvaluator(Evaluator):
    name = "relational"

    def modal(self, f: Modal) -> StateSet:
        match f:
            case Box(g, sub):
                return necessity(self.model.group_preorder(self.group(g)), self.evaluate(sub))
            case Forall(g, sub):
                return necessity(self.model.group_equivalence(self.group(g)), self.evaluate(sub))
        raise self.reject(f, "translate to the static evidence language first")


class PseudoEvaluator(Evaluator):
    name = "evidence pseudo"

    def modal(self, f: Modal) -> StateSet:
        match f:
            case Box(g, sub):
                return necessity(self.model.preorder(self.group(g)), self.evaluate(sub))
            case Forall(g, sub):
                return necessity(self.model.equivalence(self.group(g)), self.evaluate(sub))
        raise self.reject(f, "translate to the static evidence language first")


class KBPseudoEvaluator(Evaluator):
    name = "KB pseudo"

    def _relation(self, relations: Mapping[int, tuple[int, ...]], f: Modal):
        group = self.group(f.group)
        try:
            return relations[group]
        except KeyError:
            raise LanguageError(
                f"{to_text(f)}: KB pseudo-models only interpret individual agents and the full group"
            ) from None

    def modal(self, f: Modal) -> StateSet:
        match f:
            case K(_, sub):
                return necessity(self._relation(self.model.knowledge, f), self.evaluate(sub))
            case B(_, sub):
                return necessity(self._relation(self.model.belief, f), self.evaluate(sub))
        raise self.reject(f, "only knowledge and belief are interpreted")


def eval_topo(model: TopoEModel, f: Formula, *, trace: bool = False) -> EvalResult:
    return TopoEvaluator(model).result(f, trace)


def eval_relational(model: RelationalEvidenceModel, f: Formula, *, trace: bool = False) -> EvalResult:
    return RelationalEvaluator(model).result(f, trace)


def eval_ev_pseudo(model: EvPseudoModel, f: Formula, *, trace: bool = False) -> EvalResult:
    return PseudoEvaluator(model).result(f, trace)


def eval_kb_pseudo(model: KBPseudoModel, f: Formula, *, trace: bool = False) -> EvalResult:
    return KBPseudoEvaluator(model).result(f, trace)


def evaluate(model, f: Formula, *, trace: bool = False) -> EvalResult:
    """Evaluate on any model kind, translating first when the model has no direct clause."""
    match model:
        case TopoEModel():
            return eval_topo(model, f, trace=trace)
        case RelationalEvidenceModel() | EvPseudoModel():
            if not in_language(f, LanguageTag.EV_FULL):
                logger.info("rewriting %s into the static evidence language", to_text(f))
                f = to_static(f, model.agents)
            fn = eval_relational if isinstance(model, RelationalEvidenceModel) else eval_ev_pseudo
            return fn(model, f, trace=trace)
        case KBPseudoModel():
            if not is_static(f) and in_language(f, LanguageTag.KB_DYN, model.agents):
                f = reduce_dynamic(f, LanguageTag.KB_DYN, model.agents)
            if any(isinstance(g, (Box, Forall, Share)) for g in walk(f)):
                raise LanguageError("KB pseudo-models interpret knowledge and belief only")
            return eval_kb_pseudo(model, f, trace=trace)
    raise InvalidInputError(f"cannot evaluate on {type(model).__name__}")
