"""JSON model files with named states and agents.

Every kind shares ``kind``, ``states``, ``agents`` and ``valuation`` (atom to state names).
The ``structure`` object is keyed by agent name, or for pseudo-models by group label: agent
names joined by commas, with ``A`` for the full group. Edge lists name pairs of states, and
reflexive pairs of preorders may be left out. Topologies are stored by a subbasis.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Literal, Mapping, Sequence
import json
import logging

from .errors import InvalidInputError
from .models import (
    DEFAULT_MAX_AGENTS,
    FULL_GROUP,
    EvPseudoModel,
    KBPseudoModel,
    RelationalEvidenceModel,
    TopoEModel,
    ValidationReport,
    fragment_groups,
    group_names,
    resolve_group,
    validate_ev_pseudo,
    validate_kb_pseudo,
    validate_relational,
    validate_topo,
)
from .topology import (
    DEFAULT_MAX_CARRIER,
    Partition,
    Relation,
    StateSet,
    check_carrier,
    from_pairs,
    full_set,
    generate_topology,
    identity,
    members,
    to_pairs,
    union,
)

logger = logging.getLogger(__name__)

ModelKind = Literal["topo", "relational", "ev_pseudo", "kb_pseudo"]
KINDS: tuple[ModelKind, ...] = ("topo", "relational", "ev_pseudo", "kb_pseudo")

DATA_DIR = Path(__file__).resolve().parent / "data"
EXAMPLE1 = DATA_DIR / "example1.json"

AnyModel = TopoEModel | RelationalEvidenceModel | EvPseudoModel | KBPseudoModel


def kind_of(model: AnyModel) -> ModelKind:
    match model:
        case TopoEModel():
            return "topo"
        case RelationalEvidenceModel():
            return "relational"
        case EvPseudoModel():
            return "ev_pseudo"
        case KBPseudoModel():
            return "kb_pseudo"
    raise InvalidInputError(f"not a model: {type(model).__name__}")


def validate(model: AnyModel, *, max_carrier: int = DEFAULT_MAX_CARRIER) -> ValidationReport:
    match model:
        case TopoEModel():
            return validate_topo(model, max_carrier=max_carrier)
        case RelationalEvidenceModel():
            return validate_relational(model)
        case EvPseudoModel():
            return validate_ev_pseudo(model)
        case KBPseudoModel():
            return validate_kb_pseudo(model)
    raise InvalidInputError(f"not a model: {type(model).__name__}")


@dataclass(frozen=True)
class NamedModel:
    model: AnyModel
    states: tuple[str, ...]

    @property
    def kind(self) -> ModelKind:
        return kind_of(self.model)

    @property
    def agents(self) -> tuple[str, ...]:
        return self.model.agents

    def state(self, name: str | int) -> int:
        """Index of a state given by name or by index."""
        if isinstance(name, int):
            if not 0 <= name < len(self.states):
                raise InvalidInputError(f"state {name} outside carrier of size {len(self.states)}")
            return name
        try:
            return self.states.index(name)
        except ValueError:
            if name.isdigit():
                return self.state(int(name))
            raise InvalidInputError(f"unknown state {name!r}") from None

    def names(self, s: StateSet) -> list[str]:
        return [self.states[x] for x in members(s)]

    def with_model(self, model: AnyModel) -> "NamedModel":
        if model.carrier_size != len(self.states):
            raise InvalidInputError("a renamed model must keep the carrier")
        return NamedModel(model, self.states)

    def group_label(self, group: int) -> str:
        if group == full_set(len(self.agents)) and len(self.agents) > 1:
            return FULL_GROUP
        return ",".join(group_names(group, self.agents))

    # -- writing

    def _edges(self, r: Relation, skip_reflexive: bool = True) -> list[list[str]]:
        return [[self.states[x], self.states[y]] for x, y in to_pairs(r) if not (skip_reflexive and x == y)]

    def _cells(self, cells: Iterable[StateSet]) -> list[list[str]]:
        return [self.names(c) for c in cells]

    def to_dict(self) -> dict[str, Any]:
        model = self.model
        data: dict[str, Any] = {
            "kind": self.kind,
            "states": list(self.states),
            "agents": list(self.agents),
            "valuation": {p: self.names(ext) for p, ext in sorted(model.valuation.items())},
        }
        structure: dict[str, dict] = {}
        match model:
            case TopoEModel():
                for name, pi, tau in zip(model.agents, model.partitions, model.topologies):
                    structure[name] = {"partition": self._cells(pi.cells), "subbasis": self._cells(tau.subbasis)}
            case RelationalEvidenceModel():
                for name, le, sim in zip(model.agents, model.preorders, model.equivalences):
                    structure[name] = {
                        "preorder": self._edges(le),
                        "partition": self._cells(Partition.from_equivalence(sim).cells),
                    }
            case EvPseudoModel():
                data["fragment"] = model.fragment
                for g in model.groups():
                    structure[self.group_label(g)] = {
                        "preorder": self._edges(model.preorders[g]),
                        "partition": self._cells(Partition.from_equivalence(model.equivalences[g]).cells),
                    }
            case KBPseudoModel():
                for g in model.labels():
                    structure[self.group_label(g)] = {
                        "knowledge": self._edges(model.knowledge[g]),
                        "belief": self._edges(model.belief[g], skip_reflexive=False),
                    }
        data["structure"] = structure
        return data

    def __str__(self) -> str:
        return json.dumps(self.to_dict(), indent=4, ensure_ascii=False)

    def to_file(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(str(self))

    # -- reading

    @classmethod
    def from_dict(
        cls,
        data: Mapping[str, Any],
        *,
        check: bool = True,
        max_carrier: int = DEFAULT_MAX_CARRIER,
        max_agents: int = DEFAULT_MAX_AGENTS,
    ) -> "NamedModel":
        if not isinstance(data, Mapping):
            raise InvalidInputError("a model file holds a JSON object")
        kind = data.get("kind", "topo")
        if kind not in KINDS:
            raise InvalidInputError(f"unknown model kind {kind!r}, expected one of {KINDS}")
        states = tuple(str(s) for s in _require_list(data, "states"))
        agents = tuple(str(a) for a in _require_list(data, "agents"))
        if len(set(states)) != len(states):
            raise InvalidInputError("state names are not unique")
        check_carrier(len(states), max_carrier)
        if len(agents) > max_agents:
            raise InvalidInputError(f"{len(agents)} agents exceed the limit of {max_agents}")
        reader = _Reader(states, agents)
        valuation = {str(p): reader.states_of(v, f"valuation of {p}") for p, v in (data.get("valuation") or {}).items()}
        structure = data.get("structure") or {}
        if not isinstance(structure, Mapping):
            raise InvalidInputError("structure must be an object")
        n = len(states)
        match kind:
            case "topo":
                partitions, topologies = [], []
                for name in agents:
                    entry = reader.entry(structure, name)
                    cells = reader.cells(entry.get("partition", [states]), f"partition of {name}")
                    pieces = reader.cells(entry.get("subbasis", []), f"subbasis of {name}")
                    partitions.append(Partition(n, tuple(cells)))
                    topologies.append(generate_topology(pieces, n, max_carrier=max_carrier))
                model = TopoEModel(n, agents, tuple(partitions), tuple(topologies), valuation)
            case "relational":
                preorders, equivalences = [], []
                for name in agents:
                    entry = reader.entry(structure, name)
                    preorders.append(reader.order(entry.get("preorder", []), f"preorder of {name}"))
                    equivalences.append(reader.equivalence(entry.get("partition", [states]), f"partition of {name}"))
                model = RelationalEvidenceModel(n, agents, tuple(preorders), tuple(equivalences), valuation)
            case "ev_pseudo":
                fragment = data.get("fragment", "iA")
                if fragment not in ("full", "iA"):
                    raise InvalidInputError(f"unknown fragment {fragment!r}")
                preorders, equivalences = {}, {}
                for label in structure:
                    g = reader.group(label)
                    entry = reader.entry(structure, label)
                    if g in preorders:
                        raise InvalidInputError(f"group {label!r} is given twice")
                    preorders[g] = reader.order(entry.get("preorder", []), f"preorder of {label}")
                    equivalences[g] = reader.equivalence(entry.get("partition", [states]), f"partition of {label}")
                model = EvPseudoModel(n, agents, preorders, equivalences, valuation, fragment)
            case "kb_pseudo":
                knowledge, belief = {}, {}
                for g in fragment_groups(len(agents)):
                    label = FULL_GROUP if g == full_set(len(agents)) and len(agents) > 1 else group_names(g, agents)[0]
                    entry = reader.entry(structure, label)
                    knowledge[g] = reader.order(entry.get("knowledge", []), f"knowledge of {label}")
                    belief[g] = from_pairs(reader.pairs(entry.get("belief", []), f"belief of {label}"), n)
                model = KBPseudoModel(n, agents, knowledge, belief, valuation)
        named = cls(model, states)
        if check:
            report = validate(model, max_carrier=max_carrier)
            if not report.ok:
                first = report.violations[0]
                raise InvalidInputError(f"invalid {kind} model: {first['message']} ({len(report.violations)} violations)")
            logger.info("loaded %s model with %d states and %d agents", kind, n, len(agents))
        return named

    @classmethod
    def from_file(cls, path: str | Path, **kwargs) -> "NamedModel":
        with open(path, encoding="utf-8") as f:
            data = json.loads(f.read())
        return cls.from_dict(data, **kwargs)


def _require_list(data: Mapping[str, Any], key: str) -> list:
    value = data.get(key)
    if not isinstance(value, list) or not value:
        raise InvalidInputError(f"model file needs a non-empty list {key!r}")
    return value


class _Reader:
    def __init__(self, states: Sequence[str], agents: Sequence[str]):
        self.states = states
        self.agents = agents
        self.n = len(states)

    def state(self, name: Any, what: str) -> int:
        try:
            return self.states.index(str(name))
        except ValueError:
            raise InvalidInputError(f"{what}: unknown state {name!r}") from None

    def states_of(self, names: Any, what: str) -> StateSet:
        if not isinstance(names, list):
            raise InvalidInputError(f"{what} must be a list of state names")
        return sum(1 << self.state(name, what) for name in set(map(str, names)))

    def cells(self, items: Any, what: str) -> list[StateSet]:
        if not isinstance(items, list):
            raise InvalidInputError(f"{what} must be a list of state lists")
        return [self.states_of(item, what) for item in items]

    def pairs(self, items: Any, what: str) -> list[tuple[int, int]]:
        if not isinstance(items, list) or any(not isinstance(e, list) or len(e) != 2 for e in items):
            raise InvalidInputError(f"{what} must be a list of [state, state] pairs")
        return [(self.state(s, what), self.state(t, what)) for s, t in items]

    def order(self, items: Any, what: str) -> Relation:
        return union(identity(self.n), from_pairs(self.pairs(items, what), self.n))

    def equivalence(self, items: Any, what: str) -> Relation:
        cells = self.cells(items, what)
        rows = [0] * self.n
        for c in cells:
            for x in members(c):
                rows[x] |= c
        return tuple(rows)

    def entry(self, structure: Mapping[str, Any], key: str) -> Mapping[str, Any]:
        entry = structure.get(key, {})
        if not isinstance(entry, Mapping):
            raise InvalidInputError(f"structure of {key!r} must be an object")
        return entry

    def group(self, label: str) -> int:
        return resolve_group([name.strip() for name in str(label).split(",") if name.strip()], self.agents)


def load_example() -> NamedModel:
    """The bundled two-agent model where group knowledge falls below individual knowledge."""
    return NamedModel.from_file(EXAMPLE1)
