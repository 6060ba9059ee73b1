"""Soundness audit: instantiate axiom schemes and evaluate them on random models.

Every scheme expected to be valid must hold at every state of every audited model. Schemes
expected to be invalid must fail somewhere, otherwise the audit itself is suspect.
"""
from dataclasses import dataclass, field, replace
from itertools import combinations
from random import Random
from typing import Callable, Literal, Sequence
import logging

from tqdm import tqdm

from ..models import TopoEModel
from ..semantics import eval_kb_pseudo, eval_topo, evaluate
from ..syntax import (
    FULL,
    And,
    Atom,
    B,
    Box,
    Forall,
    Formula,
    Group,
    K,
    LanguageTag,
    Not,
    Share,
    absorb,
    b_dual,
    conjunction,
    iff,
    implies,
    to_text,
)
from ..topology import complement, full_set, lowest
from .generators import formula_pool, random_kb_model, random_pseudo_model, random_topo_model

logger = logging.getLogger(__name__)

AuditSemantics = Literal["topo", "ev_pseudo", "kb_pseudo"]


@dataclass(frozen=True)
class Choice:
    """One way of filling a scheme's metavariables."""

    phis: tuple[Formula, ...]
    agent: Group
    alpha: Group
    small: Group
    big: Group
    other: Group
    atom: Atom
    agents: tuple[str, ...]


@dataclass(frozen=True)
class AxiomScheme:
    name: str
    table: str
    arity: int
    build: Callable[[Choice], Formula]
    language: LanguageTag
    semantics: tuple[AuditSemantics, ...]
    expected_valid: bool = True


EVIDENCE = "evidence"
KNOWLEDGE = "knowledge and belief"
GENERALIZED = "group generalizations"
SHARING = "evidence-sharing reductions"
SHARING_ALL = "sharing reductions for everyone"
INVALID = "expected invalid"

_STATIC = ("topo", "ev_pseudo")
_KB = ("topo", "ev_pseudo", "kb_pseudo")


def _individuals(c: Choice) -> list[Group]:
    return [frozenset({name}) for name in c.agents]


def _subgroups(group: Group) -> list[Group]:
    names = sorted(group)
    return [frozenset(s) for r in range(1, len(names) + 1) for s in combinations(names, r)]


def _cbd(c: Choice) -> Formula:
    known = [K(g, c.phis[k % len(c.phis)]) for k, g in enumerate(_individuals(c))]
    joint = [c.phis[k % len(c.phis)] for k in range(len(c.agents))]
    return implies(conjunction(known), b_dual(FULL, conjunction(joint)))


def _cbd_groups(c: Choice) -> Formula:
    groups = _subgroups(c.big)
    known = [K(g, c.phis[k % len(c.phis)]) for k, g in enumerate(groups)]
    joint = [c.phis[k % len(c.phis)] for k in range(len(groups))]
    return implies(conjunction(known), b_dual(c.big, conjunction(joint)))


def _normal(op) -> Callable[[Choice], Formula]:
    return lambda c: implies(op(c, implies(c.phis[0], c.phis[1])), implies(op(c, c.phis[0]), op(c, c.phis[1])))


def default_schemes() -> list[AxiomScheme]:
    box = lambda c, f: Box(c.big, f)  # noqa: E731
    hard = lambda c, f: Forall(c.big, f)  # noqa: E731
    know = lambda c, f: K(c.alpha, f)  # noqa: E731
    bel = lambda c, f: B(c.alpha, f)  # noqa: E731
    share = lambda c, f: Share(c.big, f)  # noqa: E731
    share_all = lambda c, f: Share(FULL, f)  # noqa: E731
    ev, kb, kb_full = LanguageTag.EV_FULL, LanguageTag.KB_IA, LanguageTag.KB_FULL
    return [
        AxiomScheme("K for Box", EVIDENCE, 2, _normal(box), ev, _STATIC),
        AxiomScheme("T for Box", EVIDENCE, 1, lambda c: implies(Box(c.big, c.phis[0]), c.phis[0]), ev, _STATIC),
        AxiomScheme("4 for Box", EVIDENCE, 1,
                    lambda c: implies(Box(c.big, c.phis[0]), Box(c.big, Box(c.big, c.phis[0]))), ev, _STATIC),
        AxiomScheme("K for Forall", EVIDENCE, 2, _normal(hard), ev, _STATIC),
        AxiomScheme("T for Forall", EVIDENCE, 1, lambda c: implies(Forall(c.big, c.phis[0]), c.phis[0]), ev, _STATIC),
        AxiomScheme("4 for Forall", EVIDENCE, 1,
                    lambda c: implies(Forall(c.big, c.phis[0]), Forall(c.big, Forall(c.big, c.phis[0]))), ev, _STATIC),
        AxiomScheme("5 for Forall", EVIDENCE, 1,
                    lambda c: implies(Not(Forall(c.big, c.phis[0])), Forall(c.big, Not(Forall(c.big, c.phis[0])))),
                    ev, _STATIC),
        AxiomScheme("Monotonicity for Box", EVIDENCE, 1,
                    lambda c: implies(Box(c.small, c.phis[0]), Box(c.big, c.phis[0])), ev, _STATIC),
        AxiomScheme("Monotonicity for Forall", EVIDENCE, 1,
                    lambda c: implies(Forall(c.small, c.phis[0]), Forall(c.big, c.phis[0])), ev, _STATIC),
        AxiomScheme("Inclusion", EVIDENCE, 1,
                    lambda c: implies(Forall(c.big, c.phis[0]), Box(c.big, c.phis[0])), ev, _STATIC),

        AxiomScheme("K for K", KNOWLEDGE, 2, _normal(know), kb, _KB),
        AxiomScheme("K for B", KNOWLEDGE, 2, _normal(bel), kb, _KB),
        AxiomScheme("T", KNOWLEDGE, 1, lambda c: implies(K(c.alpha, c.phis[0]), c.phis[0]), kb, _KB),
        AxiomScheme("KK", KNOWLEDGE, 1,
                    lambda c: implies(K(c.alpha, c.phis[0]), K(c.alpha, K(c.alpha, c.phis[0]))), kb, _KB),
        AxiomScheme("CB", KNOWLEDGE, 1,
                    lambda c: implies(B(c.alpha, c.phis[0]), Not(B(c.alpha, Not(c.phis[0])))), kb, _KB),
        AxiomScheme("SPI", KNOWLEDGE, 1,
                    lambda c: implies(B(c.alpha, c.phis[0]), K(c.alpha, B(c.alpha, c.phis[0]))), kb, _KB),
        AxiomScheme("SNI", KNOWLEDGE, 1,
                    lambda c: implies(Not(B(c.alpha, c.phis[0])), K(c.alpha, Not(B(c.alpha, c.phis[0])))), kb, _KB),
        AxiomScheme("KB", KNOWLEDGE, 1, lambda c: implies(K(c.alpha, c.phis[0]), B(c.alpha, c.phis[0])), kb, _KB),
        AxiomScheme("FB", KNOWLEDGE, 1,
                    lambda c: implies(B(c.alpha, c.phis[0]), B(c.alpha, K(c.alpha, c.phis[0]))), kb, _KB),
        AxiomScheme("SI", KNOWLEDGE, 1,
                    lambda c: implies(B(c.agent, c.phis[0]), K(FULL, B(c.agent, c.phis[0]))), kb, _KB),
        AxiomScheme("WM", KNOWLEDGE, 1,
                    lambda c: implies(And(K(c.agent, c.phis[0]), B(FULL, c.phis[0])), K(FULL, c.phis[0])), kb, _KB),
        AxiomScheme("CBD", KNOWLEDGE, 3, _cbd, kb, _KB),

        AxiomScheme("SI for groups", GENERALIZED, 1,
                    lambda c: implies(B(c.small, c.phis[0]), K(c.big, B(c.small, c.phis[0]))), kb_full, _STATIC),
        AxiomScheme("WM for groups", GENERALIZED, 1,
                    lambda c: implies(And(K(c.small, c.phis[0]), B(c.big, c.phis[0])), K(c.big, c.phis[0])),
                    kb_full, _STATIC),
        AxiomScheme("CBD for groups", GENERALIZED, 3, _cbd_groups, kb_full, _STATIC),

        AxiomScheme("share atoms", SHARING, 0, lambda c: iff(Share(c.big, c.atom), c.atom), ev, ("topo",)),
        AxiomScheme("share negation", SHARING, 1,
                    lambda c: iff(Share(c.big, Not(c.phis[0])), Not(Share(c.big, c.phis[0]))), ev, ("topo",)),
        AxiomScheme("share Box", SHARING, 1,
                    lambda c: iff(Share(c.big, Box(c.other, c.phis[0])),
                                  Box(absorb(c.other, c.big), Share(c.big, c.phis[0]))), ev, ("topo",)),
        AxiomScheme("share Forall", SHARING, 1,
                    lambda c: iff(Share(c.big, Forall(c.other, c.phis[0])),
                                  Forall(absorb(c.other, c.big), Share(c.big, c.phis[0]))), ev, ("topo",)),
        AxiomScheme("K for share", SHARING, 2, _normal(share), ev, ("topo",)),

        AxiomScheme("share everyone atoms", SHARING_ALL, 0,
                    lambda c: iff(Share(FULL, c.atom), c.atom), kb, ("topo",)),
        AxiomScheme("share everyone negation", SHARING_ALL, 1,
                    lambda c: iff(Share(FULL, Not(c.phis[0])), Not(Share(FULL, c.phis[0]))), kb, ("topo",)),
        AxiomScheme("share everyone K", SHARING_ALL, 1,
                    lambda c: iff(Share(FULL, K(c.alpha, c.phis[0])), K(FULL, Share(FULL, c.phis[0]))),
                    kb, ("topo",)),
        AxiomScheme("share everyone B", SHARING_ALL, 1,
                    lambda c: iff(Share(FULL, B(c.alpha, c.phis[0])), B(FULL, Share(FULL, c.phis[0]))),
                    kb, ("topo",)),
        AxiomScheme("K for share everyone", SHARING_ALL, 2, _normal(share_all), kb, ("topo",)),

        AxiomScheme("K group monotonicity", INVALID, 1,
                    lambda c: implies(K(c.agent, c.phis[0]), K(FULL, c.phis[0])), kb, ("topo",), False),
        AxiomScheme("individual knowledge gives group belief", INVALID, 1,
                    lambda c: implies(conjunction([K(g, c.phis[0]) for g in _individuals(c)]), B(FULL, c.phis[0])),
                    kb, ("topo",), False),
    ]


@dataclass
class AuditConfig:
    n_models: int = 1000
    seed: int = 0
    max_states: int = 4
    agents: tuple[str, ...] = ("a", "b")
    atoms: tuple[str, ...] = ("p", "q")
    depth: int = 2
    pool_size: int = 24
    instances: int = 3
    semantics: tuple[AuditSemantics, ...] = ("topo", "ev_pseudo", "kb_pseudo")
    schemes: list[AxiomScheme] = field(default_factory=default_schemes)


@dataclass
class Counterexample:
    model_index: int
    state: int
    instance: Formula
    model: object = field(repr=False)

    def to_dict(self) -> dict:
        return {"model_index": self.model_index, "state": self.state, "instance": to_text(self.instance)}


@dataclass
class SchemeResult:
    scheme: str
    table: str
    semantics: AuditSemantics
    expected_valid: bool
    instances: int = 0
    counterexample: Counterexample | None = None

    @property
    def unexpected(self) -> bool:
        return self.expected_valid == (self.counterexample is not None)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "table": self.table,
            "semantics": self.semantics,
            "expected_valid": self.expected_valid,
            "instances": self.instances,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
            "as_expected": not self.unexpected,
        }


@dataclass
class AuditReport:
    n_models: int
    seed: int
    results: list[SchemeResult]

    @property
    def ok(self) -> bool:
        return not self.failures()

    def failures(self) -> list[SchemeResult]:
        return [r for r in self.results if r.unexpected]

    def result(self, scheme: str, semantics: AuditSemantics = "topo") -> SchemeResult:
        for r in self.results:
            if r.scheme == scheme and r.semantics == semantics:
                return r
        raise KeyError((scheme, semantics))

    def to_dict(self) -> dict:
        return {
            "n_models": self.n_models,
            "seed": self.seed,
            "ok": self.ok,
            "results": [r.to_dict() for r in self.results],
        }


def _choices(rng: Random, scheme: AxiomScheme, pool: Sequence[Formula], config: AuditConfig, count: int):
    agents = config.agents
    everyone = frozenset(agents)
    first = frozenset(agents[:1])
    # the all-atoms instance comes first so seeded models are tried on it
    yield Choice((Atom(config.atoms[0]),) * max(scheme.arity, 2), first, first, first, everyone, first,
                 Atom(config.atoms[0]), agents)
    groups = _subgroups(everyone)
    for _ in range(count - 1):
        big = rng.choice(groups)
        agent = frozenset({rng.choice(agents)})
        yield Choice(
            tuple(rng.choice(pool) for _ in range(max(scheme.arity, 2))),
            agent,
            rng.choice([agent, FULL]),
            rng.choice(_subgroups(big)),
            big,
            rng.choice(groups),
            Atom(rng.choice(config.atoms)),
            agents,
        )


def _random_model(rng: Random, semantics: AuditSemantics, config: AuditConfig):
    n = rng.randint(1, config.max_states)
    match semantics:
        case "topo":
            return random_topo_model(rng, n, config.agents, config.atoms)
        case "ev_pseudo":
            return random_pseudo_model(rng, n, config.agents, config.atoms, "full", standard=rng.random() < 0.3)
        case "kb_pseudo":
            return random_kb_model(rng, n, config.agents, config.atoms)
    raise ValueError(f"unknown audit semantics {semantics!r}")


def _extension(semantics: AuditSemantics, model, f: Formula) -> int:
    match semantics:
        case "topo":
            return eval_topo(model, f).extension
        case "kb_pseudo":
            return eval_kb_pseudo(model, f).extension
    return evaluate(model, f).extension


def _with_atoms(model: TopoEModel, atoms: Sequence[str]) -> TopoEModel:
    valuation = dict(model.valuation)
    for p in atoms:
        valuation.setdefault(p, 0)
    return replace(model, valuation=valuation)


def axiom_audit(
    config: AuditConfig | None = None,
    *,
    seed_models: Sequence[TopoEModel] = (),
    extra_models: Sequence[TopoEModel] = (),
) -> AuditReport:
    """Check every scheme on ``config.n_models`` random models per semantics.

    ``seed_models`` are audited before the random topo-e-models. ``extra_models`` are
    audited after them without validation, which lets a corrupted model serve as a
    negative control.
    """
    config = config or AuditConfig()
    rng = Random(config.seed)
    pools = {
        tag: formula_pool(rng, config.pool_size, config.depth, config.atoms, config.agents, tag)
        for tag in {s.language for s in config.schemes}
    }
    results: list[SchemeResult] = []
    for semantics in config.semantics:
        schemes = [s for s in config.schemes if semantics in s.semantics]
        rows = {s.name: SchemeResult(s.name, s.table, semantics, s.expected_valid) for s in schemes}
        models = []
        if semantics == "topo":
            models.extend(_with_atoms(m, config.atoms) for m in seed_models)
        models.extend(_random_model(rng, semantics, config) for _ in range(config.n_models))
        if semantics == "topo":
            models.extend(_with_atoms(m, config.atoms) for m in extra_models)
        for index, model in enumerate(tqdm(models, desc=semantics, leave=False)):
            full = full_set(model.carrier_size)
            for scheme in schemes:
                row = rows[scheme.name]
                if not scheme.expected_valid and row.counterexample is not None:
                    continue
                for choice in _choices(rng, scheme, pools[scheme.language], config, config.instances):
                    instance = scheme.build(choice)
                    row.instances += 1
                    ext = _extension(semantics, model, instance)
                    if ext != full and row.counterexample is None:
                        state = lowest(complement(ext, model.carrier_size))
                        row.counterexample = Counterexample(index, state, instance, model)
                        logger.debug("%s fails on %s model %d at %d: %s",
                                     scheme.name, semantics, index, state, to_text(instance))
                        if not scheme.expected_valid:
                            break
        results.extend(rows.values())
        unexpected = sum(r.unexpected for r in rows.values())
        logger.info("%s: %d schemes on %d models, %d unexpected", semantics, len(rows), len(models), unexpected)
    return AuditReport(config.n_models, config.seed, results)
