"""Bounded satisfiability by enumerating small models up to isomorphism.

Each agent (or, for pseudo-models, each group) carries a pair of an evidence preorder inside
an information equivalence. Candidates are generated state count by state count. The search
space of one state count is cut into chunks by the first pair, and chunks run as threads
under a semaphore. The witness of the earliest successful chunk is returned, so the answer
does not depend on scheduling.
"""
from dataclasses import dataclass, field
from functools import cache
from itertools import combinations_with_replacement, permutations, product
from typing import Callable, Iterator, Literal, Sequence
import asyncio
import logging

from tqdm.asyncio import tqdm_asyncio

from ..errors import InvalidInputError, LanguageError
from ..models import (
    DEFAULT_MAX_AGENTS,
    EvPseudoModel,
    Fragment,
    RelationalEvidenceModel,
    TopoEModel,
    groups_for,
    topo_of_rel,
)
from ..semantics import eval_ev_pseudo, eval_relational, eval_topo, evaluate
from ..syntax import (
    Formula,
    LanguageTag,
    Not,
    agent_names,
    atoms,
    closure_set,
    in_language,
    to_static,
    to_text,
)
from ..topology import Relation, identity, is_subrelation, is_symmetric, is_transitive, lowest, members

logger = logging.getLogger(__name__)

Semantics = Literal["topo", "ev_pseudo"]
Pair = tuple[Relation, Relation]


@cache
def preorders(n: int) -> tuple[Relation, ...]:
    """Every preorder on ``n`` states, in a fixed order."""
    off_diagonal = [(x, y) for x in range(n) for y in range(n) if x != y]
    out = []
    for bits in range(1 << len(off_diagonal)):
        rows = list(identity(n))
        for b, (x, y) in enumerate(off_diagonal):
            if bits >> b & 1:
                rows[x] |= 1 << y
        r = tuple(rows)
        if is_transitive(r):
            out.append(r)
    return tuple(out)


@cache
def evidence_pairs(n: int) -> tuple[Pair, ...]:
    """Pairs ``(≤, ∼)`` with ``≤`` a preorder inside the equivalence ``∼``."""
    equivalences = [r for r in preorders(n) if is_symmetric(r)]
    return tuple((le, sim) for sim in equivalences for le in preorders(n) if is_subrelation(le, sim))


def _permute(r: Relation, perm: Sequence[int]) -> Relation:
    rows = [0] * len(r)
    for x, row in enumerate(r):
        rows[perm[x]] = sum(1 << perm[y] for y in members(row))
    return tuple(rows)


@cache
def _stabilizer(signatures: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Non-identity permutations that only shuffle states with equal signatures."""
    blocks = []
    start = 0
    for x in range(1, len(signatures) + 1):
        if x == len(signatures) or signatures[x] != signatures[start]:
            blocks.append(list(range(start, x)))
            start = x
    perms = []
    for choice in product(*(permutations(block) for block in blocks)):
        perm = tuple(y for part in choice for y in part)
        if perm != tuple(range(len(signatures))):
            perms.append(perm)
    return tuple(perms)


def _is_canonical(structure: tuple[Pair, ...], perms: Sequence[Sequence[int]]) -> bool:
    code = tuple(row for pair in structure for r in pair for row in r)
    for perm in perms:
        other = tuple(row for pair in structure for r in pair for row in _permute(r, perm))
        if other < code:
            return False
    return True


def _signatures(n: int, n_atoms: int, pruned: bool) -> Iterator[tuple[int, ...]]:
    values = range(1 << n_atoms)
    if pruned:
        yield from combinations_with_replacement(values, n)
    else:
        yield from product(values, repeat=n)


def _valuation(signatures: Sequence[int], names: Sequence[str]) -> dict[str, int]:
    return {
        p: sum(1 << x for x, sig in enumerate(signatures) if sig >> j & 1)
        for j, p in enumerate(names)
    }


class ModelSpace:
    """Candidate models of one shape: relational (one pair per agent) or pseudo (one pair per group)."""

    def __init__(
        self,
        agents: Sequence[str],
        atom_names: Sequence[str],
        semantics: Semantics = "topo",
        fragment: Fragment = "full",
        pruned: bool = True,
    ):
        self.agents = tuple(agents)
        self.atom_names = tuple(atom_names)
        self.semantics = semantics
        self.fragment = fragment
        self.pruned = pruned
        k = len(self.agents)
        self.slots = list(range(k)) if semantics == "topo" else groups_for(k, fragment)

    def chunks(self, n: int) -> int:
        return len(evidence_pairs(n))

    def structures(self, n: int, first: int | None = None) -> Iterator[tuple[Pair, ...]]:
        pairs = evidence_pairs(n)
        heads = pairs if first is None else (pairs[first],)
        if self.semantics == "topo":
            for head in heads:
                for rest in product(pairs, repeat=len(self.slots) - 1):
                    yield (head, *rest)
            return
        groups = self.slots

        def extend(chosen: dict[int, Pair], depth: int) -> Iterator[tuple[Pair, ...]]:
            if depth == len(groups):
                yield tuple(chosen[g] for g in groups)
                return
            g = groups[depth]
            below = [h for h in chosen if h & ~g == 0]
            options = heads if depth == 0 else pairs
            for le, sim in options:
                if all(is_subrelation(le, chosen[h][0]) and is_subrelation(sim, chosen[h][1]) for h in below):
                    chosen[g] = (le, sim)
                    yield from extend(chosen, depth + 1)
                    del chosen[g]

        yield from extend({}, 0)

    def build(self, n: int, structure: tuple[Pair, ...], valuation: dict[str, int]):
        if self.semantics == "topo":
            return RelationalEvidenceModel(
                n,
                self.agents,
                tuple(le for le, _ in structure),
                tuple(sim for _, sim in structure),
                valuation,
            )
        return EvPseudoModel(
            n,
            self.agents,
            {g: le for g, (le, _) in zip(self.slots, structure)},
            {g: sim for g, (_, sim) in zip(self.slots, structure)},
            valuation,
            self.fragment,
        )

    def models(self, n: int, first: int | None = None) -> Iterator:
        for signatures in _signatures(n, len(self.atom_names), self.pruned):
            perms = _stabilizer(signatures) if self.pruned else ()
            valuation = _valuation(signatures, self.atom_names)
            for structure in self.structures(n, first):
                if perms and not _is_canonical(structure, perms):
                    continue
                yield self.build(n, structure, valuation)


def enumerate_models(
    n: int,
    agents: Sequence[str] = ("a",),
    atom_names: Sequence[str] = ("p",),
    semantics: Semantics = "topo",
    fragment: Fragment = "full",
    pruned: bool = True,
) -> Iterator:
    """Relational models (``topo``) or evidence pseudo-models on exactly ``n`` states.

    With ``pruned`` every isomorphism class appears once; otherwise every labelling does.
    """
    if n < 1:
        raise InvalidInputError("models need at least one state")
    yield from ModelSpace(agents, atom_names, semantics, fragment, pruned).models(n)


@dataclass(frozen=True)
class SatVerdict:
    outcome: Literal["SAT", "UNSAT_UP_TO"]
    bound: int
    semantics: Semantics
    model: TopoEModel | EvPseudoModel | None = None
    state: int | None = None
    models_examined: int = 0
    closure_size: int = 0
    formula: Formula | None = field(default=None, compare=False)

    @property
    def satisfiable(self) -> bool:
        return self.outcome == "SAT"

    @property
    def closure_bound(self) -> int:
        """States that would make a negative answer conclusive."""
        return 2 ** self.closure_size

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "bound": self.bound,
            "semantics": self.semantics,
            "state": self.state,
            "models_examined": self.models_examined,
            "closure_size": self.closure_size,
            "closure_bound": f"2^{self.closure_size}",
        }


Witness = tuple[object, int]


class BoundedSearch:
    """Search models of 1..max_states states for one satisfying the formula."""

    def __init__(
        self,
        formula: Formula,
        max_states: int,
        semantics: Semantics = "topo",
        agents: Sequence[str] | None = None,
        workers: int = 4,
        pruned: bool = True,
        max_agents: int = DEFAULT_MAX_AGENTS,
        fragment: Fragment | None = None,
    ):
        if max_states < 1:
            raise InvalidInputError("the state bound must be at least 1")
        if semantics not in ("topo", "ev_pseudo"):
            raise InvalidInputError(f"unknown search semantics {semantics!r}")
        named = agent_names(formula)
        if agents is None:
            agents = named or ["a"]
        elif missing := set(named) - set(agents):
            raise InvalidInputError(f"formula names agents {sorted(missing)} outside {list(agents)}")
        if not agents or len(agents) > max_agents:
            raise InvalidInputError(f"between 1 and {max_agents} agents are supported, got {len(agents)}")
        self.formula = formula
        self.static = formula if in_language(formula, LanguageTag.EV_FULL) else to_static(formula, agents)
        if self.static != formula:
            logger.info("searching for %s", to_text(self.static))
        self.max_states = max_states
        self.semantics: Semantics = semantics
        self.agents = tuple(agents)
        self.workers = workers
        individual = in_language(self.static, LanguageTag.EV_IA, self.agents)
        if fragment is None:
            fragment = "iA" if individual else "full"
        elif fragment == "iA" and not individual:
            raise LanguageError("the iA signature only interprets individual groups and A")
        self.space = ModelSpace(self.agents, atoms(self.static), semantics, fragment, pruned)
        self.examined = 0

    def _check(self, model) -> int:
        if self.semantics == "topo":
            return eval_relational(model, self.static).extension
        return eval_ev_pseudo(model, self.static).extension

    def _search_chunk(self, n: int, first: int, stop: Callable[[], bool]) -> tuple[Witness | None, int]:
        """The chunk's witness, if any, and the number of models it examined."""
        examined = 0
        for model in self.space.models(n, first):
            if examined % 256 == 0 and stop():
                return None, examined
            examined += 1
            ext = self._check(model)
            if ext:
                logger.debug("chunk %d of %d states: witness after %d models", first, n, examined)
                return (model, lowest(ext)), examined
        return None, examined

    async def _search_size(self, n: int) -> tuple[Witness | None, int]:
        semaphore = asyncio.Semaphore(self.workers)
        found: dict[int, Witness] = {}
        counts: dict[int, int] = {}

        def stop(index: int) -> bool:
            return any(i < index for i in found)

        async def task(index: int) -> None:
            async with semaphore:
                if stop(index):
                    return
                hit, counts[index] = await asyncio.to_thread(self._search_chunk, n, index, lambda: stop(index))
                if hit is not None:
                    found[index] = hit

        await tqdm_asyncio.gather(
            *[task(i) for i in range(self.space.chunks(n))], desc=f"{n} states", leave=False
        )
        if not found:
            return None, sum(counts.values())
        # chunks before the first witness always run to the end, later ones may stop early
        first = min(found)
        return found[first], sum(count for index, count in counts.items() if index <= first)

    def _finish(self, witness: Witness | None, n: int) -> SatVerdict:
        closure_size = len(closure_set(self.static, self.agents))
        if witness is None:
            return SatVerdict("UNSAT_UP_TO", self.max_states, self.semantics, None, None,
                              self.examined, closure_size, self.formula)
        model, state = witness
        if self.semantics == "topo":
            model = topo_of_rel(model)
            check = eval_topo(model, self.formula)
        else:
            check = evaluate(model, self.formula)
        if not check.holds_at(state):
            raise RuntimeError(f"witness for {to_text(self.formula)} does not re-verify")
        return SatVerdict("SAT", n, self.semantics, model, state, self.examined, closure_size, self.formula)

    async def run(self) -> SatVerdict:
        for n in range(1, self.max_states + 1):
            witness, examined = await self._search_size(n)
            self.examined += examined
            logger.info("%d states: %s after %d models", n, "witness" if witness else "nothing", self.examined)
            if witness is not None:
                return self._finish(witness, n)
        return self._finish(None, self.max_states)


def bounded_sat(
    formula: Formula,
    max_states: int,
    semantics: Semantics = "topo",
    *,
    agents: Sequence[str] | None = None,
    workers: int = 4,
    pruned: bool = True,
    fragment: Fragment | None = None,
) -> SatVerdict:
    """Smallest-first search for a model of ``formula``.

    Knowledge, belief and ``[share]`` are rewritten into the static evidence language first.
    A ``SAT`` verdict carries a topo-e-model (``topo``) or an evidence pseudo-model
    (``ev_pseudo``) together with a state where the formula holds. Pseudo-models use the
    ``iA`` signature when the formula allows it, unless ``fragment`` says otherwise.
    """
    search = BoundedSearch(formula, max_states, semantics, agents, workers, pruned, fragment=fragment)
    return asyncio.run(search.run())


def valid_up_to(
    formula: Formula,
    max_states: int,
    semantics: Semantics = "topo",
    *,
    agents: Sequence[str] | None = None,
    workers: int = 4,
) -> SatVerdict:
    """Search for a countermodel; the formula is valid up to the bound iff none exists."""
    return bounded_sat(Not(formula), max_states, semantics, agents=agents, workers=workers)
