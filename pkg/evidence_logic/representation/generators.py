"""Seeded random models and formulas for audits and property tests."""
from itertools import combinations
from random import Random
from typing import Sequence

from ..models import (
    EvPseudoModel,
    Fragment,
    KBPseudoModel,
    RelationalEvidenceModel,
    TopoEModel,
    ev_pseudo_of_rel,
    groups_for,
)
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
)
from ..topology import (
    Partition,
    Relation,
    generate_topology,
    intersect,
    reflexive_transitive_closure,
)
from .correspondence import kb_from_evidence


def random_subset(rng: Random, n: int, density: float = 0.5) -> int:
    return sum(1 << x for x in range(n) if rng.random() < density)


def random_partition(rng: Random, n: int) -> Partition:
    blocks = rng.randint(1, n)
    labels = [rng.randrange(blocks) for _ in range(n)]
    cells = {}
    for x, label in enumerate(labels):
        cells[label] = cells.get(label, 0) | 1 << x
    return Partition(n, tuple(cells.values()))


def random_preorder(rng: Random, n: int, density: float = 0.3) -> Relation:
    return reflexive_transitive_closure(tuple(random_subset(rng, n, density) for _ in range(n)))


def random_equivalence(rng: Random, n: int) -> Relation:
    return random_partition(rng, n).equivalence()


def random_valuation(rng: Random, n: int, atoms: Sequence[str]) -> dict[str, int]:
    return {p: random_subset(rng, n) for p in atoms}


def random_topo_model(
    rng: Random,
    n: int,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p", "q"),
    max_pieces: int = 3,
) -> TopoEModel:
    partitions = []
    topologies = []
    for _ in agents:
        pi = random_partition(rng, n)
        pieces = [s for s in (random_subset(rng, n) for _ in range(rng.randint(0, max_pieces))) if s]
        # cells go into the subbasis so hard evidence is always open
        topologies.append(generate_topology(pieces + list(pi.cells), n))
        partitions.append(pi)
    return TopoEModel(n, tuple(agents), tuple(partitions), tuple(topologies), random_valuation(rng, n, atoms))


def random_relational_model(
    rng: Random,
    n: int,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p", "q"),
) -> RelationalEvidenceModel:
    preorders = []
    equivalences = []
    for _ in agents:
        sim = random_equivalence(rng, n)
        equivalences.append(sim)
        preorders.append(intersect(random_preorder(rng, n), sim))
    return RelationalEvidenceModel(
        n, tuple(agents), tuple(preorders), tuple(equivalences), random_valuation(rng, n, atoms)
    )


def random_pseudo_model(
    rng: Random,
    n: int,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p", "q"),
    fragment: Fragment = "full",
    standard: bool = False,
) -> EvPseudoModel:
    """Random group relations cut down until inclusion and anti-monotonicity hold."""
    if standard:
        return ev_pseudo_of_rel(random_relational_model(rng, n, agents, atoms), fragment)
    preorders: dict[int, Relation] = {}
    equivalences: dict[int, Relation] = {}
    # groups_for lists smaller groups first, so every subgroup is fixed before its supergroups
    for g in groups_for(len(agents), fragment):
        below = [h for h in preorders if h & ~g == 0]
        sim = intersect(random_equivalence(rng, n), *(equivalences[h] for h in below))
        le = intersect(random_preorder(rng, n), sim, *(preorders[h] for h in below))
        preorders[g] = le
        equivalences[g] = sim
    return EvPseudoModel(n, tuple(agents), preorders, equivalences, random_valuation(rng, n, atoms), fragment)


def random_kb_model(
    rng: Random,
    n: int,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p", "q"),
) -> KBPseudoModel:
    return kb_from_evidence(random_pseudo_model(rng, n, agents, atoms, "iA"))


# ---------------------------------------------------------------------------
# formulas

def language_groups(agents: Sequence[str], tag: LanguageTag) -> list[Group]:
    if tag in (LanguageTag.EV_FULL, LanguageTag.KB_FULL, LanguageTag.EV_DYN):
        return [frozenset(c) for r in range(1, len(agents) + 1) for c in combinations(agents, r)]
    return [frozenset({name}) for name in agents] + [FULL]


def random_formula(
    rng: Random,
    depth: int,
    atoms: Sequence[str] = ("p", "q"),
    agents: Sequence[str] = ("a", "b"),
    tag: LanguageTag = LanguageTag.EV_FULL,
) -> Formula:
    """A formula of modal depth at most ``depth`` in the language ``tag``."""
    groups = language_groups(agents, tag)
    evidence = tag in (LanguageTag.EV_FULL, LanguageTag.EV_IA, LanguageTag.EV_DYN)
    modalities = [Box, Forall] if evidence else [K, B]

    def build(d: int, size: int) -> Formula:
        if size == 0 or rng.random() < 0.25:
            return Atom(rng.choice(atoms))
        kind = rng.choice(("not", "and", "modal", "modal") if d > 0 else ("not", "and"))
        if kind == "not":
            return Not(build(d, size - 1))
        if kind == "and":
            return And(build(d, size // 2), build(d, size // 2))
        if tag in (LanguageTag.EV_DYN, LanguageTag.KB_DYN) and rng.random() < 0.3:
            group = FULL if tag is LanguageTag.KB_DYN else rng.choice(groups)
            return Share(group, build(d - 1, size - 1))
        return rng.choice(modalities)(rng.choice(groups), build(d - 1, size - 1))

    return build(depth, 2 * depth + 3)


def formula_pool(
    rng: Random,
    size: int,
    depth: int,
    atoms: Sequence[str] = ("p", "q"),
    agents: Sequence[str] = ("a", "b"),
    tag: LanguageTag = LanguageTag.EV_FULL,
) -> list[Formula]:
    """Atoms first, then distinct random formulas up to ``size`` in total."""
    pool: dict[Formula, None] = dict.fromkeys(Atom(p) for p in atoms)
    tries = 0
    while len(pool) < size and tries < 20 * size:
        pool.setdefault(random_formula(rng, rng.randint(0, depth), atoms, agents, tag))
        tries += 1
    return list(pool)

