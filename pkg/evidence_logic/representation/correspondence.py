"""Moving between evidence pseudo-models and knowledge/belief pseudo-models.

Going from evidence to knowledge and belief is canonical. The way back is a representation
and not an inverse: evidence relations are not determined by the knowledge they induce.
"""
import logging

from ..errors import InvalidInputError
from ..models import (
    EvPseudoModel,
    KBPseudoModel,
    require_valid,
    fragment_groups,
    is_max_dense,
    max_worlds,
    singletons,
    validate_ev_pseudo,
    validate_kb_pseudo,
)
from ..topology import Relation, full_set, intersect, members, union

logger = logging.getLogger(__name__)


def kb_from_evidence(model: EvPseudoModel) -> KBPseudoModel:
    """``s →_α w`` iff ``s ∼_α w`` and ``w`` is ``≤_α``-maximal; ``⊴_α`` is ``≤_α ∪ →_α``."""
    require_valid(validate_ev_pseudo(model))
    knowledge: dict[int, Relation] = {}
    belief: dict[int, Relation] = {}
    for g in fragment_groups(len(model.agents)):
        le, sim = model.preorder(g), model.equivalence(g)
        if not is_max_dense(le):
            raise InvalidInputError(f"evidence order of group {g:b} is not max-dense")
        top = max_worlds(le)
        arrow = tuple(row & top for row in sim)
        belief[g] = arrow
        knowledge[g] = union(le, arrow)
    return KBPseudoModel(model.carrier_size, model.agents, knowledge, belief, dict(model.valuation))


def confluence(r: Relation) -> Relation:
    """``s`` and ``w`` share an ``r``-successor."""
    return tuple(sum(1 << w for w, other in enumerate(r) if row & other) for row in r)


def same_successors(r: Relation) -> Relation:
    return tuple(sum(1 << w for w, other in enumerate(r) if other == row) for row in r)


def indistinguishability(model: KBPseudoModel, group: int) -> tuple[Relation, Relation, Relation]:
    """The three readings of ``∼``: ``⊴``-confluence, ``→``-confluence and equal ``→``-successors.

    They coincide on every valid KB pseudo-model.
    """
    return (
        confluence(model.knowledge[group]),
        confluence(model.belief[group]),
        same_successors(model.belief[group]),
    )


def evidence_from_kb(model: KBPseudoModel) -> EvPseudoModel:
    """An ``iA`` evidence pseudo-model inducing the given knowledge and belief.

    With a single agent the full group is that agent, and the individual clauses apply.
    """
    require_valid(validate_kb_pseudo(model))
    n = model.carrier_size
    k = len(model.agents)
    full = full_set(k)
    preorders: dict[int, Relation] = {}
    equivalences: dict[int, Relation] = {}
    for g in singletons(k):
        preorders[g] = model.knowledge[g]
        equivalences[g] = confluence(model.knowledge[g])
    if k > 1:
        know_all = model.knowledge[full]
        top = max_worlds(know_all)
        # (1) below ⊴_A and every ⊴_i; (2) maximal worlds only see themselves
        common = intersect(know_all, *(model.knowledge[g] for g in singletons(k)))
        preorders[full] = tuple(1 << s if top >> s & 1 else row for s, row in enumerate(common))
        equivalences[full] = confluence(know_all)
    logger.info("recovered evidence relations on %d states for %d agents", n, k)
    return EvPseudoModel(n, model.agents, preorders, equivalences, dict(model.valuation), "iA")

