"""Formulas of the evidence and knowledge/belief languages.

Eight node kinds make up the normalized AST. The remaining connectives and duals are
builders over them and are printed back in their sugared form.

Groups are frozensets of agent names. The name ``A`` stands for the group of all agents of
whatever model the formula is evaluated on.
"""
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from functools import reduce
from itertools import combinations
from typing import Iterator, Sequence
import logging

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from .errors import EvidenceLogicError, FormulaSyntaxError, InvalidInputError, LanguageError

logger = logging.getLogger(__name__)

FULL = frozenset({"A"})

Group = frozenset[str]


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Modal(Formula):
    group: Group
    sub: Formula


@dataclass(frozen=True)
class Box(Modal):
    """Justified by soft evidence (interior)."""


@dataclass(frozen=True)
class Forall(Modal):
    """Hard evidence: true throughout the information cell."""


@dataclass(frozen=True)
class K(Modal):
    pass


@dataclass(frozen=True)
class B(Modal):
    pass


@dataclass(frozen=True)
class Share(Modal):
    pass


# ---------------------------------------------------------------------------
# derived connectives

def disj(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def dia(group: Group, a: Formula) -> Formula:
    return Not(Box(group, Not(a)))


def exists(group: Group, a: Formula) -> Formula:
    return Not(Forall(group, Not(a)))


def k_dual(group: Group, a: Formula) -> Formula:
    return Not(K(group, Not(a)))


def b_dual(group: Group, a: Formula) -> Formula:
    return Not(B(group, Not(a)))


def conjunction(formulas: Sequence[Formula]) -> Formula:
    return reduce(And, formulas)


def single_negation(f: Formula) -> Formula:
    return f.sub if isinstance(f, Not) else Not(f)


# ---------------------------------------------------------------------------
# structure

def children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Atom():
            return ()
        case Not(sub) | Modal(_, sub):
            return (sub,)
        case And(left, right):
            return (left, right)
    raise TypeError(f"not a formula: {f!r}")


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def subformulas(f: Formula) -> frozenset[Formula]:
    return frozenset(walk(f))


def modal_depth(f: Formula) -> int:
    match f:
        case Atom():
            return 0
        case Not(sub):
            return modal_depth(sub)
        case And(left, right):
            return max(modal_depth(left), modal_depth(right))
        case Modal(_, sub):
            return 1 + modal_depth(sub)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> list[str]:
    return sorted({g.name for g in walk(f) if isinstance(g, Atom)})


def agent_names(f: Formula) -> list[str]:
    """Agents named in the formula's groups, ``A`` excluded."""
    return sorted({name for g in walk(f) if isinstance(g, Modal) for name in g.group} - FULL)


def map_groups(f: Formula, fn) -> Formula:
    match f:
        case Atom():
            return f
        case Not(sub):
            return Not(map_groups(sub, fn))
        case And(left, right):
            return And(map_groups(left, fn), map_groups(right, fn))
        case Modal(group, sub):
            return type(f)(fn(group), map_groups(sub, fn))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# languages

class LanguageTag(StrEnum):
    EV_FULL = "EvFull"
    EV_IA = "EvIA"
    KB_IA = "KBIA"
    KB_FULL = "KBFull"
    EV_DYN = "EvDyn"
    KB_DYN = "KBDyn"


_NODES = {
    LanguageTag.EV_FULL: (Atom, Not, And, Box, Forall),
    LanguageTag.EV_IA: (Atom, Not, And, Box, Forall),
    LanguageTag.KB_IA: (Atom, Not, And, K, B),
    LanguageTag.KB_FULL: (Atom, Not, And, K, B),
    LanguageTag.EV_DYN: (Atom, Not, And, Box, Forall, Share),
    LanguageTag.KB_DYN: (Atom, Not, And, K, B, Share),
}


def is_full_group(group: Group, agents: Sequence[str] | None = None) -> bool:
    return "A" in group or (agents is not None and group == frozenset(agents))


def _fragment_group(group: Group, agents: Sequence[str] | None) -> bool:
    return len(group) == 1 or is_full_group(group, agents)


def in_language(f: Formula, tag: LanguageTag, agents: Sequence[str] | None = None) -> bool:
    allowed = _NODES[tag]
    for g in walk(f):
        if not isinstance(g, allowed):
            return False
        if isinstance(g, Modal):
            if tag in (LanguageTag.EV_IA, LanguageTag.KB_IA, LanguageTag.KB_DYN) and not _fragment_group(g.group, agents):
                return False
            if tag is LanguageTag.KB_DYN and isinstance(g, Share) and not is_full_group(g.group, agents):
                return False
    return True


def language_of(f: Formula, agents: Sequence[str] | None = None) -> list[LanguageTag]:
    return [tag for tag in LanguageTag if in_language(f, tag, agents)]


def is_static(f: Formula) -> bool:
    return not any(isinstance(g, Share) for g in walk(f))


# ---------------------------------------------------------------------------
# parsing

GRAMMAR = r"""
?start: iff

?iff: imp
    | imp "<->" iff -> iff

?imp: disj
    | disj "->" imp -> implies

?disj: conj
    | disj "|" conj -> disj

?conj: unary
    | conj "&" unary -> conj

?unary: "~" unary -> neg
    | "Box" group unary -> box
    | "Dia" group unary -> dia
    | "Forall" group unary -> forall
    | "Exists" group unary -> exists
    | "K" group unary -> know
    | "B" group unary -> believe
    | "<" "K" group ">" unary -> know_dual
    | "<" "B" group ">" unary -> believe_dual
    | "[" "share" group "]" unary -> share
    | ATOM -> atom
    | "(" iff ")"

group: "{" [AGENT ("," AGENT)*] "}"

ATOM: /[a-z][a-z0-9_]*/
AGENT: /[A-Za-z0-9_]+/

%import common.WS
%ignore WS
"""


class _ToFormula(Transformer):
    def group(self, items: list[Token | None]) -> Group:
        names = [str(t) for t in items if t is not None]
        if not names:
            raise FormulaSyntaxError("empty group literal")
        return frozenset(names)

    def atom(self, items):
        return Atom(str(items[0]))

    def neg(self, items):
        return Not(items[0])

    def conj(self, items):
        return And(items[0], items[1])

    def disj(self, items):
        return disj(items[0], items[1])

    def implies(self, items):
        return implies(items[0], items[1])

    def iff(self, items):
        return iff(items[0], items[1])

    def box(self, items):
        return Box(items[0], items[1])

    def dia(self, items):
        return dia(items[0], items[1])

    def forall(self, items):
        return Forall(items[0], items[1])

    def exists(self, items):
        return exists(items[0], items[1])

    def know(self, items):
        return K(items[0], items[1])

    def believe(self, items):
        return B(items[0], items[1])

    def know_dual(self, items):
        return k_dual(items[0], items[1])

    def believe_dual(self, items):
        return b_dual(items[0], items[1])

    def share(self, items):
        return Share(items[0], items[1])


_parser = Lark(GRAMMAR, parser="lalr", maybe_placeholders=True)


def parse(text: str) -> Formula:
    """Parse ASCII formula syntax into the normalized AST."""
    try:
        tree = _parser.parse(text)
    except UnexpectedEOF as e:
        raise FormulaSyntaxError("unexpected end of formula", text, 1, len(text) + 1) from e
    except UnexpectedInput as e:
        context = e.get_context(text).strip()
        raise FormulaSyntaxError(f"unexpected input near {context!r}", text, e.line, e.column) from e
    try:
        return _ToFormula().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, EvidenceLogicError):
            raise e.orig_exc from None
        raise


def parse_group(text: str) -> Group:
    """``{a,b}``, ``a,b`` or ``A``."""
    names = [name.strip() for name in text.strip().strip("{}").split(",") if name.strip()]
    if not names:
        raise FormulaSyntaxError("empty group literal", text)
    return frozenset(names)


# ---------------------------------------------------------------------------
# printing

_PREC = {"iff": 1, "implies": 2, "disj": 3, "conj": 4}
_OPS = {"iff": "<->", "implies": "->", "disj": "|", "conj": "&"}
_RIGHT_ASSOC = {"iff", "implies"}


def show_group(group: Group) -> str:
    return "{" + ",".join(sorted(group)) + "}"


def _view(f: Formula) -> tuple:
    """Read the sugared shape back off a normalized node."""
    match f:
        case And(Not(And(a, Not(b))), Not(And(b2, Not(a2)))) if a == a2 and b == b2:
            return ("iff", a, b)
        case And(left, right):
            return ("conj", left, right)
        case Not(Box(g, Not(a))):
            return ("prefix", f"Dia{show_group(g)} ", a)
        case Not(Forall(g, Not(a))):
            return ("prefix", f"Exists{show_group(g)} ", a)
        case Not(K(g, Not(a))):
            return ("prefix", f"<K{show_group(g)}> ", a)
        case Not(B(g, Not(a))):
            return ("prefix", f"<B{show_group(g)}> ", a)
        case Not(And(Not(And(_, Not(_))) as a, Not(b))):
            # an implication as antecedent reads better than a negated conjunction
            return ("implies", a, b)
        case Not(And(Not(a), Not(b))):
            return ("disj", a, b)
        case Not(And(a, Not(b))):
            return ("implies", a, b)
        case Not(sub):
            return ("prefix", "~", sub)
        case Box(g, sub):
            return ("prefix", f"Box{show_group(g)} ", sub)
        case Forall(g, sub):
            return ("prefix", f"Forall{show_group(g)} ", sub)
        case K(g, sub):
            return ("prefix", f"K{show_group(g)} ", sub)
        case B(g, sub):
            return ("prefix", f"B{show_group(g)} ", sub)
        case Share(g, sub):
            return ("prefix", f"[share{show_group(g)}] ", sub)
        case Atom(name):
            return ("atom", name)
    raise TypeError(f"not a formula: {f!r}")


def _show(f: Formula, context: int) -> str:
    view = _view(f)
    kind = view[0]
    if kind == "atom":
        return view[1]
    if kind == "prefix":
        return view[1] + _show(view[2], 5)
    prec = _PREC[kind]
    if kind in _RIGHT_ASSOC:
        left, right = _show(view[1], prec + 1), _show(view[2], prec)
    else:
        left, right = _show(view[1], prec), _show(view[2], prec + 1)
    text = f"{left} {_OPS[kind]} {right}"
    return f"({text})" if prec < context else text


def to_text(f: Formula) -> str:
    return _show(f, 0)


# ---------------------------------------------------------------------------
# translation and reduction

def expand_kb(f: Formula, *, keep_share: bool = False) -> Formula:
    """Rewrite knowledge and belief into the evidence modalities.

    ``B_I φ`` becomes ``[∀]_I ◇_I □_I φ`` and ``K_I φ`` becomes ``□_I φ ∧ [∀]_I ◇_I □_I φ``.
    """
    match f:
        case Atom():
            return f
        case Not(sub):
            return Not(expand_kb(sub, keep_share=keep_share))
        case And(left, right):
            return And(expand_kb(left, keep_share=keep_share), expand_kb(right, keep_share=keep_share))
        case B(g, sub):
            return Forall(g, dia(g, Box(g, expand_kb(sub, keep_share=keep_share))))
        case K(g, sub):
            inner = Box(g, expand_kb(sub, keep_share=keep_share))
            return And(inner, Forall(g, dia(g, inner)))
        case Share(g, sub):
            if not keep_share:
                raise LanguageError("reduce [share] modalities before translating knowledge and belief")
            return Share(g, expand_kb(sub, keep_share=True))
        case Box(g, sub) | Forall(g, sub):
            return type(f)(g, expand_kb(sub, keep_share=keep_share))
    raise TypeError(f"not a formula: {f!r}")


def absorb(j: Group, i: Group) -> Group:
    """``J/+I``: ``J ∪ I`` when the groups overlap, otherwise ``J``."""
    if "A" in j or "A" in i:
        return FULL
    return j | i if j & i else j


def _push(i: Group, f: Formula, system: LanguageTag) -> Formula:
    match f:
        case Atom():
            return f
        case Not(sub):
            return Not(_push(i, sub, system))
        case And(left, right):
            return And(_push(i, left, system), _push(i, right, system))
        case Box(j, sub) | Forall(j, sub) if system is LanguageTag.EV_DYN:
            return type(f)(absorb(j, i), _push(i, sub, system))
        case K(_, sub) | B(_, sub) if system is LanguageTag.KB_DYN:
            return type(f)(i, _push(i, sub, system))
    raise LanguageError(f"{to_text(f)} has no reduction law in {system}")


def reduce_dynamic(
    f: Formula,
    system: LanguageTag = LanguageTag.EV_DYN,
    agents: Sequence[str] | None = None,
) -> Formula:
    """Eliminate ``[share_I]`` innermost first with the reduction laws of ``system``."""
    if system not in (LanguageTag.EV_DYN, LanguageTag.KB_DYN):
        raise LanguageError(f"{system} is not a dynamic language")
    match f:
        case Atom():
            return f
        case Not(sub):
            return Not(reduce_dynamic(sub, system, agents))
        case And(left, right):
            return And(reduce_dynamic(left, system, agents), reduce_dynamic(right, system, agents))
        case Share(g, sub):
            if system is LanguageTag.KB_DYN and not is_full_group(g, agents):
                raise LanguageError(f"only [share{{A}}] reduces in {system}, got [share{show_group(g)}]")
            return _push(g, reduce_dynamic(sub, system, agents), system)
        case Modal(g, sub):
            return type(f)(g, reduce_dynamic(sub, system, agents))
    raise TypeError(f"not a formula: {f!r}")


def to_static(f: Formula, agents: Sequence[str] | None = None) -> Formula:
    """Static evidence formula equivalent to ``f`` on every topo-e-model.

    Formulas of the knowledge dynamic language are reduced with its own laws and then
    translated. Anything else is translated first, keeping the ``[share]`` operators, and
    reduced in the evidence system.
    """
    if not is_static(f) and in_language(f, LanguageTag.KB_DYN, agents):
        return expand_kb(reduce_dynamic(f, LanguageTag.KB_DYN, agents))
    return reduce_dynamic(expand_kb(f, keep_share=True), LanguageTag.EV_DYN)


# ---------------------------------------------------------------------------
# closure set

def explicit_groups(f: Formula, agents: Sequence[str]) -> Formula:
    """Replace ``A`` by the agent names and reject unknown agents."""
    known = frozenset(agents)

    def fix(group: Group) -> Group:
        if "A" in group:
            return known
        if not group <= known:
            raise InvalidInputError(f"unknown agents {sorted(group - known)}, universe is {list(agents)}")
        return group

    return map_groups(f, fix)


def closure_set(f: Formula, agents: Sequence[str]) -> frozenset[Formula]:
    """Least set containing ``f`` and closed under the eight closure rules.

    Subformulas and single negations are added, ``[∀]`` and ``□`` are lifted from each
    group to its proper supergroups, and ``[∀]_I ψ`` brings in ``□_I [∀]_I ψ`` and ``□_I ψ``,
    while ``¬[∀]_I ψ`` brings in ``□_I ¬[∀]_I ψ``.
    """
    if not in_language(f, LanguageTag.EV_FULL):
        raise LanguageError("closure sets are defined for static evidence formulas")
    if not agents:
        raise InvalidInputError("closure sets need a non-empty agent universe")
    f = explicit_groups(f, agents)
    universe = [frozenset(c) for r in range(1, len(agents) + 1) for c in combinations(agents, r)]
    result: set[Formula] = set()
    work: list[Formula] = []

    def add(g: Formula) -> None:
        if g not in result:
            result.add(g)
            work.append(g)

    add(f)
    while work:
        g = work.pop()
        for c in children(g):
            add(c)
        add(single_negation(g))
        match g:
            case Forall(j, sub):
                for i in universe:
                    if j < i:
                        add(Forall(i, sub))
                add(Box(j, g))
                add(Box(j, sub))
            case Not(Forall(i, _)):
                add(Box(i, g))
            case Box(j, sub):
                for i in universe:
                    if j < i:
                        add(Box(i, sub))
    logger.debug("closure of %s has %d formulas", to_text(f), len(result))
    return frozenset(result)


def formula_order(f: Formula) -> tuple:
    text = to_text(f)
    return (modal_depth(f), len(text), text)
