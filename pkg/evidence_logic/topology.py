"""Finite set algebra and the topological kernel.

States are the integers ``0..n-1``. A set of states is an ``int`` bitmask, and a binary
relation on states is a tuple of successor bitmasks, one entry per state.

Finite topologies are Alexandroff, so each one is kept together with the least open
neighbourhood ``U_x`` of every state. Interior and closure then take one pass over the
carrier. The full family of opens is materialized as well, so predicates such as
``U in T.opens`` are direct lookups.
"""
from dataclasses import dataclass, field
from typing import Iterable, Sequence
import logging

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_MAX_CARRIER = 16

StateSet = int
Relation = tuple[int, ...]


# ---------------------------------------------------------------------------
# state sets

def full_set(n: int) -> StateSet:
    return (1 << n) - 1


def members(s: StateSet) -> list[int]:
    out = []
    x = 0
    while s:
        if s & 1:
            out.append(x)
        s >>= 1
        x += 1
    return out


def state_set(states: Iterable[int], n: int) -> StateSet:
    mask = 0
    for x in states:
        if not 0 <= x < n:
            raise InvalidInputError(f"state {x} outside carrier of size {n}")
        mask |= 1 << x
    return mask


def complement(s: StateSet, n: int) -> StateSet:
    return full_set(n) & ~s


def is_subset(a: StateSet, b: StateSet) -> bool:
    return a & ~b == 0


def lowest(s: StateSet) -> int:
    """Smallest member of a non-empty set."""
    return (s & -s).bit_length() - 1


def check_within(s: StateSet, n: int, what: str = "set") -> None:
    if s < 0 or s >> n:
        raise InvalidInputError(f"{what} {members(s) if s >= 0 else s} leaves the carrier of size {n}")


def check_carrier(n: int, max_carrier: int = DEFAULT_MAX_CARRIER) -> None:
    if n < 1:
        raise InvalidInputError(f"carrier size must be positive, got {n}")
    if n > max_carrier:
        raise InvalidInputError(f"carrier size {n} exceeds the cap of {max_carrier} states")


# ---------------------------------------------------------------------------
# relations

def identity(n: int) -> Relation:
    return tuple(1 << x for x in range(n))


def total(n: int) -> Relation:
    return (full_set(n),) * n


def empty_relation(n: int) -> Relation:
    return (0,) * n


def from_pairs(pairs: Iterable[tuple[int, int]], n: int) -> Relation:
    rows = [0] * n
    for x, y in pairs:
        if not (0 <= x < n and 0 <= y < n):
            raise InvalidInputError(f"pair ({x}, {y}) outside carrier of size {n}")
        rows[x] |= 1 << y
    return tuple(rows)


def to_pairs(r: Relation) -> list[tuple[int, int]]:
    return [(x, y) for x, row in enumerate(r) for y in members(row)]


def check_relation(r: Relation, n: int, what: str = "relation") -> None:
    if len(r) != n:
        raise InvalidInputError(f"{what} has {len(r)} rows, carrier has {n} states")
    for row in r:
        check_within(row, n, what)


def intersect(*relations: Relation) -> Relation:
    rows = list(relations[0])
    for r in relations[1:]:
        for x, row in enumerate(r):
            rows[x] &= row
    return tuple(rows)


def union(*relations: Relation) -> Relation:
    rows = list(relations[0])
    for r in relations[1:]:
        for x, row in enumerate(r):
            rows[x] |= row
    return tuple(rows)


def converse(r: Relation) -> Relation:
    rows = [0] * len(r)
    for x, row in enumerate(r):
        for y in members(row):
            rows[y] |= 1 << x
    return tuple(rows)


def image(r: Relation, a: StateSet) -> StateSet:
    out = 0
    for x in members(a):
        out |= r[x]
    return out


def compose(r: Relation, s: Relation) -> Relation:
    """``x (r;s) z`` iff ``x r y`` and ``y s z`` for some ``y``."""
    return tuple(image(s, row) for row in r)


def necessity(r: Relation, a: StateSet) -> StateSet:
    """States all of whose successors lie in ``a``."""
    out = 0
    for x, row in enumerate(r):
        if row & ~a == 0:
            out |= 1 << x
    return out


def reflexive_transitive_closure(r: Relation) -> Relation:
    rows = [row | (1 << x) for x, row in enumerate(r)]
    n = len(rows)
    for k in range(n):
        bit = 1 << k
        for x in range(n):
            if rows[x] & bit:
                rows[x] |= rows[k]
    return tuple(rows)


def equivalence_closure(r: Relation) -> Relation:
    return reflexive_transitive_closure(union(r, converse(r)))


def is_subrelation(r: Relation, s: Relation) -> bool:
    return all(a & ~b == 0 for a, b in zip(r, s))


def is_reflexive(r: Relation) -> bool:
    return all(row >> x & 1 for x, row in enumerate(r))


def is_transitive(r: Relation) -> bool:
    return is_subrelation(compose(r, r), r)


def is_symmetric(r: Relation) -> bool:
    return r == converse(r)


def is_serial(r: Relation) -> bool:
    return all(row != 0 for row in r)


def is_euclidean(r: Relation) -> bool:
    # x r y and x r z imply y r z
    return all(row & ~r[y] == 0 for row in r for y in members(row))


def is_preorder(r: Relation) -> bool:
    return is_reflexive(r) and is_transitive(r)


def is_equivalence(r: Relation) -> bool:
    return is_preorder(r) and is_symmetric(r)


def is_weakly_directed(r: Relation) -> bool:
    for row in r:
        successors = members(row)
        for i, y in enumerate(successors):
            for z in successors[i + 1:]:
                if r[y] & r[z] == 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# topologies

def _least_neighbourhoods(opens: Iterable[StateSet], n: int) -> tuple[StateSet, ...]:
    nbhd = [full_set(n)] * n
    for u in opens:
        for x in members(u):
            nbhd[x] &= u
    return tuple(nbhd)


def _unions_of(basis: Iterable[StateSet]) -> frozenset[StateSet]:
    opens = {0}
    for b in dict.fromkeys(basis):
        opens |= {u | b for u in opens}
    return frozenset(opens)


@dataclass(frozen=True)
class Topology:
    carrier_size: int
    opens: frozenset[StateSet]
    # generating family, kept for provenance and for the file format
    subbasis: tuple[StateSet, ...] = field(default=(), compare=False)
    neighbourhoods: tuple[StateSet, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.neighbourhoods) != self.carrier_size:
            object.__setattr__(self, "neighbourhoods", _least_neighbourhoods(self.opens, self.carrier_size))

    @classmethod
    def from_opens(cls, opens: Iterable[StateSet], n: int) -> "Topology":
        """Check an explicit family of opens and record its least neighbourhoods as subbasis."""
        opens = frozenset(opens)
        for u in opens:
            check_within(u, n, "open set")
        if 0 not in opens or full_set(n) not in opens:
            raise InvalidInputError("a topology must contain the empty set and the whole carrier")
        nbhd = _least_neighbourhoods(opens, n)
        if _unions_of(nbhd) != opens:
            raise InvalidInputError("family is not closed under unions and intersections")
        return cls(n, opens, tuple(dict.fromkeys(nbhd)), nbhd)

    @classmethod
    def discrete(cls, n: int) -> "Topology":
        return generate_topology([1 << x for x in range(n)], n, max_carrier=max(n, 1))

    @classmethod
    def indiscrete(cls, n: int) -> "Topology":
        return generate_topology([], n, max_carrier=max(n, 1))

    def is_open(self, u: StateSet) -> bool:
        return u in self.opens

    def interior(self, a: StateSet) -> StateSet:
        check_within(a, self.carrier_size)
        out = 0
        for x, u in enumerate(self.neighbourhoods):
            if u & ~a == 0:
                out |= 1 << x
        return out

    def closure(self, a: StateSet) -> StateSet:
        n = self.carrier_size
        return complement(self.interior(complement(a, n)), n)

    def is_discrete(self) -> bool:
        return len(self.opens) == 1 << self.carrier_size


def is_topology(opens: Iterable[StateSet], n: int) -> bool:
    try:
        Topology.from_opens(opens, n)
    except InvalidInputError:
        return False
    return True


def generate_topology(
    subbasis: Sequence[StateSet],
    carrier_size: int,
    *,
    max_carrier: int = DEFAULT_MAX_CARRIER,
) -> Topology:
    """Least topology on ``{0..carrier_size-1}`` containing every subbasis member.

    The least open around ``x`` is the intersection of the subbasis members containing
    ``x`` (the empty intersection being the carrier), and every open is a union of these.
    """
    check_carrier(carrier_size, max_carrier)
    subbasis = tuple(dict.fromkeys(subbasis))
    for s in subbasis:
        check_within(s, carrier_size, "subbasis member")
        if s == 0:
            raise InvalidInputError("the empty set cannot be a subbasis member")
    nbhd = [full_set(carrier_size)] * carrier_size
    for s in subbasis:
        for x in members(s):
            nbhd[x] &= s
    return Topology(carrier_size, _unions_of(nbhd), subbasis, tuple(nbhd))


def interior(t: Topology, a: StateSet) -> StateSet:
    return t.interior(a)


def closure(t: Topology, a: StateSet) -> StateSet:
    return t.closure(a)


def _same_carrier(items: Sequence, what: str) -> int:
    if not items:
        raise InvalidInputError(f"cannot join an empty list of {what}")
    n = items[0].carrier_size
    if any(item.carrier_size != n for item in items):
        raise InvalidInputError(f"{what} live on different carriers")
    return n


def join(topologies: Sequence[Topology]) -> Topology:
    """Least topology containing the opens of every input."""
    n = _same_carrier(topologies, "topologies")
    if len(topologies) == 1:
        return topologies[0]
    nbhd = list(topologies[0].neighbourhoods)
    for t in topologies[1:]:
        for x, u in enumerate(t.neighbourhoods):
            nbhd[x] &= u
    subbasis = tuple(dict.fromkeys(s for t in topologies for s in t.subbasis))
    return Topology(n, _unions_of(nbhd), subbasis, tuple(nbhd))


def specialization(t: Topology) -> Relation:
    """``x <= y`` iff every open containing ``x`` contains ``y``."""
    return t.neighbourhoods


def is_alexandroff(t: Topology) -> bool:
    opens = t.opens
    return all(u & v in opens for u in opens for v in opens)


# ---------------------------------------------------------------------------
# partitions

@dataclass(frozen=True)
class Partition:
    carrier_size: int
    cells: tuple[StateSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(sorted(self.cells, key=lambda c: c & -c)))

    @classmethod
    def from_cells(cls, cells: Iterable[StateSet], n: int) -> "Partition":
        cells = tuple(cells)
        seen = 0
        for c in cells:
            check_within(c, n, "cell")
            if c == 0:
                raise InvalidInputError("partition cells must be non-empty")
            if c & seen:
                raise InvalidInputError(f"cell {members(c)} overlaps another cell")
            seen |= c
        if seen != full_set(n):
            raise InvalidInputError(f"cells miss states {members(complement(seen, n))}")
        return cls(n, cells)

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(n, tuple(1 << x for x in range(n)))

    @classmethod
    def indiscrete(cls, n: int) -> "Partition":
        return cls(n, (full_set(n),))

    @classmethod
    def from_equivalence(cls, r: Relation) -> "Partition":
        return cls(len(r), tuple(dict.fromkeys(r)))

    def cell(self, x: int) -> StateSet:
        for c in self.cells:
            if c >> x & 1:
                return c
        raise InvalidInputError(f"state {x} lies in no cell")

    def saturate(self, a: StateSet) -> StateSet:
        """Union of the cells meeting ``a``."""
        out = 0
        for c in self.cells:
            if c & a:
                out |= c
        return out

    def equivalence(self) -> Relation:
        return tuple(self.cell(x) for x in range(self.carrier_size))


def join_partition(partitions: Sequence[Partition]) -> Partition:
    """Common refinement: the cell of ``x`` is the intersection of its cells."""
    n = _same_carrier(partitions, "partitions")
    if len(partitions) == 1:
        return partitions[0]
    cells = []
    for x in range(n):
        c = full_set(n)
        for p in partitions:
            c &= p.cell(x)
        cells.append(c)
    return Partition(n, tuple(dict.fromkeys(cells)))


def locally_dense_at(t: Topology, pi: Partition, u: StateSet, x: int) -> bool:
    if t.carrier_size != pi.carrier_size:
        raise InvalidInputError("topology and partition live on different carriers")
    if not t.is_open(u):
        raise InvalidInputError(f"{members(u)} is not open")
    if not 0 <= x < t.carrier_size:
        raise InvalidInputError(f"state {x} outside carrier of size {t.carrier_size}")
    return is_subset(pi.cell(x), t.closure(u))


def dense_open(t: Topology, pi: Partition) -> Topology:
    """Opens that are locally dense at each of their points, plus the empty set."""
    if t.carrier_size != pi.carrier_size:
        raise InvalidInputError("topology and partition live on different carriers")
    opens = {u for u in t.opens if u == 0 or is_subset(pi.saturate(u), t.closure(u))}
    return Topology.from_opens(opens, t.carrier_size)
