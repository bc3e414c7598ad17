"""Algebraic properties of a finished action table, and checks on the world itself."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .engine import ActionCayleyTable
from .world import StateRef, World, apply_word, as_word, reachable_from

Entries = Sequence[Sequence[Optional[int]]]


class Classification(Enum):
    COMMUTATIVE_GROUP = "CommutativeGroup"
    GROUP = "Group"
    COMMUTATIVE_MONOID = "CommutativeMonoid"
    MONOID = "Monoid"
    SMALL_CATEGORY = "SmallCategory"
    # identity or associativity failed; never produced by a converged engine run
    UNSTRUCTURED = "Unstructured"


@dataclass(frozen=True)
class GroupOrder:
    """Smallest n with a^n equal to the identity."""

    n: int

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class IndexPeriod:
    """Smallest i, p with a^i = a^(i+p), no power being the identity.

    ``partial`` marks chains that ran into an undefined composite; the
    undefined value is then treated as an absorbing zero, so the chain
    ends there with period 1.
    """

    index: int
    period: int
    partial: bool = False

    def __str__(self) -> str:
        text = f"index {self.index}, period {self.period}"
        return text + " (reaches undefined)" if self.partial else text


OrderInfo = Union[GroupOrder, IndexPeriod]


@dataclass(frozen=True)
class IdentityInfo:
    two_sided: Optional[int]
    left: FrozenSet[int]
    right: FrozenSet[int]


@dataclass(frozen=True)
class InverseInfo:
    left: FrozenSet[int]
    right: FrozenSet[int]
    two_sided: FrozenSet[int]


@dataclass(frozen=True)
class AlgebraReport:
    labels: Tuple[str, ...]
    totality: bool
    identity: IdentityInfo
    inverses: Dict[int, InverseInfo]
    associative: bool
    commutative: bool
    classification: Classification
    orders: Dict[int, OrderInfo]
    associativity_counterexample: Optional[Tuple[int, int, int]] = None
    commutativity_counterexample: Optional[Tuple[int, int]] = None

    @property
    def has_inverses(self) -> bool:
        return self.identity.two_sided is not None and all(info.two_sided for info in self.inverses.values())

    def property_rows(self) -> List[Tuple[str, bool]]:
        return [
            ("Totality", self.totality),
            ("Identity", self.identity.two_sided is not None),
            ("Inverse", self.has_inverses),
            ("Associative", self.associative),
            ("Commutative", self.commutative),
        ]


def _compose(entries: Entries, outer: int, inner: int) -> Optional[int]:
    # entries[r][c] holds c ∘ r
    return entries[inner][outer]


def find_identities(entries: Entries) -> IdentityInfo:
    n = len(entries)
    left = frozenset(e for e in range(n) if all(_compose(entries, e, a) == a for a in range(n)))
    right = frozenset(e for e in range(n) if all(_compose(entries, a, e) == a for a in range(n)))
    both = sorted(left & right)
    return IdentityInfo(both[0] if both else None, left, right)


def find_inverses(entries: Entries, identity: Optional[int]) -> Dict[int, InverseInfo]:
    n = len(entries)
    out = {}
    for a in range(n):
        if identity is None:
            out[a] = InverseInfo(frozenset(), frozenset(), frozenset())
            continue
        left = frozenset(b for b in range(n) if _compose(entries, b, a) == identity)
        right = frozenset(b for b in range(n) if _compose(entries, a, b) == identity)
        out[a] = InverseInfo(left, right, left & right)
    return out


def associativity_counterexample(entries: Entries) -> Optional[Tuple[int, int, int]]:
    """First (x, y, z) with (z∘y)∘x != z∘(y∘x); undefined counts as a value."""
    n = len(entries)
    for x, y, z in product(range(n), repeat=3):
        zy = _compose(entries, z, y)
        yx = _compose(entries, y, x)
        lhs = None if zy is None else _compose(entries, zy, x)
        rhs = None if yx is None else _compose(entries, z, yx)
        if lhs != rhs:
            return x, y, z
    return None


def commutativity_counterexample(entries: Entries) -> Optional[Tuple[int, int]]:
    n = len(entries)
    for a in range(n):
        for b in range(a + 1, n):
            if entries[a][b] != entries[b][a]:
                return a, b
    return None


def element_orders(table: Union[ActionCayleyTable, Entries], identity: Optional[int] = None) -> Dict[int, OrderInfo]:
    entries = table.entries if isinstance(table, ActionCayleyTable) else table
    if identity is None:
        identity = find_identities(entries).two_sided
    orders: Dict[int, OrderInfo] = {}
    for a in range(len(entries)):
        powers: List[int] = [a]
        seen = {a: 1}
        while True:
            if powers[-1] == identity:
                orders[a] = GroupOrder(len(powers))
                break
            nxt = _compose(entries, a, powers[-1])
            if nxt is None:
                orders[a] = IndexPeriod(len(powers) + 1, 1, partial=True)
                break
            if nxt in seen:
                orders[a] = IndexPeriod(seen[nxt], len(powers) + 1 - seen[nxt])
                break
            powers.append(nxt)
            seen[nxt] = len(powers)
    return orders


def classify(totality: bool, identity: bool, inverses: bool, associative: bool, commutative: bool) -> Classification:
    if not (identity and associative):
        return Classification.UNSTRUCTURED
    if not totality:
        return Classification.SMALL_CATEGORY
    if inverses:
        return Classification.COMMUTATIVE_GROUP if commutative else Classification.GROUP
    return Classification.COMMUTATIVE_MONOID if commutative else Classification.MONOID


def analyze(table: ActionCayleyTable, labels: Optional[Sequence[str]] = None) -> AlgebraReport:
    entries = table.entries
    names = tuple(labels) if labels is not None else tuple(str(w) for w in table.labels)
    totality = all(v is not None for row in entries for v in row)
    identity = find_identities(entries)
    inverses = find_inverses(entries, identity.two_sided)
    assoc_bad = associativity_counterexample(entries)
    comm_bad = commutativity_counterexample(entries)
    has_inverses = identity.two_sided is not None and all(info.two_sided for info in inverses.values())
    return AlgebraReport(
        labels=names,
        totality=totality,
        identity=identity,
        inverses=inverses,
        associative=assoc_bad is None,
        commutative=comm_bad is None,
        classification=classify(totality, identity.two_sided is not None, has_inverses, assoc_bad is None, comm_bad is None),
        orders=element_orders(entries, identity.two_sided),
        associativity_counterexample=assoc_bad,
        commutativity_counterexample=comm_bad,
    )


@dataclass(frozen=True)
class ConditionResult:
    """``holds`` is None when the search was cut off before deciding."""

    holds: Optional[bool]
    detail: str = ""
    witness: Optional[tuple] = None

    @property
    def inconclusive(self) -> bool:
        return self.holds is None


def check_wc1(world: World, restrict_to_reachable_from: Optional[StateRef] = None) -> ConditionResult:
    """Every single action is defined at every state (optionally only the reachable ones)."""
    if restrict_to_reachable_from is None:
        states = range(world.size)
    else:
        states = sorted(reachable_from(world, restrict_to_reachable_from))
    for s in states:
        for a, images in enumerate(world.dynamics):
            if images[s] is None:
                return ConditionResult(False, f"{world.actions[a]} is undefined at {world.states[s]}", (world.states[s], world.actions[a]))
    return ConditionResult(True, "every action is defined everywhere")


def check_wc2(table: ActionCayleyTable, labels: Optional[Sequence[str]] = None) -> ConditionResult:
    """Every element has a two-sided inverse with respect to the identity."""
    names = tuple(labels) if labels is not None else tuple(str(w) for w in table.labels)
    identity = find_identities(table.entries).two_sided
    if identity is None:
        return ConditionResult(False, "no two-sided identity element")
    for a, info in find_inverses(table.entries, identity).items():
        if not info.two_sided:
            return ConditionResult(False, f"{names[a]} has no two-sided inverse", (names[a],))
    return ConditionResult(True, "every element has a two-sided inverse")


DEFAULT_SEARCH_LIMIT = 100_000


def find_homogeneity_map(world: World, source: int, target: int, limit: int = DEFAULT_SEARCH_LIMIT) -> Tuple[Optional[Dict[int, int]], bool]:
    """Backtracking search for a bijection sending ``source`` to ``target``.

    The bijection must carry every labeled transition to a transition with
    the same label, and undefined pairs to undefined pairs (which is the
    same as preserving transitions under the inverse map too). Returns the
    map or None, and whether the search finished within ``limit`` nodes.
    """
    n = world.size
    dyn = world.dynamics
    nodes = 0

    def propagate(sigma: Dict[int, int], used: set, start: int, image: int) -> bool:
        stack = [(start, image)]
        while stack:
            x, y = stack.pop()
            if x in sigma:
                if sigma[x] != y:
                    return False
                continue
            if y in used:
                return False
            sigma[x] = y
            used.add(y)
            for images in dyn:
                fx, fy = images[x], images[y]
                if (fx is None) != (fy is None):
                    return False
                if fx is not None:
                    stack.append((fx, fy))
        return True

    def search(sigma: Dict[int, int], used: set) -> Optional[Dict[int, int]]:
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise _SearchCut
        free = [x for x in range(n) if x not in sigma]
        if not free:
            return sigma
        x = free[0]
        for y in range(n):
            if y in used:
                continue
            trial, trial_used = dict(sigma), set(used)
            if propagate(trial, trial_used, x, y):
                found = search(trial, trial_used)
                if found is not None:
                    return found
        return None

    sigma: Dict[int, int] = {}
    used: set = set()
    if not propagate(sigma, used, source, target):
        return None, True
    try:
        return search(sigma, used), True
    except _SearchCut:
        return None, False


class _SearchCut(Exception):
    pass


def check_wc3_homogeneity(world: World, limit: int = DEFAULT_SEARCH_LIMIT) -> ConditionResult:
    """For every ordered state pair, a transition-preserving bijection maps one to the other."""
    cut = None
    for w1, w2 in product(range(world.size), repeat=2):
        sigma, finished = find_homogeneity_map(world, w1, w2, limit)
        if not finished:
            cut = cut or (world.states[w1], world.states[w2])
            continue
        if sigma is None:
            return ConditionResult(
                False,
                f"no transition-preserving bijection sends {world.states[w1]} to {world.states[w2]}",
                (world.states[w1], world.states[w2]),
            )
    if cut is not None:
        return ConditionResult(None, f"search limit {limit} reached for {cut[0]} -> {cut[1]}", cut)
    return ConditionResult(True, "every state pair is related by a transition-preserving bijection")


class Reversibility(Enum):
    REVERSIBLE = "reversible"
    IRREVERSIBLE = "irreversible"
    UNDEFINED = "undefined"


def reversibility(world: World, word, state: StateRef) -> Reversibility:
    """Whether some word leads back to ``state`` after ``word`` was performed there."""
    start = world.state_index(state)
    end = apply_word(world, as_word(world, word), start)
    if end is None:
        return Reversibility.UNDEFINED
    return Reversibility.REVERSIBLE if start in reachable_from(world, end) else Reversibility.IRREVERSIBLE


def reversible_actions(world: World, state: StateRef) -> Callable[..., Reversibility]:
    start = world.state_index(state)
    return lambda word: reversibility(world, word, start)
