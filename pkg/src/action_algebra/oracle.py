"""Brute-force closure of the generator transforms, used to cross-check the engine.

Nothing here shares code with the exploration in ``engine`` beyond the world
semantics: the closure is a plain breadth-first search over words by length,
deduplicated by the transform each word induces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .engine import Algebra, CapExceeded, DEFAULT_MAX_ELEMENTS, restrict, transform_of
from .world import StateRef, Word, World, format_word, is_empty, reachable_from

Key = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class ClosureResult:
    """Distinct transforms, each restricted to ``states``, in order of discovery.

    ``composition[(i, j)]`` is the index of ``transforms[j] ∘ transforms[i]``,
    or None when that composite is nowhere defined and not a member.
    """

    world: World
    states: Tuple[int, ...]
    transforms: Tuple[Key, ...]
    witnesses: Tuple[Word, ...]
    composition: Dict[Tuple[int, int], Optional[int]]
    empty_pairs: int
    empty_is_member: bool

    def __len__(self) -> int:
        return len(self.transforms)

    def index(self, key: Key) -> Optional[int]:
        try:
            return self.transforms.index(key)
        except ValueError:
            return None


def generate_closure(
    world: World,
    restrict_to_reachable_from: Optional[StateRef] = None,
    unrestricted: bool = False,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> ClosureResult:
    """Close the single-action transforms under composition.

    Transforms are compared on the states reachable from the given state
    (default: the world's initial state), or on all states if
    ``unrestricted``. A nowhere-defined composite is a member only if some
    single action is already nowhere defined there.
    """
    start = world.initial_index if restrict_to_reachable_from is None else world.state_index(restrict_to_reachable_from)
    states = tuple(range(world.size)) if unrestricted else tuple(sorted(reachable_from(world, start)))
    position = {s: i for i, s in enumerate(states)}
    gens = [restrict(world.dynamics[a], states) for a in range(len(world.actions))]

    def compose(g: Key, f: Key) -> Key:
        return tuple(None if x is None else g[position[x]] for x in f)

    seen: Dict[Key, int] = {}
    keys: List[Key] = []
    witnesses: List[Word] = []

    def admit(key: Key, word: Word) -> bool:
        if key in seen:
            return False
        seen[key] = len(keys)
        keys.append(key)
        witnesses.append(word)
        if len(keys) > max_elements:
            raise CapExceeded(max_elements, len(keys), 0)
        return True

    level = [seen[g] for a, g in enumerate(gens) if admit(g, (a,))]
    empty_member = any(is_empty(g) for g in gens)
    # Words are extended on the left, symbol-major, so the first word found
    # for a transform is its shortlex-least witness.
    while level:
        nxt = []
        for a, g in enumerate(gens):
            for i in level:
                key = compose(g, keys[i])
                if is_empty(key) and not empty_member:
                    continue
                if admit(key, (a,) + witnesses[i]):
                    nxt.append(seen[key])
        level = nxt

    composition: Dict[Tuple[int, int], Optional[int]] = {}
    empty_pairs = 0
    for i, f in enumerate(keys):
        for j, g in enumerate(keys):
            key = compose(g, f)
            k = seen.get(key)
            if k is None:
                if not is_empty(key):
                    raise AssertionError("closure is not closed under composition")
                empty_pairs += 1
            composition[(i, j)] = k
    return ClosureResult(world, states, tuple(keys), tuple(witnesses), composition, empty_pairs, empty_member)


@dataclass
class ComparisonReport:
    engine_count: int
    oracle_count: int
    mismatches: List[str] = field(default_factory=list)

    @property
    def match(self) -> bool:
        return not self.mismatches

    @property
    def first_mismatch(self) -> Optional[str]:
        return self.mismatches[0] if self.mismatches else None

    def render(self) -> str:
        lines = [
            f"engine classes: {self.engine_count}",
            f"oracle transforms: {self.oracle_count}",
            f"result: {'MATCH' if self.match else 'MISMATCH'}",
        ]
        if self.mismatches:
            lines.append(f"first mismatch: {self.first_mismatch}")
            lines.append(f"mismatches: {len(self.mismatches)}")
        return "\n".join(lines) + "\n"


def compare_partitions(algebra: Algebra, closure: ClosureResult, limit: int = 50) -> ComparisonReport:
    """Check counts, class contents and composition between engine and oracle."""
    world = algebra.world
    report = ComparisonReport(algebra.size, len(closure))
    problems = report.mismatches

    def name(word: Word) -> str:
        return format_word(world, word)

    if algebra.size != len(closure):
        problems.append(f"class count {algebra.size} != closure size {len(closure)}")

    match_of: List[Optional[int]] = []
    claimed: Dict[int, Word] = {}
    for rep in algebra.labels:
        key = restrict(transform_of(world, rep), closure.states)
        k = closure.index(key)
        match_of.append(k)
        if k is None:
            problems.append(f"class {name(rep)} has a transform missing from the closure")
        elif k in claimed:
            problems.append(f"classes {name(claimed[k])} and {name(rep)} share one transform")
        else:
            claimed[k] = rep
        for member in algebra.classes.members(rep):
            if restrict(transform_of(world, member), closure.states) != key:
                problems.append(f"word {name(member)} does not act like its representative {name(rep)}")
    for k, witness in enumerate(closure.witnesses):
        if k not in claimed:
            problems.append(f"closure transform of {name(witness)} has no engine class")

    entries = algebra.action_table.entries
    for r, kr in enumerate(match_of):
        for c, kc in enumerate(match_of):
            if kr is None or kc is None:
                continue
            expected = closure.composition[(kr, kc)]
            got = entries[r][c]
            got_k = None if got is None else match_of[got]
            if got_k != expected:
                shown = "undefined" if got is None else name(algebra.labels[got])
                want = "undefined" if expected is None else name(closure.witnesses[expected])
                problems.append(
                    f"composite {name(algebra.labels[c])}∘{name(algebra.labels[r])}: engine {shown}, oracle {want}"
                )
    del problems[limit:]
    return report


def corrupt_classes(algebra: Algebra) -> Algebra:
    """Negative control: move one member word into the wrong class.

    Picks the first class with a non-representative member and files that
    member under the next class. The tables are left untouched.
    """
    from dataclasses import replace

    from .engine import EquivalenceClassSet

    labels = algebra.labels
    classes = {rep: list(members) for rep, members in algebra.classes.classes.items()}
    for i, rep in enumerate(labels):
        extra = [m for m in classes[rep] if m != rep and m]
        if extra and len(labels) > 1:
            victim = extra[0]
            target = labels[(i + 1) % len(labels)]
            classes[rep].remove(victim)
            classes[target].append(victim)
            lookup = dict(algebra.classes.word_lookup)
            lookup[victim] = target
            return replace(algebra, classes=EquivalenceClassSet(classes, lookup))
    raise ValueError("no class has a spare member to misfile")
