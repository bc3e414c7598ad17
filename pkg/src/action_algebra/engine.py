"""Cayley table generation for the algebra of an agent's actions.

The exploration grows a set of equivalence classes of action-words, keeping a
state Cayley table over the class labels: ``entry[r][c] = c * (r * w0)``. Two
words are taken to be equivalent while their rows and columns in that table
agree. New candidates come from composing every pair of labels; a candidate
with no equivalent becomes a new label, and its outcome state may split
classes whose members behaved alike on the states probed so far.

Once no candidates remain, labels are renamed to the shortest (then
alphabetically first) word of their class and sorted the same way, which
makes the output independent of the exploration order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .world import (
    PartialTransform,
    StateRef,
    Word,
    World,
    compose_transforms,
    format_word,
    identity_transform,
    is_empty,
    reachable_from,
    shortlex_key,
)

DEFAULT_MAX_ELEMENTS = 10_000

Profile = Tuple[Tuple[Optional[int], ...], Tuple[Optional[int], ...]]


class CapExceeded(RuntimeError):
    """The number of classes grew past the configured limit."""

    def __init__(self, limit: int, reached: int, pending: int):
        super().__init__(f"capped: {reached} classes exceed the limit of {limit} ({pending} candidates still queued)")
        self.limit = limit
        self.reached = reached
        self.pending = pending


@dataclass(frozen=True)
class StateCayleyTable:
    """``entries[r][c]`` is the state reached by doing label r, then label c, from ``initial``."""

    labels: Tuple[Word, ...]
    entries: Tuple[Tuple[Optional[int], ...], ...]
    initial: int

    def entry(self, row: Word, col: Word) -> Optional[int]:
        return self.entries[self.labels.index(row)][self.labels.index(col)]


@dataclass(frozen=True)
class ActionCayleyTable:
    """``entries[r][c]`` is the index of the class of ``labels[c] ∘ labels[r]``, or None."""

    labels: Tuple[Word, ...]
    entries: Tuple[Tuple[Optional[int], ...], ...]

    def __len__(self) -> int:
        return len(self.labels)

    def entry(self, row: Word, col: Word) -> Optional[Word]:
        k = self.entries[self.labels.index(row)][self.labels.index(col)]
        return None if k is None else self.labels[k]


@dataclass
class EquivalenceClassSet:
    """Representative word -> member words, plus the reverse lookup."""

    classes: Dict[Word, List[Word]]
    word_lookup: Dict[Word, Word]

    def __len__(self) -> int:
        return len(self.classes)

    def representative(self, word: Word) -> Optional[Word]:
        return self.word_lookup.get(tuple(word))

    def members(self, representative: Word) -> List[Word]:
        return self.classes[representative]


@dataclass(frozen=True)
class Algebra:
    """Everything a finished exploration produced, with canonical labels."""

    world: World
    initial: int
    reachable: Tuple[int, ...]
    state_table: StateCayleyTable
    action_table: ActionCayleyTable
    classes: EquivalenceClassSet
    transforms: Tuple[PartialTransform, ...]

    @property
    def labels(self) -> Tuple[Word, ...]:
        return self.state_table.labels

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def label_names(self) -> Tuple[str, ...]:
        return tuple(format_word(self.world, w) for w in self.labels)

    def index_of(self, word: Union[str, Sequence]) -> int:
        """Index of the class containing ``word`` (any word, not only a label)."""
        from .world import as_word

        key = restrict(transform_of(self.world, as_word(self.world, word)), self.reachable)
        for i, t in enumerate(self.transforms):
            if restrict(t, self.reachable) == key:
                return i
        raise KeyError(f"{format_word(self.world, as_word(self.world, word))} is not an element of the algebra")


def restrict(transform: Sequence[Optional[int]], states: Sequence[int]) -> Tuple[Optional[int], ...]:
    return tuple(transform[s] for s in states)


def transform_of(world: World, word: Word) -> PartialTransform:
    result = identity_transform(world.size)
    for a in reversed(word):
        result = compose_transforms(world.dynamics[a], result)
    return result


class CayleyExploration:
    """Mutable working state of one exploration from a fixed initial state.

    ``admit_empty`` lets composites that are undefined on every probed state
    become classes of their own. By default they are held aside and only
    reconsidered when a newly probed state makes them defined somewhere.
    """

    def __init__(
        self,
        world: World,
        initial: Optional[StateRef] = None,
        max_elements: int = DEFAULT_MAX_ELEMENTS,
        admit_empty: bool = False,
    ):
        self.world = world
        self.initial = world.initial_index if initial is None else world.state_index(initial)
        self.max_elements = max_elements
        self.admit_empty = admit_empty
        self.labels: List[Word] = []
        self.entries: Dict[Tuple[Word, Word], Optional[int]] = {}
        self.classes: Dict[Word, List[Word]] = {}
        self.lookup: Dict[Word, Word] = {}
        self.pending: deque = deque()
        self.queued: set = set()
        self.held: List[Word] = []
        self._transforms: Dict[Word, PartialTransform] = {(): identity_transform(world.size)}
        self._held_set: set = set()
        self._profiles: Optional[Dict[Profile, List[Word]]] = None
        self._scanned = 0

    def transform(self, word: Word) -> PartialTransform:
        t = self._transforms.get(word)
        if t is None:
            t = transform_of(self.world, word)
            self._transforms[word] = t
        return t

    def outcome(self, word: Word, state: Optional[int]) -> Optional[int]:
        return None if state is None else self.transform(word)[state]

    # AddElementToStateCayleyTable
    def add_element(self, a: Word) -> None:
        if a in self.labels:
            raise ValueError(f"duplicate label {format_word(self.world, a)}")
        self.labels.append(a)
        self._profiles = None
        a_state = self.outcome(a, self.initial)
        for c in self.labels:
            self.entries[(a, c)] = self.outcome(c, a_state)
        for r in self.labels:
            self.entries[(r, a)] = self.outcome(a, self.outcome(r, self.initial))
        if len(self.labels) > self.max_elements:
            raise CapExceeded(self.max_elements, len(self.labels), len(self.pending))

    def _remove_label(self, a: Word) -> None:
        self.labels.remove(a)
        self._profiles = None
        for other in self.labels:
            self.entries.pop((a, other), None)
            self.entries.pop((other, a), None)
        self.entries.pop((a, a), None)

    def _label_profile(self, r: Word, skip: Optional[Word] = None) -> Profile:
        row = tuple(self.entries[(r, c)] for c in self.labels if c != skip)
        col = tuple(self.entries[(q, r)] for q in self.labels if q != skip)
        return row, col

    def _word_profile(self, a: Word, skip: Optional[Word] = None) -> Profile:
        a_state = self.outcome(a, self.initial)
        row = tuple(self.outcome(c, a_state) for c in self.labels if c != skip)
        col = tuple(self.outcome(a, self.outcome(q, self.initial)) for q in self.labels if q != skip)
        return row, col

    # SearchForEquivalents
    def search_for_equivalents(self, a: Word) -> List[Word]:
        """Labels whose table row and column match those of ``a``.

        When ``a`` is itself a label its own row and column position is left
        out on both sides, so ``a`` always finds itself.
        """
        if a in self.classes:
            target = self._label_profile(a, skip=a)
            return [r for r in self.labels if self._label_profile(r, skip=a) == target]
        if self._profiles is None:
            self._profiles = {}
            for r in self.labels:
                self._profiles.setdefault(self._label_profile(r), []).append(r)
        return list(self._profiles.get(self._word_profile(a), []))

    def _undefined_on_probes(self, a: Word) -> bool:
        t = self.transform(a)
        return all(t[s] is None for s in self.probe_states())

    def probe_states(self) -> Iterator[int]:
        for r in self.labels:
            s = self.outcome(r, self.initial)
            if s is not None:
                yield s

    def _record(self, word: Word, representative: Word) -> None:
        self.classes[representative].append(word)
        self.lookup[word] = representative

    def _new_class(self, word: Word) -> None:
        self.classes[word] = [word]
        self.lookup[word] = word
        self.add_element(word)

    # SearchForNewCandidates
    def search_for_new_candidates(self) -> None:
        """Compose every label pair ``c ∘ r`` (row-major) and absorb or queue it.

        Words met before are skipped, which only avoids repeated work: every
        such word already sits in a class, the queue, or the held-aside list.
        """
        n = len(self.labels)
        labels = list(self.labels)
        for i, r in enumerate(labels):
            for j in range(0 if i >= self._scanned else self._scanned, n):
                c = labels[j]
                a = c + r
                if a in self.lookup or a in self.queued or a in self._held_set:
                    continue
                if a not in self._transforms:
                    self._transforms[a] = compose_transforms(self.transform(c), self.transform(r))
                found = self.search_for_equivalents(a)
                if found:
                    self._record(a, found[0])
                elif not self.admit_empty and self._undefined_on_probes(a):
                    self._hold(a)
                else:
                    self.pending.append(a)
                    self.queued.add(a)
        self._scanned = n

    def _hold(self, a: Word) -> None:
        self.held.append(a)
        self._held_set.add(a)

    # SearchForBrokenEquivalenceClasses
    def search_for_broken_equivalence_classes(self, a_c: Word) -> List[Word]:
        """Remove and return members that disagree with their label at ``a_c * w0``."""
        probe = self.outcome(a_c, self.initial)
        broken = []
        for r in list(self.labels):
            expected = self.outcome(r, probe)
            keep = []
            for m in self.classes[r]:
                if m != r and self.outcome(m, probe) != expected:
                    broken.append(m)
                    del self.lookup[m]
                else:
                    keep.append(m)
            self.classes[r] = keep
        return broken

    def _place_split_member(self, m: Word) -> None:
        found = self.search_for_equivalents(m)
        if found:
            self._record(m, found[0])
        elif not self.admit_empty and self._undefined_on_probes(m):
            self._hold(m)
        else:
            self._new_class(m)

    def _release_held(self, probe: Optional[int]) -> None:
        if probe is None:
            return
        still = []
        for m in self.held:
            if self.outcome(m, probe) is not None:
                self._held_set.discard(m)
                self.pending.append(m)
                self.queued.add(m)
            else:
                still.append(m)
        self.held = still

    def run(self) -> None:
        """Explore until no candidates remain."""
        minimum = [(a,) for a in range(len(self.world.actions))]
        for a in minimum:
            self.classes[a] = [a]
            self.lookup[a] = a
            self.add_element(a)
        identity = (self.world.identity_index,)
        self.classes[identity].append(())
        self.lookup[()] = identity

        for r in list(self.labels):
            if r not in self.labels:
                continue
            full = self._label_profile(r)
            for other in self.search_for_equivalents(r):
                # Leaving out r's own row and column can hide the only state
                # that tells two single actions apart, so a merge also needs
                # the full row and column to agree.
                if other == r or self._label_profile(other) != full:
                    continue
                for m in self.classes.pop(other):
                    self._record(m, r)
                self._remove_label(other)

        self.search_for_new_candidates()
        while self.pending:
            a_c = self.pending.popleft()
            self.queued.discard(a_c)
            found = self.search_for_equivalents(a_c)
            if found:
                self._record(a_c, found[0])
            elif not self.admit_empty and self._undefined_on_probes(a_c):
                self._hold(a_c)
            else:
                # a_c is tabulated before split members are placed, so a
                # member that now matches a_c (or another split member) joins
                # that class instead of duplicating it.
                self._new_class(a_c)
                for m in self.search_for_broken_equivalence_classes(a_c):
                    self._place_split_member(m)
                self._release_held(self.outcome(a_c, self.initial))
            self.search_for_new_candidates()

    def finish(self) -> Algebra:
        """Canonically relabel the converged classes and build both tables."""
        world = self.world
        reachable = tuple(sorted(reachable_from(world, self.initial)))
        key_of = {r: restrict(self.transform(r), reachable) for r in self.labels}
        if len(set(key_of.values())) != len(self.labels):
            raise AssertionError("two labels share a transform after convergence")
        canonical = canonical_words(world, reachable, set(key_of.values()))
        by_key = {}
        for r in self.labels:
            by_key.setdefault(key_of[r], r)
        labels = tuple(sorted(canonical.values(), key=shortlex_key))
        rename = {by_key[k]: w for k, w in canonical.items()}

        classes: Dict[Word, List[Word]] = {}
        lookup: Dict[Word, Word] = {}
        for r in self.labels:
            rep = rename[r]
            members = set(self.classes[r]) | {rep}
            ordered = [rep] + sorted(members - {rep}, key=shortlex_key)
            classes[rep] = ordered
            for m in ordered:
                lookup[m] = rep
        classes = {rep: classes[rep] for rep in labels}

        transforms = tuple(transform_of(world, w) for w in labels)
        state_rows = []
        for r in transforms:
            start = r[self.initial]
            state_rows.append(tuple(None if start is None else c[start] for c in transforms))
        state_table = StateCayleyTable(labels, tuple(state_rows), self.initial)
        class_set = EquivalenceClassSet(classes, lookup)
        action_table = generate_action_cayley_table(state_table, class_set, world, self.initial)
        return Algebra(world, self.initial, reachable, state_table, action_table, class_set, transforms)


def canonical_words(world: World, reachable: Sequence[int], keys: set) -> Dict[tuple, Word]:
    """Map each restricted transform in ``keys`` to its shortlex-least non-empty word.

    Breadth-first by length. Dropping the leftmost symbol of a least word
    leaves a least word, so each level only extends the previous level's
    winners.
    """
    found: Dict[tuple, Word] = {}
    full: Dict[Word, PartialTransform] = {}
    level: List[Word] = []
    for a in range(len(world.actions)):
        t = world.dynamics[a]
        k = restrict(t, reachable)
        if k in keys and k not in found:
            found[k] = (a,)
            full[(a,)] = t
            level.append((a,))
    while level and len(found) < len(keys):
        nxt = []
        for a in range(len(world.actions)):
            for u in level:
                t = compose_transforms(world.dynamics[a], full[u])
                k = restrict(t, reachable)
                if k in keys and k not in found:
                    w = (a,) + u
                    found[k] = w
                    full[w] = t
                    nxt.append(w)
        level = nxt
    if len(found) != len(keys):
        raise AssertionError("some classes have no word built from smaller classes")
    return found


def generate_state_cayley_table(
    world: World,
    initial: Optional[StateRef] = None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> Tuple[StateCayleyTable, EquivalenceClassSet]:
    algebra = build_algebra(world, initial, max_elements)
    return algebra.state_table, algebra.classes


def generate_action_cayley_table(
    state_table: StateCayleyTable,
    classes: EquivalenceClassSet,
    world: World,
    initial: Optional[StateRef] = None,
) -> ActionCayleyTable:
    """Fill ``entries[r][c]`` with the class of ``c ∘ r``.

    A composite that lies in no class must be undefined on every reachable
    state; the entry is then None.
    """
    start = state_table.initial if initial is None else world.state_index(initial)
    reachable = tuple(sorted(reachable_from(world, start)))
    transforms = [transform_of(world, w) for w in state_table.labels]
    index = {restrict(t, reachable): i for i, t in enumerate(transforms)}
    rows = []
    for r, rt in enumerate(transforms):
        row = []
        for c, ct in enumerate(transforms):
            key = restrict(compose_transforms(ct, rt), reachable)
            k = index.get(key)
            if k is None and not is_empty(key):
                raise AssertionError(
                    f"composite {format_word(world, state_table.labels[c] + state_table.labels[r])} is in no class"
                )
            row.append(k)
        rows.append(tuple(row))
    return ActionCayleyTable(state_table.labels, tuple(rows))


def build_algebra(
    world: World,
    initial: Optional[StateRef] = None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    admit_empty: bool = False,
) -> Algebra:
    exploration = CayleyExploration(world, initial, max_elements, admit_empty)
    exploration.run()
    return exploration.finish()


def rebase(algebra: Algebra, action: Union[str, Sequence]) -> Algebra:
    """Re-read a finished algebra from ``action * w0`` without exploring again.

    Only the old tables are used: the new probe states are the old
    ``d``-row outcomes, classes that now agree everywhere merge, and classes
    that became nowhere-defined drop out unless a single action lands there
    (a fresh exploration always keeps single actions as classes).
    """
    from .world import as_word

    world = algebra.world
    d = algebra.index_of(as_word(world, action))
    new_initial = algebra.transforms[d][algebra.initial]
    if new_initial is None:
        raise ValueError(f"{format_word(world, as_word(world, action))} is undefined at the initial state")

    S, A = algebra.state_table.entries, algebra.action_table.entries
    size = algebra.size
    # q ranges over old classes of words r∘d; S[q][c] = c * (r * (d * w0)).
    probes: Dict[int, int] = {}
    for r in range(size):
        q = A[d][r]
        if q is not None and algebra.transforms[q][algebra.initial] is not None:
            probes.setdefault(algebra.transforms[q][algebra.initial], q)
    probe_classes = [probes[s] for s in sorted(probes)]
    new_key = [tuple(S[q][c] for q in probe_classes) for c in range(size)]

    groups: Dict[tuple, List[int]] = {}
    for c in range(size):
        groups.setdefault(new_key[c], []).append(c)
    kept = {}
    for key, members in groups.items():
        if is_empty(key) and not any(len(algebra.labels[c]) == 1 for c in members):
            continue
        rep = min((algebra.labels[c] for c in members), key=shortlex_key)
        kept[key] = (rep, members)
    labels = tuple(sorted((rep for rep, _ in kept.values()), key=shortlex_key))
    position = {rep: i for i, rep in enumerate(labels)}
    group_of = {}
    for rep, members in kept.values():
        for c in members:
            group_of[c] = position[rep]
    empty_key = tuple(None for _ in probe_classes)
    empty_group = position[kept[empty_key][0]] if empty_key in kept else None
    first = {}
    for c in range(size):
        if c in group_of:
            first.setdefault(group_of[c], c)

    rows_a, rows_s = [], []
    for g in range(len(labels)):
        r = first[g]
        q = A[d][r]
        row_a, row_s = [], []
        for h in range(len(labels)):
            c = first[h]
            k = A[r][c]
            row_a.append(empty_group if k is None else group_of.get(k))
            row_s.append(None if q is None else S[q][c])
        rows_a.append(tuple(row_a))
        rows_s.append(tuple(row_s))

    classes: Dict[Word, List[Word]] = {rep: [] for rep in labels}
    lookup: Dict[Word, Word] = {}
    for rep, members in kept.values():
        words = set()
        for c in members:
            words.update(algebra.classes.classes[algebra.labels[c]])
        ordered = [rep] + sorted(words - {rep}, key=shortlex_key)
        classes[rep] = ordered
        for w in ordered:
            lookup[w] = rep

    new_world = world.with_initial(new_initial)
    reachable = tuple(sorted(reachable_from(world, new_initial)))
    transforms = tuple(algebra.transforms[first[g]] for g in range(len(labels)))
    return Algebra(
        new_world,
        new_initial,
        reachable,
        StateCayleyTable(labels, tuple(rows_s), new_initial),
        ActionCayleyTable(labels, tuple(rows_a)),
        EquivalenceClassSet(classes, lookup),
        transforms,
    )
