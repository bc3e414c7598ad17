"""Finite worlds as deterministic, possibly partial, labeled transition systems.

States and actions are indexed densely in the order they are declared. Every
public function accepts either a label or an index for states and actions and
returns indices; ``None`` stands for an undefined outcome.

Words are tuples of action indices written leftmost-last-applied: the word
``(a2, a1)`` performs ``a1`` first and then ``a2``, so ``"RU"`` means "move up,
then move right".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

IDENTITY_SYMBOL = "1"

StateRef = Union[int, str]
ActionRef = Union[int, str]
Word = Tuple[int, ...]
# images[i] is the index reached from state i, or None when undefined there.
PartialTransform = Tuple[Optional[int], ...]


class WorldError(ValueError):
    """Raised for malformed worlds and references to unknown states or actions."""


class Treatment(Enum):
    """How (state, action) pairs missing from the raw transitions resolve."""

    IDENTITY = "identity"
    MASKED = "masked"

    @classmethod
    def parse(cls, value: Union[str, "Treatment"]) -> "Treatment":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise WorldError(f"unknown treatment {value!r}, expected 'identity' or 'masked'") from None


@dataclass(frozen=True)
class World:
    """A finite world with frozen dynamics.

    ``transitions`` keeps the raw (pre-treatment) triples as given, using
    labels, for provenance and serialization. ``dynamics[a][w]`` is the
    completed table after the treatment has been applied.
    """

    name: str
    states: Tuple[str, ...]
    actions: Tuple[str, ...]
    transitions: Tuple[Tuple[str, str, str], ...]
    treatment: Treatment
    initial: str
    dynamics: Tuple[PartialTransform, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        object.__setattr__(self, "treatment", Treatment.parse(self.treatment))
        if not self.states:
            raise WorldError("a world needs at least one state")
        _check_unique(self.states, "state")
        _check_unique(self.actions, "action")
        if IDENTITY_SYMBOL not in self.actions:
            raise WorldError(f"the alphabet must contain the identity symbol {IDENTITY_SYMBOL!r}")
        if self.initial not in self.states:
            raise WorldError(f"initial state {self.initial!r} is not a state of the world")

        n = len(self.states)
        raw: dict = {}
        for src, act, dst in self.transitions:
            s, a, t = self.state_index(src), self.action_index(act), self.state_index(dst)
            if (s, a) in raw:
                raise WorldError(f"determinism violation: two transitions for ({src}, {act})")
            if self.actions[a] == IDENTITY_SYMBOL and s != t:
                raise WorldError(f"the identity action must fix every state, got {src} -> {dst}")
            raw[(s, a)] = t

        table = []
        for a, symbol in enumerate(self.actions):
            images = []
            for s in range(n):
                if symbol == IDENTITY_SYMBOL:
                    images.append(s)
                elif (s, a) in raw:
                    images.append(raw[(s, a)])
                else:
                    images.append(s if self.treatment is Treatment.IDENTITY else None)
            table.append(tuple(images))
        object.__setattr__(self, "dynamics", tuple(table))

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def initial_index(self) -> int:
        return self.state_index(self.initial)

    @property
    def identity_index(self) -> int:
        return self.action_index(IDENTITY_SYMBOL)

    def state_index(self, ref: StateRef) -> int:
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < len(self.states):
                return ref
            raise WorldError(f"state index {ref} out of range")
        try:
            return self.states.index(ref)
        except ValueError:
            raise WorldError(f"unknown state {ref!r}") from None

    def action_index(self, ref: ActionRef) -> int:
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < len(self.actions):
                return ref
            raise WorldError(f"action index {ref} out of range")
        try:
            return self.actions.index(ref)
        except ValueError:
            raise WorldError(f"unknown action {ref!r}") from None

    def with_treatment(self, treatment: Union[str, Treatment]) -> "World":
        return World(self.name, self.states, self.actions, self.transitions, Treatment.parse(treatment), self.initial)

    def with_initial(self, initial: StateRef) -> "World":
        label = self.states[self.state_index(initial)]
        return World(self.name, self.states, self.actions, self.transitions, self.treatment, label)


def _check_unique(labels: Sequence[str], kind: str) -> None:
    seen = set()
    for label in labels:
        if not isinstance(label, str) or not label:
            raise WorldError(f"{kind} labels must be non-empty strings, got {label!r}")
        if label in seen:
            raise WorldError(f"duplicate {kind} label {label!r}")
        seen.add(label)


def apply_min(world: World, action: ActionRef, state: StateRef) -> Optional[int]:
    return world.dynamics[world.action_index(action)][world.state_index(state)]


def apply_word(world: World, word: Union[str, Iterable[ActionRef]], state: StateRef) -> Optional[int]:
    current: Optional[int] = world.state_index(state)
    for a in reversed(as_word(world, word)):
        if current is None:
            return None
        current = world.dynamics[a][current]
    return current


def identity_transform(size: int) -> PartialTransform:
    return tuple(range(size))


def is_empty(transform: Sequence[Optional[int]]) -> bool:
    return all(image is None for image in transform)


def compose_transforms(g: PartialTransform, f: PartialTransform) -> PartialTransform:
    """Return g after f."""
    if len(g) != len(f):
        raise WorldError(f"cannot compose transforms on {len(g)} and {len(f)} states")
    return tuple(None if x is None else g[x] for x in f)


def word_transform(world: World, word: Union[str, Iterable[ActionRef]]) -> PartialTransform:
    result = identity_transform(world.size)
    for a in reversed(as_word(world, word)):
        result = compose_transforms(world.dynamics[a], result)
    return result


def reachable_from(world: World, state: StateRef) -> frozenset:
    start = world.state_index(state)
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for images in world.dynamics:
            t = images[s]
            if t is not None and t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


def as_word(world: World, word: Union[str, Iterable[ActionRef]]) -> Word:
    if isinstance(word, str):
        return parse_word(world, word)
    return tuple(world.action_index(a) for a in word)


def parse_word(world: World, text: str) -> Word:
    """Tokenize ``text`` into a word.

    Whitespace-separated tokens are looked up directly. Otherwise the text is
    split greedily by longest matching symbol. Parentheses only group and are
    dropped, since composition is associative. ``""`` and ``"ε"`` are the empty word.
    """
    text = text.replace("(", "").replace(")", "").strip()
    if text in ("", EMPTY_WORD_TEXT):
        return ()
    if any(ch.isspace() for ch in text):
        return tuple(world.action_index(tok) for tok in text.split())
    symbols = sorted(world.actions, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        for sym in symbols:
            if text.startswith(sym, i):
                out.append(world.action_index(sym))
                i += len(sym)
                break
        else:
            raise WorldError(f"cannot parse {text!r} at position {i}: no matching action")
    return tuple(out)


EMPTY_WORD_TEXT = "ε"


def format_word(world: World, word: Sequence[int]) -> str:
    if not word:
        return EMPTY_WORD_TEXT
    symbols = [world.actions[a] for a in word]
    sep = "" if all(len(s) == 1 for s in world.actions) else " "
    return sep.join(symbols)


def shortlex_key(word: Sequence[int]) -> tuple:
    """Sort key: shorter words first, then lexicographic by alphabet position."""
    return (len(word), tuple(word))
