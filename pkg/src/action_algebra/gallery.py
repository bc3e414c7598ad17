"""Canned example worlds, their parametric builders, and world file I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Tuple, Union

from .world import IDENTITY_SYMBOL, Treatment, World, WorldError

GRID_MOVES = {"U": (-1, 0), "D": (1, 0), "L": (0, -1), "R": (0, 1)}


def _labels(count: int) -> Tuple[str, ...]:
    return tuple(f"w{i}" for i in range(count))


def build_cyclical_grid(
    rows: int,
    cols: int,
    blocked: Iterable[Tuple[str, str]] = (),
    treatment: Union[str, Treatment] = Treatment.IDENTITY,
    name: Optional[str] = None,
) -> World:
    """Toroidal grid. Cell (r, c) is state ``w{r*cols + c}``; U/D change the row, L/R the column.

    ``blocked`` pairs are removed from the raw dynamics, so the treatment
    decides whether they become self-loops or undefined.
    """
    if rows < 1 or cols < 1:
        raise WorldError("grid dimensions must be at least 1x1")
    states = _labels(rows * cols)
    blocked = set(blocked)
    for state, action in blocked:
        if state not in states or action not in GRID_MOVES:
            raise WorldError(f"blocked pair ({state}, {action}) references an unknown cell or move")
    transitions = []
    for r in range(rows):
        for c in range(cols):
            src = states[r * cols + c]
            for symbol, (dr, dc) in GRID_MOVES.items():
                if (src, symbol) in blocked:
                    continue
                dst = states[((r + dr) % rows) * cols + (c + dc) % cols]
                transitions.append((src, symbol, dst))
    return World(
        name or f"cyclical-grid-{rows}x{cols}",
        states,
        (IDENTITY_SYMBOL, *GRID_MOVES),
        transitions,
        Treatment.parse(treatment),
        states[0],
    )


def block_world_states(n: int) -> Tuple[Tuple[int, int], ...]:
    """(agent, block) positions in state order: block-major, agent ascending."""
    return tuple((agent, block) for block in range(n) for agent in range(n) if agent != block)


def build_cyclical_1d_block(n: int, name: Optional[str] = None) -> World:
    """A ring of ``n`` cells holding the agent and one movable block.

    Moving into the block pushes it one cell further along the ring.
    """
    if n < 3:
        raise WorldError("the block world needs at least 3 cells")
    positions = block_world_states(n)
    index = {pos: i for i, pos in enumerate(positions)}
    states = _labels(len(positions))
    transitions = []
    for i, (agent, block) in enumerate(positions):
        for symbol, step in (("L", -1), ("R", 1)):
            new_agent, new_block = (agent + step) % n, block
            if new_agent == block:
                new_block = (block + step) % n
            transitions.append((states[i], symbol, states[index[(new_agent, new_block)]]))
    return World(name or f"cyclical-1d-block-{n}", states, (IDENTITY_SYMBOL, "L", "R"), transitions, Treatment.IDENTITY, states[0])


def build_cyclical_1d_consumable(
    n: int,
    consumable_pos: int = 1,
    treatment: Union[str, Treatment] = Treatment.IDENTITY,
    name: Optional[str] = None,
) -> World:
    """A ring of ``n`` cells with one consumable at ``consumable_pos``.

    States ``w0..w{n-1}`` have the consumable present with the agent at
    cells 0..n-1; ``w{n}..w{2n-1}`` are the same positions after it is gone.
    C is only listed where the agent stands on the consumable.
    """
    if n < 2:
        raise WorldError("the consumable world needs at least 2 cells")
    if not 0 <= consumable_pos < n:
        raise WorldError(f"consumable position {consumable_pos} outside 0..{n - 1}")
    states = _labels(2 * n)
    transitions = []
    for plane in range(2):
        for p in range(n):
            src = states[plane * n + p]
            transitions.append((src, "L", states[plane * n + (p - 1) % n]))
            transitions.append((src, "R", states[plane * n + (p + 1) % n]))
            if plane == 0 and p == consumable_pos:
                transitions.append((src, "C", states[n + p]))
    return World(
        name or f"cyclical-1d-consumable-{n}",
        states,
        (IDENTITY_SYMBOL, "L", "R", "C"),
        transitions,
        Treatment.parse(treatment),
        states[0],
    )


WALL = (("w0", "R"), ("w1", "L"))


@dataclass(frozen=True)
class GalleryEntry:
    key: str
    description: str
    build: Callable[[], World]
    expected_elements: int


GALLERY: Dict[str, GalleryEntry] = {
    entry.key: entry
    for entry in (
        GalleryEntry(
            "cyclical-2x2",
            "2x2 torus, no obstacles",
            lambda: build_cyclical_grid(2, 2, name="cyclical-2x2"),
            4,
        ),
        GalleryEntry(
            "wall-identity",
            "2x2 torus with a wall between w0 and w1, blocked moves act as 1",
            lambda: build_cyclical_grid(2, 2, WALL, Treatment.IDENTITY, name="wall-identity"),
            26,
        ),
        GalleryEntry(
            "block-1d4",
            "4-cell ring with a movable block",
            lambda: build_cyclical_1d_block(4, name="block-1d4"),
            17,
        ),
        GalleryEntry(
            "consumable-identity",
            "4-cell ring with a consumable at w1, C elsewhere acts as 1",
            lambda: build_cyclical_1d_consumable(4, 1, Treatment.IDENTITY, name="consumable-identity"),
            64,
        ),
        GalleryEntry(
            "wall-masked",
            "2x2 torus with a wall between w0 and w1, blocked moves undefined",
            lambda: build_cyclical_grid(2, 2, WALL, Treatment.MASKED, name="wall-masked"),
            59,
        ),
        GalleryEntry(
            "consumable-masked",
            "4-cell ring with a consumable at w1, C elsewhere undefined",
            lambda: build_cyclical_1d_consumable(4, 1, Treatment.MASKED, name="consumable-masked"),
            20,
        ),
    )
}


def gallery_world(key: str) -> World:
    try:
        return GALLERY[key].build()
    except KeyError:
        raise WorldError(f"unknown gallery world {key!r}; known: {', '.join(GALLERY)}") from None


_WORLD_FIELDS = ("name", "states", "actions", "transitions", "treatment", "initial")
_TRANSITION_FIELDS = ("from", "action", "to")


def world_to_dict(world: World) -> dict:
    return {
        "name": world.name,
        "states": list(world.states),
        "actions": list(world.actions),
        "transitions": [{"from": s, "action": a, "to": t} for s, a, t in world.transitions],
        "treatment": world.treatment.value,
        "initial": world.initial,
    }


def world_from_dict(data: object) -> World:
    if not isinstance(data, dict):
        raise WorldError("world file: top level must be an object")
    unknown = sorted(set(data) - set(_WORLD_FIELDS))
    if unknown:
        raise WorldError(f"world file: unknown field(s) {', '.join(unknown)}")
    missing = [f for f in _WORLD_FIELDS if f not in data]
    if missing:
        raise WorldError(f"world file: missing field(s) {', '.join(missing)}")
    for key in ("name", "treatment", "initial"):
        if not isinstance(data[key], str):
            raise WorldError(f"world file: field '{key}' must be a string")
    for key in ("states", "actions"):
        if not isinstance(data[key], list) or not all(isinstance(x, str) for x in data[key]):
            raise WorldError(f"world file: field '{key}' must be a list of strings")
    if not isinstance(data["transitions"], list):
        raise WorldError("world file: field 'transitions' must be a list")
    triples = []
    for i, item in enumerate(data["transitions"]):
        where = f"transitions[{i}]"
        if not isinstance(item, dict):
            raise WorldError(f"world file: {where} must be an object")
        extra = sorted(set(item) - set(_TRANSITION_FIELDS))
        if extra:
            raise WorldError(f"world file: {where} has unknown field(s) {', '.join(extra)}")
        for key in _TRANSITION_FIELDS:
            if not isinstance(item.get(key), str):
                raise WorldError(f"world file: {where}.{key} must be a string")
        triples.append((item["from"], item["action"], item["to"]))
    try:
        return World(data["name"], data["states"], data["actions"], triples, data["treatment"], data["initial"])
    except WorldError as exc:
        raise WorldError(f"world file: {exc}") from None


def dumps_world(world: World) -> str:
    return json.dumps(world_to_dict(world), indent=2, ensure_ascii=False) + "\n"


def loads_world(text: str) -> World:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorldError(f"world file: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return world_from_dict(data)


def save_world(world: World, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_world(world), encoding="utf-8")


def load_world(path: Union[str, Path]) -> World:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise WorldError(f"cannot read world file {path}: {exc.strerror}") from None
    return loads_world(text)


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(world: World) -> str:
    """Graphviz digraph with one edge per defined (state, action) pair."""
    lines = [f"digraph {_dot_id(world.name)} {{"]
    for label in world.states:
        shape = "doublecircle" if label == world.initial else "circle"
        lines.append(f"  {_dot_id(label)} [shape={shape}];")
    for s, src in enumerate(world.states):
        for a, symbol in enumerate(world.actions):
            t = world.dynamics[a][s]
            if t is not None:
                lines.append(f"  {_dot_id(src)} -> {_dot_id(world.states[t])} [label={_dot_id(symbol)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
