"""Text renderings of worlds, tables and reports: CSV, Markdown and JSON."""

from __future__ import annotations

import csv
import io
import json
from typing import List, Optional, Sequence

from .analysis import AlgebraReport, ConditionResult
from .engine import Algebra
from .world import World, format_word

UNDEFINED_MARK = "⊥"
# CSV leaves undefined cells empty; the corner cell says so.
CSV_CORNER = "row then column (empty = undefined)"
MD_CORNER = "row then column"

Grid = List[List[Optional[str]]]


def transition_grid(world: World) -> Grid:
    header: List[Optional[str]] = ["state", *world.actions]
    rows = [header]
    for s, label in enumerate(world.states):
        rows.append([label] + [None if t[s] is None else world.states[t[s]] for t in world.dynamics])
    return rows


def state_table_grid(algebra: Algebra) -> Grid:
    names = algebra.label_names
    states = algebra.world.states
    rows: Grid = [[None, *names]]
    for name, row in zip(names, algebra.state_table.entries):
        rows.append([name] + [None if s is None else states[s] for s in row])
    return rows


def action_table_grid(algebra: Algebra) -> Grid:
    names = algebra.label_names
    rows: Grid = [[None, *names]]
    for name, row in zip(names, algebra.action_table.entries):
        rows.append([name] + [None if k is None else names[k] for k in row])
    return rows


def classes_grid(algebra: Algebra, sample: int = 6) -> Grid:
    rows: Grid = [["class", "members", "sample"]]
    for rep in algebra.labels:
        members = algebra.classes.members(rep)
        shown = ", ".join(format_word(algebra.world, w) for w in members[:sample])
        if len(members) > sample:
            shown += ", ..."
        rows.append([format_word(algebra.world, rep), str(len(members)), shown])
    return rows


def to_csv(grid: Grid, corner: str = CSV_CORNER) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for i, row in enumerate(grid):
        cells = ["" if v is None else v for v in row]
        if i == 0 and row[0] is None:
            cells[0] = corner
        writer.writerow(cells)
    return out.getvalue()


def to_markdown(grid: Grid, corner: str = MD_CORNER) -> str:
    cells = [[UNDEFINED_MARK if v is None else v for v in row] for row in grid]
    if grid and grid[0] and grid[0][0] is None:
        cells[0][0] = corner
    widths = [max(len(row[j]) for row in cells) for j in range(len(cells[0]))]

    def line(row: Sequence[str]) -> str:
        return "| " + " | ".join(v.ljust(w) for v, w in zip(row, widths)) + " |"

    lines = [line(cells[0]), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    lines.extend(line(row) for row in cells[1:])
    return "\n".join(lines) + "\n"


def algebra_to_dict(algebra: Algebra) -> dict:
    world = algebra.world
    names = algebra.label_names
    return {
        "world": world.name,
        "treatment": world.treatment.value,
        "initial": world.states[algebra.initial],
        "reachable": [world.states[s] for s in algebra.reachable],
        "labels": list(names),
        "state_table": [[None if s is None else world.states[s] for s in row] for row in algebra.state_table.entries],
        "action_table": [[None if k is None else names[k] for k in row] for row in algebra.action_table.entries],
        "classes": {
            format_word(world, rep): [format_word(world, w) for w in algebra.classes.members(rep)]
            for rep in algebra.labels
        },
    }


def dumps_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def yes_no(flag: bool) -> str:
    return "Y" if flag else "N"


def report_grid(report: AlgebraReport) -> Grid:
    return [["property", "value"]] + [[name, yes_no(flag)] for name, flag in report.property_rows()]


def orders_grid(report: AlgebraReport) -> Grid:
    return [["element", "order"]] + [[report.labels[i], str(order)] for i, order in sorted(report.orders.items())]


def report_to_dict(report: AlgebraReport) -> dict:
    names = report.labels

    def label_set(indices) -> List[str]:
        return [names[i] for i in sorted(indices)]

    data = {
        "properties": {name: flag for name, flag in report.property_rows()},
        "classification": report.classification.value,
        "identity": {
            "two_sided": None if report.identity.two_sided is None else names[report.identity.two_sided],
            "left": label_set(report.identity.left),
            "right": label_set(report.identity.right),
        },
        "inverses": {
            names[a]: {"left": label_set(info.left), "right": label_set(info.right), "two_sided": label_set(info.two_sided)}
            for a, info in sorted(report.inverses.items())
        },
        "orders": {names[a]: str(order) for a, order in sorted(report.orders.items())},
    }
    if report.commutativity_counterexample is not None:
        a, b = report.commutativity_counterexample
        data["commutativity_counterexample"] = [names[a], names[b]]
    if report.associativity_counterexample is not None:
        data["associativity_counterexample"] = [names[i] for i in report.associativity_counterexample]
    return data


def condition_line(name: str, result: ConditionResult) -> str:
    verdict = "INCONCLUSIVE" if result.inconclusive else ("PASS" if result.holds else "FAIL")
    return f"{name}: {verdict} ({result.detail})"
