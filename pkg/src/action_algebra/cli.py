"""Command-line front end.

Exit status: 0 on success or match, 1 when a verification or property check
fails (or the element cap is hit), 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import render
from .analysis import analyze, check_wc1, check_wc2, check_wc3_homogeneity
from .engine import DEFAULT_MAX_ELEMENTS, Algebra, CapExceeded, build_algebra
from .equivariance import (
    StateMap,
    StructureError,
    check_disentangled,
    check_disentangled_equivariance,
    check_equivariance,
    check_equivariance_by_object,
    load_decomposition,
    load_map,
    load_structure,
    structure_from_algebra,
    structure_to_dict,
)
from .gallery import GALLERY, export_dot, gallery_world, load_world
from .oracle import compare_partitions, corrupt_classes, generate_closure
from .world import World, WorldError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(args: argparse.Namespace) -> World:
    if args.world and args.file:
        raise InputError("give either --world or --file, not both")
    if args.world:
        world = gallery_world(args.world)
    elif args.file:
        world = load_world(args.file)
    else:
        raise InputError("a world is required: --world KEY or --file PATH")
    if args.treatment:
        world = world.with_treatment(args.treatment)
    if args.initial:
        world = world.with_initial(args.initial)
    return world


def _algebra(args: argparse.Namespace) -> Algebra:
    return build_algebra(_load(args), max_elements=args.max_elements)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _grid_text(fmt: str, grid) -> str:
    return render.to_csv(grid) if fmt == "csv" else render.to_markdown(grid)


def _check_format(args: argparse.Namespace, allowed: Sequence[str]) -> str:
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise InputError(f"format {fmt!r} is not available for {args.command}; choose from {', '.join(allowed)}")
    return fmt


def cmd_list(args: argparse.Namespace) -> int:
    rows = [["key", "elements", "description"]]
    rows += [[e.key, str(e.expected_elements), e.description] for e in GALLERY.values()]
    _emit(args, render.to_markdown(rows))
    return EXIT_OK


def cmd_show(args: argparse.Namespace) -> int:
    fmt = _check_format(args, ("md", "csv", "structured", "dot"))
    world = _load(args)
    if fmt == "dot":
        text = export_dot(world)
    elif fmt == "structured":
        from .gallery import dumps_world

        text = dumps_world(world)
    else:
        text = _grid_text(fmt, render.transition_grid(world))
    _emit(args, text)
    return EXIT_OK


def cmd_dot(args: argparse.Namespace) -> int:
    _emit(args, export_dot(_load(args)))
    return EXIT_OK


def cmd_cayley(args: argparse.Namespace) -> int:
    fmt = _check_format(args, ("md", "csv", "structured"))
    algebra = _algebra(args)
    if fmt == "structured":
        _emit(args, render.dumps_json(render.algebra_to_dict(algebra)))
        return EXIT_OK
    parts = {
        "state_table": render.state_table_grid(algebra),
        "action_table": render.action_table_grid(algebra),
        "classes": render.classes_grid(algebra),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, grid in parts.items():
            (out / f"{name}.{fmt}").write_text(_grid_text(fmt, grid), encoding="utf-8")
        return EXIT_OK
    start = algebra.world.states[algebra.initial]
    titles = {
        "state_table": f"state Cayley table from {start}",
        "action_table": "action Cayley table",
        "classes": "equivalence classes",
    }
    chunks = []
    for name, grid in parts.items():
        head = f"## {titles[name]}\n\n" if fmt == "md" else f"# {titles[name]}\n"
        chunks.append(head + _grid_text(fmt, grid))
    sys.stdout.write("\n".join(chunks))
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    fmt = _check_format(args, ("md", "csv", "structured"))
    algebra = _algebra(args)
    report = analyze(algebra.action_table, algebra.label_names)
    if fmt == "structured":
        data = render.report_to_dict(report)
        data["elements"] = algebra.size
        _emit(args, render.dumps_json(data))
        return EXIT_OK
    text = (
        f"elements: {algebra.size}\nclassification: {report.classification.value}\n\n"
        + _grid_text(fmt, render.report_grid(report))
        + "\n"
        + _grid_text(fmt, render.orders_grid(report))
    )
    _emit(args, text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    world = _load(args)
    algebra = build_algebra(world, max_elements=args.max_elements)
    closure = generate_closure(world, unrestricted=args.unrestricted_oracle, max_elements=args.max_elements)
    if args.inject_fault:
        algebra = corrupt_classes(algebra)
    report = compare_partitions(algebra, closure)
    text = report.render() + f"empty composites among closure pairs: {closure.empty_pairs}\n"
    _emit(args, text)
    return EXIT_OK if report.match else EXIT_FAIL


def cmd_conditions(args: argparse.Namespace) -> int:
    world = _load(args)
    algebra = build_algebra(world, max_elements=args.max_elements)
    results = [
        ("WC1 unrestricted actions", check_wc1(world)),
        ("WC2 inverse actions", check_wc2(algebra.action_table, algebra.label_names)),
        ("WC3 action homogeneity", check_wc3_homogeneity(world)),
    ]
    _emit(args, "".join(render.condition_line(name, r) + "\n" for name, r in results))
    return EXIT_OK if all(r.holds for _, r in results) else EXIT_FAIL


def _source_structure(args: argparse.Namespace):
    if args.structure:
        if args.world or args.file:
            raise InputError("give either a world or --structure, not both")
        return load_structure(args.structure)
    return structure_from_algebra(_algebra(args))


def cmd_structure(args: argparse.Namespace) -> int:
    _emit(args, render.dumps_json(structure_to_dict(structure_from_algebra(_algebra(args)))))
    return EXIT_OK


def cmd_equivariance(args: argparse.Namespace) -> int:
    act_w = _source_structure(args)
    act_z = load_structure(args.z_structure) if args.z_structure else act_w
    eta = load_map(args.eta, act_w.carrier) if args.eta else StateMap.identity(act_w.carrier)
    lines: List[str] = []
    if args.by_object:
        ok = True
        for block, result in check_equivariance_by_object(act_w, act_z, eta, strict=args.strict):
            ok = ok and result.ok
            lines.append(f"{{{', '.join(block)}}}: {'PASS' if result.ok else 'FAIL'}" + (
                "" if result.ok else f" counterexample {result.counterexample}"
            ))
    else:
        result = check_equivariance(act_w, act_z, eta, strict=args.strict)
        ok = result.ok
        lines.append("PASS" if ok else f"FAIL counterexample {result.counterexample}: {result.detail}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_disentangle(args: argparse.Namespace) -> int:
    act_w = _source_structure(args)
    dec_w = load_decomposition(args.decomposition, act_w)
    result = check_disentangled(act_w, dec_w)
    lines = ["disentangled: " + ("PASS" if result.ok else f"FAIL counterexample {result.counterexample}: {result.detail}")]
    ok = result.ok
    if args.eta_components:
        if not (args.z_structure and args.z_decomposition):
            raise InputError("--eta-components needs --z-structure and --z-decomposition")
        import json

        try:
            components = json.loads(Path(args.eta_components).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {args.eta_components}: {exc}") from None
        if not isinstance(components, list) or not all(isinstance(c, dict) for c in components):
            raise InputError("component maps must be a list of objects")
        act_z = load_structure(args.z_structure)
        dec_z = load_decomposition(args.z_decomposition, act_z)
        eta = load_map(args.eta, act_w.carrier) if args.eta else None
        verdict, composite = check_disentangled_equivariance((act_w, dec_w), (act_z, dec_z), components, eta)
        ok = ok and verdict.ok
        lines.append(
            "componentwise equivariance: "
            + ("PASS" if verdict.ok else f"FAIL counterexample {verdict.counterexample}: {verdict.detail}")
        )
        if composite is not None:
            pairs = ", ".join(f"{x}->{composite.codomain[composite(i)]}" for i, x in enumerate(act_w.carrier))
            lines.append(f"assembled map: {pairs}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "list": cmd_list,
    "show": cmd_show,
    "dot": cmd_dot,
    "cayley": cmd_cayley,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "conditions": cmd_conditions,
    "structure": cmd_structure,
    "equivariance": cmd_equivariance,
    "disentangle": cmd_disentangle,
}

HELP = {
    "list": "list the built-in worlds",
    "show": "print a world's transition table",
    "dot": "print a world as a Graphviz digraph",
    "cayley": "print or write the state and action Cayley tables and the classes",
    "analyze": "property table, classification and element orders",
    "verify": "compare the engine against the brute-force closure",
    "conditions": "check the three world conditions",
    "structure": "dump the algebra acting on the reachable states as JSON",
    "equivariance": "check that a state map commutes with two actions",
    "disentangle": "check a product decomposition, optionally with a componentwise map",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="action-algebra", description="Algebra of an agent's actions in a finite world.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--out", help="write output here instead of stdout (a directory for cayley csv/md)")
        if name == "list":
            continue
        p.add_argument("--world", help=f"built-in world: {', '.join(GALLERY)}")
        p.add_argument("--file", help="world file (JSON)")
        p.add_argument("--initial", help="override the initial state")
        p.add_argument("--treatment", choices=("identity", "masked"), help="override the treatment of unlisted moves")
        p.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS, help="stop once this many classes exist")
        p.add_argument("--format", choices=("md", "csv", "structured", "dot"), help="output format")
        if name == "verify":
            p.add_argument("--unrestricted-oracle", action="store_true", help="compare transforms on all states")
            p.add_argument("--inject-fault", action="store_true", help="misfile one class member first (negative control)")
        if name in ("equivariance", "disentangle"):
            p.add_argument("--structure", help="action structure file, instead of a world")
            p.add_argument("--z-structure", help="second action structure file")
            p.add_argument("--eta", help="state map file")
            p.add_argument("--strict", action="store_true", help="also require undefinedness to be preserved")
        if name == "equivariance":
            p.add_argument("--by-object", action="store_true", help="report one verdict per block of points")
        if name == "disentangle":
            p.add_argument("--decomposition", required=True, help="decomposition file for the first structure")
            p.add_argument("--z-decomposition", help="decomposition file for the second structure")
            p.add_argument("--eta-components", help="JSON list of per-factor point maps")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, WorldError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
