"""Equivariance and disentangling checks on finite action structures.

A structure is an algebra given by its composition table together with an
action of that algebra on a finite carrier. Both may be partial. All checks
are exhaustive and report the first violation in element-then-point order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .engine import Algebra


class StructureError(ValueError):
    """Malformed or mismatched structures, maps or decompositions."""


@dataclass(frozen=True)
class FiniteActionStructure:
    """``compose[i][j]`` is ``elements[i] ∘ elements[j]``; ``act[a][x]`` is ``a`` applied to ``carrier[x]``.

    ``resolve`` optionally names further elements, for instance any word of a
    class rather than only its label; it returns an index or raises.
    """

    elements: Tuple[str, ...]
    compose: Tuple[Tuple[Optional[int], ...], ...]
    identity: int
    carrier: Tuple[str, ...]
    act: Tuple[Tuple[Optional[int], ...], ...]
    resolve: Optional[Callable[[str], int]] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        problems = structure_problems(self)
        if problems:
            raise StructureError(problems[0])

    def element_index(self, name: str) -> int:
        if name in self.elements:
            return self.elements.index(name)
        if self.resolve is not None:
            try:
                return self.resolve(name)
            except (KeyError, ValueError):
                pass
        raise StructureError(f"unknown element {name!r}")

    def point_index(self, name: str) -> int:
        try:
            return self.carrier.index(name)
        except ValueError:
            raise StructureError(f"unknown carrier point {name!r}") from None


def structure_problems(s: FiniteActionStructure) -> List[str]:
    n, m = len(s.elements), len(s.carrier)
    if len(set(s.elements)) != n or len(set(s.carrier)) != m:
        return ["element and carrier labels must be unique"]
    if len(s.compose) != n or any(len(row) != n for row in s.compose):
        return [f"composition table must be {n}x{n}"]
    if len(s.act) != n or any(len(row) != m for row in s.act):
        return [f"action table must be {n}x{m}"]
    if not 0 <= s.identity < n:
        return ["identity is not an element"]
    for row in s.compose:
        if any(v is not None and not 0 <= v < n for v in row):
            return ["composition table refers to an unknown element"]
    for row in s.act:
        if any(v is not None and not 0 <= v < m for v in row):
            return ["action table refers to an unknown carrier point"]
    problems = []
    for x in range(m):
        if s.act[s.identity][x] != x:
            problems.append(f"identity {s.elements[s.identity]} moves {s.carrier[x]}")
    for a in range(n):
        for b in range(n):
            ba = s.compose[b][a]
            for x in range(m):
                y = s.act[a][x]
                if y is None or ba is None:
                    continue
                z = s.act[b][y]
                if z is not None and s.act[ba][x] is not None and z != s.act[ba][x]:
                    problems.append(
                        f"acting by {s.elements[a]} then {s.elements[b]} on {s.carrier[x]} disagrees with their composite"
                    )
    for a in range(n):
        for b in range(n):
            for c in range(n):
                ba, cb = s.compose[b][a], s.compose[c][b]
                lhs = None if ba is None else s.compose[c][ba]
                rhs = None if cb is None else s.compose[cb][a]
                if lhs is not None and rhs is not None and lhs != rhs:
                    problems.append(f"composition is not associative at ({s.elements[c]}, {s.elements[b]}, {s.elements[a]})")
    return problems


def structure_from_algebra(algebra: Algebra) -> FiniteActionStructure:
    """The algebra acting on the states reachable from its initial state."""
    world = algebra.world
    n = algebra.size
    entries = algebra.action_table.entries
    compose = tuple(tuple(entries[j][i] for j in range(n)) for i in range(n))
    points = algebra.reachable
    position = {s: i for i, s in enumerate(points)}
    act = tuple(
        tuple(None if t[s] is None else position[t[s]] for s in points) for t in algebra.transforms
    )
    return FiniteActionStructure(
        algebra.label_names,
        compose,
        algebra.index_of(()),
        tuple(world.states[s] for s in points),
        act,
        algebra.index_of,
    )


@dataclass(frozen=True)
class StateMap:
    """A total map from one carrier to another, by index."""

    mapping: Tuple[int, ...]
    codomain: Tuple[str, ...]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @classmethod
    def from_labels(cls, domain: Sequence[str], pairs: Mapping[str, str], codomain: Optional[Sequence[str]] = None) -> "StateMap":
        missing = [x for x in domain if x not in pairs]
        if missing:
            raise StructureError(f"map is not total: no image for {', '.join(missing)}")
        extra = sorted(set(pairs) - set(domain))
        if extra:
            raise StructureError(f"map has images for unknown points {', '.join(extra)}")
        if codomain is None:
            codomain = list(dict.fromkeys(pairs[x] for x in domain))
        codomain = tuple(codomain)
        outside = [pairs[x] for x in domain if pairs[x] not in codomain]
        if outside:
            raise StructureError(f"image {outside[0]!r} is not in the codomain")
        return cls(tuple(codomain.index(pairs[x]) for x in domain), codomain)

    @classmethod
    def identity(cls, carrier: Sequence[str]) -> "StateMap":
        return cls(tuple(range(len(carrier))), tuple(carrier))

    def then(self, other: "StateMap") -> "StateMap":
        """``other`` after ``self``."""
        return StateMap(tuple(other.mapping[y] for y in self.mapping), other.codomain)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    counterexample: Optional[tuple] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _same_algebra(w: FiniteActionStructure, z: FiniteActionStructure) -> None:
    if w.elements != z.elements or w.compose != z.compose:
        raise StructureError("the two structures do not share one algebra")


def _into(eta: StateMap, act_w: FiniteActionStructure, act_z: FiniteActionStructure) -> List[int]:
    """Carrier index in ``act_z`` of each point's image, matched by label."""
    if len(eta.mapping) != len(act_w.carrier):
        raise StructureError("map domain does not match the first carrier")
    return [act_z.point_index(eta.codomain[k]) for k in eta.mapping]


def check_equivariance(
    act_w: FiniteActionStructure,
    act_z: FiniteActionStructure,
    eta: StateMap,
    strict: bool = False,
) -> CheckResult:
    """``eta(a * w) == a * eta(w)`` wherever ``a * w`` is defined.

    With ``strict`` an undefined ``a * w`` also requires ``a * eta(w)`` to be undefined.
    """
    _same_algebra(act_w, act_z)
    into = _into(eta, act_w, act_z)
    for a, name in enumerate(act_w.elements):
        for x, point in enumerate(act_w.carrier):
            y = act_w.act[a][x]
            image = act_z.act[a][into[x]]
            if y is None:
                if strict and image is not None:
                    return CheckResult(False, (name, point), f"{name} is undefined at {point} but not at its image")
                continue
            if image is None:
                return CheckResult(False, (name, point), f"{name} is defined at {point} but not at its image")
            if image != into[y]:
                return CheckResult(
                    False,
                    (name, point),
                    f"{name} then map gives {act_z.carrier[into[y]]}, map then {name} gives {act_z.carrier[image]}",
                )
    return CheckResult(True, detail="equivariant")


def object_blocks(act: FiniteActionStructure) -> List[Tuple[int, ...]]:
    """Group carrier points by which elements are defined on them."""
    blocks: Dict[Tuple[bool, ...], List[int]] = {}
    for x in range(len(act.carrier)):
        pattern = tuple(act.act[a][x] is not None for a in range(len(act.elements)))
        blocks.setdefault(pattern, []).append(x)
    return [tuple(points) for points in blocks.values()]


def check_equivariance_by_object(
    act_w: FiniteActionStructure,
    act_z: FiniteActionStructure,
    eta: StateMap,
    strict: bool = False,
) -> List[Tuple[Tuple[str, ...], CheckResult]]:
    """One equivariance check per block of points sharing a definedness pattern."""
    _same_algebra(act_w, act_z)
    into = _into(eta, act_w, act_z)
    results = []
    for block in object_blocks(act_w):
        outcome = CheckResult(True, detail="equivariant")
        for a, name in enumerate(act_w.elements):
            for x in block:
                y = act_w.act[a][x]
                image = act_z.act[a][into[x]]
                bad = (y is None and strict and image is not None) or (
                    y is not None and (image is None or image != into[y])
                )
                if bad:
                    outcome = CheckResult(False, (name, act_w.carrier[x]), "violation inside this block")
                    break
            if not outcome.ok:
                break
        results.append((tuple(act_w.carrier[x] for x in block), outcome))
    return results


def quotient_action(act_w: FiniteActionStructure, eta: StateMap) -> Union[FiniteActionStructure, CheckResult]:
    """The action on eta's image that makes eta equivariant, if eta is a congruence.

    Otherwise a failed CheckResult naming ``(a, w, w')`` with ``eta(w) == eta(w')``
    but different images of ``a * w`` and ``a * w'`` (undefined counts as an image).
    """
    if len(eta.mapping) != len(act_w.carrier):
        raise StructureError("map domain does not match the carrier")
    image = sorted(set(eta.mapping))
    carrier = tuple(eta.codomain[z] for z in image)
    position = {z: i for i, z in enumerate(image)}
    rows = []
    for a, name in enumerate(act_w.elements):
        row: List[Optional[int]] = [None] * len(image)
        first: Dict[int, int] = {}
        for x in range(len(act_w.carrier)):
            z = eta(x)
            y = act_w.act[a][x]
            target = None if y is None else position[eta(y)]
            if z in first:
                if row[position[z]] != target:
                    return CheckResult(
                        False,
                        (name, act_w.carrier[first[z]], act_w.carrier[x]),
                        f"{act_w.carrier[first[z]]} and {act_w.carrier[x]} share an image but {name} separates them",
                    )
            else:
                first[z] = x
                row[position[z]] = target
        rows.append(tuple(row))
    return FiniteActionStructure(act_w.elements, act_w.compose, act_w.identity, carrier, tuple(rows), act_w.resolve)


@dataclass(frozen=True)
class Factor:
    """One factor of a direct product: its elements, composition and points."""

    elements: Tuple[str, ...]
    compose: Tuple[Tuple[Optional[int], ...], ...]
    identity: int
    points: Tuple[str, ...]


@dataclass(frozen=True)
class Decomposition:
    """Coordinates for carrier points (all of them) and algebra elements (any subset).

    ``carrier_coords[x]`` and ``element_coords[a]`` are tuples of indices into
    the factors' points and elements.
    """

    factors: Tuple[Factor, ...]
    carrier_coords: Tuple[Tuple[int, ...], ...]
    element_coords: Mapping[int, Tuple[int, ...]]

    @property
    def size(self) -> int:
        return len(self.factors)

    @classmethod
    def from_labels(
        cls,
        act: FiniteActionStructure,
        factors: Sequence[Factor],
        carrier_coords: Mapping[str, Sequence[str]],
        element_coords: Mapping[str, Sequence[str]],
    ) -> "Decomposition":
        factors = tuple(factors)
        n = len(factors)

        def coords(values: Sequence[str], attr: str, what: str) -> Tuple[int, ...]:
            if len(values) != n:
                raise StructureError(f"{what} needs {n} coordinates, got {len(values)}")
            out = []
            for j, v in enumerate(values):
                options = getattr(factors[j], attr)
                if v not in options:
                    raise StructureError(f"{what}: {v!r} is not in factor {j}")
                out.append(options.index(v))
            return tuple(out)

        missing = [x for x in act.carrier if x not in carrier_coords]
        if missing:
            raise StructureError(f"no coordinates for carrier point {missing[0]}")
        extra = sorted(set(carrier_coords) - set(act.carrier))
        if extra:
            raise StructureError(f"coordinates given for unknown point {extra[0]}")
        point_coords = tuple(coords(carrier_coords[x], "points", f"point {x}") for x in act.carrier)
        elem = {}
        for name, values in element_coords.items():
            a = act.element_index(name)
            c = coords(values, "elements", f"element {name}")
            if a in elem and elem[a] != c:
                raise StructureError(f"element {name} is given two different coordinate tuples")
            elem[a] = c
        return cls(factors, point_coords, elem)

    def validate(self, act: FiniteActionStructure) -> None:
        if len(self.carrier_coords) != len(act.carrier):
            raise StructureError("carrier coordinates do not cover the carrier")
        if len(set(self.carrier_coords)) != len(self.carrier_coords):
            raise StructureError("carrier coordinates are not injective")
        expected = 1
        for f in self.factors:
            expected *= len(f.points)
        if expected != len(act.carrier):
            raise StructureError("carrier coordinates are not onto the product of the factor point sets")


def _factor_action_tables(
    act: FiniteActionStructure, dec: Decomposition
) -> Tuple[Optional[CheckResult], List[Dict[Tuple[int, int], int]]]:
    """Read off each factor's action, or return the first componentwise violation."""
    tables: List[Dict[Tuple[int, int], int]] = [dict() for _ in dec.factors]
    for a in sorted(dec.element_coords):
        g = dec.element_coords[a]
        for x in range(len(act.carrier)):
            y = act.act[a][x]
            if y is None:
                continue
            xc, yc = dec.carrier_coords[x], dec.carrier_coords[y]
            for j, factor in enumerate(dec.factors):
                if g[j] == factor.identity and yc[j] != xc[j]:
                    return (
                        CheckResult(
                            False,
                            (j, act.elements[a], act.carrier[x]),
                            f"{act.elements[a]} is trivial in factor {j} yet moves coordinate {j} of {act.carrier[x]}",
                        ),
                        tables,
                    )
                seen = tables[j].setdefault((g[j], xc[j]), yc[j])
                if seen != yc[j]:
                    return (
                        CheckResult(
                            False,
                            (j, act.elements[a], act.carrier[x]),
                            f"coordinate {j} of {act.elements[a]} * {act.carrier[x]} depends on other coordinates",
                        ),
                        tables,
                    )
    return None, tables


def check_disentangled(act: FiniteActionStructure, dec: Decomposition) -> CheckResult:
    """The action is componentwise in the given coordinates and factors leave each other alone.

    Only elements with coordinates are checked. Their composites, when they
    also have coordinates, must compose factor by factor.
    """
    dec.validate(act)
    for a, ga in sorted(dec.element_coords.items()):
        for b, gb in sorted(dec.element_coords.items()):
            ba = act.compose[b][a]
            if ba is None or ba not in dec.element_coords:
                continue
            want = tuple(f.compose[gb[j]][ga[j]] for j, f in enumerate(dec.factors))
            if dec.element_coords[ba] != want:
                return CheckResult(
                    False,
                    ("compose", act.elements[b], act.elements[a]),
                    f"coordinates of {act.elements[b]}∘{act.elements[a]} are not the componentwise composite",
                )
    bad, _ = _factor_action_tables(act, dec)
    return bad if bad is not None else CheckResult(True, detail="disentangled")


def check_disentangled_equivariance(
    rho: Tuple[FiniteActionStructure, Decomposition],
    tau: Tuple[FiniteActionStructure, Decomposition],
    eta_components: Sequence[Mapping[str, str]],
    eta: Optional[StateMap] = None,
) -> Tuple[CheckResult, Optional[StateMap]]:
    """Check each component map against its factor actions and assemble the composite map.

    ``eta_components[j]`` maps factor j's points on the first side to factor
    j's points on the second. If ``eta`` is given it must equal the assembled
    map. Returns the verdict and the assembled map (None if it could not be built).
    """
    act_w, dec_w = rho
    act_z, dec_z = tau
    if not (dec_w.size == dec_z.size == len(eta_components)):
        raise StructureError("factor counts differ between the decompositions and the component maps")
    for side, (act, dec) in (("first", rho), ("second", tau)):
        verdict = check_disentangled(act, dec)
        if not verdict.ok:
            return CheckResult(False, verdict.counterexample, f"{side} structure: {verdict.detail}"), None
    _, tables_w = _factor_action_tables(act_w, dec_w)
    _, tables_z = _factor_action_tables(act_z, dec_z)

    maps: List[Tuple[int, ...]] = []
    for j, (fw, fz) in enumerate(zip(dec_w.factors, dec_z.factors)):
        pairs = eta_components[j]
        m = StateMap.from_labels(fw.points, pairs, fz.points)
        maps.append(m.mapping)
        if fw.elements != fz.elements:
            raise StructureError(f"factor {j} has different elements on the two sides")
        for (g, x), y in sorted(tables_w[j].items()):
            image = tables_z[j].get((g, m.mapping[x]))
            if image is None or image != m.mapping[y]:
                return (
                    CheckResult(
                        False,
                        (j, fw.elements[g], fw.points[x]),
                        f"component {j} is not equivariant for {fw.elements[g]} at {fw.points[x]}",
                    ),
                    None,
                )

    by_coords = {c: z for z, c in enumerate(dec_z.carrier_coords)}
    assembled = []
    for xc in dec_w.carrier_coords:
        zc = tuple(maps[j][xc[j]] for j in range(len(maps)))
        if zc not in by_coords:
            return CheckResult(False, ("assemble", zc), "component images do not name a point"), None
        assembled.append(by_coords[zc])
    composite = StateMap(tuple(assembled), act_z.carrier)
    given = None if eta is None else [eta.codomain[k] for k in eta.mapping]
    if given is not None and given != [act_z.carrier[k] for k in assembled]:
        x = next(i for i in range(len(assembled)) if given[i] != act_z.carrier[assembled[i]])
        return CheckResult(False, ("composite", act_w.carrier[x]), "the components do not reproduce the given map"), composite
    return CheckResult(True, detail="disentangled and equivariant"), composite


def _table(raw, names: Sequence[str], targets: Sequence[str], what: str) -> Tuple[Tuple[Optional[int], ...], ...]:
    if not isinstance(raw, dict):
        raise StructureError(f"{what} must be an object keyed by element")
    rows = []
    for name in names:
        values = raw.get(name)
        if not isinstance(values, list) or len(values) != len(targets):
            raise StructureError(f"{what}[{name!r}] must be a list of {len(targets)} entries")
        row = []
        for v in values:
            if v is None:
                row.append(None)
            elif v in targets:
                row.append(targets.index(v))
            else:
                raise StructureError(f"{what}[{name!r}] refers to unknown {v!r}")
        rows.append(tuple(row))
    extra = sorted(set(raw) - set(names))
    if extra:
        raise StructureError(f"{what} has rows for unknown element(s) {', '.join(extra)}")
    return tuple(rows)


def _expect_keys(data, allowed: Sequence[str], required: Sequence[str], what: str) -> None:
    if not isinstance(data, dict):
        raise StructureError(f"{what}: expected an object")
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise StructureError(f"{what}: unknown field(s) {', '.join(extra)}")
    missing = [k for k in required if k not in data]
    if missing:
        raise StructureError(f"{what}: missing field(s) {', '.join(missing)}")


def _read_json(path: Union[str, Path]):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StructureError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def structure_to_dict(s: FiniteActionStructure) -> dict:
    def name(table, i, labels):
        v = table[i]
        return None if v is None else labels[v]

    return {
        "elements": list(s.elements),
        "identity": s.elements[s.identity],
        "compose": {e: [name(s.compose[i], j, s.elements) for j in range(len(s.elements))] for i, e in enumerate(s.elements)},
        "carrier": list(s.carrier),
        "act": {e: [name(s.act[i], x, s.carrier) for x in range(len(s.carrier))] for i, e in enumerate(s.elements)},
    }


def structure_from_dict(data) -> FiniteActionStructure:
    keys = ("elements", "identity", "compose", "carrier", "act")
    _expect_keys(data, keys, keys, "action structure")
    elements, carrier = data["elements"], data["carrier"]
    for key, value in (("elements", elements), ("carrier", carrier)):
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise StructureError(f"action structure: {key} must be a list of strings")
    if data["identity"] not in elements:
        raise StructureError("action structure: identity is not an element")
    compose = _table(data["compose"], elements, elements, "compose")
    act = _table(data["act"], elements, carrier, "act")
    return FiniteActionStructure(tuple(elements), compose, elements.index(data["identity"]), tuple(carrier), act)


def load_structure(path: Union[str, Path]) -> FiniteActionStructure:
    return structure_from_dict(_read_json(path))


def map_from_dict(data, domain: Sequence[str]) -> StateMap:
    _expect_keys(data, ("mapping", "codomain"), ("mapping",), "map")
    if not isinstance(data["mapping"], dict):
        raise StructureError("map: mapping must be an object")
    return StateMap.from_labels(domain, data["mapping"], data.get("codomain"))


def load_map(path: Union[str, Path], domain: Sequence[str]) -> StateMap:
    return map_from_dict(_read_json(path), domain)


def decomposition_from_dict(data, act: FiniteActionStructure) -> Decomposition:
    _expect_keys(data, ("factors", "carrier_coords", "element_coords"), ("factors", "carrier_coords", "element_coords"), "decomposition")
    factors = []
    if not isinstance(data["factors"], list) or not data["factors"]:
        raise StructureError("decomposition: factors must be a non-empty list")
    for j, raw in enumerate(data["factors"]):
        keys = ("elements", "identity", "compose", "points")
        _expect_keys(raw, keys, keys, f"decomposition factor {j}")
        elements = raw["elements"]
        if raw["identity"] not in elements:
            raise StructureError(f"decomposition factor {j}: identity is not an element")
        compose = _table(raw["compose"], elements, elements, "compose")
        factors.append(Factor(tuple(elements), compose, elements.index(raw["identity"]), tuple(raw["points"])))
    dec = Decomposition.from_labels(act, factors, data["carrier_coords"], data["element_coords"])
    dec.validate(act)
    return dec


def load_decomposition(path: Union[str, Path], act: FiniteActionStructure) -> Decomposition:
    return decomposition_from_dict(_read_json(path), act)
