import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from action_algebra.engine import build_algebra
from action_algebra.equivariance import (
    CheckResult,
    FiniteActionStructure,
    StateMap,
    StructureError,
    check_disentangled,
    check_disentangled_equivariance,
    check_equivariance,
    check_equivariance_by_object,
    decomposition_from_dict,
    load_decomposition,
    load_map,
    load_structure,
    object_blocks,
    quotient_action,
    structure_from_algebra,
    structure_from_dict,
    structure_to_dict,
)
from action_algebra.gallery import gallery_world

from helpers import L_ORBITS, klein_decomposition, orbit_side, random_world, torus_structure


@pytest.fixture(scope="module")
def torus():
    return torus_structure()


def test_identity_map_is_equivariant(torus):
    assert check_equivariance(torus, torus, StateMap.identity(torus.carrier)).ok


def test_diagonal_collapse(torus):
    eta = StateMap.from_labels(torus.carrier, {"w0": "z0", "w3": "z0", "w1": "z1", "w2": "z1"})
    z = quotient_action(torus, eta)
    assert isinstance(z, FiniteActionStructure)
    assert z.carrier == ("z0", "z1")
    assert check_equivariance(torus, z, eta).ok


def test_inconsistent_remap_is_caught(torus):
    good = StateMap.from_labels(torus.carrier, {"w0": "z0", "w3": "z0", "w1": "z1", "w2": "z1"})
    z = quotient_action(torus, good)
    bad = StateMap.from_labels(torus.carrier, {"w0": "z0", "w3": "z1", "w1": "z1", "w2": "z1"}, z.carrier)
    result = check_equivariance(torus, z, bad)
    assert not result.ok
    assert result.counterexample == ("U", "w1")


def test_bijective_quotient_is_a_relabeling(torus):
    eta = StateMap.from_labels(torus.carrier, {"w0": "a", "w1": "b", "w2": "c", "w3": "d"})
    q = quotient_action(torus, eta)
    assert q.act == torus.act
    assert q.carrier == ("a", "b", "c", "d")


def test_l_orbit_quotient(torus):
    eta = StateMap.from_labels(torus.carrier, L_ORBITS)
    q = quotient_action(torus, eta)
    assert q.carrier == ("top", "bottom")
    l = q.element_index("L")
    assert q.act[l] == (0, 1)
    assert check_equivariance(torus, q, eta).ok


def test_non_congruence_names_the_separated_pair(torus):
    eta = StateMap.from_labels(torus.carrier, {"w0": "z0", "w1": "z0", "w3": "z0", "w2": "z1"})
    result = quotient_action(torus, eta)
    assert isinstance(result, CheckResult) and not result.ok
    assert result.counterexample == ("U", "w0", "w1")


def test_strict_mode_distinguishes_undefinedness():
    # a is undefined at x; the map sends x to a point where a is defined
    w = FiniteActionStructure(("1", "a"), ((0, 1), (1, 1)), 0, ("x", "y"), ((0, 1), (None, 1)))
    z = FiniteActionStructure(("1", "a"), ((0, 1), (1, 1)), 0, ("p",), ((0,), (0,)))
    eta = StateMap.from_labels(w.carrier, {"x": "p", "y": "p"})
    assert check_equivariance(w, z, eta).ok
    strict = check_equivariance(w, z, eta, strict=True)
    assert not strict.ok and strict.counterexample == ("a", "x")
    # defined at a point but undefined at its image fails in both modes
    back = StateMap.from_labels(z.carrier, {"p": "x"}, w.carrier)
    assert not check_equivariance(z, w, back).ok


def test_structures_must_share_the_algebra(torus):
    other = FiniteActionStructure(("1",), ((0,),), 0, ("p",), ((0,),))
    with pytest.raises(StructureError):
        check_equivariance(torus, other, StateMap.from_labels(torus.carrier, {x: "p" for x in torus.carrier}))


def test_malformed_structures_are_rejected():
    with pytest.raises(StructureError, match="identity"):
        FiniteActionStructure(("1", "a"), ((0, 1), (1, 0)), 0, ("x", "y"), ((1, 0), (1, 0)))
    with pytest.raises(StructureError, match="composite"):
        FiniteActionStructure(("1", "a"), ((0, 1), (1, 1)), 0, ("x", "y"), ((0, 1), (1, 0)))


def test_by_object_blocks_follow_definedness():
    act = structure_from_algebra(build_algebra(gallery_world("wall-masked")))
    blocks = object_blocks(act)
    assert sorted(x for block in blocks for x in block) == list(range(len(act.carrier)))
    assert len(blocks) > 1
    results = check_equivariance_by_object(act, act, StateMap.identity(act.carrier))
    assert all(r.ok for _, r in results)


def test_map_composition(torus):
    eta = StateMap.from_labels(torus.carrier, {"w0": "z0", "w3": "z0", "w1": "z1", "w2": "z1"})
    z = quotient_action(torus, eta)
    to_point = StateMap.from_labels(z.carrier, {"z0": "p", "z1": "p"})
    y = quotient_action(z, to_point)
    assert check_equivariance(torus, y, eta.then(to_point)).ok


def test_klein_decomposition(torus):
    assert check_disentangled(torus, klein_decomposition(torus)).ok


def test_trivial_decomposition_always_holds(torus):
    from action_algebra.equivariance import Decomposition, Factor

    factor = Factor(torus.elements, tuple(tuple(r) for r in torus.compose), torus.identity, torus.carrier)
    dec = Decomposition.from_labels(
        torus, [factor], {x: (x,) for x in torus.carrier}, {e: (e,) for e in torus.elements}
    )
    assert check_disentangled(torus, dec).ok


def test_wall_breaks_the_klein_decomposition():
    wall = structure_from_algebra(build_algebra(gallery_world("wall-identity")))
    result = check_disentangled(wall, klein_decomposition(wall, {"1": ("1", "1"), "L": ("L", "1"), "D": ("1", "D")}))
    assert not result.ok
    assert result.counterexample is not None


def test_bad_element_coordinates_are_caught(torus):
    coords = {"1": ("1", "1"), "L": ("L", "1"), "D": ("1", "D"), "RU": ("1", "D")}
    result = check_disentangled(torus, klein_decomposition(torus, coords))
    assert not result.ok


def test_componentwise_maps(torus):
    dec = klein_decomposition(torus)
    eta, quotient, qdec = orbit_side(torus)
    verdict, composite = check_disentangled_equivariance(
        (torus, dec), (quotient, qdec), [{"c0": "p", "c1": "p"}, {"r0": "r0", "r1": "r1"}]
    )
    assert verdict.ok
    assert composite == eta
    identities = [{"c0": "c0", "c1": "c1"}, {"r0": "r0", "r1": "r1"}]
    verdict, composite = check_disentangled_equivariance((torus, dec), (torus, dec), identities)
    assert verdict.ok and composite == StateMap.identity(torus.carrier)


def test_swapped_component_names_factor_and_pair(torus):
    dec = klein_decomposition(torus)
    verdict, composite = check_disentangled_equivariance(
        (torus, dec), (torus, dec), [{"c0": "c1", "c1": "c1"}, {"r0": "r0", "r1": "r1"}]
    )
    assert not verdict.ok
    assert verdict.counterexample == (0, "L", "c0")
    assert composite is None


def test_given_map_must_match_the_components(torus):
    dec = klein_decomposition(torus)
    identities = [{"c0": "c0", "c1": "c1"}, {"r0": "r0", "r1": "r1"}]
    swap = StateMap.from_labels(torus.carrier, {"w0": "w1", "w1": "w0", "w2": "w3", "w3": "w2"})
    verdict, _ = check_disentangled_equivariance((torus, dec), (torus, dec), identities, swap)
    assert not verdict.ok


def test_json_round_trips(tmp_path, torus):
    data = structure_to_dict(torus)
    assert structure_from_dict(json.loads(json.dumps(data))).act == torus.act
    path = tmp_path / "s.json"
    path.write_text(json.dumps(data))
    assert load_structure(path).compose == torus.compose
    (tmp_path / "m.json").write_text(json.dumps({"mapping": L_ORBITS}))
    assert load_map(tmp_path / "m.json", torus.carrier) == StateMap.from_labels(torus.carrier, L_ORBITS)
    doc = {
        "factors": [
            {"elements": ["1", "L"], "identity": "1", "compose": {"1": ["1", "L"], "L": ["L", "1"]}, "points": ["c0", "c1"]},
            {"elements": ["1", "D"], "identity": "1", "compose": {"1": ["1", "D"], "D": ["D", "1"]}, "points": ["r0", "r1"]},
        ],
        "carrier_coords": {"w0": ["c0", "r0"], "w1": ["c1", "r0"], "w2": ["c0", "r1"], "w3": ["c1", "r1"]},
        "element_coords": {"1": ["1", "1"], "L": ["L", "1"], "D": ["1", "D"], "RU": ["L", "D"]},
    }
    (tmp_path / "d.json").write_text(json.dumps(doc))
    assert check_disentangled(torus, load_decomposition(tmp_path / "d.json", torus)).ok


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(extra=1), "unknown field"),
        (lambda d: d.pop("factors"), "missing field"),
        (lambda d: d["carrier_coords"].pop("w3"), "no coordinates"),
        (lambda d: d["carrier_coords"].update(w3=["c1", "r0"]), "injective"),
        (lambda d: d["element_coords"].update(Q=["1", "1"]), "unknown element"),
    ],
)
def test_decomposition_schema_errors(torus, mutate, message):
    doc = {
        "factors": [
            {"elements": ["1", "L"], "identity": "1", "compose": {"1": ["1", "L"], "L": ["L", "1"]}, "points": ["c0", "c1"]},
            {"elements": ["1", "D"], "identity": "1", "compose": {"1": ["1", "D"], "D": ["D", "1"]}, "points": ["r0", "r1"]},
        ],
        "carrier_coords": {"w0": ["c0", "r0"], "w1": ["c1", "r0"], "w2": ["c0", "r1"], "w3": ["c1", "r1"]},
        "element_coords": {"1": ["1", "1"]},
    }
    mutate(doc)
    with pytest.raises(StructureError, match=message):
        decomposition_from_dict(doc, torus)


def random_structures():
    return st.builds(
        lambda seed, treatment: structure_from_algebra(
            build_algebra(random_world(random.Random(seed), treatment, max_states=5, max_actions=3))
        ),
        st.integers(0, 10**6),
        st.sampled_from(["identity", "masked"]),
    )


def random_map(act, data, parts=3):
    images = data.draw(st.lists(st.integers(0, parts - 1), min_size=len(act.carrier), max_size=len(act.carrier)))
    return StateMap.from_labels(act.carrier, {x: f"z{k}" for x, k in zip(act.carrier, images)})


@settings(max_examples=60, deadline=None)
@given(random_structures(), st.data())
def test_quotients_round_trip(act, data):
    eta = random_map(act, data)
    quotient = quotient_action(act, eta)
    if isinstance(quotient, FiniteActionStructure):
        assert check_equivariance(act, quotient, eta, strict=True).ok
    else:
        name, x, y = quotient.counterexample
        a, i, j = act.element_index(name), act.point_index(x), act.point_index(y)
        assert eta(i) == eta(j)
        image = lambda p: None if act.act[a][p] is None else eta(act.act[a][p])
        assert image(i) != image(j)


@settings(max_examples=60, deadline=None)
@given(random_structures(), st.data())
def test_equivariant_maps_compose(act, data):
    eta1 = random_map(act, data, 4)
    middle = quotient_action(act, eta1)
    if not isinstance(middle, FiniteActionStructure):
        return
    eta2 = random_map(middle, data, 2)
    last = quotient_action(middle, eta2)
    if not isinstance(last, FiniteActionStructure):
        return
    assert check_equivariance(act, middle, eta1).ok
    assert check_equivariance(middle, last, eta2).ok
    assert check_equivariance(act, last, eta1.then(eta2)).ok
