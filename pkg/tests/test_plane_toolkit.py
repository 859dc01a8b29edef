import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropdet.errors import InputFormatError, InvalidPlaneError, PreconditionError
from tropdet.plane_toolkit import (
    Starship,
    TropicalPlaneDescription,
    arrangement_from_plane,
    certify_nonpositive_rank3,
    detect_starship,
    jmap_from_marking,
    marked_faces,
    starship_minor,
    starship_projection,
    tree_arrangement,
)
from tropdet.rank_engine import prevariety_member
from tropdet.semiring_core import MinorIndex, TropicalMatrix
from tropdet.worked_examples import starship_inputs


def unit(d, *hot):
    return [1 if i + 1 in hot else 0 for i in range(d)]


def fan_plane():
    """Three wings cone(e4, e4 + e_h) at the origin, h = 1, 2, 3."""
    faces = [{"base": [[0, 0, 0, 0]], "rays": [unit(4, 4), unit(4, h, 4)]} for h in (1, 2, 3)]
    return TropicalPlaneDescription.from_json({"d": 4, "faces": faces})


FAN_MATRIX = TropicalMatrix.of([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [2, 2, 2, 0]])


# ------------------------------------------------------------ validation


@pytest.mark.parametrize("face", [
    {"base": [[0, 0, 0]], "rays": [[1, 0, 0], [2, 0, 0]]},
    {"base": [[0, 0, 0]], "rays": [[1, 1, 1], [1, 0, 0]]},
    {"base": [[0, 0, 0]], "rays": [[1, 0, 0]]},
    {"base": [[0, 0]], "rays": [[1, 0], [0, 1]]},
    {"base": [[0, 0, 0]], "rays": [[1, 0, 0], [0, 1, 0]], "flag": {"H1": [1, 2], "H2": [1, 2]}},
    {"base": [], "rays": [[1, 0, 0], [0, 1, 0]]},
])
def test_invalid_faces_are_rejected(face):
    with pytest.raises(InvalidPlaneError):
        TropicalPlaneDescription.from_json({"d": 3, "faces": [face]})


def test_malformed_plane_json():
    with pytest.raises(InputFormatError):
        TropicalPlaneDescription.from_json({"faces": []})
    with pytest.raises(InputFormatError):
        TropicalPlaneDescription.from_json('{"d": 3, "faces": [{"base": [[0.5, 0, 0]]}]}')


def test_bounded_face_from_three_vertices():
    plane = TropicalPlaneDescription.from_json({"d": 3, "faces": [{"base": [[0, 0, 0], [1, 0, 0], [0, 1, 0]]}]})
    M = TropicalMatrix.of([["1/4"], ["1/4"], [0]])
    assert marked_faces(M, plane).mapping == {0: 0}
    assert TropicalPlaneDescription.from_json(plane.to_json()) == plane


# ---------------------------------------------------------- face marking


def test_starship_example_markings_and_certificate():
    A, plane, jmap = starship_inputs()
    marking = marked_faces(A, plane)
    assert marking.generic and marking.mapping == {j: j for j in range(5)}
    assert prevariety_member(A, 3)
    assert detect_starship(marking, plane) is None
    cert = certify_nonpositive_rank3(A, plane)
    assert not cert.positive
    assert cert.witness.index.to_json()["J"] == [1, 2, 3, 5]
    assert jmap_from_marking(marking, plane) == jmap


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.fractions(min_value=Fraction(1, 8), max_value=5, max_denominator=8),
       st.fractions(min_value=Fraction(1, 8), max_value=5, max_denominator=8), st.integers(-3, 3))
def test_relative_interior_points_mark_their_face(k, a, b, shift):
    _, plane, _ = starship_inputs()
    face = plane.faces[k]
    point = [v + a * r1 + b * r2 + shift for v, r1, r2 in zip(face.base[0], *face.rays)]
    M = TropicalMatrix.of([[x] for x in point])
    assert marked_faces(M, plane).mapping == {0: k}


def test_vertex_and_off_plane_points_are_non_generic():
    _, plane, _ = starship_inputs()
    M = TropicalMatrix.of([[0, 5], [0, 0], [0, 9], [0, 0], [0, 0]])
    marking = marked_faces(M, plane)
    assert not marking.generic
    reasons = {j: why for j, why, _ in marking.non_generic}
    assert reasons == {0: "lower-dimensional face", 1: "not on the plane"}
    with pytest.raises(InvalidPlaneError):
        marked_faces(TropicalMatrix.of([[0], [0]]), plane)


# ------------------------------------------------------------- starships


def test_fan_plane_has_a_starship():
    plane = fan_plane()
    marking = marked_faces(FAN_MATRIX, plane)
    assert marking.mapping == {0: 0, 1: 1, 2: 2}
    star = detect_starship(marking, plane)
    assert star is not None and star.faces == (0, 1, 2)
    assert starship_projection(plane, star) == (1, 2, 3, 4)
    minor = starship_minor(FAN_MATRIX, plane, star, marking, 3)
    assert minor == MinorIndex.one_based([1, 2, 3, 4], [1, 2, 3, 4])
    assert not certify_nonpositive_rank3(FAN_MATRIX, plane).positive


def test_projection_from_explicit_flags():
    faces = [{"base": [[0, 0, 0, 0]], "rays": [unit(4, 2), unit(4, *h2)], "flag": {"H1": [2], "H2": h2}}
             for h2 in ([1, 2], [2, 3], [2, 4])]
    plane = TropicalPlaneDescription.from_json({"d": 4, "faces": faces})
    assert starship_projection(plane, Starship((0, 1, 2), tuple(unit(4, 2)), (0, 0, 0, 0))) == (1, 3, 4, 2)


def test_projection_rejects_unrelated_flags():
    faces = [{"base": [[0, 0, 0, 0]], "rays": [unit(4, 4), unit(4, h, 4)], "flag": {"H1": [h], "H2": [h, 4]}}
             for h in (1, 2, 3)]
    plane = TropicalPlaneDescription.from_json({"d": 4, "faces": faces})
    with pytest.raises(InvalidPlaneError):
        starship_projection(plane, Starship((0, 1, 2), tuple(unit(4, 4)), (0, 0, 0, 0)))


# ------------------------------------------------------ tree arrangements


def test_tree_arrangement_of_starship_example():
    A, plane, jmap = starship_inputs()
    trees = tree_arrangement(A, jmap)
    assert [t.facet for t in trees] == [1, 2, 3, 4, 5]
    assert all(t.is_caterpillar for t in trees)
    assert all(len(t.rows) == 4 for t in trees)
    report = arrangement_from_plane(A, plane)
    assert report.jmap == jmap and report.all_caterpillars and report.aborted is None
    assert report.to_json()["starship"] is None


def test_tree_arrangement_argument_checks():
    A, _, jmap = starship_inputs()
    with pytest.raises(PreconditionError):
        tree_arrangement(A, {k: v for k, v in jmap.items() if k != 3})
    with pytest.raises(InputFormatError):
        tree_arrangement(A, {**jmap, 1: [1, 9]})


def test_non_generic_configuration_aborts_arrangement():
    plane = fan_plane()
    report = arrangement_from_plane(FAN_MATRIX, plane)
    assert report.aborted == "non-generic configuration"
    assert report.projection == (1, 2, 3, 4)


def test_marking_is_deterministic_under_column_permutation():
    A, plane, _ = starship_inputs()
    order = list(range(5))
    random.Random(2).shuffle(order)
    B = TropicalMatrix.of([[row[j] for j in order] for row in A.entries])
    assert marked_faces(B, plane).mapping == {k: order[k] for k in range(5)}
