import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sign_bruteforce
from tropdet.birkhoff_positivity import (
    NOT_POSITIVE,
    OFF_HYPERSURFACE,
    POSITIVE,
    alternating_group,
    birkhoff_edge_positive,
    birkhoff_graph,
    cartoon_has_marked_triangle,
    cartoon_of_edge,
    minor_positivity,
    orthant_coloring,
    positive_prevariety_member,
    signed_minor_positivity,
    signed_prevariety_member,
    verify_cut_property,
    vertex_signs,
    violating_minors,
)
from tropdet.errors import BudgetExceeded, DimensionError, NotInPrevariety, PreconditionError
from tropdet.semiring_core import MinorIndex, Permutation, SignPattern, TropicalMatrix

CARTOON = TropicalMatrix.of([[0, 0, 2], [0, 0, 1], [3, 1, 0]])
IDENTITY_PATTERN = TropicalMatrix.of([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
FULL3 = MinorIndex.one_based([1, 2, 3], [1, 2, 3])


def single_cycle(q):
    moved = [i for i in range(len(q)) if q[i] != i]
    if not moved:
        return 0
    length, i = 0, moved[0]
    while True:
        i = q[i]
        length += 1
        if i == moved[0]:
            break
    return length if length == len(moved) else 0


# ------------------------------------------------------------ minors


def test_minor_verdicts_on_examples():
    v = minor_positivity(CARTOON, FULL3)
    assert v.status == POSITIVE and v.optima_count == 2
    w = minor_positivity(IDENTITY_PATTERN, FULL3)
    assert w.status == NOT_POSITIVE and w.even_attained and not w.odd_attained
    off = minor_positivity(TropicalMatrix.of([[0, 1], [1, 0]]), MinorIndex.one_based([1, 2], [1, 2]))
    assert off.status == OFF_HYPERSURFACE
    with pytest.raises(DimensionError):
        minor_positivity(CARTOON, MinorIndex.one_based([1, 2, 4], [1, 2, 3]))


def test_sign_pattern_can_turn_a_minor_positive():
    flip = SignPattern.of([[1, -1, 1], [1, 1, 1], [1, 1, 1]])
    assert signed_minor_positivity(IDENTITY_PATTERN, flip, FULL3).status == POSITIVE
    assert signed_minor_positivity(IDENTITY_PATTERN, SignPattern.ones(3, 3), FULL3).status == NOT_POSITIVE


def test_prevariety_positivity_certificates():
    assert positive_prevariety_member(CARTOON, 2).positive
    cert = positive_prevariety_member(IDENTITY_PATTERN, 2)
    assert not cert.positive and cert.witness.index == FULL3
    assert cert.to_json()["witness"]["status"] == NOT_POSITIVE
    assert violating_minors(IDENTITY_PATTERN, 2) == [cert.witness]
    flip = SignPattern.of([[1, -1, 1], [1, 1, 1], [1, 1, 1]])
    assert signed_prevariety_member(IDENTITY_PATTERN, flip, 2).positive
    with pytest.raises(NotInPrevariety):
        positive_prevariety_member(TropicalMatrix.of([[0, 1], [1, 0]]), 1)
    with pytest.raises(DimensionError):
        signed_prevariety_member(CARTOON, SignPattern.ones(2, 3), 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.sampled_from((1, -1)), min_size=6, max_size=6))
def test_row_and_column_sign_flips_preserve_signed_positivity(grid, flips):
    # Flipping whole rows or columns multiplies every term of the minor by the same sign.
    A = TropicalMatrix.of(grid)
    base = SignPattern.ones(3, 3)
    twisted = SignPattern.of([[flips[i] * flips[3 + j] for j in range(3)] for i in range(3)])
    assert signed_minor_positivity(A, base, FULL3).status == signed_minor_positivity(A, twisted, FULL3).status


# ------------------------------------------------------- Birkhoff edges


@pytest.mark.parametrize("n, count", [(2, 1), (3, 15), (4, 240)])
def test_birkhoff_graph_edges_are_single_cycle_differences(n, count):
    verts, edges = birkhoff_graph(n)
    expected = set()
    for a, b in itertools.combinations(range(len(verts)), 2):
        pa, pb = verts[a], verts[b]
        inv = [0] * n
        for i, x in enumerate(pb):
            inv[x] = i
        if single_cycle(tuple(pa[inv[i]] for i in range(n))):
            expected.add((a, b))
    assert set(edges) == expected and len(edges) == count


@pytest.mark.parametrize("n", [3, 4])
def test_triangle_criterion_is_exact_for_small_n(n):
    verts, edges = birkhoff_graph(n)
    for a, b in edges:
        sigma, pi = Permutation(verts[a]), Permutation(verts[b])
        positive = birkhoff_edge_positive(sigma, pi)
        assert positive == (sign_bruteforce(verts[a]) != sign_bruteforce(verts[b]))
        assert positive != cartoon_has_marked_triangle(cartoon_of_edge(sigma, pi))


def test_cartoon_of_transposition_edge():
    c = cartoon_of_edge(Permutation.parse("(4 5)", 5), Permutation.identity(5))
    assert c.edge_marks == ((4, 5), (4, 5))
    assert c.node_marks == (1, 2, 3)
    assert cartoon_has_marked_triangle(c)
    assert birkhoff_edge_positive(Permutation.parse("(4 5)", 5), Permutation.identity(5))
    dot = c.to_dot()
    assert dot.startswith("graph cartoon {") and "4 -- 5" in dot


def test_non_edges_are_rejected():
    with pytest.raises(PreconditionError):
        cartoon_of_edge(Permutation.parse("(1 2)(3 4)", 4), Permutation.identity(4))
    with pytest.raises(PreconditionError):
        birkhoff_edge_positive(Permutation.identity(3), Permutation.identity(3))


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.permutations(list(range(n))), st.permutations(list(range(n))))))
def test_cartoon_has_one_mark_per_column(pair):
    sigma, pi = (Permutation(tuple(p)) for p in pair)
    if sigma == pi or not single_cycle(sigma.compose(pi.inverse()).images):
        return
    c = cartoon_of_edge(sigma, pi)
    assert len(c.edge_marks) + len(c.node_marks) == len(sigma)


# ----------------------------------------------------- orthant colorings


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_all_positive_orthant_splits_into_even_and_odd(n):
    oc = orthant_coloring(n)
    holds, comps = verify_cut_property(oc)
    assert holds
    assert any(set(c) == set(alternating_group(n)) for c in comps)
    _, edges = birkhoff_graph(n)
    assert len(oc.green_edges) + len(oc.red_edges) == len(edges)


def test_exhaustive_three_by_three_patterns_satisfy_cut_property():
    for bits in itertools.product((1, -1), repeat=9):
        s = SignPattern.of([bits[0:3], bits[3:6], bits[6:9]])
        assert verify_cut_property(orthant_coloring(3, s))[0]


def test_two_component_claim_can_fail_at_four():
    s = SignPattern.of([[-1, 1, -1, -1], [-1, -1, 1, -1], [1, -1, -1, -1], [-1, -1, -1, 1]])
    oc = orthant_coloring(4, s)
    holds, comps = verify_cut_property(oc)
    assert not holds
    assert sorted(map(len, comps)) == [1, 1, 1, 1, 20]
    signs = vertex_signs(4, s)
    assert all((signs[a] != signs[b]) for a, b in oc.green_edges)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from((1, -1)), min_size=16, max_size=16), st.integers(0, 3), st.booleans())
def test_green_edges_are_the_sign_cut_and_invariant_under_line_flips(bits, k, along_rows):
    s = SignPattern.of([bits[4 * i:4 * i + 4] for i in range(4)])
    flipped = SignPattern.of([[x * (-1 if (i if along_rows else j) == k else 1) for j, x in enumerate(row)]
                              for i, row in enumerate(s.signs)])
    a, b = orthant_coloring(4, s), orthant_coloring(4, flipped)
    assert a.green_edges == b.green_edges
    signs = vertex_signs(4, s)
    assert all(signs[u] != signs[v] for u, v in a.green_edges)
    assert all(signs[u] == signs[v] for u, v in a.red_edges)


def test_orthant_guards():
    with pytest.raises(BudgetExceeded):
        orthant_coloring(7)
    with pytest.raises(DimensionError):
        orthant_coloring(3, SignPattern.ones(2, 2))
    assert "color=green" in orthant_coloring(3).to_dot()
