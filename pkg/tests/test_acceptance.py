"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import itertools
import random
import time

import pytest

from tropdet.birkhoff_positivity import (
    alternating_group,
    birkhoff_edge_positive,
    birkhoff_graph,
    cartoon_has_marked_triangle,
    cartoon_of_edge,
    orthant_coloring,
    positive_prevariety_member,
    verify_cut_property,
    vertex_signs,
)
from tropdet.generators import (
    all_topologies,
    caterpillar_tree,
    matrix_of_tree,
    random_bicolored_tree,
    random_factors,
    random_matrix,
    random_rational,
    random_sign_pattern,
    random_topology,
    snowflake_tree,
)
from tropdet.label_graphs import bipartite_complement, label_degree_check, label_graph, rank2_label_is_positive
from tropdet.rank_engine import (
    KapranovStatus,
    SearchConfig,
    barvinok_rank,
    barvinok_rank_le,
    kapranov_status,
    min_plus_product,
    minors_form_basis,
    prevariety_member,
    rank_report,
    tropical_rank,
)
from tropdet.semiring_core import Permutation, SignPattern, first_nonsingular_minor
from tropdet.tree_space import (
    Bicoloring,
    PhyloTree,
    admissible_bicoloring,
    bicolored_reading,
    bicolored_tree_from_matrix,
    count_bicolorings,
    elementary_splits,
    is_caterpillar,
    plucker_from_tree,
    project_plucker,
    tree_from_plucker,
)
from tropdet.worked_examples import run_check

INDEPENDENT = SearchConfig(cross_check=False)


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if passed else 'FAIL'} ({detail})")

    return emit


def _edges(n):
    verts, edges = birkhoff_graph(n)
    return [(Permutation(verts[a]), Permutation(verts[b])) for a, b in edges]


# 1 -------------------------------------------------------------------------


def test_criterion_1_triangle_criterion_small_n(report):
    start = time.perf_counter()
    counts, exceptions = {}, []
    for n in (3, 4):
        edges = _edges(n)
        counts[n] = len(edges)
        for sigma, pi in edges:
            triangle = cartoon_has_marked_triangle(cartoon_of_edge(sigma, pi))
            if triangle == birkhoff_edge_positive(sigma, pi):
                exceptions.append((str(sigma), str(pi)))
    elapsed = time.perf_counter() - start
    passed = counts == {3: 15, 4: 240} and not exceptions and elapsed < 1
    report(1, passed, f"edges {counts}, exceptions {len(exceptions)}, {elapsed:.2f}s")
    assert counts == {3: 15, 4: 240}
    assert not exceptions
    assert elapsed < 1


# 2 -------------------------------------------------------------------------


def test_criterion_2_triangle_criterion_fails_at_five(report):
    start = time.perf_counter()
    sigma, pi = Permutation.parse("(4 5)", 5), Permutation.identity(5)
    counterexample = birkhoff_edge_positive(sigma, pi) and cartoon_has_marked_triangle(cartoon_of_edge(sigma, pi))
    positive_with_triangle, nonpositive_without = 0, []
    edges = _edges(5)
    for a, b in edges:
        triangle = cartoon_has_marked_triangle(cartoon_of_edge(a, b))
        positive = birkhoff_edge_positive(a, b)
        if positive and triangle:
            positive_with_triangle += 1
        if not positive and not triangle:
            nonpositive_without.append((str(a), str(b)))
    elapsed = time.perf_counter() - start
    passed = counterexample and not nonpositive_without and elapsed < 30
    sample = nonpositive_without[0] if nonpositive_without else None
    report(2, passed, f"(id,(45)) positive with triangle: {counterexample}; {len(edges)} edges scanned; "
                      f"positive-with-triangle {positive_with_triangle}; non-positive triangle-free "
                      f"{len(nonpositive_without)} e.g. {sample}; {elapsed:.2f}s")
    assert counterexample
    assert elapsed < 30
    assert not nonpositive_without, f"non-positive edges with triangle-free cartoons, e.g. {sample}"


# 3 -------------------------------------------------------------------------


def _cut_stats(n, s):
    """(exactly two red components with green = cut, green edges = the cut between vertex sign classes)."""
    oc = orthant_coloring(n, s)
    holds, comps = verify_cut_property(oc)
    signs = vertex_signs(n, s)
    _, edges = birkhoff_graph(n)
    cut = {e for e in edges if signs[e[0]] != signs[e[1]]}
    return holds and len(comps) == 2, set(oc.green_edges) == cut


def test_criterion_3_orthant_cut_property(report):
    rng = random.Random(3)
    patterns = {3: [SignPattern.of([bits[0:3], bits[3:6], bits[6:9]])
                    for bits in itertools.product((1, -1), repeat=9)]}
    for n in (4, 5):
        patterns[n] = [random_sign_pattern(rng, n, n) for _ in range(500)]
    two_component_failures, cut_failures = {}, {}
    for n, group in patterns.items():
        stats = [_cut_stats(n, s) for s in group]
        two_component_failures[n] = sum(1 for two, _ in stats if not two)
        cut_failures[n] = sum(1 for _, cut in stats if not cut)
    start_ok = True
    for n in (3, 4, 5):
        _, comps = verify_cut_property(orthant_coloring(n))
        alt = set(alternating_group(n))
        start_ok &= sorted(map(len, comps)) == [len(alt)] * 2 and any(set(c) == alt for c in comps)
    passed = not any(two_component_failures.values()) and not any(cut_failures.values()) and start_ok
    report(3, passed, f"patterns {({n: len(g) for n, g in patterns.items()})}; patterns without exactly two red "
                      f"components {two_component_failures}; patterns whose green edges are not the sign cut "
                      f"{cut_failures}; start components = A_n and coset: {start_ok}")
    assert start_ok
    assert not any(cut_failures.values())
    assert not any(two_component_failures.values())


# 4 -------------------------------------------------------------------------


def _rank2_instances(rng, count):
    kinds = ["product", "tree", "snowflake"]
    for k in range(count):
        kind = kinds[k % 3]
        d, n = rng.randint(2, 5), rng.randint(2, 6)
        if kind == "product":
            X, Y = random_factors(rng, d, n, 2)
            yield kind, min_plus_product(X, Y)
        elif kind == "tree":
            yield kind, matrix_of_tree(random_bicolored_tree(rng, d, n, keep=rng.choice((1.0, 0.7))), rng)
        else:
            d, n = rng.randint(3, 5), rng.randint(3, 6)
            yield kind, matrix_of_tree(snowflake_tree(rng, d, n), rng)


def test_criterion_4_rank2_equivalences(report):
    rng = random.Random(4)
    disagreements, total, caterpillars, high_rank = [], 0, 0, 0
    for kind, A in _rank2_instances(rng, 1050):
        if first_nonsingular_minor(A, 3) is not None:
            high_rank += 1
            continue
        total += 1
        barv = bool(barvinok_rank_le(A, 2, INDEPENDENT))
        cat = is_caterpillar(bicolored_tree_from_matrix(A))
        pos = positive_prevariety_member(A, 2).positive
        caterpillars += cat
        if not barv == cat == pos:
            disagreements.append((kind, A.to_json(), barv, cat, pos))
    passed = total >= 1000 and not disagreements
    report(4, passed, f"{total} rank-2 instances ({caterpillars} caterpillars, {total - caterpillars} not), "
                      f"disagreements {len(disagreements)}")
    assert total >= 1000
    assert not disagreements


# 5 -------------------------------------------------------------------------


def _random_colored_tree(rng):
    m = rng.randint(4, 10)
    d = rng.randint(2, m - 2)
    coloring = Bicoloring.of(rng.sample(range(1, m + 1), d), m)
    reds = set(coloring.red)
    splits = [s for s in random_topology(rng, m)
              if all(side & reds and side - reds for side in (s, frozenset(range(1, m + 1)) - s))]
    splits = [s for s in splits if rng.random() < 0.85]
    weights = {s: random_rational(rng, 8) for s in splits}
    lengths = [random_rational(rng, 8, 0, 3) for _ in range(m)]
    return PhyloTree.build(m, weights, lengths), coloring


def test_criterion_5_plucker_round_trip(report):
    rng = random.Random(5)
    failures, count = [], 0
    for _ in range(520):
        tree, coloring = _random_colored_tree(rng)
        p = plucker_from_tree(tree)
        back = tree_from_plucker(p)
        M = project_plucker(p, coloring)
        recovered = bicolored_tree_from_matrix(M)
        count += 1
        if back != tree or recovered != bicolored_reading(tree, coloring):
            failures.append((tree.to_json(), coloring.to_json()))
    asym = run_check("bicoloring-not-global")
    passed = count >= 500 and not failures and asym.passed
    report(5, passed, f"{count} split systems, failures {len(failures)}, admissibility asymmetry {asym.detail}")
    assert count >= 500
    assert not failures
    assert asym.passed


# 6 -------------------------------------------------------------------------

WORKED_EXAMPLES = [
    "cartoon-example",
    "label",
    "difference-cartoons-labels",
    "starship-criterion",
    "bicolored-tree-arrangements",
]


def test_criterion_6_worked_examples(report):
    results = [run_check(name) for name in WORKED_EXAMPLES]
    slow = [r.name for r in results if r.seconds >= 1]
    failed = [r.name for r in results if not r.passed]
    passed = not slow and not failed
    timing = ", ".join(f"{r.name} {r.seconds:.3f}s" for r in results)
    report(6, passed, f"failed {failed}, {timing}")
    assert not failed
    assert not slow


# 7 -------------------------------------------------------------------------


def test_criterion_7_bicoloring_counts(report):
    example = run_check("tree-on-five-leaves")
    mismatches, shapes, bound_violations = [], 0, []
    for m in range(3, 9):
        for splits in all_topologies(m):
            shapes += 1
            tree = PhyloTree.build(m, {s: 1 for s in splits})
            k = len(elementary_splits(tree))
            if 2 * k > m:
                bound_violations.append(splits)
            brute = {}
            for reds in itertools.chain.from_iterable(
                itertools.combinations(range(1, m + 1), r) for r in range(m + 1)
            ):
                if admissible_bicoloring(tree, Bicoloring.of(reds, m)):
                    brute[len(reds)] = brute.get(len(reds), 0) + 1
            for d in range(1, m):
                if count_bicolorings(tree, d, m - d) != brute.get(d, 0):
                    mismatches.append((m, d, sorted(map(sorted, splits))))
    passed = example.passed and not mismatches and not bound_violations
    report(7, passed, f"example counts {example.detail['counts']}; {shapes} shapes on 3..8 leaves, "
                      f"mismatches {len(mismatches)}, bound violations {len(bound_violations)}")
    assert example.passed
    assert not mismatches
    assert not bound_violations


# 8 -------------------------------------------------------------------------


def test_criterion_8_rank_chain(report):
    rng = random.Random(8)
    chain_failures, kapranov_failures, product_failures, decided = [], [], [], 0
    for _ in range(1000):
        d, n = rng.randint(2, 5), rng.randint(2, 5)
        A = random_matrix(rng, d, n, rng.choice((2, 4, 9)))
        trop = tropical_rank(A)
        barv = barvinok_rank(A, INDEPENDENT)
        if trop > barv:
            chain_failures.append(A.to_json())
        rank_report(A, INDEPENDENT)  # raises on any chain violation
        for r in range(1, min(d, n) + 1):
            status = kapranov_status(A, r)
            member = bool(prevariety_member(A, r))
            if r >= min(d, n) or minors_form_basis(r + 1, d, n):
                decided += 1
                if (status == KapranovStatus.MEMBER) != member:
                    kapranov_failures.append((A.to_json(), r))
            elif status == KapranovStatus.MEMBER and not member:
                kapranov_failures.append((A.to_json(), r))
        k = rng.randint(1, 4)
        X, Y = random_factors(rng, d, n, k)
        if barvinok_rank(min_plus_product(X, Y), INDEPENDENT) > k:
            product_failures.append(k)
    passed = not chain_failures and not kapranov_failures and not product_failures
    report(8, passed, f"1000 matrices, chain failures {len(chain_failures)}, {decided} decided Kapranov "
                      f"verdicts with {len(kapranov_failures)} inconsistencies, product bound failures "
                      f"{len(product_failures)}")
    assert not chain_failures
    assert not kapranov_failures
    assert not product_failures


# 9 -------------------------------------------------------------------------


def test_criterion_9_signed_linear_forms(report):
    result = run_check("tropical-linear-space")
    witness = result.detail["f1_twist_witness"]
    report(9, result.passed, f"f1 positive part empty {result.detail['f1_positive_part_empty']}, "
                             f"f3 twist monomial-signed {result.detail['f3_twist_monomial_signed']}, "
                             f"f1 twist witness {witness}")
    assert result.passed


# 10 ------------------------------------------------------------------------


def _two_paths(label):
    return rank2_label_is_positive(label)


def test_criterion_10_label_classification(report):
    rng = random.Random(10)
    positive_bad, degree_bad, count = [], [], 0
    while count < 300:
        d, n = rng.randint(3, 5), rng.randint(3, 6)
        A = matrix_of_tree(caterpillar_tree(rng, d, n), rng)
        if not positive_prevariety_member(A, 2).positive:
            positive_bad.append(("not positive", A.to_json()))
            continue
        count += 1
        label = label_graph(A, 2)
        if not _two_paths(label):
            positive_bad.append((A.to_json(), bipartite_complement(label).to_json()))
        if not label_degree_check(label, 2):
            degree_bad.append(A.to_json())
    snow_bad, snow_count = [], 0
    for _ in range(100):
        d, n = rng.randint(3, 5), rng.randint(3, 6)
        tree = snowflake_tree(rng, d, n)
        A = matrix_of_tree(tree, rng)
        label = label_graph(A, 2)
        snow_count += 1
        if _two_paths(label):
            snow_bad.append(A.to_json())
        if not label_degree_check(label, 2):
            degree_bad.append(A.to_json())
    passed = not positive_bad and not snow_bad and not degree_bad
    report(10, passed, f"{count} caterpillar matrices with {len(positive_bad)} misclassified, "
                       f"{snow_count} snowflakes with {len(snow_bad)} misclassified, degree failures {len(degree_bad)}")
    assert not positive_bad
    assert not snow_bad
    assert not degree_bad
