"""Registry of worked examples re-verified from bundled data by ``tropdet verify-paper``."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources

from .birkhoff_positivity import (
    alternating_group,
    birkhoff_edge_positive,
    cartoon_has_marked_triangle,
    cartoon_of_edge,
    orthant_coloring,
    positive_prevariety_member,
    verify_cut_property,
)
from .label_graphs import bipartite_complement, label_graph, label_positivity_necessary, rank2_label_is_positive
from .plane_toolkit import (
    TropicalPlaneDescription,
    arrangement_from_plane,
    certify_nonpositive_rank3,
    detect_starship,
    marked_faces,
    tree_arrangement,
)
from .rank_engine import barvinok_rank_le, prevariety_member
from .semiring_core import Permutation, TropicalMatrix
from .signed_forms import plucker_circuit_forms
from .tree_space import (
    Bicoloring,
    PhyloTree,
    PlueckerVector,
    admissible_bicoloring,
    bicolored_tree_from_matrix,
    count_bicolorings,
    is_caterpillar,
    plucker_from_tree,
    project_plucker,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: dict
    seconds: float

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def load_data(name: str):
    return json.loads(resources.files("tropdet.data").joinpath(name).read_text(encoding="utf-8"))


def _examples():
    return load_data("worked_examples.json")


def starship_inputs():
    A = TropicalMatrix.from_json(load_data("starship_matrix.json"))
    plane = TropicalPlaneDescription.from_json(load_data("starship_plane.json"))
    jmap = {int(k): v for k, v in load_data("starship_jmap.json").items()}
    return A, plane, jmap


def check_cartoon_example():
    ex = _examples()["cartoon_example"]
    A = TropicalMatrix.of(ex["matrix"])
    cert = positive_prevariety_member(A, ex["rank"])
    tree = bicolored_tree_from_matrix(A)
    barv = bool(barvinok_rank_le(A, 2))
    ok = cert.positive and is_caterpillar(tree) and barv
    return ok, {"verdict": cert.verdict, "caterpillar": is_caterpillar(tree), "barvinok_le_2": barv}


def check_label_example():
    ex = _examples()["label_example"]
    A = TropicalMatrix.of(ex["matrix"])
    label = label_graph(A, ex["rank"])
    comp = bipartite_complement(label).to_json()["edges"]
    positive = rank2_label_is_positive(label)
    ok = comp == ex["label_complement"] and not positive
    return ok, {"complement": comp, "rank2_positive_label": positive}


def check_difference_cartoons_labels():
    ex = _examples()["difference_cartoons_labels"]
    A = TropicalMatrix.of(ex["matrix"])
    label = label_graph(A, ex["rank"])
    parity = label_positivity_necessary(label, ex["rank"])
    cert = positive_prevariety_member(A, ex["rank"])
    ok = not parity.holds and parity.violation.to_json() == {"I": [1, 2, 3], "J": [1, 2, 3]} and not cert.positive
    return ok, {"label": label.to_json()["edges"], "parity_holds": parity.holds, "verdict": cert.verdict}


def check_starship_example():
    A, plane, _ = starship_inputs()
    member = bool(prevariety_member(A, 3))
    marking = marked_faces(A, plane)
    star = detect_starship(marking, plane)
    cert = certify_nonpositive_rank3(A, plane)
    cols = cert.witness.index.to_json()["J"] if cert.witness else None
    ok = (member and star is None and not cert.positive and cols == [1, 2, 3, 5]
          and marking.mapping == {j: j for j in range(5)})
    return ok, {"in_prevariety": member, "starship": None if star is None else star.to_json(),
                "verdict": cert.verdict, "witness": cert.witness.to_json() if cert.witness else None}


def check_tree_arrangement():
    A, plane, jmap = starship_inputs()
    trees = tree_arrangement(A, jmap)
    report = arrangement_from_plane(A, plane)
    ok = len(trees) == 5 and all(t.is_caterpillar for t in trees) and report.jmap == jmap and report.all_caterpillars
    return ok, {"caterpillars": [t.is_caterpillar for t in trees], "derived_jmap_matches": report.jmap == jmap}


def check_triangle_counterexample():
    ex = _examples()["triangle_counterexample"]
    sigma, pi = Permutation.parse(ex["sigma"], ex["n"]), Permutation.parse(ex["pi"], ex["n"])
    cartoon = cartoon_of_edge(sigma, pi)
    positive = birkhoff_edge_positive(sigma, pi)
    triangle = cartoon_has_marked_triangle(cartoon)
    return positive and triangle, {"edge_positive": positive, "marked_triangle": triangle, "cartoon": cartoon.to_json()}


def check_birkhoff_edges():
    rows = []
    ok = True
    for a, b, n, expected in _examples()["birkhoff_edges"]:
        sigma, pi = Permutation.parse(a, n), Permutation.parse(b, n)
        got = birkhoff_edge_positive(sigma, pi)
        tri = cartoon_has_marked_triangle(cartoon_of_edge(sigma, pi))
        ok = ok and got == expected and tri == (not expected)
        rows.append({"edge": [a, b], "positive": got, "triangle": tri})
    return ok, {"edges": rows}


def check_orthant_start():
    oc = orthant_coloring(3)
    holds, comps = verify_cut_property(oc)
    alt = set(alternating_group(3))
    ok = holds and len(oc.green_edges) == 9 and len(oc.red_edges) == 6 and any(set(c) == alt for c in comps)
    return ok, {"cut_property": holds, "green": len(oc.green_edges), "red": len(oc.red_edges)}


def _phylo(m, splits):
    return PhyloTree.build(m, {frozenset(s): 1 for s in splits})


def check_tree_on_five_leaves():
    ex = _examples()["tree_on_five_leaves"]
    tree = _phylo(ex["m"], ex["splits"])
    counts = {key: count_bicolorings(tree, *map(int, key.split(","))) for key in ex["counts"]}
    good = admissible_bicoloring(tree, Bicoloring.of(ex["admissible_red"], ex["m"]))
    bad = admissible_bicoloring(tree, Bicoloring.of(ex["inadmissible_red"], ex["m"]))
    ok = counts == ex["counts"] and good and not bad
    return ok, {"counts": counts, "admissible": good, "inadmissible": bad}


def check_bicoloring_not_global():
    ex = _examples()["bicoloring_not_global"]
    coloring = Bicoloring.of(ex["red"], ex["m"])
    here = admissible_bicoloring(_phylo(ex["m"], ex["splits"]), coloring)
    there = admissible_bicoloring(_phylo(ex["m"], ex["neighbor_splits"]), coloring)
    return here and not there, {"tree": here, "neighbor": there}


def check_split_vector():
    ex = _examples()["split_vector"]
    p = plucker_from_tree(_phylo(ex["m"], [ex["split"]]))
    got = [str(v) for v in p.values()]
    return got == ex["plucker"], {"plucker": got}


def check_split_projection():
    ex = _examples()["split_projection"]
    p = plucker_from_tree(_phylo(ex["m"], [ex["split"]]))
    M = project_plucker(p, Bicoloring.of(ex["red"], ex["m"]))
    got = [[int(x) for x in row] for row in M.entries]
    return got == ex["matrix"], {"matrix": got}


def check_linear_space():
    ex = _examples()["linear_space"]
    p = PlueckerVector.from_json({"m": ex["m"], "coords": ex["plucker"]})
    forms = plucker_circuit_forms(ex["m"], {k: p[k] for k, _ in p.coords})
    f = [forms[tuple(t)][1] for t in ex["forms"]]
    s = ex["signs"]
    f1_empty = f[0].positive_part_empty()
    f3_twist = f[2].sign_twist(s)
    f1_twist_witness = f[0].sign_twist(s).positive_witness()
    ok = f1_empty and f3_twist.is_monomial_signed() and f1_twist_witness is not None
    return ok, {
        "forms": [str(g) for g in f],
        "f1_positive_part_empty": f1_empty,
        "f3_twist_monomial_signed": f3_twist.is_monomial_signed(),
        "f1_twist_witness": None if f1_twist_witness is None else [str(x) for x in f1_twist_witness],
    }


CHECKS = {
    "cartoon-example": check_cartoon_example,
    "label": check_label_example,
    "difference-cartoons-labels": check_difference_cartoons_labels,
    "starship-criterion": check_starship_example,
    "bicolored-tree-arrangements": check_tree_arrangement,
    "triangle-crit-counterexample": check_triangle_counterexample,
    "birkhoff-edges": check_birkhoff_edges,
    "sign-flips-start": check_orthant_start,
    "tree-on-five-leaves": check_tree_on_five_leaves,
    "bicoloring-not-global": check_bicoloring_not_global,
    "split-vector": check_split_vector,
    "split-projection": check_split_projection,
    "tropical-linear-space": check_linear_space,
}


def run_check(name: str) -> CheckResult:
    start = time.perf_counter()
    passed, detail = CHECKS[name]()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - start)


def run_all() -> list:
    return [run_check(name) for name in CHECKS]
