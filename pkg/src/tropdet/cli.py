"""Command-line front end. Every subcommand prints one JSON report on stdout.

Computed verdicts, negative ones included, exit 0. Input, usage and budget
failures exit with the code carried by the raised error and print an error
report instead.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .birkhoff_positivity import (
    birkhoff_edge_positive,
    cartoon_has_marked_triangle,
    cartoon_of_edge,
    orthant_coloring,
    positive_prevariety_member,
    signed_prevariety_member,
    verify_cut_property,
)
from .errors import BudgetExceeded, DimensionError, InputFormatError, TropdetError
from .label_graphs import (
    bipartite_complement,
    label_degree_check,
    label_graph,
    label_positivity_necessary,
    rank2_label_is_positive,
)
from .worked_examples import run_all
from .plane_toolkit import TropicalPlaneDescription, arrangement_from_plane, certify_nonpositive_rank3, tree_arrangement
from .rank_engine import SearchConfig, rank_report
from .semiring_core import (
    DEFAULT_PERM_BUDGET,
    Permutation,
    SignPattern,
    TropicalMatrix,
    is_birkhoff_edge,
    load_json_text,
    perm_sign,
)
from .tree_space import (
    Bicoloring,
    PhyloTree,
    PlueckerVector,
    bicolored_reading,
    bicolored_tree_from_matrix,
    four_point_check,
    is_caterpillar,
    plucker_from_tree,
    project_plucker,
    tree_from_plucker,
)

DEFAULT_ORTHANT_BUDGET = 2 ** 16


class _Inputs:
    """Reads input files once and hashes their bytes in the order they were read."""

    def __init__(self):
        self.digest = hashlib.sha256()

    def text(self, path) -> str:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise InputFormatError(f"cannot read {path}: {exc.strerror}") from None
        self.digest.update(raw)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise InputFormatError(f"{path} is not UTF-8") from None

    def json(self, path):
        return load_json_text(self.text(path))

    def note(self, value: str):
        self.digest.update(value.encode("utf-8"))


def _write_artifact(out_dir, name, text, artifacts):
    if out_dir is None:
        return
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    artifacts.append(str(path))


def _parse_perm(text, n):
    try:
        return Permutation.parse(text, n)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, TropdetError):
            raise
        raise InputFormatError(f"cannot parse permutation {text!r}: {exc}") from None


# ------------------------------------------------------------- subcommands


def cmd_rank(args, inputs, artifacts):
    A = TropicalMatrix.from_json(inputs.text(args.matrix))
    config = SearchConfig(perm_budget=args.budget)
    report = rank_report(A, config)
    verdicts = report.to_json()
    factors = verdicts.pop("factors", [])
    return {"verdicts": verdicts, "certificates": {"factors": factors}}


def cmd_positivity(args, inputs, artifacts):
    A = TropicalMatrix.from_json(inputs.text(args.matrix))
    if args.signs:
        s = SignPattern.from_json(inputs.text(args.signs))
        cert = signed_prevariety_member(A, s, args.rank, args.budget)
    else:
        cert = positive_prevariety_member(A, args.rank, args.budget)
    return {"verdicts": {"verdict": cert.verdict}, "certificates": cert.to_json()}


def cmd_cartoon(args, inputs, artifacts):
    sigma, pi = _parse_perm(args.sigma, args.n), _parse_perm(args.pi, args.n)
    inputs.note(f"{sigma.one_line()}|{pi.one_line()}")
    if len(sigma) != args.n or len(pi) != args.n:
        raise DimensionError(f"permutations must have size {args.n}")
    edge = is_birkhoff_edge(sigma, pi)
    verdicts = {"birkhoff_edge": edge}
    certificates = {}
    if edge:
        cartoon = cartoon_of_edge(sigma, pi)
        verdicts["edge_positive"] = birkhoff_edge_positive(sigma, pi)
        verdicts["marked_triangle"] = cartoon_has_marked_triangle(cartoon)
        verdicts["criterion_agrees"] = verdicts["marked_triangle"] != verdicts["edge_positive"]
        certificates = {"cartoon": cartoon.to_json(), "signs": [perm_sign(sigma), perm_sign(pi)]}
        _write_artifact(args.out_dir, "cartoon.dot", cartoon.to_dot(), artifacts)
    return {"verdicts": verdicts, "certificates": certificates}


def _orthant_summary(n, signs):
    oc = orthant_coloring(n, SignPattern.of(signs))
    holds, comps = verify_cut_property(oc)
    return {
        "signs": [list(r) for r in signs],
        "cut_property": holds,
        "green_edges": len(oc.green_edges),
        "red_edges": len(oc.red_edges),
        "component_sizes": [len(c) for c in comps],
    }


def _all_patterns(n):
    for bits in itertools.product((1, -1), repeat=n * n):
        yield tuple(tuple(bits[i * n:(i + 1) * n]) for i in range(n))


def cmd_orthants(args, inputs, artifacts):
    n = args.n
    if args.all:
        total = 2 ** (n * n)
        if total > args.orthant_budget:
            raise BudgetExceeded(f"--all needs {total} colorings, above the budget {args.orthant_budget}")
        orthant_coloring(n)  # validates n against the Birkhoff graph bound before fanning out
        patterns = list(_all_patterns(n))
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_orthant_summary, itertools.repeat(n), patterns, chunksize=64))
        else:
            rows = [_orthant_summary(n, p) for p in patterns]
        failures = [r["signs"] for r in rows if not r["cut_property"]]
        return {
            "verdicts": {"patterns": total, "cut_property_everywhere": not failures},
            "certificates": {"failures": failures},
        }
    s = SignPattern.from_json(inputs.text(args.signs)) if args.signs else SignPattern.ones(n, n)
    oc = orthant_coloring(n, s)
    holds, comps = verify_cut_property(oc)
    _write_artifact(args.out_dir, "orthants.dot", oc.to_dot(), artifacts)
    return {
        "verdicts": {"cut_property": holds, "components": len(comps)},
        "certificates": {
            "green_edges": len(oc.green_edges),
            "red_edges": len(oc.red_edges),
            "components": [[str(p) for p in c] for c in comps],
        },
    }


def cmd_tree(args, inputs, artifacts):
    A = TropicalMatrix.from_json(inputs.text(args.matrix))
    tree = bicolored_tree_from_matrix(A)
    _write_artifact(args.out_dir, "tree.dot", tree.to_dot(), artifacts)
    _write_artifact(args.out_dir, "tree.json", json.dumps(tree.to_json(), sort_keys=True, indent=2) + "\n", artifacts)
    return {
        "verdicts": {"caterpillar": is_caterpillar(tree), "maximal": tree.is_maximal()},
        "certificates": {"tree": tree.to_json()},
    }


def cmd_label(args, inputs, artifacts):
    A = TropicalMatrix.from_json(inputs.text(args.matrix))
    label = label_graph(A, args.rank, args.budget)
    parity = label_positivity_necessary(label, args.rank)
    verdicts = {"degree_check": label_degree_check(label, args.rank), "parity_check": parity.holds}
    if args.rank == 2:
        verdicts["rank2_positive_label"] = rank2_label_is_positive(label)
    _write_artifact(args.out_dir, "label.dot", label.to_dot(), artifacts)
    return {
        "verdicts": verdicts,
        "certificates": {
            "label": label.to_json(),
            "complement": bipartite_complement(label).to_json(),
            "parity_violation": parity.violation.to_json() if parity.violation else None,
        },
    }


def cmd_plucker(args, inputs, artifacts):
    if args.action == "from-tree":
        tree = PhyloTree.from_json(inputs.text(args.path))
        p = plucker_from_tree(tree)
        back = tree_from_plucker(p)
        return {
            "verdicts": {"round_trip": back == tree, "four_point": four_point_check(p)},
            "certificates": {"plucker": p.to_json()},
        }
    p = PlueckerVector.from_json(inputs.text(args.path))
    if args.action == "check":
        ok = four_point_check(p)
        certificates = {}
        if ok:
            tree = tree_from_plucker(p)
            certificates["tree"] = tree.to_json()
            _write_artifact(args.out_dir, "plucker_tree.dot", tree.to_dot(), artifacts)
        return {"verdicts": {"four_point": ok}, "certificates": certificates}
    if not args.red:
        raise InputFormatError("plucker project needs --red")
    reds = [int(x) for x in args.red.split(",") if x.strip()]
    inputs.note(",".join(map(str, reds)))
    coloring = Bicoloring.of(reds, p.m)
    M = project_plucker(p, coloring)
    expected = bicolored_reading(tree_from_plucker(p), coloring)
    recovered = bicolored_tree_from_matrix(M)
    return {
        "verdicts": {"round_trip": recovered == expected},
        "certificates": {"matrix": M.to_json(), "coloring": coloring.to_json(), "tree": recovered.to_json()},
    }


def cmd_arrangement(args, inputs, artifacts):
    A = TropicalMatrix.from_json(inputs.text(args.matrix))
    if args.plane:
        plane = TropicalPlaneDescription.from_json(inputs.text(args.plane))
        report = arrangement_from_plane(A, plane)
        body = report.to_json()
        trees = report.trees
        cert = certify_nonpositive_rank3(A, plane) if A.rows >= 4 and A.cols >= 4 else None
    else:
        raw = inputs.json(args.jmap)
        try:
            jmap = {int(k): [int(j) for j in v] for k, v in raw.items()}
        except (AttributeError, TypeError, ValueError):
            raise InputFormatError("jmap JSON must map facet numbers to column lists") from None
        trees = tuple(tree_arrangement(A, jmap))
        body = {"jmap": {str(k): v for k, v in sorted(jmap.items())}, "trees": [t.to_json() for t in trees],
                "all_caterpillars": all(t.is_caterpillar for t in trees)}
        cert = None
    for t in trees:
        _write_artifact(args.out_dir, f"facet_{t.facet}.dot", t.tree.to_dot(), artifacts)
    verdicts = {"all_caterpillars": body["all_caterpillars"], "starship": body.get("starship") is not None}
    if cert is not None:
        verdicts["rank3_verdict"] = cert.verdict
    return {"verdicts": verdicts, "certificates": {"arrangement": body,
                                                  "positivity": cert.to_json() if cert else None}}


def cmd_verify_examples(args, inputs, artifacts):
    results = run_all()
    return {
        "verdicts": {"all_passed": all(r.passed for r in results), "checks": len(results)},
        "certificates": {"checks": [r.to_json() for r in results]},
    }


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_PERM_BUDGET,
                        help="permutation enumeration budget per minor (default 8!)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for parallel sweeps")
    common.add_argument("--out-dir", default=None, help="directory for DOT/JSON artifacts")

    parser = argparse.ArgumentParser(prog="tropdet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tropdet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common], help="tropical, Kapranov and Barvinok ranks")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("positivity", parents=[common], help="positive or signed prevariety certificate")
    p.add_argument("matrix")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--signs")
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("cartoon", parents=[common], help="cartoon and triangle verdict of a Birkhoff edge")
    p.add_argument("--sigma", required=True)
    p.add_argument("--pi", required=True)
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_cartoon)

    p = sub.add_parser("orthants", parents=[common], help="orthant coloring of the Birkhoff graph")
    p.add_argument("-n", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--signs")
    group.add_argument("--all", action="store_true", help="sweep all 2^(n*n) sign patterns")
    p.add_argument("--orthant-budget", type=int, default=DEFAULT_ORTHANT_BUDGET,
                   help="largest number of patterns --all may visit")
    p.set_defaults(func=cmd_orthants)

    p = sub.add_parser("tree", parents=[common], help="bicolored tree of a rank-2 matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("label", parents=[common], help="bipartite label and its tests")
    p.add_argument("matrix")
    p.add_argument("--rank", type=int, required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("plucker", parents=[common], help="Plücker vectors and their projections")
    p.add_argument("action", choices=["project", "check", "from-tree"])
    p.add_argument("path")
    p.add_argument("--red", help="comma-separated red leaves for project")
    p.set_defaults(func=cmd_plucker)

    p = sub.add_parser("arrangement", parents=[common], help="marked faces, starship and facet trees")
    p.add_argument("matrix")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--plane")
    group.add_argument("--jmap")
    p.set_defaults(func=cmd_arrangement)

    p = sub.add_parser("verify-paper", parents=[common], help="re-run every bundled worked example")
    p.set_defaults(func=cmd_verify_examples)
    return parser


def _args_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out_dir", "jobs", "command")}


def run(argv=None):
    """Return (exit_code, report dict)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = _Inputs()
    artifacts = []
    report = {"command": args.command, "args": _args_echo(args)}
    try:
        if args.budget < 1 or args.jobs < 1:
            raise InputFormatError("--budget and --jobs must be positive")
        body = args.func(args, inputs, artifacts)
    except TropdetError as exc:
        report.update(exc.to_json())
        report["input_digest"] = inputs.digest.hexdigest()
        return exc.exit_code, report
    report["input_digest"] = inputs.digest.hexdigest()
    report.update(body)
    report["artifacts"] = artifacts
    code = 0
    if args.command == "verify-paper" and not body["verdicts"]["all_passed"]:
        code = 1
    return code, report


def main(argv=None) -> int:
    code, report = run(argv)
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
