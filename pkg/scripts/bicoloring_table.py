"""Admissible bicoloring counts for every maximal tree shape, closed form against enumeration."""

from __future__ import annotations

import argparse
import itertools
import json
from dataclasses import asdict, dataclass

from tropdet.generators import all_topologies
from tropdet.tree_space import Bicoloring, PhyloTree, admissible_bicoloring, count_bicolorings, elementary_splits


@dataclass(frozen=True)
class TableConfig:
    max_leaves: int = 9


def table(config: TableConfig) -> list:
    rows = []
    for m in range(4, config.max_leaves + 1):
        for shape in all_topologies(m):
            tree = PhyloTree.build(m, {frozenset(s): 1 for s in shape})
            for d in range(1, m):
                brute = sum(1 for reds in itertools.combinations(range(1, m + 1), d)
                            if admissible_bicoloring(tree, Bicoloring.of(reds, m)))
                rows.append({"m": m, "cherries": len(elementary_splits(tree)), "d": d,
                             "formula": count_bicolorings(tree, d, m - d), "enumerated": brute})
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-leaves", type=int, default=9)
    args = parser.parse_args()
    rows = table(TableConfig(args.max_leaves))
    mismatches = [r for r in rows if r["formula"] != r["enumerated"]]
    print(json.dumps({"rows": len(rows), "mismatches": mismatches}, indent=2))


if __name__ == "__main__":
    main()
