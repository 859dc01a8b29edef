"""Tabulate Birkhoff edges by cycle length: edge positivity against the marked-triangle test."""

from __future__ import annotations

import argparse
import json
from collections import Counter
from dataclasses import asdict, dataclass

from tropdet.birkhoff_positivity import birkhoff_edge_positive, birkhoff_graph, cartoon_has_marked_triangle, cartoon_of_edge
from tropdet.semiring_core import Permutation


@dataclass(frozen=True)
class SweepConfig:
    sizes: tuple = (3, 4, 5)


def cycle_length(sigma: Permutation, pi: Permutation) -> int:
    q = sigma.compose(pi.inverse()).images
    return sum(1 for i, x in enumerate(q) if x != i)


def sweep(config: SweepConfig) -> dict:
    out = {}
    for n in config.sizes:
        verts, edges = birkhoff_graph(n)
        table = Counter()
        for a, b in edges:
            sigma, pi = Permutation(verts[a]), Permutation(verts[b])
            key = (cycle_length(sigma, pi), birkhoff_edge_positive(sigma, pi),
                   cartoon_has_marked_triangle(cartoon_of_edge(sigma, pi)))
            table[key] += 1
        out[n] = [{"cycle": c, "positive": p, "triangle": t, "edges": k} for (c, p, t), k in sorted(table.items())]
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 5])
    args = parser.parse_args()
    config = SweepConfig(tuple(args.sizes))
    print(json.dumps({"config": asdict(config), "table": sweep(config)}, indent=2))


if __name__ == "__main__":
    main()
