"""Random sign patterns: how often red edges split the Birkhoff graph into exactly two parts."""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass

from tropdet.birkhoff_positivity import birkhoff_graph, orthant_coloring, verify_cut_property, vertex_signs
from tropdet.generators import random_sign_pattern


@dataclass(frozen=True)
class SweepConfig:
    n: int = 4
    samples: int = 500
    seed: int = 0


def sweep(config: SweepConfig) -> dict:
    rng = random.Random(config.seed)
    _, edges = birkhoff_graph(config.n)
    shapes, green_is_cut, examples = Counter(), 0, []
    for _ in range(config.samples):
        s = random_sign_pattern(rng, config.n, config.n)
        oc = orthant_coloring(config.n, s)
        holds, comps = verify_cut_property(oc)
        signs = vertex_signs(config.n, s)
        green_is_cut += set(oc.green_edges) == {e for e in edges if signs[e[0]] != signs[e[1]]}
        shape = tuple(sorted((len(c) for c in comps), reverse=True))
        shapes[shape] += 1
        if not holds and len(examples) < 3:
            examples.append({"signs": [list(r) for r in s.signs], "component_sizes": list(shape)})
    return {
        "two_components": sum(k for shape, k in shapes.items() if len(shape) == 2),
        "green_equals_sign_cut": green_is_cut,
        "component_shapes": {",".join(map(str, shape)): k for shape, k in sorted(shapes.items())},
        "examples": examples,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-n", type=int, default=4)
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    config = SweepConfig(args.n, args.samples, args.seed)
    print(json.dumps({"config": asdict(config), "result": sweep(config)}, indent=2))


if __name__ == "__main__":
    main()
