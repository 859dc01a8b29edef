"""Joint distribution of tropical and Barvinok rank on random integer matrices."""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass

from tropdet.generators import random_matrix
from tropdet.rank_engine import rank_report


@dataclass(frozen=True)
class ChainConfig:
    rows: int = 4
    cols: int = 4
    max_entry: int = 4
    samples: int = 300
    seed: int = 0


def sweep(config: ChainConfig) -> dict:
    rng = random.Random(config.seed)
    table = Counter()
    for _ in range(config.samples):
        rep = rank_report(random_matrix(rng, config.rows, config.cols, config.max_entry))
        table[(rep.tropical_rank, rep.barvinok_rank, rep.kapranov_exact)] += 1
    return {f"trop={t} barvinok={b} kapranov_exact={e}": k for (t, b, e), k in sorted(table.items())}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(ChainConfig()).items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    config = ChainConfig(**vars(parser.parse_args()))
    print(json.dumps({"config": asdict(config), "table": sweep(config)}, indent=2))


if __name__ == "__main__":
    main()
