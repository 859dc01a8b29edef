"""Seeded random instances shared by the tests, the acceptance suite and the scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .semiring_core import Permutation, SignPattern, TropicalMatrix
from .tree_space import BicoloredTree, PhyloTree, Split, bicolored_leaves, green, is_bicolored, red


@dataclass(frozen=True)
class InstanceConfig:
    seed: int = 0
    max_rows: int = 5
    max_cols: int = 6
    max_entry: int = 6
    max_denominator: int = 8


def random_rational(rng: random.Random, max_denominator: int, low=1, high=6) -> Fraction:
    q = rng.randint(1, max_denominator)
    return Fraction(rng.randint(low * q, high * q), q)


def random_matrix(rng: random.Random, d, n, max_entry=6) -> TropicalMatrix:
    return TropicalMatrix.of([[rng.randint(0, max_entry) for _ in range(n)] for _ in range(d)])


def random_factors(rng: random.Random, d, n, k, max_entry=6):
    X = TropicalMatrix.of([[rng.randint(0, max_entry) for _ in range(k)] for _ in range(d)])
    Y = TropicalMatrix.of([[rng.randint(0, max_entry) for _ in range(n)] for _ in range(k)])
    return X, Y


def random_sign_pattern(rng: random.Random, d, n) -> SignPattern:
    return SignPattern.of([[rng.choice((1, -1)) for _ in range(n)] for _ in range(d)])


def random_permutation(rng: random.Random, n) -> Permutation:
    images = list(range(n))
    rng.shuffle(images)
    return Permutation(tuple(images))


# ----------------------------------------------------------- tree shapes


def _insert_leaf(edges, edge_index, leaf, new_node):
    u, v = edges[edge_index]
    return edges[:edge_index] + edges[edge_index + 1:] + [(u, new_node), (new_node, v), (new_node, leaf)]


def _splits_of(edges, m):
    """Leaf sets (1..m) on one side of every internal edge."""
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    out = []
    for u, v in edges:
        if u <= m or v <= m:
            continue
        seen, stack, leaves = {u, v}, [v], set()
        while stack:
            x = stack.pop()
            if x <= m:
                leaves.add(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(frozenset(leaves))
    return out


def random_topology(rng: random.Random, m) -> list:
    """Splits of a uniformly random maximal tree on leaves 1..m (internal nodes numbered above m)."""
    if m < 3:
        return []
    center = m + 1
    edges = [(center, 1), (center, 2), (center, 3)]
    nxt = m + 2
    for leaf in range(4, m + 1):
        edges = _insert_leaf(edges, rng.randrange(len(edges)), leaf, nxt)
        nxt += 1
    return _splits_of(edges, m)


def all_labeled_topologies(m):
    """Every maximal tree on leaves 1..m, as lists of splits; (2m-5)!! of them."""
    if m < 3:
        yield []
        return
    start = [(m + 1, 1), (m + 1, 2), (m + 1, 3)]

    def grow(edges, leaf, nxt):
        if leaf > m:
            yield edges
            return
        for k in range(len(edges)):
            yield from grow(_insert_leaf(edges, k, leaf, nxt), leaf + 1, nxt + 1)

    for edges in grow(start, 4, m + 2):
        yield _splits_of(edges, m)


def _shape_code(splits, m):
    """Canonical string of the unlabeled unrooted tree: minimal AHU encoding over internal roots."""
    everyone = frozenset(range(2, m + 1))
    clusters = {s if 1 not in s else frozenset(range(1, m + 1)) - s for s in splits}
    clusters |= {frozenset([x]) for x in everyone} | {everyone}
    ordered = sorted(clusters, key=len)
    adj = {c: set() for c in ordered}
    adj["leaf1"] = {everyone}
    adj[everyone].add("leaf1")
    for idx, c in enumerate(ordered):
        up = next((p for p in ordered[idx + 1:] if c < p), None)
        if up is not None:
            adj[c].add(up)
            adj[up].add(c)

    def encode(v, came):
        return "(" + "".join(sorted(encode(w, v) for w in adj[v] if w != came)) + ")"

    return min(encode(v, None) for v in adj if len(adj[v]) > 1)


def all_topologies(m):
    """One representative split system per unlabeled maximal tree shape on m leaves."""
    seen = {}
    for splits in all_labeled_topologies(m):
        seen.setdefault(_shape_code(splits, m), splits)
    return [seen[k] for k in sorted(seen)]


def random_phylo_tree(rng: random.Random, m, max_denominator=8, keep=1.0, leaf_lengths=True) -> PhyloTree:
    splits = [s for s in random_topology(rng, m) if rng.random() < keep]
    weights = {s: random_rational(rng, max_denominator) for s in splits}
    lengths = [random_rational(rng, max_denominator, 0, 3) if leaf_lengths else 0 for _ in range(m)]
    return PhyloTree.build(m, weights, lengths)


# ------------------------------------------------------ bicolored trees


def random_bicolored_tree(rng: random.Random, d, n, max_denominator=8, keep=1.0) -> BicoloredTree:
    """Random maximal shape, random leaf coloring; keeps the bicolored splits only."""
    m = d + n
    order = list(bicolored_leaves(d, n))
    rng.shuffle(order)
    leaves = bicolored_leaves(d, n)
    weights = {}
    for s in random_topology(rng, m):
        split = Split.of([order[x - 1] for x in s], leaves)
        if is_bicolored(split) and rng.random() < keep:
            weights[split] = random_rational(rng, max_denominator)
    return BicoloredTree.build(d, n, weights)


def snowflake_tree(rng: random.Random, d, n, max_denominator=8) -> BicoloredTree:
    """Three cherries r_a g_a around a central node, remaining leaves pendant at the center."""
    if d < 3 or n < 3:
        raise ValueError("a bicolored snowflake needs d, n >= 3")
    rows = rng.sample(range(1, d + 1), 3)
    cols = rng.sample(range(1, n + 1), 3)
    leaves = bicolored_leaves(d, n)
    weights = {Split.of([red(i), green(j)], leaves): random_rational(rng, max_denominator)
               for i, j in zip(rows, cols)}
    return BicoloredTree.build(d, n, weights)


def matrix_of_tree(tree: BicoloredTree, rng: random.Random | None = None, shift=4) -> TropicalMatrix:
    """Negated cross distances, plus a random lineality shift when ``rng`` is given."""
    grid = [[-x for x in row] for row in tree.cross_distances()]
    if rng is not None:
        rs = [rng.randint(-shift, shift) for _ in range(tree.d)]
        cs = [rng.randint(-shift, shift) for _ in range(tree.n)]
        grid = [[x + rs[i] + cs[j] for j, x in enumerate(row)] for i, row in enumerate(grid)]
    return TropicalMatrix.of(grid)


def caterpillar_tree(rng: random.Random, d, n, max_denominator=8) -> BicoloredTree:
    """A maximal bicolored caterpillar; requires d, n >= 2."""
    leaves = bicolored_leaves(d, n)
    for _ in range(10_000):
        order = list(leaves)
        rng.shuffle(order)
        prefixes = [frozenset(order[:k]) for k in range(2, len(order) - 1)]
        splits = [Split.of(p, leaves) for p in prefixes]
        if all(is_bicolored(s) for s in splits):
            return BicoloredTree.build(d, n, {s: random_rational(rng, max_denominator) for s in splits})
    raise RuntimeError("no bicolored caterpillar ordering found")
