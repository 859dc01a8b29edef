"""Bicolored phylogenetic trees, splits and Plücker vectors in rank 2.

Leaves of a bicolored tree are labelled ``r1..rd`` (rows) and ``g1..gn``
(columns). Uncolored trees use the integers ``1..m``. Internally a leaf set
is a bitmask over a fixed leaf order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .errors import ConsistencyError, DimensionError, InputFormatError, NotInPrevariety, PreconditionError
from .semiring_core import (
    TropicalMatrix,
    canonicalize_mod_lineality,
    first_nonsingular_minor,
    load_json_text,
    parse_rational,
    rational_str,
)

MAX_LEAVES = 14


# ------------------------------------------------------------------ leaves


def red(i) -> str:
    return f"r{i}"


def green(j) -> str:
    return f"g{j}"


def leaf_key(label):
    """Ordering used for canonical split parts: greens before reds, then by index."""
    if isinstance(label, int):
        return (0, label)
    color, idx = label[0], int(label[1:])
    return (0 if color == "g" else 1, idx)


def bicolored_leaves(d, n) -> tuple:
    return tuple(red(i) for i in range(1, d + 1)) + tuple(green(j) for j in range(1, n + 1))


def _parse_leaf(label, universe):
    if label not in universe:
        raise InputFormatError(f"unknown leaf {label!r}")
    return label


# ------------------------------------------------------------------ splits


@dataclass(frozen=True)
class Split:
    """An unordered bipartition stored by its canonical side.

    The canonical side is the smaller part; on ties, the part whose sorted
    leaf keys are lexicographically smaller.
    """

    part: frozenset
    rest: frozenset

    @classmethod
    def of(cls, part, universe) -> "Split":
        part = frozenset(part)
        universe = frozenset(universe)
        if not part <= universe:
            raise InputFormatError(f"split part {sorted(part, key=leaf_key)} is not inside the leaf set")
        rest = universe - part
        if not part or not rest:
            raise InputFormatError("both sides of a split must be nonempty")
        a = (len(part), sorted(leaf_key(x) for x in part))
        b = (len(rest), sorted(leaf_key(x) for x in rest))
        return cls(part, rest) if a <= b else cls(rest, part)

    @property
    def sides(self):
        return self.part, self.rest

    def separates(self, a, b) -> bool:
        return (a in self.part) != (b in self.part)

    def sort_key(self):
        return (len(self.part), sorted(leaf_key(x) for x in self.part))

    def labels(self) -> list:
        return sorted(self.part, key=leaf_key)

    def __str__(self):
        return "".join(str(x) for x in self.labels()) + "|" + "".join(
            str(x) for x in sorted(self.rest, key=leaf_key)
        )


def splits_compatible(s1: Split, s2: Split) -> bool:
    a, ac = s1.sides
    b, bc = s2.sides
    return a <= b or a <= bc or b <= ac or ac <= bc


def is_bicolored(split: Split) -> bool:
    def both(side):
        colors = {x[0] for x in side}
        return colors == {"r", "g"}

    return all(isinstance(x, str) for x in split.part | split.rest) and both(split.part) and both(split.rest)


def _check_compatible(splits):
    for s1, s2 in itertools.combinations(splits, 2):
        if not splits_compatible(s1, s2):
            raise PreconditionError(f"splits {s1} and {s2} are incompatible")


def is_caterpillar_splits(splits, universe) -> bool:
    """Assemble the tree from a compatible split system and bound internal degrees by two."""
    universe = sorted(universe, key=leaf_key)
    if not splits:
        return True
    root = universe[0]
    clusters = sorted({s.rest if root in s.part else s.part for s in splits}, key=len)
    children = {c: 0 for c in clusters}
    top_children = 0
    for idx, c in enumerate(clusters):
        parent = next((p for p in clusters[idx + 1 :] if c < p), None)
        if parent is None:
            top_children += 1
        else:
            children[parent] += 1
    if top_children > 2:
        return False
    return all(1 + k <= 2 for k in children.values())


# -------------------------------------------------------- bicolored trees


@dataclass(frozen=True)
class BicoloredTree:
    d: int
    n: int
    weighted_splits: tuple  # ((Split, Fraction), ...) sorted canonically

    @classmethod
    def build(cls, d, n, weights: Mapping[Split, Fraction]) -> "BicoloredTree":
        items = sorted(weights.items(), key=lambda kv: kv[0].sort_key())
        tree = cls(d, n, tuple((s, Fraction(w)) for s, w in items))
        tree.validate()
        return tree

    def validate(self):
        leaves = frozenset(self.leaves)
        for s, w in self.weighted_splits:
            if s.part | s.rest != leaves:
                raise InputFormatError(f"split {s} is not over the leaves of a {self.d}x{self.n} tree")
            if not is_bicolored(s):
                raise PreconditionError(f"split {s} is not bicolored")
            if w <= 0:
                raise PreconditionError(f"split {s} has non-positive weight {w}")
        _check_compatible(self.splits)
        if len(self.weighted_splits) > max(self.d + self.n - 3, 0):
            raise PreconditionError("too many splits for a tree on these leaves")

    @property
    def leaves(self) -> tuple:
        return bicolored_leaves(self.d, self.n)

    @property
    def splits(self) -> list:
        return [s for s, _ in self.weighted_splits]

    @property
    def weights(self) -> dict:
        return dict(self.weighted_splits)

    def is_maximal(self) -> bool:
        return len(self.weighted_splits) == self.d + self.n - 3

    def cross_distances(self) -> list:
        """Path lengths between red and green leaves, without pendant edges."""
        return [
            [sum((w for s, w in self.weighted_splits if s.separates(red(i), green(j))), Fraction(0))
             for j in range(1, self.n + 1)]
            for i in range(1, self.d + 1)
        ]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "splits": [{"part": s.labels(), "weight": rational_str(w)} for s, w in self.weighted_splits],
        }

    @classmethod
    def from_json(cls, data) -> "BicoloredTree":
        if isinstance(data, str):
            data = load_json_text(data)
        try:
            d, n = int(data["d"]), int(data["n"])
            leaves = bicolored_leaves(d, n)
            weights = {}
            for entry in data["splits"]:
                split = Split.of([_parse_leaf(x, leaves) for x in entry["part"]], leaves)
                weights[split] = parse_rational(entry["weight"])
        except (KeyError, TypeError) as exc:
            raise InputFormatError(f"malformed tree JSON: {exc}") from None
        return cls.build(d, n, weights)

    def to_dot(self) -> str:
        return _tree_dot(self.leaves, self.weighted_splits, colored=True)


def _tree_dot(leaves, weighted_splits, colored) -> str:
    """DOT drawing assembled from the split system (root at the first leaf)."""
    leaves = sorted(leaves, key=leaf_key)
    root = leaves[0]
    clusters = sorted(
        {(s.rest if root in s.part else s.part): w for s, w in weighted_splits}.items(),
        key=lambda kv: (len(kv[0]), sorted(leaf_key(x) for x in kv[0])),
    )
    lines = ["graph tree {", "  node [shape=circle, label=\"\", width=0.15];"]
    names = {c: f"v{k}" for k, (c, _) in enumerate(clusters)}

    def parent_of(c):
        for p, _ in clusters:
            if c < p:
                return names[p]
        return "top"

    lines.append("  top;")
    for c, w in clusters:
        lines.append(f"  {names[c]};")
        lines.append(f"  {names[c]} -- {parent_of(c)} [label=\"{rational_str(w)}\"];")
    for leaf in leaves:
        attrs = f"shape=box, label=\"{leaf}\""
        if colored:
            attrs += ", color=" + ("red" if str(leaf).startswith("r") else "green")
        lines.append(f"  \"{leaf}\" [{attrs}];")
        home = "top"
        if leaf != root:
            home = parent_of(frozenset([leaf]))
        lines.append(f"  \"{leaf}\" -- {home};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def split_weight(canon: TropicalMatrix, split: Split) -> Fraction:
    """Half the minimum straddling quartet value of ``split`` on a canonical matrix."""
    if not is_bicolored(split):
        raise PreconditionError(f"split {split} is not bicolored")
    d, n = canon.rows, canon.cols
    if split.part | split.rest != frozenset(bicolored_leaves(d, n)):
        raise DimensionError(f"split {split} does not match a {d}x{n} matrix")
    side = split.part
    ru = [i for i in range(d) if red(i + 1) in side]
    gu = [j for j in range(n) if green(j + 1) in side]
    rc = [i for i in range(d) if red(i + 1) not in side]
    gc = [j for j in range(n) if green(j + 1) not in side]
    return Fraction(_quartet_min(canon.int_grid, ru, gu, rc, gc, None), 2 * canon.scale)


def _quartet_min(a, ru, gu, rc, gc, floor):
    """min of a[i][j] + a[k][l] - a[i][l] - a[k][j]; stops early once at or below ``floor``."""
    best = None
    for i in ru:
        ai = a[i]
        for k in rc:
            ak = a[k]
            for j in gu:
                base = ai[j] - ak[j]
                for l in gc:
                    v = base + ak[l] - ai[l]
                    if best is None or v < best:
                        best = v
                        if floor is not None and best <= floor:
                            return best
    return best


def bicolored_tree_from_matrix(A: TropicalMatrix) -> BicoloredTree:
    d, n = A.rows, A.cols
    if d + n > MAX_LEAVES:
        raise PreconditionError(f"d+n = {d + n} exceeds the supported limit {MAX_LEAVES}")
    witness = first_nonsingular_minor(A, 3)
    if witness is not None:
        raise NotInPrevariety(f"tropical rank exceeds 2: minor {witness} is nonsingular")
    canon = canonicalize_mod_lineality(A)
    grid = canon.int_grid
    m = d + n
    red_mask = (1 << d) - 1
    green_mask = ((1 << m) - 1) ^ red_mask
    full = (1 << m) - 1
    accepted = []  # (mask, value)
    # subsets containing leaf 0 (r1), smallest other side first
    candidates = []
    for rest in range(1 << (m - 1)):
        mask = (rest << 1) | 1
        other = full ^ mask
        if not (mask & red_mask and mask & green_mask and other & red_mask and other & green_mask):
            continue
        candidates.append((min(mask.bit_count(), other.bit_count()), mask))
    candidates.sort()
    for _, mask in candidates:
        other = full ^ mask
        if any(not _masks_compatible(mask, acc, full) for acc, _ in accepted):
            continue
        ru = [i for i in range(d) if mask >> i & 1]
        rc = [i for i in range(d) if other >> i & 1]
        gu = [j for j in range(n) if mask >> (d + j) & 1]
        gc = [j for j in range(n) if other >> (d + j) & 1]
        value = _quartet_min(grid, ru, gu, rc, gc, 0)
        if value > 0:
            accepted.append((mask, value))
    leaves = bicolored_leaves(d, n)
    weights = {}
    for mask, value in accepted:
        part = [leaves[b] for b in range(m) if mask >> b & 1]
        weights[Split.of(part, leaves)] = Fraction(value, 2 * canon.scale)
    tree = BicoloredTree.build(d, n, weights)
    rebuilt = TropicalMatrix.of([[-x for x in row] for row in tree.cross_distances()])
    if canonicalize_mod_lineality(rebuilt) != canon:
        raise ConsistencyError("reconstructed tree does not reproduce the matrix modulo lineality")
    return tree


def _masks_compatible(a, b, full) -> bool:
    ac, bc = full ^ a, full ^ b
    return not (a & b and a & bc and ac & b and ac & bc)


def is_caterpillar(tree: BicoloredTree) -> bool:
    return is_caterpillar_splits(tree.splits, tree.leaves)


def positivity_rank2(A: TropicalMatrix) -> bool:
    return is_caterpillar(bicolored_tree_from_matrix(A))


def split_matrix(split: Split, weight, d, n) -> TropicalMatrix:
    """Matrix of a single bicolored split: -weight where row and column sit on opposite sides."""
    if not is_bicolored(split):
        raise PreconditionError(f"split {split} is not bicolored")
    lam = parse_rational(weight)
    side = split.part
    return TropicalMatrix.of(
        [[-lam if (red(i) in side) != (green(j) in side) else 0 for j in range(1, n + 1)]
         for i in range(1, d + 1)]
    )


# ---------------------------------------------------------- Plücker side


@dataclass(frozen=True)
class PlueckerVector:
    m: int
    coords: tuple  # ((i, j), Fraction) for 1 <= i < j <= m, lexicographic

    @classmethod
    def build(cls, m, values: Mapping) -> "PlueckerVector":
        pairs = list(itertools.combinations(range(1, m + 1), 2))
        allowed = set(pairs)
        norm = {}
        for (i, j), v in values.items():
            key = (min(i, j), max(i, j))
            if key not in allowed or key in norm:
                raise InputFormatError(f"bad or repeated Plücker coordinate {i},{j} for m={m}")
            norm[key] = parse_rational(v)
        missing = [p for p in pairs if p not in norm]
        if missing:
            raise InputFormatError(f"missing Plücker coordinates {missing[:3]}")
        return cls(m, tuple((p, norm[p]) for p in pairs))

    @classmethod
    def from_sequence(cls, m, values: Sequence) -> "PlueckerVector":
        pairs = list(itertools.combinations(range(1, m + 1), 2))
        if len(values) != len(pairs):
            raise DimensionError(f"expected {len(pairs)} coordinates for m={m}")
        return cls.build(m, dict(zip(pairs, values)))

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            return Fraction(0)
        return self._lookup[(min(i, j), max(i, j))]

    @cached_property
    def _lookup(self):
        return dict(self.coords)

    def values(self) -> list:
        return [v for _, v in self.coords]

    def to_json(self) -> dict:
        return {"m": self.m, "coords": {f"{i},{j}": rational_str(v) for (i, j), v in self.coords}}

    @classmethod
    def from_json(cls, data) -> "PlueckerVector":
        if isinstance(data, str):
            data = load_json_text(data)
        try:
            m = int(data["m"])
            values = {}
            for key, v in data["coords"].items():
                i, j = (int(t) for t in key.split(","))
                values[(i, j)] = v
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputFormatError(f"malformed Plücker JSON: {exc}") from None
        return cls.build(m, values)


def four_point_check(p: PlueckerVector) -> bool:
    for i, j, k, l in itertools.combinations(range(1, p.m + 1), 4):
        sums = sorted((p[i, j] + p[k, l], p[i, l] + p[j, k], p[i, k] + p[j, l]))
        if sums[0] != sums[1]:
            return False
    return True


@dataclass(frozen=True)
class PhyloTree:
    """Weighted split system on leaves 1..m with pendant lengths."""

    m: int
    weighted_splits: tuple
    leaf_lengths: tuple

    @classmethod
    def build(cls, m, weights: Mapping, leaf_lengths=None) -> "PhyloTree":
        universe = range(1, m + 1)
        norm = {}
        for s, w in weights.items():
            split = s if isinstance(s, Split) else Split.of(s, universe)
            if split.part | split.rest != frozenset(universe):
                raise InputFormatError(f"split {split} is not over leaves 1..{m}")
            if len(split.part) < 2:
                raise PreconditionError(f"split {split} is trivial; use leaf lengths instead")
            w = parse_rational(w)
            if w <= 0:
                raise PreconditionError(f"split {split} has non-positive weight")
            norm[split] = w
        _check_compatible(list(norm))
        if leaf_lengths is None:
            leaf_lengths = [0] * m
        if len(leaf_lengths) != m:
            raise DimensionError(f"need {m} leaf lengths")
        items = sorted(norm.items(), key=lambda kv: kv[0].sort_key())
        return cls(m, tuple(items), tuple(parse_rational(x) for x in leaf_lengths))

    @property
    def splits(self) -> list:
        return [s for s, _ in self.weighted_splits]

    @property
    def leaves(self):
        return tuple(range(1, self.m + 1))

    def is_maximal(self) -> bool:
        return len(self.weighted_splits) == self.m - 3

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "splits": [{"part": s.labels(), "weight": rational_str(w)} for s, w in self.weighted_splits],
            "leaf_lengths": [rational_str(x) for x in self.leaf_lengths],
        }

    @classmethod
    def from_json(cls, data) -> "PhyloTree":
        if isinstance(data, str):
            data = load_json_text(data)
        try:
            m = int(data["m"])
            weights = {frozenset(int(x) for x in e["part"]): e["weight"] for e in data.get("splits", [])}
            lengths = data.get("leaf_lengths")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"malformed tree JSON: {exc}") from None
        return cls.build(m, weights, lengths)

    def to_dot(self) -> str:
        return _tree_dot(self.leaves, self.weighted_splits, colored=False)


def plucker_from_tree(tree: PhyloTree) -> PlueckerVector:
    values = {}
    for i, j in itertools.combinations(range(1, tree.m + 1), 2):
        dist = sum((w for s, w in tree.weighted_splits if s.separates(i, j)), Fraction(0))
        values[(i, j)] = -(dist + tree.leaf_lengths[i - 1] + tree.leaf_lengths[j - 1])
    return PlueckerVector.build(tree.m, values)


def tree_from_plucker(p: PlueckerVector) -> PhyloTree:
    """Recover splits (Buneman index on -p) and pendant lengths; round trip is verified."""
    if not four_point_check(p):
        raise PreconditionError("Plücker vector fails the four-point condition")
    m = p.m
    if m > MAX_LEAVES:
        raise PreconditionError(f"m = {m} exceeds the supported limit {MAX_LEAVES}")
    dist = [[-p[i + 1, j + 1] if i != j else Fraction(0) for j in range(m)] for i in range(m)]
    lengths = []
    for i in range(m):
        others = [j for j in range(m) if j != i]
        if len(others) >= 2:
            lengths.append(min(dist[i][j] + dist[i][k] - dist[j][k] for j, k in itertools.combinations(others, 2)) / 2)
        elif others:
            lengths.append(dist[i][others[0]] / 2)
        else:
            lengths.append(Fraction(0))
    weights = {}
    full = (1 << m) - 1
    accepted = []
    candidates = []
    for rest in range(1 << (m - 1)):
        mask = (rest << 1) | 1
        other = full ^ mask
        if mask.bit_count() >= 2 and other.bit_count() >= 2:
            candidates.append((min(mask.bit_count(), other.bit_count()), mask))
    candidates.sort()
    for _, mask in candidates:
        if any(not _masks_compatible(mask, acc, full) for acc in accepted):
            continue
        inside = [i for i in range(m) if mask >> i & 1]
        outside = [i for i in range(m) if not mask >> i & 1]
        best = None
        for a, a2 in itertools.combinations(inside, 2):
            for b, b2 in itertools.combinations(outside, 2):
                v = min(dist[a][b] + dist[a2][b2], dist[a][b2] + dist[a2][b]) - dist[a][a2] - dist[b][b2]
                if best is None or v < best:
                    best = v
                if best <= 0:
                    break
            if best <= 0:
                break
        if best > 0:
            accepted.append(mask)
            weights[frozenset(i + 1 for i in inside)] = best / 2
    tree = PhyloTree.build(m, weights, lengths)
    if plucker_from_tree(tree) != p:
        raise ConsistencyError("split decomposition does not reproduce the Plücker vector")
    return tree


# ------------------------------------------------------------- bicolorings


@dataclass(frozen=True)
class Bicoloring:
    red: tuple
    green: tuple

    @classmethod
    def of(cls, red_leaves, m) -> "Bicoloring":
        reds = tuple(sorted(set(red_leaves)))
        if any(not 1 <= x <= m for x in reds):
            raise InputFormatError(f"red leaves {reds} not within 1..{m}")
        greens = tuple(x for x in range(1, m + 1) if x not in reds)
        return cls(reds, greens)

    @property
    def m(self):
        return len(self.red) + len(self.green)

    def to_json(self):
        return {"R": list(self.red), "G": list(self.green)}


def admissible_bicoloring(tree: PhyloTree, coloring: Bicoloring) -> bool:
    """No split of the tree has a monochromatic side."""
    if coloring.m != tree.m:
        raise DimensionError("coloring and tree have different leaf counts")
    reds = set(coloring.red)
    for s in tree.splits:
        for side in s.sides:
            if side <= reds or not side & reds:
                return False
    return True


def elementary_splits(tree) -> list:
    """Two-leaf sides of splits (cherries). On four leaves one split can contribute both sides."""
    return sorted((side for s in tree.splits for side in s.sides if len(side) == 2), key=sorted)


def count_bicolorings(tree: PhyloTree, d, n) -> int:
    if d + n != tree.m:
        raise DimensionError(f"d+n = {d + n} but the tree has {tree.m} leaves")
    if not tree.is_maximal():
        raise PreconditionError("the bicoloring count is only available for maximal trees")
    k = len(elementary_splits(tree))
    if k > min(d, n):
        return 0
    return 2 ** k * math.comb(d + n - 2 * k, d - k)


def bicolored_reading(tree: PhyloTree, coloring: Bicoloring) -> BicoloredTree:
    """Relabel leaves: the i-th red leaf becomes r_i, the j-th green leaf g_j."""
    if not admissible_bicoloring(tree, coloring):
        raise PreconditionError(f"coloring R={list(coloring.red)} is not admissible for this tree")
    rename = {x: red(i + 1) for i, x in enumerate(coloring.red)}
    rename.update({x: green(j + 1) for j, x in enumerate(coloring.green)})
    d, n = len(coloring.red), len(coloring.green)
    leaves = bicolored_leaves(d, n)
    weights = {Split.of([rename[x] for x in s.part], leaves): w for s, w in tree.weighted_splits}
    return BicoloredTree.build(d, n, weights)


def project_plucker(p: PlueckerVector, coloring: Bicoloring) -> TropicalMatrix:
    if coloring.m != p.m:
        raise DimensionError("coloring and Plücker vector have different leaf counts")
    if not coloring.red or not coloring.green:
        raise PreconditionError("both color classes must be nonempty")
    tree = tree_from_plucker(p)
    if not admissible_bicoloring(tree, coloring):
        raise PreconditionError(f"coloring R={list(coloring.red)} is not admissible for the tree of p")
    return TropicalMatrix.of([[p[i, j] for j in coloring.green] for i in coloring.red])
