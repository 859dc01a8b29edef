"""Bipartite labels of the cone containing a matrix, and label-based positivity tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import DimensionError, NotInPrevariety
from .semiring_core import (
    DEFAULT_PERM_BUDGET,
    MinorIndex,
    Permutation,
    TropicalMatrix,
    argmin_permutations,
    first_nonsingular_minor,
    iter_minor_indices,
    minor_grid,
)


@dataclass(frozen=True)
class BipartiteLabel:
    """Edges are 1-based pairs (i, j) meaning r_i g_j."""

    d: int
    n: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if not (1 <= i <= self.d and 1 <= j <= self.n):
                raise DimensionError(f"edge r{i}g{j} outside a {self.d}x{self.n} label")

    @classmethod
    def of(cls, d, n, edges) -> "BipartiteLabel":
        return cls(d, n, frozenset((int(i), int(j)) for i, j in edges))

    @classmethod
    def complete(cls, d, n) -> "BipartiteLabel":
        return cls.of(d, n, itertools.product(range(1, d + 1), range(1, n + 1)))

    def degree_r(self, i) -> int:
        return sum(1 for a, _ in self.edges if a == i)

    def degree_g(self, j) -> int:
        return sum(1 for _, b in self.edges if b == j)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def to_json(self):
        return {"d": self.d, "n": self.n, "edges": [f"r{i}g{j}" for i, j in self.sorted_edges()]}

    def to_dot(self, show_complement=True) -> str:
        lines = ["graph label {"]
        for i in range(1, self.d + 1):
            lines.append(f"  r{i} [shape=square, color=red];")
        for j in range(1, self.n + 1):
            lines.append(f"  g{j} [shape=circle, color=green];")
        for i, j in self.sorted_edges():
            lines.append(f"  r{i} -- g{j};")
        if show_complement:
            for i, j in bipartite_complement(self).sorted_edges():
                lines.append(f"  r{i} -- g{j} [color=red, style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, order=True)
class EmbeddedPermutation:
    index: MinorIndex
    sigma: Permutation

    def edges(self):
        """1-based pairs (i_k, j_σ(k))."""
        return [(self.index.rows[k] + 1, self.index.cols[self.sigma(k)] + 1) for k in range(self.index.size)]

    def __str__(self):
        return f"{self.sigma}^{{{self.index}}}"


def minor_argmin_face(A: TropicalMatrix, ij: MinorIndex, budget: int = DEFAULT_PERM_BUDGET) -> frozenset:
    if any(i >= A.rows for i in ij.rows) or any(j >= A.cols for j in ij.cols):
        raise DimensionError(f"minor {ij} out of range")
    _, optima = argmin_permutations(minor_grid(A.int_grid, ij), budget)
    return frozenset(EmbeddedPermutation(ij, Permutation(p)) for p in optima)


def label_graph(A: TropicalMatrix, r: int, budget: int = DEFAULT_PERM_BUDGET) -> BipartiteLabel:
    witness = first_nonsingular_minor(A, r + 1, budget)
    if witness is not None:
        raise NotInPrevariety(f"minor {witness} is nonsingular; no rank-{r} label")
    edges = set()
    for ij in iter_minor_indices(A.rows, A.cols, r + 1):
        for emb in minor_argmin_face(A, ij, budget):
            edges.update(emb.edges())
    return BipartiteLabel.of(A.rows, A.cols, edges)


def bipartite_complement(label: BipartiteLabel) -> BipartiteLabel:
    full = BipartiteLabel.complete(label.d, label.n)
    return BipartiteLabel(label.d, label.n, full.edges - label.edges)


def label_degree_check(label: BipartiteLabel, r: int) -> bool:
    return all(label.degree_r(i) >= label.n - r for i in range(1, label.d + 1)) and all(
        label.degree_g(j) >= label.d - r for j in range(1, label.n + 1)
    )


@dataclass(frozen=True)
class ParityCheck:
    holds: bool
    violation: MinorIndex | None = None

    def __bool__(self):
        return self.holds


def _has_even_alternating_cycle(label_edges, rows, cols) -> bool:
    """Two perfect matchings of the induced subgraph whose quotient is one cycle of even length."""
    size = len(rows)
    matchings = [
        p for p in itertools.permutations(range(size))
        if all((rows[k] + 1, cols[p[k]] + 1) in label_edges for k in range(size))
    ]
    for a, b in itertools.combinations(matchings, 2):
        moved = [k for k in range(size) if a[k] != b[k]]
        inv_b = {v: k for k, v in enumerate(b)}
        # σπ⁻¹ restricted to moved positions: k -> inv_b[a[k]]
        start = moved[0]
        k, length = start, 0
        while True:
            k = inv_b[a[k]]
            length += 1
            if k == start:
                break
        if length == len(moved) and length % 2 == 0:
            return True
    return False


def label_positivity_necessary(label: BipartiteLabel, r: int) -> ParityCheck:
    for ij in iter_minor_indices(label.d, label.n, r + 1):
        if not _has_even_alternating_cycle(label.edges, ij.rows, ij.cols):
            return ParityCheck(False, ij)
    return ParityCheck(True)


def rank2_label_is_positive(label: BipartiteLabel) -> bool:
    """Complement is two vertex-disjoint paths with two edges each, plus isolated vertices."""
    comp = bipartite_complement(label).edges
    if len(comp) != 4:
        return False
    adj = {}
    for i, j in comp:
        adj.setdefault(("r", i), set()).add(("g", j))
        adj.setdefault(("g", j), set()).add(("r", i))
    seen, parts = set(), []
    for v in adj:
        if v in seen:
            continue
        stack, part = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            part.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        parts.append(part)
    if len(parts) != 2:
        return False
    return all(len(p) == 3 and sorted(len(adj[u]) for u in p) == [1, 1, 2] for p in parts)
