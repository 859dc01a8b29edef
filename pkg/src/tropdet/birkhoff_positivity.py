"""Positivity of minors and prevarieties, Birkhoff edges, cartoons and orthant colorings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExceeded, DimensionError, NotInPrevariety, PreconditionError
from .semiring_core import (
    DEFAULT_PERM_BUDGET,
    MinorIndex,
    Permutation,
    SignPattern,
    TropicalMatrix,
    argmin_permutations,
    first_nonsingular_minor,
    is_birkhoff_edge,
    iter_minor_indices,
    minor_grid,
    perm_sign,
    rational_str,
    tuple_sign,
)

DEFAULT_ORTHANT_MAX_N = 6

POSITIVE = "positive"
NOT_POSITIVE = "not_positive"
OFF_HYPERSURFACE = "off_hypersurface"


@dataclass(frozen=True)
class MinorVerdict:
    index: MinorIndex
    min_value: Fraction
    even_attained: bool
    odd_attained: bool
    optima_count: int = 2

    @property
    def on_hypersurface(self) -> bool:
        return self.optima_count >= 2

    @property
    def status(self) -> str:
        if not self.on_hypersurface:
            return OFF_HYPERSURFACE
        return POSITIVE if self.even_attained and self.odd_attained else NOT_POSITIVE

    def to_json(self):
        return {
            **self.index.to_json(),
            "min_value": rational_str(self.min_value),
            "even_attained": self.even_attained,
            "odd_attained": self.odd_attained,
            "optima": self.optima_count,
            "status": self.status,
        }


@dataclass(frozen=True)
class PositivityCertificate:
    verdict: str  # "positive_prevariety" or "not_positive"
    witness: MinorVerdict | None = None
    rank: int = 0
    signed: bool = False

    @property
    def positive(self) -> bool:
        return self.verdict == "positive_prevariety"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "signed": self.signed,
            "witness": self.witness.to_json() if self.witness else None,
        }


def _term_sign(perm, ij: MinorIndex, signs):
    sign = tuple_sign(perm)
    if signs is not None:
        for k, row in enumerate(ij.rows):
            sign *= signs[row][ij.cols[perm[k]]]
    return sign


def _verdict(A: TropicalMatrix, ij: MinorIndex, signs, budget) -> MinorVerdict:
    value, optima = argmin_permutations(minor_grid(A.int_grid, ij), budget)
    term_signs = {_term_sign(p, ij, signs) for p in optima}
    return MinorVerdict(ij, Fraction(value, A.scale), 1 in term_signs, -1 in term_signs, len(optima))


def minor_positivity(A: TropicalMatrix, ij: MinorIndex, budget: int = DEFAULT_PERM_BUDGET) -> MinorVerdict:
    if any(i >= A.rows for i in ij.rows) or any(j >= A.cols for j in ij.cols):
        raise DimensionError(f"minor {ij} out of range")
    return _verdict(A, ij, None, budget)


def signed_minor_positivity(A, s: SignPattern, ij: MinorIndex, budget: int = DEFAULT_PERM_BUDGET) -> MinorVerdict:
    if s.shape != A.shape:
        raise DimensionError("sign pattern and matrix differ in shape")
    return _verdict(A, ij, s.signs, budget)


def _prevariety_scan(A, r, signs, budget):
    if not 1 <= r <= min(A.rows, A.cols):
        raise PreconditionError(f"rank {r} outside 1..{min(A.rows, A.cols)}")
    witness = first_nonsingular_minor(A, r + 1, budget)
    if witness is not None:
        raise NotInPrevariety(f"matrix is not in the rank-{r} prevariety: minor {witness} is nonsingular")
    for ij in iter_minor_indices(A.rows, A.cols, r + 1):
        verdict = _verdict(A, ij, signs, budget)
        if verdict.status == NOT_POSITIVE:
            return PositivityCertificate("not_positive", verdict, r, signs is not None)
    return PositivityCertificate("positive_prevariety", None, r, signs is not None)


def violating_minors(A: TropicalMatrix, r: int, s: SignPattern | None = None, budget: int = DEFAULT_PERM_BUDGET):
    """Every (r+1)-minor whose optimum is attained by terms of one sign only."""
    signs = s.signs if s is not None else None
    return [
        v
        for ij in iter_minor_indices(A.rows, A.cols, r + 1)
        if (v := _verdict(A, ij, signs, budget)).status == NOT_POSITIVE
    ]


def positive_prevariety_member(A: TropicalMatrix, r: int, budget: int = DEFAULT_PERM_BUDGET) -> PositivityCertificate:
    return _prevariety_scan(A, r, None, budget)


def signed_prevariety_member(A: TropicalMatrix, s: SignPattern, r: int,
                             budget: int = DEFAULT_PERM_BUDGET) -> PositivityCertificate:
    if s.shape != A.shape:
        raise DimensionError(f"sign pattern {s.shape} does not match matrix {A.shape}")
    return _prevariety_scan(A, r, s.signs, budget)


# ------------------------------------------------------------ Birkhoff edges


def birkhoff_edge_positive(sigma: Permutation, pi: Permutation) -> bool:
    if not is_birkhoff_edge(sigma, pi):
        raise PreconditionError(f"{sigma} and {pi} are not joined by an edge of the Birkhoff polytope")
    return perm_sign(sigma) != perm_sign(pi)


@dataclass(frozen=True)
class Cartoon:
    """Marks on K_n, nodes 1-based. Edge marks are sorted pairs."""

    n: int
    edge_marks: tuple
    node_marks: tuple

    def marks(self):
        return [("edge", e) for e in self.edge_marks] + [("node", v) for v in self.node_marks]

    def to_json(self):
        return {"n": self.n, "edge_marks": [list(e) for e in self.edge_marks], "node_marks": list(self.node_marks)}

    def to_dot(self) -> str:
        lines = ["graph cartoon {", "  layout=circo;", "  node [shape=circle];"]
        for v in range(1, self.n + 1):
            count = self.node_marks.count(v)
            label = f"{v}" + ("*" * count)
            style = ", style=filled, fillcolor=black, fontcolor=white" if count else ""
            lines.append(f"  {v} [label=\"{label}\"{style}];")
        marked = {}
        for e in self.edge_marks:
            marked[e] = marked.get(e, 0) + 1
        for a, b in itertools.combinations(range(1, self.n + 1), 2):
            k = marked.get((a, b), 0)
            if k:
                lines.append(f"  {a} -- {b} [label=\"{'x' * k}\", penwidth=2];")
            else:
                lines.append(f"  {a} -- {b} [style=dotted, color=gray];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def cartoon_of_edge(sigma: Permutation, pi: Permutation) -> Cartoon:
    if not is_birkhoff_edge(sigma, pi):
        raise PreconditionError(f"{sigma} and {pi} are not joined by an edge of the Birkhoff polytope")
    si, pinv = sigma.inverse(), pi.inverse()
    edges, nodes = [], []
    for j in range(len(sigma)):
        a, b = si(j) + 1, pinv(j) + 1
        if a != b:
            edges.append((min(a, b), max(a, b)))
        else:
            nodes.append(a)
    return Cartoon(len(sigma), tuple(sorted(edges)), tuple(sorted(nodes)))


def cartoon_has_marked_triangle(c: Cartoon) -> bool:
    marks = c.marks()

    def lies_on(mark, edge):
        kind, where = mark
        return where == edge if kind == "edge" else where in edge

    for tri in itertools.combinations(range(1, c.n + 1), 3):
        sides = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])]
        options = [[k for k, m in enumerate(marks) if lies_on(m, e)] for e in sides]
        if any(len(set(choice)) == 3 for choice in itertools.product(*options)):
            return True
    return False


# -------------------------------------------------------- orthant colorings


@lru_cache(maxsize=None)
def birkhoff_graph(n):
    """Vertices (lexicographic permutation tuples) and edges as index pairs."""
    verts = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(verts)}
    cycles = []
    for q in verts:
        moved = [i for i in range(n) if q[i] != i]
        if moved:
            i = moved[0]
            length = 0
            while True:
                i = q[i]
                length += 1
                if i == moved[0]:
                    break
            if length == len(moved):
                cycles.append(q)
    edges = set()
    for k, pi in enumerate(verts):
        for q in cycles:
            sigma = tuple(q[pi[i]] for i in range(n))  # σ = q ∘ π, so σπ⁻¹ = q
            other = index[sigma]
            edges.add((min(k, other), max(k, other)))
    return tuple(verts), tuple(sorted(edges))


@dataclass(frozen=True)
class OrthantColoring:
    n: int
    sign_pattern: SignPattern
    vertices: tuple
    green_edges: tuple
    red_edges: tuple

    def vertex(self, k) -> Permutation:
        return Permutation(self.vertices[k])

    def to_dot(self) -> str:
        lines = ["graph orthants {", "  node [shape=box, fontsize=10];"]
        for k, v in enumerate(self.vertices):
            lines.append(f"  v{k} [label=\"{''.join(str(x + 1) for x in v)}\"];")
        for a, b in self.green_edges:
            lines.append(f"  v{a} -- v{b} [color=green];")
        for a, b in self.red_edges:
            lines.append(f"  v{a} -- v{b} [color=red];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def vertex_signs(n, s: SignPattern):
    verts, _ = birkhoff_graph(n)
    grid = s.signs
    out = []
    for p in verts:
        sign = tuple_sign(p)
        for i in range(n):
            sign *= grid[i][p[i]]
        out.append(sign)
    return out


def orthant_coloring(n: int, s: SignPattern | None = None, max_n: int = DEFAULT_ORTHANT_MAX_N) -> OrthantColoring:
    if n > max_n:
        raise BudgetExceeded(f"n = {n} exceeds the Birkhoff graph bound {max_n} ({math.factorial(n)} vertices)")
    if n < 1:
        raise DimensionError("n must be positive")
    s = s or SignPattern.ones(n, n)
    if s.shape != (n, n):
        raise DimensionError(f"sign pattern must be {n}x{n}")
    verts, edges = birkhoff_graph(n)
    vs = vertex_signs(n, s)
    green = tuple(e for e in edges if vs[e[0]] != vs[e[1]])
    red = tuple(e for e in edges if vs[e[0]] == vs[e[1]])
    return OrthantColoring(n, s, verts, green, red)


def verify_cut_property(oc: OrthantColoring):
    """(holds, components): red edges give exactly two components and green edges are the cut."""
    size = len(oc.vertices)
    parent = list(range(size))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in oc.red_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for k in range(size):
        groups.setdefault(find(k), []).append(k)
    components = sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
    holds = len(components) == 2 and all(find(a) != find(b) for a, b in oc.green_edges)
    return holds, [[oc.vertex(k) for k in comp] for comp in components]


def alternating_group(n):
    verts, _ = birkhoff_graph(n)
    return [Permutation(p) for p in verts if tuple_sign(p) == 1]
