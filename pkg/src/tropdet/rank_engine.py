"""Tropical, Kapranov and Barvinok rank.

Barvinok rank is decided through the polyhedron of dominating rank-one
matrices ``Q = {(x, y) : x_i + y_j >= A_ij}``. A factorization
``A = X ⊙ Y`` with r terms exists iff r tight sets of vertices of Q cover
every entry. Vertices are found by pivoting on spanning trees of a
symbolically perturbed copy of A, then read back at the unperturbed matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, ConsistencyError, DimensionError, PreconditionError
from .semiring_core import (
    DEFAULT_PERM_BUDGET,
    MinorIndex,
    TropicalMatrix,
    first_nonsingular_minor,
    iter_minor_indices,
    minor_is_singular,
    rational_str,
)

DEFAULT_VERTEX_BUDGET = 200_000
DEFAULT_COVER_BUDGET = 2_000_000


@dataclass(frozen=True)
class SearchConfig:
    vertex_budget: int = DEFAULT_VERTEX_BUDGET
    cover_budget: int = DEFAULT_COVER_BUDGET
    perm_budget: int = DEFAULT_PERM_BUDGET
    cross_check: bool = True


DEFAULT_SEARCH = SearchConfig()


@dataclass(frozen=True)
class RankOneFactor:
    x: tuple
    y: tuple

    def to_json(self):
        return {"x": [rational_str(v) for v in self.x], "y": [rational_str(v) for v in self.y]}


@dataclass(frozen=True)
class BarvinokDecision:
    holds: bool
    factors: tuple = ()

    def __bool__(self):
        return self.holds

    def matrices(self):
        """Return (X, Y) with A = X ⊙ Y, or None when the decision is negative."""
        if not self.holds:
            return None
        d, n = len(self.factors[0].x), len(self.factors[0].y)
        X = TropicalMatrix.of([[f.x[i] for f in self.factors] for i in range(d)])
        Y = TropicalMatrix.of([list(f.y) for f in self.factors])
        return X, Y


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: MinorIndex | None = None

    def __bool__(self):
        return self.member


class KapranovStatus(str, enum.Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member"
    UNDECIDABLE = "undecidable_by_minors"


@dataclass(frozen=True)
class RankReport:
    tropical_rank: int
    kapranov_lower: int
    kapranov_upper: int
    kapranov_exact: bool
    barvinok_rank: int
    factors: tuple = ()

    def __post_init__(self):
        if not self.tropical_rank <= self.kapranov_lower <= self.kapranov_upper <= self.barvinok_rank:
            raise ConsistencyError(f"rank chain violated: {self}")
        if self.kapranov_exact and self.kapranov_lower != self.kapranov_upper:
            raise ConsistencyError("exact Kapranov rank with distinct bounds")

    def to_json(self):
        out = {
            "tropical_rank": self.tropical_rank,
            "kapranov_lower": self.kapranov_lower,
            "kapranov_upper": self.kapranov_upper,
            "kapranov_exact": self.kapranov_exact,
            "barvinok_rank": self.barvinok_rank,
        }
        if self.factors:
            out["factors"] = [f.to_json() for f in self.factors]
        return out


def min_plus_product(X: TropicalMatrix, Y: TropicalMatrix) -> TropicalMatrix:
    if X.cols != Y.rows:
        raise DimensionError(f"cannot multiply {X.rows}x{X.cols} by {Y.rows}x{Y.cols}")
    xe, ye = X.entries, Y.entries
    return TropicalMatrix(
        X.rows,
        Y.cols,
        tuple(
            tuple(min(xe[i][k] + ye[k][j] for k in range(X.cols)) for j in range(Y.cols))
            for i in range(X.rows)
        ),
    )


def tropical_rank(A: TropicalMatrix, budget: int = DEFAULT_PERM_BUDGET) -> int:
    grid = A.int_grid
    for k in range(min(A.rows, A.cols), 1, -1):
        if any(not minor_is_singular(grid, ij, budget) for ij in iter_minor_indices(A.rows, A.cols, k)):
            return k
    return 1


def _check_rank_arg(A, r):
    if not 1 <= r <= min(A.rows, A.cols):
        raise PreconditionError(f"rank {r} outside 1..{min(A.rows, A.cols)}")


def prevariety_member(A: TropicalMatrix, r: int, budget: int = DEFAULT_PERM_BUDGET) -> Membership:
    _check_rank_arg(A, r)
    witness = first_nonsingular_minor(A, r + 1, budget)
    return Membership(witness is None, witness)


def minors_form_basis(k: int, d: int, n: int) -> bool:
    """Whether the k×k minors of a d×n matrix are a tropical basis."""
    low = min(d, n)
    return k <= 3 or k == low or (k == 4 and low <= 6)


def kapranov_status(A: TropicalMatrix, r: int, budget: int = DEFAULT_PERM_BUDGET) -> KapranovStatus:
    _check_rank_arg(A, r)
    if r >= min(A.rows, A.cols):
        return KapranovStatus.MEMBER
    if not prevariety_member(A, r, budget):
        return KapranovStatus.NON_MEMBER
    if minors_form_basis(r + 1, A.rows, A.cols):
        return KapranovStatus.MEMBER
    return KapranovStatus.UNDECIDABLE


# ------------------------------------------------------------ Barvinok rank


def _perturbed(grid):
    """Integer copy of ``grid`` with a lexicographically generic infinitesimal per entry.

    Quantities met during pivoting have perturbation coefficients bounded
    by 4 in absolute value, so base 16 digits never carry into each other
    or into the unperturbed part.
    """
    d, n = len(grid), len(grid[0])
    k = d * n
    base = 16
    unit = base ** (k + 1)
    pert = [[grid[i][j] * unit + base ** (k - (i * n + j)) for j in range(n)] for i in range(d)]
    return pert, unit


def _initial_vertex(a):
    d, n = len(a), len(a[0])
    x = [0] * d
    while True:
        y = [max(a[i][j] - x[i] for i in range(d)) for j in range(n)]
        comp = _components(d, n, [(i, j) for i in range(d) for j in range(n) if x[i] + y[j] == a[i][j]])
        labels = set(comp)
        if len(labels) == 1:
            break
        # lower the rows of one component until it touches a column outside it
        for lab in sorted(labels):
            rows = [i for i in range(d) if comp[i] == lab]
            outside = [j for j in range(n) if comp[d + j] != lab]
            if rows and outside:
                t = min(x[i] + y[j] - a[i][j] for i in rows for j in outside)
                for i in rows:
                    x[i] -= t
                for j in range(n):
                    if comp[d + j] == lab:
                        y[j] += t
                break
        else:  # pragma: no cover - a disconnected tight graph always has such a component
            raise ConsistencyError("no merge step available")
    shift = x[0]
    return tuple(v - shift for v in x)


def _components(d, n, edges):
    parent = list(range(d + n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for i, j in edges:
        ri, rj = find(i), find(d + j)
        if ri != rj:
            parent[ri] = rj
    return [find(u) for u in range(d + n)]


def _vertex_tight_sets(grid, budget):
    """Maximal tight sets (as bitmasks over d*n entries) of vertices of Q, with a witness vector each."""
    d, n = len(grid), len(grid[0])
    a, unit = _perturbed(grid)
    start = _initial_vertex(a)
    seen = {start}
    queue = [start]
    tight = {}
    while queue:
        x = queue.pop()
        y = [max(a[i][j] - x[i] for i in range(d)) for j in range(n)]
        edges = [(i, j) for i in range(d) for j in range(n) if x[i] + y[j] == a[i][j]]
        if len(edges) != d + n - 1:
            raise ConsistencyError("perturbed vertex is not simple")
        # read the vertex back at the unperturbed matrix
        half = unit // 2
        xr = [(v + half) // unit for v in x]
        yr = [max(grid[i][j] - xr[i] for i in range(d)) for j in range(n)]
        mask = 0
        for i in range(d):
            for j in range(n):
                if xr[i] + yr[j] == grid[i][j]:
                    mask |= 1 << (i * n + j)
        tight.setdefault(mask, (tuple(xr), tuple(yr)))
        for e in edges:
            rest = [f for f in edges if f != e]
            comp = _components(d, n, rest)
            side = comp[e[0]]
            rows_in = [i for i in range(d) if comp[i] == side]
            cols_in = [j for j in range(n) if comp[d + j] == side]
            rows_out = [i for i in range(d) if comp[i] != side]
            if not rows_out or not cols_in:
                continue
            t = None
            for i in rows_out:
                for j in cols_in:
                    s = x[i] + y[j] - a[i][j]
                    if t is None or s < t:
                        t = s
            nx = list(x)
            for i in rows_in:
                nx[i] += t
            shift = nx[0]
            key = tuple(v - shift for v in nx)
            if key not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"more than {budget} vertices in the generator search")
                seen.add(key)
                queue.append(key)
    maximal = [m for m in tight if not any(m != o and m & o == m for o in tight)]
    maximal.sort(key=lambda m: (-m.bit_count(), m))
    return [(m, tight[m]) for m in maximal]


def _cover(masks, full, r, budget):
    """Indices of at most r masks whose union is ``full``, or None."""
    steps = 0
    chosen = []

    def search(covered, depth):
        nonlocal steps
        if covered == full:
            return True
        if depth == r:
            return False
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"cover search exceeded {budget} steps")
        missing = full & ~covered
        low = missing & -missing
        for idx, m in enumerate(masks):
            if m & low:
                chosen.append(idx)
                if search(covered | m, depth + 1):
                    return True
                chosen.pop()
        return False

    return list(chosen) if search(0, 0) else None


class _GeneratorSearch:
    def __init__(self, A: TropicalMatrix, config: SearchConfig):
        self.A = A
        self.config = config
        self.tight = _vertex_tight_sets(A.int_grid, config.vertex_budget)
        self.full = (1 << (A.rows * A.cols)) - 1

    def decide(self, r) -> BarvinokDecision:
        picks = _cover([m for m, _ in self.tight], self.full, r, self.config.cover_budget)
        if picks is None:
            return BarvinokDecision(False)
        s = self.A.scale
        factors = tuple(
            RankOneFactor(tuple(Fraction(v, s) for v in self.tight[k][1][0]),
                          tuple(Fraction(v, s) for v in self.tight[k][1][1]))
            for k in picks
        )
        X = TropicalMatrix.of([[f.x[i] for f in factors] for i in range(self.A.rows)])
        Y = TropicalMatrix.of([list(f.y) for f in factors])
        if min_plus_product(X, Y) != self.A:
            raise ConsistencyError("generator cover does not reproduce the matrix")
        return BarvinokDecision(True, factors)


def _cross_check(A: TropicalMatrix, r: int, holds: bool, config: SearchConfig):
    from .tree_space import bicolored_tree_from_matrix, is_caterpillar

    if r > 2 or min(A.rows, A.cols) < 2:
        return
    if first_nonsingular_minor(A, 3, config.perm_budget) is not None:
        expected = False
    else:
        tree = bicolored_tree_from_matrix(A)
        expected = is_caterpillar(tree) if r == 2 else not tree.splits
    if expected != holds:
        raise ConsistencyError(f"generator search and tree test disagree at rank {r}")


def barvinok_rank_le(A: TropicalMatrix, r: int, config: SearchConfig = DEFAULT_SEARCH) -> BarvinokDecision:
    if r < 1:
        raise PreconditionError("rank bound must be at least 1")
    decision = _GeneratorSearch(A, config).decide(min(r, min(A.rows, A.cols)))
    if config.cross_check:
        _cross_check(A, r, decision.holds, config)
    return decision


def barvinok_rank(A: TropicalMatrix, config: SearchConfig = DEFAULT_SEARCH, lower: int = 1) -> int:
    return _barvinok_with_factors(A, config, lower)[0]


def _barvinok_with_factors(A, config, lower):
    search = _GeneratorSearch(A, config)
    top = min(A.rows, A.cols)
    for r in range(max(lower, 1), top + 1):
        decision = search.decide(r)
        if decision:
            if config.cross_check and r <= 2:
                _cross_check(A, r, True, config)
                if r == 2:
                    _cross_check(A, 1, False, config)
            elif config.cross_check:
                _cross_check(A, 2, False, config)
            return r, decision.factors
    raise ConsistencyError("no factorization found within min(d, n) terms")


def rank_report(A: TropicalMatrix, config: SearchConfig = DEFAULT_SEARCH) -> RankReport:
    trop = tropical_rank(A, config.perm_budget)
    barv, factors = _barvinok_with_factors(A, config, trop)
    low = min(A.rows, A.cols)
    exact = trop >= low or minors_form_basis(trop + 1, A.rows, A.cols)
    upper = trop if exact else min(barv, low)
    return RankReport(trop, trop, upper, exact, barv, factors)
