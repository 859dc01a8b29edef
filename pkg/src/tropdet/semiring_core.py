"""Exact min-plus matrices, permutations and minors.

Everything here is immutable. Entries are ``fractions.Fraction``; hot loops
run on an integer grid obtained by clearing denominators, which leaves every
argmin set unchanged.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, DimensionError, InputFormatError

DEFAULT_PERM_BUDGET = math.factorial(8)
MAX_DP_ORDER = 20

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def parse_rational(token) -> Fraction:
    """Accept ints, Fractions and strings "p" or "p/q". Floats are refused."""
    if isinstance(token, bool):
        raise InputFormatError(f"boolean is not a rational entry: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, Fraction):
        return token
    if isinstance(token, str):
        if not _RATIONAL_RE.match(token):
            raise InputFormatError(f"not an exact rational: {token!r}")
        try:
            return Fraction(token.replace(" ", ""))
        except ZeroDivisionError:
            raise InputFormatError(f"zero denominator: {token!r}") from None
    raise InputFormatError(f"unsupported entry {token!r} (floats, NaN and infinity are rejected)")


def rational_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _reject_constant(name):
    raise InputFormatError(f"non-finite token {name} is not allowed")


def _reject_float(text):
    raise InputFormatError(f"float token {text} is not allowed; use an integer or \"p/q\"")


def load_json_text(text: str):
    """json.loads that refuses floats, NaN and Infinity."""
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed JSON: {exc}") from None


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class TropicalMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionError("a tropical matrix needs at least one row and one column")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError(f"entries do not form a {self.rows}x{self.cols} grid")

    @classmethod
    def of(cls, grid: Sequence[Sequence]) -> "TropicalMatrix":
        grid = [list(r) for r in grid]
        if not grid or not grid[0]:
            raise DimensionError("empty matrix")
        entries = tuple(tuple(parse_rational(x) for x in r) for r in grid)
        widths = {len(r) for r in entries}
        if len(widths) != 1:
            raise DimensionError("ragged rows")
        return cls(len(entries), len(entries[0]), entries)

    @classmethod
    def from_json(cls, data) -> "TropicalMatrix":
        if isinstance(data, str):
            data = load_json_text(data)
        if not isinstance(data, dict) or "entries" not in data:
            raise InputFormatError("matrix JSON needs an 'entries' field")
        grid = data["entries"]
        if not isinstance(grid, list) or not all(isinstance(r, list) for r in grid):
            raise InputFormatError("'entries' must be a list of rows")
        mat = cls.of(grid)
        if data.get("rows", mat.rows) != mat.rows or data.get("cols", mat.cols) != mat.cols:
            raise DimensionError(
                f"declared shape {data.get('rows')}x{data.get('cols')} "
                f"does not match entries {mat.rows}x{mat.cols}"
            )
        return mat

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[rational_str(x) for x in r] for r in self.entries],
        }

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> "TropicalMatrix":
        return TropicalMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    def column(self, j) -> tuple:
        return tuple(r[j] for r in self.entries)

    @cached_property
    def scale(self) -> int:
        return math.lcm(*(x.denominator for r in self.entries for x in r))

    @cached_property
    def int_grid(self) -> tuple:
        """Entries multiplied by ``scale``; integer-valued, same argmin structure."""
        s = self.scale
        return tuple(tuple(x.numerator * (s // x.denominator) for x in r) for r in self.entries)

    def __repr__(self):
        body = "; ".join(" ".join(rational_str(x) for x in r) for r in self.entries)
        return f"TropicalMatrix([{body}])"


def zeros(d, n) -> TropicalMatrix:
    return TropicalMatrix.of([[0] * n for _ in range(d)])


# ------------------------------------------------------------ permutations


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {0..m-1}; printed 1-based."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise InputFormatError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, m) -> "Permutation":
        return cls(tuple(range(m)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], m: int) -> "Permutation":
        """Cycles are 1-based, e.g. [(1, 2, 3)]."""
        images = list(range(m))
        seen = set()
        for cyc in cycles:
            cyc = [c - 1 for c in cyc]
            for c in cyc:
                if not 0 <= c < m or c in seen:
                    raise InputFormatError(f"bad cycle {cyc} for m={m}")
                seen.add(c)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> "Permutation":
        """Parse "id", cycle notation "(1 2)(3 4)" / "(123)", or one-line "[2,1,3]" / "2 1 3"."""
        s = text.strip()
        if s in ("id", "e", "()", ""):
            if m is None:
                raise InputFormatError("identity needs an explicit size")
            return cls.identity(m)
        if s.startswith("("):
            cycles = []
            for body in re.findall(r"\(([^()]*)\)", s):
                if re.search(r"[\s,]", body.strip()):
                    cyc = [int(t) for t in re.split(r"[\s,]+", body.strip()) if t]
                else:
                    cyc = [int(ch) for ch in body.strip()]
                if cyc:
                    cycles.append(cyc)
            if re.sub(r"\([^()]*\)", "", s).strip():
                raise InputFormatError(f"cannot parse cycle notation {text!r}")
            size = max([c for cyc in cycles for c in cyc], default=0)
            if m is None:
                m = size
            if size > m:
                raise InputFormatError(f"cycle entry exceeds size {m}")
            return cls.from_cycles(cycles, m)
        body = s.strip("[]")
        if re.search(r"[\s,]", body):
            vals = [int(t) for t in re.split(r"[\s,]+", body) if t]
        elif body.isdigit():
            vals = [int(ch) for ch in body]
        else:
            raise InputFormatError(f"cannot parse permutation {text!r}")
        perm = cls(tuple(v - 1 for v in vals))
        if m is not None and len(vals) != m:
            raise InputFormatError(f"one-line permutation has length {len(vals)}, expected {m}")
        return perm

    def __len__(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """(self ∘ other)(i) = self(other(i))."""
        _check_same_length(self, other)
        return Permutation(tuple(self.images[v] for v in other.images))

    def cycles(self) -> list:
        """Nontrivial cycles, 0-based, each starting at its smallest element."""
        return _cycles(self.images)

    def sign(self) -> int:
        return perm_sign(self)

    def one_line(self) -> list:
        return [v + 1 for v in self.images]

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "id"
        return "".join("(" + " ".join(str(c + 1) for c in cy) + ")" for cy in cyc)


def _cycles(images) -> list:
    seen = [False] * len(images)
    out = []
    for start in range(len(images)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = images[i]
        if len(cyc) > 1:
            out.append(cyc)
    return out


def _cycle_count(images) -> int:
    seen = [False] * len(images)
    count = 0
    for start in range(len(images)):
        if not seen[start]:
            count += 1
            i = start
            while not seen[i]:
                seen[i] = True
                i = images[i]
    return count


def _check_same_length(a, b):
    if len(a) != len(b):
        raise DimensionError(f"permutations of different lengths {len(a)} and {len(b)}")


def tuple_sign(images) -> int:
    return -1 if (len(images) - _cycle_count(images)) % 2 else 1


def perm_sign(sigma: Permutation) -> int:
    return tuple_sign(sigma.images)


def is_birkhoff_edge(sigma: Permutation, pi: Permutation) -> bool:
    """σπ⁻¹ is a single cycle of length at least two."""
    _check_same_length(sigma, pi)
    quotient = sigma.compose(pi.inverse())
    return len(quotient.cycles()) == 1


# ------------------------------------------------------------------ minors


@dataclass(frozen=True, order=True)
class MinorIndex:
    """Row and column sets, stored 0-based, printed 1-based."""

    rows: tuple
    cols: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.cols):
            raise DimensionError("minor index needs |I| = |J|")
        for part in (self.rows, self.cols):
            if any(b <= a for a, b in zip(part, part[1:])) or any(x < 0 for x in part):
                raise InputFormatError(f"index set must be strictly increasing: {part}")

    @classmethod
    def one_based(cls, rows, cols) -> "MinorIndex":
        return cls(tuple(sorted(r - 1 for r in rows)), tuple(sorted(c - 1 for c in cols)))

    @property
    def size(self):
        return len(self.rows)

    def to_json(self):
        return {"I": [i + 1 for i in self.rows], "J": [j + 1 for j in self.cols]}

    def __str__(self):
        return f"I={{{','.join(str(i + 1) for i in self.rows)}}} J={{{','.join(str(j + 1) for j in self.cols)}}}"


def iter_minor_indices(d, n, k) -> Iterator[MinorIndex]:
    """All k×k minors in lexicographic (I, J) order."""
    col_sets = list(itertools.combinations(range(n), k))
    for rows in itertools.combinations(range(d), k):
        for cols in col_sets:
            yield MinorIndex(rows, cols)


def submatrix(A: TropicalMatrix, ij: MinorIndex) -> TropicalMatrix:
    if any(i >= A.rows for i in ij.rows) or any(j >= A.cols for j in ij.cols):
        raise DimensionError(f"minor {ij} out of range for a {A.rows}x{A.cols} matrix")
    if ij.size == 0:
        raise DimensionError("empty minor")
    return TropicalMatrix(ij.size, ij.size, tuple(tuple(A.entries[i][j] for j in ij.cols) for i in ij.rows))


@dataclass(frozen=True)
class SignPattern:
    signs: tuple

    def __post_init__(self):
        if not self.signs or any(len(r) != len(self.signs[0]) for r in self.signs):
            raise DimensionError("sign pattern must be a nonempty rectangular grid")
        if any(s not in (-1, 1) for r in self.signs for s in r):
            raise InputFormatError("sign pattern entries must be +1 or -1")

    @classmethod
    def of(cls, grid) -> "SignPattern":
        return cls(tuple(tuple(int(s) for s in r) for r in grid))

    @classmethod
    def ones(cls, d, n) -> "SignPattern":
        return cls(tuple((1,) * n for _ in range(d)))

    @classmethod
    def from_json(cls, data) -> "SignPattern":
        if isinstance(data, str):
            data = load_json_text(data)
        grid = data.get("signs", data.get("entries")) if isinstance(data, dict) else data
        if not isinstance(grid, list) or not all(isinstance(r, list) for r in grid):
            raise InputFormatError("sign pattern JSON must be a grid under 'signs'")
        if any(isinstance(s, bool) or not isinstance(s, int) for r in grid for s in r):
            raise InputFormatError("sign entries must be the integers 1 or -1")
        return cls.of(grid)

    def to_json(self):
        return {"signs": [list(r) for r in self.signs]}

    @property
    def shape(self):
        return len(self.signs), len(self.signs[0])


# ------------------------------------------------------------ determinants


def argmin_permutations(grid, budget: int = DEFAULT_PERM_BUDGET):
    """Minimum assignment value of a square grid and every permutation (tuple) attaining it.

    Exhaustive enumeration when m! fits the budget; otherwise a subset DP
    followed by a walk that visits only optimal completions. The walk
    refuses to return more than ``budget`` optima.
    """
    m = len(grid)
    if m == 1:
        return grid[0][0], [(0,)]
    if m == 2:
        a = grid[0][0] + grid[1][1]
        b = grid[0][1] + grid[1][0]
        if a < b:
            return a, [(0, 1)]
        if b < a:
            return b, [(1, 0)]
        return a, [(0, 1), (1, 0)]
    if math.factorial(m) <= budget:
        best = None
        optima = []
        rows = range(m)
        for perm in itertools.permutations(range(m)):
            v = sum(grid[i][perm[i]] for i in rows)
            if best is None or v < best:
                best = v
                optima = [perm]
            elif v == best:
                optima.append(perm)
        return best, optima
    return _argmin_by_dp(grid, budget)


def _argmin_by_dp(grid, budget):
    m = len(grid)
    if m > MAX_DP_ORDER:
        raise BudgetExceeded(f"order {m} exceeds the assignment DP limit {MAX_DP_ORDER}")
    full = (1 << m) - 1
    # best[mask]: cheapest way to give rows 0..popcount(mask)-1 the columns in mask
    best = [None] * (full + 1)
    best[0] = 0
    for mask in range(1, full + 1):
        row = mask.bit_count() - 1
        cand = None
        bits = mask
        while bits:
            low = bits & -bits
            c = low.bit_length() - 1
            v = best[mask ^ low] + grid[row][c]
            if cand is None or v < cand:
                cand = v
            bits ^= low
        best[mask] = cand
    optima = []
    images = [0] * m

    def walk(mask):
        row = mask.bit_count() - 1
        if row < 0:
            optima.append(tuple(images))
            if len(optima) > budget:
                raise BudgetExceeded(f"more than {budget} optimal permutations")
            return
        bits = mask
        while bits:
            low = bits & -bits
            c = low.bit_length() - 1
            if best[mask ^ low] + grid[row][c] == best[mask]:
                images[row] = c
                walk(mask ^ low)
            bits ^= low

    walk(full)
    optima.sort()
    return best[full], optima


def tropical_det(M: TropicalMatrix, budget: int = DEFAULT_PERM_BUDGET):
    """Return (value, frozenset of optimal Permutations)."""
    if M.rows != M.cols:
        raise DimensionError(f"tropical determinant needs a square matrix, got {M.rows}x{M.cols}")
    value, optima = argmin_permutations(M.int_grid, budget)
    return Fraction(value, M.scale), frozenset(Permutation(p) for p in optima)


def is_tropically_singular(M: TropicalMatrix, budget: int = DEFAULT_PERM_BUDGET) -> bool:
    return len(tropical_det(M, budget)[1]) >= 2


def minor_grid(grid, ij: MinorIndex):
    return [[grid[i][j] for j in ij.cols] for i in ij.rows]


def minor_is_singular(grid, ij: MinorIndex, budget: int = DEFAULT_PERM_BUDGET) -> bool:
    return len(argmin_permutations(minor_grid(grid, ij), budget)[1]) >= 2


def first_nonsingular_minor(A: TropicalMatrix, k: int, budget: int = DEFAULT_PERM_BUDGET):
    """Lexicographically first k×k minor with a unique optimum, or None."""
    if k > min(A.rows, A.cols):
        return None
    grid = A.int_grid
    for ij in iter_minor_indices(A.rows, A.cols, k):
        if not minor_is_singular(grid, ij, budget):
            return ij
    return None


def canonicalize_mod_lineality(A: TropicalMatrix) -> TropicalMatrix:
    """Representative with zero first row and zero first column."""
    e = A.entries
    corner = e[0][0]
    return TropicalMatrix(
        A.rows,
        A.cols,
        tuple(tuple(e[i][j] - e[i][0] - e[0][j] + corner for j in range(A.cols)) for i in range(A.rows)),
    )
