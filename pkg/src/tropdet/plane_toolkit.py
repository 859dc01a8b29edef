"""Rank-3 criteria on user-supplied tropical planes: marked faces, starships, tree arrangements.

Points live in the tropical projective torus, so every membership test
carries a free multiple of the all-ones vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import sympy

from .birkhoff_positivity import PositivityCertificate, positive_prevariety_member
from .errors import ConsistencyError, InputFormatError, InvalidPlaneError, NotInPrevariety, PreconditionError
from .exact_lp import feasible_point, maximize
from .semiring_core import MinorIndex, TropicalMatrix, load_json_text, parse_rational, rational_str
from .tree_space import BicoloredTree, bicolored_tree_from_matrix, is_caterpillar


def _chart(point) -> tuple:
    last = point[-1]
    return tuple(x - last for x in point)


@dataclass(frozen=True)
class Face:
    base: tuple  # vertices, each a tuple of Fractions in the last-coordinate-zero chart
    rays: tuple  # 0/1 tuples
    flag: tuple | None = None  # (H1, H2) as sorted 1-based tuples

    @property
    def is_wing(self) -> bool:
        return bool(self.rays)

    def ray_support(self, ray) -> frozenset:
        return frozenset(i + 1 for i, v in enumerate(ray) if v)

    def to_json(self):
        out = {"base": [[rational_str(x) for x in v] for v in self.base], "rays": [list(r) for r in self.rays]}
        if self.flag:
            out["flag"] = {"H1": list(self.flag[0]), "H2": list(self.flag[1])}
        return out


@dataclass(frozen=True)
class TropicalPlaneDescription:
    d: int
    faces: tuple

    @classmethod
    def from_json(cls, data) -> "TropicalPlaneDescription":
        if isinstance(data, str):
            data = load_json_text(data)
        try:
            d = int(data["d"])
            faces = []
            for raw in data["faces"]:
                base = tuple(_chart(tuple(parse_rational(x) for x in v)) for v in raw["base"])
                rays = tuple(tuple(int(x) for x in r) for r in raw.get("rays", []))
                flag = None
                if raw.get("flag"):
                    flag = (tuple(sorted(int(h) for h in raw["flag"]["H1"])),
                            tuple(sorted(int(h) for h in raw["flag"]["H2"])))
                faces.append(Face(base, rays, flag))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"malformed plane JSON: {exc}") from None
        plane = cls(d, tuple(faces))
        plane.validate()
        return plane

    def to_json(self):
        return {"d": self.d, "faces": [f.to_json() for f in self.faces]}

    def validate(self):
        for k, face in enumerate(self.faces):
            if not face.base:
                raise InvalidPlaneError(f"face {k + 1} has no base vertex")
            if any(len(v) != self.d for v in face.base) or any(len(r) != self.d for r in face.rays):
                raise InvalidPlaneError(f"face {k + 1} has coordinates of the wrong length")
            for r in face.rays:
                if set(r) - {0, 1} or not any(r) or all(r):
                    raise InvalidPlaneError(f"face {k + 1}: rays must be proper nonzero 0/1 indicator vectors")
            if face.flag is not None:
                h1, h2 = map(set, face.flag)
                if not h1 or not h1 < h2 or not h2 <= set(range(1, self.d + 1)):
                    raise InvalidPlaneError(f"face {k + 1}: flag needs nonempty H1 strictly inside H2 within [d]")
            if _face_dimension(face, self.d) != 2:
                raise InvalidPlaneError(f"face {k + 1} is not two-dimensional")


def _face_dimension(face: Face, d) -> int:
    origin = face.base[0]
    vectors = [[a - b for a, b in zip(v, origin)] for v in face.base[1:]] + [list(r) for r in face.rays]
    return _rank([[1] * d] + vectors) - 1


def _rank(vectors) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    for c in range(len(rows[0]) if rows else 0):
        p = next((k for k in range(rank, len(rows)) if rows[k][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for k in range(rank + 1, len(rows)):
            f = rows[k][c] / rows[rank][c]
            rows[k] = [a - f * b for a, b in zip(rows[k], rows[rank])]
        rank += 1
    return rank


def _solve_exact(columns, rhs):
    """Gauss-Jordan over Fractions: ("none",), ("unique", x) or ("free",)."""
    rows = [[Fraction(c[i]) for c in columns] + [Fraction(rhs[i])] for i in range(len(rhs))]
    width = len(columns)
    pivots, r = [], 0
    for c in range(width):
        p = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[width] for row in rows[r:]):
        return ("none",)
    if len(pivots) < width:
        return ("free",)
    return ("unique", [rows[k][width] for k in range(width)])


def _relint_score(point, face: Face):
    """Max over representations of the smallest coefficient; None when the point is not in the face."""
    d = len(point)
    nb, nr = len(face.base), len(face.rays)
    columns = [list(v) + [1] for v in face.base] + [list(r) + [0] for r in face.rays] + [[1] * d + [0]]
    solved = _solve_exact(columns, list(point) + [1])
    if solved[0] == "none":
        return None
    if solved[0] == "unique":
        coeffs = solved[1][: nb + nr]
        low = min(coeffs)
        return None if low < 0 else min(low, Fraction(1))
    lam = sympy.symbols(f"l0:{len(face.base)}")
    mu = sympy.symbols(f"m0:{len(face.rays)}") if face.rays else ()
    t, s = sympy.symbols("t s")
    cons = [sympy.Eq(sum(lam), 1), s <= 1]
    for i in range(d):
        expr = sum(l * sympy.Rational(v[i]) for l, v in zip(lam, face.base))
        expr += sum(m * r[i] for m, r in zip(mu, face.rays)) + t
        cons.append(sympy.Eq(expr, sympy.Rational(point[i])))
    cons += [v >= s for v in lam] + [v >= s for v in mu]
    cons += [v >= 0 for v in lam] + [v >= 0 for v in mu]
    result = maximize(s, cons, list(lam) + list(mu) + [t, s])
    if result is None:
        return None
    return result[0]


@dataclass(frozen=True)
class FaceMarking:
    marks: tuple  # ((column, face), ...) 0-based
    non_generic: tuple  # ((column, reason, faces touching), ...)

    @property
    def mapping(self) -> dict:
        return dict(self.marks)

    @property
    def generic(self) -> bool:
        return not self.non_generic

    def to_json(self):
        return {
            "marks": {str(j + 1): f + 1 for j, f in self.marks},
            "non_generic": [{"column": j + 1, "reason": why, "faces": [f + 1 for f in fs]}
                            for j, why, fs in self.non_generic],
        }


def marked_faces(A: TropicalMatrix, plane: TropicalPlaneDescription) -> FaceMarking:
    if A.rows != plane.d:
        raise InvalidPlaneError(f"matrix has {A.rows} rows but the plane lives in dimension {plane.d}")
    marks, odd = [], []
    for j in range(A.cols):
        point = _chart(A.column(j))
        inside, boundary = [], []
        for k, face in enumerate(plane.faces):
            score = _relint_score(point, face)
            if score is None:
                continue
            (inside if score > 0 else boundary).append(k)
        if len(inside) == 1 and not boundary:
            marks.append((j, inside[0]))
        elif inside:
            odd.append((j, "interior of several faces", tuple(inside + boundary)))
        elif boundary:
            odd.append((j, "lower-dimensional face", tuple(boundary)))
        else:
            odd.append((j, "not on the plane", ()))
    return FaceMarking(tuple(marks), tuple(odd))


@dataclass(frozen=True)
class Starship:
    faces: tuple  # three 0-based face indices
    ray: tuple
    vertex: tuple

    def to_json(self):
        return {"faces": [f + 1 for f in self.faces], "ray": list(self.ray),
                "vertex": [rational_str(x) for x in self.vertex]}


def detect_starship(marking: FaceMarking, plane: TropicalPlaneDescription) -> Starship | None:
    marked = sorted({f for _, f in marking.marks if plane.faces[f].is_wing})
    for trio in itertools.combinations(marked, 3):
        faces = [plane.faces[k] for k in trio]
        rays = set(faces[0].rays).intersection(*(f.rays for f in faces[1:]))
        verts = set(faces[0].base).intersection(*(f.base for f in faces[1:]))
        if rays and verts:
            return Starship(trio, min(rays), min(verts))
    return None


def _flag_of(face: Face, ray) -> tuple:
    if face.flag is not None:
        return frozenset(face.flag[0]), frozenset(face.flag[1])
    supports = [face.ray_support(r) for r in face.rays]
    return face.ray_support(ray), frozenset().union(*supports)


def starship_projection(plane: TropicalPlaneDescription, starship: Starship) -> tuple:
    """Coordinates (h1, h2, h3, f), 1-based, distinguishing the three wings."""
    flags = [_flag_of(plane.faces[k], starship.ray) for k in starship.faces]
    firsts = {h1 for h1, _ in flags}
    if len(firsts) != 1 or len(next(iter(firsts))) != 1:
        raise InvalidPlaneError("starship wings must share a singleton first flat")
    (f,) = next(iter(firsts))
    seconds = [h2 for _, h2 in flags]
    if len(set(seconds)) != 3 or any(f not in h2 for h2 in seconds):
        raise InvalidPlaneError("second flats must be distinct and contain the common first flat")
    picks = []
    for k in range(3):
        others = seconds[(k + 1) % 3] | seconds[(k + 2) % 3]
        own = sorted(seconds[k] - others)
        if not own:
            raise InvalidPlaneError(f"second flat {sorted(seconds[k])} is covered by the other two")
        picks.append(own[0])
    return (picks[0], picks[1], picks[2], f)


def certify_nonpositive_rank3(A: TropicalMatrix, plane: TropicalPlaneDescription | None = None) -> PositivityCertificate:
    cert = positive_prevariety_member(A, 3)
    if plane is not None:
        star = detect_starship(marked_faces(A, plane), plane)
        if star is not None and cert.positive:
            raise ConsistencyError("a starship was found but every 4x4 minor is positive")
    return cert


def starship_minor(A: TropicalMatrix, plane: TropicalPlaneDescription, starship: Starship,
                   marking: FaceMarking, fourth_column: int) -> MinorIndex:
    """Rows from the projection lemma, columns: the three marking columns plus ``fourth_column`` (0-based)."""
    rows = starship_projection(plane, starship)
    by_face = {}
    for j, fc in marking.marks:
        by_face.setdefault(fc, j)
    cols = {by_face[k] for k in starship.faces} | {fourth_column}
    if len(cols) != 4:
        raise PreconditionError("fourth column must differ from the three marking columns")
    return MinorIndex(tuple(sorted(r - 1 for r in rows)), tuple(sorted(cols)))


# ------------------------------------------------------ tree arrangements


@dataclass(frozen=True)
class FacetTree:
    facet: int  # 1-based coordinate i'
    rows: tuple  # original 1-based rows
    cols: tuple  # original 1-based columns
    tree: BicoloredTree

    @property
    def is_caterpillar(self) -> bool:
        return is_caterpillar(self.tree)

    def original_label(self, label) -> str:
        idx = int(label[1:])
        return f"r{self.rows[idx - 1]}" if label[0] == "r" else f"g{self.cols[idx - 1]}"

    def to_json(self):
        return {
            "facet": self.facet,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "caterpillar": self.is_caterpillar,
            "splits": [
                {"part": [self.original_label(x) for x in s.labels()], "weight": rational_str(w)}
                for s, w in self.tree.weighted_splits
            ],
        }


def tree_arrangement(A: TropicalMatrix, jmap: Mapping[int, object]) -> list:
    d = A.rows
    missing = [i for i in range(1, d + 1) if not jmap.get(i)]
    if missing:
        raise PreconditionError(f"jmap has no columns for facets {missing}")
    out = []
    for facet in range(1, d + 1):
        cols = tuple(sorted({int(j) for j in jmap[facet]}))
        if any(not 1 <= j <= A.cols for j in cols):
            raise InputFormatError(f"jmap for facet {facet} names a column outside 1..{A.cols}")
        rows = tuple(i for i in range(1, d + 1) if i != facet)
        sub = TropicalMatrix.of([[A.entries[r - 1][c - 1] for c in cols] for r in rows])
        try:
            tree = bicolored_tree_from_matrix(sub)
        except NotInPrevariety as exc:
            raise NotInPrevariety(f"facet {facet}: {exc}") from None
        out.append(FacetTree(facet, rows, cols, tree))
    return out


def jmap_from_marking(marking: FaceMarking, plane: TropicalPlaneDescription) -> dict:
    """Column j goes to facet i' when e_{i'} lies in the recession cone of its marked face."""
    jmap = {i: [] for i in range(1, plane.d + 1)}
    for j, k in marking.marks:
        face = plane.faces[k]
        for i in range(1, plane.d + 1):
            if _in_recession_cone(face, i, plane.d):
                jmap[i].append(j + 1)
    return jmap


def _in_recession_cone(face: Face, facet: int, d: int) -> bool:
    if not face.rays:
        return False
    target = [1 if i == facet - 1 else 0 for i in range(d)]
    solved = _solve_exact([list(r) for r in face.rays] + [[1] * d], target)
    if solved[0] != "free":
        return solved[0] == "unique" and all(x >= 0 for x in solved[1][:-1])
    mu = sympy.symbols(f"m0:{len(face.rays)}")
    t = sympy.Symbol("t")
    cons = [m >= 0 for m in mu]
    for i in range(d):
        expr = sum(m * r[i] for m, r in zip(mu, face.rays)) + t
        cons.append(sympy.Eq(expr, target[i]))
    return feasible_point(cons, list(mu) + [t]) is not None


@dataclass(frozen=True)
class ArrangementReport:
    marking: FaceMarking | None
    starship: Starship | None
    jmap: dict
    trees: tuple = ()
    aborted: str | None = None
    projection: tuple | None = None
    extra: dict = field(default_factory=dict)

    @property
    def all_caterpillars(self) -> bool:
        return bool(self.trees) and all(t.is_caterpillar for t in self.trees)

    def to_json(self):
        return {
            "marking": self.marking.to_json() if self.marking else None,
            "starship": self.starship.to_json() if self.starship else None,
            "starship_rows": list(self.projection) if self.projection else None,
            "jmap": {str(k): list(v) for k, v in sorted(self.jmap.items())},
            "trees": [t.to_json() for t in self.trees],
            "all_caterpillars": self.all_caterpillars,
            "aborted": self.aborted,
        }


def arrangement_from_plane(A: TropicalMatrix, plane: TropicalPlaneDescription) -> ArrangementReport:
    marking = marked_faces(A, plane)
    star = detect_starship(marking, plane)
    projection = starship_projection(plane, star) if star else None
    if not marking.generic:
        return ArrangementReport(marking, star, {}, (), "non-generic configuration", projection)
    jmap = jmap_from_marking(marking, plane)
    trees = tuple(tree_arrangement(A, jmap))
    return ArrangementReport(marking, star, jmap, trees, None, projection)
