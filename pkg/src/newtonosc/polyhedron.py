"""Newton polyhedra of polynomials: facets, vertices, faces and traces.

The polyhedron is ``conv(supp f) + R_+^n``.  Facets are found by brute force
over small generator sets (support points plus coordinate directions), which is
exact and fast enough for the desk-scale inputs this package targets
(n <= 6, a few dozen support points).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .polynomial import Exponent, Polynomial, ZeroPolynomial


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: int

    def value(self, k: Sequence) -> object:
        return sum(a * b for a, b in zip(self.normal, k))

    def contains(self, k: Sequence) -> bool:
        return self.value(k) == self.offset


@dataclass(frozen=True)
class Face:
    """A face, named by the set of facets containing it."""

    active_facets: frozenset[int]
    vertices: tuple[Exponent, ...]
    recession: tuple[int, ...]
    dim: int

    @property
    def compact(self) -> bool:
        return not self.recession

    def __contains__(self, point) -> bool:  # vertex membership only
        return tuple(point) in self.vertices


def support(f: Polynomial) -> set[Exponent]:
    return f.support()


def _minimal_points(points: Iterable[Exponent]) -> list[Exponent]:
    pts = sorted(set(points))
    out = []
    for p in pts:
        dominated = any(q != p and all(a <= b for a, b in zip(q, p)) for q in pts)
        if not dominated:
            out.append(p)
    return out


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


class NewtonPolyhedron:
    """The Newton polyhedron of a finite support set in N^n."""

    def __init__(self, support: Iterable[Sequence[int]], n: int | None = None):
        pts = {tuple(int(x) for x in p) for p in support}
        if not pts:
            raise ValueError("empty support")
        if n is None:
            n = len(next(iter(pts)))
        if any(len(p) != n for p in pts):
            raise ValueError("support points have inconsistent dimension")
        if any(x < 0 for p in pts for x in p):
            raise ValueError("support points must be nonnegative")
        self.n = n
        self.support = frozenset(pts)
        self._minimal = _minimal_points(pts)
        self.facets: tuple[Facet, ...] = tuple(self._enumerate_facets())
        self.vertices: tuple[Exponent, ...] = tuple(
            p for p in self._minimal
            if linalg.rank([f.normal for f in self.facets if f.contains(p)]) == n
        )

    # -- construction -----------------------------------------------------------
    def _enumerate_facets(self) -> list[Facet]:
        n, pts = self.n, self._minimal
        found: dict[tuple[int, ...], Facet] = {}
        rejected: set[tuple[int, ...]] = set()
        for k in range(1, n + 1):
            for T in combinations(pts, k):
                base = T[0]
                diffs = [[a - b for a, b in zip(p, base)] for p in T[1:]]
                if diffs and linalg.rank(diffs) != len(diffs):
                    continue
                for D in combinations(range(n), n - k):
                    rows = diffs + [[int(i == d) for i in range(n)] for d in D]
                    if not rows:
                        # n == 1, single point: the normal is e_1
                        ker = [[Fraction(1)]]
                    else:
                        ker = linalg.nullspace(rows)
                    if len(ker) != 1:
                        continue
                    xi = linalg.integer_direction(ker[0])
                    if all(x <= 0 for x in xi):
                        xi = tuple(-x for x in xi)
                    if any(x < 0 for x in xi) or xi in found or xi in rejected:
                        continue
                    facet = self._facet_from_normal(xi)
                    if facet is None:
                        rejected.add(xi)
                    else:
                        found[xi] = facet
        return sorted(found.values(), key=lambda f: f.normal, reverse=True)

    def _facet_from_normal(self, xi: tuple[int, ...]) -> Facet | None:
        offset = min(_dot(xi, p) for p in self._minimal)
        active = [p for p in self._minimal if _dot(xi, p) == offset]
        dirs = [[int(i == j) for i in range(self.n)] for j in range(self.n) if xi[j] == 0]
        if linalg.affine_dim(active, dirs) != self.n - 1:
            return None
        return Facet(xi, offset)

    # -- faces ------------------------------------------------------------------
    def face(self, active: Iterable[int]) -> Face | None:
        """The face cut out by the given facets (closed under containment)."""
        S = frozenset(active)
        verts = [v for v in self.vertices if all(self.facets[i].contains(v) for i in S)]
        if not verts:
            return None
        rec = tuple(j for j in range(self.n) if all(self.facets[i].normal[j] == 0 for i in S))
        closure = frozenset(
            i for i, fc in enumerate(self.facets)
            if all(fc.contains(v) for v in verts) and all(fc.normal[j] == 0 for j in rec)
        )
        if closure != S:
            return self.face(closure)
        dirs = [[int(i == j) for i in range(self.n)] for j in rec]
        return Face(S, tuple(sorted(verts)), rec, linalg.affine_dim(verts, dirs))

    def smallest_face_containing(self, points: Iterable[Sequence]) -> Face:
        pts = [tuple(p) for p in points]
        S = [i for i, fc in enumerate(self.facets) if all(fc.contains(p) for p in pts)]
        return self.face(S)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        seen: dict[frozenset, Face] = {}
        frontier = []
        for i in range(len(self.facets)):
            fc = self.face([i])
            if fc.active_facets not in seen:
                seen[fc.active_facets] = fc
                frontier.append(fc)
        while frontier:
            nxt = []
            for fc in frontier:
                for i in range(len(self.facets)):
                    if i in fc.active_facets:
                        continue
                    sub = self.face(fc.active_facets | {i})
                    if sub is not None and sub.active_facets not in seen:
                        seen[sub.active_facets] = sub
                        nxt.append(sub)
            frontier = nxt
        return tuple(sorted(seen.values(), key=lambda f: (f.dim, f.vertices, f.recession)))

    def compact_faces(self) -> list[Face]:
        return [f for f in self.faces if f.compact]

    def on_face(self, point: Sequence, face: Face) -> bool:
        """Exact test that ``point`` lies on ``face``."""
        if not all(fc.value(point) >= fc.offset for fc in self.facets):
            return False
        return all(self.facets[i].contains(point) for i in face.active_facets)

    def contains(self, point: Sequence) -> bool:
        return all(fc.value(point) >= fc.offset for fc in self.facets)

    # -- traces -----------------------------------------------------------------
    def trace_value(self, a: Sequence) -> object:
        if any(x < 0 for x in a):
            raise ValueError("trace is defined on the nonnegative orthant")
        return min(_dot(a, v) for v in self.vertices)

    def trace_face(self, a: Sequence) -> Face:
        if any(x < 0 for x in a):
            raise ValueError("trace is defined on the nonnegative orthant")
        if all(x == 0 for x in a):
            raise ValueError("trace of the zero vector is the whole polyhedron")
        m = self.trace_value(a)
        pts = [v for v in self.vertices if _dot(a, v) == m]
        # zero weights leave the matching recession directions inside the minimizing set
        pts += [tuple(x + (i == j) for i, x in enumerate(pts[0])) for j in range(self.n) if a[j] == 0]
        return self.smallest_face_containing(pts)

    def __repr__(self):
        return f"NewtonPolyhedron(n={self.n}, facets={len(self.facets)}, vertices={len(self.vertices)})"


def build(points: Iterable[Sequence[int]], n: int | None = None) -> NewtonPolyhedron:
    return NewtonPolyhedron(points, n)


def newton_polyhedron(f: Polynomial) -> NewtonPolyhedron:
    if not f:
        raise ZeroPolynomial("the zero polynomial has no Newton polyhedron")
    return NewtonPolyhedron(f.support(), f.n)


def trace_value(P: NewtonPolyhedron, a: Sequence) -> object:
    return P.trace_value(a)


def trace_face(P: NewtonPolyhedron, a: Sequence) -> Face:
    return P.trace_face(a)


def compact_faces(P: NewtonPolyhedron) -> list[Face]:
    return P.compact_faces()


def face_polynomial(f: Polynomial, face: Face, P: NewtonPolyhedron | None = None) -> Polynomial:
    """Restriction of ``f`` to the exponents lying on ``face``."""
    P = P or newton_polyhedron(f)
    return f.restrict(e for e in f.terms if all(P.facets[i].contains(e) for i in face.active_facets))
