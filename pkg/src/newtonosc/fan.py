"""Rational cones and fans in the nonnegative orthant.

Fans keep one global, numbered list of rays; a cone is a sorted tuple of ray
indices.  All geometry is exact.
"""

from __future__ import annotations

import heapq
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg
from .polyhedron import Face, NewtonPolyhedron

Vector = tuple[int, ...]


class NotSimple(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    generators: tuple[Vector, ...]

    @property
    def dim(self):
        return linalg.rank(self.generators) if self.generators else 0

    def is_simple(self):
        return linalg.is_simple(self.generators)

    def multiplicity(self):
        return linalg.multiplicity(self.generators)

    def contains(self, x) -> bool:
        return cone_contains(self.generators, x)


@dataclass(frozen=True)
class Fan:
    rays: tuple[Vector, ...]
    cones: tuple[tuple[int, ...], ...]

    @property
    def n(self):
        return len(self.rays[0])

    def cone(self, i) -> Cone:
        return Cone(tuple(self.rays[k] for k in self.cones[i]))

    def maximal_cones(self) -> list[Cone]:
        return [self.cone(i) for i in range(len(self.cones))]

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}


@dataclass(frozen=True)
class NumericalData:
    ray: Vector
    N: int
    nu: int

    @property
    def candidate_pole(self) -> Fraction | None:
        return Fraction(-self.nu, self.N) if self.N else None


# --------------------------------------------------------------------------- exact cone geometry

def _coords(gens: Sequence[Sequence[int]], x: Sequence) -> list[Fraction] | None:
    """Coefficients of ``x`` in independent ``gens``; None if x is outside their span."""
    k = len(gens)
    M = [[g[r] for g in gens] + [x[r]] for r in range(len(x))]
    a, piv = linalg.rref(M)
    if k in piv:
        return None
    lam = [Fraction(0)] * k
    for row, p in zip(a, piv):
        lam[p] = row[k]
    return lam


def _span_complement(gens) -> list[list[Fraction]]:
    return linalg.nullspace([list(g) for g in gens])


def cone_facets(gens: Sequence[Vector]) -> list[frozenset[int]]:
    """Facets of the cone spanned by ``gens``, as sets of generator positions."""
    d = linalg.rank(gens)
    if d <= 1:
        return [frozenset()] if d == 1 else []
    comp = _span_complement(gens)
    out = set()
    for sub in combinations(range(len(gens)), d - 1):
        vecs = [list(gens[i]) for i in sub]
        if linalg.rank(vecs) != d - 1:
            continue
        ker = linalg.nullspace(vecs + comp)
        if len(ker) != 1:
            continue
        w = ker[0]
        vals = [sum(a * b for a, b in zip(w, g)) for g in gens]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            out.add(frozenset(i for i, v in enumerate(vals) if v == 0))
    return sorted(out, key=sorted)


def pulling_triangulation(idx: Sequence[int], rays: Sequence[Vector]) -> list[tuple[int, ...]]:
    """Simplicial subdivision pulling rays in increasing global index."""
    idx = sorted(idx)
    gens = [rays[i] for i in idx]
    d = linalg.rank(gens)
    if len(idx) == d:
        return [tuple(idx)]
    r = idx[0]
    out = []
    for fac in cone_facets(gens):
        sub = [idx[i] for i in fac]
        if r in sub:
            continue
        for simplex in pulling_triangulation(sub, rays):
            out.append(tuple(sorted((r,) + simplex)))
    return sorted(set(out))


def cone_contains(gens: Sequence[Vector], x: Sequence) -> bool:
    if not any(x):
        return True
    rays = list(gens)
    for simplex in pulling_triangulation(range(len(rays)), rays):
        lam = _coords([rays[i] for i in simplex], x)
        if lam is not None and all(v >= 0 for v in lam):
            return True
    return False


# --------------------------------------------------------------------------- fans from polyhedra

def normal_cone(P: NewtonPolyhedron, face: Face) -> Cone:
    if not face.compact:
        raise ValueError("normal cones are taken at compact faces")
    return Cone(tuple(P.facets[i].normal for i in sorted(face.active_facets)))


def normal_fan(P: NewtonPolyhedron) -> Fan:
    rays = tuple(fc.normal for fc in P.facets)
    cones = []
    for v in P.vertices:
        cones.append(tuple(i for i, fc in enumerate(P.facets) if fc.contains(v)))
    return Fan(rays, tuple(sorted(cones)))


def subdivide_simplicial(F: Fan) -> Fan:
    cones = set()
    for c in F.cones:
        cones.update(pulling_triangulation(c, F.rays))
    return Fan(F.rays, tuple(sorted(cones)))


def _lattice_group(M: list[list[int]]) -> list[tuple[Fraction, ...]]:
    """All of Z^k / M Z^k as fractional coefficient vectors in [0,1)^k."""
    k = len(M)
    Minv = linalg.inverse(M)
    gens = [tuple(Minv[r][c] % 1 for r in range(k)) for c in range(k)]
    zero = tuple(Fraction(0) for _ in range(k))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                h = tuple((a + b) % 1 for a, b in zip(el, g))
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(seen)


def interior_point(gens: Sequence[Vector]) -> Vector:
    """Shortest nonzero lattice point of the half-open fundamental parallelepiped.

    Length is the coefficient sum in the generators (smallest total child
    multiplicity), then the Euclidean norm, then lexicographic order.
    """
    k = len(gens)
    if k == len(gens[0]):
        return _interior_point_full(gens)
    B = linalg.saturation_basis(gens)
    # coordinates of each generator in the saturated basis
    cols = [[int(v) for v in _coords(B, g)] for g in gens]
    M = [[cols[j][i] for j in range(k)] for i in range(k)]
    best = None
    for lam in _lattice_group(M):
        if not any(lam):
            continue
        p = tuple(int(sum(l * g[r] for l, g in zip(lam, gens))) for r in range(len(gens[0])))
        key = (sum(lam), sum(x * x for x in p), p)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError("cone is already simple")
    return best[-1]


def _interior_point_full(gens) -> Vector:
    # integer version: lam = adj @ x / det, so lam * |det| runs over the group
    # generated by the columns of sign(det) * adj modulo |det|
    d, adj = _square_data(gens)
    D, sg = abs(d), (1 if d > 0 else -1)
    if D == 1:
        raise ValueError("cone is already simple")
    k = len(gens)
    steps = {tuple(sg * adj[r][j] % D for r in range(k)) for j in range(k)}
    zero = (0,) * k
    seen, frontier = {zero}, [zero]
    while frontier:
        nxt = []
        for el in frontier:
            for g in steps:
                h = tuple((a + b) % D for a, b in zip(el, g))
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    seen.discard(zero)
    best = None
    for num in seen:
        p = tuple(sum(l * g[r] for l, g in zip(num, gens)) // D for r in range(k))
        key = (sum(num), sum(x * x for x in p), p)
        if best is None or key < best:
            best = key
    return best[-1]


@lru_cache(maxsize=None)
def _square_data_cached(gens: tuple) -> tuple[int, tuple]:
    k = len(gens)
    M = [[g[r] for g in gens] for r in range(k)]
    return linalg.int_det(M), tuple(tuple(row) for row in linalg.adjugate(M))


def _square_data(gens) -> tuple[int, tuple]:
    """(det, adjugate) of the matrix with columns ``gens``; lam = adj @ x / det."""
    return _square_data_cached(tuple(tuple(int(x) for x in g) for g in gens))


def refine_simple(F: Fan, log: list | None = None) -> Fan:
    """Stellar subdivision until every cone is unimodular.

    ``log`` (optional) receives (parent multiplicity, [child multiplicities])
    per subdivided cone; children are always strictly smaller.
    """
    rays = list(F.rays)
    cones = [tuple(c) for c in F.cones]
    n = F.n
    for c in cones:
        if linalg.rank([rays[i] for i in c]) != len(c):
            raise ValueError("refine_simple needs a simplicial fan")
    if any(len(c) != n for c in cones):
        return _refine_general(rays, cones, log)
    live = set(cones)
    # ray index -> live cones using it
    inc: dict[int, set] = {}
    for c in cones:
        for i in c:
            inc.setdefault(i, set()).add(c)
    heap = [c for c in cones if abs(_square_data([rays[i] for i in c])[0]) != 1]
    heapq.heapify(heap)
    while heap:
        bad = heapq.heappop(heap)
        if bad not in live:
            continue
        gens = [rays[i] for i in bad]
        d, adj = _square_data(gens)
        p = interior_point(gens)
        rays.append(p)
        pi = len(rays) - 1
        num = [sum(a * x for a, x in zip(row, p)) * d for row in adj]
        # p is interior to the face spanned by supp; in a simplicial fan exactly
        # the cones containing that face get subdivided
        supp = {g for g, v in zip(bad, num) if v > 0}
        for c in sorted(set.intersection(*(inc[g] for g in supp))):
            live.discard(c)
            for i in c:
                inc[i].discard(c)
            children = [tuple(sorted([i for i in c if i != g] + [pi])) for g in c if g in supp]
            mults = [abs(_square_data([rays[i] for i in ch])[0]) for ch in children]
            if log is not None:
                log.append((abs(_square_data([rays[i] for i in c])[0]), mults))
            for ch, m in zip(children, mults):
                live.add(ch)
                for i in ch:
                    inc.setdefault(i, set()).add(ch)
                if m != 1:
                    heapq.heappush(heap, ch)
    return Fan(tuple(rays), tuple(sorted(live)))


def _refine_general(rays, cones, log):
    while True:
        bad = next((c for c in cones if not linalg.is_simple([rays[i] for i in c])), None)
        if bad is None:
            break
        p = interior_point([rays[i] for i in bad])
        if p in rays:
            pi = rays.index(p)
        else:
            rays.append(p)
            pi = len(rays) - 1
        new = []
        for c in cones:
            lam = _coords([rays[i] for i in c], p)
            if lam is None or any(v < 0 for v in lam):
                new.append(c)
                continue
            children = [tuple(sorted([i for i in c if i != g] + [pi]))
                        for g, l in zip(c, lam) if l > 0]
            if log is not None:
                log.append((linalg.multiplicity([rays[i] for i in c]),
                            [linalg.multiplicity([rays[i] for i in ch]) for ch in children]))
            new.extend(children)
        cones = new
    return Fan(tuple(rays), tuple(sorted(set(cones))))


def subordinate_simple_fan(P: NewtonPolyhedron) -> Fan:
    return refine_simple(subdivide_simplicial(normal_fan(P)))


# --------------------------------------------------------------------------- relations

def _membership(gens):
    """Exact membership test for cone(gens), via full-dimensional simplicial pieces."""
    n = len(gens[0])
    if linalg.rank(gens) != n:
        return lambda x: cone_contains(gens, x)
    pieces = []
    for simplex in pulling_triangulation(range(len(gens)), gens):
        d, adj = _square_data([gens[i] for i in simplex])
        pieces.append((d, adj))

    def test(x):
        for d, adj in pieces:
            if all(sum(a * y for a, y in zip(row, x)) * d >= 0 for row in adj):
                return True
        return False
    return test


def is_finer(F2: Fan, F1: Fan) -> bool:
    tests = [_membership(b.generators) for b in F1.maximal_cones()]
    hint = 0
    for c in F2.maximal_cones():
        order = tests[hint:] + tests[:hint]
        for k, t in enumerate(order):
            if all(t(g) for g in c.generators):
                hint = (hint + k) % len(tests)
                break
        else:
            return False
    return True


def covers_orthant(F: Fan) -> bool:
    """Exact wall check for a simplicial fan of full-dimensional cones."""
    n = F.n
    if not F.cones:
        return False
    walls: dict[tuple[int, ...], list[int]] = {}
    for c in F.cones:
        gens = [F.rays[i] for i in c]
        if len(c) != n or any(x < 0 for g in gens for x in g):
            return False
        d, adj = _square_data(gens)
        if d == 0:
            return False
        for k, omit in enumerate(c):
            wall = tuple(i for i in c if i != omit)
            # row k of the adjugate vanishes on the wall and takes the value d at the omitted ray
            w = adj[k]
            lead = next(x for x in w if x != 0)
            walls.setdefault(wall, []).append(1 if (d > 0) == (lead > 0) else -1)
    for wall, sides in walls.items():
        vecs = [F.rays[i] for i in wall]
        boundary = any(all(v[j] == 0 for v in vecs) for j in range(n))
        if boundary:
            if len(sides) != 1:
                return False
        elif sorted(sides) != [-1, 1]:
            return False
    return True


def transition_matrix(c1: Cone, c2: Cone) -> list[list[int]]:
    """Column j: coordinates of the j-th generator of c1 in the basis c2."""
    n = len(c1.generators[0])
    for c in (c1, c2):
        if len(c.generators) != n or not linalg.is_simple(c.generators):
            raise NotSimple("transition matrices need simple full-dimensional cones")
    G1 = [[g[r] for g in c1.generators] for r in range(n)]
    G2 = [[g[r] for g in c2.generators] for r in range(n)]
    A = linalg.matmul(linalg.inverse(G2), G1)
    return [[int(x) for x in row] for row in A]


# --------------------------------------------------------------------------- numerical data

def numerical_data(ray: Sequence[int], P: NewtonPolyhedron) -> NumericalData:
    ray = tuple(int(x) for x in ray)
    return NumericalData(ray, int(P.trace_value(ray)), sum(ray))


def instability_fan(F: Fan, j: int) -> Fan:
    n = F.n
    ej = tuple(int(i == j) for i in range(n))
    rays = list(F.rays)
    if ej not in rays:
        rays.append(ej)
    e_idx = rays.index(ej)
    cones = set()
    for c in F.cones:
        base = [i for i in c if rays[i][j] == 0]
        cand = tuple(sorted(set(base + [e_idx])))
        if linalg.rank([rays[i] for i in cand]) == n:
            cones.add(cand)
    maximal = [c for c in cones if not any(set(c) < set(d) for d in cones)]
    used = sorted({i for c in maximal for i in c})
    remap = {old: new for new, old in enumerate(used)}
    return Fan(tuple(rays[i] for i in used),
               tuple(sorted(tuple(sorted(remap[i] for i in c)) for c in maximal)))


def multiplicity_bound(F: Fan, P: NewtonPolyhedron, s) -> int:
    s = Fraction(s)
    data = [numerical_data(r, P) for r in F.rays]
    hit = [d.N != 0 and Fraction(d.nu, d.N) == -s for d in data]
    return max((sum(hit[i] for i in c) for c in F.cones), default=0)


def candidate_poles(F: Fan, P: NewtonPolyhedron) -> dict[Fraction, int]:
    poles = {d.candidate_pole for d in (numerical_data(r, P) for r in F.rays)}
    poles.discard(None)
    return {p: multiplicity_bound(F, P, p) for p in sorted(poles, reverse=True)}
