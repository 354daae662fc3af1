"""Exhaustive scan of simplex phases: stability versus the sign-pattern sum.

Each configuration is a set of n exponent vectors (columns of A) with unit
coefficients eps in {-1, 1}.  Configurations are enumerated once per orbit of
simultaneous row and column permutations.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Iterator

import numpy as np

from . import linalg
from .fan import instability_fan, multiplicity_bound, subordinate_simple_fan
from .polyhedron import NewtonPolyhedron, face_polynomial
from .polynomial import Polynomial, sign_patterns
from .residue import SimplexData, conjecture_sum, gamma_weights, NonPositiveWeight
from .spectral import (DiagonalReport, TriState, Verdict, diagonal_analysis, zero_free_check)

MAX_N = 4
MAX_BOUND = 6
ZERO = 1e-12


class GuardExceeded(ValueError):
    pass


def _guard(n, bound):
    if not 1 <= n <= MAX_N or not 0 <= bound <= MAX_BOUND:
        raise GuardExceeded(f"scan limited to n <= {MAX_N}, bound <= {MAX_BOUND}")


def _columns(n, bound):
    return [c for c in product(range(bound + 1), repeat=n) if sum(c) >= 2]


def _row_perm(cols, sigma):
    return tuple(sorted(tuple(c[s] for s in sigma) for c in cols))


def _candidate_sets(n: int, bound: int):
    """Column sets (sorted tuples) with det != 0 and positive weights, numpy prefilter."""
    cols = _columns(n, bound)
    if len(cols) < n:
        return
    C = np.array(cols, dtype=float)
    ones = np.ones(n)
    chunk = 200_000
    it = combinations(range(len(cols)), n)
    while True:
        block = np.array(list(_take(it, chunk)), dtype=np.int32)
        if block.size == 0:
            break
        mats = C[block].transpose(0, 2, 1)        # columns are exponent vectors
        det = np.linalg.det(mats)
        ok = np.abs(det) > 0.5
        mats, block = mats[ok], block[ok]
        gam = np.linalg.solve(mats, np.broadcast_to(ones, (len(mats), n))[..., None])[..., 0]
        ok = (gam > 1e-9).all(axis=1)
        for row in block[ok]:
            yield tuple(cols[i] for i in row)


def _take(it, k):
    for _, x in zip(range(k), it):
        yield x


def canonical_form(cols) -> tuple:
    n = len(cols[0])
    return min(_row_perm(cols, s) for s in permutations(range(n)))


def _stabilizer(cols) -> list[tuple[int, ...]]:
    """Column permutations induced by row permutations fixing the column set."""
    n = len(cols[0])
    pos = {c: i for i, c in enumerate(cols)}
    out = []
    for s in permutations(range(n)):
        img = [tuple(c[k] for k in s) for c in cols]
        if all(v in pos for v in img):
            out.append(tuple(pos[v] for v in img))
    return out


def _eps_representatives(cols):
    stab = _stabilizer(cols)
    n = len(cols)
    for eps in sign_patterns(n):
        orbit = []
        for pi in stab:
            e = [0] * n
            for j, target in enumerate(pi):
                e[target] = eps[j]
            orbit.append(tuple(e))
            # f -> -f conjugates the sum and keeps stability
            orbit.append(tuple(-x for x in e))
        if eps == max(orbit):      # all-plus first in sign_patterns order
            yield eps


def enumerate_simplices(n: int, bound: int) -> Iterator[SimplexData]:
    _guard(n, bound)
    mats = []
    for cols in _candidate_sets(n, bound):
        if canonical_form(cols) != cols:
            continue
        try:
            gamma, s0 = gamma_weights(cols)
        except (linalg.SingularMatrix, NonPositiveWeight):
            continue
        mats.append((cols, gamma, s0))
    mats.sort()
    for cols, gamma, s0 in mats:
        for eps in _eps_representatives(cols):
            yield SimplexData(cols, tuple(Fraction(e) for e in eps), gamma, s0)


# --------------------------------------------------------------------------- classification

@dataclass
class _Geometry:
    P: NewtonPolyhedron
    report: DiagonalReport
    simplex_face: bool
    # per variable: None when the slab conditions fail, else the faces in x_j = 1
    slab_faces: list


_GEOM: dict = {}
_ZF: dict = {}


def _geometry(cols) -> _Geometry:
    g = _GEOM.get(cols)
    if g is None:
        P = NewtonPolyhedron(cols, len(cols))
        rep = diagonal_analysis(P)
        tau = rep.tau0
        slab = []
        for j in range(P.n):
            ok = (j not in tau.recession and all(v[j] in (0, 1) for v in tau.vertices)
                  and any(v[j] == 1 for v in tau.vertices))
            if ok:
                slab.append([fc for fc in P.compact_faces() if all(v[j] == 1 for v in fc.vertices)])
            else:
                slab.append(None)
        simplex = rep.compact and set(tau.vertices) == set(cols)
        g = _GEOM[cols] = _Geometry(P, rep, simplex, slab)
    return g


def _zero_free_cached(f: Polynomial, face, P) -> TriState:
    g = face_polynomial(f, face, P)
    key = tuple(sorted(g.terms.items()))
    hit = _ZF.get(key)
    if hit is None:
        hit = _ZF[key] = zero_free_check(g)
    return hit


def _stability_verdict(f: Polynomial, geo: _Geometry) -> tuple[str, int | None]:
    """('stable' | 'unstable' | 'undecided', unstable variable)."""
    undecided = False
    for j, faces in enumerate(geo.slab_faces):
        if faces is None:
            continue
        verdicts = [_zero_free_cached(f, fc, geo.P) for fc in faces]
        if any(v.falsified for v in verdicts):
            continue
        if all(v.certified for v in verdicts):
            return "unstable", j
        undecided = True
    return ("undecided", None) if undecided else ("stable", None)


@dataclass
class ScanItem:
    simplex: SimplexData
    stability: str
    unstable_variable: int | None
    sum: complex
    s0_integral: bool
    simplex_is_tau0: bool
    instability_bound: int | None = None
    rho: int = 0

    @property
    def abs_sum(self) -> float:
        return abs(self.sum)

    def is_violation(self) -> bool:
        if self.s0_integral or not self.simplex_is_tau0:
            return False
        if self.stability == "stable":
            return self.abs_sum < ZERO
        if self.stability == "unstable":
            return self.abs_sum >= ZERO
        return False


def classify_and_sum(S: SimplexData, theorem2: bool = False) -> ScanItem:
    cols = tuple(tuple(c) for c in S.A)
    geo = _geometry(cols)
    f = S.polynomial()
    verdict, j = _stability_verdict(f, geo)
    item = ScanItem(S, verdict, j, conjecture_sum(S), S.s0.denominator == 1, geo.simplex_face,
                    rho=geo.report.rho)
    # off-simplex items carry the polyhedron's own s0, which can differ from the simplex one
    if theorem2 and verdict == "unstable" and geo.report.s0.denominator != 1:
        item.instability_bound = _instability_bound(cols, j, geo)
    return item


_FANS: dict = {}


def _instability_bound(cols, j, geo) -> int:
    key = (cols, j)
    if key not in _FANS:
        F = subordinate_simple_fan(geo.P)
        _FANS[key] = multiplicity_bound(instability_fan(F, j), geo.P, geo.report.s0)
    return _FANS[key]


# --------------------------------------------------------------------------- scan

@dataclass
class ScanReport:
    n: int
    bound: int
    total: int = 0
    eligible: int = 0
    stable_count: int = 0
    unstable_count: int = 0
    undecided_count: int = 0
    integral_s0_count: int = 0
    non_face_count: int = 0
    min_abs_sum_stable: float | None = None
    min_witness: ScanItem | None = None
    max_abs_sum_unstable: float | None = None
    max_instability_bound: int | None = None
    violations: list = field(default_factory=list)
    items: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "n": self.n, "bound": self.bound, "total": self.total, "eligible": self.eligible,
            "stable_count": self.stable_count, "unstable_count": self.unstable_count,
            "undecided_count": self.undecided_count,
            "integral_s0_count": self.integral_s0_count,
            "non_face_count": self.non_face_count,
            "min_abs_sum_stable": self.min_abs_sum_stable,
            "min_abs_sum_stable_witness": _item_json(self.min_witness) if self.min_witness else None,
            "max_abs_sum_unstable": self.max_abs_sum_unstable,
            "max_instability_bound": self.max_instability_bound,
            "violations": [_item_json(v) for v in self.violations],
        }


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _pair(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _item_json(it: ScanItem) -> dict:
    S = it.simplex
    return {"A": [list(c) for c in S.A], "eps": [int(e) for e in S.eps],
            "gamma": [_pair(g) for g in S.gamma], "s0": _pair(S.s0),
            "stability": it.stability, "sum_re": it.sum.real, "sum_im": it.sum.imag,
            "abs_sum": it.abs_sum}


CSV_COLUMNS = ["n", "A", "eps_signs", "gamma", "s0", "stable_verdict", "sum_re", "sum_im",
               "abs_sum", "s0_integral", "tau0_is_simplex"]


def _g(x: float) -> str:
    return format(x, ".15e")


def items_csv(items) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for it in items:
        S = it.simplex
        w.writerow([S.n, " ".join(str(x) for c in S.A for x in c),
                    " ".join("+" if e > 0 else "-" for e in S.eps),
                    " ".join(_frac(g) for g in S.gamma), _frac(S.s0), it.stability,
                    _g(it.sum.real), _g(it.sum.imag), _g(it.abs_sum),
                    int(it.s0_integral), int(it.simplex_is_tau0)])
    return buf.getvalue()


def scan(n: int, bound: int, theorem2: bool = True, keep_items: bool = True) -> ScanReport:
    _guard(n, bound)
    rep = ScanReport(n, bound)
    for S in enumerate_simplices(n, bound):
        it = classify_and_sum(S, theorem2)
        rep.total += 1
        if keep_items:
            rep.items.append(it)
        if it.s0_integral:
            rep.integral_s0_count += 1
        if not it.simplex_is_tau0:
            rep.non_face_count += 1
        if it.stability == "stable":
            rep.stable_count += 1
        elif it.stability == "unstable":
            rep.unstable_count += 1
        else:
            rep.undecided_count += 1
        if it.s0_integral or not it.simplex_is_tau0 or it.stability == "undecided":
            continue
        rep.eligible += 1
        if it.stability == "stable":
            if rep.min_abs_sum_stable is None or it.abs_sum < rep.min_abs_sum_stable:
                rep.min_abs_sum_stable, rep.min_witness = it.abs_sum, it
        else:
            if rep.max_abs_sum_unstable is None or it.abs_sum > rep.max_abs_sum_unstable:
                rep.max_abs_sum_unstable = it.abs_sum
            if it.instability_bound is not None:
                rep.max_instability_bound = max(rep.max_instability_bound or 0, it.instability_bound)
        if it.is_violation():
            rep.violations.append(it)
    return rep


def write_outputs(rep: ScanReport, csv_path: str | None = None, json_path: str | None = None):
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            fh.write(items_csv(rep.items))
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(rep.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
