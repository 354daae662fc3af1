"""Diagonal data, stability classification and the semi-decision checks.

The "no zero / no critical point on the torus" conditions are only
semi-decidable with the tools used here, so every such check returns a
:class:`TriState`.  Certified verdicts come from exact sign rules; Falsified
verdicts carry a witness found numerically (and verified exactly when the
witness has rational coordinates); anything else is Undecided.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import numpy as np

from . import linalg
from .polyhedron import Face, NewtonPolyhedron, face_polynomial, newton_polyhedron
from .polynomial import Polynomial, ZeroPolynomial, sign_patterns

# numeric falsifier defaults
GRID_POINTS = 11
GRID_LOG10 = 2.0
GRID_BUDGET = 250_000
STARTS = 50
NEWTON_STEPS = 120
RESIDUAL_TOL = 1e-10


class Verdict(enum.Enum):
    CERTIFIED = "certified"
    FALSIFIED = "falsified"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class TriState:
    verdict: Verdict
    witness: tuple | None = None
    tag: str = ""
    residual: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.FALSIFIED and self.witness is None:
            raise ValueError("a falsified verdict needs a witness")

    @property
    def certified(self):
        return self.verdict is Verdict.CERTIFIED

    @property
    def falsified(self):
        return self.verdict is Verdict.FALSIFIED

    @property
    def undecided(self):
        return self.verdict is Verdict.UNDECIDED


def _certified(tag, note=""):
    return TriState(Verdict.CERTIFIED, tag=tag, note=note)


def _falsified(witness, tag, residual=None, note=""):
    return TriState(Verdict.FALSIFIED, tuple(witness), tag, residual, note)


UNDECIDED = TriState(Verdict.UNDECIDED, tag="exhausted")


# --------------------------------------------------------------------------- diagonal data

@dataclass(frozen=True)
class DiagonalReport:
    t0: Fraction
    s0: Fraction
    tau0: Face
    rho: int
    m: int
    permutation: tuple[int, ...]
    compact: bool
    s0_integral: bool
    normals: tuple[tuple[int, ...], ...]   # facet normals through tau0
    offsets: tuple[int, ...]

    @property
    def n(self):
        return len(self.permutation)


def diagonal_analysis(P: NewtonPolyhedron) -> DiagonalReport:
    n = P.n
    t0 = max(Fraction(fc.offset, sum(fc.normal)) for fc in P.facets if sum(fc.normal) > 0)
    if t0 <= 0:
        raise ValueError("polyhedron does not come from a polynomial vanishing at the origin")
    d = [t0] * n
    tau0 = P.smallest_face_containing([d])
    active = sorted(tau0.active_facets)
    normals = tuple(P.facets[i].normal for i in active)
    offsets = tuple(P.facets[i].offset for i in active)
    rho = n - tau0.dim
    # axes split: rref pivots of the normal matrix are the "first" rho axes,
    # recession axes go last, the rest sit in between
    _, pivots = linalg.rref(normals)
    rec = list(tau0.recession)
    middle = [j for j in range(n) if j not in pivots and j not in rec]
    perm = tuple(list(pivots) + middle + rec)
    s0 = -1 / t0
    return DiagonalReport(t0, s0, tau0, rho, n - len(rec), perm, tau0.compact,
                          s0.denominator == 1, normals, offsets)


# --------------------------------------------------------------------------- numeric helpers

def _grid(n: int, points: int = GRID_POINTS) -> np.ndarray:
    k = points
    while k > 3 and (k ** n) * (2 ** n) > GRID_BUDGET:
        k -= 2      # stay odd so 1.0 is a grid value
    axis = 10.0 ** np.linspace(-GRID_LOG10, GRID_LOG10, k)
    axis[k // 2] = 1.0
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _monomials(E: np.ndarray, X: np.ndarray) -> np.ndarray:
    # X positive; returns (points, terms)
    return np.exp(np.log(X) @ E.T)


def _theta_signs(E: np.ndarray, theta) -> np.ndarray:
    odd = (E.astype(int) % 2).astype(bool)
    neg = np.array(theta) < 0
    return np.where((odd & neg).sum(axis=1) % 2, -1.0, 1.0)


def _nearest_one(idx, X, limit=5):
    # prefer witnesses with coordinates close to +-1
    order = np.argsort(np.abs(np.log(X[idx])).sum(axis=1), kind="stable")
    return idx[order][:limit]


def _exact_zero(g: Polynomial, x) -> bool:
    return g([Fraction(float(v)) for v in x]) == 0


def _bisect_sign_change(g: Polynomial, theta, u0, u1, steps=80):
    """Bisection along a log-segment whose endpoints have opposite signs."""
    th = np.array(theta, dtype=float)

    def val(lam):
        return g(list(th * np.exp((1 - lam) * u0 + lam * u1)))

    lo, hi = 0.0, 1.0
    s_lo = math.copysign(1, val(lo))
    for _ in range(steps):
        mid = (lo + hi) / 2
        v = val(mid)
        if v == 0:
            lo = hi = mid
            break
        if math.copysign(1, v) == s_lo:
            lo = mid
        else:
            hi = mid
    lam = (lo + hi) / 2
    return th * np.exp((1 - lam) * u0 + lam * u1)


def _numeric_zero(g: Polynomial, seed: int = 0):
    n = g.n
    E = g.exponent_array()
    C = g.coefficient_array()
    X = _grid(n)
    M = _monomials(E, X)
    logX = np.log(X)
    for theta in sign_patterns(n):
        c = C * _theta_signs(E, theta)
        v = M @ c
        scale = M @ np.abs(c)
        hits = np.flatnonzero(np.abs(v) <= RESIDUAL_TOL * scale)
        for i in _nearest_one(hits, X):
            w = np.array(theta) * X[i]
            if _exact_zero(g, w):
                return _falsified([Fraction(float(a)) for a in w], "grid-exact", 0.0)
        if v.min() < 0 < v.max():
            i0, i1 = int(np.argmin(v)), int(np.argmax(v))
            w = _bisect_sign_change(g, theta, logX[i0], logX[i1])
            sc = float(np.abs(c) @ np.exp(E @ np.log(np.abs(w))))
            # endpoints are exact binary rationals, so the sign change is exact
            a = g([Fraction(float(s * x)) for s, x in zip(theta, X[i0])])
            b = g([Fraction(float(s * x)) for s, x in zip(theta, X[i1])])
            note = "intermediate-value certificate" if a < 0 < b else ""
            return _falsified([float(x) for x in w], "sign-change",
                              abs(float(g(list(w)))) / sc, note)
    # tangential zeros: Gauss-Newton on g in log coordinates, all starts at once
    rng = np.random.default_rng(seed)
    span = GRID_LOG10 * math.log(10)
    for theta in sign_patterns(n):
        c = C * _theta_signs(E, theta)
        U = rng.uniform(-span, span, size=(STARTS, n))
        for _ in range(NEWTON_STEPS):
            T = np.exp(U @ E.T) * c          # (starts, terms)
            v = T.sum(axis=1)
            grad = T @ E                      # d/du
            nrm = (grad ** 2).sum(axis=1)
            nrm[nrm == 0] = 1.0
            step = -(v / nrm)[:, None] * grad
            lens = np.linalg.norm(step, axis=1)
            step *= np.minimum(1.0, 1.0 / np.maximum(lens, 1e-300))[:, None]
            U = np.clip(U + step, -3 * span, 3 * span)
        T = np.exp(U @ E.T) * c
        res = np.abs(T.sum(axis=1)) / np.abs(T).sum(axis=1)
        best = int(np.argmin(res))
        if res[best] <= RESIDUAL_TOL:
            w = np.array(theta) * np.exp(U[best])
            return _falsified([float(x) for x in w], "newton", float(res[best]))
    return None


def _orthant_sign_rule(g: Polynomial) -> bool:
    for theta in sign_patterns(g.n):
        coeffs = g.sign_flip(theta).terms.values()
        if not (all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)):
            return False
    return True


def _binomial_witness(g: Polynomial):
    (a, c1), (b, c2) = g.terms.items()
    d = [x - y for x, y in zip(a, b)]
    i = next(k for k, x in enumerate(d) if x)
    r = abs(c2 / c1)
    for theta in sign_patterns(g.n):
        s1 = c1 * math.prod(t ** k for t, k in zip(theta, a))
        s2 = c2 * math.prod(t ** k for t, k in zip(theta, b))
        if (s1 > 0) != (s2 > 0):
            w = [Fraction(t) for t in theta]
            if r != 1:
                w[i] = theta[i] * float(r) ** (1.0 / d[i])
            val = g(w)
            if val == 0:
                return _falsified(w, "binomial", 0.0)
            scale = abs(float(c1)) * abs(math.prod(float(x) ** k for x, k in zip(w, a))) * 2
            return _falsified([float(x) for x in w], "binomial", abs(float(val)) / scale)
    return None


def zero_free_check(g: Polynomial, seed: int = 0) -> TriState:
    """Semi-decide whether ``g`` has no zero with all coordinates nonzero."""
    if not g:
        raise ZeroPolynomial("zero_free_check needs a nonzero polynomial")
    if _orthant_sign_rule(g):
        return _certified("orthant-sign")
    if len(g) == 2:
        return _binomial_witness(g)
    hit = _numeric_zero(g, seed)
    return hit if hit is not None else UNDECIDED


def _numeric_critical(g: Polynomial, seed: int = 0):
    n = g.n
    E = g.exponent_array()
    C = g.coefficient_array()
    X = _grid(n)
    M = _monomials(E, X)

    def exact_critical(w):
        q = [Fraction(float(a)) for a in w]
        return all(g.derivative(i)(q) == 0 for i in range(n))

    for theta in sign_patterns(n):
        c = C * _theta_signs(E, theta)
        G = (M * c) @ E                       # x_i * dg/dx_i on the grid
        scale = (M * np.abs(c)) @ E
        ok = np.all(np.abs(G) <= RESIDUAL_TOL * np.maximum(scale, 1e-300), axis=1)
        for i in _nearest_one(np.flatnonzero(ok), X):
            w = np.array(theta) * X[i]
            if exact_critical(w):
                return _falsified([Fraction(float(a)) for a in w], "grid-exact", 0.0)
    rng = np.random.default_rng(seed)
    span = GRID_LOG10 * math.log(10)
    EE = E[:, :, None] * E[:, None, :]        # (terms, n, n)
    for theta in sign_patterns(n):
        c = C * _theta_signs(E, theta)
        U = rng.uniform(-span, span, size=(STARTS, n))
        for _ in range(NEWTON_STEPS):
            T = np.exp(U @ E.T) * c
            F = T @ E                         # (starts, n)
            J = np.einsum("st,tij->sij", T, EE)
            step = -np.einsum("sij,sj->si", np.linalg.pinv(J), F)
            lens = np.linalg.norm(step, axis=1)
            step *= np.minimum(1.0, 1.0 / np.maximum(lens, 1e-300))[:, None]
            U = np.clip(U + step, -3 * span, 3 * span)
        T = np.exp(U @ E.T) * c
        res = np.abs(T @ E).max(axis=1) / np.maximum((np.abs(T) @ np.abs(E)).max(axis=1), 1e-300)
        best = int(np.argmin(res))
        if res[best] <= RESIDUAL_TOL:
            w = np.array(theta) * np.exp(U[best])
            return _falsified([float(x) for x in w], "newton", float(res[best]))
    return None


def face_nondegenerate(g: Polynomial, seed: int = 0) -> TriState:
    """No critical point of ``g`` on the torus (g a face polynomial)."""
    if len(g) == 1:
        return _certified("monomial")
    if linalg.rank(list(g.terms)) == len(g):
        return _certified("independent-exponents")
    zf = zero_free_check(g, seed)
    if zf.certified:
        # quasi-homogeneity: a critical point on the torus would be a zero
        return _certified("euler-zero-free")
    for i in range(g.n):
        dg = g.derivative(i)
        if dg and zero_free_check(dg, seed).certified:
            return _certified(f"partial-{i}-zero-free")
    hit = _numeric_critical(g, seed)
    return hit if hit is not None else UNDECIDED


def _aggregate(verdicts: Sequence[TriState]) -> TriState:
    for v in verdicts:
        if v.falsified:
            return v
    for v in verdicts:
        if v.undecided:
            return v
    return _certified("all-faces")


def nondegeneracy_check(f: Polynomial, seed: int = 0, P: NewtonPolyhedron | None = None) -> TriState:
    P = P or newton_polyhedron(f)
    return _aggregate([face_nondegenerate(face_polynomial(f, fc, P), seed)
                       for fc in P.compact_faces()])


# --------------------------------------------------------------------------- stability

@dataclass(frozen=True)
class StabilityReport:
    per_variable: tuple[tuple[int, TriState], ...]
    overall_stable: TriState


def instability_check(P: NewtonPolyhedron, f: Polynomial, j: int,
                      report: DiagonalReport | None = None, seed: int = 0) -> TriState:
    """Certified means tau0 is unstable with respect to variable ``j`` (0-based)."""
    if not 0 <= j < P.n:
        raise IndexError(f"variable index {j} out of range for n={P.n}")
    report = report or diagonal_analysis(P)
    tau0 = report.tau0
    witness = (j,)
    if j in tau0.recession or any(v[j] not in (0, 1) for v in tau0.vertices):
        return _falsified(witness, "outside-slab")
    if not any(v[j] == 1 for v in tau0.vertices):
        return _falsified(witness, "inside-coordinate-hyperplane")
    faces = [fc for fc in P.compact_faces() if all(v[j] == 1 for v in fc.vertices)]
    if not faces:
        return _certified("vacuous", note="no compact face lies in the hyperplane")
    undecided = None
    for fc in faces:
        zf = zero_free_check(face_polynomial(f, fc, P), seed)
        if zf.falsified:
            return _falsified(zf.witness, "face-has-zero", zf.residual)
        if zf.undecided:
            undecided = zf
    if undecided is not None:
        return TriState(Verdict.UNDECIDED, tag="face-zero-check-undecided")
    return _certified("slab+zero-free")


def stability(P: NewtonPolyhedron, f: Polynomial, report: DiagonalReport | None = None,
              seed: int = 0) -> StabilityReport:
    report = report or diagonal_analysis(P)
    per = tuple((j, instability_check(P, f, j, report, seed)) for j in range(P.n))
    if any(v.certified for _, v in per):
        j = next(j for j, v in per if v.certified)
        overall = _falsified((j,), "unstable")
    elif all(v.falsified for _, v in per):
        overall = _certified("stable")
    else:
        overall = TriState(Verdict.UNDECIDED, tag="instability-undecided")
    return StabilityReport(per, overall)


# --------------------------------------------------------------------------- sharp conditions

@dataclass(frozen=True)
class SharpConditions:
    a: TriState
    b: TriState
    c: TriState

    def any_certified(self):
        return self.a.certified or self.b.certified or self.c.certified


def _nonnegativity(f: Polynomial, seed: int = 0) -> TriState:
    if all(c > 0 for c in f.terms.values()) and all(k % 2 == 0 for e in f.terms for k in e):
        return _certified("even-exponents-positive-coefficients")
    for x in product((0, 1, -1, 2, -2), repeat=f.n):
        if f(x) < 0:
            return _falsified(x, "integer-sample", note=f"value {f(x)}")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(4096, f.n)) * 10.0 ** rng.uniform(-3, 1, size=(4096, 1))
    v = f.evaluate_many(X)
    i = int(np.argmin(v))
    if v[i] < 0:
        w = [Fraction(float(a)) for a in X[i]]
        if f(w) < 0:
            return _falsified(w, "random-sample", note=f"value {float(f(w)):.6g}")
    return UNDECIDED


def sharp_conditions(f: Polynomial, report: DiagonalReport, seed: int = 0,
                     P: NewtonPolyhedron | None = None) -> SharpConditions:
    a = _certified("exact") if report.s0 > -1 else _falsified((report.s0,), "exact")
    b = _nonnegativity(f, seed)
    s0 = report.s0
    if not report.compact:
        c = _falsified((report.m,), "noncompact")
    elif s0.denominator == 1 and s0 < 0 and s0.numerator % 2:
        c = _falsified((s0,), "odd-integer-s0")
    else:
        P = P or newton_polyhedron(f)
        zf = zero_free_check(face_polynomial(f, report.tau0, P), seed)
        c = _certified("zero-free") if zf.certified else zf
    return SharpConditions(a, b, c)


# --------------------------------------------------------------------------- star transform

MU_FACTOR = cmath.exp(-1j * math.pi / 4) / math.sqrt(math.pi)


class StarLawViolation(RuntimeError):
    pass


def star_transform(f: Polynomial, report: DiagonalReport | None = None):
    """Return (f + y^2, its diagonal report, mu_factor)."""
    report = report or diagonal_analysis(newton_polyhedron(f))
    fs = f.add_variable("y")
    sq = tuple([0] * f.n + [2])
    fs = fs + Polynomial(f.n + 1, {sq: 1}, fs.variables)
    rs = diagonal_analysis(newton_polyhedron(fs))
    if rs.s0 != report.s0 - Fraction(1, 2) or rs.rho != report.rho:
        raise StarLawViolation(f"s0*={rs.s0}, rho*={rs.rho} vs s0={report.s0}, rho={report.rho}")
    return fs, rs, MU_FACTOR


# --------------------------------------------------------------------------- projection condition

def projection_condition(f: Polynomial, report: DiagonalReport,
                         P: NewtonPolyhedron | None = None) -> list[tuple[tuple[int, ...], bool]]:
    """For every admissible ordering of the first rho axes, test tau0(g) = pi(tau0(f)).

    The returned tuple lists the rho-1 substituted axes followed by the kept one.
    """
    if not report.compact:
        raise ValueError("projection condition needs a compact tau0")
    P = P or newton_polyhedron(f)
    n, rho = f.n, report.rho
    ftau = face_polynomial(f, report.tau0, P)
    rec = set(report.tau0.recession)
    out = []
    for first in combinations([j for j in range(n) if j not in rec], rho):
        minor = [[nv[j] for j in first] for nv in report.normals]
        if linalg.rank(minor) != rho:
            continue
        for kept in first:
            subst = [j for j in first if j != kept]
            g = ftau.substitute_ones(subst)
            keep_idx = [j for j in range(n) if j not in subst]
            projected = {tuple(e[j] for j in keep_idx) for e in ftau.terms}
            ok = False
            if g:
                Pg = newton_polyhedron(g)
                rg = diagonal_analysis(Pg)
                ok = rg.compact and all(Pg.on_face(p, rg.tau0) for p in projected)
            out.append((tuple(subst) + (kept,), ok))
    return out


# --------------------------------------------------------------------------- pipeline

@dataclass
class Analysis:
    f: Polynomial
    polyhedron: NewtonPolyhedron
    diagonal: DiagonalReport
    stability: StabilityReport
    sharp: SharpConditions
    star: tuple | None = None          # (f*, report*, mu_factor) when s0 is an integer
    warnings: list[str] = field(default_factory=list)


def check_singular(f: Polynomial):
    if not f:
        raise ZeroPolynomial("zero polynomial")
    if not f.is_singular_at_origin():
        raise ValueError("phase must have a critical point at the origin with f(0) = 0 "
                         "(every term of total degree >= 2)")


def analyze(f: Polynomial, seed: int = 0) -> Analysis:
    check_singular(f)
    P = newton_polyhedron(f)
    rep = diagonal_analysis(P)
    st = stability(P, f, rep, seed)
    sh = sharp_conditions(f, rep, seed, P)
    out = Analysis(f, P, rep, st, sh)
    for j, v in st.per_variable:
        if v.undecided:
            out.warnings.append(f"instability w.r.t. {f.variables[j]} undecided")
        if v.tag == "vacuous":
            out.warnings.append(f"instability w.r.t. {f.variables[j]} holds vacuously")
    if rep.s0_integral:
        out.star = star_transform(f, rep)
        out.warnings.append("s0 is an integer: star transform f + y^2 applied")
    return out
