"""Leading coefficient of the oscillatory expansion by closed forms and residues.

Three routes meet here:

* the explicit simplex formula (``explicit_mu``), a product of Gamma values and
  a sum over sign patterns;
* the residue route (``residue_via_theorem1``): an exact volume factor times a
  face integral evaluated by quadrature, per orthant, combined by ``combine_mu``;
* ``complex_prefactor`` which only reports the exact combinatorial part.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import linalg
from .fan import pulling_triangulation
from .polyhedron import NewtonPolyhedron, face_polynomial, newton_polyhedron
from .polynomial import Polynomial, sign_patterns
from .spectral import Analysis, DiagonalReport, analyze, sharp_conditions


class NonPositiveWeight(ValueError):
    pass


class IntegralExponent(ValueError):
    pass


class NonConvergent(ValueError):
    pass


class Unsupported(ValueError):
    pass


# --------------------------------------------------------------------------- simplex data

def _column_matrix(columns: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(columns)
    if any(len(c) != n for c in columns):
        raise ValueError("need n columns of length n")
    return [[columns[j][i] for j in range(n)] for i in range(n)]


def gamma_weights(columns: Sequence[Sequence[int]]) -> tuple[tuple[Fraction, ...], Fraction]:
    """Solve sum_i gamma_i a_i = (1,...,1); returns (gamma, s0)."""
    M = _column_matrix(columns)
    gamma = tuple(linalg.solve(M, [1] * len(M)))
    if any(g <= 0 for g in gamma):
        raise NonPositiveWeight(f"weights {gamma} are not all positive")
    return gamma, -sum(gamma)


@dataclass(frozen=True)
class SimplexData:
    A: tuple[tuple[int, ...], ...]          # columns a_1..a_n
    eps: tuple[Fraction, ...]
    gamma: tuple[Fraction, ...]
    s0: Fraction

    def __post_init__(self):
        n = self.n
        if len(self.eps) != n or len(self.gamma) != n:
            raise ValueError("inconsistent simplex data")
        if any(e == 0 for e in self.eps):
            raise ValueError("coefficients must be nonzero")
        M = _column_matrix(self.A)
        if linalg.det(M) == 0:
            raise linalg.SingularMatrix("exponent vectors are dependent")
        if any(g <= 0 for g in self.gamma):
            raise NonPositiveWeight("weights must be positive")
        if sum(self.gamma) != -self.s0:
            raise ValueError("weights do not sum to -s0")

    @property
    def n(self):
        return len(self.A)

    @property
    def det(self) -> Fraction:
        return linalg.det(_column_matrix(self.A))

    def polynomial(self) -> Polynomial:
        return Polynomial(self.n, {tuple(a): e for a, e in zip(self.A, self.eps)})


def simplex_data(columns: Sequence[Sequence[int]], eps: Sequence) -> SimplexData:
    gamma, s0 = gamma_weights(columns)
    return SimplexData(tuple(tuple(int(x) for x in c) for c in columns),
                       tuple(Fraction(e) for e in eps), gamma, s0)


def simplex_from_polynomial(f: Polynomial, report: DiagonalReport | None = None) -> SimplexData:
    """SimplexData when f is n monomials whose simplex is tau0; else Unsupported."""
    if len(f) != f.n:
        raise Unsupported("explicit formula needs exactly n terms")
    cols = list(f.terms)
    try:
        S = simplex_data(cols, list(f.terms.values()))
    except (linalg.SingularMatrix, NonPositiveWeight) as exc:
        raise Unsupported(f"explicit formula unavailable: {exc}") from None
    if report is not None and (not report.compact or set(report.tau0.vertices) != set(cols)):
        raise Unsupported("the simplex of exponents is not the face tau0")
    return S


def conjecture_sum(S: SimplexData) -> complex:
    """Sum over beta in {-1,1}^n of prod_j exp(sign(eps_j beta^{a_j}) i pi gamma_j / 2)."""
    total = 0j
    for beta in sign_patterns(S.n):
        q = Fraction(0)          # angle in units of pi/2
        for a, e, g in zip(S.A, S.eps, S.gamma):
            s = 1 if e > 0 else -1
            for b, k in zip(beta, a):
                if b < 0 and k % 2:
                    s = -s
            q += s * g
        q %= 4
        ang = math.pi * float(q) / 2
        total += complex(math.cos(ang), math.sin(ang))
    return total


def explicit_mu(S: SimplexData, phi0: float = 1.0) -> complex:
    if S.s0.denominator == 1:
        raise IntegralExponent("explicit formula assumes a non-integral s0")
    pref = phi0 / abs(float(S.det))
    for g, e in zip(S.gamma, S.eps):
        pref *= math.gamma(float(g)) * abs(float(e)) ** (-float(g))
    return pref * conjecture_sum(S)


def combine_mu(mu_plus: float, mu_minus: float, s0: Fraction, rho: int) -> complex:
    s0 = Fraction(s0)
    if s0.denominator == 1:
        raise IntegralExponent("combination formula needs a non-integral s0")
    x = float(s0)
    return (math.gamma(-x) / math.factorial(rho - 1)
            * (mu_plus * cmath.exp(-1j * math.pi * x / 2) + mu_minus * cmath.exp(1j * math.pi * x / 2)))


# --------------------------------------------------------------------------- volume factor

@dataclass(frozen=True)
class VolumeFactor:
    value: Fraction
    pieces: tuple[tuple[tuple[int, ...], Fraction], ...]


def volume_factor(P: NewtonPolyhedron, report: DiagonalReport) -> VolumeFactor:
    if not report.compact:
        raise Unsupported(f"tau0 is not compact (m = {report.m}); the amplitude factor "
                          "would depend on the trailing variables")
    if any(N == 0 for N in report.offsets):
        raise ValueError("a facet through tau0 has offset 0")
    n, rho = report.n, report.rho
    rays = report.normals
    comp = report.permutation[rho:]
    pieces = []
    for simplex in pulling_triangulation(range(len(rays)), rays):
        cols = [[Fraction(x, report.offsets[i]) for x in rays[i]] for i in simplex]
        cols += [[int(r == j) for r in range(n)] for j in comp]
        pieces.append((simplex, abs(linalg.det(cols))))
    return VolumeFactor(sum(p[1] for p in pieces), tuple(pieces))


def complex_prefactor(P: NewtonPolyhedron, report: DiagonalReport) -> tuple[Fraction, int]:
    """(n! Vol(C), rho), standing for pi^rho * n! Vol(C)."""
    return volume_factor(P, report).value, report.rho


# --------------------------------------------------------------------------- face integral

def _restricted(ftau: Polynomial, report: DiagonalReport) -> Polynomial:
    return ftau.permute(report.permutation).substitute_ones(range(report.rho))


def _pv_1d(coeffs: np.ndarray, s0: float, sign: int, tol: float) -> tuple[float, float]:
    """Integral over (0, inf) of (sign*h)_+^s0, h given by ascending coefficients."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    deg = len(coeffs) - 1
    if deg <= 0:
        c = sign * coeffs[0]
        if c > 0:
            raise NonConvergent("integrand is a positive constant on a half-line")
        return 0.0, 0.0
    roots = np.roots(coeffs[::-1])
    pos = sorted({float(r.real) for r in roots if abs(r.imag) <= 1e-9 * max(1, abs(r)) and r.real > 0})
    lead = sign * coeffs[-1]
    if lead > 0 and deg * s0 >= -1:
        raise NonConvergent("integrand decays too slowly at infinity")
    poly = np.polynomial.Polynomial(coeffs)

    def near(r, direction, is_root, width):
        # h(r + direction*u) re-expanded about r keeps full relative precision for tiny u;
        # u = w^q then flattens the endpoint power u^(k*s0)
        c = poly(np.polynomial.Polynomial([r, direction])).coef.copy()
        if is_root:
            c[0] = 0.0
        big = np.abs(c).max()
        k = int(np.flatnonzero(np.abs(c) > 1e-12 * big)[0])
        alpha = k * s0
        if alpha <= -1:
            raise NonConvergent("non-integrable singularity at a real root")
        q = 1.0 / (1.0 + alpha) if alpha < 0 else 1.0
        h = np.polynomial.Polynomial(c)

        def g(w):
            w = float(w)
            u = w ** q
            v = sign * float(h(u))
            if v <= 0:
                return 0.0
            return q * w ** (q - 1) * v ** s0 if w > 0 else 0.0
        return g, width ** (1.0 / q)

    b = 2.0 * max(pos[-1] if pos else 0.0, 1.0)
    pts = [0.0] + pos + [b]
    roots = set(pos)
    val, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (lo + hi)
        for r, d, w in ((lo, 1.0, mid - lo), (hi, -1.0, hi - mid)):
            g, top = near(r, d, r in roots, w)
            v, e = mpmath.quad(g, [0.0, top], error=True)
            val += v
            err += e

    # y = 1/u: the integrand is u^beta (sign*hrev(u))^s0 with hrev(0) = leading coefficient,
    # and u = w^q again removes the endpoint power
    rev = np.polynomial.Polynomial(coeffs[::-1])
    beta = -deg * s0 - 2.0
    qt = 1.0 / (1.0 + beta) if beta < 0 else 1.0

    def tail(w):
        w = float(w)
        if w == 0.0:
            return 0.0
        u = w ** qt
        v = sign * float(rev(u))
        return qt * w ** (qt - 1) * u ** beta * v ** s0 if v > 0 else 0.0

    tv, te = mpmath.quad(tail, [0.0, (1.0 / b) ** (1.0 / qt)], error=True)
    total, e = float(val + tv), float(err + te)
    if not math.isfinite(total):
        raise NonConvergent("quadrature did not converge")
    return total, e


def pv_integral(ftau: Polynomial, report: DiagonalReport, sign: int = 1,
                tol: float = 1e-8) -> tuple[float, float]:
    """Face integral of (sign * f_tau0)_+^s0 with the first rho axes set to 1.

    Returns (value, error estimate).  Zero-dimensional case: the value of the
    constant sign part raised to s0 (so 1 for a unit coefficient).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    h = _restricted(ftau, report)
    s0 = float(report.s0)
    d = h.n
    if d == 0:
        c = sign * float(sum(h.terms.values()))
        return (c ** s0 if c > 0 else 0.0), 0.0
    if d == 1:
        deg = max(e[0] for e in h.terms)
        coeffs = np.zeros(deg + 1)
        for e, c in h.terms.items():
            coeffs[e[0]] = float(c)
        return _pv_1d(coeffs, s0, sign, tol)
    if d == 2:
        return _pv_2d(h, s0, sign, tol)
    raise Unsupported(f"face integral over {d} dimensions is not implemented")


def _pv_2d(h: Polynomial, s0: float, sign: int, tol: float) -> tuple[float, float]:
    deg2 = max(e[1] for e in h.terms)
    errs = []

    def inner(y1):
        y1 = float(y1)
        coeffs = np.zeros(deg2 + 1)
        for e, c in h.terms.items():
            coeffs[e[1]] += float(c) * y1 ** e[0]
        try:
            v, e = _pv_1d(coeffs, s0, sign, tol)
        except NonConvergent:
            if y1 == 0.0:
                return 0.0
            raise
        errs.append(e)
        return v

    def tail(u):
        u = float(u)
        return 0.0 if u == 0.0 else inner(1.0 / u) / (u * u)

    with mpmath.workdps(15):
        a, ea = mpmath.quad(inner, [0.0, 1.0], error=True, maxdegree=6)
        b, eb = mpmath.quad(tail, [0.0, 1.0], error=True, maxdegree=6)
    return float(a + b), float(ea + eb) + (max(errs) if errs else 0.0)


# --------------------------------------------------------------------------- residue route

@dataclass
class ResidueReport:
    method: str
    mu: complex
    mu_plus: float | None = None
    mu_minus: float | None = None
    mu_bar_plus: dict = field(default_factory=dict)     # sign pattern -> value
    mu_bar_minus: dict = field(default_factory=dict)
    vol_factor: Fraction | None = None
    rho: int | None = None
    s0: Fraction | None = None
    star_corrected: bool = False
    error_estimate: float = 0.0

    def to_json(self) -> dict:
        vf = self.vol_factor
        return {
            "method": self.method,
            "mu_re": self.mu.real, "mu_im": self.mu.imag,
            "mu_plus": self.mu_plus, "mu_minus": self.mu_minus,
            "vol_factor_num": vf.numerator if vf is not None else None,
            "vol_factor_den": vf.denominator if vf is not None else None,
            "rho": self.rho,
            "s0_num": self.s0.numerator if self.s0 is not None else None,
            "s0_den": self.s0.denominator if self.s0 is not None else None,
            "star_corrected": self.star_corrected,
            "error_estimate": self.error_estimate,
        }


def _working_phase(f: Polynomial, a: Analysis):
    if a.star is None:
        return f, a.diagonal, 1.0, False
    fs, rs, factor = a.star
    return fs, rs, factor, True


def theorem3(f: Polynomial, phi0: float = 1.0, analysis: Analysis | None = None) -> ResidueReport:
    a = analysis or analyze(f)
    rep = a.diagonal
    if rep.s0_integral:
        raise IntegralExponent("s0 is an integer; the starred phase is not a simplex of the "
                               "required form, so the explicit formula is unavailable")
    S = simplex_from_polynomial(f, rep)
    return ResidueReport("theorem3", explicit_mu(S, phi0), rho=rep.rho, s0=rep.s0,
                         error_estimate=1e-15 * abs(explicit_mu(S, phi0)))


def residue_via_theorem1(f: Polynomial, phi0: float = 1.0, analysis: Analysis | None = None,
                         seed: int = 0) -> ResidueReport:
    a = analysis or analyze(f, seed)
    g, rep, factor, starred = _working_phase(f, a)
    P = a.polyhedron if not starred else newton_polyhedron(g)
    if not rep.compact:
        raise Unsupported(f"tau0 is not compact (m = {rep.m}); phi(0) would have to be "
                          "replaced by a function of the trailing variables")
    sharp = a.sharp if not starred else sharp_conditions(g, rep, seed, P)
    if not sharp.any_certified():
        raise NonConvergent("no convergence condition is certified; the principal value "
                            "is only defined by analytic continuation")
    vol = volume_factor(P, rep)
    plus, minus = {}, {}
    err = 0.0
    for theta in sign_patterns(g.n):
        ftau = face_polynomial(g.sign_flip(theta), rep.tau0, P)
        vp, ep = pv_integral(ftau, rep, 1)
        vm, em = pv_integral(ftau, rep, -1)
        plus[theta] = float(vol.value) * phi0 * vp
        minus[theta] = float(vol.value) * phi0 * vm
        err += float(vol.value) * abs(phi0) * (ep + em)
    mp_, mm_ = sum(plus.values()), sum(minus.values())
    mu = combine_mu(mp_, mm_, rep.s0, rep.rho) * factor
    scale = abs(math.gamma(-float(rep.s0)) / math.factorial(rep.rho - 1) * abs(factor))
    return ResidueReport("theorem1_pv", mu, mp_, mm_, plus, minus, vol.value, rep.rho,
                         rep.s0, starred, err * scale)
