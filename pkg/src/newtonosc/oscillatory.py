"""Direct quadrature of oscillatory integrals and least-squares extraction of mu.

The 1-D workhorse is composite Gauss-Legendre on panels whose widths follow the
local phase speed t*|f'|, so each panel sees a bounded number of oscillations.
Two rule orders on the same panels give the error estimate; panels are halved
until the estimate meets the tolerance.  Higher dimensions iterate the 1-D rule
(or factor into 1-D integrals for separable phases with a product amplitude).
"""

from __future__ import annotations

import csv
import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .polynomial import Polynomial
from .spectral import MU_FACTOR, DiagonalReport

GENERIC_MAX_DIM = 3
GENERIC_MAX_T = 1e4

_RULES = {k: np.polynomial.legendre.leggauss(k) for k in (16, 24)}


class DimensionGuard(ValueError):
    pass


class IllConditioned(ValueError):
    pass


class DomainError(ValueError):
    pass


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class Amplitude:
    """phi0 * exp(1 - 1/(1 - |x/r|^2)), or a product of 1-D bumps."""

    kind: str = "bump"
    radius: float = 0.5
    value_at_zero: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bump", "product_bump"):
            raise ValueError(f"unknown amplitude kind {self.kind!r}")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float)) / self.radius
        if self.kind == "bump":
            return self.value_at_zero * _bump(np.sqrt((X ** 2).sum(axis=1)))
        return self.value_at_zero * np.prod(_bump(X), axis=1)

    def chord(self, prefix: Sequence[float]) -> float:
        if self.kind == "product_bump":
            return self.radius if all(abs(p) < self.radius for p in prefix) else 0.0
        rem = self.radius ** 2 - sum(p * p for p in prefix)
        return math.sqrt(rem) if rem > 0 else 0.0


# --------------------------------------------------------------------------- 1-D engine

def _gl(func, edges, order):
    x, w = _RULES[order]
    a, b = edges[:-1, None], edges[1:, None]
    X = (a + b) / 2 + (b - a) / 2 * x[None, :]
    W = (b - a) / 2 * w[None, :]
    return complex((func(X.ravel()).reshape(X.shape) * W).sum())


def _sign_changes(g, xs):
    v = g(xs)
    idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
    roots = [brentq(lambda z: float(g(np.array([z]))[0]), xs[i], xs[i + 1]) for i in idx]
    roots += list(xs[np.flatnonzero(v == 0)])
    return roots


def osc_quad(func: Callable, a: float, b: float, rate: Callable | None = None,
             tol: float = 1e-6, base: int = 16, kinks: Callable | None = None,
             max_refine: int = 6, phase: Callable | None = None) -> tuple[complex, float]:
    """Integral of ``func`` over [a, b] with panels sized by ``rate`` (rad per unit).

    Alternatively ``phase`` gives the phase itself and its variation is used.
    ``kinks`` is an optional real function whose sign changes become panel edges.
    """
    if b <= a:
        return 0j, 0.0
    xs = np.linspace(a, b, 4097)
    steps = np.full(len(xs) - 1, base / (b - a)) * np.diff(xs)
    if phase is not None:
        steps = steps + np.abs(np.diff(phase(xs))) / math.pi
    elif rate is not None:
        r = np.asarray(rate(xs), dtype=float)
        steps = steps + (r[1:] + r[:-1]) / 2 * np.diff(xs) / math.pi
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    k = max(int(math.ceil(cum[-1])), 1)
    edges = np.interp(np.linspace(0, cum[-1], k + 1), cum, xs)
    if kinks is not None:
        extra = [r for r in _sign_changes(kinks, xs) if a < r < b]
        edges = np.unique(np.concatenate([edges, extra]))
    edges[0], edges[-1] = a, b
    for _ in range(max_refine):
        lo, hi = _gl(func, edges, 16), _gl(func, edges, 24)
        err = abs(hi - lo)
        if err <= tol * max(1.0, abs(hi)):
            return hi, err
        mids = (edges[:-1] + edges[1:]) / 2
        edges = np.sort(np.concatenate([edges, mids]))
    return hi, err


# --------------------------------------------------------------------------- phases

def _is_separable(f: Polynomial) -> bool:
    return all(sum(1 for k in e if k) <= 1 for e in f.terms)


def _univariate_parts(f: Polynomial) -> list[np.ndarray]:
    parts = []
    for i in range(f.n):
        deg = max([e[i] for e in f.terms] + [0])
        c = np.zeros(deg + 1)
        for e, v in f.terms.items():
            if e[i] and sum(e) == e[i]:
                c[e[i]] += float(v)
        parts.append(c)
    return parts


def _poly1(c):
    return np.polynomial.Polynomial(c)


@dataclass
class OscResult:
    value: complex
    error: float


def _separable(f: Polynomial, amp: Amplitude, t: float, tol: float) -> OscResult:
    r = amp.radius
    total, rel = complex(amp.value_at_zero), 0.0
    for c in _univariate_parts(f):
        p = _poly1(c)

        def func(x, p=p):
            return np.exp(1j * t * p(x)) * _bump(x / r)

        v, e = osc_quad(func, -r, r, tol=tol / f.n, phase=lambda x, p=p: t * p(x))
        total *= v
        rel += e / max(abs(v), 1e-300)
    return OscResult(total, rel * abs(total))


def _sample_points(amp, prefix, n, d, k=5):
    # coarse grid of the trailing coordinates used to bound the phase speed
    c = amp.chord(prefix)
    axis = np.linspace(-c, c, k)
    rest = n - d - 1
    if rest == 0:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*([axis] * rest), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _nested(f: Polynomial, amp: Amplitude, kernel, t: float, tol: float,
            prefix: tuple = (), grads=None, kink=False) -> tuple[complex, float]:
    n, d = f.n, len(prefix)
    grads = grads or [f.derivative(i) for i in range(n)]
    c = amp.chord(prefix)
    if c <= 0:
        return 0j, 0.0
    if d == n - 1:
        def pts(x):
            return np.column_stack([np.full(len(x), p) for p in prefix] + [x])

        def func(x):
            X = pts(x)
            return kernel(f.evaluate_many(X)) * amp(X)

        phase = (lambda x: t * f.evaluate_many(pts(x))) if t else None
        kinks = (lambda x: f.evaluate_many(pts(x))) if kink else None
        return osc_quad(func, -c, c, tol=tol, kinks=kinks, phase=phase)
    errs = []

    def func(xs):
        out = np.empty(len(xs), dtype=complex)
        for i, x in enumerate(xs):
            v, e = _nested(f, amp, kernel, t, tol, prefix + (float(x),), grads, kink)
            out[i] = v
            errs.append(e)
        return out

    def rate(xs):
        S = _sample_points(amp, prefix, n, d)
        out = np.zeros(len(xs))
        for row in S:
            X = np.column_stack([np.full(len(xs), p) for p in prefix] + [xs]
                                + [np.full(len(xs), s) for s in row])
            out = np.maximum(out, t * np.abs(grads[d].evaluate_many(X)))
        return out

    v, e = osc_quad(func, -c, c, rate if t else None, tol, base=12)
    return v, e + 2 * c * (max(errs) if errs else 0.0)


def eval_osc_integral(f: Polynomial, amp: Amplitude, t: float, tol: float = 1e-6) -> OscResult:
    """Integral of exp(i t f(x)) phi(x) over R^n."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    if f.n == 1 or (_is_separable(f) and amp.kind == "product_bump"):
        return _separable(f, amp, t, tol)
    if f.n > GENERIC_MAX_DIM:
        raise DimensionGuard(f"non-separable quadrature limited to n <= {GENERIC_MAX_DIM}")
    if t > GENERIC_MAX_T:
        raise DimensionGuard(f"generic quadrature limited to t <= {GENERIC_MAX_T:g}")
    v, e = _nested(f, amp, lambda v: np.exp(1j * t * v), t, tol)
    return OscResult(v, e)


def amplitude_integral(amp: Amplitude, n: int, tol: float = 1e-10) -> float:
    return eval_osc_integral(Polynomial(n, {tuple([2] + [0] * (n - 1)): 1}), amp, 0.0, tol).value.real


def zeta_eval(f: Polynomial, amp: Amplitude, s: complex, sign: int = 1, tol: float = 1e-6) -> OscResult:
    """Integral of f_+^s phi (sign=+1) or f_-^s phi (sign=-1), for Re s > 0."""
    if complex(s).real <= 0:
        raise DomainError("zeta_eval is only defined for Re(s) > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if f.n > GENERIC_MAX_DIM:
        raise DimensionGuard(f"quadrature limited to n <= {GENERIC_MAX_DIM}")

    def kernel(v):
        w = sign * v
        out = np.zeros(len(w), dtype=complex)
        pos = w > 0
        out[pos] = np.exp(s * np.log(w[pos]))
        return out

    v, e = _nested(f, amp, kernel, 0.0, tol, kink=True)
    return OscResult(v, e)


# --------------------------------------------------------------------------- model integral

@dataclass(frozen=True)
class ModelParams:
    eps: float
    eta: float
    theta0: float = 1.0

    def __post_init__(self):
        if self.eps == 0:
            raise ValueError("eps must be nonzero")
        if self.eta <= 0:
            raise ValueError("eta must be positive")


def model_integral_asymptotic(p: ModelParams, t: float) -> complex:
    if t <= 0:
        raise DomainError("t must be positive")
    sgn = 1 if p.eps > 0 else -1
    return (p.theta0 * math.gamma(p.eta) * (t * abs(p.eps)) ** (-p.eta)
            * cmath.exp(1j * sgn * math.pi * p.eta / 2))


def model_integral(p: ModelParams, t: float, tol: float = 1e-8) -> OscResult:
    """Numeric value of int_0^1 exp(i t eps z) z^(eta-1) theta(z) dz.

    theta is the half bump theta0*exp(1 - 1/(1 - z^2)); substituting z = u^(1/eta)
    removes the endpoint singularity.
    """
    q = 1.0 / p.eta

    def func(u):
        z = u ** q
        return q * p.theta0 * np.exp(1j * t * p.eps * z) * _bump(z)

    v, e = osc_quad(func, 0.0, 1.0, tol=tol, phase=lambda u: t * p.eps * u ** q)
    return OscResult(v, e)


# --------------------------------------------------------------------------- fitting

@dataclass
class FitReport:
    mu_est: complex
    stderr: float
    t_grid: np.ndarray
    model: str
    s0: Fraction
    rho: int
    coefficients: np.ndarray
    delta: float
    star_corrected: bool = False
    samples: np.ndarray = field(default=None, repr=False)
    sample_errors: np.ndarray = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "method": "osc_fit",
            "mu_re": self.mu_est.real, "mu_im": self.mu_est.imag,
            "stderr": self.stderr, "model": self.model,
            "t_min": float(self.t_grid[0]), "t_max": float(self.t_grid[-1]),
            "count": int(len(self.t_grid)), "delta": self.delta,
            "s0_num": self.s0.numerator, "s0_den": self.s0.denominator,
            "rho": self.rho, "star_corrected": self.star_corrected,
        }


def least_squares_mu(t: np.ndarray, samples: np.ndarray, s0: float, rho: int,
                     delta: float = 0.5) -> tuple[np.ndarray, np.ndarray, str]:
    """Complex least squares for (mu, c); returns (coefficients, stderrs, model)."""
    t = np.asarray(t, dtype=float)
    L = np.log(t)
    first = t ** s0 * L ** (rho - 1)
    if rho >= 2:
        second, model = t ** s0 * L ** (rho - 2), "two_term"
    else:
        second, model = t ** (s0 - delta), "two_term"
    X = np.column_stack([first, second]).astype(complex)
    # column scaling keeps the condition number meaningful
    scale = np.abs(X).max(axis=0)
    Xs = X / scale
    if np.linalg.cond(Xs) > 1e10:
        raise IllConditioned("design matrix is ill-conditioned; widen the t range")
    coef, *_ = np.linalg.lstsq(Xs, samples, rcond=None)
    resid = samples - Xs @ coef
    dof = max(len(t) - 2, 1)
    sigma2 = float(np.vdot(resid, resid).real) / dof
    cov = sigma2 * np.linalg.inv(Xs.conj().T @ Xs)
    return coef / scale, np.sqrt(np.abs(np.diag(cov))) / scale, model


def fit_leading(f: Polynomial, amp: Amplitude, report: DiagonalReport, t_min: float = 1e2,
                t_max: float = 1e4, count: int = 20, delta: float = 0.5,
                tol: float = 1e-8) -> FitReport:
    t = np.logspace(math.log10(t_min), math.log10(t_max), count)
    vals = np.empty(count, dtype=complex)
    errs = np.empty(count)
    for k, tk in enumerate(t):
        r = eval_osc_integral(f, amp, float(tk), tol)
        vals[k], errs[k] = r.value, r.error
    s0, rho, star = report.s0, report.rho, False
    if report.s0_integral:
        # multiply by the y^2 factor and fit the starred expansion instead
        y2 = Polynomial(1, {(2,): 1})
        one = Amplitude("product_bump", amp.radius, 1.0)
        for k, tk in enumerate(t):
            j = eval_osc_integral(y2, one, float(tk), tol)
            errs[k] = abs(vals[k]) * j.error + abs(j.value) * errs[k]
            vals[k] *= j.value
        s0, star = s0 - Fraction(1, 2), True
    coef, se, model = least_squares_mu(t, vals, float(s0), rho, delta)
    mu = coef[0] * (MU_FACTOR if star else 1.0)
    return FitReport(complex(mu), float(se[0]) * (abs(MU_FACTOR) if star else 1.0), t, model,
                     s0, rho, coef, delta, star, vals, errs)


def write_samples(path: str, t, values, errors) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "re", "im", "err_estimate"])
        for tk, v, e in zip(t, values, errors):
            w.writerow([repr(float(tk)), repr(float(v.real)), repr(float(v.imag)), repr(float(e))])
