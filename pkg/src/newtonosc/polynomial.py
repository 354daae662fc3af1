"""Sparse polynomials with exact rational coefficients, plus a small parser.

Grammar accepted by :func:`parse` (whitespace-insensitive)::

    poly  := ['+'|'-'] term (('+'|'-') term)*
    term  := coeff ('*'? monom)* | monom ('*'? monom)*
    monom := var ('^' uint)?
    coeff := int ('/' uint)?
    var   := letter (letter | digit | '_')*
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class ZeroPolynomial(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Polynomial:
    """Map exponent tuple -> nonzero Fraction, in ``n`` variables."""

    n: int
    terms: Mapping[Exponent, Fraction]
    variables: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        clean = {}
        for exp, c in self.terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.n:
                raise ValueError(f"exponent {exp} has wrong length for n={self.n}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = Fraction(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        if not self.variables:
            names = tuple(f"x{i + 1}" for i in range(self.n))
            object.__setattr__(self, "variables", names)
        elif len(self.variables) != self.n:
            raise ValueError("variable names do not match n")

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], object]], n: int | None = None,
                   variables: Sequence[str] = ()):
        acc: dict[Exponent, Fraction] = {}
        items = [(tuple(e), Fraction(c)) for e, c in terms]
        if n is None:
            n = len(items[0][0]) if items else len(variables)
        for e, c in items:
            acc[e] = acc.get(e, Fraction(0)) + c
        return cls(n, acc, tuple(variables))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, 0) + c
        return Polynomial(self.n, acc, self.variables)

    def support(self) -> set[Exponent]:
        if not self.terms:
            raise ZeroPolynomial("the zero polynomial has empty support")
        return set(self.terms)

    def restrict(self, exponents: Iterable[Exponent]) -> "Polynomial":
        keep = set(exponents)
        return Polynomial(self.n, {e: c for e, c in self.terms.items() if e in keep},
                          self.variables)

    def sign_flip(self, theta: Sequence[int]) -> "Polynomial":
        """The polynomial ``x -> f(theta * x)`` for a sign pattern ``theta``."""
        out = {}
        for e, c in self.terms.items():
            s = 1
            for t, k in zip(theta, e):
                if t < 0 and k % 2:
                    s = -s
            out[e] = s * c
        return Polynomial(self.n, out, self.variables)

    def permute(self, perm: Sequence[int]) -> "Polynomial":
        """New variable i is old variable ``perm[i]``."""
        return Polynomial(self.n, {tuple(e[p] for p in perm): c for e, c in self.terms.items()},
                          tuple(self.variables[p] for p in perm))

    def add_variable(self, name: str = "y") -> "Polynomial":
        names = self.variables + (name if name not in self.variables else f"{name}_{self.n}",)
        return Polynomial(self.n + 1, {e + (0,): c for e, c in self.terms.items()}, names)

    def substitute_ones(self, indices: Sequence[int]) -> "Polynomial":
        """Set the listed variables to 1, dropping them (remaining order kept)."""
        keep = [i for i in range(self.n) if i not in set(indices)]
        acc: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = tuple(e[i] for i in keep)
            acc[k] = acc.get(k, 0) + c
        return Polynomial(len(keep), acc, tuple(self.variables[i] for i in keep))

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                k = list(e)
                k[i] -= 1
                out[tuple(k)] = c * e[i]
        return Polynomial(self.n, out, self.variables)

    def __call__(self, x: Sequence) -> object:
        """Evaluate exactly when ``x`` holds ints/Fractions, else in floats."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for xi, k in zip(x, e):
                if k:
                    term = term * xi ** k
            total = total + term
        return total

    def exponent_array(self) -> np.ndarray:
        return np.array(list(self.terms), dtype=float).reshape(len(self.terms), self.n)

    def coefficient_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.terms.values()])

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation at the rows of ``X`` (shape (m, n))."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for e, c in self.terms.items():
            term = np.full(X.shape[0], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * X[:, i] ** k
            out += term
        return out

    def term_scale_many(self, X: np.ndarray) -> np.ndarray:
        """Sum of absolute term values; the natural scale for a residual."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for e, c in self.terms.items():
            term = np.full(X.shape[0], abs(float(c)))
            for i, k in enumerate(e):
                if k:
                    term = term * np.abs(X[:, i]) ** k
            out += term
        return out

    def min_total_degree(self) -> int:
        return min(sum(e) for e in self.terms)

    def is_singular_at_origin(self) -> bool:
        """f(0) = 0 and grad f(0) = 0, i.e. every term has degree >= 2."""
        return bool(self.terms) and self.min_total_degree() >= 2

    def __str__(self):
        return emit(self)


def sign_patterns(n: int) -> list[tuple[int, ...]]:
    """All of {-1, 1}^n in a fixed order (all-plus first)."""
    return list(product((1, -1), repeat=n))


# --------------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    return tokens


def parse(text: str, variables: Sequence[str] | None = None) -> Polynomial:
    """Parse a polynomial expression into a :class:`Polynomial`.

    Variable order is first appearance unless ``variables`` is given.
    """
    if not text or not text.strip():
        raise ParseError("empty input", 0)
    tokens = _tokenize(text)
    names: list[str] = list(variables) if variables else []
    fixed = variables is not None
    raw_terms: list[tuple[dict[str, int], Fraction]] = []
    i = 0

    def peek(k=0):
        return tokens[i + k] if i + k < len(tokens) else None

    def expect_uint(what):
        nonlocal i
        tok = peek()
        if tok is None or tok[0] != "num":
            raise ParseError(f"expected {what}", tok[2] if tok else len(text))
        i += 1
        return int(tok[1])

    sign = 1
    tok = peek()
    if tok and tok[0] == "op" and tok[1] in "+-":
        sign = -1 if tok[1] == "-" else 1
        i += 1
    while True:
        coeff = Fraction(sign)
        monom: dict[str, int] = {}
        tok = peek()
        if tok is None:
            raise ParseError("expected a term", len(text))
        seen_factor = False
        if tok[0] == "num":
            i += 1
            c = Fraction(int(tok[1]))
            nxt = peek()
            if nxt and nxt[1] == "/":
                i += 1
                den = expect_uint("denominator")
                if den == 0:
                    raise ParseError("zero denominator", nxt[2])
                c /= den
            coeff *= c
            seen_factor = True
        while True:
            tok = peek()
            if tok and tok[1] == "*":
                i += 1
                tok = peek()
                if tok is None or tok[0] != "var":
                    raise ParseError("expected a variable after '*'", tok[2] if tok else len(text))
            if tok is None or tok[0] != "var":
                break
            i += 1
            name = tok[1]
            power = 1
            nxt = peek()
            if nxt and nxt[1] == "^":
                i += 1
                nxt2 = peek()
                if nxt2 and nxt2[1] == "-":
                    raise ParseError("negative exponent", nxt2[2])
                power = expect_uint("exponent")
            if name not in names:
                if fixed:
                    raise ParseError(f"undeclared variable {name!r}", tok[2])
                names.append(name)
            monom[name] = monom.get(name, 0) + power
            seen_factor = True
        if not seen_factor:
            tok = peek()
            raise ParseError("expected a coefficient or variable", tok[2] if tok else len(text))
        raw_terms.append((monom, coeff))
        tok = peek()
        if tok is None:
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            i += 1
            continue
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])

    n = len(names)
    acc: dict[Exponent, Fraction] = {}
    for monom, c in raw_terms:
        e = tuple(monom.get(v, 0) for v in names)
        acc[e] = acc.get(e, Fraction(0)) + c
    poly = Polynomial(n, acc, tuple(names))
    if not poly:
        raise ZeroPolynomial("expression simplifies to the zero polynomial")
    return poly


def _format_monomial(e: Exponent, names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def emit(f: Polynomial) -> str:
    """Inverse of :func:`parse` (up to whitespace and term order)."""
    if not f.terms:
        return "0"
    out = []
    # descending total degree reads more naturally
    items = sorted(f.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-k for k in kv[0])))
    for idx, (e, c) in enumerate(items):
        mono = _format_monomial(e, f.variables)
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if idx == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)
