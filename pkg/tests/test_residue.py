import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import beta

from newtonosc.polyhedron import newton_polyhedron
from newtonosc.polynomial import Polynomial, parse
from newtonosc.residue import (IntegralExponent, NonConvergent, NonPositiveWeight, Unsupported,
                               conjecture_sum, explicit_mu, gamma_weights, pv_integral,
                               residue_via_theorem1, simplex_data, theorem3, volume_factor)
from newtonosc.spectral import analyze, diagonal_analysis

EX = "x2^2*x3^3*x4 + x1^2*x3*x4^3 + x1^2*x2^2*x3*x4"


def test_gamma_weights():
    g, s0 = gamma_weights([(2, 0), (0, 4)])
    assert g == (Fraction(1, 2), Fraction(1, 4)) and s0 == Fraction(-3, 4)
    with pytest.raises(NonPositiveWeight):
        gamma_weights([(1, 0), (2, 2)])


def test_explicit_mu_square():
    # classical stationary phase: sqrt(pi) e^{i pi/4}
    mu = explicit_mu(simplex_data([(2,)], [1]))
    ref = math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4)
    assert abs(mu - ref) / abs(ref) < 1e-12


def test_explicit_mu_cube():
    mu = explicit_mu(simplex_data([(3,)], [1]))
    assert abs(mu - math.gamma(1 / 3) / math.sqrt(3)) < 1e-12


def test_explicit_mu_two_terms():
    mu = explicit_mu(simplex_data([(2, 0), (0, 4)], [1, 1]))
    ref = 0.5 * math.gamma(0.25) * math.gamma(0.5) * cmath.exp(3j * math.pi / 8)
    assert abs(mu - ref) / abs(ref) < 1e-12


def test_integral_exponent_rejected():
    with pytest.raises(IntegralExponent):
        explicit_mu(simplex_data([(2, 0), (0, 2)], [1, 1]))


def test_conjecture_sum_conjugation():
    S = simplex_data([(2, 0), (1, 3)], [1, -1])
    T = simplex_data([(2, 0), (1, 3)], [-1, 1])
    assert abs(conjecture_sum(S) - conjecture_sum(T).conjugate()) < 1e-12


def test_volume_factor_example():
    f = parse(EX, ["x1", "x2", "x3", "x4"])
    P = newton_polyhedron(f)
    assert volume_factor(P, diagonal_analysis(P)).value == Fraction(1, 9)


def test_pv_beta_identity():
    f = parse("x^2 + y^4")
    P = newton_polyhedron(f)
    rep = diagonal_analysis(P)
    v, err = pv_integral(f, rep, 1)
    assert abs(v - 0.25 * beta(0.25, 0.5)) < 1e-6
    assert pv_integral(f, rep, -1)[0] == 0.0


def test_routes_agree_square_and_cube():
    for text in ("x^2", "x^3", "x^2 + y^4", "x^2 - y^4"):
        f = parse(text)
        a = analyze(f)
        m3 = theorem3(f, 1.0, a).mu
        m1 = residue_via_theorem1(f, 1.0, a).mu
        assert abs(m1 - m3) / abs(m3) < 1e-6, text


def test_residue_unavailable_paths():
    with pytest.raises(Unsupported):
        residue_via_theorem1(parse("x1^2", ["x1", "x2"]))
    with pytest.raises((NonConvergent, IntegralExponent)):
        residue_via_theorem1(parse("x^2 - y^2"))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(2, 7), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_routes_agree_two_powers(p, q, e1, e2):
    f = Polynomial(2, {(p, 0): e1, (0, q): e2})
    a = analyze(f)
    if a.diagonal.s0_integral:
        return
    m3 = theorem3(f, 1.0, a).mu
    try:
        m1 = residue_via_theorem1(f, 1.0, a).mu
    except NonConvergent:
        return
    assert abs(m1 - m3) <= 1e-6 * max(1.0, abs(m3))
