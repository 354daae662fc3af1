from fractions import Fraction

from hypothesis import given, settings

from newtonosc.polyhedron import build, face_polynomial, newton_polyhedron
from newtonosc.polynomial import parse
from newtonosc.spectral import diagonal_analysis

from conftest import lp_trace_value, supports

EX = "x2^2*x3^3*x4 + x1^2*x3*x4^3 + x1^2*x2^2*x3*x4"
VARS = ["x1", "x2", "x3", "x4"]


def test_example_facets():
    P = newton_polyhedron(parse(EX, VARS))
    got = {(fc.normal, fc.offset) for fc in P.facets}
    # [DERIVED] hand computation of conv(support) + R^4_+
    assert got == {((1, 1, 0, 0), 2), ((1, 0, 1, 0), 3), ((1, 0, 0, 0), 0), ((0, 1, 0, 1), 3),
                   ((0, 1, 0, 0), 0), ((0, 0, 1, 0), 1), ((0, 0, 0, 1), 1)}
    assert P.trace_value((1, 1, 1, 1)) == 6
    assert len(P.compact_faces()) == 7


def test_two_term_polygon():
    P = build([(2, 0), (0, 4)])
    assert {(fc.normal, fc.offset) for fc in P.facets} == {((2, 1), 4), ((1, 0), 0), ((0, 1), 0)}
    tf = P.trace_face((1, 1))
    assert tf.vertices == ((2, 0),) and tf.dim == 0


def test_trace_face_noncompact_for_zero_weight():
    P = build([(2, 0), (0, 4)])
    assert not P.trace_face((1, 0)).compact


def test_face_polynomial():
    f = parse("x^2 + y^4 + x*y^3")
    P = newton_polyhedron(f)
    rep = diagonal_analysis(P)
    assert face_polynomial(f, rep.tau0, P).terms == {(2, 0): 1, (0, 4): 1}


@settings(max_examples=60, deadline=None)
@given(supports())
def test_facet_validity(data):
    n, pts = data
    P = build(pts, n)
    for fc in P.facets:
        assert all(fc.value(p) >= fc.offset for p in pts)
        assert all(x >= 0 for x in fc.normal)
        # a facet touches at least n affinely independent points of Gamma (vertices or rays)
        assert any(fc.contains(v) for v in P.vertices)
    for v in P.vertices:
        assert v in pts


@settings(max_examples=60, deadline=None)
@given(supports())
def test_trace_value_oracles(data):
    n, pts = data
    P = build(pts, n)
    for a in [(1,) * n, tuple(range(1, n + 1)), tuple([2] + [1] * (n - 1))]:
        exact = P.trace_value(a)
        assert exact == min(sum(x * y for x, y in zip(a, v)) for v in P.vertices)
        assert abs(float(exact) - lp_trace_value(pts, a)) < 1e-7


@settings(max_examples=60, deadline=None)
@given(supports())
def test_diagonal_point_on_active_facets(data):
    n, pts = data
    P = build(pts, n)
    rep = diagonal_analysis(P)
    d = (rep.t0,) * n
    assert P.contains(d)
    on = {i for i, fc in enumerate(P.facets) if fc.contains(d)}
    assert on == set(rep.tau0.active_facets)
    assert rep.rho == n - rep.tau0.dim
    assert rep.s0 == Fraction(-1) / rep.t0
