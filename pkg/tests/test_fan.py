from fractions import Fraction

import pytest
from hypothesis import given, settings

from newtonosc import linalg
from newtonosc.fan import (Cone, Fan, NotSimple, candidate_poles, cone_contains, covers_orthant,
                           instability_fan, interior_point, is_finer, multiplicity_bound,
                           normal_fan, numerical_data, pulling_triangulation, refine_simple,
                           subdivide_simplicial, subordinate_simple_fan, transition_matrix)
from newtonosc.polyhedron import build, newton_polyhedron
from newtonosc.polynomial import parse
from newtonosc.spectral import diagonal_analysis, star_transform

from conftest import supports


def test_normal_fan_two_terms():
    P = newton_polyhedron(parse("x^2 + y^4"))
    F = normal_fan(P)
    assert set(F.rays) == {(2, 1), (1, 0), (0, 1)}
    assert covers_orthant(F)
    data = {r: (d.N, d.nu) for r in F.rays for d in [numerical_data(r, P)]}
    # [DERIVED] trace values
    assert data == {(1, 0): (0, 1), (2, 1): (4, 3), (0, 1): (0, 1)}
    assert candidate_poles(F, P)[Fraction(-3, 4)] == 1


def test_refine_single_cone():
    F = Fan(((1, 0), (1, 2)), ((0, 1),))
    log = []
    G = refine_simple(F, log)
    assert (1, 1) in G.rays
    assert log == [(2, [1, 1])]
    assert all(c.is_simple() for c in G.maximal_cones())


def test_interior_point_in_cone():
    gens = [(1, 0, 0), (0, 1, 0), (1, 1, 2)]
    p = interior_point(gens)
    assert cone_contains(gens, p) and p not in gens


def test_transition_matrix():
    c1 = Cone(((1, 0), (1, 1)))
    c2 = Cone(((1, 1), (0, 1)))
    T = transition_matrix(c1, c2)
    assert T == [[1, 1], [-1, 0]]
    with pytest.raises(NotSimple):
        transition_matrix(Cone(((1, 0), (1, 2))), c2)


def test_pulling_triangulation_square_cone():
    rays = [(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)]
    tri = pulling_triangulation(range(4), rays)
    assert len(tri) == 2 and all(0 in t for t in tri)


def test_instability_fan_bound():
    f = parse("x1^3 + x2^3 + x1*x2*x3")
    fs, rs, _ = star_transform(f)
    P = newton_polyhedron(fs)
    F = subordinate_simple_fan(P)
    generic = multiplicity_bound(F, P, rs.s0)
    Fj = instability_fan(F, 2)
    assert covers_orthant(Fj)
    bound = multiplicity_bound(Fj, P, rs.s0)
    assert bound <= rs.rho - 1 < generic


@settings(max_examples=25, deadline=None)
@given(supports(max_n=3, max_points=6, max_entry=6))
def test_refinement_properties(data):
    n, pts = data
    P = build(pts, n)
    F = normal_fan(P)
    S = subdivide_simplicial(F)
    R = refine_simple(S)
    assert covers_orthant(S) and covers_orthant(R)
    assert is_finer(S, F) and is_finer(R, S)
    assert all(linalg.multiplicity(c.generators) == 1 for c in R.maximal_cones())
