"""Multiplicity bound from the instability fan for x1^3 + x2^3 + x1*x2*x3."""

from newtonosc import analyze, parse
from newtonosc.fan import covers_orthant, instability_fan, multiplicity_bound, subordinate_simple_fan
from newtonosc.polyhedron import newton_polyhedron
from newtonosc.spectral import star_transform

f = parse("x1^3 + x2^3 + x1*x2*x3")
a = analyze(f)
print("unstable wrt x3:", dict(a.stability.per_variable)[2].verdict.value)
fs, rs, _ = star_transform(f)
P = newton_polyhedron(fs)
F = subordinate_simple_fan(P)
Fj = instability_fan(F, 2)
print("after adding y^2: s0 =", rs.s0, " rho =", rs.rho)
print("instability fan covers the orthant:", covers_orthant(Fj))
print("bound from instability fan:", multiplicity_bound(Fj, P, rs.s0))
print("bound from the full fan:   ", multiplicity_bound(F, P, rs.s0))
