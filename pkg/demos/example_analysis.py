"""Geometry and stability of a four-variable phase with a compact diagonal face."""

from newtonosc import analyze, parse
from newtonosc.spectral import projection_condition

f = parse("x2^2*x3^3*x4 + x1^2*x3*x4^3 + x1^2*x2^2*x3*x4", ["x1", "x2", "x3", "x4"])
a = analyze(f)
rep = a.diagonal
print("t0 =", rep.t0, " s0 =", rep.s0, " rho =", rep.rho)
print("tau0 vertices:", sorted(rep.tau0.vertices))
print("facets through the diagonal point:", list(zip(rep.normals, rep.offsets)))
print("stable:", a.stability.overall_stable.verdict.value)
pc = projection_condition(f, rep, a.polyhedron)
print("projection condition holds for", sum(1 for _, h in pc if h), "of", len(pc), "orderings")
