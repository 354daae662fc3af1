"""Leading coefficient of x^2 + y^4 by the closed formula, the residue route and a fit."""

from newtonosc import analyze, parse
from newtonosc.oscillatory import Amplitude, fit_leading
from newtonosc.residue import residue_via_theorem1, theorem3

f = parse("x^2 + y^4")
a = analyze(f)
m_formula = theorem3(f, 1.0, a).mu
m_residue = residue_via_theorem1(f, 1.0, a).mu
fit = fit_leading(f, Amplitude("product_bump", 0.5, 1.0), a.diagonal, 1e3, 1e5)
print("s0 =", a.diagonal.s0)
print("formula :", m_formula)
print("residue :", m_residue)
print("fit     :", fit.mu_est)
print("rel diff formula/fit:", abs(fit.mu_est - m_formula) / abs(m_formula))
