import numpy as np
from hypothesis import strategies as st
from scipy.optimize import linprog


def lp_trace_value(points, a):
    """min <a,k> over conv(points) + R^n_+ by linear programming (independent oracle)."""
    pts = np.array(points, dtype=float)
    m, n = pts.shape
    # variables: lambda (m), slack (n); k = pts^T lambda + slack
    c = np.concatenate([pts @ np.asarray(a, float), np.asarray(a, float)])
    A_eq = np.concatenate([np.ones(m), np.zeros(n)])[None, :]
    res = linprog(c, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (m + n), method="highs")
    assert res.status == 0
    return res.fun


@st.composite
def supports(draw, max_n=4, max_points=10, max_entry=8):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_points))
    pts = draw(st.lists(st.tuples(*[st.integers(0, max_entry)] * n), min_size=k, max_size=k))
    pts = [p for p in pts if sum(p) >= 1] or [tuple([1] * n)]
    return n, sorted(set(pts))


def random_support(rng, n, k, entry=8, min_degree=2):
    if n == 1:
        k = min(k, entry + 1 - min_degree)
    pts = set()
    while len(pts) < k:
        p = tuple(int(x) for x in rng.integers(0, entry + 1, size=n))
        if sum(p) >= min_degree:
            pts.add(p)
    return sorted(pts)
