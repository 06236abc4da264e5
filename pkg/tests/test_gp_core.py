import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from macfusion.errors import Infeasible, NonPositiveAnchor
from macfusion.gp_core import (ConstraintKind, GpProblem, Monomial, Posynomial, SolveStatus,
                               condense_posynomial, format_gp, leq, solve_gp, solve_signomial,
                               variables)


def test_monomial_algebra():
    x, y = variables("x y")
    m = 3 * x ** 2 / y
    assert m({"x": 2.0, "y": 4.0}) == pytest.approx(3.0)
    assert (m * y).exponents == {"x": 2.0}
    assert (1 / x)({"x": 4.0}) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        Monomial(0.0)


def test_posynomial_algebra_and_simplify():
    x, y = variables("x y")
    p = x + y + x + 2
    assert len(p) == 4 and len(p.simplify()) == 3
    assert p({"x": 1.0, "y": 1.0}) == p.simplify()({"x": 1.0, "y": 1.0}) == 5.0
    assert ((x + y) * (x + y)).simplify()({"x": 1, "y": 2}) == 9.0
    with pytest.raises(TypeError):
        x / (x + y)
    with pytest.raises(ValueError):
        Posynomial([])


def test_leq_kinds():
    x, y = variables("x y")
    assert leq(x * y, 2.0).kind is ConstraintKind.POSY_LEQ_ONE
    assert leq(x, x + y).kind is ConstraintKind.POSY_LEQ_POSY
    c = leq(x, [(x + y, 0.5), (y, 1.0)])
    assert c.rhs({"x": 3.0, "y": 1.0}) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        leq(x, [(x + y, 1.5)])


def test_condensation_matches_at_anchor_and_underestimates():
    x, y = variables("x y")
    p = 2 * x + y ** 0.5 / x + 3
    a = {"x": 0.7, "y": 2.0}
    m = condense_posynomial(p, a)
    assert m(a) == pytest.approx(p(a), rel=1e-14)
    h = 1e-6
    for k in a:
        b = dict(a, **{k: a[k] * (1 + h)})
        grad_p = (math.log(p(b)) - math.log(p(a))) / math.log1p(h)
        assert m.exponents.get(k, 0.0) == pytest.approx(grad_p, abs=1e-5)
    with pytest.raises(NonPositiveAnchor):
        condense_posynomial(p, {"x": 0.0, "y": 1.0})


@given(st.lists(st.tuples(st.floats(0.01, 100), st.floats(-3, 3), st.floats(-3, 3)),
                min_size=1, max_size=6),
       st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100))
def test_condensation_property(terms, ax, ay, px, py):
    p = Posynomial(Monomial(c, {"x": e1, "y": e2}) for c, e1, e2 in terms)
    m = condense_posynomial(p, {"x": ax, "y": ay})
    assert m({"x": ax, "y": ay}) == pytest.approx(p({"x": ax, "y": ay}), rel=1e-12)
    assert m({"x": px, "y": py}) <= p({"x": px, "y": py}) * (1 + 1e-12)


def test_solve_gp_known_optimum():
    x, y = variables("x y")
    prob = GpProblem(x + y, [leq(1 / (x * y), 1.0)])
    rep = solve_gp(prob)
    assert rep.converged
    assert rep.objective_value == pytest.approx(2.0, rel=1e-7)
    assert rep.x_star["x"] == pytest.approx(1.0, rel=1e-3)
    assert rep.kkt_residual < 1e-5


def test_solve_gp_infeasible():
    x = variables("x")
    prob = GpProblem(x, [leq(x, 1.0), leq(1 / x, 0.5)])
    with pytest.raises(Infeasible):
        solve_gp(prob)


def test_solve_gp_rejects_signomial():
    x, y = variables("x y")
    with pytest.raises(ValueError):
        solve_gp(GpProblem(x, [leq(2.0, x + y)]))


def test_undeclared_variable():
    x, y = variables("x y")
    with pytest.raises(ValueError):
        GpProblem(x, [leq(y, 1.0)], variables=("x",))


def test_solve_signomial_reverse_constraint():
    # min x + 2y  s.t.  x + y >= 3, 0.1 <= y <= 1: y sits on its floor, x = 2.9
    x, y = variables("x y")
    prob = GpProblem(x + 2 * y, [leq(3.0, x + y), leq(y, 1.0), leq(0.1 / y, 1.0)])
    rep = solve_signomial(prob, {"x": 5.0, "y": 0.5})
    assert rep.status is SolveStatus.CONVERGED
    assert rep.objective_value == pytest.approx(3.1, rel=1e-6)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(rep.history, rep.history[1:]))


def test_solve_signomial_dump():
    x, y = variables("x y")
    prob = GpProblem(x, [leq(2.0, x + y), leq(y, 1.0)])
    buf = io.StringIO()
    solve_signomial(prob, {"x": 3.0, "y": 0.5}, dump=buf)
    text = buf.getvalue()
    assert "## outer iteration 1" in text and "# objective" in text


def test_format_gp_lines():
    x, y = variables("x y")
    out = format_gp(GpProblem(2 * x, [leq(x * y ** -1, 1.0, name="c")]))
    assert "# constraint c <= 1" in out
    assert "2 x:1" in out


def test_history_monotone_on_random_problems():
    rng = np.random.default_rng(3)
    x, y, z = variables("x y z")
    for _ in range(10):
        a, b, c = 10 ** rng.uniform(-1, 1, 3)
        prob = GpProblem(a * x + b * y + c * z,
                         [leq(1.0, x * y + y * z + 0.5 * x), leq(x * y * z, 4.0)])
        rep = solve_signomial(prob, {"x": 2.0, "y": 2.0, "z": 0.5})
        assert np.all(np.diff(rep.history) <= 0)
