"""Exact rational engine: polynomials, event probabilities, domination."""

from __future__ import annotations

import io
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dacolor.exact import (
    BiPoly,
    CapExceeded,
    ColorEvent,
    EnumerationCaps,
    bk_enumeration,
    bk_probability,
    check_domination_exact,
    connection_poly,
    event_prob_decomposition,
    event_prob_direct,
    event_prob_poly,
    increasing_events,
    pivotality_poly,
    read_poly_csv,
    site_distribution,
    write_poly_csv,
)
from dacolor.multigraph import (
    Gadget,
    complete_bipartite_dk,
    make_multigraph,
    parallel_gadget_dn,
)

P = BiPoly.var_p()
R = BiPoly.var_r()

rationals = st.fractions(min_value=0, max_value=1, max_denominator=12)


def edge_gadget() -> Gadget:
    return Gadget(make_multigraph(2, [(0, 1)]), 0, 1)


def path_gadget() -> Gadget:
    return Gadget(make_multigraph(3, [(0, 2), (2, 1)]), 0, 1)


def doubled_gadget() -> Gadget:
    return Gadget(make_multigraph(2, [(0, 1), (0, 1)]), 0, 1)


# ---------------------------------------------------------------------------
# Polynomial arithmetic


def test_bipoly_expansion():
    assert (P + R) ** 2 == P**2 + 2 * P * R + R**2
    assert (1 - P) * (1 + P) == 1 - P**2
    assert P - P == BiPoly()
    assert not (P - P)


def test_bipoly_substitution_and_derivative():
    f = P**2 * R + 3 * R**2
    assert f.subs_p(Fraction(1, 2)) == Fraction(1, 4) * R + 3 * R**2
    assert f.subs_r(1) == P**2 + BiPoly.const(3)
    assert f.derivative("p") == 2 * P * R
    assert f.derivative("r") == P**2 + 6 * R


def test_bipoly_degrees_and_eval():
    f = 2 * P**3 - R + 1
    assert f.degree_p() == 3
    assert f.degree_r() == 1
    assert f.evaluate(Fraction(1, 2), Fraction(1, 3)) == Fraction(1, 4) - Fraction(1, 3) + 1
    assert f.eval_float(0.5, 1.0) == pytest.approx(0.25)
    assert BiPoly().evaluate(1, 1) == 0


@given(rationals, rationals)
@settings(max_examples=40)
def test_bipoly_eval_is_ring_homomorphism(p, r):
    f = 2 * P**2 * R - R**3 + P
    g = (1 - P) * R + 5
    assert (f * g).evaluate(p, r) == f.evaluate(p, r) * g.evaluate(p, r)
    assert (f + g).evaluate(p, r) == f.evaluate(p, r) + g.evaluate(p, r)
    assert (f - g).evaluate(p, r) == f.evaluate(p, r) - g.evaluate(p, r)


def test_poly_csv_roundtrip():
    f = pivotality_poly(complete_bipartite_dk(2))
    buf = io.StringIO()
    write_poly_csv(buf, f, "f", comments=["note"])
    text = buf.getvalue()
    assert text.startswith("# note\n")
    assert "# f = " in text
    assert "i,j,numerator,denominator" in text
    back = read_poly_csv(io.StringIO(text))
    assert back == f


def test_poly_csv_row_order_is_stable():
    f = R**2 + P + P * R
    buf = io.StringIO()
    write_poly_csv(buf, f)
    rows = [line for line in buf.getvalue().splitlines() if line and not line.startswith("#")]
    assert rows == ["i,j,numerator,denominator", "0,2,1,1", "1,0,1,1", "1,1,1,1"]


def test_expression_mentions_mixed_basis():
    h = connection_poly(doubled_gadget())
    # 1 - (1-p)^2 rendered on the p^s (1-p)^(m-s) basis
    assert h.expression() == "(2 p (1-p) + p^2)"


# ---------------------------------------------------------------------------
# Connection and pivotality polynomials on hand-checked gadgets


def test_connection_poly_single_edge():
    assert connection_poly(edge_gadget()) == P


def test_connection_poly_doubled_edge():
    assert connection_poly(doubled_gadget()) == 2 * P - P**2


def test_connection_poly_path():
    assert connection_poly(path_gadget()) == P**2


def test_pivotality_poly_single_edge():
    # terminals share a cluster: transmits for free; else b's own
    # cluster must be black
    assert pivotality_poly(edge_gadget()) == P + (1 - P) * R


def test_pivotality_poly_path():
    # p^2: one cluster; 2p(1-p): one intermediate black cluster;
    # (1-p)^2: the middle vertex and b both black
    expect = P**2 + 2 * P * (1 - P) * R + (1 - P) ** 2 * R**2
    assert pivotality_poly(path_gadget()) == expect


def test_pivotality_poly_doubled_edge():
    h = 2 * P - P**2
    assert pivotality_poly(doubled_gadget()) == h + (1 - h) * R


def test_connection_matches_closed_form_for_parallel_gadget():
    for n in range(1, 5):
        g = parallel_gadget_dn(n)
        expect = (1 - (1 - P) ** n) * P
        assert connection_poly(g) == expect


def test_polys_are_probabilities_on_a_grid():
    f = pivotality_poly(complete_bipartite_dk(2))
    h = connection_poly(complete_bipartite_dk(2))
    for i in range(5):
        for j in range(5):
            p, r = Fraction(i, 4), Fraction(j, 4)
            assert 0 <= f.evaluate(p, r) <= 1
            assert 0 <= h.evaluate(p, r) <= 1
    assert h.is_univariate_p()
    # at p=1 the terminals share the unique cluster, so transmission
    # is certain whatever the colors
    assert f.evaluate(1, 0) == 1
    assert f.evaluate(0, Fraction(1, 3)) >= Fraction(1, 9)


# ---------------------------------------------------------------------------
# Color events, dual computation routes


def triangle():
    return make_multigraph(3, [(0, 1), (1, 2), (0, 2)])


def test_event_routes_agree_on_triangle():
    ev = ColorEvent.cylinder({0: 1, 2: 0})
    assert event_prob_poly(triangle(), ev) == event_prob_direct(triangle(), ev)


def test_event_routes_agree_on_doubled_edge():
    g = make_multigraph(2, [(0, 1), (0, 1)])
    ev = ColorEvent.all_black((0, 1))
    assert event_prob_poly(g, ev) == event_prob_direct(g, ev)


def test_event_routes_agree_on_square_with_chord():
    g = make_multigraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    ev = ColorEvent.from_dnf([{0: 1, 2: 1}, {1: 0, 3: 0}])
    assert event_prob_poly(g, ev) == event_prob_direct(g, ev)


def test_decomposition_terms_sum_to_the_event_poly():
    g = triangle()
    ev = ColorEvent.all_black((0, 1, 2))
    total = BiPoly()
    for term in event_prob_decomposition(g, ev):
        total = total + term.p_poly * term.r_poly
    assert total == event_prob_poly(g, ev)


def test_single_vertex_event_probability_is_r():
    for g in (triangle(), parallel_gadget_dn(3).graph):
        ev = ColorEvent.cylinder({1: 1})
        assert event_prob_poly(g, ev) == R


def test_complementary_cylinders_sum_to_one():
    g = triangle()
    total = BiPoly()
    for c0 in (0, 1):
        for c1 in (0, 1):
            ev = ColorEvent.cylinder({0: c0, 2: c1})
            total = total + event_prob_poly(g, ev)
    assert total == BiPoly.const(1)


@st.composite
def graph_and_cylinder(draw):
    n = draw(st.integers(min_value=2, max_value=4))
    m = draw(st.integers(min_value=1, max_value=5))
    edges = []
    for _ in range(m):
        u = draw(st.integers(min_value=0, max_value=n - 1))
        v = draw(st.integers(min_value=0, max_value=n - 1))
        if u != v:
            edges.append((u, v))
    if not edges:
        edges = [(0, 1)]
    support = draw(st.lists(st.integers(min_value=0, max_value=n - 1),
                            min_size=1, max_size=n, unique=True))
    colors = {v: draw(st.integers(min_value=0, max_value=1)) for v in support}
    return make_multigraph(n, edges), ColorEvent.cylinder(colors)


@given(graph_and_cylinder())
@settings(max_examples=30, deadline=None)
def test_event_routes_agree_on_random_graphs(gc):
    g, ev = gc
    assert event_prob_poly(g, ev) == event_prob_direct(g, ev)


# ---------------------------------------------------------------------------
# Site distributions and stochastic domination


def test_site_distribution_is_a_distribution():
    mu = site_distribution(triangle(), Fraction(1, 3), Fraction(2, 5))
    assert sum(mu) == 1
    assert all(x >= 0 for x in mu)


def test_site_distribution_vertex_marginals_are_r():
    r = Fraction(2, 5)
    mu = site_distribution(triangle(), Fraction(1, 3), r)
    for v in range(3):
        marg = sum(pr for s, pr in enumerate(mu) if (s >> v) & 1)
        assert marg == r


def test_site_distribution_at_p_one_is_fully_correlated():
    mu = site_distribution(triangle(), 1, Fraction(1, 4))
    assert mu[0] == Fraction(3, 4)
    assert mu[0b111] == Fraction(1, 4)
    assert sum(mu) == 1


def test_increasing_event_counts_follow_dedekind_numbers():
    assert [len(increasing_events(n)) for n in range(1, 5)] == [3, 6, 20, 168]
    with pytest.raises(CapExceeded):
        increasing_events(5)


def test_domination_report_on_triangle():
    rep = check_domination_exact(triangle(), Fraction(1, 2), Fraction(1, 2))
    assert rep.ok
    assert rep.violation is None
    assert rep.n_events == 20
    assert rep.lower_param == Fraction(1, 2) * Fraction(1, 4)
    assert rep.upper_param == 1 - Fraction(1, 2) * Fraction(1, 4)


def test_domination_bounds_are_tight_for_isolated_vertex():
    g = make_multigraph(1, [])
    rep = check_domination_exact(g, Fraction(1, 3), Fraction(1, 4))
    assert rep.ok
    assert rep.lower_param == rep.upper_param == Fraction(1, 4)


def test_domination_rejects_large_graphs():
    g = make_multigraph(5, [(i, i + 1) for i in range(4)])
    with pytest.raises(CapExceeded):
        check_domination_exact(g, Fraction(1, 2), Fraction(1, 2))


# ---------------------------------------------------------------------------
# The closed-off-terminals event


@pytest.mark.parametrize("p", [Fraction(1, 4), Fraction(1, 3)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_bk_enumeration_matches_closed_form(p, k):
    assert bk_enumeration(p, k) == bk_probability(p, k)


def test_bk_probability_validates_inputs():
    with pytest.raises(ValueError):
        bk_probability(Fraction(1, 2), 0)
    with pytest.raises(ValueError):
        bk_probability(Fraction(3, 2), 1)


def test_bk_is_increasing_in_k():
    p = Fraction(1, 5)
    values = [bk_probability(p, k) for k in range(1, 6)]
    assert all(a < b for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# Caps


def test_edge_cap_is_enforced():
    g = complete_bipartite_dk(2)
    with pytest.raises(CapExceeded):
        connection_poly(g, EnumerationCaps(max_edges=4, max_clusters=20))


def test_cluster_cap_is_enforced():
    # many isolated middle vertices once the terminal cluster is removed
    g = complete_bipartite_dk(3)
    with pytest.raises(CapExceeded):
        pivotality_poly(g, EnumerationCaps(max_edges=24, max_clusters=1))
