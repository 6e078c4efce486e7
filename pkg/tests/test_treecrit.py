"""Root bracketing, closed forms, exact quadratic-field arithmetic, and
the four certificate bundles for tree-like threshold claims."""

from __future__ import annotations

import io
from fractions import Fraction

import pytest

from dacolor.exact import BiPoly, connection_poly, pivotality_poly
from dacolor.multigraph import complete_bipartite_dk, parallel_gadget_dn
from dacolor.treecrit import (
    Certificate,
    CriticalCurve,
    CurvePoint,
    DoubledBridgeFamily,
    Sqrt5,
    bounded_degree_certificate,
    bundle_status,
    discontinuity_family_certificate,
    dk_connection_value,
    dk_pivotality_lower,
    dk_pivotality_zero_p,
    dn_connection_closed,
    dn_pivotality_closed,
    dn_pivotality_limit,
    edge_pivotality,
    fact4_upper_bound,
    nonmonotonicity_certificate,
    pc_root,
    rc_root,
    rcbounds_certificate,
    render_report,
)

P = BiPoly.var_p()
R = BiPoly.var_r()
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Root bracketing


def test_pc_root_exact_hit_degenerates():
    lo, hi = pc_root(P)
    assert lo == hi == HALF


def test_pc_root_brackets_irrational_root():
    h = 2 * P - P**2  # root 1 - 1/sqrt2
    lo, hi = pc_root(h)
    assert hi - lo <= Fraction(1, 2**40)
    assert h.evaluate(lo, 0) < HALF < h.evaluate(hi, 0)
    # bracket must contain 1 - 1/sqrt2: check via the defining quadratic
    assert (1 - lo) ** 2 > HALF > (1 - hi) ** 2


def test_pc_root_requires_straddling():
    with pytest.raises(ValueError):
        pc_root(BiPoly.const(Fraction(1, 4)))
    with pytest.raises(ValueError):
        pc_root(P * Fraction(1, 3))  # h(1) = 1/3 < 1/2


def test_pc_root_rejects_bivariate_and_decreasing():
    with pytest.raises(ValueError):
        pc_root(P * R)
    with pytest.raises(ValueError):
        pc_root(1 - P)


def test_rc_root_on_the_single_edge():
    f = edge_pivotality()  # p + (1-p) r
    lo, hi = rc_root(f, Fraction(1, 5))
    # exact root (1/2 - p)/(1 - p) = 3/8 lies on the probe grid
    assert lo == hi == Fraction(3, 8)


def test_rc_root_brackets_quadratic_root():
    f = R * R  # p=0 section of the parallel family
    lo, hi = rc_root(f, 0)
    assert hi - lo <= Fraction(1, 2**40)
    assert lo * lo < HALF < hi * hi


def test_rc_root_boundary_conventions():
    assert rc_root(BiPoly.const(Fraction(3, 4)), 0) == (Fraction(0), Fraction(0))
    assert rc_root(R * Fraction(1, 3), 0) == (Fraction(1), Fraction(1))


# ---------------------------------------------------------------------------
# Closed forms against the enumeration engine


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hub_connection_closed_form(k):
    h = connection_poly(complete_bipartite_dk(k))
    for p in (Fraction(0), Fraction(1, 7), Fraction(1, 3), Fraction(9, 10), Fraction(1)):
        assert h.evaluate(p, 0) == dk_connection_value(p, k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hub_pivotality_zero_p_section(k):
    f = pivotality_poly(complete_bipartite_dk(k))
    for r in (Fraction(0), Fraction(1, 4), Fraction(2, 3), Fraction(1)):
        assert f.evaluate(0, r) == dk_pivotality_zero_p(r)


@pytest.mark.parametrize("k", [1, 2])
def test_hub_pivotality_lower_bound_is_a_lower_bound(k):
    f = pivotality_poly(complete_bipartite_dk(k))
    for p in (Fraction(1, 5), Fraction(1, 3)):
        for r in (Fraction(1, 2), Fraction(2, 3)):
            assert dk_pivotality_lower(p, r) <= f.evaluate(p, r)


@pytest.mark.parametrize("k", [1, 2])
def test_fact4_upper_bound_is_an_upper_bound(k):
    f = pivotality_poly(complete_bipartite_dk(k))
    for p0 in (Fraction(1, 8), Fraction(1, 16)):
        pb, bound = fact4_upper_bound(p0, k)
        assert pb == (1 - p0) ** 4 * (1 - (1 - p0 * p0) ** k)
        assert f.evaluate(p0, Fraction(2, 3)) <= bound


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_parallel_family_closed_forms(n):
    g = parallel_gadget_dn(n)
    assert dn_connection_closed(n) == connection_poly(g)
    assert dn_pivotality_closed(n) == pivotality_poly(g)


def test_parallel_family_gap_identity():
    limit = dn_pivotality_limit()
    for n in (1, 2, 5):
        gap = limit - dn_pivotality_closed(n)
        assert gap == (1 - P) ** n * (1 - R) * (P + (1 - P) * R)


def test_parallel_family_zero_p_section_never_converges():
    # the p=0 section is r^2 for every n, while the limit section is r
    for n in (1, 3, 6):
        assert dn_pivotality_closed(n).subs_p(0) == R * R
    assert dn_pivotality_limit().subs_p(0) == R


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(sqrt 5)


def test_sqrt5_golden_ratio_identities():
    r0 = Sqrt5(Fraction(-1, 2), Fraction(1, 2))  # (sqrt5 - 1)/2
    one = Sqrt5(Fraction(1), Fraction(0))
    assert r0 * (one + r0) == one
    assert r0 * r0 == one - r0
    assert r0.is_positive()
    assert (one - r0).is_positive()


def test_sqrt5_ordering_and_float():
    a = Sqrt5(Fraction(0), Fraction(1))
    assert a * a == Sqrt5(Fraction(5), Fraction(0))
    assert Sqrt5(Fraction(2), Fraction(0)) < a < Sqrt5(Fraction(9, 4), Fraction(0))
    assert float(a) == pytest.approx(5 ** 0.5)
    r0 = Sqrt5(Fraction(-1, 2), Fraction(1, 2))
    assert float(r0) == pytest.approx((5 ** 0.5 - 1) / 2)
    assert Fraction(1, 2) < float(r0) < Fraction(2, 3)


def test_doubled_bridge_family_self_duality():
    fam = DoubledBridgeFamily()
    half = Fraction(1, 2)
    for n in (1, 2, 3, 8):
        c = fam.connection_value(n, half)
        assert c == Fraction(3, 4)
    # off the fixed point the iterates sharpen
    low = [fam.connection_value(n, Fraction(2, 5)) for n in (1, 2, 3)]
    assert low[0] > low[1] > low[2]
    hi = [fam.connection_value(n, Fraction(3, 5)) for n in (1, 2, 3)]
    assert hi[0] < hi[1] < hi[2]


def test_doubled_bridge_gadget_matches_its_closed_form():
    fam = DoubledBridgeFamily()
    g = fam.gadget(1)
    h = connection_poly(g)
    for p in (Fraction(1, 2), Fraction(1, 3), Fraction(4, 5)):
        assert h.evaluate(p, 0) == fam.connection_value(1, p)
    assert g.graph.max_degree() <= 5


# ---------------------------------------------------------------------------
# Certificate bundles


def test_nonmonotonicity_bundle_passes_with_found_pair():
    certs = nonmonotonicity_certificate()
    assert bundle_status(certs) == "pass"
    text = render_report("t", certs)
    assert "overall: PASS" in text
    joined = " ".join(c.claim for c in certs)
    assert "k=65536" in joined
    assert "p0=1/128" in joined


def test_nonmonotonicity_bundle_fails_honestly_for_a_bad_pair():
    certs = nonmonotonicity_certificate(k=4, p0=Fraction(1, 4))
    assert bundle_status(certs) == "fail"
    assert any(c.status == "fail" for c in certs)


def test_nonmonotonicity_small_k_cross_checks_engine():
    certs = nonmonotonicity_certificate(k=3, p0=Fraction(1, 128))
    # facts about small gadgets are recomputed by full enumeration; the
    # fact-4 product bound needs a huge k, so the bundle cannot pass here
    assert certs[0].status == "pass"
    assert certs[1].status == "pass"
    assert certs[2].status == "pass"
    assert certs[3].status == "fail"


def test_discontinuity_bundle_and_curve():
    curve, certs = discontinuity_family_certificate()
    assert bundle_status(certs) == "pass"
    by_p = {pt.p: pt for pt in curve.points}
    assert by_p[Fraction(1, 10)].r_lo == Fraction(4, 9)
    assert by_p[Fraction(1, 5)].r_lo == Fraction(3, 8)
    p0 = by_p[Fraction(0)]
    assert p0.r_lo**2 < HALF < p0.r_hi**2
    assert p0.r_lo - HALF > Fraction(1, 5)  # the jump at p=0


def test_discontinuity_respects_custom_grid():
    curve, certs = discontinuity_family_certificate(
        [Fraction(0), Fraction(1, 4)], n_max=3
    )
    assert bundle_status(certs) == "pass"
    assert [pt.p for pt in curve.points] == [Fraction(0), Fraction(1, 4)]
    assert curve.points[1].r_lo == Fraction(1, 3)


def test_bounded_degree_bundle():
    certs = bounded_degree_certificate()
    assert bundle_status(certs) == "pass"
    assert len(certs) == 6


@pytest.mark.parametrize("delta", [3, 4, 6])
def test_bounded_degree_bundle_other_degrees(delta):
    certs = bounded_degree_certificate(delta=delta)
    assert bundle_status(certs) == "pass"


def test_rcbounds_bundle_default_grid():
    certs = rcbounds_certificate()
    assert bundle_status(certs) == "pass"


def test_rcbounds_supercritical_p_uses_zero_threshold():
    # past bond criticality the tree percolates at any positive r, so the
    # exact curve value is 0 and the bounds hold trivially
    certs = rcbounds_certificate(p_grid=[Fraction(1, 2), Fraction(3, 5)])
    assert bundle_status(certs) == "pass"
    rows = dict(certs[0].evidence)["rows"]
    assert "p=1/2" in rows and "<= 0 <=" in rows


def test_rcbounds_rejects_p_outside_unit_interval():
    with pytest.raises(ValueError):
        rcbounds_certificate(p_grid=[Fraction(1)])


def test_rcbounds_custom_grid_evidence():
    certs = rcbounds_certificate(delta=4, p_grid=[Fraction(0), Fraction(1, 10)])
    assert bundle_status(certs) == "pass"


# ---------------------------------------------------------------------------
# Report rendering and curve serialization


def test_render_report_structure():
    certs = [
        Certificate("a", "r", (("x", "1"),), "pass"),
        Certificate("b", "r", (), "inconclusive"),
    ]
    text = render_report("title", certs)
    assert text.startswith("=== title ===\noverall: INCONCLUSIVE")
    assert "[1] claim: a" in text
    assert "[2] claim: b" in text
    assert "  x = 1" in text
    assert bundle_status(certs) == "inconclusive"


def test_bundle_status_prefers_fail():
    certs = [
        Certificate("a", "r", (), "inconclusive"),
        Certificate("b", "r", (), "fail"),
    ]
    assert bundle_status(certs) == "fail"


def test_curve_csv():
    curve = CriticalCurve((
        CurvePoint(Fraction(0), Fraction(7, 10), Fraction(71, 100), "bisect-bracket"),
        CurvePoint(Fraction(1, 10), Fraction(4, 9), Fraction(4, 9), "exact-root"),
    ))
    buf = io.StringIO()
    curve.to_csv(buf, comments=["hello"])
    assert buf.getvalue() == (
        "# hello\n"
        "p,r_lo,r_hi,method\n"
        "0,7/10,71/100,bisect-bracket\n"
        "1/10,4/9,4/9,exact-root\n"
    )
