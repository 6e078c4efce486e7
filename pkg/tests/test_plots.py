"""Figure rendering: every report figure lands on disk as a PNG."""

from __future__ import annotations

from fractions import Fraction

from dacolor import mc, plots
from dacolor.exact import BiPoly, connection_poly
from dacolor.multigraph import complete_bipartite_dk
from dacolor.treecrit import CriticalCurve, CurvePoint, discontinuity_family_certificate

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _is_png(path) -> bool:
    return path.read_bytes()[:8] == PNG_MAGIC


def test_curve_figure_from_exact_points(tmp_path):
    curve, _ = discontinuity_family_certificate([Fraction(0), Fraction(1, 5)], n_max=2)
    out = tmp_path / "curve.png"
    plots.render_curve_figure(curve.points, out, title="threshold curve")
    assert _is_png(out)


def test_curve_figure_from_mc_points(tmp_path):
    pt = mc.rc_estimate(0, 4, 120, "nn", seed=0)
    out = tmp_path / "rc.png"
    plots.render_curve_figure([pt], out)
    assert _is_png(out)


def test_duality_figure(tmp_path):
    rep = mc.duality_check(0, 4, n_samples=120, seed=0)
    out = tmp_path / "dual.png"
    plots.render_duality_figure(rep, out)
    assert _is_png(out)


def test_psi_figure(tmp_path):
    fit = mc.psi_fit(0.15, [2, 4], 400, seed=0)
    out = tmp_path / "psi.png"
    plots.render_psi_figure(fit, out)
    assert _is_png(out)


def test_probe_figure(tmp_path):
    res = mc.estimate_event(complete_bipartite_dk(1).graph,
                            mc.ColorEvent.all_black((0, 1)),
                            0.5, 0.5, 200, seed=0)
    out = tmp_path / "probe.png"
    plots.render_probe_figure([res], out, title="tally")
    assert _is_png(out)


def test_poly_figure_bivariate_and_univariate(tmp_path):
    h = connection_poly(complete_bipartite_dk(1))
    out = tmp_path / "h.png"
    plots.render_poly_figure(h, out, name="h")
    assert _is_png(out)
    f = BiPoly.var_p() + BiPoly.var_r() * Fraction(1, 2)
    out2 = tmp_path / "f.png"
    plots.render_poly_figure(f, out2, name="f")
    assert _is_png(out2)


def test_scan_figure(tmp_path):
    grid = [Fraction(j, 20) for j in range(4)]
    points = tuple(
        CurvePoint(p, Fraction(7, 10) - p, Fraction(7, 10) - p, "exact")
        for p in grid
    )
    rep = mc.continuity_scan(curve=CriticalCurve(points))
    out = tmp_path / "scan.png"
    plots.render_scan_figure(rep, out)
    assert _is_png(out)
