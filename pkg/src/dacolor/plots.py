"""Figure rendering for report outputs.

Each helper writes a PNG next to the delimited output it illustrates;
figures are a convenience layer, CSV stays the machine contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_curve_figure(points, path, title: str = "threshold curve") -> None:
    """Bracket midpoints with bracket half-widths as error bars."""
    points = list(points)
    xs = [float(pt.p) for pt in points]
    mids = [(float(pt.r_lo) + float(pt.r_hi)) / 2 for pt in points]
    errs = [(float(pt.r_hi) - float(pt.r_lo)) / 2 for pt in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(xs, mids, yerr=errs, fmt="o-", capsize=3)
    ax.set_xlabel("p")
    ax.set_ylabel("r threshold bracket")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_duality_figure(report, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pt in (("nn", report.nn), ("star", report.star)):
        ax.errorbar([pt.p], [pt.midpoint], yerr=[pt.width / 2],
                    fmt="o", capsize=4, label=f"{label} (L={pt.L})")
    ax.axhline(report.sum_mid, color="gray", linestyle=":",
               label=f"sum = {report.sum_mid:.4f}")
    ax.set_xlabel("p")
    ax.set_ylabel("r threshold")
    ax.set_title(f"nn/star thresholds at p={report.p}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_psi_figure(fit, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    if fit.n_values:
        x = np.asarray(fit.n_values, dtype=float)
        y = -np.log(np.asarray(fit.frequencies))
        ax.plot(x, y, "o", label="-log frequency")
        if fit.psi is not None:
            xs = np.linspace(x.min(), x.max(), 50)
            inter = float(np.mean(y - fit.psi * x))
            ax.plot(xs, inter + fit.psi * xs, "-",
                    label=f"slope {fit.psi:.4f} (z={fit.z:.2f})")
    ax.set_xlabel("arm radius n")
    ax.set_ylabel("-log one-arm frequency")
    ax.set_title(f"one-arm decay at p={fit.p}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_probe_figure(results, path, title: str = "event estimates") -> None:
    results = list(results)
    xs = [e.r for e in results]
    ys = [e.estimate for e in results]
    los = [e.estimate - e.ci_lo for e in results]
    his = [e.ci_hi - e.estimate for e in results]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(xs, ys, yerr=[los, his], fmt="o", capsize=3)
    ax.axhline(0.5, color="gray", linestyle=":")
    ax.set_xlabel("r")
    ax.set_ylabel("estimated probability")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_poly_figure(poly, path, name: str = "f") -> None:
    """Univariate polynomials as one curve in p; bivariate ones as a
    family of curves at a few fixed r values."""
    ps = np.linspace(0.0, 1.0, 201)
    fig, ax = plt.subplots(figsize=(6, 4))
    if poly.is_univariate_p():
        ax.plot(ps, [poly.eval_float(pv, 0.0) for pv in ps], label=f"{name}(p)")
    else:
        for rv in (0.0, 0.25, 0.5, 0.75, 1.0):
            ax.plot(ps, [poly.eval_float(pv, rv) for pv in ps],
                    label=f"{name}(p, r={rv})")
    ax.axhline(0.5, color="gray", linestyle=":")
    ax.set_xlabel("p")
    ax.set_ylabel(name)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_scan_figure(report, path) -> None:
    render_curve_figure(
        report.curve.points, path,
        title=f"continuity scan (max step {report.max_diff:.4f})",
    )
