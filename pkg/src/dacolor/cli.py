"""Command-line front end.

Every run is reproducible from its flags (or an equivalent `key = value`
config file; flags win on conflict), and every output starts with the
effective configuration echoed as `# key = value` comment lines.

Exit codes: 0 success, 2 bad configuration or arguments, 3 enumeration
cap exceeded, 4 certificate failed, 5 certificate inconclusive.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import dac, mc, treecrit
from .exact import (
    CapExceeded,
    EnumerationCaps,
    connection_poly,
    pivotality_poly,
    write_poly_csv,
)
from .multigraph import (
    Gadget,
    LatticeBox,
    complete_bipartite_dk,
    make_multigraph,
    parallel_gadget_dn,
    read_graph_file,
    z2_box,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_CERT_FAILED = 4
EXIT_INCONCLUSIVE = 5


def _rational(s: str) -> Fraction:
    return Fraction(str(s).strip())


def _boolean(s: str) -> bool:
    v = str(s).strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def parse_grid(s: str) -> list[Fraction]:
    """`start:stop:step` (inclusive, exact rationals) or a comma list."""
    s = s.strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ValueError("grid must be start:stop:step")
        start, stop, step = (_rational(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError("grid needs step > 0 and stop >= start")
        out = []
        v = start
        while v <= stop:
            out.append(v)
            v += step
        return out
    vals = [_rational(x) for x in s.split(",") if x.strip()]
    if not vals:
        raise ValueError("empty grid")
    return vals


_CONVERTERS = {
    "p": _rational, "r": _rational, "p0": _rational, "a": _rational,
    "gamma": float,
    "k": int, "n": int, "size": int, "L": int, "samples": int, "seed": int,
    "threads": int, "nmax": int, "delta": int, "max_edges": int,
    "max_clusters": int,
    "plot": _boolean,
    "graph": str, "event": str, "mode": str, "out": str, "poly": str,
    "grid": str, "probes_out": str, "curve_out": str, "family": str,
    "kind": str,
}


def _load_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected `key = value`")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _merge_config(args: argparse.Namespace) -> None:
    """Fill still-unset options from the config file; flags keep priority."""
    path = getattr(args, "config", None)
    if not path:
        return
    for key, raw in _load_config(path).items():
        dest = key.replace("-", "_")
        if dest in ("config", "func") or not hasattr(args, dest):
            raise ValueError(f"unknown config key '{key}'")
        if getattr(args, dest) is None:
            conv = _CONVERTERS.get(dest, str)
            setattr(args, dest, conv(raw))


def _default(args: argparse.Namespace, **pairs) -> None:
    for key, value in pairs.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _config_lines(args: argparse.Namespace) -> list[str]:
    out = []
    for key in sorted(vars(args)):
        # threads is execution infrastructure: results are independent of
        # it, so the provenance header must be too
        if key in ("func", "config", "threads"):
            continue
        value = getattr(args, key)
        if value is None or callable(value):
            continue
        if isinstance(value, list):
            value = " ".join(
                ",".join(str(x) for x in item) if isinstance(item, list) else str(item)
                for item in value
            )
        out.append(f"{key} = {value}")
    return out


@contextmanager
def _open_out(path):
    if path:
        with open(path, "w") as fh:
            yield fh
    else:
        yield sys.stdout


def _plot_path(args) -> str:
    import os.path

    base = args.out or "dacolor-output"
    root, _ = os.path.splitext(base)
    return (root or base) + ".png"


# ---------------------------------------------------------------------------
# Graph sources


def _gadget_from_spec(args) -> Gadget:
    spec = args.graph
    if spec == "edge":
        return Gadget(make_multigraph(2, [(0, 1)]), 0, 1)
    if spec == "path":
        return Gadget(make_multigraph(3, [(0, 2), (2, 1)]), 0, 1)
    if spec == "doubled":
        return Gadget(make_multigraph(2, [(0, 1), (0, 1)]), 0, 1)
    if spec == "dk":
        return complete_bipartite_dk(args.k)
    if spec == "dn":
        return parallel_gadget_dn(args.n)
    if spec.startswith("file:"):
        g = read_graph_file(spec[len("file:"):])
        if isinstance(g, Gadget):
            return g
        raise ValueError("graph file must declare both terminals for this command")
    raise ValueError(f"unknown graph source '{spec}'")


def _sample_target(args):
    spec = args.graph
    if spec == "z2box":
        return z2_box(args.L, 3 * args.L, args.mode)
    if spec == "dn":
        return parallel_gadget_dn(args.size).graph
    if spec.startswith("file:"):
        g = read_graph_file(spec[len("file:"):])
        return g.graph if isinstance(g, Gadget) else g
    if spec in ("edge", "path", "doubled", "dk"):
        return _gadget_from_spec(args).graph
    raise ValueError(f"unknown graph source '{spec}'")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_sample(args) -> int:
    _default(args, seed=0, threads=1, p=Fraction(1, 2), r=Fraction(1, 2),
             n=1000, k=3, size=2, L=8, mode="nn", event="dump", plot=False)
    if args.n < 1:
        raise ValueError("need n >= 1")
    target = _sample_target(args)
    lines = _config_lines(args)
    if args.event == "dump":
        graph = target.to_multigraph() if isinstance(target, LatticeBox) else target
        rng = dac.stream(args.seed)
        samples = [dac.sample_dac(graph, args.p, args.r, rng) for _ in range(args.n)]
        with _open_out(args.out) as fh:
            dac.write_samples_csv(fh, samples, comments=lines)
        return EXIT_OK
    if args.event == "crossing":
        if not isinstance(target, LatticeBox):
            raise ValueError("event 'crossing' needs --graph z2box")
        est = mc.estimate_event(target, "crossing", args.p, args.r,
                                args.n, args.seed, threads=args.threads)
        with _open_out(args.out) as fh:
            mc.write_probe_csv(fh, [est], comments=lines)
        if args.plot:
            from . import plots

            plots.render_probe_figure([est], _plot_path(args),
                                      title=f"crossing at p={args.p}")
        return EXIT_OK
    raise ValueError(f"unknown event '{args.event}'")


def cmd_exact(args) -> int:
    _default(args, k=3, n=2, poly="f", max_edges=24, max_clusters=20, plot=False)
    gadget = _gadget_from_spec(args)
    caps = EnumerationCaps(args.max_edges, args.max_clusters)
    want_h = args.poly in ("h", "both") or bool(args.eval_h)
    want_f = args.poly in ("f", "both") or bool(args.eval_f)
    hpoly = connection_poly(gadget, caps) if want_h else None
    fpoly = pivotality_poly(gadget, caps) if want_f else None
    evals = []
    for pv in args.eval_h or []:
        evals.append(f"h({pv}) = {hpoly.evaluate(pv, 0)}")
    for pv, rv in args.eval_f or []:
        evals.append(f"f({pv},{rv}) = {fpoly.evaluate(pv, rv)}")
    lines = _config_lines(args) + evals
    with _open_out(args.out) as fh:
        first = True
        if args.poly in ("h", "both"):
            write_poly_csv(fh, hpoly, "h", comments=lines)
            first = False
        if args.poly in ("f", "both"):
            write_poly_csv(fh, fpoly, "f", comments=lines if first else ())
    if args.plot:
        from . import plots

        plots.render_poly_figure(fpoly if fpoly is not None else hpoly,
                                 _plot_path(args), name=args.poly)
    return EXIT_OK


_STATUS_CODE = {
    "pass": EXIT_OK,
    "fail": EXIT_CERT_FAILED,
    "inconclusive": EXIT_INCONCLUSIVE,
}


def status_exit_code(status: str) -> int:
    return _STATUS_CODE[status]


def cmd_certify(args) -> int:
    _default(args, delta=None, nmax=None, plot=False)
    grid = parse_grid(args.grid) if args.grid else None
    curve = None
    if args.family == "dk-nonmonotone":
        certs = treecrit.nonmonotonicity_certificate(k=args.k, p0=args.p0)
        title = "non-monotone coloring threshold (hub-gadget tree)"
    elif args.family == "nonbounded-discontinuity":
        curve, certs = treecrit.discontinuity_family_certificate(
            grid, n_max=args.nmax or 6
        )
        title = "threshold jump at p=0 (parallel-gadget tree)"
    elif args.family == "bounded-degree-discontinuity":
        certs = treecrit.bounded_degree_certificate(
            delta=args.delta or 5, n_max=args.nmax or 5
        )
        title = "threshold jump constants (bounded-degree construction)"
    elif args.family == "rcbounds-check":
        certs = treecrit.rcbounds_certificate(delta=args.delta or 3, p_grid=grid)
        title = "two-sided threshold bounds (degree-3 tree)"
    else:
        raise ValueError(f"unknown certificate family '{args.family}'")
    report = treecrit.render_report(title, certs)
    with _open_out(args.out) as fh:
        for line in _config_lines(args):
            fh.write(f"# {line}\n")
        fh.write(report)
        if not report.endswith("\n"):
            fh.write("\n")
    if curve is not None and args.curve_out:
        with open(args.curve_out, "w") as fh:
            curve.to_csv(fh, comments=_config_lines(args))
    if curve is not None and args.plot:
        from . import plots

        plots.render_curve_figure(curve.points, _plot_path(args),
                                  title="threshold curve with p=0 jump")
    return status_exit_code(treecrit.bundle_status(certs))


def cmd_curve(args) -> int:
    _default(args, seed=0, threads=1, L=32, samples=4000, mode="nn", plot=False)
    if args.kind == "rc":
        grid = parse_grid(args.grid or "0:0.4:0.1")
        points = [
            mc.rc_estimate(pv, args.L, args.samples, args.mode, args.seed,
                           threads=args.threads, _key=(i,))
            for i, pv in enumerate(grid)
        ]
        with _open_out(args.out) as fh:
            mc.write_rc_csv(fh, points, comments=_config_lines(args))
        if args.probes_out:
            with open(args.probes_out, "w") as fh:
                mc.write_probe_csv(
                    fh, [e for pt in points for e in pt.probes],
                    comments=_config_lines(args),
                )
        if args.plot:
            from . import plots

            plots.render_curve_figure(points, _plot_path(args))
        return EXIT_OK
    if args.kind == "duality":
        if args.p is None:
            raise ValueError("duality needs --p")
        rep = mc.duality_check(args.p, args.L, args.samples, args.seed,
                               threads=args.threads)
        with _open_out(args.out) as fh:
            for line in _config_lines(args):
                fh.write(f"# {line}\n")
            fh.write("p,L,rc_nn_lo,rc_nn_hi,rc_star_lo,rc_star_hi,"
                     "sum_lo,sum_mid,sum_hi,tolerance\n")
            fh.write(
                f"{rep.p!r},{rep.L},{rep.nn.r_lo},{rep.nn.r_hi},"
                f"{rep.star.r_lo},{rep.star.r_hi},{rep.sum_lo!r},"
                f"{rep.sum_mid!r},{rep.sum_hi!r},{rep.tolerance!r}\n"
            )
        if args.plot:
            from . import plots

            plots.render_duality_figure(rep, _plot_path(args))
        return EXIT_OK
    if args.kind == "psi":
        if args.p is None:
            raise ValueError("psi needs --p")
        nmax = args.nmax or 24
        n_list = list(range(4, nmax + 1, 4))
        if len(n_list) < 2:
            raise ValueError("psi needs --nmax >= 8")
        fit = mc.psi_fit(args.p, n_list, args.samples, args.seed,
                         threads=args.threads)
        with _open_out(args.out) as fh:
            for line in _config_lines(args):
                fh.write(f"# {line}\n")
            fh.write(f"# psi = {fit.psi!r} se = {fit.se!r} z = {fit.z!r} "
                     f"positive = {fit.positive}\n")
            if fit.dropped:
                fh.write(f"# dropped radii with zero hits: "
                         f"{','.join(map(str, fit.dropped))}\n")
            fh.write("n,frequency\n")
            for n, freq in zip(fit.n_values, fit.frequencies):
                fh.write(f"{n},{freq!r}\n")
        if args.plot:
            from . import plots

            plots.render_psi_figure(fit, _plot_path(args))
        return EXIT_OK
    if args.kind == "scan":
        grid = parse_grid(args.grid or "0:0.4:0.1")
        rep = mc.continuity_scan(grid, args.L, args.samples, args.seed,
                                 threads=args.threads)
        with _open_out(args.out) as fh:
            comments = _config_lines(args)
            comments.append(f"flagged = {rep.flagged}")
            comments.extend(rep.flags)
            comments.append(f"max_step = {rep.max_diff!r}")
            fh.write("".join(f"# {line}\n" for line in comments))
            fh.write("p,r_lo,r_hi,method\n")
            for pt in rep.curve.points:
                fh.write(f"{pt.p},{pt.r_lo},{pt.r_hi},{pt.method}\n")
        if args.plot:
            from . import plots

            plots.render_scan_figure(rep, _plot_path(args))
        return EXIT_OK
    if args.kind == "criterion":
        if args.p is None or args.a is None or args.gamma is None:
            raise ValueError("criterion needs --p, --a and --gamma")
        rep = mc.finite_size_criterion(args.p, args.a, args.L, args.gamma,
                                       args.samples, args.seed,
                                       threads=args.threads)
        with _open_out(args.out) as fh:
            for line in _config_lines(args):
                fh.write(f"# {line}\n")
            fh.write(f"arm radius n = {rep.arm_radius}\n")
            fh.write(f"one-arm estimate = {rep.arm.estimate!r} "
                     f"[{rep.arm.ci_lo!r}, {rep.arm.ci_hi!r}]\n")
            fh.write(f"(3L+1)(L+1) * arm = {rep.lhs!r} vs gamma = {rep.gamma!r}: "
                     f"{'ok' if rep.arm_ok else 'exceeded'}\n")
            fh.write(f"crossing estimate = {rep.crossing.estimate!r} "
                     f"[{rep.crossing.ci_lo!r}, {rep.crossing.ci_hi!r}] "
                     f"vs 1 - gamma: {'ok' if rep.crossing_ok else 'too low'}\n")
            fh.write(f"criterion satisfied: {rep.satisfied}\n")
        return EXIT_OK
    raise ValueError(f"unknown curve kind '{args.kind}'")


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dacolor",
        description="Cluster-coloring percolation: sampling, exact gadget "
                    "polynomials, threshold certificates, and lattice "
                    "Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--plot", action="store_const", const=True, default=None,
                        help="also render a PNG figure next to the output")

    sp = sub.add_parser("sample", help="draw configurations or tally an event")
    common(sp)
    sp.add_argument("--graph", default="edge",
                    help="edge|path|doubled|dk|dn|z2box|file:PATH")
    sp.add_argument("--k", type=int, help="middle vertices for --graph dk")
    sp.add_argument("--size", type=int, help="parallel edges for --graph dn")
    sp.add_argument("--L", type=int, help="box width for --graph z2box")
    sp.add_argument("--mode", choices=("nn", "star"))
    sp.add_argument("--p", type=_rational)
    sp.add_argument("--r", type=_rational)
    sp.add_argument("--n", type=int, help="number of samples")
    sp.add_argument("--event", choices=("dump", "crossing"))
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("exact", help="exact gadget polynomials and values")
    common(sp)
    sp.add_argument("--graph", default="edge",
                    help="edge|path|doubled|dk|dn|file:PATH (with terminals)")
    sp.add_argument("--k", type=int, help="middle vertices for --graph dk")
    sp.add_argument("--n", type=int, help="parallel edges for --graph dn")
    sp.add_argument("--poly", choices=("h", "f", "both"))
    sp.add_argument("--eval-h", action="append", type=_rational, metavar="P")
    sp.add_argument("--eval-f", action="append", nargs=2, type=_rational,
                    metavar=("P", "R"))
    sp.add_argument("--max-edges", type=int)
    sp.add_argument("--max-clusters", type=int)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("certify", help="threshold certificates")
    common(sp)
    sp.add_argument("family", choices=(
        "dk-nonmonotone", "nonbounded-discontinuity",
        "bounded-degree-discontinuity", "rcbounds-check",
    ))
    sp.add_argument("--k", type=int)
    sp.add_argument("--p0", type=_rational)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--delta", type=int)
    sp.add_argument("--grid")
    sp.add_argument("--curve-out")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("curve", help="Monte Carlo curves and checks")
    common(sp)
    sp.add_argument("kind", choices=("rc", "duality", "psi", "scan", "criterion"))
    sp.add_argument("--grid", help="p grid, start:stop:step or comma list")
    sp.add_argument("--p", type=_rational)
    sp.add_argument("--a", type=_rational)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--L", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--mode", choices=("nn", "star"))
    sp.add_argument("--probes-out")
    sp.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        _merge_config(args)
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
