"""Critical-value analysis for gadget trees.

A gadget sequence D_n defines a tree-like graph: a degree-3 tree whose
level-n edges are replaced by copies of D_n glued at the terminals.  The
bond threshold of that graph is controlled by the terminal connection
probability h(p), and the coloring threshold at bond density p by the
pivotality probability f(p, r): if the limsup over n stays strictly below
1/2 the parameter is subcritical, if the liminf exceeds 1/2 it is
supercritical, and nothing is concluded at exactly 1/2.

Everything here is exact rational (or quadratic-irrational) arithmetic;
certificates re-verify every cited inequality at assembly time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Protocol

from .exact import (
    BiPoly,
    DEFAULT_CAPS,
    EnumerationCaps,
    bk_probability,
    connection_poly,
    pivotality_poly,
)
from .multigraph import Gadget, MultiGraph, complete_bipartite_dk, parallel_gadget_dn

HALF = Fraction(1, 2)
DEFAULT_TOL = Fraction(1, 2**40)


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class Certificate:
    """One checked claim with the exact evidence that was recomputed."""

    claim: str
    rule: str
    evidence: tuple[tuple[str, str], ...]
    status: str  # "pass" | "fail" | "inconclusive"

    def to_report(self) -> str:
        lines = [f"claim: {self.claim}", f"rule: {self.rule}",
                 f"status: {self.status.upper()}"]
        for key, value in self.evidence:
            lines.append(f"  {key} = {value}")
        return "\n".join(lines)


def _fmt(value) -> str:
    # Exact fractions from high iterate counts can run to 10^5 digits;
    # comparisons stay exact, only the printed evidence is rounded.
    if isinstance(value, Fraction):
        if value.numerator.bit_length() < 128 and value.denominator.bit_length() < 128:
            return str(value)
        return f"~{float(value):.12g} (exact rational, {value.denominator.bit_length()} denominator bits)"
    return str(value)


def _cert(claim: str, rule: str, evidence: dict, status: str) -> Certificate:
    return Certificate(
        claim, rule, tuple((k, _fmt(v)) for k, v in evidence.items()), status
    )


def _strict_status(holds_strict: bool, is_equal: bool) -> str:
    if holds_strict:
        return "pass"
    return "inconclusive" if is_equal else "fail"


def bundle_status(certs: Iterable[Certificate]) -> str:
    statuses = [c.status for c in certs]
    if any(s == "fail" for s in statuses):
        return "fail"
    if any(s == "inconclusive" for s in statuses):
        return "inconclusive"
    return "pass"


def render_report(title: str, certs: Iterable[Certificate]) -> str:
    certs = list(certs)
    out = [f"=== {title} ===", f"overall: {bundle_status(certs).upper()}", ""]
    for i, c in enumerate(certs, 1):
        out.append(f"[{i}] {c.to_report()}")
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Critical curves


@dataclass(frozen=True)
class CurvePoint:
    p: Fraction
    r_lo: Fraction
    r_hi: Fraction
    method: str  # "exact-root" | "bisect-bracket" | "MC"


@dataclass(frozen=True)
class CriticalCurve:
    points: tuple[CurvePoint, ...]

    def to_csv(self, fh, comments: Iterable[str] = ()) -> None:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write("p,r_lo,r_hi,method\n")
        for pt in self.points:
            fh.write(f"{pt.p},{pt.r_lo},{pt.r_hi},{pt.method}\n")


# ---------------------------------------------------------------------------
# Root bracketing


def _check_nondecreasing(values, what: str) -> None:
    for a, b in zip(values, values[1:]):
        if a > b:
            raise ValueError(f"{what} is not nondecreasing on the sample grid")


def pc_root(h: BiPoly, tol: Fraction = DEFAULT_TOL) -> tuple[Fraction, Fraction]:
    """Bracket the solution of h(p) = 1/2 to within ``tol``.

    h must be univariate in p, nondecreasing, with h(0) < 1/2 < h(1).
    Returns exact rational endpoints; an exact hit gives a degenerate
    bracket (m, m).
    """
    if not h.is_univariate_p():
        raise ValueError("h must be univariate in p")
    grid = [h.evaluate(Fraction(j, 16), 0) for j in range(17)]
    _check_nondecreasing(grid, "h")
    if not (grid[0] < HALF < grid[-1]):
        raise ValueError(
            f"h does not cross 1/2 on [0,1]: h(0)={grid[0]}, h(1)={grid[-1]}"
        )
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = h.evaluate(mid, 0)
        if v == HALF:
            return (mid, mid)
        if v < HALF:
            lo = mid
        else:
            hi = mid
    return (lo, hi)


def rc_root(f: BiPoly, p, tol: Fraction = DEFAULT_TOL) -> tuple[Fraction, Fraction]:
    """Bracket the solution of f(p, r) = 1/2 in r at fixed rational p.

    Boundary conventions: f(p,0) >= 1/2 yields (0,0) (the coloring
    threshold is zero), f(p,1) <= 1/2 yields (1,1).
    """
    p = Fraction(p)
    g = f.subs_p(p)
    grid = [g.evaluate(0, Fraction(j, 16)) for j in range(17)]
    _check_nondecreasing(grid, "f(p, .)")
    if grid[0] >= HALF:
        return (Fraction(0), Fraction(0))
    if grid[-1] <= HALF:
        return (Fraction(1), Fraction(1))
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = g.evaluate(0, mid)
        if v == HALF:
            return (mid, mid)
        if v < HALF:
            lo = mid
        else:
            hi = mid
    return (lo, hi)


# ---------------------------------------------------------------------------
# Closed forms for the two recurring gadget families


def dk_connection_value(p, k: int) -> Fraction:
    """Terminal connection probability of the hub gadget with k middle
    vertices: (1-q^2)^2 - 2 p^2 q^2 (1-p^2)^k with q = 1-p."""
    p = Fraction(p)
    q = 1 - p
    return (1 - q * q) ** 2 - 2 * p * p * q * q * (1 - p * p) ** k


def dk_pivotality_zero_p(r) -> Fraction:
    """f(0, r) = 2r^2 - r^3 for the hub gadget, independent of k: with all
    edges closed the event needs the far terminal black plus a black hub."""
    r = Fraction(r)
    return 2 * r * r - r**3


def dk_pivotality_lower(p, r) -> Fraction:
    """Lower bound (any k): some terminal edge open and the far terminal's
    cluster black imply the event, giving (1-(1-p)^4) r."""
    p, r = Fraction(p), Fraction(r)
    return (1 - (1 - p) ** 4) * r


def fact4_upper_bound(p0, k: int, r=Fraction(2, 3)) -> tuple[Fraction, Fraction]:
    """(P(B_k), bound) where bound = r^2 P(B_k) + (1 - P(B_k)) dominates
    f(p0, r): on B_k both terminals are isolated and the event reduces to
    two independent black clusters."""
    r = Fraction(r)
    pb = bk_probability(p0, k)
    return pb, r * r * pb + (1 - pb)


def dn_connection_closed(n: int) -> BiPoly:
    """h for the n-fold parallel gadget: (1-(1-p)^n) p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = BiPoly.var_p()
    alpha = BiPoly.const(1) - (BiPoly.const(1) - p) ** n
    return alpha * p


def dn_pivotality_closed(n: int) -> BiPoly:
    """f for the n-fold parallel gadget:
    alpha (p + (1-p) r) + (1-alpha)(p r + (1-p) r^2), alpha = 1-(1-p)^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p, r = BiPoly.var_p(), BiPoly.var_r()
    one = BiPoly.const(1)
    alpha = one - (one - p) ** n
    near = p + (one - p) * r
    far = p * r + (one - p) * r * r
    return alpha * near + (one - alpha) * far


def dn_pivotality_limit() -> BiPoly:
    """Pointwise limit of dn_pivotality_closed for p > 0: p + (1-p) r.
    (At p = 0 the sequence is constantly r^2 instead.)"""
    p, r = BiPoly.var_p(), BiPoly.var_r()
    return p + (BiPoly.const(1) - p) * r


def edge_pivotality() -> BiPoly:
    """f for the single-edge gadget: p + (1-p) r."""
    return dn_pivotality_limit()


# ---------------------------------------------------------------------------
# Non-monotonicity certificate for the hub-gadget tree


def _fact4_search(
    p0: Fraction | None, k: int | None, k_max: int
) -> tuple[Fraction | None, int | None, Fraction, dict]:
    """Find (p0, k) with P(B_k) > 17/18, scanning p0 over 2^-m and k over
    powers of two unless pinned by the caller.  Returns (p0, k, best, info);
    p0/k are None when the scan fails, with the best probability reached."""
    need = Fraction(17, 18)
    best = Fraction(0)
    p0_list = (
        [Fraction(p0)] if p0 is not None else [Fraction(1, 2**m) for m in range(2, 21)]
    )
    k_list = [k] if k is not None else [2**j for j in range(1, 21) if 2**j <= k_max]
    tried = 0
    for cand_p in p0_list:
        if p0 is None and (1 - cand_p) ** 4 <= need:
            # even k -> infinity cannot reach 17/18 at this p0
            continue
        for cand_k in k_list:
            tried += 1
            pb = bk_probability(cand_p, cand_k)
            if pb > best:
                best = pb
            if pb > need:
                return cand_p, cand_k, pb, {"pairs_tried": tried}
    return None, None, best, {"pairs_tried": tried}


def nonmonotonicity_certificate(
    k: int | None = None,
    p0: Fraction | None = None,
    k_max: int = 2**20,
    caps: EnumerationCaps = DEFAULT_CAPS,
) -> list[Certificate]:
    """Certify that as p grows from 0 past a small p0, the coloring
    threshold of the hub-gadget tree moves down below 2/3 and back above
    it: facts (1) bond threshold exceeds 1/3, (2) threshold at p=0 below
    2/3, (3) threshold at p=1/3 below 2/3, (4) threshold at p0 above 2/3.

    With k or p0 omitted, a pair making fact (4) work is searched over
    p0 in {2^-m} and k in powers of two.
    """
    certs: list[Certificate] = []
    found_p0, found_k, best_pb, info = _fact4_search(p0, k, k_max)
    cert_k = found_k if found_k is not None else (k if k is not None else 3)

    # fact 1: h(1/3) < 1/2, so the bond threshold exceeds 1/3
    h13 = dk_connection_value(Fraction(1, 3), cert_k)
    ev = {"k": cert_k, "h(1/3)": h13, "bound": "25/81", "target": "1/2"}
    small = 2 * (cert_k + 2) <= 12
    if small:
        hpoly = connection_poly(complete_bipartite_dk(cert_k), caps)
        ev["enumeration_agrees"] = hpoly.evaluate(Fraction(1, 3), 0) == h13
    ok = h13 < HALF and h13 <= Fraction(25, 81) and ev.get("enumeration_agrees", True)
    certs.append(_cert(
        f"bond threshold of the k={cert_k} hub tree exceeds 1/3",
        "subcritical gadget connection: h(1/3) < 1/2",
        ev, _strict_status(ok, h13 == HALF),
    ))

    # fact 2: f(0, 2/3) = 16/27 > 1/2, so r_c(0) < 2/3
    f0 = dk_pivotality_zero_p(Fraction(2, 3))
    ev = {"k": cert_k, "f(0,2/3)": f0, "target": "1/2"}
    if small:
        fpoly = pivotality_poly(complete_bipartite_dk(cert_k), caps)
        ev["enumeration_agrees"] = (
            fpoly.evaluate(0, Fraction(2, 3)) == f0
        )
    ok = f0 > HALF and f0 == Fraction(16, 27) and ev.get("enumeration_agrees", True)
    certs.append(_cert(
        f"coloring threshold at p=0 of the k={cert_k} hub tree is below 2/3",
        "supercritical pivotality: f(0, 2/3) > 1/2",
        ev, _strict_status(ok, f0 == HALF),
    ))

    # fact 3: f(1/3, 2/3) >= 130/243 > 1/2, so r_c(1/3) < 2/3
    lb = dk_pivotality_lower(Fraction(1, 3), Fraction(2, 3))
    ev = {"k": cert_k, "lower_bound_f(1/3,2/3)": lb, "target": "1/2"}
    if small:
        fval = fpoly.evaluate(Fraction(1, 3), Fraction(2, 3))
        ev["exact_f(1/3,2/3)"] = fval
        ev["enumeration_at_least_bound"] = fval >= lb
    ok = (
        lb > HALF
        and lb == Fraction(130, 243)
        and ev.get("enumeration_at_least_bound", True)
    )
    certs.append(_cert(
        f"coloring threshold at p=1/3 of the k={cert_k} hub tree is below 2/3",
        "supercritical pivotality via an open terminal edge: f(1/3, 2/3) >= (1-(1-p)^4) r > 1/2",
        ev, _strict_status(ok, lb == HALF),
    ))

    # fact 4: f(p0, 2/3) <= (2/3)^2 P(B_k) + (1 - P(B_k)) < 1/2
    if found_p0 is not None:
        pb, bound = fact4_upper_bound(found_p0, found_k)
        ev = {
            "p0": found_p0, "k": found_k, "P(Bk)": pb,
            "P(Bk)_float": float(pb), "bound_f(p0,2/3)": bound,
            "bound_float": float(bound), "target": "1/2",
            "requires": "P(Bk) > 17/18",
        }
        ev.update(info)
        certs.append(_cert(
            f"coloring threshold at p0={found_p0} of the k={found_k} hub tree exceeds 2/3",
            "subcritical pivotality on the isolated-terminals event: bound < 1/2",
            ev, _strict_status(pb > Fraction(17, 18) and bound < HALF, bound == HALF),
        ))
    else:
        certs.append(_cert(
            "coloring threshold above 2/3 at some small p0",
            "subcritical pivotality on the isolated-terminals event",
            {
                "status": "search failed",
                "best_P(Bk)": best_pb,
                "best_P(Bk)_float": float(best_pb),
                "requires": "P(Bk) > 17/18",
                **info,
            },
            "fail",
        ))
    return certs


# ---------------------------------------------------------------------------
# Discontinuity certificate for the parallel-gadget tree


def discontinuity_family_certificate(
    p_grid: Iterable | None = None,
    n_max: int = 6,
    caps: EnumerationCaps = DEFAULT_CAPS,
    tol: Fraction = DEFAULT_TOL,
) -> tuple[CriticalCurve, list[Certificate]]:
    """Certify the coloring-threshold curve of the parallel-gadget tree:
    r_c(p) = (1/2 - p)/(1 - p) for p in (0, 1/2] but r_c(0) is the root
    of r^2 = 1/2, so the curve jumps at p = 0.
    """
    if p_grid is None:
        p_grid = [Fraction(j, 10) for j in range(5)] + [HALF]
    p_grid = sorted(Fraction(p) for p in p_grid)
    if any(p < 0 or p > HALF for p in p_grid):
        raise ValueError("p grid must lie in [0, 1/2]")
    certs: list[Certificate] = []

    # closed forms vs enumeration on small instances
    agree = True
    checked = []
    for n in range(1, min(n_max, 4) + 1):
        gadget = parallel_gadget_dn(n)
        agree &= connection_poly(gadget, caps) == dn_connection_closed(n)
        agree &= pivotality_poly(gadget, caps) == dn_pivotality_closed(n)
        checked.append(n)
    certs.append(_cert(
        "closed forms for the parallel gadget match direct enumeration",
        "polynomial identity over all coefficients",
        {"n_checked": checked}, "pass" if agree else "fail",
    ))

    # monotone bracketing toward the limit, as polynomial identities:
    # limit - f_n = (1-p)^n (1-r) (p + (1-p) r), which is nonnegative on
    # the unit square and shrinks geometrically for p > 0
    limit = dn_pivotality_limit()
    p, r = BiPoly.var_p(), BiPoly.var_r()
    one = BiPoly.const(1)
    gap_ok = True
    for n in range(1, n_max + 1):
        gap = limit - dn_pivotality_closed(n)
        gap_ok &= gap == (one - p) ** n * (one - r) * (p + (one - p) * r)
    certs.append(_cert(
        f"pivotality increases with n and is dominated by its limit (n <= {n_max})",
        "exact gap identity: limit - f_n = (1-p)^n (1-r)(p + (1-p) r) >= 0",
        {"n_max": n_max}, "pass" if gap_ok else "fail",
    ))

    # the p = 0 section is r^2 for every n
    sq = r * r
    const_ok = all(
        dn_pivotality_closed(n).subs_p(0) == sq for n in range(1, n_max + 1)
    )
    bracket0 = rc_root(dn_pivotality_closed(1), 0, tol)
    lo0, hi0 = bracket0
    bracket_ok = lo0 * lo0 < HALF < hi0 * hi0
    certs.append(_cert(
        "threshold at p=0 is the root of r^2 = 1/2 (about 0.7071), for every n",
        "p=0 section of f_n is r^2 exactly; bisection bracket straddles",
        {
            "f_n(0,r)": "r^2",
            "r_lo": lo0, "r_hi": hi0,
            "r_lo_float": float(lo0), "r_hi_float": float(hi0),
            "lo^2<1/2<hi^2": bracket_ok,
        },
        "pass" if const_ok and bracket_ok else "fail",
    ))

    # curve points: exact root of the limit for p > 0, bisection at p = 0
    points = []
    formula_ok = True
    for pv in p_grid:
        if pv == 0:
            points.append(CurvePoint(pv, lo0, hi0, "bisect-bracket"))
            continue
        rstar = (HALF - pv) / (1 - pv)
        formula_ok &= limit.evaluate(pv, rstar) == HALF
        points.append(CurvePoint(pv, rstar, rstar, "exact-root"))
    curve = CriticalCurve(tuple(points))
    certs.append(_cert(
        "limit curve r_c(p) = (1/2 - p)/(1 - p) on the positive grid",
        "exact substitution: limit(p, r_c(p)) = 1/2",
        {"grid": [str(pv) for pv in p_grid if pv > 0]},
        "pass" if formula_ok else "fail",
    ))

    # the jump at 0: bracket minus the right limit 1/2
    jump_lo, jump_hi = lo0 - HALF, hi0 - HALF
    certs.append(_cert(
        "threshold curve jumps at p=0 by about 0.2071",
        "right limit of the curve is 1/2; p=0 value bracket sits strictly above",
        {
            "right_limit": "1/2",
            "jump_lo": jump_lo, "jump_hi": jump_hi,
            "jump_lo_float": float(jump_lo), "jump_hi_float": float(jump_hi),
        },
        "pass" if jump_lo > 0 else "fail",
    ))
    return curve, certs


# ---------------------------------------------------------------------------
# Bounded-degree jump certificate


@dataclass(frozen=True)
class Sqrt5:
    """Exact arithmetic in Q(sqrt 5): numbers a + b sqrt(5)."""

    a: Fraction
    b: Fraction = Fraction(0)

    @staticmethod
    def _coerce(x) -> "Sqrt5":
        return x if isinstance(x, Sqrt5) else Sqrt5(Fraction(x))

    def __add__(self, other):
        other = self._coerce(other)
        return Sqrt5(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Sqrt5(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return Sqrt5(
            self.a * other.a + 5 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def is_positive(self) -> bool:
        a, b = self.a, self.b
        if b == 0:
            return a > 0
        if a == 0:
            return b > 0
        if a > 0 and b > 0:
            return True
        if a < 0 and b < 0:
            return False
        if a > 0:  # b < 0: positive iff a^2 > 5 b^2
            return a * a > 5 * b * b
        return 5 * b * b > a * a  # a < 0, b > 0

    def __lt__(self, other):
        return (self._coerce(other) - self).is_positive()

    def __gt__(self, other):
        return (self - self._coerce(other)).is_positive()

    def __float__(self):
        return float(self.a) + float(self.b) * 5**0.5

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt(5)"


class ThresholdFamily(Protocol):
    """A gadget family with a sharp connection threshold at p = 1/2."""

    name: str

    def gadget(self, n: int) -> Gadget: ...

    def connection_value(self, n: int, p) -> Fraction: ...


def _bridge_poly() -> BiPoly:
    """Two-terminal reliability of the 5-edge bridge network:
    2p^2 + 2p^3 - 5p^4 + 2p^5 (self-dual: equals 1/2 at p = 1/2)."""
    p = BiPoly.var_p()
    return (
        2 * p**2 + 2 * p**3 - 5 * p**4 + 2 * p**5
    )


class DoubledBridgeFamily:
    """Two disjoint n-fold-iterated bridge networks in parallel.

    One bridge iteration substitutes every edge by a fresh bridge; the
    terminal connection probability composes, c_n(p) = 1 - (1 - g*...*g(p))^2
    with g the bridge reliability.  g fixes 1/2, so c_n(1/2) = 3/4 for all n.
    """

    name = "doubled-bridge"

    def g(self, p) -> Fraction:
        p = Fraction(p)
        return 2 * p**2 + 2 * p**3 - 5 * p**4 + 2 * p**5

    def connection_value(self, n: int, p) -> Fraction:
        if n < 1:
            raise ValueError("n must be >= 1")
        x = Fraction(p)
        for _ in range(n):
            x = self.g(x)
        return 1 - (1 - x) ** 2

    def gadget(self, n: int) -> Gadget:
        if n != 1:
            raise ValueError(
                "only the depth-1 instance is materialized; deeper connection "
                "values come from the exact composition closed form"
            )
        edges = []
        for u, v in ((2, 3), (4, 5)):
            edges += [(0, u), (0, v), (u, v), (u, 1), (v, 1)]
        graph = MultiGraph(6, tuple(edges), {0: "x", 1: "y"})
        return Gadget(graph, 0, 1)


def bounded_degree_certificate(
    family: ThresholdFamily | None = None,
    delta: int = 5,
    n_max: int = 5,
    caps: EnumerationCaps = DEFAULT_CAPS,
) -> list[Certificate]:
    """Certify the arithmetic behind the bounded-degree jump construction:
    with a sharp-threshold gadget family, the coloring threshold stays at
    or above r_0 = (sqrt5 - 1)/2 for p < 1/2 but drops to at most
    r_1 = 1/2 at p = 1/2.
    """
    if family is None:
        family = DoubledBridgeFamily()
    certs: list[Certificate] = []
    r0 = Sqrt5(Fraction(-1, 2), Fraction(1, 2))
    one = Sqrt5(Fraction(1))

    eq0 = r0 * (one + r0)
    certs.append(_cert(
        "r_0 = (sqrt5 - 1)/2 solves r(1 + r) = 1",
        "exact arithmetic in Q(sqrt 5)",
        {"r_0": r0, "r_0_float": float(r0), "r_0*(1+r_0)": eq0},
        "pass" if eq0.a == 1 and eq0.b == 0 else "fail",
    ))

    r1 = Fraction(1, 2)
    eq1 = Fraction(2, 3) * (1 + r1)
    certs.append(_cert(
        "r_1 = 1/2 solves (2/3)(1 + r) = 1",
        "exact rational arithmetic",
        {"r_1": r1, "(2/3)(1+r_1)": eq1},
        "pass" if eq1 == 1 else "fail",
    ))

    certs.append(_cert(
        "r_1 < r_0",
        "sign of r_0 - r_1 in Q(sqrt 5), i.e. sqrt5 > 2",
        {"r_0 - r_1": r0 - Sqrt5(r1), "difference_float": float(r0 - Sqrt5(r1))},
        "pass" if Sqrt5(r1) < r0 else "fail",
    ))

    # (i) a supercritical bond density that still keeps p(1-(1-p)^delta)
    # below 1/2 exists for the given degree bound
    found = None
    for d in range(2, 13):
        cand = HALF + Fraction(1, 10**d)
        val = cand * (1 - (1 - cand) ** delta)
        if val < HALF:
            found = (cand, val)
            break
    ev = {"delta": delta}
    if found:
        ev.update({"p_prime": found[0], "value": found[1],
                   "value_float": float(found[1]), "target": "1/2"})
    certs.append(_cert(
        f"some p' > 1/2 has p'(1 - (1-p')^{delta}) < 1/2",
        "exact evaluation on p' = 1/2 + 10^-d, first hit",
        ev, "pass" if found else "fail",
    ))

    # (ii) the boundary identity ((r+1)/2) r = 1/2 at r = r_0, with the
    # strictness coming from any bond density strictly below 1/2
    ident = (r0 + one) * Sqrt5(HALF) * r0
    p_sample = Fraction(49, 100)
    strict = (Sqrt5(p_sample) + r0 * Sqrt5(1 - p_sample)) * r0
    certs.append(_cert(
        "((r_0+1)/2) r_0 equals 1/2, and (p + r_0(1-p)) r_0 < 1/2 for p < 1/2",
        "exact identity in Q(sqrt 5) plus a strict sample at p = 49/100",
        {
            "((r_0+1)/2)r_0": ident,
            "sample_p": p_sample,
            "(p + r_0(1-p))r_0": strict,
            "strict_value_float": float(strict),
        },
        "pass"
        if ident.a == HALF and ident.b == 0 and strict < Sqrt5(HALF)
        else "fail",
    ))

    # (iii) the family's connection value at 1/2 stays above 2/3
    vals = []
    ok = True
    for n in range(1, n_max + 1):
        c = family.connection_value(n, HALF)
        vals.append(c)
        ok &= c > Fraction(2, 3)
    ev = {
        "family": family.name,
        "n_tested": list(range(1, n_max + 1)),
        "c_n(1/2)": [str(v) for v in vals],
    }
    try:
        gad = family.gadget(1)
        poly = connection_poly(gad, caps)
        ev["enumeration_c_1(1/2)"] = poly.evaluate(HALF, 0)
        ok &= poly.evaluate(HALF, 0) == family.connection_value(1, HALF)
    except ValueError:
        pass
    certs.append(_cert(
        "connection value at p=1/2 exceeds 2/3 for all tested depths",
        "exact composition of the self-dual gadget reliability",
        ev, "pass" if ok else "fail",
    ))
    return certs


# ---------------------------------------------------------------------------
# Two-sided threshold bounds for bounded-degree trees


def rcbounds_certificate(
    delta: int = 3, p_grid: Iterable | None = None, tol: Fraction = DEFAULT_TOL
) -> list[Certificate]:
    """Check the two-sided bounds relating the coloring threshold at bond
    density p to its p=0 value on a degree-delta graph:

        1 - (1 - r_c(0)) / (1-p)^delta <= r_c(p) <= r_c(0) / (1-p)^delta

    on the plain degree-3 tree, whose curve is exactly (1/2-p)/(1-p).
    """
    if p_grid is None:
        p_grid = [Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(3, 10)]
    p_grid = sorted(Fraction(p) for p in p_grid)
    if any(p < 0 or p >= 1 for p in p_grid):
        raise ValueError("p grid must lie in [0, 1)")
    f = edge_pivotality()
    rc0 = HALF
    certs: list[Certificate] = []
    rows = []
    ok = True
    for pv in p_grid:
        rc = (HALF - pv) / (1 - pv) if pv < HALF else Fraction(0)
        ok &= f.evaluate(pv, rc) == HALF or rc == 0
        q_pow = (1 - pv) ** delta
        lower = 1 - (1 - rc0) / q_pow
        upper = rc0 / q_pow
        holds = lower <= rc <= upper
        ok &= holds
        rows.append(f"p={pv}: {lower} <= {rc} <= {upper} [{holds}]")
    certs.append(_cert(
        f"two-sided degree-{delta} threshold bounds hold on the grid",
        "exact rational comparison against the exact curve of the degree-3 tree",
        {"r_c(0)": rc0, "rows": "; ".join(rows)},
        "pass" if ok else "fail",
    ))
    return certs
