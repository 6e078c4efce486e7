"""Exact rational analysis of finite gadgets.

Everything here enumerates bond configurations (and cluster colorings)
explicitly and keeps coefficients as ``fractions.Fraction``, so results
are exact.  Enumeration sizes are guarded by :class:`EnumerationCaps`;
exceeding a cap raises :class:`CapExceeded` instead of silently falling
back to sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

from .multigraph import Gadget, MultiGraph, complete_bipartite_dk


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured size caps."""


@dataclass(frozen=True)
class EnumerationCaps:
    max_edges: int = 24
    max_clusters: int = 20


DEFAULT_CAPS = EnumerationCaps()


# ---------------------------------------------------------------------------
# Bivariate polynomials in (p, r) over the rationals


class BiPoly:
    """Polynomial in (p, r) with exact Fraction coefficients.

    Coefficients live in a dict mapping (i, j) to the coefficient of
    p**i * r**j; zero coefficients are dropped, so ``==`` is structural
    equality of canonical forms.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        d: dict[tuple[int, int], Fraction] = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else coeffs
            for (i, j), c in items:
                c = Fraction(c)
                if c:
                    key = (int(i), int(j))
                    prev = d.get(key)
                    c = c if prev is None else prev + c
                    if c:
                        d[key] = c
                    elif prev is not None:
                        del d[key]
        self.coeffs = d

    # -- constructors

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): Fraction(c)})

    @classmethod
    def var_p(cls) -> "BiPoly":
        return cls({(1, 0): Fraction(1)})

    @classmethod
    def var_r(cls) -> "BiPoly":
        return cls({(0, 1): Fraction(1)})

    # -- ring operations

    def __add__(self, other) -> "BiPoly":
        other = _as_poly(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, Fraction(0)) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return _raw({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "BiPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            c = Fraction(other)
            if not c:
                return _raw({})
            return _raw({k: v * c for k, v in self.coeffs.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                k = (i1 + i2, j1 + j2)
                s = out.get(k, Fraction(0)) + c1 * c2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "BiPoly":
        if exponent < 0:
            raise ValueError("negative exponent")
        result = BiPoly.const(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            return self.coeffs == _as_poly(other).coeffs
        return self.coeffs == other.coeffs

    __hash__ = None  # mutable container

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        return f"BiPoly({self.expression()})"

    # -- queries

    def degree_p(self) -> int:
        return max((i for i, _ in self.coeffs), default=0)

    def degree_r(self) -> int:
        return max((j for _, j in self.coeffs), default=0)

    def is_univariate_p(self) -> bool:
        return all(j == 0 for _, j in self.coeffs)

    def evaluate(self, p, r) -> Fraction:
        """Exact evaluation at rational (p, r)."""
        p = Fraction(p)
        r = Fraction(r)
        pp = _powers(p, self.degree_p())
        rp = _powers(r, self.degree_r())
        return sum((c * pp[i] * rp[j] for (i, j), c in self.coeffs.items()), Fraction(0))

    def eval_float(self, p: float, r: float) -> float:
        return float(sum(float(c) * p**i * r**j for (i, j), c in self.coeffs.items()))

    def subs_p(self, p) -> "BiPoly":
        """Substitute a rational value for p, leaving a polynomial in r."""
        p = Fraction(p)
        pp = _powers(p, self.degree_p())
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.coeffs.items():
            k = (0, j)
            s = out.get(k, Fraction(0)) + c * pp[i]
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _raw(out)

    def subs_r(self, r) -> "BiPoly":
        r = Fraction(r)
        rp = _powers(r, self.degree_r())
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.coeffs.items():
            k = (i, 0)
            s = out.get(k, Fraction(0)) + c * rp[j]
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _raw(out)

    def derivative(self, var: str) -> "BiPoly":
        if var == "p":
            return _raw({(i - 1, j): c * i for (i, j), c in self.coeffs.items() if i})
        if var == "r":
            return _raw({(i, j - 1): c * j for (i, j), c in self.coeffs.items() if j})
        raise ValueError("var must be 'p' or 'r'")

    def items(self):
        """Coefficients in stable (i, j) order."""
        return sorted(self.coeffs.items())

    # -- display

    def expression(self) -> str:
        """Human-readable form, factoring each r-level over {p^i (1-p)^(d-i)}.

        This is display only; the stored representation stays expanded.
        """
        if not self.coeffs:
            return "0"
        by_j: dict[int, dict[int, Fraction]] = {}
        for (i, j), c in self.coeffs.items():
            by_j.setdefault(j, {})[i] = c
        parts = []
        for j in sorted(by_j):
            ppart = _format_p_mixed(by_j[j])
            rpart = "" if j == 0 else ("r" if j == 1 else f"r^{j}")
            if rpart and ppart == "1":
                parts.append(rpart)
            elif rpart:
                parts.append(f"{ppart} {rpart}")
            else:
                parts.append(ppart)
        return " + ".join(parts)


def _raw(coeffs: dict) -> BiPoly:
    poly = BiPoly()
    poly.coeffs = coeffs
    return poly


def _as_poly(x) -> BiPoly:
    return x if isinstance(x, BiPoly) else BiPoly.const(x)


def _powers(x: Fraction, n: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _mixed_basis(univ: dict[int, Fraction], d: int) -> list[Fraction]:
    """Coefficients b with g(p) = sum_i b[i] p^i (1-p)^(d-i), solved by
    forward substitution (the change of basis is triangular)."""
    b: list[Fraction] = []
    for t in range(d + 1):
        s = univ.get(t, Fraction(0))
        for i, bi in enumerate(b):
            s -= bi * ((-1) ** (t - i)) * comb(d - i, t - i)
        b.append(s)
    return b


def _format_p_mixed(univ: dict[int, Fraction]) -> str:
    d = max(univ)
    b = _mixed_basis(univ, d)
    terms = []
    for i, bi in enumerate(b):
        if not bi:
            continue
        factors = []
        if i == 1:
            factors.append("p")
        elif i > 1:
            factors.append(f"p^{i}")
        if d - i == 1:
            factors.append("(1-p)")
        elif d - i > 1:
            factors.append(f"(1-p)^{d - i}")
        body = " ".join(factors)
        if not body:
            terms.append(str(bi))
        elif bi == 1:
            terms.append(body)
        elif bi == -1:
            terms.append(f"-{body}")
        else:
            terms.append(f"{bi} {body}")
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return f"({out})" if len(terms) > 1 else out


def write_poly_csv(fh, poly: BiPoly, name: str = "f", comments: Iterable[str] = ()) -> None:
    """CSV rows `i, j, numerator, denominator` in stable (i, j) order,
    preceded by comment lines and a readable expression line."""
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write(f"# {name} = {poly.expression()}\n")
    fh.write("i,j,numerator,denominator\n")
    for (i, j), c in poly.items():
        fh.write(f"{i},{j},{c.numerator},{c.denominator}\n")


def read_poly_csv(fh) -> BiPoly:
    coeffs = {}
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("i,"):
            continue
        i, j, num, den = line.split(",")
        coeffs[(int(i), int(j))] = Fraction(int(num), int(den))
    return BiPoly(coeffs)


# ---------------------------------------------------------------------------
# Subset enumeration over bond configurations


def _min_labels(n: int, edges, mask: int) -> tuple[int, ...]:
    """Per vertex, the minimum vertex of its open cluster under ``mask``."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, (u, v) in enumerate(edges):
        if (mask >> e) & 1:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    mins = {}
    for v in range(n):
        root = find(v)
        if root not in mins or v < mins[root]:
            mins[root] = v
    return tuple(mins[find(v)] for v in range(n))


def _popcount_polys(m: int) -> list[BiPoly]:
    """p^s (1-p)^(m-s) for s = 0..m."""
    p = BiPoly.var_p()
    q = BiPoly.const(1) - p
    pows_p = [BiPoly.const(1)]
    pows_q = [BiPoly.const(1)]
    for _ in range(m):
        pows_p.append(pows_p[-1] * p)
        pows_q.append(pows_q[-1] * q)
    return [pows_p[s] * pows_q[m - s] for s in range(m + 1)]


def _blackcount_polys(m: int) -> list[BiPoly]:
    """r^s (1-r)^(m-s) for s = 0..m."""
    r = BiPoly.var_r()
    w = BiPoly.const(1) - r
    pows_r = [BiPoly.const(1)]
    pows_w = [BiPoly.const(1)]
    for _ in range(m):
        pows_r.append(pows_r[-1] * r)
        pows_w.append(pows_w[-1] * w)
    return [pows_r[s] * pows_w[m - s] for s in range(m + 1)]


def _check_edge_cap(graph: MultiGraph, caps: EnumerationCaps) -> None:
    if graph.edge_count > caps.max_edges:
        raise CapExceeded(
            f"{graph.edge_count} edges exceeds the enumeration cap of "
            f"{caps.max_edges}; use Monte Carlo instead or raise the cap"
        )


def connection_poly(gadget: Gadget, caps: EnumerationCaps = DEFAULT_CAPS) -> BiPoly:
    """Two-terminal connection probability as an exact polynomial in p.

    Sums p^|S| (1-p)^(|E|-S|) over the edge subsets S that join the two
    terminals.
    """
    graph = gadget.graph
    _check_edge_cap(graph, caps)
    n, m = graph.vertex_count, graph.edge_count
    edges = graph.edges
    a, b = gadget.a, gadget.b
    counts = [0] * (m + 1)
    for mask in range(1 << m):
        labels = _min_labels(n, edges, mask)
        if labels[a] == labels[b]:
            counts[mask.bit_count()] += 1
    return _counts_to_poly(counts, m)


def _counts_to_poly(counts: list[int], m: int) -> BiPoly:
    basis = _popcount_polys(m)
    out = BiPoly()
    for s, c in enumerate(counts):
        if c:
            out = out + basis[s] * c
    return out


def _counts_to_rpoly(counts: list[int], m: int) -> BiPoly:
    basis = _blackcount_polys(m)
    out = BiPoly()
    for s, c in enumerate(counts):
        if c:
            out = out + basis[s] * c
    return out


def pivotality_poly(gadget: Gadget, caps: EnumerationCaps = DEFAULT_CAPS) -> BiPoly:
    """Exact probability, as a polynomial in (p, r), of the event that the
    terminals are bond-connected or that some vertex at graph distance 1
    from the first terminal's cluster reaches the second terminal by an
    all-black path avoiding that cluster.

    The color enumeration excludes the first terminal's cluster, so the
    event is structurally independent of its color.
    """
    graph = gadget.graph
    _check_edge_cap(graph, caps)
    n, m = graph.vertex_count, graph.edge_count
    edges = graph.edges
    classes: dict[tuple[int, ...], list[int]] = {}
    for mask in range(1 << m):
        key = _min_labels(n, edges, mask)
        hist = classes.get(key)
        if hist is None:
            hist = classes[key] = [0] * (m + 1)
        hist[mask.bit_count()] += 1
    total = BiPoly()
    for key, hist in classes.items():
        rpoly = _pivot_color_poly(graph, gadget.a, gadget.b, key, caps)
        if rpoly:
            total = total + _counts_to_poly(hist, m) * rpoly
    return total


def _pivot_color_poly(
    graph: MultiGraph, a: int, b: int, minlab: tuple[int, ...], caps: EnumerationCaps
) -> BiPoly:
    """Color-measure probability of the pivotality event for one partition."""
    if minlab[a] == minlab[b]:
        return BiPoly.const(1)
    ca = minlab[a]
    clusters = sorted(set(minlab) - {ca})
    mcl = len(clusters)
    if mcl > caps.max_clusters:
        raise CapExceeded(
            f"{mcl} clusters exceeds the coloring cap of {caps.max_clusters}"
        )
    cidx = {c: i for i, c in enumerate(clusters)}
    sources = 0  # bitmask of clusters at graph distance 1 from C_a
    adj = [0] * mcl  # cluster adjacency away from C_a, as bitmasks
    for u, v in graph.edges:
        lu, lv = minlab[u], minlab[v]
        if lu == lv:
            continue
        if lu == ca:
            sources |= 1 << cidx[lv]
        elif lv == ca:
            sources |= 1 << cidx[lu]
        else:
            iu, iv = cidx[lu], cidx[lv]
            adj[iu] |= 1 << iv
            adj[iv] |= 1 << iu
    target = cidx[minlab[b]]
    counts = [0] * (mcl + 1)
    for cmask in range(1 << mcl):
        if not (cmask >> target) & 1:
            continue
        # grow the black component of b's cluster; hit a black source?
        seen = 1 << target
        stack = [target]
        hit = bool(sources & (1 << target))
        while stack and not hit:
            x = stack.pop()
            nxt = adj[x] & cmask & ~seen
            while nxt:
                low = nxt & -nxt
                nxt ^= low
                seen |= low
                i = low.bit_length() - 1
                if (sources >> i) & 1:
                    hit = True
                    break
                stack.append(i)
        if hit:
            counts[cmask.bit_count()] += 1
    return _counts_to_rpoly(counts, mcl)


# ---------------------------------------------------------------------------
# Color events and the conditioning decomposition


@dataclass(frozen=True)
class ColorEvent:
    """An event determined by the colors of finitely many vertices.

    ``predicate`` receives the colors of ``support`` (a tuple of 0/1 ints,
    aligned with the support order) and returns truth.
    """

    support: tuple[int, ...]
    predicate: Callable[[tuple[int, ...]], bool]
    name: str = ""

    @classmethod
    def cylinder(cls, assignment: dict[int, int], name: str = "") -> "ColorEvent":
        support = tuple(sorted(assignment))
        wanted = tuple(assignment[v] for v in support)

        def pred(colors: tuple[int, ...], _wanted=wanted) -> bool:
            return colors == _wanted

        return cls(support, pred, name or f"cylinder{assignment}")

    @classmethod
    def from_dnf(cls, terms: list[dict[int, int]], name: str = "") -> "ColorEvent":
        support = tuple(sorted({v for t in terms for v in t}))
        pos = {v: i for i, v in enumerate(support)}
        compiled = [[(pos[v], c) for v, c in t.items()] for t in terms]

        def pred(colors: tuple[int, ...], _compiled=compiled) -> bool:
            return any(all(colors[i] == c for i, c in term) for term in _compiled)

        return cls(support, pred, name or "dnf")

    @classmethod
    def all_black(cls, vertices) -> "ColorEvent":
        vs = tuple(sorted(vertices))
        return cls(vs, lambda colors: all(colors), name=f"all_black{vs}")


@dataclass(frozen=True)
class DecompositionTerm:
    """One conditioning term: the minima vector of the support clusters,
    the bond-measure probability of seeing it (polynomial in p), and the
    color-measure term (polynomial in r)."""

    minima: tuple[int, ...]
    p_poly: BiPoly
    r_poly: BiPoly


def _event_decomposition(
    graph: MultiGraph, event: ColorEvent, caps: EnumerationCaps
) -> list[DecompositionTerm]:
    _check_edge_cap(graph, caps)
    n, m = graph.vertex_count, graph.edge_count
    for x in event.support:
        if not 0 <= x < n:
            raise ValueError(f"support vertex {x} out of range")
    groups: dict[tuple[int, ...], list[int]] = {}
    for mask in range(1 << m):
        labels = _min_labels(n, graph.edges, mask)
        mvec = tuple(labels[x] for x in event.support)
        hist = groups.get(mvec)
        if hist is None:
            hist = groups[mvec] = [0] * (m + 1)
        hist[mask.bit_count()] += 1
    terms = []
    for mvec in sorted(groups):
        distinct = sorted(set(mvec))
        if len(distinct) > caps.max_clusters:
            raise CapExceeded(
                f"{len(distinct)} support clusters exceeds the coloring cap"
            )
        didx = {v: i for i, v in enumerate(distinct)}
        counts = [0] * (len(distinct) + 1)
        for cmask in range(1 << len(distinct)):
            colors = tuple((cmask >> didx[v]) & 1 for v in mvec)
            if event.predicate(colors):
                counts[cmask.bit_count()] += 1
        terms.append(
            DecompositionTerm(
                mvec,
                _counts_to_poly(groups[mvec], m),
                _counts_to_rpoly(counts, len(distinct)),
            )
        )
    return terms


def event_prob_decomposition(
    graph: MultiGraph, event: ColorEvent, caps: EnumerationCaps = DEFAULT_CAPS
) -> tuple[DecompositionTerm, ...]:
    """The conditioning decomposition over support-cluster minima vectors.

    Summing p_poly * r_poly over the terms reproduces event_prob_poly
    exactly, term by term.
    """
    return tuple(_event_decomposition(graph, event, caps))


def event_prob_poly(
    graph: MultiGraph, event: ColorEvent, caps: EnumerationCaps = DEFAULT_CAPS
) -> BiPoly:
    """Exact probability of a finite-support color event, in (p, r)."""
    total = BiPoly()
    for term in _event_decomposition(graph, event, caps):
        total = total + term.p_poly * term.r_poly
    return total


def event_prob_direct(
    graph: MultiGraph, event: ColorEvent, caps: EnumerationCaps = DEFAULT_CAPS
) -> BiPoly:
    """Reference route: brute force over bond configurations and full
    cluster colorings.  Slower than event_prob_poly; kept as a cross-check.
    """
    _check_edge_cap(graph, caps)
    n, m = graph.vertex_count, graph.edge_count
    ppolys = _popcount_polys(m)
    total = BiPoly()
    for mask in range(1 << m):
        labels = _min_labels(n, graph.edges, mask)
        distinct = sorted(set(labels))
        if len(distinct) > caps.max_clusters:
            raise CapExceeded(
                f"{len(distinct)} clusters exceeds the coloring cap"
            )
        didx = {v: i for i, v in enumerate(distinct)}
        counts = [0] * (len(distinct) + 1)
        for cmask in range(1 << len(distinct)):
            colors = tuple((cmask >> didx[labels[x]]) & 1 for x in event.support)
            if event.predicate(colors):
                counts[cmask.bit_count()] += 1
        total = total + ppolys[mask.bit_count()] * _counts_to_rpoly(
            counts, len(distinct)
        )
    return total


# ---------------------------------------------------------------------------
# Exhaustive stochastic-domination check on tiny graphs


@dataclass(frozen=True)
class DominationReport:
    p: Fraction
    r: Fraction
    lower_param: Fraction
    upper_param: Fraction
    n_events: int
    ok: bool
    violation: dict | None = None


def site_distribution(
    graph: MultiGraph, p, r, caps: EnumerationCaps = DEFAULT_CAPS
) -> list[Fraction]:
    """Exact color-configuration distribution over the 2^n site states.

    State s encodes vertex v's color in bit v.
    """
    _check_edge_cap(graph, caps)
    p, r = Fraction(p), Fraction(r)
    n, m = graph.vertex_count, graph.edge_count
    mu = [Fraction(0)] * (1 << n)
    for mask in range(1 << m):
        s = mask.bit_count()
        pw = p**s * (1 - p) ** (m - s)
        if not pw:
            continue
        labels = _min_labels(n, graph.edges, mask)
        distinct = sorted(set(labels))
        didx = {v: i for i, v in enumerate(distinct)}
        for cmask in range(1 << len(distinct)):
            bl = cmask.bit_count()
            rw = r**bl * (1 - r) ** (len(distinct) - bl)
            if not rw:
                continue
            state = 0
            for v in range(n):
                if (cmask >> didx[labels[v]]) & 1:
                    state |= 1 << v
            mu[state] += pw * rw
    return mu


def _product_distribution(n: int, rho: Fraction) -> list[Fraction]:
    out = []
    for state in range(1 << n):
        k = state.bit_count()
        out.append(rho**k * (1 - rho) ** (n - k))
    return out


def increasing_events(n: int):
    """All increasing events over {0,1}^n, as bitmasks over the 2^n states.

    Feasible for n <= 4 (Dedekind numbers 3, 6, 20, 168).
    """
    if n > 4:
        raise CapExceeded("increasing-event enumeration is limited to 4 vertices")
    states = 1 << n
    zero_sel = []
    for v in range(n):
        sel = 0
        for s in range(states):
            if not (s >> v) & 1:
                sel |= 1 << s
        zero_sel.append(sel)
    out = []
    for emask in range(1 << states):
        up = True
        for v in range(n):
            stride = 1 << v
            if ((emask & zero_sel[v]) << stride) & ~emask:
                up = False
                break
        if up:
            out.append(emask)
    return out


def check_domination_exact(
    graph: MultiGraph, p, r, caps: EnumerationCaps = DEFAULT_CAPS
) -> DominationReport:
    """Verify, for every increasing event, that the color marginal sits
    between the product measures with parameters r(1-p)^D and
    1-(1-r)(1-p)^D, D the maximum degree.  Exact rational comparisons;
    limited to graphs with at most 4 vertices.
    """
    n = graph.vertex_count
    if n > 4:
        raise CapExceeded("domination check enumerates all increasing events; "
                          "limited to 4 vertices")
    p, r = Fraction(p), Fraction(r)
    delta = graph.max_degree()
    lo = r * (1 - p) ** delta
    hi = 1 - (1 - r) * (1 - p) ** delta
    mu = site_distribution(graph, p, r, caps)
    nu_lo = _product_distribution(n, lo)
    nu_hi = _product_distribution(n, hi)
    events = increasing_events(n)
    for emask in events:
        mu_e = lo_e = hi_e = Fraction(0)
        s = 0
        rest = emask
        while rest:
            low = rest & -rest
            rest ^= low
            s = low.bit_length() - 1
            mu_e += mu[s]
            lo_e += nu_lo[s]
            hi_e += nu_hi[s]
        if not (lo_e <= mu_e <= hi_e):
            return DominationReport(
                p, r, lo, hi, len(events), False,
                {"event_mask": emask, "mu": mu_e, "nu_lo": lo_e, "nu_hi": hi_e},
            )
    return DominationReport(p, r, lo, hi, len(events), True)


# ---------------------------------------------------------------------------
# The closed-off-terminals event on the complete bipartite gadget


def bk_probability(p, k: int) -> Fraction:
    """(1-p)^4 (1 - (1-p^2)^k): all four terminal edges closed and some
    middle vertex keeping the two hubs connected."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    return (1 - p) ** 4 * (1 - (1 - p * p) ** k)


def bk_enumeration(p, k: int, caps: EnumerationCaps = DEFAULT_CAPS) -> Fraction:
    """The same event probability by explicit enumeration over all bond
    configurations of the gadget (cross-check for the closed form)."""
    gadget = complete_bipartite_dk(k)
    m = gadget.graph.edge_count
    if m > caps.max_edges:
        raise CapExceeded(f"{m} edges exceeds the enumeration cap")
    p = Fraction(p)
    total = Fraction(0)
    for mask in range(1 << m):
        if mask & 0b1111:  # a terminal edge is open
            continue
        ok = False
        for i in range(k):
            pair = 0b11 << (4 + 2 * i)
            if mask & pair == pair:
                ok = True
                break
        if ok:
            s = mask.bit_count()
            total += p**s * (1 - p) ** (m - s)
    return total
