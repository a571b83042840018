"""Encoders mapping combinatorial problems onto weighted instances.

Covered: non-homogeneous 0-1 systems with a feasible witness (Hamming-
distance sums), perfect matchings of uniform hypergraphs (permanents as
the bipartite 2-uniform case), anchored graph homomorphism sums, and the
independence-polynomial specialization.  Each encoder comes with a brute-
force counterpart used by the test suites.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

from wcount.errors import InfeasibleWitnessError, ParseError, WcountError
from wcount.graphs import SimpleGraph
from wcount.instance import BETA, SparseMatrix, WeightedInstance
from wcount.interpolate import ApproxReport, approx_w
from wcount.oracle import enumerate_points


# ---------------------------------------------------------------------------
# affine systems and Hamming-distance sums


class AffineSystem:
    """Integer system A x = b over 0-1 vectors with an optional witness y."""

    __slots__ = ("A", "b", "y")

    def __init__(self, A: SparseMatrix, b, y=None):
        if len(b) != A.m:
            raise ParseError("right-hand side must have one entry per row")
        self.A = A
        self.b = tuple(int(v) for v in b)
        self.y = None
        if y is not None:
            y = tuple(int(v) for v in y)
            if len(y) != A.n:
                raise ParseError("witness must have one entry per column")
            if any(v not in (0, 1) for v in y):
                raise InfeasibleWitnessError("witness must be a 0-1 vector")
            for i in range(A.m):
                s = sum(A.entry(i, j) * y[j] for j in A.cols_of_row(i))
                if s != self.b[i]:
                    raise InfeasibleWitnessError(
                        f"A y = b fails at row {i + 1}: {s} != {self.b[i]}"
                    )
            self.y = y

    @property
    def n(self):
        return self.A.n

    @property
    def m(self):
        return self.A.m


def affine_shift(sys: AffineSystem, w) -> WeightedInstance:
    """Shift to the homogeneous system around the witness.

    Columns with y_j = 1 are negated; the weight of the shifted set Z
    equals the sum over x in X of the product of w_j over coordinates
    where x and y differ.
    """
    if sys.y is None:
        raise InfeasibleWitnessError("affine shift needs a feasible witness point")
    entries = {}
    for (i, j), a in sys.A.entries.items():
        entries[(i, j)] = -a if sys.y[j] else a
    A_hat = SparseMatrix(sys.A.m, sys.A.n, entries)
    return WeightedInstance(A_hat, list(w), [1] * sys.A.n)


def hamming_sum(sys: AffineSystem, omega: complex, epsilon: float, **kwargs) -> ApproxReport:
    """Approximate sum over solutions x of omega^dist(x, y)."""
    inst = affine_shift(sys, [omega] * sys.n)
    return approx_w(inst, epsilon, **kwargs)


def hamming_sum_bruteforce(sys: AffineSystem, omega: complex):
    inst = affine_shift(sys, [omega] * sys.n)
    total = 0j
    for point in enumerate_points(inst):
        total += omega ** sum(point)
    return total


def count_solutions(sys: AffineSystem, limit=None) -> int:
    """Number of 0-1 solutions of A x = b, via the shift bijection |X| = |Z|.

    The degree cap n sidesteps the full-box precheck; the row-closure
    pruning of the walk does the real work.
    """
    inst = affine_shift(sys, [1.0] * sys.n)
    kwargs = {"degree_cap": sys.n}
    if limit is not None:
        kwargs["limit"] = limit
    return sum(1 for _ in enumerate_points(inst, **kwargs))


def load_affine_system(text: str) -> AffineSystem:
    """AFFINE v1 file: header, dims, b line, y line, entries...end."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    it = iter(lines)

    def nxt(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    if nxt("header").split() != ["AFFINE", "v1"]:
        raise ParseError("expected 'AFFINE v1' header")
    dims = nxt("dims").split()
    if len(dims) != 3 or dims[0] != "dims":
        raise ParseError("expected 'dims m n'")
    m, n = int(dims[1]), int(dims[2])
    b_tok = nxt("b line").split()
    if b_tok[0] != "b" or len(b_tok) != m + 1:
        raise ParseError(f"b line must carry {m} values")
    b = [int(t) for t in b_tok[1:]]
    y_tok = nxt("y line").split()
    if y_tok[0] != "y" or len(y_tok) != n + 1:
        raise ParseError(f"y line must carry {n} values")
    y = [int(t) for t in y_tok[1:]]
    if nxt("'entries'") != "entries":
        raise ParseError("expected 'entries' section")
    triples = []
    while True:
        line = nxt("entry or 'end'")
        if line == "end":
            break
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"bad entry line {line!r}")
        triples.append((int(parts[0]) - 1, int(parts[1]) - 1, int(parts[2])))
    A = SparseMatrix.from_triples(m, n, triples)
    return AffineSystem(A, b, y)


# ---------------------------------------------------------------------------
# hypergraph perfect matchings


@dataclass(frozen=True)
class Hypergraph:
    """Vertices 0..n-1, edges as vertex subsets with complex weights, and an
    optional distinguished perfect matching given by edge indices."""

    n: int
    edges: tuple  # tuple of frozensets
    weights: tuple
    matching: tuple | None = None  # indices into edges

    def __post_init__(self):
        if len(self.weights) != len(self.edges):
            raise ParseError("one weight per edge required")
        for e in self.edges:
            if not e or any(not 0 <= v < self.n for v in e):
                raise ParseError(f"bad edge {sorted(e)}")
        if self.matching is not None:
            covered: set[int] = set()
            for idx in self.matching:
                if not 0 <= idx < len(self.edges):
                    raise ParseError(f"matching refers to missing edge {idx + 1}")
                e = self.edges[idx]
                if covered & e:
                    raise InfeasibleWitnessError("matching edges overlap")
                covered |= e
            if covered != set(range(self.n)):
                raise InfeasibleWitnessError("matching does not cover every vertex")

    def uniformity(self):
        sizes = {len(e) for e in self.edges}
        return sizes.pop() if len(sizes) == 1 else None

    def max_degree(self):
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return max(deg, default=0)


def matching_system(H: Hypergraph) -> AffineSystem:
    """One equation per vertex (its incident edge variables sum to one);
    the witness is the indicator of the distinguished matching."""
    if H.matching is None:
        raise InfeasibleWitnessError("a distinguished perfect matching is required")
    entries = {}
    for col, e in enumerate(H.edges):
        for v in e:
            entries[(v, col)] = 1
    A = SparseMatrix(H.n, len(H.edges), entries)
    y = [1 if idx in set(H.matching) else 0 for idx in range(len(H.edges))]
    return AffineSystem(A, [1] * H.n, y)


def rescale_edge_weights(H: Hypergraph) -> tuple[Hypergraph, complex]:
    """Make the matching edges unit weight: divide each edge weight by the
    product of the per-vertex k-th roots of its matching edge's weight.
    Returns the rescaled hypergraph and the scalar factor to multiply back.
    """
    k = H.uniformity()
    if k is None:
        raise ParseError("rescaling requires a k-uniform hypergraph")
    if H.matching is None:
        raise InfeasibleWitnessError("rescaling requires the distinguished matching")
    alpha = [None] * H.n
    for idx in H.matching:
        a = complex(H.weights[idx])
        if a == 0:
            raise WcountError("zero weight on a matching edge cannot be rescaled")
        root = cmath.exp(cmath.log(a) / k)  # principal k-th root
        for v in H.edges[idx]:
            alpha[v] = root
    factor = 1 + 0j
    for v in range(H.n):
        factor *= alpha[v]
    new_weights = []
    for e, a in zip(H.edges, H.weights):
        scale = 1 + 0j
        for v in e:
            scale *= alpha[v]
        new_weights.append(complex(a) / scale)
    return (
        Hypergraph(H.n, H.edges, tuple(new_weights), H.matching),
        factor,
    )


def matching_weight(
    H: Hypergraph,
    epsilon: float,
    omega: complex | None = None,
    **kwargs,
) -> ApproxReport:
    """Approximate the total weight of perfect matchings, sum over matchings
    of the product of edge weights.

    Rescales so the distinguished matching has unit weights, encodes the
    matching system, weights variables omega on the matching and
    a_e / omega off it, and runs the Hamming-style approximation; the
    rescale factor multiplies back into the reported value.
    """
    k = H.uniformity()
    if k is None:
        raise ParseError("matching weights require a k-uniform hypergraph")
    H1, factor = rescale_edge_weights(H)
    d = H1.max_degree()
    warnings = []
    limit = BETA * BETA / (d * d * k)
    matching_set = set(H1.matching)
    off_max = max(
        (abs(complex(a)) for idx, a in enumerate(H1.weights) if idx not in matching_set),
        default=0.0,
    )
    if omega is None:
        # the guarantee value; when the off-matching weights exceed the
        # guarantee bound, balance |omega| against max |a_e| / |omega|
        omega = max(BETA / (d * math.sqrt(k)), math.sqrt(off_max))
    if off_max > limit * (1 + 1e-12):
        warnings.append(
            f"off-matching weight {off_max:.3g} exceeds the guarantee bound {limit:.3g}"
        )
    sys = matching_system(H1)
    var_weights = [
        omega if idx in matching_set else complex(H1.weights[idx]) / omega
        for idx in range(len(H1.edges))
    ]
    inst = affine_shift(sys, var_weights)
    report = approx_w(inst, epsilon, **kwargs)
    return ApproxReport(
        value=report.value * factor,
        log_value=report.log_value,
        s=report.s,
        gamma=report.gamma,
        bound=report.bound,
        N=report.N,
        warnings=report.warnings + tuple(warnings),
    )


def matching_weight_bruteforce(H: Hypergraph):
    """Exhaustive total matching weight (DFS over the lowest uncovered
    vertex); fine up to a dozen edges."""
    edges = [frozenset(e) for e in H.edges]
    weights = [complex(a) for a in H.weights]
    n = H.n

    def rec(covered: frozenset):
        if len(covered) == n:
            return 1 + 0j
        v = min(set(range(n)) - covered)
        total = 0j
        for idx, e in enumerate(edges):
            if v in e and not (e & covered):
                total += weights[idx] * rec(covered | e)
        return total

    return rec(frozenset())


def load_hypergraph(text: str) -> Hypergraph:
    """HYPER v1 file: vertex count, edge vertex lists, matching indices,
    weights (uniform or list)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    it = iter(lines)

    def nxt(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    if nxt("header").split() != ["HYPER", "v1"]:
        raise ParseError("expected 'HYPER v1' header")
    vt = nxt("vertices").split()
    if vt[0] != "vertices" or len(vt) != 2:
        raise ParseError("expected 'vertices <n>'")
    n = int(vt[1])
    et = nxt("edges").split()
    if et[0] != "edges" or len(et) != 2:
        raise ParseError("expected 'edges <count>'")
    n_edges = int(et[1])
    edges = []
    for _ in range(n_edges):
        verts = [int(t) - 1 for t in nxt("edge line").split()]
        edges.append(frozenset(verts))
    mt = nxt("matching").split()
    if mt[0] != "matching":
        raise ParseError("expected 'matching <edge indices>'")
    matching = tuple(int(t) - 1 for t in mt[1:]) or None
    wt = nxt("weights").split()
    if wt[:2] == ["weights", "uniform"] and len(wt) == 4:
        weights = [complex(float(wt[2]), float(wt[3]))] * n_edges
    elif wt == ["weights", "list"]:
        weights = []
        for _ in range(n_edges):
            parts = nxt("weight entry").split()
            weights.append(complex(float(parts[0]), float(parts[1])))
    else:
        raise ParseError("expected weights section")
    return Hypergraph(n, tuple(edges), tuple(weights), matching)


# ---------------------------------------------------------------------------
# permanents (bipartite 2-uniform wrapper)


def permanent_hypergraph(matrix) -> Hypergraph:
    """Bipartite edge-weighted graph whose perfect matchings are the
    permanent's permutations; the diagonal is the distinguished matching."""
    n = len(matrix)
    edges = []
    weights = []
    matching = []
    for i in range(n):
        if len(matrix[i]) != n:
            raise ParseError("permanent needs a square matrix")
        if matrix[i][i] == 0:
            raise InfeasibleWitnessError("zero diagonal entry; no unit matching")
    for i in range(n):
        for j in range(n):
            a = complex(matrix[i][j])
            if a != 0:
                if i == j:
                    matching.append(len(edges))
                edges.append(frozenset((i, n + j)))
                weights.append(a)
    return Hypergraph(2 * n, tuple(edges), tuple(weights), tuple(matching))


def permanent_approx(matrix, epsilon: float, **kwargs) -> ApproxReport:
    """Approximate the permanent of a near-identity matrix.

    For n >= 4 the certified region beta^2/(d^2 k) is already smaller than
    any interesting off-diagonal magnitude, so this adapter defaults to
    force mode: the adaptive truncation runs and the report is flagged
    uncertified whenever the weights fall outside the theorem's region.
    """
    kwargs.setdefault("force", True)
    return matching_weight(permanent_hypergraph(matrix), epsilon, **kwargs)


def permanent_bruteforce(matrix):
    n = len(matrix)
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= complex(matrix[i][j])
        total += prod
    return total


# ---------------------------------------------------------------------------
# graph homomorphisms


@dataclass(frozen=True)
class HomInput:
    """Anchored homomorphism counting input.

    anchor_mode "value" pins psi(anchor) = target (the generic encoding);
    "exists" only normalizes the anchor's assignment sums to one, so the
    solutions range over all homomorphisms regardless of the anchor's
    image (used by the independence-polynomial reduction).
    """

    g1: SimpleGraph
    g2: SimpleGraph
    anchor: int
    target: int
    phi: tuple | None = None
    anchor_mode: str = "value"

    def __post_init__(self):
        if not self.g1.is_connected() or not self.g2.is_connected():
            raise ParseError("both graphs must be connected")
        if any(len(e) == 1 for e in self.g1.edges):
            raise ParseError("the source graph must be loopless")
        if not 0 <= self.anchor < self.g1.n:
            raise ParseError("anchor out of range")
        if not 0 <= self.target < self.g2.n:
            raise ParseError("target out of range")
        if self.anchor_mode not in ("value", "exists"):
            raise ParseError(f"unknown anchor mode {self.anchor_mode!r}")
        if self.phi is not None:
            if len(self.phi) != self.g1.n:
                raise ParseError("phi must assign every source vertex")
            if not is_homomorphism(self.g1, self.g2, self.phi):
                raise InfeasibleWitnessError("phi is not a graph homomorphism")
            if self.anchor_mode == "value" and self.phi[self.anchor] != self.target:
                raise InfeasibleWitnessError("phi violates the anchor condition")


def is_homomorphism(g1: SimpleGraph, g2: SimpleGraph, phi) -> bool:
    return all(
        g2.has_edge(phi[u], phi[v]) for u, v in g1.nonloop_edges()
    )


def hom_variables(inp: HomInput):
    """Variables x[(u,v,i,j)] for oriented edges u < v of G1 and ordered
    pairs (i, j) with {i, j} an edge of G2 (i = j on loops)."""
    pairs = []
    for i in range(inp.g2.n):
        for j in inp.g2.neighbors(i):
            pairs.append((i, j))
    variables = []
    for u, v in inp.g1.nonloop_edges():
        for i, j in pairs:
            variables.append((u, v, i, j))
    return variables


def _neighbor_order(inp: HomInput, u: int):
    """Ascending neighbors, with the anchor first when it is one of them."""
    nbrs = sorted(w for w in inp.g1.neighbors(u) if w != u)
    if inp.anchor in nbrs and u != inp.anchor:
        nbrs.remove(inp.anchor)
        nbrs.insert(0, inp.anchor)
    return nbrs


def hom_system(inp: HomInput) -> AffineSystem:
    """Encode anchored homomorphisms as 0-1 solutions of a sparse system.

    For each vertex u and image i, the assignment sums S^{u,v}_i agree
    along a chain over u's neighbors (at most 2 d_2 variables per
    equation); the anchor is pinned either by value equations or by a
    single sum-to-one normalization.  Solutions biject with the
    homomorphisms admitted by the anchor mode.
    """
    variables = hom_variables(inp)
    if not variables:
        raise ParseError("the source graph needs at least one edge")
    var_id = {key: idx for idx, key in enumerate(variables)}

    def s_terms(u: int, v: int, i: int):
        """Variable ids in the sum S^{u,v}_i."""
        out = []
        for j in inp.g2.neighbors(i):
            if u < v:
                out.append(var_id[(u, v, i, j)])
            else:
                out.append(var_id[(v, u, j, i)])
        return out

    rows = []  # (coeff dict, rhs)
    for u in range(inp.g1.n):
        if inp.anchor_mode == "value" and u == inp.anchor:
            continue
        order = _neighbor_order(inp, u)
        for a, b in zip(order, order[1:]):
            for i in range(inp.g2.n):
                coeffs: dict[int, int] = {}
                for t in s_terms(u, a, i):
                    coeffs[t] = coeffs.get(t, 0) + 1
                for t in s_terms(u, b, i):
                    coeffs[t] = coeffs.get(t, 0) - 1
                coeffs = {t: c for t, c in coeffs.items() if c}
                if coeffs:
                    rows.append((coeffs, 0))

    if inp.anchor_mode == "value":
        for v in _neighbor_order(inp, inp.anchor):
            for i in range(inp.g2.n):
                terms = s_terms(inp.anchor, v, i)
                rhs = 1 if i == inp.target else 0
                if not terms:
                    if rhs:
                        raise ParseError("target vertex is isolated in G2")
                    continue
                rows.append(({t: 1 for t in terms}, rhs))
    else:
        first = _neighbor_order(inp, inp.anchor)[0]
        coeffs = {}
        for i in range(inp.g2.n):
            for t in s_terms(inp.anchor, first, i):
                coeffs[t] = coeffs.get(t, 0) + 1
        rows.append((coeffs, 1))

    entries = {}
    b = []
    for r, (coeffs, rhs) in enumerate(rows):
        for t, c in coeffs.items():
            entries[(r, t)] = c
        b.append(rhs)
    A = SparseMatrix(len(rows), len(variables), entries)

    y = None
    if inp.phi is not None:
        y = [0] * len(variables)
        for u, v in inp.g1.nonloop_edges():
            y[var_id[(u, v, inp.phi[u], inp.phi[v])]] = 1
    return AffineSystem(A, b, y)


def hom_count_bruteforce(inp: HomInput) -> int:
    count = 0
    for phi in itertools.product(range(inp.g2.n), repeat=inp.g1.n):
        if inp.anchor_mode == "value" and phi[inp.anchor] != inp.target:
            continue
        if is_homomorphism(inp.g1, inp.g2, phi):
            count += 1
    return count


def hom_distance(g1: SimpleGraph, phi, psi) -> int:
    """Number of edges on which two maps disagree."""
    return sum(
        1
        for u, v in g1.nonloop_edges()
        if (phi[u], phi[v]) != (psi[u], psi[v])
    )


def hom_sum_bruteforce(inp: HomInput, omega: complex):
    if inp.phi is None:
        raise InfeasibleWitnessError("the brute-force sum needs phi")
    total = 0j
    for psi in itertools.product(range(inp.g2.n), repeat=inp.g1.n):
        if inp.anchor_mode == "value" and psi[inp.anchor] != inp.target:
            continue
        if is_homomorphism(inp.g1, inp.g2, psi):
            total += omega ** (2 * hom_distance(inp.g1, inp.phi, psi))
    return total


def hom_sum(inp: HomInput, omega: complex, epsilon: float, **kwargs) -> ApproxReport:
    """Approximate the sum over homomorphisms of omega^{2 dist(phi, psi)}.

    Each disagreeing edge flips two encoding variables, so the uniform
    Hamming weighting realizes the exponent 2 dist.
    """
    if inp.phi is None:
        raise InfeasibleWitnessError("a witness homomorphism phi is required")
    sys = hom_system(inp)
    d2 = inp.g2.max_degree()
    report = hamming_sum(sys, omega, epsilon, **kwargs)
    if abs(omega) > 0.1 / d2 + 1e-12:
        report = ApproxReport(
            value=report.value,
            log_value=report.log_value,
            s=report.s,
            gamma=report.gamma,
            bound=report.bound,
            N=report.N,
            warnings=report.warnings
            + (f"|omega| exceeds the guarantee bound 0.1/d2 = {0.1 / d2:.3g}",),
        )
    return report


# ---------------------------------------------------------------------------
# independence polynomial specialization


def independence_instance(G: SimpleGraph, omega: complex) -> HomInput:
    """Two-image encoding whose homomorphism sum is the independence
    polynomial of a d-regular graph at omega^{2d}.

    The target graph has an image 0 (independent-set membership, loopless)
    and an image 1 (non-membership, looped), joined by an edge.  The
    anchor is existence-normalized so that the sum ranges over all
    homomorphisms, i.e. over all independent sets.
    """
    if not G.is_regular():
        raise ParseError("the independence reduction needs a regular graph")
    if any(len(e) == 1 for e in G.edges):
        raise ParseError("the graph must be loopless")
    g2 = SimpleGraph.from_pairs(2, [(0, 1), (1, 1)])
    phi = tuple([1] * G.n)
    return HomInput(g1=G, g2=g2, anchor=0, target=1, phi=phi, anchor_mode="exists")


def independence_polynomial_bruteforce(G: SimpleGraph, lam: complex):
    total = 0j
    verts = range(G.n)
    for r in range(G.n + 1):
        for subset in itertools.combinations(verts, r):
            ss = set(subset)
            if all(not G.has_edge(u, v) for u, v in itertools.combinations(subset, 2)):
                total += lam**r
    return total


def independence_sum(G: SimpleGraph, omega: complex, epsilon: float, **kwargs) -> ApproxReport:
    inp = independence_instance(G, omega)
    return hom_sum(inp, omega, epsilon, **kwargs)
