"""Power sums of inverse roots via connected column submatrices.

The pipeline: enumerate connected column subsets of size at most k (each
exactly once, by anchored growth with a forbidden set); compute per-subset
local sums lambda_j over full-support solutions; run the mu recursion over
ordered compatible pairs whose connected sum reassembles the subset; sum
mu_k over connected subsets to obtain sigma_k.

Two exact-zero facts keep the computation output-sensitive: mu vanishes on
disconnected submatrices, and both lambda and mu vanish on any subset that
is not a union of subsets carrying full-support solutions.  The scan
therefore only retains "active" subsets; everything else contributes
nothing.  A debug mode disables the shortcuts and computes mu for
disconnected submatrices too, so their vanishing can be observed rather
than assumed.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

from wcount.errors import IncompatibleInputsError
from wcount.gaussian import GaussianRational
from wcount.instance import ColumnGraph, SparseMatrix, column_graph, sparsity
from wcount.oracle import PowerSumTable


# ---------------------------------------------------------------------------
# submatrices


class SubMatrix:
    """A rows x cols integer matrix with no zero rows or columns.

    Row and column ids refer to the parent matrix, so submatrices of the
    same parent can be glued.  Instances are immutable.
    """

    __slots__ = ("rows", "cols", "entries", "_col_rows")

    def __init__(self, rows, cols, entries):
        rows = tuple(sorted(rows))
        cols = tuple(sorted(cols))
        row_seen = {i: False for i in rows}
        col_seen = {j: False for j in cols}
        for (i, j), a in entries.items():
            if a == 0:
                raise ValueError("zero entry stored in SubMatrix")
            if i not in row_seen or j not in col_seen:
                raise ValueError("entry outside the row/column sets")
            row_seen[i] = True
            col_seen[j] = True
        if not all(row_seen.values()) or not all(col_seen.values()):
            raise ValueError("SubMatrix must have no zero rows or columns")
        self.rows = rows
        self.cols = cols
        self.entries = dict(entries)
        col_rows: dict[int, list[int]] = {j: [] for j in cols}
        for (i, j) in entries:
            col_rows[j].append(i)
        self._col_rows = {j: tuple(sorted(v)) for j, v in col_rows.items()}

    def entry(self, i, j) -> int:
        return self.entries.get((i, j), 0)

    def rows_of_col(self, j):
        return self._col_rows[j]

    def is_connected(self) -> bool:
        """Connectivity of the column set under the shared-row relation."""
        if not self.cols:
            return False
        adj: dict[int, set[int]] = {j: set() for j in self.cols}
        by_row: dict[int, list[int]] = {}
        for (i, j) in self.entries:
            by_row.setdefault(i, []).append(j)
        for cols in by_row.values():
            for a in cols:
                for b in cols:
                    if a != b:
                        adj[a].add(b)
        seen = {self.cols[0]}
        frontier = [self.cols[0]]
        while frontier:
            u = frontier.pop()
            for vtx in adj[u]:
                if vtx not in seen:
                    seen.add(vtx)
                    frontier.append(vtx)
        return len(seen) == len(self.cols)

    def __eq__(self, other):
        return (
            isinstance(other, SubMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols))

    def __repr__(self):
        return f"SubMatrix(rows={self.rows}, cols={self.cols})"


def induced_submatrix(A: SparseMatrix, cols) -> SubMatrix:
    """Restriction of A to `cols` and every row of A nonzero on `cols`.

    By construction ind(B, A) = 1: rows outside the row set vanish on the
    column set.
    """
    cols = tuple(sorted(set(cols)))
    if not cols:
        raise ValueError("column set must be nonempty")
    rows = sorted({i for j in cols for i in A.rows_of_col(j)})
    entries = {}
    for j in cols:
        for i in A.rows_of_col(j):
            entries[(i, j)] = A.entry(i, j)
    return SubMatrix(rows, cols, entries)


def _restrict(B: SubMatrix, cols) -> SubMatrix:
    """Induced restriction of a submatrix to a subset of its columns."""
    cols = tuple(sorted(cols))
    rows = sorted({i for j in cols for i in B.rows_of_col(j)})
    entries = {}
    for j in cols:
        for i in B.rows_of_col(j):
            entries[(i, j)] = B.entry(i, j)
    return SubMatrix(rows, cols, entries)


def compatible(B1: SubMatrix, B2: SubMatrix) -> bool:
    """Gluing conditions: entries agree on the shared block and each matrix
    vanishes on its private rows against the shared columns."""
    shared_cols = set(B1.cols) & set(B2.cols)
    if not shared_cols:
        return True
    r1, r2 = set(B1.rows), set(B2.rows)
    for j in shared_cols:
        for i in r1 & r2:
            if B1.entry(i, j) != B2.entry(i, j):
                return False
        for i in r1 - r2:
            if B1.entry(i, j) != 0:
                return False
        for i in r2 - r1:
            if B2.entry(i, j) != 0:
                return False
    return True


def connected_sum(B1: SubMatrix, B2: SubMatrix) -> SubMatrix:
    """Glue two compatible submatrices; on disjoint supports this is the
    direct sum."""
    if not compatible(B1, B2):
        raise IncompatibleInputsError("submatrices are not compatible")
    rows = set(B1.rows) | set(B2.rows)
    cols = set(B1.cols) | set(B2.cols)
    entries = dict(B1.entries)
    entries.update(B2.entries)
    return SubMatrix(rows, cols, entries)


# ---------------------------------------------------------------------------
# connected subset enumeration


def _anchored_subsets(adj, kmax: int, v: int):
    """All connected subsets containing v, avoiding vertices < v, size <= kmax.

    Anchored growth: each frame owns an extension list; once a branch for an
    extension vertex is exhausted the vertex is forbidden for the rest of
    the frame's subtree, so every subset is produced exactly once.
    Yields tuples in insertion order (first element is the anchor v).
    """
    yield (v,)
    if kmax == 1:
        return

    def rec(S: tuple, ext: tuple, banned: frozenset):
        for i, u in enumerate(ext):
            child = S + (u,)
            yield child
            if len(child) < kmax:
                new_banned = banned.union(ext[:i])
                child_set = set(child)
                tail = ext[i + 1 :]
                new_ext = tail + tuple(
                    w
                    for w in adj[u]
                    if w > v
                    and w not in new_banned
                    and w not in child_set
                    and w not in tail
                )
                yield from rec(child, new_ext, new_banned)

    yield from rec((v,), tuple(u for u in adj[v] if u > v), frozenset())


def connected_column_subsets(G: ColumnGraph, k: int):
    """Every column set of size <= k inducing a connected subgraph, once each.

    Yielded as sorted tuples, grouped by anchor (the minimum vertex).
    """
    if k < 1:
        raise ValueError("subset size bound must be >= 1")
    for v in range(G.n):
        for S in _anchored_subsets(G.adj, k, v):
            yield tuple(sorted(S))


# ---------------------------------------------------------------------------
# local sums


def _scalar_zero_for(w):
    exact = any(isinstance(x, (GaussianRational, Fraction)) or type(x) is int for x in w)
    return GaussianRational(0) if exact else 0j


def _full_support_solutions(B: SubMatrix, nu, kmax: int):
    """Vectors xi with support exactly cols(B), 1 <= xi_j <= nu_j,
    sum xi <= kmax and B xi = 0; returned as tuples aligned with
    sorted(cols)."""
    cols = B.cols
    q = len(cols)
    if q > kmax:
        return []
    rows = {}
    for (i, j), a in B.entries.items():
        rows.setdefault(i, {})[j] = a
    if any(len(support) == 1 for support in rows.values()):
        return []
    sols = []
    xi = [0] * q

    def rec(p: int, used: int, sums: dict):
        if p == q:
            if all(s == 0 for s in sums.values()):
                sols.append(tuple(xi))
            return
        j = cols[p]
        top = min(nu[j], kmax - used - (q - 1 - p))
        for val in range(1, top + 1):
            xi[p] = val
            new_sums = dict(sums)
            for i in B.rows_of_col(j):
                new_sums[i] = new_sums.get(i, 0) + B.entry(i, j) * val
            rec(p + 1, used + val, new_sums)
        xi[p] = 0

    rec(0, 0, {})
    return sols


def lambda_k(B: SubMatrix, w, nu, k: int):
    """Sum over full-support solutions of B with degree exactly k of the
    monomial weight.  Zero whenever |cols(B)| > k."""
    zero = _scalar_zero_for(w)
    one = GaussianRational(1) if isinstance(zero, GaussianRational) else 1 + 0j
    total = zero
    for xi in _full_support_solutions(B, nu, k):
        if sum(xi) != k:
            continue
        prod = one
        for j, e in zip(B.cols, xi):
            prod = prod * w[j] ** e
        total = total + prod
    return total


def _lambda_series(B: SubMatrix, w, nu, kmax: int, zero):
    """Dict degree -> lambda_degree(B) for all degrees <= kmax at once."""
    series: dict = {}
    one = GaussianRational(1) if isinstance(zero, GaussianRational) else 1 + 0j
    for xi in _full_support_solutions(B, nu, kmax):
        deg = sum(xi)
        prod = one
        for j, e in zip(B.cols, xi):
            prod = prod * w[j] ** e
        series[deg] = series.get(deg, zero) + prod
    return series


# ---------------------------------------------------------------------------
# the literal mu recursion (desk scale; debug mode includes disconnected B)


@dataclass(frozen=True)
class MuTable:
    """mu_i values keyed by column set, for i = 1..k_max; companion lambda
    series per set.  mu[C][i] is stored for every i, with entries below
    |C| unused by the recursion."""

    k_max: int
    mu: dict
    lam: dict
    connected: dict


def mu_table(A: SparseMatrix, w, nu, k_max: int, include_disconnected: bool = False) -> MuTable:
    """Compute mu over every induced submatrix with <= k_max columns.

    Normal mode covers connected column sets (the only ones with nonzero
    mu); debug mode additionally computes mu over disconnected sets so the
    vanishing can be verified.  Pair enumeration follows the ordered-cover
    scheme: both candidate halves are induced restrictions, checked for
    compatibility and for exact reassembly before use.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    graph = column_graph(A)
    zero = _scalar_zero_for(w)

    if include_disconnected:
        col_sets = [
            tuple(c)
            for q in range(1, min(k_max, A.n) + 1)
            for c in itertools.combinations(range(A.n), q)
        ]
    else:
        col_sets = sorted(set(connected_column_subsets(graph, k_max)), key=lambda c: (len(c), c))

    sub = {c: induced_submatrix(A, c) for c in col_sets}
    connected = {c: sub[c].is_connected() for c in col_sets}
    lam_cache: dict = {}

    def lam(cols: tuple, B: SubMatrix) -> dict:
        if cols not in lam_cache:
            lam_cache[cols] = _lambda_series(B, w, nu, k_max, zero)
        return lam_cache[cols]

    mu: dict = {c: [zero] * (k_max + 1) for c in col_sets}
    known = set(col_sets)

    for i in range(1, k_max + 1):
        for cols in col_sets:
            q = len(cols)
            if q > i:
                continue
            B = sub[cols]
            val = -i * lam(cols, B).get(i, zero)
            if i >= 2:
                for assignment in itertools.product((1, 2, 3), repeat=q):
                    c1 = tuple(c for c, a in zip(cols, assignment) if a != 2)
                    c2 = tuple(c for c, a in zip(cols, assignment) if a != 1)
                    if not c1 or not c2:
                        continue
                    if not include_disconnected and c2 not in known:
                        continue  # disconnected half: mu vanishes
                    B1 = _restrict(B, c1)
                    B2 = _restrict(B, c2)
                    if not compatible(B1, B2):
                        continue
                    if connected_sum(B1, B2) != B:
                        continue
                    lam1 = lam(c1, B1)
                    mu2 = mu[c2]
                    t_lo = max(1, len(c2))
                    t_hi = min(i - 1, i - len(c1))
                    for t in range(t_lo, t_hi + 1):
                        term = lam1.get(i - t, zero) * mu2[t]
                        val = val - term
            mu[cols][i] = val

    return MuTable(k_max=k_max, mu=mu, lam=dict(lam_cache), connected=connected)


# ---------------------------------------------------------------------------
# the fast sigma driver


@dataclass
class SigmaDiagnostics:
    engine: str
    subset_counts: tuple  # count of enumerated subsets by size (index = size)
    max_membership: tuple  # per size, max over columns of containing-subset count
    active_sets: int
    closure_sets: int
    elapsed: float

    def membership_bound_ok(self, d: int) -> bool:
        """Check count(size k sets containing a column) <= (e*d)^{k-1}/2, k >= 2."""
        for k in range(2, len(self.max_membership)):
            if self.max_membership[k] > (math.e * d) ** (k - 1) / 2:
                return False
        return True


def _scan_chunk_python(A, adj, nu, kmax, lo, hi, kappa=None):
    """Enumerate anchored subsets and keep full-support-solvable ones.

    Returns (actives, member_counts, total_counts) where actives maps each
    sorted column tuple to its solution list.
    """
    n = A.n
    member = [[0] * (kmax + 1) for _ in range(n)]
    totals = [0] * (kmax + 1)
    actives = {}
    for v in range(lo, hi):
        for S in _anchored_subsets(adj, kmax, v):
            q = len(S)
            totals[q] += 1
            for j in S:
                member[j][q] += 1
            if q == 1 and kappa is None:
                continue  # integer mode: a single column has no solutions
            cols = tuple(sorted(S))
            if kappa is None:
                sols = _full_support_solutions(induced_submatrix(A, cols), nu, kmax)
            else:
                sols = _modular_full_support_solutions(A, cols, kappa)
            if sols:
                actives[cols] = sols
    return actives, member, totals


def _modular_full_support_solutions(A: SparseMatrix, cols, kappa: int):
    """Vectors over 1..kappa-1 with support exactly `cols` and A x = 0 mod
    kappa on the induced rows."""
    q = len(cols)
    rows = sorted({i for j in cols for i in A.rows_of_col(j)})
    row_maps = []
    for i in rows:
        support = [(p, A.entry(i, j)) for p, j in enumerate(cols) if A.entry(i, j)]
        if len(support) == 1 and math.gcd(support[0][1], kappa) == 1:
            return []
        row_maps.append(support)
    sols = []
    for xi in itertools.product(range(1, kappa), repeat=q):
        ok = True
        for support in row_maps:
            if sum(a * xi[p] for p, a in support) % kappa != 0:
                ok = False
                break
        if ok:
            sols.append(xi)
    return sols


def _scan_active(A, graph, nu, kmax, threads=1, engine="auto", kappa=None):
    """Dispatch the subset scan; merge per-chunk results deterministically."""
    n = A.n
    engine_used = engine
    if engine == "auto":
        # the JIT kernel costs ~a second to load; worth it beyond ~10^5 subsets
        est = n * max(1, graph.max_degree()) ** max(0, kmax - 1)
        use_kernel = kappa is None and (n >= 256 or est >= 200_000)
        if use_kernel:
            try:
                from wcount import _scan_kernel

                use_kernel = _scan_kernel.HAVE_NUMBA
            except ImportError:
                use_kernel = False
        engine_used = "kernel" if use_kernel else "python"
    if engine_used == "kernel" and kappa is not None:
        raise ValueError("the kernel scan only supports integer mode")

    threads = max(1, int(threads))
    bounds = [(n * t) // threads for t in range(threads + 1)]
    chunks = [(bounds[t], bounds[t + 1]) for t in range(threads) if bounds[t] < bounds[t + 1]]
    if not chunks:
        chunks = [(0, n)]

    if engine_used == "kernel":
        from wcount import _scan_kernel

        def run(lo, hi):
            sets, member, totals = _scan_kernel.scan_integer(A, graph, nu, kmax, lo, hi)
            actives = {}
            for cols in sets:
                actives[cols] = _full_support_solutions(induced_submatrix(A, cols), nu, kmax)
            return actives, member, totals

    else:

        def run(lo, hi):
            return _scan_chunk_python(A, graph.adj, nu, kmax, lo, hi, kappa)

    if len(chunks) == 1:
        results = [run(*chunks[0])]
    else:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(len(chunks)) as pool:
            results = pool.starmap(
                _scan_worker,
                [(A, graph, nu, kmax, lo, hi, kappa, engine_used) for lo, hi in chunks],
            )

    actives: dict = {}
    member = [[0] * (kmax + 1) for _ in range(n)]
    totals = [0] * (kmax + 1)
    for act, mem, tot in results:
        actives.update(act)
        for j in range(n):
            for q in range(kmax + 1):
                member[j][q] += int(mem[j][q])
        for q in range(kmax + 1):
            totals[q] += int(tot[q])
    return actives, member, totals, engine_used


def _scan_worker(A, graph, nu, kmax, lo, hi, kappa, engine_used):
    if engine_used == "kernel":
        from wcount import _scan_kernel

        sets, member, totals = _scan_kernel.scan_integer(A, graph, nu, kmax, lo, hi)
        actives = {
            cols: _full_support_solutions(induced_submatrix(A, cols), nu, kmax)
            for cols in sets
        }
        return actives, member, totals
    return _scan_chunk_python(A, graph.adj, nu, kmax, lo, hi, kappa)


def _graph_components(graph: ColumnGraph, cols: frozenset):
    """Connected components of the induced subgraph on `cols`."""
    remaining = set(cols)
    comps = []
    while remaining:
        start = min(remaining)
        seen = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for vtx in graph.adj[u]:
                if vtx in remaining and vtx not in seen:
                    seen.add(vtx)
                    frontier.append(vtx)
        comps.append(frozenset(seen))
        remaining -= seen
    return comps


def _sigma_from_active(lam_by_set, graph, k_max, zero):
    """Run the mu recursion over the union-closure of the active sets.

    `lam_by_set` maps frozenset column sets (connected, active) to their
    lambda series {degree: value}.  Everything outside the closure has
    mu = 0 exactly, so sigma is a sum over closure members only.
    """
    # Connected unions of active sets: the only candidates with mu != 0.
    # Any connected union is reachable through connected intermediate unions
    # (order the constituents along a spanning tree of the cluster graph),
    # so the search never needs disconnected unions.
    active_list = sorted(lam_by_set, key=lambda c: (len(c), tuple(sorted(c))))
    closure = set(active_list)
    queue = list(active_list)
    while queue:
        base = queue.pop()
        for a in active_list:
            union = base | a
            if (
                len(union) <= k_max
                and union not in closure
                and graph.is_connected_subset(union)
            ):
                closure.add(union)
                queue.append(union)

    connected_members = sorted(closure, key=lambda c: (len(c), tuple(sorted(c))))

    lam_cache: dict = {}

    def lam_series(cols: frozenset):
        """Lambda series of an arbitrary column set via its components."""
        if cols in lam_cache:
            return lam_cache[cols]
        comps = _graph_components(graph, cols)
        series = None
        for comp in comps:
            comp_series = lam_by_set.get(comp)
            if not comp_series:
                series = {}
                break
            if series is None:
                series = dict(comp_series)
            else:
                merged: dict = {}
                for d1, v1 in series.items():
                    for d2, v2 in comp_series.items():
                        if d1 + d2 <= k_max:
                            merged[d1 + d2] = merged.get(d1 + d2, zero) + v1 * v2
                series = merged
        if series is None:
            series = {}
        lam_cache[cols] = series
        return series

    mu = {c: [zero] * (k_max + 1) for c in connected_members}
    subsets_of = {
        c: [c2 for c2 in connected_members if c2 <= c] for c in connected_members
    }

    for i in range(1, k_max + 1):
        for c in connected_members:
            q = len(c)
            if q > i:
                continue
            val = -i * lam_series(c).get(i, zero)
            if i >= 2:
                for c2 in subsets_of[c]:
                    mu2 = mu[c2]
                    rest = c - c2
                    c2_sorted = tuple(sorted(c2))
                    for r in range(len(c2_sorted) + 1):
                        for extra in itertools.combinations(c2_sorted, r):
                            c1 = rest | frozenset(extra)
                            if not c1:
                                continue
                            lam1 = lam_series(c1)
                            if not lam1:
                                continue
                            t_lo = max(1, len(c2))
                            t_hi = min(i - 1, i - len(c1))
                            for t in range(t_lo, t_hi + 1):
                                m2 = mu2[t]
                                if m2 == zero:
                                    continue
                                l1 = lam1.get(i - t)
                                if l1 is None:
                                    continue
                                val = val - l1 * m2
            mu[c][i] = val

    sigma = []
    for k in range(1, k_max + 1):
        acc = zero
        for c in connected_members:
            if len(c) <= k:
                acc = acc + mu[c][k]
        sigma.append(acc)
    return sigma, len(closure)


def sigma_fast_with_diagnostics(
    A: SparseMatrix,
    w,
    nu,
    k_max: int,
    threads: int = 1,
    engine: str = "auto",
    kappa: int | None = None,
):
    """sigma_1..sigma_{k_max} plus scan diagnostics (counts, timings)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    t0 = time.perf_counter()
    zero = _scalar_zero_for(w)
    if A.n == 0:
        diag = SigmaDiagnostics("empty", (0,) * (k_max + 1), (0,) * (k_max + 1), 0, 0, 0.0)
        return PowerSumTable(k_max, tuple([zero] * k_max)), diag

    graph = column_graph(A)
    actives_raw, member, totals, engine_used = _scan_active(
        A, graph, nu, k_max, threads=threads, engine=engine, kappa=kappa
    )

    lam_by_set = {}
    one = GaussianRational(1) if isinstance(zero, GaussianRational) else 1 + 0j
    for cols, sols in sorted(actives_raw.items()):
        series: dict = {}
        for xi in sols:
            if kappa is None:
                deg = sum(xi)
                prod = one
                for j, e in zip(cols, xi):
                    prod = prod * w[j] ** e
            else:
                deg = len(cols)
                prod = one
                for j in cols:
                    prod = prod * w[j]
            series[deg] = series.get(deg, zero) + prod
        if series:
            lam_by_set[frozenset(cols)] = series

    sigma, closure_size = _sigma_from_active(lam_by_set, graph, k_max, zero)

    max_membership = tuple(
        max((member[j][q] for j in range(A.n)), default=0) for q in range(k_max + 1)
    )
    diag = SigmaDiagnostics(
        engine=engine_used,
        subset_counts=tuple(totals),
        max_membership=max_membership,
        active_sets=len(lam_by_set),
        closure_sets=closure_size,
        elapsed=time.perf_counter() - t0,
    )
    return PowerSumTable(k_max=k_max, sigma=tuple(sigma)), diag


def sigma_fast(
    A: SparseMatrix,
    w,
    nu,
    k_max: int,
    threads: int = 1,
    engine: str = "auto",
) -> PowerSumTable:
    """Power sums sigma_k(A, w, nu) for k = 1..k_max, by the submatrix
    decomposition; agrees with the Newton-identity oracle wherever the
    oracle is feasible."""
    table, _ = sigma_fast_with_diagnostics(A, w, nu, k_max, threads=threads, engine=engine)
    return table
