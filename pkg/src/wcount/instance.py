"""Data model for weighted sparse integer systems.

A `WeightedInstance` is a sparse integer matrix A together with per-column
complex weights w_j and integer caps nu_j.  The object of interest is the
weight

    w(X) = sum over x in X of  w_1^{x_1} * ... * w_n^{x_n},
    X = { x integer, 0 <= x_j <= nu_j, A x = 0 }.

Indices are 1-based in the WCOUNT file format and 0-based everywhere in
memory; the conversion happens solely in the parser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from wcount.errors import ParseError

# Zero-freeness constants: |w_j| <= ALPHA/(r sqrt(c)) certifies w(X) != 0;
# approximation guarantees are claimed under the slightly stronger BETA bound.
ALPHA = 0.46
BETA = 0.45


class SparseMatrix:
    """Immutable sparse integer matrix with row and column indexes.

    Both directions are indexed: `cols_of_row(i)` and `rows_of_col(j)` are
    O(nonzeros of that line).  All entries are nonzero; at most one entry
    per position.
    """

    __slots__ = ("m", "n", "entries", "_row_cols", "_col_rows")

    def __init__(self, m: int, n: int, entries: dict[tuple[int, int], int]):
        if m < 0 or n < 0:
            raise ParseError("negative dimensions")
        row_cols: list[list[int]] = [[] for _ in range(m)]
        col_rows: list[list[int]] = [[] for _ in range(n)]
        for (i, j), a in entries.items():
            if not (0 <= i < m and 0 <= j < n):
                raise ParseError(f"entry ({i + 1}, {j + 1}) out of range")
            if a == 0:
                raise ParseError(f"zero coefficient at ({i + 1}, {j + 1})")
            row_cols[i].append(j)
            col_rows[j].append(i)
        self.m = m
        self.n = n
        self.entries = dict(entries)
        self._row_cols = tuple(tuple(sorted(c)) for c in row_cols)
        self._col_rows = tuple(tuple(sorted(r)) for r in col_rows)

    @classmethod
    def from_triples(cls, m: int, n: int, triples) -> "SparseMatrix":
        entries: dict[tuple[int, int], int] = {}
        for i, j, a in triples:
            if (i, j) in entries:
                raise ParseError(f"duplicate entry at ({i + 1}, {j + 1})")
            entries[(i, j)] = int(a)
        return cls(m, n, entries)

    def entry(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def cols_of_row(self, i: int) -> tuple[int, ...]:
        return self._row_cols[i]

    def rows_of_col(self, j: int) -> tuple[int, ...]:
        return self._col_rows[j]

    def row_support_sizes(self):
        return [len(c) for c in self._row_cols]

    def col_support_sizes(self):
        return [len(r) for r in self._col_rows]

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.n for _ in range(self.m)]
        for (i, j), a in self.entries.items():
            dense[i][j] = a
        return dense

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.m == other.m
            and self.n == other.n
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"SparseMatrix(m={self.m}, n={self.n}, nnz={len(self.entries)})"


@dataclass(frozen=True)
class SparsityStats:
    r: int  # max nonzeros per row
    c: int  # max nonzeros per column
    d: int  # column-graph degree bound, r*c


@dataclass(frozen=True)
class ZeroColumnFactor:
    """Multiplicative scalar factors split off by normalization.

    Each removed column j contributes the univariate polynomial
    1 + w_j z + ... + (w_j z)^{nu_j} (a free column) or the constant 1
    (a column forced to zero by a singleton row).  The weight of the
    original instance is the product of these factors times the weight of
    the reduced instance.
    """

    removed_columns: tuple = ()  # (original_j, w_j, nu_j, forced)

    def factor_polys(self):
        polys = []
        for _, w, nu, forced in self.removed_columns:
            if forced:
                polys.append([1.0 + 0j])
            else:
                polys.append([w**i for i in range(nu + 1)])
        return polys

    def evaluate(self, zeta: complex = 1.0) -> complex:
        total = 1.0 + 0j
        for poly in self.factor_polys():
            total *= sum(c * zeta**i for i, c in enumerate(poly))
        return total

    def __bool__(self):
        return bool(self.removed_columns)


class WeightedInstance:
    """A sparse system with per-column weights and caps; immutable."""

    __slots__ = ("A", "w", "nu")

    def __init__(self, A: SparseMatrix, w, nu):
        if len(w) != A.n or len(nu) != A.n:
            raise ParseError("weight/cap vectors must have one entry per column")
        for v in nu:
            if int(v) != v or v < 1:
                raise ParseError(f"cap nu={v} must be a positive integer")
        self.A = A
        self.w = tuple(w)
        self.nu = tuple(int(v) for v in nu)

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def m(self) -> int:
        return self.A.m

    @property
    def N(self) -> int:
        """Total degree bound of w(X; zeta): sum of the caps."""
        return sum(self.nu)

    def max_weight_magnitude(self) -> float:
        return max((abs(complex(x)) for x in self.w), default=0.0)

    def __repr__(self):
        return f"WeightedInstance(m={self.m}, n={self.n}, N={self.N})"


def load_instance(text: str) -> WeightedInstance:
    """Parse a WCOUNT v1 integer-mode instance file.

    Raises ParseError on malformed input, duplicate entries, zero
    coefficients, caps < 1, or a modular-mode file (those are loaded by
    `wcount.codes.load_modular_instance`).
    """
    parsed = parse_wcount(text)
    if parsed["mode"] != "integer":
        raise ParseError(
            "file is in modular mode; use wcount.codes.load_modular_instance"
        )
    A = SparseMatrix.from_triples(parsed["m"], parsed["n"], parsed["triples"])
    return WeightedInstance(A, parsed["weights"], parsed["nu"])


def parse_wcount(text: str) -> dict:
    """Tokenize a WCOUNT v1 file into a mode-agnostic dict."""
    lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    if not lines:
        raise ParseError("empty instance file")
    it = iter(lines)

    def next_line(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    header = next_line("header")
    if header.split() != ["WCOUNT", "v1"]:
        raise ParseError(f"bad header {header!r}, expected 'WCOUNT v1'")

    mode_tokens = next_line("mode line").split()
    kappa = None
    if mode_tokens == ["mode", "integer"]:
        mode = "integer"
    elif len(mode_tokens) == 3 and mode_tokens[:2] == ["mode", "modular"]:
        mode = "modular"
        kappa = _int_token(mode_tokens[2], "kappa")
        if kappa < 2:
            raise ParseError(f"modulus kappa={kappa} must be >= 2")
    else:
        raise ParseError(f"bad mode line {mode_tokens!r}")

    dims = next_line("dims line").split()
    if len(dims) != 3 or dims[0] != "dims":
        raise ParseError(f"bad dims line {dims!r}")
    m = _int_token(dims[1], "row count")
    n = _int_token(dims[2], "column count")
    if m < 0 or n < 1:
        raise ParseError(f"bad dimensions m={m} n={n}")

    nu = None
    if mode == "integer":
        nu_tokens = next_line("nu line").split()
        if nu_tokens[0] != "nu" or len(nu_tokens) != n + 1:
            raise ParseError(f"nu line must carry {n} caps")
        nu = [_int_token(t, "nu") for t in nu_tokens[1:]]
        for v in nu:
            if v < 1:
                raise ParseError(f"cap nu={v} must be >= 1")

    w_tokens = next_line("weights line").split()
    if w_tokens[:2] == ["weights", "uniform"] and len(w_tokens) == 4:
        re, im = float(w_tokens[2]), float(w_tokens[3])
        weights = [complex(re, im)] * n
    elif w_tokens == ["weights", "list"]:
        weights = []
        for _ in range(n):
            parts = next_line("weight entry").split()
            if len(parts) != 2:
                raise ParseError(f"bad weight entry {parts!r}")
            weights.append(complex(float(parts[0]), float(parts[1])))
    else:
        raise ParseError(f"bad weights line {w_tokens!r}")

    if next_line("'entries'") != "entries":
        raise ParseError("expected 'entries' section")
    triples = []
    seen = set()
    while True:
        line = next_line("entry or 'end'")
        if line == "end":
            break
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"bad entry line {line!r}")
        i = _int_token(parts[0], "row index") - 1
        j = _int_token(parts[1], "column index") - 1
        a = _int_token(parts[2], "coefficient")
        if not (0 <= i < m):
            raise ParseError(f"row index {i + 1} out of range 1..{m}")
        if not (0 <= j < n):
            raise ParseError(f"column index {j + 1} out of range 1..{n}")
        if a == 0:
            raise ParseError(f"zero coefficient entry at ({i + 1}, {j + 1})")
        if (i, j) in seen:
            raise ParseError(f"duplicate entry at ({i + 1}, {j + 1})")
        seen.add((i, j))
        triples.append((i, j, a))

    return {
        "mode": mode,
        "kappa": kappa,
        "m": m,
        "n": n,
        "nu": nu,
        "weights": weights,
        "triples": triples,
    }


def _int_token(tok: str, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what}: {tok!r}") from None


def normalize(inst: WeightedInstance) -> tuple[WeightedInstance, ZeroColumnFactor]:
    """Drop zero rows, split off zero columns, eliminate forced-zero variables.

    A row with a single nonzero entry forces its variable to zero (a*x = 0
    with a != 0), so that column is removed with the constant factor 1;
    a zero column j is removed with the free factor
    1 + w_j z + ... + (w_j z)^{nu_j}.  Iterates until the matrix has no
    zero rows or columns and every row has at least two nonzeros.
    """
    A, w, nu = inst.A, list(inst.w), list(inst.nu)
    col_ids = list(range(A.n))
    removed = []

    while True:
        live_rows = [i for i in range(A.m) if A.cols_of_row(i)]
        changed = len(live_rows) != A.m

        forced = set()
        for i in live_rows:
            cols = A.cols_of_row(i)
            if len(cols) == 1:
                forced.add(cols[0])

        keep_cols = []
        for j in range(A.n):
            if j in forced:
                removed.append((col_ids[j], w[j], nu[j], True))
                changed = True
            elif not A.rows_of_col(j):
                removed.append((col_ids[j], w[j], nu[j], False))
                changed = True
            else:
                keep_cols.append(j)

        if not changed:
            break

        row_map = {i: k for k, i in enumerate(live_rows)}
        col_map = {j: k for k, j in enumerate(keep_cols)}
        entries = {
            (row_map[i], col_map[j]): a
            for (i, j), a in A.entries.items()
            if i in row_map and j in col_map
        }
        A = SparseMatrix(len(live_rows), len(keep_cols), entries)
        w = [w[j] for j in keep_cols]
        nu = [nu[j] for j in keep_cols]
        col_ids = [col_ids[j] for j in keep_cols]

    removed.sort(key=lambda t: t[0])
    reduced = WeightedInstance(A, w, nu) if A.n else WeightedInstance(A, [], [])
    return reduced, ZeroColumnFactor(tuple(removed))


def sparsity(A: SparseMatrix) -> SparsityStats:
    """Exact row/column sparsity maxima; d = r*c bounds column-graph degree."""
    r = max(A.row_support_sizes(), default=0)
    c = max(A.col_support_sizes(), default=0)
    return SparsityStats(r=r, c=c, d=r * c)


@dataclass(frozen=True)
class WeightBoundReport:
    constant: float
    threshold: float
    magnitudes: tuple
    passed: bool
    worst_margin: float


def weight_bound_check(inst: WeightedInstance, constant: float = BETA) -> WeightBoundReport:
    """Compare per-column |w_j| against constant/(r sqrt(c)).

    Advisory only: reports the threshold, the magnitudes, and the worst
    margin threshold - max|w_j| (negative means violation).
    """
    stats = sparsity(inst.A)
    if stats.r == 0 or stats.c == 0:
        threshold = math.inf
    else:
        threshold = constant / (stats.r * math.sqrt(stats.c))
    mags = tuple(abs(complex(x)) for x in inst.w)
    worst = threshold - max(mags, default=0.0)
    return WeightBoundReport(
        constant=constant,
        threshold=threshold,
        magnitudes=mags,
        passed=worst >= 0,
        worst_margin=worst,
    )


class ColumnGraph:
    """Undirected graph on matrix columns; columns sharing a row are adjacent."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj):
        self.n = n
        self.adj = adj  # tuple of sorted tuples

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_connected_subset(self, subset) -> bool:
        """BFS connectivity of the induced subgraph on `subset`."""
        subset = set(subset)
        if not subset:
            return False
        start = next(iter(subset))
        seen = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for v in self.adj[u]:
                if v in subset and v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return seen == subset


def column_graph(A: SparseMatrix) -> ColumnGraph:
    adj = [set() for _ in range(A.n)]
    for i in range(A.m):
        cols = A.cols_of_row(i)
        for a in cols:
            for b in cols:
                if a != b:
                    adj[a].add(b)
    return ColumnGraph(A.n, tuple(tuple(sorted(s)) for s in adj))


def instance_to_wcount(inst: WeightedInstance, mode: str = "integer", kappa: int | None = None) -> str:
    """Render an instance back to WCOUNT v1 text (used by `gen` and tests)."""
    out = ["WCOUNT v1"]
    if mode == "integer":
        out.append("mode integer")
    else:
        out.append(f"mode modular {kappa}")
    out.append(f"dims {inst.m} {inst.n}")
    if mode == "integer":
        out.append("nu " + " ".join(str(v) for v in inst.nu))
    uniform = len(set(inst.w)) <= 1
    if uniform and inst.n:
        w0 = complex(inst.w[0])
        out.append(f"weights uniform {w0.real!r} {w0.imag!r}")
    else:
        out.append("weights list")
        for w in inst.w:
            w = complex(w)
            out.append(f"{w.real!r} {w.imag!r}")
    out.append("entries")
    for (i, j), a in sorted(inst.A.entries.items()):
        out.append(f"{i + 1} {j + 1} {a}")
    out.append("end")
    return "\n".join(out) + "\n"


def direct_sum(a: WeightedInstance, b: WeightedInstance) -> WeightedInstance:
    """Block-diagonal composition; w(X; zeta) multiplies, sigma_k adds."""
    entries = dict(a.A.entries)
    for (i, j), v in b.A.entries.items():
        entries[(i + a.m, j + a.n)] = v
    A = SparseMatrix(a.m + b.m, a.n + b.n, entries)
    return WeightedInstance(A, a.w + b.w, a.nu + b.nu)
