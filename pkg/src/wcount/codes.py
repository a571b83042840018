"""Weights and enumerators of linear codes over Z/kZ.

The weight of a codeword multiplies w_j over its nonzero coordinates, so
the scaled series w(X; zeta) is graded by support size and has degree at
most n.  The fast power-sum path reuses the submatrix machinery with the
support-graded local sums; everything is validated against enumeration.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from wcount.errors import (
    AllWeightsZeroError,
    EnumerationLimitError,
    GammaBoundError,
    ParseError,
)
from wcount.gaussian import GaussianRational
from wcount.graphs import SimpleGraph
from wcount.instance import (
    ALPHA,
    BETA,
    SparseMatrix,
    parse_wcount,
    sparsity,
)
from wcount.interpolate import (
    ApproxReport,
    choose_s,
    extend_power_sums,
    taylor_from_sigma,
    truncation_bound,
)
from wcount.oracle import DEFAULT_ENUM_LIMIT, PowerSumTable
from wcount.powersums import sigma_fast_with_diagnostics


class ModularInstance:
    """Sparse system A x = 0 over Z/kappa Z with per-column weights.

    Entries are stored reduced to 1..kappa-1; entries that reduce to zero
    are dropped.
    """

    __slots__ = ("kappa", "A", "w")

    def __init__(self, kappa: int, A: SparseMatrix, w):
        if kappa < 2:
            raise ParseError(f"modulus kappa={kappa} must be >= 2")
        if len(w) != A.n:
            raise ParseError("weight vector must have one entry per column")
        for a in A.entries.values():
            if not 1 <= a <= kappa - 1:
                raise ParseError("entries must be reduced to 1..kappa-1")
        self.kappa = kappa
        self.A = A
        self.w = tuple(w)

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def m(self) -> int:
        return self.A.m

    def max_weight_magnitude(self) -> float:
        return max((abs(complex(x)) for x in self.w), default=0.0)

    def __repr__(self):
        return f"ModularInstance(kappa={self.kappa}, m={self.m}, n={self.n})"


def from_integer_matrix(kappa: int, m: int, n: int, triples, w) -> ModularInstance:
    """Reduce integer triples mod kappa, dropping entries that vanish."""
    entries = {}
    for i, j, a in triples:
        r = a % kappa
        if (i, j) in entries:
            raise ParseError(f"duplicate entry at ({i + 1}, {j + 1})")
        if r:
            entries[(i, j)] = r
    return ModularInstance(kappa, SparseMatrix(m, n, entries), w)


def load_modular_instance(text: str) -> ModularInstance:
    parsed = parse_wcount(text)
    if parsed["mode"] != "modular":
        raise ParseError("file is in integer mode; use wcount.instance.load_instance")
    return from_integer_matrix(
        parsed["kappa"], parsed["m"], parsed["n"], parsed["triples"], parsed["weights"]
    )


@dataclass(frozen=True)
class ModularFactors:
    """Scalar factors from removed columns: free columns contribute
    1 + (kappa-1) w_j zeta, forced-zero columns contribute 1."""

    kappa: int
    removed_columns: tuple = ()  # (original_j, w_j, forced)

    def evaluate(self, zeta: complex = 1.0) -> complex:
        total = 1.0 + 0j
        for _, w, forced in self.removed_columns:
            if not forced:
                total *= 1.0 + (self.kappa - 1) * w * zeta
        return total

    def __bool__(self):
        return bool(self.removed_columns)


def normalize_modular(inst: ModularInstance) -> tuple[ModularInstance, ModularFactors]:
    """Drop zero rows; split off zero columns and gcd-1 singleton-forced
    columns.  Singleton rows whose entry shares a factor with kappa do not
    force their variable and are kept."""
    A, w, kappa = inst.A, list(inst.w), inst.kappa
    col_ids = list(range(A.n))
    removed = []
    while True:
        live_rows = [i for i in range(A.m) if A.cols_of_row(i)]
        changed = len(live_rows) != A.m
        forced = set()
        for i in live_rows:
            cols = A.cols_of_row(i)
            if len(cols) == 1 and math.gcd(A.entry(i, cols[0]), kappa) == 1:
                forced.add(cols[0])
        keep = []
        for j in range(A.n):
            if j in forced:
                removed.append((col_ids[j], w[j], True))
                changed = True
            elif not A.rows_of_col(j):
                removed.append((col_ids[j], w[j], False))
                changed = True
            else:
                keep.append(j)
        if not changed:
            break
        row_map = {i: k for k, i in enumerate(live_rows)}
        col_map = {j: k for k, j in enumerate(keep)}
        entries = {
            (row_map[i], col_map[j]): a
            for (i, j), a in A.entries.items()
            if i in row_map and j in col_map
        }
        A = SparseMatrix(len(live_rows), len(keep), entries)
        w = [w[j] for j in keep]
        col_ids = [col_ids[j] for j in keep]
    removed.sort(key=lambda t: t[0])
    return ModularInstance(kappa, A, w), ModularFactors(kappa, tuple(removed))


def modular_enumerate(inst: ModularInstance, limit=DEFAULT_ENUM_LIMIT, support_cap=None):
    """Yield every x in (Z/kZ)^n with A x = 0 mod kappa, each exactly once.

    Optional support_cap prunes on the number of nonzero coordinates.
    """
    A, kappa = inst.A, inst.kappa
    n = A.n
    if support_cap is None:
        total = kappa**n if n < 64 else float("inf")
        if total > limit:
            raise EnumerationLimitError(total, limit)

    rows_closing_at = [[] for _ in range(n)]
    for i in range(A.m):
        cols = A.cols_of_row(i)
        if cols:
            rows_closing_at[cols[-1]].append(i)

    row_sum = [0] * A.m
    x = [0] * n
    visits = 0

    def rec(j: int, supp: int):
        nonlocal visits
        visits += 1
        if visits > limit:
            raise EnumerationLimitError(visits, limit)
        if j == n:
            yield tuple(x)
            return
        touched = [(i, A.entry(i, j)) for i in A.rows_of_col(j)]
        top = kappa - 1
        if support_cap is not None and supp >= support_cap:
            top = 0
        for val in range(top + 1):
            x[j] = val
            for i, a in touched:
                row_sum[i] += a * val
            if all(row_sum[i] % kappa == 0 for i in rows_closing_at[j]):
                yield from rec(j + 1, supp + (1 if val else 0))
            for i, a in touched:
                row_sum[i] -= a * val
        x[j] = 0

    yield from rec(0, 0)


def _support_weight(w, point, one):
    total = one
    for wj, xj in zip(w, point):
        if xj:
            total = total * wj
    return total


def code_weight(inst: ModularInstance, exact: bool = False, weights=None, limit=DEFAULT_ENUM_LIMIT):
    """Exact w(X) = sum over codewords of the product of w_j over the
    support; the zero word contributes 1."""
    w = weights if weights is not None else (_exact_w_list(inst) if exact else list(inst.w))
    one = GaussianRational(1) if exact or _any_exact(w) else 1 + 0j
    total = one - one
    for point in modular_enumerate(inst, limit=limit):
        total = total + _support_weight(w, point, one)
    return total


def _exact_w_list(inst):
    return [
        x
        if isinstance(x, GaussianRational)
        else GaussianRational(Fraction(complex(x).real), Fraction(complex(x).imag))
        for x in inst.w
    ]


def _any_exact(w):
    return any(isinstance(x, (GaussianRational, Fraction)) or type(x) is int for x in w)


def code_pi_table(inst: ModularInstance, s: int, weights=None, limit=DEFAULT_ENUM_LIMIT):
    """pi_k = weighted count of codewords with exactly k nonzero coordinates."""
    w = weights if weights is not None else list(inst.w)
    one = GaussianRational(1) if _any_exact(w) else 1 + 0j
    zero = one - one
    pi = [zero] * (s + 1)
    for point in modular_enumerate(inst, limit=limit, support_cap=s):
        k = sum(1 for v in point if v)
        pi[k] = pi[k] + _support_weight(w, point, one)
    from wcount.oracle import CoefficientTable

    return CoefficientTable(s=s, pi=tuple(pi), exact_flag=_any_exact(w))


def code_sigma_fast(
    inst: ModularInstance,
    k_max: int,
    threads: int = 1,
    weights=None,
) -> PowerSumTable:
    """Power sums of the inverse roots of the support-graded w(X; zeta).

    The local sum of a submatrix B is nonzero only at degree |cols(B)|:
    lambda_{|C|}(B) = (prod of w_j over C) * #{x : support(x) = C, Bx = 0}.
    The mu and sigma recursions are the integer-mode ones unchanged.
    """
    w = weights if weights is not None else list(inst.w)
    table, _ = sigma_fast_with_diagnostics(
        inst.A, w, [inst.kappa - 1] * inst.n, k_max, threads=threads,
        engine="python", kappa=inst.kappa,
    )
    return table


def code_weight_threshold(inst: ModularInstance, constant: float = BETA) -> float:
    stats = sparsity(inst.A)
    if stats.r == 0:
        return math.inf
    return constant / ((inst.kappa - 1) * stats.r * math.sqrt(stats.c))


def approx_code_weight(
    inst: ModularInstance,
    epsilon: float,
    s_override: int | None = None,
    force: bool = False,
    alpha: float = ALPHA,
    threads: int = 1,
) -> ApproxReport:
    """Approximate the code weight within relative error epsilon via the
    support-graded power sums."""
    reduced, factors = normalize_modular(inst)
    factor_value = factors.evaluate(1.0)
    warnings: list[str] = []
    if factors:
        warnings.append(
            f"{len(factors.removed_columns)} column(s) split off as scalar factors"
        )

    N = reduced.n  # degree of the support-graded polynomial
    wmax = reduced.max_weight_magnitude()
    if reduced.n == 0 or wmax == 0.0:
        return ApproxReport(
            value=factor_value, log_value=0j, s=0, gamma=math.inf, bound=0.0,
            N=N, warnings=tuple(warnings),
        )

    stats = sparsity(reduced.A)
    gamma = alpha / ((reduced.kappa - 1) * stats.r * math.sqrt(stats.c) * wmax)
    if gamma <= 1.0:
        if not force:
            raise GammaBoundError(
                f"gamma={gamma:.6g} <= 1: code weights exceed the certified region"
            )
        warnings.append("uncertified: weights outside the certified zero-free region")
        s = s_override if s_override is not None else N
    else:
        s = s_override if s_override is not None else choose_s(N, gamma, epsilon)

    k_heavy = min(s, N)
    if k_heavy >= 1:
        table = code_sigma_fast(reduced, k_heavy, threads=threads)
        if s > N:
            table = extend_power_sums(table, s)
    else:
        table = PowerSumTable(k_max=0, sigma=())

    coeffs = taylor_from_sigma(table, s)
    log_value = sum(coeffs)
    value = cmath.exp(log_value) * factor_value
    bound = truncation_bound(N, gamma, s) if gamma > 1.0 else math.inf
    return ApproxReport(
        value=value, log_value=log_value, s=s, gamma=gamma, bound=bound,
        N=N, warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class EnumeratorPolynomial:
    """p_X(z) = 1 + sum p_k z^k; p_k counts codewords of Hamming weight k."""

    coefficients: tuple

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z):
        total = self.coefficients[0] * (z**0)
        for k in range(1, len(self.coefficients)):
            total = total + self.coefficients[k] * z**k
        return total

    def total_words(self):
        return sum(self.coefficients)


def enumerator_polynomial(inst: ModularInstance, limit=DEFAULT_ENUM_LIMIT) -> EnumeratorPolynomial:
    counts = [0] * (inst.n + 1)
    for point in modular_enumerate(inst, limit=limit):
        counts[sum(1 for v in point if v)] += 1
    return EnumeratorPolynomial(tuple(counts))


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    p = 2
    while p * p <= k:
        if k % p == 0:
            return False
        p += 1
    return True


def rank_mod(A: SparseMatrix, kappa: int) -> int:
    """Rank over the field F_kappa (kappa must be prime)."""
    if not _is_prime(kappa):
        raise ParseError(f"rank over Z/{kappa}Z needs a prime modulus")
    rows = [list(r) for r in A.to_dense()]
    rank = 0
    col = 0
    while rank < len(rows) and col < A.n:
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] % kappa), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col] % kappa, -1, kappa)
        rows[rank] = [(v * inv) % kappa for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % kappa:
                f = rows[r][col] % kappa
                rows[r] = [(a - f * b) % kappa for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def dual_code_words(A: SparseMatrix, kappa: int):
    """Enumerate the row space of A over F_kappa (the dual code C)."""
    if not _is_prime(kappa):
        raise ParseError(f"dual enumeration needs a prime modulus, got {kappa}")
    # reduced basis of the row space
    rows = [list(r) for r in A.to_dense()]
    basis = []
    for row in rows:
        cur = [v % kappa for v in row]
        for b in basis:
            lead = next((idx for idx, v in enumerate(b) if v), None)
            if lead is not None and cur[lead]:
                f = (cur[lead] * pow(b[lead], -1, kappa)) % kappa
                cur = [(x - f * y) % kappa for x, y in zip(cur, b)]
        if any(cur):
            basis.append(cur)
    words = []
    for coeffs in itertools.product(range(kappa), repeat=len(basis)):
        word = [0] * A.n
        for c, b in zip(coeffs, basis):
            if c:
                word = [(x + c * y) % kappa for x, y in zip(word, b)]
        words.append(tuple(word))
    return sorted(set(words))


def enumerator_of_words(words, n: int) -> EnumeratorPolynomial:
    counts = [0] * (n + 1)
    for word in words:
        counts[sum(1 for v in word if v)] += 1
    return EnumeratorPolynomial(tuple(counts))


def macwilliams(pX: EnumeratorPolynomial, kappa: int, n: int, dimC: int, z):
    """Evaluate the dual enumerator p_C at (1-z)/(1+(kappa-1)z) from p_X.

    The identity p_X(z) = kappa^{-dimC} (1+(kappa-1)z)^n p_C(t) with
    t = (1-z)/(1+(kappa-1)z) is solved for the p_C evaluation.  Works for
    exact Fraction inputs as well as complex.
    """
    denom = 1 + (kappa - 1) * z
    if denom == 0:
        raise ZeroDivisionError("1 + (kappa-1) z vanishes; transform undefined")
    return (kappa**dimC) * pX.evaluate(z) / denom**n


def macwilliams_forward(pC: EnumeratorPolynomial, kappa: int, n: int, dimC: int, z):
    """Evaluate p_X(z) from the dual enumerator via the identity."""
    denom = 1 + (kappa - 1) * z
    if denom == 0:
        raise ZeroDivisionError("1 + (kappa-1) z vanishes; transform undefined")
    t = (1 - z) / denom
    scale = Fraction(1, kappa**dimC) if isinstance(z, Fraction) else kappa ** (-dimC)
    return scale * denom**n * pC.evaluate(t)


def cut_code_matrix(G: SimpleGraph, weight=0.1 + 0j) -> ModularInstance:
    """Binary vertex-edge incidence instance; its codewords are indicators
    of even subgraphs, the dual code is the cut code of G."""
    edges = G.nonloop_edges()
    if any(len(e) == 1 for e in G.edges):
        raise ParseError("cut codes are defined for simple loopless graphs")
    entries = {}
    for col, (u, v) in enumerate(edges):
        entries[(u, col)] = 1
        entries[(v, col)] = 1
    A = SparseMatrix(G.n, len(edges), entries)
    return ModularInstance(2, A, [weight] * len(edges))
