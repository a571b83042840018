"""Exact ground truth by enumeration.

Everything here is deliberately simple and exhaustive: coefficients pi_k of
w(X; zeta), power sums sigma_k via Newton identities, and root location.
The fast algorithm is always checked against this module, never the other
way around.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from wcount.errors import EnumerationLimitError
from wcount.gaussian import GaussianRational
from wcount.instance import WeightedInstance

DEFAULT_ENUM_LIMIT = 2**24

# Selftest fault-injection hook: flips a sign inside the Newton recursion so
# the oracle/fast equivalence suite must detect the corruption.
FAULT_NEWTON_SIGN = False


@dataclass(frozen=True)
class CoefficientTable:
    """Low-order coefficients pi_0..pi_s of w(X; zeta); pi_0 is always 1."""

    s: int
    pi: tuple
    exact_flag: bool = False


@dataclass(frozen=True)
class PowerSumTable:
    """sigma_1..sigma_{k_max}, power sums of the inverse roots of w(X; zeta)."""

    k_max: int
    sigma: tuple

    def __getitem__(self, k: int):
        """1-based access: table[k] is sigma_k."""
        if not 1 <= k <= self.k_max:
            raise IndexError(f"sigma_{k} not in table (k_max={self.k_max})")
        return self.sigma[k - 1]


def _exact_weights(inst: WeightedInstance):
    """Lift double weights to exact Gaussian rationals (floats are rational)."""
    return [
        w
        if isinstance(w, GaussianRational)
        else GaussianRational(Fraction(complex(w).real), Fraction(complex(w).imag))
        for w in inst.w
    ]


def enumerate_points(inst: WeightedInstance, degree_cap=None, limit=DEFAULT_ENUM_LIMIT):
    """Yield every x with 0 <= x_j <= nu_j, A x = 0 and (if capped) sum x_j <= cap.

    Walks the box tree in lexicographic order; partial pruning happens on
    the degree cap and on a row only once all of its support is assigned.
    Raises EnumerationLimitError when the walk would visit more than
    `limit` nodes (checked upfront for the uncapped full box).
    """
    A, nu = inst.A, inst.nu
    n = A.n
    if degree_cap is None:
        box = 1
        for v in nu:
            box *= v + 1
            if box > limit:
                raise EnumerationLimitError(box, limit)

    # rows grouped by the last (largest) column of their support
    rows_closing_at = [[] for _ in range(n)]
    for i in range(A.m):
        cols = A.cols_of_row(i)
        if cols:
            rows_closing_at[cols[-1]].append(i)

    row_sum = [0] * A.m
    x = [0] * n
    visits = 0

    def rec(j: int, degree: int):
        nonlocal visits
        visits += 1
        if visits > limit:
            raise EnumerationLimitError(visits, limit)
        if j == n:
            yield tuple(x)
            return
        top = nu[j]
        if degree_cap is not None:
            top = min(top, degree_cap - degree)
        touched = [(i, A.entry(i, j)) for i in A.rows_of_col(j)]
        for val in range(top + 1):
            x[j] = val
            for i, a in touched:
                row_sum[i] += a * val
            if all(row_sum[i] == 0 for i in rows_closing_at[j]):
                yield from rec(j + 1, degree + val)
            for i, a in touched:
                row_sum[i] -= a * val
        x[j] = 0

    yield from rec(0, 0)


def _point_weight(weights, point, one):
    total = one
    for wj, xj in zip(weights, point):
        if xj:
            total = total * wj**xj
    return total


def exact_w(
    inst: WeightedInstance,
    exact: bool = False,
    weights=None,
    method: str = "auto",
    limit=DEFAULT_ENUM_LIMIT,
):
    """Sum of w_1^{x_1}...w_n^{x_n} over all points of X, exactly.

    Two independent routes: the box-tree walk ("dfs") and a
    meet-in-the-middle join on split row sums ("mitm"); "auto" picks by box
    size.  In exact mode the weights are lifted to Gaussian rationals and
    the result is exact.
    """
    w = weights if weights is not None else (_exact_weights(inst) if exact else list(inst.w))
    exact_mode = exact or (weights is not None and _any_exact(w))
    one = GaussianRational(1) if exact_mode else 1 + 0j
    if method == "auto":
        box = 1
        for v in inst.nu:
            box *= v + 1
            if box > 50_000:
                break
        method = "dfs" if box <= 50_000 else "mitm"
    if method == "dfs":
        total = one - one
        for point in enumerate_points(inst, limit=limit):
            total = total + _point_weight(w, point, one)
        return total
    if method == "mitm":
        return _exact_w_mitm(inst, w, one, limit)
    raise ValueError(f"unknown method {method!r}")


def _any_exact(w):
    return any(isinstance(x, (GaussianRational, int, Fraction)) for x in w)


def _exact_w_mitm(inst, w, one, limit):
    """Meet in the middle: join the two half-box weight tables on row sums."""
    import math

    A, nu = inst.A, inst.nu
    n = A.n
    logs = [math.log(vv + 1) for vv in nu]
    total_log = sum(logs)
    best_h, best_log = 0, float("inf")
    prefix = 0.0
    for h in range(n + 1):
        worst = max(prefix, total_log - prefix)
        if worst < best_log:
            best_h, best_log = h, worst
        if h < n:
            prefix += logs[h]
    if best_log > math.log(4 * limit):
        raise EnumerationLimitError(int(math.exp(min(best_log, 700))), limit)
    h = best_h

    def half_table(cols):
        table: dict = {}
        order = list(cols)
        def rec(idx, sums, weight):
            if idx == len(order):
                key = tuple(sums)
                table[key] = table.get(key, one - one) + weight
                return
            j = order[idx]
            touched = [(i, A.entry(i, j)) for i in A.rows_of_col(j)]
            for val in range(nu[j] + 1):
                if val:
                    for i, a in touched:
                        sums[i] += a
                    weight_val = weight * w[j] ** val
                else:
                    weight_val = weight
                rec(idx + 1, sums, weight_val)
            for i, a in touched:
                sums[i] -= a * nu[j]
        rec(0, [0] * A.m, one)
        return table

    left_tab = half_table(range(h))
    right_tab = half_table(range(h, n))
    total = one - one
    for key, wl in left_tab.items():
        neg = tuple(-s for s in key)
        wr = right_tab.get(neg)
        if wr is not None:
            total = total + wl * wr
    return total


def pi_table(
    inst: WeightedInstance,
    s: int,
    exact: bool = False,
    weights=None,
    limit=DEFAULT_ENUM_LIMIT,
) -> CoefficientTable:
    """pi_k = sum of point weights at degree exactly k, for k = 0..s."""
    if s < 0:
        raise ValueError("truncation order must be >= 0")
    w = weights if weights is not None else (_exact_weights(inst) if exact else list(inst.w))
    exact_mode = exact or (weights is not None and _any_exact(w))
    one = GaussianRational(1) if exact_mode else 1 + 0j
    zero = one - one
    pi = [zero] * (s + 1)
    for point in enumerate_points(inst, degree_cap=s, limit=limit):
        k = sum(point)
        pi[k] = pi[k] + _point_weight(w, point, one)
    return CoefficientTable(s=s, pi=tuple(pi), exact_flag=exact_mode)


def sigma_from_pi(pi: CoefficientTable, k_max: int) -> PowerSumTable:
    """Newton identities: k pi_k = -sum_{i=1..k} pi_{k-i} sigma_i, solved for sigma."""
    if k_max > pi.s:
        raise ValueError(f"need pi up to order {k_max}, table has {pi.s}")
    p = pi.pi
    sigma = []
    for k in range(1, k_max + 1):
        acc = k * p[k]
        for i in range(1, k):
            acc = acc + p[k - i] * sigma[i - 1]
        sigma.append(acc if FAULT_NEWTON_SIGN else -acc)
    return PowerSumTable(k_max=k_max, sigma=tuple(sigma))


def pi_from_sigma(sigma: PowerSumTable) -> CoefficientTable:
    """Inverse Newton recursion; round trip with sigma_from_pi is the identity."""
    s = sigma.k_max
    exact = any(isinstance(v, (GaussianRational, Fraction, int)) for v in sigma.sigma)
    one = GaussianRational(1) if exact else 1 + 0j
    pi = [one]
    for k in range(1, s + 1):
        acc = pi[0] - pi[0]
        for i in range(1, k + 1):
            acc = acc + pi[k - i] * sigma[i]
        pi.append(-acc / k)
    return CoefficientTable(s=s, pi=tuple(pi), exact_flag=exact)


def sigma_from_roots(roots, k_max: int) -> PowerSumTable:
    """sigma_k = sum of zeta^{-k} over the roots; validation helper."""
    sigma = tuple(sum(z ** (-k) for z in roots) if roots else 0j for k in range(1, k_max + 1))
    return PowerSumTable(k_max=k_max, sigma=sigma)


def roots_of_w(inst: WeightedInstance, limit=DEFAULT_ENUM_LIMIT):
    """All roots of w(X; zeta), via companion-matrix eigenvalues.

    Advisory (used to validate zero-freeness empirically); the
    approximation path never consumes these.  Returns [] for a constant
    polynomial.
    """
    table = pi_table(inst, inst.N, limit=limit)
    coeffs = [complex(c) for c in table.pi]
    scale = max(abs(c) for c in coeffs)
    deg = len(coeffs) - 1
    while deg > 0 and abs(coeffs[deg]) <= 1e-14 * scale:
        deg -= 1
    if deg == 0:
        return []
    arr = np.array(coeffs[: deg + 1][::-1], dtype=complex)
    roots = np.roots(arr)
    return sorted((complex(z) for z in roots), key=lambda z: (z.real, z.imag))
