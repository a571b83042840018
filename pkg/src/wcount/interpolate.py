"""Truncated Taylor approximation of ln w(X) with a certified bound.

With all roots of w(X; zeta) outside |zeta| <= gamma for some gamma > 1,
the Taylor polynomial T_s of f = ln w(X; zeta) at 0 satisfies

    |f(1) - T_s(1)| <= N / ((s+1) * gamma^s * (gamma - 1)),

N being the degree bound of w(X; zeta).  The coefficients of f come from
the power sums: f^(k)(0)/k! = -sigma_k / k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from wcount.errors import AllWeightsZeroError, GammaBoundError
from wcount.instance import ALPHA, WeightedInstance, normalize, sparsity
from wcount.oracle import CoefficientTable, PowerSumTable, pi_from_sigma
from wcount.powersums import sigma_fast_with_diagnostics


@dataclass(frozen=True)
class ApproxReport:
    value: complex  # approximation of w(X), zero-column factors included
    log_value: complex  # T_s(1) for the reduced instance
    s: int
    gamma: float
    bound: float  # certified |ln w(X) - T_s(1)|; inf when uncertified
    N: int
    warnings: tuple = ()

    @property
    def certified(self) -> bool:
        return self.gamma > 1.0 and math.isfinite(self.bound)


def effective_gamma(inst: WeightedInstance, alpha: float = ALPHA) -> float:
    """Radius of the certified zero-free disc for the instance's weights.

    gamma = alpha / (r sqrt(c) max|w_j|); values <= 1 signal that the
    weights exceed the certified region.
    """
    wmax = inst.max_weight_magnitude()
    if wmax == 0.0:
        raise AllWeightsZeroError("all weights are zero; w(X) = 1 exactly")
    stats = sparsity(inst.A)
    if stats.r == 0:
        return math.inf
    return alpha / (stats.r * math.sqrt(stats.c) * wmax)


def truncation_bound(N: int, gamma: float, s: int) -> float:
    """N / ((s+1) gamma^s (gamma-1)), evaluated in log space to dodge overflow."""
    if gamma <= 1.0:
        return math.inf
    if N == 0:
        return 0.0
    log_bound = math.log(N) - math.log(s + 1) - s * math.log(gamma) - math.log(gamma - 1.0)
    if log_bound > 700:
        return math.inf
    return math.exp(log_bound)


def choose_s(N: int, gamma: float, epsilon: float) -> int:
    """Smallest truncation order with certified error at most epsilon."""
    if gamma <= 1.0:
        raise GammaBoundError(f"gamma={gamma} is not greater than one")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if N < 1:
        return 0
    s = 0
    while truncation_bound(N, gamma, s) > epsilon:
        s += 1
    return s


def taylor_from_sigma(sigma: PowerSumTable, s: int):
    """Coefficients of T_s: index 0 is 0 (since w(X; 0) = 1), index k is
    -sigma_k / k."""
    if sigma.k_max < s:
        raise ValueError(f"need sigma up to {s}, table has {sigma.k_max}")
    coeffs = [0j]
    for k in range(1, s + 1):
        coeffs.append(-complex(sigma[k]) / k)
    return tuple(coeffs)


def extend_power_sums(sigma: PowerSumTable, s: int) -> PowerSumTable:
    """Extend sigma_1..sigma_N to order s > N via the coefficient recurrence.

    The polynomial w(X; zeta) has degree at most N = sigma.k_max, so its
    coefficients pi_0..pi_N follow from the Newton identities, and for
    k > N the power sums obey sigma_k = -sum_{i=1..N} pi_i sigma_{k-i}.
    The extension is exact (same inverse-root power sums), and the
    recurrence is stable since all inverse roots lie inside the unit disc
    whenever gamma > 1.
    """
    if s <= sigma.k_max:
        return PowerSumTable(k_max=s, sigma=sigma.sigma[:s])
    pi = pi_from_sigma(sigma).pi
    n_coeff = len(pi) - 1
    values = list(sigma.sigma)
    for k in range(sigma.k_max + 1, s + 1):
        acc = 0j
        for i in range(1, n_coeff + 1):
            acc += complex(pi[i]) * complex(values[k - i - 1])
        values.append(-acc)
    return PowerSumTable(k_max=s, sigma=tuple(values))


def approx_w(
    inst: WeightedInstance,
    epsilon: float,
    s_override: int | None = None,
    force: bool = False,
    alpha: float = ALPHA,
    threads: int = 1,
    engine: str = "auto",
    heavy_order_cap: int = 24,
) -> ApproxReport:
    """Approximate w(X) within relative error epsilon.

    Normalizes the instance, picks the smallest certified truncation order,
    computes the power sums by the fast submatrix path (extended by the
    exact coefficient recurrence beyond the polynomial degree), and
    exponentiates the Taylor value.  Weights outside the certified region
    raise GammaBoundError unless `force` is set, in which case the order is
    chosen adaptively and the result is reported as uncertified.

    heavy_order_cap bounds the order of the submatrix scan (its cost grows
    like (rc)^O(k)); when it bites, the report carries the certified bound
    actually achieved plus a warning.
    """
    reduced, factors = normalize(inst)
    factor_value = factors.evaluate(1.0)
    warnings: list[str] = []
    if factors:
        warnings.append(
            f"{len(factors.removed_columns)} column(s) split off as scalar factors"
        )

    N = reduced.N
    if reduced.n == 0 or reduced.max_weight_magnitude() == 0.0:
        # w(X; zeta) of the reduced instance is identically 1
        return ApproxReport(
            value=factor_value,
            log_value=0j,
            s=0,
            gamma=math.inf,
            bound=0.0,
            N=N,
            warnings=tuple(warnings),
        )

    gamma = effective_gamma(reduced, alpha)

    def sigma_to(k):
        table, _ = sigma_fast_with_diagnostics(
            reduced.A, list(reduced.w), list(reduced.nu), k, threads=threads, engine=engine
        )
        return table

    if gamma <= 1.0:
        if not force:
            raise GammaBoundError(
                f"gamma={gamma:.6g} <= 1: weights exceed the certified region "
                f"(use force to compute an uncertified value)"
            )
        warnings.append("uncertified: weights outside the certified zero-free region")
        if s_override is not None:
            s = s_override
            table = sigma_to(min(s, N))
        else:
            table, s, converged = _adaptive_truncation(sigma_to, N, epsilon)
            if not converged:
                warnings.append(
                    "adaptive truncation hit its order cap before the terms leveled off"
                )
        bound = math.inf
    else:
        s = s_override if s_override is not None else choose_s(N, gamma, epsilon)
        k_heavy = min(s, N)
        if k_heavy > heavy_order_cap:
            # the full-degree table is out of budget; fall back to the
            # certified bound at the largest affordable order
            s = heavy_order_cap
            k_heavy = heavy_order_cap
            warnings.append(
                f"truncation order capped at {heavy_order_cap}; certified bound "
                f"exceeds the requested epsilon"
            )
        table = sigma_to(k_heavy) if k_heavy >= 1 else PowerSumTable(0, ())
        if s > N:
            table = extend_power_sums(table, s)
        bound = truncation_bound(N, gamma, s)

    coeffs = taylor_from_sigma(table, s)
    log_value = sum(coeffs)
    value = cmath.exp(log_value) * factor_value
    return ApproxReport(
        value=value,
        log_value=log_value,
        s=s,
        gamma=gamma,
        bound=bound,
        N=N,
        warnings=tuple(warnings),
    )


ADAPTIVE_ORDER_CAP = 16


def _adaptive_truncation(sigma_to, N: int, epsilon: float):
    """Uncertified order selection for force mode: grow the order until the
    last two terms |sigma_k| / k drop below epsilon / 8, or the cap bites.

    Returns (table, s, converged).
    """
    cap = min(N, ADAPTIVE_ORDER_CAP)
    k = min(cap, 4)
    while True:
        table = sigma_to(k)
        terms = [abs(complex(table[j])) / j for j in range(1, k + 1)]
        if k >= 4 and terms[-1] <= epsilon / 8 and terms[-2] <= epsilon / 8:
            return table, k, True
        if k >= cap:
            return table, k, False
        k = min(cap, k + 2)
