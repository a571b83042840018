"""Seeded random instance generators for the validation suites and the CLI.

Rows mix coefficient signs so that small-support solutions actually occur;
a matrix whose rows are sign-uniform has only the trivial solution and
makes every power-sum test vacuous.
"""

from __future__ import annotations

import math
import random

from wcount.codes import ModularInstance, normalize_modular
from wcount.graphs import SimpleGraph
from wcount.instance import (
    BETA,
    SparseMatrix,
    WeightedInstance,
    normalize,
    sparsity,
)

_PALETTE = (1, -1, 2, -2)


def _random_sparse_matrix(rng: random.Random, n: int, m: int, r: int, c: int):
    """Random matrix with row support <= r, column support <= c, mixed-sign
    rows (plus occasional planted difference rows)."""
    capacity = [c] * n
    triples = []
    for i in range(m):
        avail = [j for j in range(n) if capacity[j] > 0]
        if len(avail) < 2:
            break
        size = rng.randint(2, min(r, len(avail)))
        cols = rng.sample(avail, size)
        for j in cols:
            capacity[j] -= 1
        if rng.random() < 0.4 and size == 2:
            a = rng.choice((1, 2))
            coeffs = [a, -a]
        else:
            coeffs = [rng.choice(_PALETTE) for _ in cols]
            # force mixed signs so the row admits nontrivial solutions
            if all(x > 0 for x in coeffs):
                coeffs[rng.randrange(size)] *= -1
            elif all(x < 0 for x in coeffs):
                coeffs[rng.randrange(size)] *= -1
        for j, a in zip(cols, coeffs):
            triples.append((i, j, a))
    return SparseMatrix.from_triples(m, n, triples)


def _weights(rng, n, threshold, magnitude_mode, complex_phases):
    out = []
    for _ in range(n):
        mag = threshold if magnitude_mode == "exact" else threshold * rng.uniform(0.15, 1.0)
        if complex_phases:
            phase = rng.uniform(0, 2 * math.pi)
            out.append(complex(mag * math.cos(phase), mag * math.sin(phase)))
        else:
            out.append(complex(mag, 0.0))
    return out


def gen_instance(
    seed: int,
    n_max: int = 14,
    m_max: int = 10,
    r_max: int = 4,
    c_max: int = 3,
    nu_max: int = 2,
    weight_scale: float = 1.0,
    magnitude_mode: str = "random",
    complex_phases: bool = True,
    n_cap: int | None = None,
) -> WeightedInstance:
    """Random normalized instance with |w_j| <= weight_scale * BETA/(r sqrt c).

    magnitude_mode "exact" puts every weight magnitude exactly on the
    scaled threshold (used by the zero-freeness suite).
    """
    rng = random.Random(seed)
    for attempt in range(64):
        n = rng.randint(4, n_max)
        m = rng.randint(2, m_max)
        r = rng.randint(2, r_max)
        c = rng.randint(1, c_max)
        A = _random_sparse_matrix(rng, n, m, r, c)
        nu = [rng.randint(1, nu_max) for _ in range(n)]
        inst = WeightedInstance(A, [0.0] * n, nu)
        reduced, _ = normalize(inst)
        if reduced.n < 2:
            continue
        if n_cap is not None and reduced.N > n_cap:
            continue
        stats = sparsity(reduced.A)
        threshold = weight_scale * BETA / (stats.r * math.sqrt(stats.c))
        w = _weights(rng, reduced.n, threshold, magnitude_mode, complex_phases)
        return WeightedInstance(reduced.A, w, reduced.nu)
    raise RuntimeError(f"generator failed to produce a normalized instance (seed={seed})")


def gen_modular_instance(
    seed: int,
    kappa: int,
    n_max: int = 12,
    m_max: int = 8,
    r_max: int = 4,
    c_max: int = 3,
    weight_scale: float = 1.0,
    magnitude_mode: str = "random",
    complex_phases: bool = True,
) -> ModularInstance:
    """Random normalized modular instance with weights inside
    weight_scale * BETA / ((kappa-1) r sqrt c)."""
    rng = random.Random(seed)
    for attempt in range(64):
        n = rng.randint(3, n_max)
        m = rng.randint(1, m_max)
        capacity = [c_max] * n
        triples = []
        for i in range(m):
            avail = [j for j in range(n) if capacity[j] > 0]
            if len(avail) < 2:
                break
            size = rng.randint(2, min(r_max, len(avail)))
            cols = rng.sample(avail, size)
            for j in cols:
                capacity[j] -= 1
                triples.append((i, j, rng.randint(1, kappa - 1)))
        A = SparseMatrix.from_triples(m, n, triples)
        inst = ModularInstance(kappa, A, [0.0] * n)
        reduced, _ = normalize_modular(inst)
        if reduced.n < 2:
            continue
        stats = sparsity(reduced.A)
        threshold = weight_scale * BETA / ((kappa - 1) * stats.r * math.sqrt(stats.c))
        w = _weights(rng, reduced.n, threshold, magnitude_mode, complex_phases)
        return ModularInstance(kappa, reduced.A, w)
    raise RuntimeError(f"modular generator failed (seed={seed})")


def gen_regular_instance(
    seed: int, n: int, r: int = 3, c: int = 3, weight_scale: float = 0.9
) -> WeightedInstance:
    """(r, c)-regular instance: m = n c / r rows with exactly r entries,
    every column in exactly c rows; used by the scaling smoke test."""
    rng = random.Random(seed)
    if (n * c) % r:
        raise ValueError("n*c must be divisible by r")
    m = n * c // r
    slots = list(range(n)) * c
    rng.shuffle(slots)
    rows = [slots[r * i : r * (i + 1)] for i in range(m)]
    # repair rows containing a duplicate column by swapping with other rows
    for i in range(m):
        guard = 0
        while len(set(rows[i])) < r:
            j = rng.randrange(m)
            p = rng.randrange(r)
            q = rng.randrange(r)
            rows[i][p], rows[j][q] = rows[j][q], rows[i][p]
            guard += 1
            if guard > 10_000:
                raise RuntimeError("row repair did not converge")
    triples = []
    for i, cols in enumerate(rows):
        coeffs = [rng.choice(_PALETTE) for _ in range(r)]
        if all(x > 0 for x in coeffs) or all(x < 0 for x in coeffs):
            coeffs[rng.randrange(r)] *= -1
        for j, a in zip(cols, coeffs):
            triples.append((i, j, a))
    A = SparseMatrix.from_triples(m, n, triples)
    nu = [1] * n
    threshold = weight_scale * BETA / (r * math.sqrt(c))
    w = _weights(rng, n, threshold, "random", True)
    return WeightedInstance(A, w, nu)


def gen_block_pair(seed: int, **kwargs):
    a = gen_instance(seed * 2 + 1, **kwargs)
    b = gen_instance(seed * 2 + 2, **kwargs)
    return a, b


def gen_hypergraph(
    seed: int, k: int = 2, blocks: int = 3, extra_edges: int = 3, off_scale: float = 0.5
):
    """k-uniform hypergraph with a planted perfect matching of unit-weight
    edges and weight-bounded extra edges."""
    from wcount.reductions import Hypergraph

    rng = random.Random(seed)
    n = k * blocks
    edges = [frozenset(range(k * b, k * (b + 1))) for b in range(blocks)]
    weights = [1 + 0j] * blocks
    matching = tuple(range(blocks))
    seen = set(edges)
    d_target = 3
    for _ in range(extra_edges * 4):
        if len(edges) - blocks >= extra_edges:
            break
        e = frozenset(rng.sample(range(n), k))
        if e in seen:
            continue
        deg = {}
        for ee in edges:
            for v in ee:
                deg[v] = deg.get(v, 0) + 1
        if any(deg.get(v, 0) + 1 > d_target for v in e):
            continue
        seen.add(e)
        edges.append(e)
    d = max(
        sum(1 for e in edges if v in e) for v in range(n)
    )
    bound = off_scale * BETA * BETA / (d * d * k)
    for _ in range(len(edges) - blocks):
        mag = bound * rng.uniform(0.2, 1.0)
        phase = rng.uniform(0, 2 * math.pi)
        weights.append(complex(mag * math.cos(phase), mag * math.sin(phase)))
    return Hypergraph(n, tuple(edges), tuple(weights), matching)


def gen_connected_graph(seed: int, n: int, extra_edges: int = 2) -> SimpleGraph:
    """Random connected simple graph: a random spanning tree plus extras."""
    rng = random.Random(seed)
    pairs = set()
    order = list(range(n))
    rng.shuffle(order)
    for idx in range(1, n):
        u = order[idx]
        v = order[rng.randrange(idx)]
        pairs.add(frozenset((u, v)))
    if n >= 2:
        for _ in range(extra_edges * 3):
            if len(pairs) >= n - 1 + extra_edges:
                break
            u, v = rng.sample(range(n), 2)
            pairs.add(frozenset((u, v)))
    return SimpleGraph(n, frozenset(pairs))


def gen_regular_graph(n: int, d: int) -> SimpleGraph:
    """Circulant d-regular graph on n vertices (d < n; n*d even)."""
    if d >= n or (n * d) % 2:
        raise ValueError("need d < n and n*d even")
    pairs = set()
    half = d // 2
    for v in range(n):
        for off in range(1, half + 1):
            pairs.add(frozenset((v, (v + off) % n)))
        if d % 2:
            pairs.add(frozenset((v, (v + n // 2) % n)))
    return SimpleGraph(n, frozenset(pairs))


def gen_loopy_graph(seed: int, n: int, extra_edges: int = 2) -> SimpleGraph:
    """Connected target graph that may carry loops (for homomorphisms)."""
    rng = random.Random(seed)
    base = gen_connected_graph(seed + 17, n, extra_edges)
    edges = set(base.edges)
    for v in range(n):
        if rng.random() < 0.4 or n == 1:
            edges.add(frozenset((v,)))
    return SimpleGraph(n, frozenset(edges))
