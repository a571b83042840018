"""Release-gate validation suites.

Each criterion checks the fast machinery against an independent exact
route at its pinned tolerance.  The CLI `selftest` runs the same suites at
reduced sizes; the pytest acceptance module runs them in full.
"""

from __future__ import annotations

import cmath
import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

from wcount import codes as codes_mod
from wcount import oracle
from wcount.gaussian import GaussianRational
from wcount.generate import (
    gen_block_pair,
    gen_connected_graph,
    gen_hypergraph,
    gen_instance,
    gen_loopy_graph,
    gen_modular_instance,
    gen_regular_graph,
    gen_regular_instance,
)
from wcount.instance import column_graph, direct_sum, sparsity
from wcount.interpolate import approx_w
from wcount.oracle import exact_w, pi_table, roots_of_w, sigma_from_pi
from wcount.powersums import (
    connected_column_subsets,
    mu_table,
    sigma_fast,
    sigma_fast_with_diagnostics,
)
from wcount.reductions import (
    HomInput,
    count_solutions,
    hom_count_bruteforce,
    hom_sum,
    hom_sum_bruteforce,
    hom_system,
    independence_instance,
    independence_polynomial_bruteforce,
    matching_weight,
    matching_weight_bruteforce,
    permanent_approx,
    permanent_bruteforce,
)

GAMMA_MIN = 46.0 / 45.0  # alpha/beta


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.index}: {self.name} ({self.elapsed:.1f}s) {self.detail}"


SCALES = {
    "full": dict(
        c1_instances=200,
        c2_instances=200,
        c3_instances=100,
        c3_modular=60,
        c4_pairs=50,
        c4_exact=8,
        c5_instances=50,
        c5_exact=5,
        c6_graphs=12,
        c6_n=18,
        c6_k=5,
        c7_codes=50,
        c8_hypergraphs=20,
        c8_permanents=15,
        c8_hom_pairs=25,
        c8_hom_sums=10,
        c9_small=1000,
        c9_large=10_000,
        c9_budget=600.0,
        c9_linear_slack=1.5,
    ),
    "quick": dict(
        c1_instances=40,
        c2_instances=20,
        c3_instances=25,
        c3_modular=15,
        c4_pairs=12,
        c4_exact=3,
        c5_instances=10,
        c5_exact=2,
        c6_graphs=5,
        c6_n=12,
        c6_k=4,
        c7_codes=12,
        c8_hypergraphs=6,
        c8_permanents=5,
        c8_hom_pairs=8,
        c8_hom_sums=4,
        c9_small=400,
        c9_large=2000,
        c9_budget=240.0,
        c9_linear_slack=2.0,
    ),
}

BASE_SEED = 20260810


def _family_instance(seed: int):
    return gen_instance(
        seed, n_max=14, m_max=10, r_max=4, c_max=3, nu_max=2, weight_scale=1.0
    )


def _log_ratio(approx, exact) -> float:
    return abs(cmath.log(complex(approx) / complex(exact)))


def criterion_1(cfg, seed=BASE_SEED) -> CriterionResult:
    """Oracle/fast sigma equivalence at 1e-9 relative, k = 1..6, < 60 s."""
    t0 = time.perf_counter()
    count = cfg["c1_instances"]
    worst = 0.0
    nontrivial = 0
    failures = []
    for idx in range(count):
        inst = _family_instance(seed + idx)
        table = pi_table(inst, 6)
        ora = sigma_from_pi(table, 6)
        fast = sigma_fast(inst.A, list(inst.w), list(inst.nu), 6)
        if any(abs(complex(v)) > 1e-15 for v in ora.sigma):
            nontrivial += 1
        for k in range(1, 7):
            err = abs(complex(fast[k]) - complex(ora[k])) / max(1.0, abs(complex(ora[k])))
            worst = max(worst, err)
            if err > 1e-9:
                failures.append((idx, k, err))
    elapsed = time.perf_counter() - t0
    budget_ok = elapsed < 60.0 or cfg is SCALES["quick"]
    passed = not failures and budget_ok and nontrivial >= count // 10
    detail = (
        f"{count} instances, worst rel err {worst:.2e}, "
        f"{nontrivial} with nonzero sigma, runtime {elapsed:.1f}s"
    )
    if failures:
        detail += f"; first failure {failures[0]}"
    if not budget_ok:
        detail += "; runtime budget exceeded"
    return CriterionResult(1, "oracle/fast sigma equivalence", passed, detail, elapsed)


def criterion_2(cfg, seed=BASE_SEED + 1000) -> CriterionResult:
    """|ln(approx) - ln(exact)| <= epsilon for epsilon in {1e-2, 1e-3}."""
    t0 = time.perf_counter()
    count = cfg["c2_instances"]
    worst = {1e-2: 0.0, 1e-3: 0.0}
    failures = []
    for idx in range(count):
        inst = _family_instance(seed + idx)
        exact = exact_w(inst)
        for eps in (1e-2, 1e-3):
            rep = approx_w(inst, eps)
            err = _log_ratio(rep.value, exact)
            worst[eps] = max(worst[eps], err)
            if err > eps:
                failures.append((idx, eps, err))
    elapsed = time.perf_counter() - t0
    passed = not failures
    detail = (
        f"{count} instances, worst |ln ratio|: "
        f"{worst[1e-2]:.2e} @ 1e-2, {worst[1e-3]:.2e} @ 1e-3"
    )
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(2, "end-to-end approximation accuracy", passed, detail, elapsed)


def criterion_3(cfg, seed=BASE_SEED + 2000) -> CriterionResult:
    """Zero-freeness at the beta boundary: w(X) != 0 and all roots outside
    46/45 (integer instances and kappa in {2, 3, 5})."""
    t0 = time.perf_counter()
    failures = []
    min_mod = math.inf
    for idx in range(cfg["c3_instances"]):
        inst = gen_instance(
            seed + idx, n_max=12, m_max=8, r_max=4, c_max=3, nu_max=2,
            weight_scale=1.0, magnitude_mode="exact", n_cap=12,
        )
        val = exact_w(inst)
        if abs(complex(val)) == 0.0:
            failures.append(("integer", idx, "w(X) = 0"))
            continue
        roots = roots_of_w(inst)
        if roots:
            mm = min(abs(z) for z in roots)
            min_mod = min(min_mod, mm)
            if mm <= GAMMA_MIN - 1e-9:
                failures.append(("integer", idx, f"root at modulus {mm}"))
    kappas = (2, 3, 5)
    n_caps = {2: 12, 3: 8, 5: 6}
    per_kappa = max(1, cfg["c3_modular"] // len(kappas))
    for kappa in kappas:
        for idx in range(per_kappa):
            minst = gen_modular_instance(
                seed + 5000 + kappa * 100 + idx, kappa,
                n_max=n_caps[kappa], m_max=6, r_max=4, c_max=3,
                weight_scale=1.0, magnitude_mode="exact",
            )
            val = codes_mod.code_weight(minst)
            if abs(complex(val)) == 0.0:
                failures.append((f"kappa={kappa}", idx, "w(X) = 0"))
                continue
            table = codes_mod.code_pi_table(minst, minst.n)
            coeffs = [complex(c) for c in table.pi]
            deg = len(coeffs) - 1
            scale = max(abs(c) for c in coeffs)
            while deg > 0 and abs(coeffs[deg]) <= 1e-14 * scale:
                deg -= 1
            if deg > 0:
                import numpy as np

                roots = np.roots(coeffs[: deg + 1][::-1])
                mm = min(abs(z) for z in roots)
                min_mod = min(min_mod, mm)
                if mm <= GAMMA_MIN - 1e-9:
                    failures.append((f"kappa={kappa}", idx, f"root at modulus {mm}"))
    elapsed = time.perf_counter() - t0
    detail = f"min root modulus observed {min_mod:.6f} (must exceed {GAMMA_MIN:.6f})"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(3, "zero-freeness at the beta boundary", not failures, detail, elapsed)


def criterion_4(cfg, seed=BASE_SEED + 3000) -> CriterionResult:
    """sigma additivity over direct sums: 1e-12 relative; exact in rational
    mode."""
    t0 = time.perf_counter()
    failures = []
    worst = 0.0
    for idx in range(cfg["c4_pairs"]):
        a, b = gen_block_pair(seed + idx, n_max=10, m_max=7, r_max=4, c_max=3, nu_max=2)
        d = direct_sum(a, b)
        k = 5
        sa = sigma_fast(a.A, list(a.w), list(a.nu), k)
        sb = sigma_fast(b.A, list(b.w), list(b.nu), k)
        sd = sigma_fast(d.A, list(d.w), list(d.nu), k)
        for kk in range(1, k + 1):
            expect = complex(sa[kk]) + complex(sb[kk])
            err = abs(complex(sd[kk]) - expect) / max(1.0, abs(expect))
            worst = max(worst, err)
            if err > 1e-12:
                failures.append((idx, kk, err))
    exact_fail = 0
    for idx in range(cfg["c4_exact"]):
        a, b = gen_block_pair(seed + 900 + idx, n_max=8, m_max=6, r_max=3, c_max=2, nu_max=2)
        d = direct_sum(a, b)
        wa = [_to_exact(x) for x in a.w]
        wb = [_to_exact(x) for x in b.w]
        wd = wa + wb
        k = 4
        sa = sigma_fast(a.A, wa, list(a.nu), k)
        sb = sigma_fast(b.A, wb, list(b.nu), k)
        sd = sigma_fast(d.A, wd, list(d.nu), k)
        for kk in range(1, k + 1):
            if sd[kk] != sa[kk] + sb[kk]:
                exact_fail += 1
    elapsed = time.perf_counter() - t0
    passed = not failures and exact_fail == 0
    detail = f"worst float deviation {worst:.2e}; exact-mode mismatches {exact_fail}"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(4, "sigma additivity over direct sums", passed, detail, elapsed)


def _to_exact(x):
    z = complex(x)
    return GaussianRational(Fraction(z.real), Fraction(z.imag))


def criterion_5(cfg, seed=BASE_SEED + 4000) -> CriterionResult:
    """Debug-mode mu over disconnected submatrices vanishes: 1e-12 absolute,
    exactly zero in rational mode."""
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    exact_fail = 0
    for idx in range(cfg["c5_instances"]):
        inst = gen_instance(seed + idx, n_max=9, m_max=7, r_max=4, c_max=3, nu_max=2)
        table = mu_table(inst.A, list(inst.w), list(inst.nu), 5, include_disconnected=True)
        for cols, values in table.mu.items():
            if table.connected[cols]:
                continue
            for v in values[1:]:
                checked += 1
                worst = max(worst, abs(complex(v)))
    for idx in range(cfg["c5_exact"]):
        inst = gen_instance(seed + 700 + idx, n_max=7, m_max=6, r_max=3, c_max=2, nu_max=2)
        wex = [_to_exact(x) for x in inst.w]
        table = mu_table(inst.A, wex, list(inst.nu), 4, include_disconnected=True)
        for cols, values in table.mu.items():
            if table.connected[cols]:
                continue
            for v in values[1:]:
                if v != GaussianRational(0):
                    exact_fail += 1
    elapsed = time.perf_counter() - t0
    passed = worst <= 1e-12 and exact_fail == 0
    detail = f"{checked} disconnected mu values, max |mu| = {worst:.2e}, exact-mode nonzeros {exact_fail}"
    return CriterionResult(5, "mu vanishes on disconnected submatrices", passed, detail, elapsed)


def criterion_6(cfg, seed=BASE_SEED + 5000) -> CriterionResult:
    """Connected-subset enumeration: exact vs brute force; per-column
    membership counts within the (e d)^{k-1}/2 bound."""
    t0 = time.perf_counter()
    failures = []
    for idx in range(cfg["c6_graphs"]):
        inst = gen_instance(
            seed + idx, n_max=cfg["c6_n"], m_max=14, r_max=4, c_max=3, nu_max=1
        )
        graph = column_graph(inst.A)
        k = cfg["c6_k"]
        fast = sorted(set(connected_column_subsets(graph, k)))
        brute = []
        for q in range(1, k + 1):
            for cand in itertools.combinations(range(graph.n), q):
                if graph.is_connected_subset(cand):
                    brute.append(cand)
        brute.sort()
        if fast != brute:
            failures.append((idx, "enumeration mismatch", len(fast), len(brute)))
            continue
        dup_check = list(connected_column_subsets(graph, k))
        if len(dup_check) != len(set(dup_check)):
            failures.append((idx, "duplicate subsets yielded"))
            continue
        _, diag = sigma_fast_with_diagnostics(
            inst.A, list(inst.w), list(inst.nu), k, engine="python"
        )
        d = sparsity(inst.A).d
        if not diag.membership_bound_ok(d):
            failures.append((idx, "membership bound violated", diag.max_membership))
    elapsed = time.perf_counter() - t0
    detail = f"{cfg['c6_graphs']} graphs up to {cfg['c6_n']} vertices, k = {cfg['c6_k']}"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(6, "connected-subset enumeration", not failures, detail, elapsed)


def criterion_7(cfg, seed=BASE_SEED + 6000) -> CriterionResult:
    """MacWilliams identity verified exactly (Fractions) against direct
    enumeration of X and its dual, 50 binary codes."""
    t0 = time.perf_counter()
    failures = []
    for idx in range(cfg["c7_codes"]):
        minst = gen_modular_instance(
            seed + idx, 2, n_max=12, m_max=8, r_max=4, c_max=3, weight_scale=0.5
        )
        n = minst.n
        p_x = codes_mod.enumerator_polynomial(minst)
        dim_c = codes_mod.rank_mod(minst.A, 2)
        dual = codes_mod.dual_code_words(minst.A, 2)
        if len(dual) != 2**dim_c:
            failures.append((idx, "dual size mismatch"))
            continue
        p_c = codes_mod.enumerator_of_words(dual, n)
        if p_x.total_words() != 2 ** (n - dim_c):
            failures.append((idx, "p_X(1) != kappa^(n-rank)"))
            continue
        points = [Fraction(0), Fraction(1, 2), Fraction(1, 3)] + [
            Fraction(2, 2 * t + 5) for t in range(n - 2)
        ]
        for z in points[: n + 1]:
            lhs = p_x.evaluate(z)
            rhs = codes_mod.macwilliams_forward(p_c, 2, n, dim_c, z)
            if lhs != rhs:
                failures.append((idx, f"forward identity fails at z={z}"))
                break
            denom = 1 + z
            if denom != 0:
                dual_eval = codes_mod.macwilliams(p_x, 2, n, dim_c, z)
                if dual_eval != p_c.evaluate((1 - z) / denom):
                    failures.append((idx, f"dual evaluation fails at z={z}"))
                    break
    elapsed = time.perf_counter() - t0
    detail = f"{cfg['c7_codes']} binary codes, exact rational arithmetic"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(7, "MacWilliams round trip", not failures, detail, elapsed)


def criterion_8(cfg, seed=BASE_SEED + 7000) -> CriterionResult:
    """Applications against brute force: hypergraph matchings, permanents,
    homomorphism counts and sums, independence polynomials."""
    import random as _random

    t0 = time.perf_counter()
    eps = 1e-3
    failures = []

    for idx in range(cfg["c8_hypergraphs"]):
        rng = _random.Random(seed + idx)
        k = rng.choice((2, 2, 3))
        blocks = rng.randint(2, 4 if k == 2 else 3)
        hg = gen_hypergraph(seed + idx, k=k, blocks=blocks, extra_edges=rng.randint(1, 4))
        if len(hg.edges) > 12:
            continue
        exact = matching_weight_bruteforce(hg)
        rep = matching_weight(hg, eps)
        err = _log_ratio(rep.value, exact)
        if err > eps:
            failures.append(("hypergraph", idx, err))

    for idx in range(cfg["c8_permanents"]):
        rng = _random.Random(seed + 300 + idx)
        n = rng.randint(2, 8)
        mat = [
            [
                (1 + 0j if i == j else 0j)
                + complex(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01))
                for j in range(n)
            ]
            for i in range(n)
        ]
        exact = permanent_bruteforce(mat)
        rep = permanent_approx(mat, eps)
        err = _log_ratio(rep.value, exact)
        if err > eps:
            failures.append(("permanent", idx, n, err))

    hom_checked = 0
    for idx in range(cfg["c8_hom_pairs"] * 4):
        if hom_checked >= cfg["c8_hom_pairs"]:
            break
        rng = _random.Random(seed + 800 + idx)
        n1 = rng.randint(2, 5)
        n2 = rng.randint(1, 4)
        g1 = gen_connected_graph(seed + 800 + idx, n1, extra_edges=rng.randint(0, 2))
        g2 = gen_loopy_graph(seed + 900 + idx, n2, extra_edges=rng.randint(0, 2))
        if not g2.is_connected() or not g1.nonloop_edges():
            continue
        anchor = rng.randrange(n1)
        base = None
        for phi in itertools.product(range(n2), repeat=n1):
            from wcount.reductions import is_homomorphism

            if is_homomorphism(g1, g2, phi):
                base = phi
                break
        if base is None:
            continue
        target = base[anchor]
        inp = HomInput(g1=g1, g2=g2, anchor=anchor, target=target, phi=base)
        sys = hom_system(inp)
        solutions = count_solutions(sys)
        expected = hom_count_bruteforce(inp)
        if solutions != expected:
            failures.append(("hom count", idx, solutions, expected))
        hom_checked += 1

    for idx in range(cfg["c8_hom_sums"]):
        rng = _random.Random(seed + 1700 + idx)
        n1 = rng.randint(2, 4)
        g1 = gen_connected_graph(seed + 1700 + idx, n1, extra_edges=1)
        g2 = gen_loopy_graph(seed + 1800 + idx, rng.randint(2, 3), extra_edges=1)
        if not g2.is_connected() or not g1.nonloop_edges():
            continue
        anchor = 0
        base = None
        for phi in itertools.product(range(g2.n), repeat=n1):
            from wcount.reductions import is_homomorphism

            if is_homomorphism(g1, g2, phi):
                base = phi
                break
        if base is None:
            continue
        inp = HomInput(g1=g1, g2=g2, anchor=anchor, target=base[anchor], phi=base)
        omega = 0.8 * 0.1 / g2.max_degree()
        exact = hom_sum_bruteforce(inp, omega)
        rep = hom_sum(inp, omega, eps)
        err = _log_ratio(rep.value, exact)
        if err > eps:
            failures.append(("hom sum", idx, err))

    for n, d in ((2, 1), (4, 2), (6, 2), (6, 3)):
        g = gen_regular_graph(n, d)
        omega = 0.5 * 0.1 / 2  # d2 = 2 for the two-image target
        lam = omega ** (2 * d)
        exact = independence_polynomial_bruteforce(g, lam)
        inp = independence_instance(g, omega)
        rep = hom_sum(inp, omega, eps)
        err = _log_ratio(rep.value, exact)
        if err > eps:
            failures.append(("independence", n, d, err))

    elapsed = time.perf_counter() - t0
    detail = "hypergraphs, permanents, hom counts/sums, independence polynomials"
    if failures:
        detail += f"; first failure {failures[0]}"
    return CriterionResult(8, "applications vs brute force", not failures, detail, elapsed)


def criterion_9(cfg, seed=BASE_SEED + 8000) -> CriterionResult:
    """Scaling smoke test: sigma_6 at n = 10^4 (r = c = 3) within budget,
    near-linear growth between the two sizes."""
    t0 = time.perf_counter()
    # warm the JIT so compile time does not pollute the measurement
    warm = gen_regular_instance(seed, 300)
    sigma_fast(warm.A, list(warm.w), list(warm.nu), 3)

    small = gen_regular_instance(seed + 1, cfg["c9_small"])
    t1 = time.perf_counter()
    _, diag_small = sigma_fast_with_diagnostics(small.A, list(small.w), list(small.nu), 6)
    t_small = time.perf_counter() - t1

    large = gen_regular_instance(seed + 2, cfg["c9_large"])
    t2 = time.perf_counter()
    table, diag_large = sigma_fast_with_diagnostics(large.A, list(large.w), list(large.nu), 6)
    t_large = time.perf_counter() - t2

    elapsed = time.perf_counter() - t0
    ratio = (t_large / cfg["c9_large"]) / max(t_small / cfg["c9_small"], 1e-9)
    budget_ok = t_large < cfg["c9_budget"]
    linear_ok = ratio <= cfg["c9_linear_slack"] or t_large < 5.0
    passed = budget_ok and linear_ok
    detail = (
        f"n={cfg['c9_small']}: {t_small:.2f}s ({sum(diag_small.subset_counts)} subsets); "
        f"n={cfg['c9_large']}: {t_large:.2f}s ({sum(diag_large.subset_counts)} subsets, "
        f"engine {diag_large.engine}); per-n ratio {ratio:.2f}"
    )
    return CriterionResult(9, "scaling smoke test", passed, detail, elapsed)


ALL_CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
]


def run_acceptance(scale: str = "full", seed: int = BASE_SEED, only=None, out=print):
    cfg = SCALES[scale]
    results = []
    for idx, crit in enumerate(ALL_CRITERIA, start=1):
        if only and idx not in only:
            continue
        res = crit(cfg, seed + idx * 10_000)
        results.append(res)
        if out:
            out(res.line())
    return results


def selftest(seed: int = BASE_SEED, inject_fault: str | None = None, out=print) -> int:
    """Reduced-size acceptance run; returns a process exit code."""
    if inject_fault not in (None, "newton-sign"):
        raise ValueError(f"unknown fault {inject_fault!r}")
    try:
        if inject_fault == "newton-sign":
            oracle.FAULT_NEWTON_SIGN = True
        results = run_acceptance("quick", seed=seed, out=out)
    finally:
        oracle.FAULT_NEWTON_SIGN = False
    return 0 if all(r.passed for r in results) else 1
