"""Command-line surface.

Exit codes: 0 success, 2 invalid input, 3 weights outside the certified
region without --force, 4 infeasible witness, 5 enumeration limit
exceeded.  Output is plain text or JSON (complex numbers as {"re", "im"}
pairs that round-trip exactly); results are deterministic for a fixed
(input, configuration, seed, thread count).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from wcount import codes as codes_mod
from wcount import oracle as oracle_mod
from wcount.acceptance import selftest as run_selftest
from wcount.errors import (
    EnumerationLimitError,
    GammaBoundError,
    InfeasibleWitnessError,
    ParseError,
    WcountError,
)
from wcount.generate import gen_instance, gen_modular_instance, gen_regular_instance
from wcount.graphs import load_graph
from wcount.instance import (
    BETA,
    instance_to_wcount,
    load_instance,
    normalize,
    parse_wcount,
    sparsity,
    weight_bound_check,
)
from wcount.interpolate import approx_w, choose_s, effective_gamma
from wcount.oracle import exact_w, pi_table, roots_of_w, sigma_from_pi
from wcount.powersums import sigma_fast_with_diagnostics
from wcount.reductions import (
    HomInput,
    hamming_sum,
    hom_sum,
    independence_instance,
    load_affine_system,
    load_hypergraph,
    matching_weight,
    permanent_approx,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GAMMA = 3
EXIT_WITNESS = 4
EXIT_LIMIT = 5


def _cnum(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ParseError(f"bad complex literal {text!r}; use RE or RE,IM")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load_any(path: str):
    parsed = parse_wcount(_read(path))
    if parsed["mode"] == "integer":
        return load_instance(_read(path))
    return codes_mod.load_modular_instance(_read(path))


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _report_payload(rep) -> dict:
    return {
        "value": _cnum(rep.value),
        "log_value": _cnum(rep.log_value),
        "s": rep.s,
        "gamma": rep.gamma,
        "bound": rep.bound,
        "N": rep.N,
        "certified": rep.certified,
        "warnings": list(rep.warnings),
    }


def _report_lines(rep):
    lines = [
        f"value      = {complex(rep.value)}",
        f"log(value) = {complex(rep.log_value)}",
        f"s = {rep.s}   gamma = {rep.gamma:.6g}   N = {rep.N}",
        f"bound = {rep.bound:.6g}   certified = {rep.certified}",
    ]
    for w in rep.warnings:
        lines.append(f"warning: {w}")
    return lines


def cmd_approx(args) -> int:
    inst = load_instance(_read(args.instance))
    rep = approx_w(
        inst,
        args.epsilon,
        s_override=args.s,
        force=args.force,
        threads=args.threads,
    )
    payload = {"command": "approx", **_report_payload(rep)}
    lines = _report_lines(rep)
    if args.plot_dir:
        from wcount.report import save_convergence_report

        reduced, _ = normalize(inst)
        paths = save_convergence_report(
            rep.N, rep.gamma, args.epsilon, rep.s, args.plot_dir
        )
        payload["plots"] = paths
        lines.append(f"plots: {paths['png']} {paths['csv']}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(_read(args.instance))
    value = exact_w(inst, limit=args.enum_limit)
    s = args.s if args.s is not None else min(inst.N, 12)
    table = pi_table(inst, s, limit=args.enum_limit)
    sigma = sigma_from_pi(table, s)
    payload = {
        "command": "oracle",
        "exact_w": _cnum(value),
        "s": s,
        "pi": [_cnum(v) for v in table.pi],
        "sigma": [_cnum(v) for v in sigma.sigma],
    }
    lines = [f"exact w(X) = {complex(value)}", f"pi (k = 0..{s}):"]
    lines += [f"  pi_{k} = {complex(v)}" for k, v in enumerate(table.pi)]
    lines += [f"  sigma_{k} = {complex(v)}" for k, v in enumerate(sigma.sigma, start=1)]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_sigma(args) -> int:
    inst = _load_any(args.instance)
    if isinstance(inst, codes_mod.ModularInstance):
        reduced, _ = codes_mod.normalize_modular(inst)
        table, diag = sigma_fast_with_diagnostics(
            reduced.A,
            list(reduced.w),
            [reduced.kappa - 1] * reduced.n,
            args.k,
            threads=args.threads,
            engine="python",
            kappa=reduced.kappa,
        )
    else:
        reduced, _ = normalize(inst)
        table, diag = sigma_fast_with_diagnostics(
            reduced.A,
            list(reduced.w),
            list(reduced.nu),
            args.k,
            threads=args.threads,
            engine=args.engine,
        )
    payload = {
        "command": "sigma",
        "k": args.k,
        "sigma": [_cnum(v) for v in table.sigma],
        "subset_counts": list(diag.subset_counts),
        "active_sets": diag.active_sets,
        "engine": diag.engine,
    }
    lines = [f"sigma_{k} = {complex(v)}" for k, v in enumerate(table.sigma, start=1)]
    lines.append(f"subsets by size: {list(diag.subset_counts)}")
    lines.append(f"active sets: {diag.active_sets}   engine: {diag.engine}")
    if args.timing:
        payload["elapsed_seconds"] = diag.elapsed
        lines.append(f"elapsed: {diag.elapsed:.3f}s")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_roots(args) -> int:
    inst = load_instance(_read(args.instance))
    reduced, _ = normalize(inst)
    roots = roots_of_w(reduced, limit=args.enum_limit)
    try:
        gamma = effective_gamma(reduced)
    except WcountError:
        gamma = None
    payload = {
        "command": "roots",
        "count": len(roots),
        "roots": [_cnum(z) for z in roots],
        "moduli": [abs(z) for z in roots],
        "gamma": gamma,
    }
    lines = [f"{len(roots)} roots of w(X; zeta)"]
    lines += [f"  {z}  |z| = {abs(z):.6g}" for z in roots]
    if gamma is not None:
        lines.append(f"certified zero-free radius gamma = {gamma:.6g}")
    if args.plot_dir:
        from wcount.report import save_roots_report

        paths = save_roots_report(inst, args.plot_dir)
        payload["plots"] = paths
        lines.append(f"plots: {paths['png']} {paths['csv']}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_code_weight(args) -> int:
    inst = codes_mod.load_modular_instance(_read(args.instance))
    value = codes_mod.code_weight(inst, limit=args.enum_limit)
    payload = {"command": "code-weight", "value": _cnum(value), "kappa": inst.kappa}
    _emit(args, payload, [f"w(X) = {complex(value)}"])
    return EXIT_OK


def cmd_code_approx(args) -> int:
    inst = codes_mod.load_modular_instance(_read(args.instance))
    rep = codes_mod.approx_code_weight(
        inst, args.epsilon, s_override=args.s, force=args.force, threads=args.threads
    )
    payload = {"command": "code-approx", "kappa": inst.kappa, **_report_payload(rep)}
    _emit(args, payload, _report_lines(rep))
    return EXIT_OK


def cmd_enumerator(args) -> int:
    inst = codes_mod.load_modular_instance(_read(args.instance))
    poly = codes_mod.enumerator_polynomial(inst, limit=args.enum_limit)
    payload = {
        "command": "enumerator",
        "coefficients": list(poly.coefficients),
        "total_words": poly.total_words(),
    }
    lines = [f"p_{k} = {v}" for k, v in enumerate(poly.coefficients)]
    lines.append(f"|X| = {poly.total_words()}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_macwilliams(args) -> int:
    inst = codes_mod.load_modular_instance(_read(args.instance))
    z = _parse_complex(args.z)
    p_x = codes_mod.enumerator_polynomial(inst, limit=args.enum_limit)
    dim_c = codes_mod.rank_mod(inst.A, inst.kappa)
    dual_eval = codes_mod.macwilliams(p_x, inst.kappa, inst.n, dim_c, z)
    payload = {
        "command": "macwilliams",
        "kappa": inst.kappa,
        "dim_dual": dim_c,
        "z": _cnum(z),
        "p_X_at_z": _cnum(p_x.evaluate(z)),
        "dual_enumerator_at_transform": _cnum(dual_eval),
        "p_X_coefficients": list(p_x.coefficients),
    }
    lines = [
        f"dim C = {dim_c}",
        f"p_X({z}) = {complex(p_x.evaluate(z))}",
        f"p_C((1-z)/(1+(kappa-1)z)) = {complex(dual_eval)}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_cut_code(args) -> int:
    graph = load_graph(_read(args.graph))
    w = _parse_complex(args.weight)
    inst = codes_mod.cut_code_matrix(graph, w)
    stats = sparsity(inst.A)
    text = instance_to_wcount(
        # modular instances carry no nu line
        _ModularShim(inst),
        mode="modular",
        kappa=2,
    )
    if args.out:
        Path(args.out).write_text(text)
        _emit(
            args,
            {"command": "cut-code", "out": args.out, "m": inst.m, "n": inst.n,
             "r": stats.r, "c": stats.c},
            [f"wrote {args.out} ({inst.m} x {inst.n}, r = {stats.r}, c = {stats.c})"],
        )
    else:
        print(text, end="")
    return EXIT_OK


class _ModularShim:
    """Adapter so instance_to_wcount can render a modular instance."""

    def __init__(self, inst):
        self.A = inst.A
        self.w = inst.w
        self.nu = [1] * inst.n
        self.m = inst.m
        self.n = inst.n


def cmd_hamming(args) -> int:
    sys_ = load_affine_system(_read(args.system))
    omega = _parse_complex(args.omega)
    rep = hamming_sum(sys_, omega, args.epsilon, force=args.force, threads=args.threads)
    payload = {"command": "hamming", "omega": _cnum(omega), **_report_payload(rep)}
    _emit(args, payload, _report_lines(rep))
    return EXIT_OK


def cmd_matchings(args) -> int:
    hg = load_hypergraph(_read(args.hypergraph))
    omega = _parse_complex(args.omega) if args.omega else None
    rep = matching_weight(hg, args.epsilon, omega=omega, force=args.force, threads=args.threads)
    payload = {"command": "matchings", **_report_payload(rep)}
    _emit(args, payload, _report_lines(rep))
    return EXIT_OK


def cmd_permanent(args) -> int:
    matrix = _load_matrix(_read(args.matrix))
    rep = permanent_approx(matrix, args.epsilon, force=args.force, threads=args.threads)
    payload = {"command": "permanent", "n": len(matrix), **_report_payload(rep)}
    _emit(args, payload, _report_lines(rep))
    return EXIT_OK


def _load_matrix(text: str):
    """Rows of whitespace-separated entries; each entry RE or RE,IM."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([_parse_complex(tok) for tok in line.split()])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix file must be square (one row per line)")
    return rows


def cmd_hom(args) -> int:
    g1 = load_graph(_read(args.g1))
    g2 = load_graph(_read(args.g2))
    phi = _load_phi(_read(args.phi), g1.n) if args.phi else None
    omega = _parse_complex(args.omega)
    inp = HomInput(
        g1=g1, g2=g2, anchor=args.anchor - 1, target=args.target - 1, phi=phi
    )
    rep = hom_sum(inp, omega, args.epsilon, force=args.force, threads=args.threads)
    payload = {"command": "hom", "omega": _cnum(omega), **_report_payload(rep)}
    _emit(args, payload, _report_lines(rep))
    return EXIT_OK


def _load_phi(text: str, n: int):
    phi = [None] * n
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"bad phi line {line!r}")
        u, img = int(parts[0]) - 1, int(parts[1]) - 1
        if not 0 <= u < n:
            raise ParseError(f"phi vertex {u + 1} out of range")
        phi[u] = img
    if any(v is None for v in phi):
        raise ParseError("phi must assign every source vertex")
    return tuple(phi)


def cmd_indep(args) -> int:
    graph = load_graph(_read(args.graph))
    omega = _parse_complex(args.omega)
    inp = independence_instance(graph, omega)
    rep = hom_sum(inp, omega, args.epsilon, force=args.force, threads=args.threads)
    d = graph.degree(0)
    lam = omega ** (2 * d)
    payload = {
        "command": "indep",
        "degree": d,
        "lambda": _cnum(lam),
        **_report_payload(rep),
    }
    lines = [f"independence polynomial at lambda = omega^(2d) = {lam}"] + _report_lines(rep)
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "integer":
        inst = gen_instance(
            args.seed,
            n_max=args.n,
            m_max=args.m,
            r_max=args.r,
            c_max=args.c,
            nu_max=args.nu_max,
            weight_scale=args.weight_scale,
        )
        text = instance_to_wcount(inst)
    elif args.kind == "modular":
        inst = gen_modular_instance(
            args.seed,
            args.kappa,
            n_max=args.n,
            m_max=args.m,
            r_max=args.r,
            c_max=args.c,
            weight_scale=args.weight_scale,
        )
        text = instance_to_wcount(_ModularShim(inst), mode="modular", kappa=args.kappa)
    elif args.kind == "regular":
        inst = gen_regular_instance(args.seed, args.n, args.r, args.c, args.weight_scale)
        text = instance_to_wcount(inst)
    else:
        raise ParseError(f"unknown kind {args.kind!r}")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_selftest(args) -> int:
    return run_selftest(seed=args.seed, inject_fault=args.inject_fault)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcount",
        description="Approximate weighted counting of integer points in sparse subspaces",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("WCOUNT_THREADS", "1")),
        help="worker count for the power-sum scan (default: WCOUNT_THREADS or 1)",
    )
    parser.add_argument(
        "--enum-limit",
        type=int,
        default=oracle_mod.DEFAULT_ENUM_LIMIT,
        help="candidate cap for exact enumerations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="approximate w(X) within relative epsilon")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=int, default=None, help="override the truncation order")
    p.add_argument("--force", action="store_true")
    p.add_argument("--plot-dir", default=None)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("oracle", help="exact w(X) plus pi/sigma tables")
    p.add_argument("instance")
    p.add_argument("--s", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sigma", help="fast power sums sigma_1..sigma_k")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--engine", choices=("auto", "python", "kernel"), default="auto")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("roots", help="roots of w(X; zeta) (validation)")
    p.add_argument("instance")
    p.add_argument("--plot-dir", default=None)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("code-weight", help="exact weight of a modular code")
    p.add_argument("instance")
    p.set_defaults(func=cmd_code_weight)

    p = sub.add_parser("code-approx", help="approximate code weight")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_code_approx)

    p = sub.add_parser("enumerator", help="weight enumerator by Hamming weight")
    p.add_argument("instance")
    p.set_defaults(func=cmd_enumerator)

    p = sub.add_parser("macwilliams", help="dual enumerator evaluation")
    p.add_argument("instance")
    p.add_argument("--z", required=True, help="evaluation point RE or RE,IM")
    p.set_defaults(func=cmd_macwilliams)

    p = sub.add_parser("cut-code", help="cut-code instance of a graph")
    p.add_argument("graph")
    p.add_argument("--weight", default="0.1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cut_code)

    p = sub.add_parser("hamming", help="sum of omega^dist(x, y) over solutions")
    p.add_argument("system")
    p.add_argument("--omega", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_hamming)

    p = sub.add_parser("matchings", help="weighted perfect matchings of a hypergraph")
    p.add_argument("hypergraph")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--omega", default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_matchings)

    p = sub.add_parser("permanent", help="permanent of a near-identity matrix")
    p.add_argument("matrix")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_permanent)

    p = sub.add_parser("hom", help="anchored homomorphism sum")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--anchor", type=int, required=True, help="1-based vertex of G1")
    p.add_argument("--target", type=int, required=True, help="1-based vertex of G2")
    p.add_argument("--phi", default=None, help="witness map file: 'u image' lines")
    p.add_argument("--omega", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("indep", help="independence polynomial of a regular graph")
    p.add_argument("graph")
    p.add_argument("--omega", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_indep)

    p = sub.add_parser("gen", help="seeded random instance generator")
    p.add_argument("--kind", choices=("integer", "modular", "regular"), default="integer")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--nu-max", type=int, default=2)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--weight-scale", type=float, default=0.9)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="reduced-size acceptance suites")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument(
        "--inject-fault", choices=("newton-sign",), default=None,
        help="debug: corrupt the Newton recursion; the suite must fail",
    )
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GammaBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GAMMA
    except InfeasibleWitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    except EnumerationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except WcountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
