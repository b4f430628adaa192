"""Command-line surface.

Subcommands: order, reduce, capmeas, gen, bench, verify. Exit codes are a
stable contract: 0 success / certificate pass, 1 usage, IO, or domain error,
2 guarantee violation (gs achieved above d plus tolerance), 3 certificate
failure. Every command is deterministic given its flags; only the reported
wall times vary between runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import capgeo, serialize
from .core import DEFAULT_TOL, Gauge, Ordering, VectorFamily, prefix_report
from .generators import GEN_KINDS, GenSpec, generate
from .ordering import ORACLE_DEFAULT_CAP, drift_order, greedy_order, gs_order, oracle_order
from .partition import WitnessSearchConfig
from .pipeline import certify, reduce_order

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GUARANTEE = 2
EXIT_CERT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would SystemExit(2); we want exit 1
        raise UsageError(message)


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base PRNG seed")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance")
    common.add_argument("--jobs", type=int, default=1, help="parallel grid cells (bench)")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None, help="report format")

    parser = _Parser(prog="steinitz", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("order", help="order an instance and report prefix norms")
    p.add_argument("input")
    p.add_argument("--algo", choices=["gs", "greedy", "oracle", "drift"], default="gs")
    p.add_argument("--gauge", default=None, help="override instance gauge: 1, 2, inf, or any p >= 1")
    p.add_argument("--oracle-cap", type=int, default=ORACLE_DEFAULT_CAP)
    p.set_defaults(func=cmd_order)

    p = add_parser("reduce", help="partition, compress, order, and certify")
    p.add_argument("input")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--t", default="auto", help="cone height: a number, 'auto', or 'refined'")
    p.add_argument("--directions", type=int, default=128)
    p.add_argument("--ascent-iterations", type=int, default=4)
    p.add_argument("--bruteforce-cap", type=int, default=12)
    p.set_defaults(func=cmd_reduce)

    p = add_parser("capmeas", help="cap measure and its certificates")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", default="auto")
    p.add_argument("--checks", action="store_true", help="include the inequality-chain report")
    p.set_defaults(func=cmd_capmeas)

    p = add_parser("gen", help="write a generated instance file")
    p.add_argument("--kind", choices=list(GEN_KINDS), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--radial", choices=["sphere", "ball"], default="sphere")
    p.add_argument("--gauge", default=None)
    p.set_defaults(func=cmd_gen)

    p = add_parser("bench", help="run a seed x eps x d grid, one CSV row per run")
    p.add_argument("--d", type=int, nargs="+", required=True)
    p.add_argument("--eps", type=float, nargs="+", default=[0.5])
    p.add_argument("--seeds", type=int, default=1, help="seeds 0..N-1 offset by --seed")
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--t", default="auto")
    p.add_argument("--algo", choices=["reduce", "gs", "greedy"], default="reduce")
    p.set_defaults(func=cmd_bench)

    p = add_parser("verify", help="recompute the prefix report of a stored ordering")
    p.add_argument("input")
    p.add_argument("ordering")
    p.set_defaults(func=cmd_verify)
    return parser


def _parse_gauge(text: str) -> Gauge:
    if text in ("inf", "Inf", "INF"):
        return Gauge.linf()
    if text in ("euclidean", "2"):
        return Gauge.euclidean()
    return Gauge.lp(float(text))


def _emit(args, doc: dict) -> None:
    serialize.write_text(args.out, serialize.dumps_json(doc))


def cmd_order(args) -> int:
    family, meta = serialize.load_instance(args.input)
    if args.gauge is not None:
        family = VectorFamily(family.vectors, _parse_gauge(args.gauge))
    t0 = time.perf_counter()
    if args.algo == "gs":
        res = gs_order(family, args.tol)
    elif args.algo == "greedy":
        res = greedy_order(family)
    elif args.algo == "drift":
        res = drift_order(family, args.tol)
    else:
        res = oracle_order(family, cap=args.oracle_cap)
    ms = 1000.0 * (time.perf_counter() - t0)
    rep = prefix_report(family, res.ordering)
    violated = res.guarantee is not None and res.achieved > res.guarantee + args.tol
    doc = {
        "command": "order",
        "config": {"input": args.input, "algo": args.algo, "gauge": serialize.gauge_to_json(family.gauge), "tol": args.tol},
        "meta": meta,
        "algo": res.algo,
        "achieved": res.achieved,
        "guarantee": res.guarantee,
        "perm": [int(i) for i in res.ordering.perm],
        "drift": res.ordering.drift,
        "max_norm": rep.max_norm,
        "argmax_k": rep.argmax_k,
        "per_prefix_norms": [float(x) for x in rep.per_prefix_norms],
        "wall_ms": ms,
        "pass_counts": {"passed": 0 if violated else 1, "failed": 1 if violated else 0},
    }
    _emit(args, doc)
    return EXIT_GUARANTEE if violated else EXIT_OK


def _resolve_t(text: str | float):
    if text in ("auto", "refined"):
        return text
    return float(text)


def cmd_reduce(args) -> int:
    family, meta = serialize.load_instance(args.input)
    cfg = WitnessSearchConfig(
        random_directions=args.directions,
        ascent_iterations=args.ascent_iterations,
        subset_bruteforce_cap=args.bruteforce_cap,
        seed=args.seed,
    )
    t0 = time.perf_counter()
    red = reduce_order(family, args.eps, _resolve_t(args.t), cfg, args.tol)
    cert = certify(family, red.ordering, red.partition, red.w_order, args.eps, red.partition.t)
    ms = 1000.0 * (time.perf_counter() - t0)
    doc = {
        "command": "reduce",
        "config": {
            "input": args.input,
            "eps": args.eps,
            "t": args.t,
            "seed": args.seed,
            "directions": args.directions,
            "ascent_iterations": args.ascent_iterations,
            "bruteforce_cap": args.bruteforce_cap,
            "tol": args.tol,
        },
        "meta": meta,
        "perm": [int(i) for i in red.ordering.perm],
        "drift": False,
        "groups": [[int(i) for i in g.indices] for g in red.partition.groups],
        "residual": [int(i) for i in red.partition.residual],
        **{k: _jsonable(v) for k, v in dataclasses.asdict(cert).items()},
        "pass": cert.passed,
        "wall_ms": ms,
        "pass_counts": {"passed": int(cert.passed), "failed": int(not cert.passed)},
    }
    _emit(args, doc)
    return EXIT_OK if cert.passed else EXIT_CERT


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    return v


def cmd_capmeas(args) -> int:
    if args.d < 2:
        raise UsageError("capmeas requires d >= 2")
    if args.t == "auto":
        t = capgeo.auto_t(args.d, "standard")
    elif args.t == "refined":
        t = capgeo.auto_t(args.d, "refined")
    else:
        t = float(args.t)
    res = capgeo.cap_measure(capgeo.CapQuery(args.d, t))
    lemma = capgeo.lemma_c140_check(args.d)
    lines = [
        f"d = {args.d}",
        f"t = {t!r}",
        f"sigma_t = {res.sigma!r}  (method {res.method}, abs error <= {res.abs_error_estimate:.2e})",
        f"t/140 = {t / capgeo.CAP_LEMMA_C!r}",
        f"cap lemma (sigma >= t/140 at standard t): {'holds' if lemma.holds else 'FAILS'}",
    ]
    doc = {
        "command": "capmeas",
        "config": {"d": args.d, "t": args.t},
        "t": t,
        "sigma": res.sigma,
        "sigma_method": res.method,
        "sigma_abs_error": res.abs_error_estimate,
        "lemma_holds": lemma.holds,
        "lemma_threshold": lemma.threshold,
    }
    if args.checks:
        if args.d >= 10:
            chain = capgeo.inequality_chain_check(args.d)
            doc["chain"] = [dataclasses.asdict(ln) for ln in chain.links]
            doc["chain_all_hold"] = chain.all_hold
            lines.append(f"inequality chain: {'all links hold' if chain.all_hold else 'LINK FAILED'}")
            for ln in chain.links:
                lines.append(f"  {ln.name:15s} margin {ln.margin:+.6e} {'ok' if ln.holds else 'FAIL'}")
        else:
            lines.append("inequality chain: stated for d >= 10, skipped")
    print("\n".join(lines))
    if args.out != "-":
        _emit(args, doc)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(
        kind=args.kind,
        d=args.d,
        n=args.n,
        eps=args.eps,
        seed=args.seed,
        radial_mode=args.radial,
        gauge_p=_parse_gauge(args.gauge).p if args.gauge else 2.0,
    )
    family = generate(spec)
    meta = {
        "generator": args.kind,
        "seed": args.seed,
        "d": args.d,
        "n": family.n,
        "eps": args.eps,
        "prng": "philox4x64",
    }
    # Small instances carry their measured exact-oracle value for reference.
    if args.kind in ("l1_adversarial", "hadamard") and family.n <= ORACLE_DEFAULT_CAP:
        meta["oracle_achieved"] = oracle_order(family).achieved
        if args.kind == "l1_adversarial":
            meta["l1_target_informational"] = (args.d + 1) / 2
    serialize.write_text(args.out, serialize.dumps_json(serialize.family_to_dict(family, meta)))
    return EXIT_OK


def _bench_cell(cell: dict) -> dict:
    spec = GenSpec(kind="random_zero_sum", d=cell["d"], n=cell["n"], seed=cell["seed"])
    family = generate(spec)
    t0 = time.perf_counter()
    row = {k: cell[k] for k in ("d", "n", "eps", "seed", "algo")}
    if cell["algo"] == "reduce":
        cfg = WitnessSearchConfig(seed=cell["seed"])
        red = reduce_order(family, cell["eps"], cell["t"], cfg)
        cert = certify(family, red.ordering, red.partition, red.w_order, cell["eps"], red.partition.t)
        row.update(
            t=cert.t,
            achieved=cert.prefix_max,
            bound=cert.bound,
            C_W=cert.c_w,
            inv_t=cert.inv_t,
            inv_sigma_t=cert.inv_sigma_t,
        )
        row["pass"] = cert.passed
    else:
        res = gs_order(family) if cell["algo"] == "gs" else greedy_order(family)
        row.update(t="", achieved=res.achieved, bound=res.guarantee if res.guarantee is not None else "", C_W="", inv_t="", inv_sigma_t="")
        row["pass"] = res.guarantee is None or res.achieved <= res.guarantee + DEFAULT_TOL
    row["ms"] = 1000.0 * (time.perf_counter() - t0)
    return row


def cmd_bench(args) -> int:
    cells = [
        {"d": d, "n": args.n, "eps": eps, "seed": args.seed + s, "algo": args.algo, "t": _resolve_t(args.t)}
        for d in args.d
        for eps in args.eps
        for s in range(args.seeds)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(c) for c in cells]
    rows.sort(key=lambda r: (r["d"], r["n"], r["eps"], r["seed"], r["algo"]))
    if (args.format or "csv") == "json":
        serialize.write_text(args.out, serialize.dumps_json({"command": "bench", "rows": rows}))
    else:
        serialize.write_text(args.out, serialize.rows_to_csv(rows, serialize.BENCH_COLUMNS))
    return EXIT_OK


def cmd_verify(args) -> int:
    family, _ = serialize.load_instance(args.input)
    with open(args.ordering, "r", encoding="utf-8") as fh:
        doc = serialize.loads_json(fh.read())
    if not isinstance(doc, dict) or "perm" not in doc:
        raise UsageError("ordering file must be a JSON object with a 'perm' field")
    ordering = Ordering(np.asarray(doc["perm"], dtype=np.int64), bool(doc.get("drift", False)))
    rep = prefix_report(family, ordering)
    doc = {
        "command": "verify",
        "config": {"input": args.input, "ordering": args.ordering},
        "max_norm": rep.max_norm,
        "argmax_k": rep.argmax_k,
        "drift": rep.drift,
        "per_prefix_norms": [float(x) for x in rep.per_prefix_norms],
    }
    _emit(args, doc)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return int(args.func(args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
