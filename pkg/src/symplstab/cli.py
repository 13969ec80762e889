"""Command line interface.

Exit codes: 0 when every agreement and check holds, 2 on a disagreement or
failed check, 3 when an engine was inconclusive, 1 on input errors.
``SYMPLSTAB_THREADS`` sets the worker count for ``random --run``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import flow, harness, momentum, stability

THREADS_ENV = "SYMPLSTAB_THREADS"


def _instance(path: str) -> harness.Instance:
    return harness.load_instance(path)


def _opts(args) -> harness.CompareOptions:
    return harness.CompareOptions(
        tol=getattr(args, "tol", flow.DEFAULT_TOL),
        max_iter=getattr(args, "max_iter", flow.DEFAULT_MAX_ITER),
        budget=getattr(args, "budget", stability.DEFAULT_BUDGET),
        seed=getattr(args, "seed", 0),
        timings=getattr(args, "timings", False),
    )


def _emit_report(report: harness.Report, args) -> int:
    sys.stdout.write(report.to_json(timings=args.timings))
    for p in report.points:
        for e, r in p.results.items():
            print(f"# {report.instance}/{p.name} {e}: level={r.level} semistable={r.semistable} "
                  f"margin={harness._round(r.margin)} confidence={r.confidence}", file=sys.stderr)
    return report.exit_code()


def cmd_analyze(args) -> int:
    inst = _instance(args.file)
    engines = harness.ENGINES if args.engine == "all" else (args.engine,)
    points = [args.point] if args.point else None
    return _emit_report(harness.compare(inst, engines, _opts(args), points), args)


def cmd_compare(args) -> int:
    inst = _instance(args.file)
    engines = tuple(e for chunk in args.engines for e in chunk.split(","))
    return _emit_report(harness.compare(inst, engines, _opts(args)), args)


def cmd_flow(args) -> int:
    inst = _instance(args.file)
    sympl = inst.symplectization()
    out = {}
    code = 0
    for name, v in inst.points.items():
        res = flow.kn_descent(sympl, v, tol=args.tol, max_iter=args.max_iter)
        if res.classification == "inconclusive":
            code = 3
        out[name] = {
            "classification": res.classification,
            "mu_norm": harness._round(res.mu_norm),
            "mu_infimum": harness._round(min(res.mu_trajectory)),
            "psi": harness._round(res.psi),
            "exponent_norm": harness._round(res.exponent_norm),
            "iterations": res.iterations,
        }
        if args.timings:
            out[name]["wall_time"] = harness._round(res.wall_time)
    print(json.dumps({"instance": inst.id, "points": out}, indent=2, sort_keys=True))
    return code


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _compare_all(inst: harness.Instance, opts: harness.CompareOptions) -> harness.Report:
    return harness.compare(inst, harness.ENGINES, opts)


def cmd_random(args) -> int:
    params = harness.RandomParams(count=args.count, kind=args.kind, k_max=args.k, n_max=args.n,
                                  bound=args.bound, tau_set=tuple(args.tau_set))
    suite = harness.generate_random(args.seed, params)
    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
        for inst in suite:
            with open(os.path.join(args.emit, f"{inst.id}.json"), "w", encoding="utf-8") as fh:
                fh.write(harness.serialize_instance(inst))
        print(f"wrote {len(suite)} instances to {args.emit}")
        return 0
    if not args.run:
        print(json.dumps([harness.to_document(i) for i in suite], indent=2))
        return 0
    totals = {"points": 0, "disagreements": 0, "check_failures": 0, "inconclusive": 0}
    opts = _opts(args)
    workers = _workers()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(_compare_all, suite, [opts] * len(suite), chunksize=4))
    else:
        reports = [_compare_all(inst, opts) for inst in suite]
    for inst, rep in zip(suite, reports):
        totals["points"] += len(rep.points)
        totals["disagreements"] += rep.disagreements
        totals["check_failures"] += rep.check_failures
        totals["inconclusive"] += rep.inconclusive
        for p in rep.points:
            if p.failures or any(ok is False for ok in p.agreement.values()):
                print(f"{inst.id}/{p.name}: failures={p.failures} agreement={p.agreement}", file=sys.stderr)
    print(json.dumps(totals, indent=2, sort_keys=True))
    if totals["disagreements"] or totals["check_failures"]:
        return 2
    return 3 if totals["inconclusive"] else 0


def cmd_gallery(args) -> int:
    insts = harness.gallery()
    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
        for inst in insts:
            with open(os.path.join(args.emit, f"{inst.id}.json"), "w", encoding="utf-8") as fh:
                fh.write(harness.serialize_instance(inst))
        print(f"wrote {len(insts)} instances to {args.emit}")
        return 0
    code = 0
    for inst in insts:
        rep = harness.compare(inst, harness.ENGINES, _opts(args))
        code = max(code, rep.exit_code())
        for p in rep.points:
            a = p.results["analytic"]
            print(f"{inst.id:10s} {p.name:12s} {a.level:28s} {a.certificate:14s} {a.confidence}")
    return code


def _parse_direction(text: str, sympl) -> np.ndarray:
    data = json.loads(text)
    if sympl.kind == "torus":
        return np.asarray(data, dtype=float).reshape(-1)
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3:
        arr = arr[..., 0] + 1j * arr[..., 1]
    return momentum.as_hermitian(sympl.rep, arr)


def cmd_weights(args) -> int:
    inst = _instance(args.file)
    sympl = inst.symplectization()
    s = _parse_direction(args.s, sympl)
    out = {}
    for name, v in inst.points.items():
        if args.point and name != args.point:
            continue
        lam = momentum.maximal_weight(sympl, s, v)
        lim = momentum.limit_point(sympl, s, v)
        out[name] = {
            "maximal_weight": harness._round(lam),
            "energy": harness._round(momentum.energy(sympl, s, v)),
            "psi": {str(t): harness._round(momentum.kempf_ness(sympl, s, t, v)) for t in (0.5, 1.0, 2.0, 5.0, 10.0)},
            "limit_point": None if lim is None else [[harness._round(z.real), harness._round(z.imag)] for z in lim],
        }
    print(json.dumps({"instance": inst.id, "points": out}, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symplstab", description="Stability of linear torus and GL(r) actions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, flow_opts=True):
        sp.add_argument("--budget", type=int, default=stability.DEFAULT_BUDGET, help="random frames for gl")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timings", action="store_true", help="include wall times (not byte-stable)")
        if flow_opts:
            sp.add_argument("--tol", type=float, default=flow.DEFAULT_TOL)
            sp.add_argument("--max-iter", type=int, default=flow.DEFAULT_MAX_ITER)

    sp = sub.add_parser("analyze", help="run one engine or all of them on an instance file")
    sp.add_argument("file")
    sp.add_argument("--engine", choices=[*harness.ENGINES, "all"], default="all")
    sp.add_argument("--point")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("compare", help="cross-check engines on an instance file")
    sp.add_argument("file")
    sp.add_argument("--engines", nargs="+", default=list(harness.ENGINES))
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("flow", help="run the descent on every point")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("random", help="generate (and optionally run) a seeded suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--kind", choices=["torus", "gl"], default="torus")
    sp.add_argument("--k", type=int, default=3, help="rank bound")
    sp.add_argument("--n", type=int, default=6, help="dimension bound (torus)")
    sp.add_argument("--bound", type=int, default=5, help="weight bound (torus)")
    sp.add_argument("--tau-set", type=float, nargs="+", default=[-1.0, 0.0, 1.0])
    sp.add_argument("--emit", metavar="DIR")
    sp.add_argument("--run", action="store_true", help="compare all engines and print totals")
    sp.add_argument("--budget", type=int, default=stability.DEFAULT_BUDGET)
    sp.add_argument("--tol", type=float, default=flow.DEFAULT_TOL)
    sp.add_argument("--max-iter", type=int, default=flow.DEFAULT_MAX_ITER)
    sp.set_defaults(func=cmd_random, timings=False)

    sp = sub.add_parser("gallery", help="classify or emit the built-in instances")
    sp.add_argument("--emit", metavar="DIR")
    common(sp)
    sp.set_defaults(func=cmd_gallery)

    sp = sub.add_parser("weights", help="maximal weight, Psi samples and limit point along s")
    sp.add_argument("file")
    sp.add_argument("--s", required=True, help="JSON direction: k reals, or an r x r (Hermitian) matrix")
    sp.add_argument("--point")
    sp.set_defaults(func=cmd_weights)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (harness.InstanceError, momentum.IndeterminateSupportError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
