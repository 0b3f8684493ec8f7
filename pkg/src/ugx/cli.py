"""Command-line entry point: ``ugx <subcommand> ...``.

Exit codes: 0 success, 1 input error, 2 numerical or invariant error,
3 rounding outcome failed the size gate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .emd import avg_emd, emd_rows
from .errors import GenerationError, InputError, InvariantError, NumericalError, UGXError
from .experiment import ExperimentConfig, rows_to_csv, run_experiment
from .graphs import gen_random_regular, graph_from_json, graph_to_json, spectral_report
from .instances import assignment_to_json, gen_planted, parse_instance, serialize_instance
from .normalize import normalize, verify_normalization
from .oracle import brute_force_opt
from .rounding import Rounder, RoundingParams
from .sdp_model import planted_mixture, solution_from_json, solution_to_json, verify_feasibility


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _load_inputs(args):
    inst = parse_instance(_read(args.instance))
    s = solution_from_json(_read(args.sdp))
    return inst, s


def cmd_gen(args):
    g = gen_random_regular(args.n, args.d, args.seed)
    inst, plant = gen_planted(g, args.k, args.noise, args.seed)
    s, _ = planted_mixture(inst, plant, args.mix, args.seed + 1)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "graph.json").write_text(graph_to_json(g))
    (out / "instance.json").write_text(serialize_instance(inst))
    (out / "plant.json").write_text(assignment_to_json(plant))
    (out / "sdp.json").write_text(solution_to_json(s))
    return 0


def cmd_spectral(args):
    if args.graph:
        g = graph_from_json(_read(args.graph))
    else:
        g = parse_instance(_read(args.instance)).graph
    _write(args.output, _dump(spectral_report(g).to_dict()))
    return 0


def cmd_verify_sdp(args):
    s = solution_from_json(_read(args.sdp))
    edges = parse_instance(_read(args.instance)).graph.edges if args.instance else None
    rep = verify_feasibility(s, args.tol, args.triple_budget, edges, args.seed)
    _write(args.output, _dump(rep.to_dict()))
    return 0


def cmd_normalize(args):
    s = solution_from_json(_read(args.sdp))
    ns = normalize(s, args.zero_tol, args.psd_tol)
    edges = parse_instance(_read(args.instance)).graph.edges if args.instance else None
    rep = verify_normalization(s, ns, args.tol, edges=edges)
    _write(args.out, ns.to_json())
    _write(args.report, _dump(rep.to_dict()))
    return 0


def cmd_emd(args):
    s = solution_from_json(_read(args.sdp))
    if args.avg:
        res = avg_emd(s, args.avg, args.pair_budget, args.seed)
        _write(args.output, _dump({"mean": res.mean, "stderr": res.stderr, "pairs": res.pairs, "exact": res.exact}))
        return 0
    if args.u is not None and args.v is not None:
        pairs = [(args.u, args.v)]
    else:
        pairs = [(u, v) for u in range(s.n) for v in range(s.n)]
    lines = ["u,v,emd"] + [f"{u},{v},{format(x, '.17g')}" for u, v, x in emd_rows(s, pairs)]
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_round(args):
    inst, s = _load_inputs(args)
    params = RoundingParams(R=args.R, seed=args.seed, trials=args.trials,
                            fallback="fixed" if args.mode == "derand" else args.fallback)
    rd = Rounder(inst, s, normalize(s))
    out = rd.derandomized(params) if args.mode == "derand" else rd.best_of(params)
    _write(args.output, _dump(out.to_dict()))
    return 3 if out.failed else 0


def cmd_monitor(args):
    inst, s = _load_inputs(args)
    params = RoundingParams(R=args.R, seed=args.seed)
    rep = Rounder(inst, s, normalize(s)).monitors(params, args.trials, args.vertex)
    lines = ["name,estimate,stderr,bound,pass"]
    for r in rep.rows:
        lines.append(f"{r.name},{r.estimate:.17g},{r.stderr:.17g},{r.bound:.17g},{'true' if r.passed else 'false'}")
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_brute(args):
    inst = parse_instance(_read(args.instance))
    res = brute_force_opt(inst, args.budget)
    _write(args.output, _dump({"labels": res.best.tolist(), "value": res.value, "enumerated": res.enumerated}))
    return 0


def cmd_experiment(args):
    cfg = ExperimentConfig(
        n=args.n, d=args.d, k=args.k,
        noise_grid=[float(x) for x in args.noise_grid.split(",")],
        R=args.R, plant_weight=args.mix, trials=args.trials, seed=args.seed,
        instances=args.instances, out_dir=args.out,
    )
    rows = run_experiment(cfg)
    _write(str(Path(cfg.out_dir) / "results.csv"), rows_to_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ugx", description="Propagation rounding for Unique Games on expanders.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write graph, planted instance, plant and SDP solution files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--mix", type=float, default=1.0, help="plant weight in the SDP mixture")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("spectral", help="lambda2, edge expansion and Cheeger audit")
    s.add_argument("--graph")
    s.add_argument("--instance", default="instance.json")
    s.add_argument("--output")
    s.set_defaults(func=cmd_spectral)

    v = sub.add_parser("verify-sdp", help="check SDP constraints")
    v.add_argument("--sdp", default="sdp.json")
    v.add_argument("--instance")
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--triple-budget", type=int, default=100_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify_sdp)

    nz = sub.add_parser("normalize", help="normalize an SDP solution")
    nz.add_argument("--sdp", default="sdp.json")
    nz.add_argument("--instance")
    nz.add_argument("--zero-tol", type=float, default=1e-12)
    nz.add_argument("--psd-tol", type=float, default=1e-8)
    nz.add_argument("--tol", type=float, default=1e-8)
    nz.add_argument("--out", default="normalized.json")
    nz.add_argument("--report")
    nz.set_defaults(func=cmd_normalize)

    e = sub.add_parser("emd", help="earthmover distances")
    e.add_argument("--sdp", default="sdp.json")
    e.add_argument("--u", type=int)
    e.add_argument("--v", type=int)
    e.add_argument("--avg", choices=["exact", "sampled"])
    e.add_argument("--pair-budget", type=int, default=10_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--output")
    e.set_defaults(func=cmd_emd)

    for name, func, help_ in (("round", cmd_round, "run the rounding algorithm"),
                              ("monitor", cmd_monitor, "Monte-Carlo lemma monitors as CSV")):
        r = sub.add_parser(name, help=help_)
        r.add_argument("--instance", default="instance.json")
        r.add_argument("--sdp", default="sdp.json")
        r.add_argument("--R", type=float, default=0.2)
        r.add_argument("--seed", type=int, default=0)
        r.add_argument("--output")
        if name == "round":
            r.add_argument("--mode", choices=["mc", "derand"], default="mc")
            r.add_argument("--trials", type=int, default=64)
            r.add_argument("--fallback", choices=["random", "fixed"], default="random")
        else:
            r.add_argument("--trials", type=int, default=1000)
            r.add_argument("--vertex", type=int, default=0)
        r.set_defaults(func=func)

    b = sub.add_parser("brute", help="exhaustive optimum for tiny instances")
    b.add_argument("--instance", default="instance.json")
    b.add_argument("--budget", type=int, default=10**7)
    b.add_argument("--output")
    b.set_defaults(func=cmd_brute)

    x = sub.add_parser("experiment", help="planted sweep written to results.csv")
    x.add_argument("--n", type=int, default=200)
    x.add_argument("--d", type=int, default=8)
    x.add_argument("--k", type=int, default=5)
    x.add_argument("--noise-grid", default="0")
    x.add_argument("--R", type=float, default=0.2)
    x.add_argument("--mix", type=float, default=0.95)
    x.add_argument("--trials", type=int, default=64)
    x.add_argument("--instances", type=int, default=1)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--out", default=".")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"ugx: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, InvariantError, GenerationError) as exc:
        print(f"ugx: error: {exc}", file=sys.stderr)
        return 2
    except UGXError as exc:
        print(f"ugx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
