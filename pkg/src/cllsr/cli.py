"""Command line interface: ``cllsr {run,sweep,eval,heatmap,trace-export,synth}``.

Solver settings come from ``--config FILE`` (``key = value`` lines using the
flag names, e.g. ``lambda = 100`` or ``eps-inner = 1e-4``) and are
overridden by explicit flags.
"""
import argparse
import logging
import os
import sys

from .aqp import ConvergenceTrace, SolverConfig
from .data import read_keyvalue, read_labels, read_matrix, save_dataset, synthesize_dataset
from .errors import CLLSRError
from .experiment import (ExperimentConfig, SweepGrid, default_threads, parameter_sweep,
                         run_experiment)
from .initialization import InitConfig
from .metrics import METRICS, MetricReport, evaluate
from .visualize import HEATMAP_THRESHOLD, emit_convergence, emit_heatmap

# flag name -> (SolverConfig field, type)
SOLVER_FLAGS = {
    "lambda": ("lam", float),
    "k1": ("k1", int),
    "k2": ("k2", int),
    "sigma0": ("sigma0", float),
    "rho": ("rho", float),
    "eps-inner": ("eps_inner", float),
    "eps-outer": ("eps_outer", float),
    "max-outer": ("max_outer", int),
    "max-inner": ("max_inner", int),
}
RUN_FLAGS = {
    "data": str, "out": str, "seed": int, "repeats": int, "threads": int,
    "clusters": int, "restarts": int, "kappa": int,
}


def _add_common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--data", help="dataset manifest")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--clusters", type=int, help="number of clusters (default: from labels)")
    p.add_argument("--restarts", type=int, help="k-means restarts")
    p.add_argument("--kappa", type=int, help="neighbours in the initial kNN graph")
    for flag, (_, typ) in SOLVER_FLAGS.items():
        p.add_argument(f"--{flag}", type=typ, dest=flag.replace("-", "_"))


def _settings(args):
    """Merge config file values with command-line flags (flags win)."""
    merged = {}
    if getattr(args, "config", None):
        for key, value in read_keyvalue(args.config).items():
            merged[key.replace("_", "-")] = value
    for flag in list(SOLVER_FLAGS) + list(RUN_FLAGS):
        value = getattr(args, flag.replace("-", "_"), None)
        if value is not None:
            merged[flag] = value
    return merged


def _experiment_config(settings, **extra) -> ExperimentConfig:
    solver = {}
    for flag, (name, typ) in SOLVER_FLAGS.items():
        if flag in settings:
            solver[name] = typ(settings[flag])
    if "kappa" in settings:
        solver["init"] = InitConfig(kappa=int(settings["kappa"]))
    return ExperimentConfig(
        data=settings.get("data"),
        solver=SolverConfig(**solver),
        repeats=int(settings.get("repeats", 1)),
        out=settings.get("out"),
        seed=int(settings.get("seed", 0)),
        n_clusters=int(settings["clusters"]) if "clusters" in settings else None,
        restarts=int(settings.get("restarts", 20)),
        threads=int(settings.get("threads", default_threads())),
        **extra,
    )


def _split(text, typ):
    return [typ(t) for t in str(text).replace(";", ",").split(",") if t.strip()]


def cmd_run(args):
    settings = _settings(args)
    cfg = _experiment_config(settings, heatmap=args.heatmap, trace=args.trace)
    result = run_experiment(cfg)
    if result.report is not None:
        print(result.report.summary())
    if not result.trace.converged:
        print("warning: outer iterations exhausted before convergence", file=sys.stderr)
    return 0


def cmd_sweep(args):
    settings = _settings(args)
    cfg = _experiment_config(settings)
    grid = SweepGrid(
        lambdas=_split(args.grid_lambda or settings.get("grid-lambda", "0.1,1,10,100,1000"), float),
        k1s=_split(args.grid_k1 or settings.get("grid-k1", "5,10,20,30"), int),
        k2s=_split(args.grid_k2 or settings.get("grid-k2", "10x,20x,30x,40x"), str),
    )
    path = None
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, "sweep.csv")
    rows = parameter_sweep(cfg, grid, path=path)
    for row in rows:
        metrics = " ".join(f"{m}={row[m + '_mean']:.4f}" for m in METRICS if f"{m}_mean" in row)
        print(f"lambda={row['lambda']:g} k1={row['k1']} k2={row['k2']} {row['status']} {metrics or row['reason']}")
    return 1 if any(r["status"] == "failed" for r in rows) else 0


def cmd_eval(args):
    scores = evaluate(read_labels(args.pred), read_labels(args.truth))
    for m in METRICS:
        print(f"{m.upper()}: {scores[m]:.4f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        MetricReport.from_runs([scores]).to_csv(os.path.join(args.out, "report.csv"))
    return 0


def cmd_heatmap(args):
    emit_heatmap(read_matrix(args.matrix), args.threshold, args.out)
    return 0


def cmd_trace_export(args):
    pof, oef = emit_convergence(ConvergenceTrace.from_csv(args.trace), args.out)
    print(pof)
    print(oef)
    return 0


def cmd_synth(args):
    ds = synthesize_dataset(args.clusters, args.per_cluster, args.views, args.noise, args.seed)
    print(save_dataset(ds, args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cllsr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve, cluster and score a dataset")
    _add_common(p)
    p.add_argument("--heatmap", action="store_true", help="write consensus.csv and heatmap.pgm")
    p.add_argument("--trace", action="store_true", help="write trace.csv, pof.csv, oef.csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid over (lambda, k1, k2)")
    _add_common(p)
    p.add_argument("--grid-lambda")
    p.add_argument("--grid-k1")
    p.add_argument("--grid-k2", help="values or multiples of the cluster count, e.g. 10x,20x")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("heatmap", help="render a matrix file as a PGM heatmap")
    p.add_argument("--matrix", required=True)
    p.add_argument("--threshold", type=float, default=HEATMAP_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("trace-export", help="split a trace into POF/OEF series")
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trace_export)

    p = sub.add_parser("synth", help="write a synthetic multiview dataset")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--per-cluster", type=int, default=50)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLLSRError, ValueError, OSError) as exc:
        print(f"cllsr: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
