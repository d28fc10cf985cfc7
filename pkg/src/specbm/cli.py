"""Command-line interface.

Subcommands:

* generate    draw one graph from a built-in design and emit its edge list
* cluster     cluster one graph file and emit 1-based labels
* tune-tau    scan the tau grid on one graph and emit the tau,Q trace
* experiment  run a Monte-Carlo batch and emit the records CSV
* table       aggregate record CSVs into a comparison table

A config file (flat key=value lines mirroring the long flags) can prefill
any experiment flag; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import sys

from .clustering import KMeansConfig, spectral_cluster
from .errors import SpecbmError
from .experiments import (
    ExperimentConfig,
    read_records,
    run_experiment,
    summarize_records,
    table_rows,
    with_tau_mode,
    write_records,
)
from .graphgen import (
    RngSeed,
    dgp_preset,
    read_edge_list,
    sample_adjacency,
    sampling_prob_matrix,
    write_edge_list,
)
from .laplacian import degrees
from .tau import adaptive_cluster, estimate_theta, select_tau, write_trace

TAU_WORDS = {"grid": "grid_scan", "jy": "jy_select", "dbar": "dbar", "dbar4": "dbar_over_4"}


def _parse_tau(value: str):
    """'grid'|'jy'|'dbar'|'dbar4' or a positive float; returns (mode, value)."""
    if value in TAU_WORDS:
        return TAU_WORDS[value], None
    try:
        tau = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--tau must be grid, jy, dbar, dbar4, or a positive number, got {value!r}"
        )
    if not tau > 0:
        raise argparse.ArgumentTypeError(f"--tau must be positive, got {value!r}")
    return "fixed", tau


def _parse_variant(value: str) -> str:
    v = value.replace("-", "_")
    if v not in ("plain", "tau", "tau_prime", "tau_dprime", "adaptive"):
        raise argparse.ArgumentTypeError(f"unknown variant {value!r}")
    return v


def _add_design_flags(p, with_reps: bool):
    p.add_argument("--dgp", type=int, choices=(1, 2, 3, 4), help="built-in design")
    p.add_argument("--model", help="custom model file (overrides --dgp)")
    p.add_argument("--n-per-k", type=int, default=200, help="nodes per community")
    if with_reps:
        p.add_argument("--reps", type=int, default=500, help="replication count")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--rep", type=int, default=0, help="replication stream index")


def _generate_graph(args):
    rng = RngSeed(args.seed, args.rep).generator()
    if args.model:
        from .experiments import load_model_file

        model, membership = load_model_file(args.model)
    else:
        if args.dgp is None:
            raise SystemExit("one of --dgp or --model is required")
        needs_theta = args.dgp in (3, 4)
        model, membership = dgp_preset(args.dgp, args.n_per_k, seed=rng if needs_theta else None)
    A = sample_adjacency(sampling_prob_matrix(model, membership), rng)
    return A, model, membership, rng


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _cmd_generate(args) -> int:
    A, model, membership, _ = _generate_graph(args)
    out, close = _open_out(args.out)
    try:
        write_edge_list(A, out)
    finally:
        if close:
            out.close()
    if args.truth_out:
        with open(args.truth_out, "w") as fh:
            for g in membership.labels:
                fh.write(f"{g}\n")
    return 0


def _resolve_cluster(A, K, variant, mode, fixed, algo, restarts, max_iter, rng):
    """Shared by cluster/tune-tau: returns (labels, tau_used)."""
    cfg = KMeansConfig(restarts=restarts, max_iter=max_iter)
    if variant == "adaptive":
        ad = adaptive_cluster(A, K, seed=rng, algo=algo, config=cfg)
        return ad.labels, ad.sel2.tau_star
    if variant == "plain":
        result = spectral_cluster(A, K, variant="plain", tau=0.0, algo=algo, config=cfg, seed=rng)
        return result.labels, 0.0
    theta_hat = None
    if variant == "tau_dprime":
        if mode == "jy_select":
            sel1 = select_tau(A, K, variant="tau_prime", algo=algo, seed=rng, config=cfg)
            stage_labels = sel1.best_result.labels
        else:
            d_bar = degrees(A).d_bar
            tau1 = {"dbar": d_bar, "dbar_over_4": d_bar / 4.0, "grid_scan": d_bar}.get(mode, fixed)
            stage = spectral_cluster(A, K, variant="tau_prime", tau=float(tau1), algo=algo, config=cfg, seed=rng)
            stage_labels = stage.labels
        theta_hat = estimate_theta(A, stage_labels, K)
    if mode == "jy_select":
        sel = select_tau(A, K, variant=variant, algo=algo, seed=rng, config=cfg, theta_hat=theta_hat)
        return sel.best_result.labels, sel.tau_star
    if mode == "grid_scan":
        raise SystemExit("--tau grid emits a trace; use the tune-tau subcommand")
    d_bar = degrees(A).d_bar
    tau = {"dbar": d_bar, "dbar_over_4": d_bar / 4.0}.get(mode, fixed)
    result = spectral_cluster(A, K, variant=variant, tau=float(tau), algo=algo, config=cfg, seed=rng)
    return result.labels, float(tau)


def _cmd_cluster(args) -> int:
    A = read_edge_list(args.graph)
    mode, fixed = args.tau
    rng = RngSeed(args.seed, args.rep).generator()
    labels, tau_used = _resolve_cluster(
        A, args.k, args.variant, mode, fixed, args.algo, args.restarts, args.max_iter, rng
    )
    out, close = _open_out(args.out)
    try:
        for g in labels:
            out.write(f"{g}\n")
    finally:
        if close:
            out.close()
    print(f"tau={tau_used!r}", file=sys.stderr)
    return 0


def _cmd_tune_tau(args) -> int:
    if args.graph:
        A = read_edge_list(args.graph)
        rng = RngSeed(args.seed, args.rep).generator()
    else:
        A, _, _, rng = _generate_graph(args)
    cfg = KMeansConfig(restarts=args.restarts, max_iter=args.max_iter)
    theta_hat = None
    if args.variant == "tau_dprime":
        sel1 = select_tau(A, args.k, variant="tau_prime", algo=args.algo, seed=rng, config=cfg)
        theta_hat = estimate_theta(A, sel1.best_result.labels, args.k)
    sel = select_tau(A, args.k, variant=args.variant, algo=args.algo, seed=rng, config=cfg, theta_hat=theta_hat)
    if args.out:
        write_trace(sel.grid, sel.qs, args.out)
    print(f"tau_star={sel.tau_star!r}")
    return 0


CONFIG_KEYS = {
    "dgp": int,
    "model": str,
    "n-per-k": int,
    "reps": int,
    "seed": int,
    "variant": str,
    "algo": str,
    "tau": str,
    "restarts": int,
    "max-iter": int,
    "workers": int,
    "timing": lambda v: v.lower() in ("1", "true", "yes"),
    "out": str,
}


def _load_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"config file: expected key=value, got {line!r}")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise SystemExit(f"config file: unknown key {key!r}")
            values[key.replace("-", "_")] = CONFIG_KEYS[key](raw)
    return values


EXPERIMENT_DEFAULTS = {
    "dgp": None,
    "model": None,
    "n_per_k": 200,
    "reps": 500,
    "seed": 0,
    "variant": "tau",
    "algo": "modified",
    "tau": "jy",
    "restarts": 10,
    "max_iter": 300,
    "workers": 1,
    "timing": False,
    "out": None,
}


def _cmd_experiment(args) -> int:
    # flags win, then the config file, then the hard defaults
    file_values = _load_config_file(args.config) if args.config else {}

    def pick(dest):
        flag = getattr(args, dest)
        if flag is not None:
            return flag
        if dest in file_values:
            return file_values[dest]
        return EXPERIMENT_DEFAULTS[dest]

    variants = tuple(_parse_variant(v) for v in str(pick("variant")).split(","))
    tau_arg = pick("tau")
    mode, fixed = _parse_tau(str(tau_arg))
    model = pick("model")
    dgp = model if model else pick("dgp")
    if dgp is None:
        raise SystemExit("one of --dgp or --model is required")
    config = ExperimentConfig(
        dgp=dgp,
        n_per_community=pick("n_per_k"),
        reps=pick("reps"),
        seed=pick("seed"),
        variants=variants,
        algo=pick("algo"),
        tau_mode=mode,
        tau_value=fixed,
        restarts=pick("restarts"),
        max_iter=pick("max_iter"),
        workers=pick("workers"),
        timing=bool(pick("timing")),
    )
    records = run_experiment(config)
    out = pick("out")
    if out:
        write_records(records, out)
    for row in summarize_records(records):
        print(
            f"dgp={row['dgp']} n={row['n']} variant={row['variant']} algo={row['algo']} "
            f"mode={row['tau_mode']} included={row['included']}/{row['records']} "
            f"ccp={row['mean_ccp']:.4f} nmi={row['mean_nmi']:.4f}"
        )
    return 0


def _cmd_table(args) -> int:
    files = args.infile or []
    if not files:
        raise SystemExit("table needs at least one --in FILE")
    modes = args.mode or []
    if len(modes) < len(files):
        modes = modes + [f"col{i + 1}" for i in range(len(modes), len(files))]
    by_mode = {}
    for path, mode in zip(files, modes):
        by_mode[mode] = with_tau_mode(read_records(path), mode)
    rows = table_rows(by_mode)
    headers = ["dgp", "n"]
    for mode in by_mode:
        headers += [f"{mode}_ccp", f"{mode}_nmi"]
    widths = [max(len(h), 10) for h in headers]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for row in rows:
        cells = [str(row["dgp"]), str(row["n"])]
        for mode in by_mode:
            cells += [f"{row[f'{mode}_ccp']:.4f}", f"{row[f'{mode}_nmi']:.4f}"]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(",".join(headers) + "\n")
            for row in rows:
                cells = [str(row["dgp"]), str(row["n"])]
                for mode in by_mode:
                    cells += [repr(row[f"{mode}_ccp"]), repr(row[f"{mode}_nmi"])]
                fh.write(",".join(cells) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specbm",
        description="Spectral clustering of (regularized, degree-corrected) block models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="draw one graph and emit its edge list")
    _add_design_flags(p_gen, with_reps=False)
    p_gen.add_argument("--out", default="-", help="edge list path ('-' = stdout)")
    p_gen.add_argument("--truth-out", help="also write the true labels here")
    p_gen.set_defaults(func=_cmd_generate)

    p_clu = sub.add_parser("cluster", help="cluster one graph file")
    p_clu.add_argument("--in", dest="graph", required=True, help="edge list file")
    p_clu.add_argument("--k", type=int, required=True, help="number of communities")
    p_clu.add_argument("--variant", type=_parse_variant, default="tau")
    p_clu.add_argument("--tau", type=_parse_tau, default=("jy_select", None))
    p_clu.add_argument("--algo", choices=("kmeans", "modified", "medoid"), default="modified")
    p_clu.add_argument("--seed", type=int, default=0)
    p_clu.add_argument("--rep", type=int, default=0)
    p_clu.add_argument("--restarts", type=int, default=50)
    p_clu.add_argument("--max-iter", type=int, default=300)
    p_clu.add_argument("--out", default="-", help="labels path ('-' = stdout)")
    p_clu.set_defaults(func=_cmd_cluster)

    p_tau = sub.add_parser("tune-tau", help="scan the tau grid, emit tau,Q trace")
    p_tau.add_argument("--in", dest="graph", help="edge list file (or use --dgp)")
    _add_design_flags(p_tau, with_reps=False)
    p_tau.add_argument("--k", type=int, required=True)
    p_tau.add_argument("--variant", type=_parse_variant, default="tau")
    p_tau.add_argument("--algo", choices=("kmeans", "modified", "medoid"), default="modified")
    p_tau.add_argument("--restarts", type=int, default=10)
    p_tau.add_argument("--max-iter", type=int, default=300)
    p_tau.add_argument("--out", help="trace CSV path")
    p_tau.set_defaults(func=_cmd_tune_tau)

    p_exp = sub.add_parser("experiment", help="run a Monte-Carlo batch")
    p_exp.add_argument("--config", help="key=value file prefilling these flags")
    _add_design_flags(p_exp, with_reps=True)
    p_exp.add_argument("--variant", help="comma-separated variant list")
    p_exp.add_argument("--algo", choices=("kmeans", "modified", "medoid"))
    p_exp.add_argument("--tau", help="grid | jy | dbar | dbar4 | positive float")
    p_exp.add_argument("--restarts", type=int)
    p_exp.add_argument("--max-iter", type=int)
    p_exp.add_argument("--workers", type=int)
    p_exp.add_argument(
        "--timing", action="store_const", const=True, default=None,
        help="record wall time per record",
    )
    p_exp.add_argument("--out", help="records CSV path")
    # None defaults let a config file fill any flag the user leaves out
    p_exp.set_defaults(n_per_k=None, reps=None, seed=None, func=_cmd_experiment)

    p_tab = sub.add_parser("table", help="aggregate record CSVs")
    p_tab.add_argument("--in", dest="infile", action="append", help="records CSV (repeatable)")
    p_tab.add_argument("--mode", action="append", help="column name for the matching --in")
    p_tab.add_argument("--out", help="write the table as CSV here too")
    p_tab.set_defaults(func=_cmd_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecbmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
