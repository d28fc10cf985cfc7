"""Monte-Carlo harness: replications, records, CSV round-trip, summaries.

Each replication r draws its graph (and, for the degree-corrected designs,
its theta) from an independent counter-based stream (master seed, r), then
runs the configured pipelines. One random stream is threaded through the
whole replication in a fixed order, so a record is a pure function of
(config, rep_index) and batches are byte-identical however they are
scheduled across workers.

Per-record failures (zero-degree node under the plain variant, an empty
cluster, a degenerate grid) mark the record excluded with metrics omitted;
they never abort the batch.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from math import isnan, nan
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .clustering import KMeansConfig, spectral_cluster
from .errors import MissingCell, SpecbmError
from .graphgen import RngSeed, dgp_preset, sample_adjacency, sampling_prob_matrix
from .laplacian import degrees
from .metrics import ccp as ccp_metric
from .metrics import nmi as nmi_metric
from .sbm import BlockModel, Membership
from .tau import adaptive_cluster, estimate_theta, select_tau, tau_grid

TAU_MODES = ("grid_scan", "jy_select", "fixed", "dbar", "dbar_over_4")

VARIANT_CHOICES = ("plain", "tau", "tau_prime", "tau_dprime", "adaptive")

CSV_HEADER = "rep,dgp,n,K,variant,algo,tau,ccp,nmi,excluded,runtime_ms"


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo cell: design, pipeline, and schedule.

    dgp is 1..4 for the built-in designs or a path to a model file (see
    load_model_file). tau_value is only read when tau_mode='fixed'.
    restarts/max_iter configure the clustering step (the harness default of
    10 restarts keeps batch runtimes reasonable; the library-level default
    is 50). timing=False writes runtime_ms as 0.0 so batches stay
    byte-identical across schedules.
    """

    dgp: Union[int, str]
    n_per_community: int
    reps: int
    seed: int
    variants: Tuple[str, ...] = ("tau",)
    algo: str = "modified"
    tau_mode: str = "jy_select"
    tau_value: Optional[float] = None
    restarts: int = 10
    max_iter: int = 300
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if isinstance(self.dgp, int) and self.dgp not in (1, 2, 3, 4):
            raise ValueError("dgp must be 1..4 or a model file path")
        for v in self.variants:
            if v not in VARIANT_CHOICES:
                raise ValueError(f"unknown variant {v!r}, expected one of {VARIANT_CHOICES}")
        if self.algo not in ("kmeans", "modified", "medoid"):
            raise ValueError(f"unknown algo {self.algo!r}")
        if self.tau_mode not in TAU_MODES:
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}, expected one of {TAU_MODES}")
        if self.tau_mode == "fixed":
            if self.tau_value is None or not self.tau_value > 0:
                raise ValueError("tau_mode='fixed' needs tau_value > 0")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class ExperimentRecord:
    """One pipeline outcome. ccp/nmi are nan when excluded=1.

    tau_mode is carried in memory for grouping but is not part of the CSV
    schema.
    """

    rep: int
    dgp: str
    n: int
    K: int
    variant: str
    algo: str
    tau: float
    ccp: float
    nmi: float
    excluded: int
    runtime_ms: float = 0.0
    tau_mode: str = ""


def load_model_file(path: str) -> Tuple[BlockModel, Membership]:
    """Custom design from a flat text file.

    Keys: `K=3`, `sizes=50,50,50`, `B=0.5,0.1;0.1,0.5` (rows separated by
    ';'), optional `theta=...` (one entry per node). Blank lines and `#`
    comments are ignored.
    """
    fields = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip()
    missing = {"K", "sizes", "B"} - set(fields)
    if missing:
        raise ValueError(f"model file is missing keys: {sorted(missing)}")
    K = int(fields["K"])
    sizes = np.array([int(s) for s in fields["sizes"].split(",")])
    B = np.array([[float(x) for x in row.split(",")] for row in fields["B"].split(";")])
    theta = None
    if "theta" in fields:
        theta = np.array([float(x) for x in fields["theta"].split(",")])
    model = BlockModel(K=K, B=B, sizes=sizes, theta=theta)
    return model, Membership.from_sizes(sizes)


def _resolve_model(config: ExperimentConfig, rng) -> Tuple[BlockModel, Membership]:
    if isinstance(config.dgp, str):
        return load_model_file(config.dgp)
    needs_theta = config.dgp in (3, 4)
    return dgp_preset(config.dgp, config.n_per_community, seed=rng if needs_theta else None)


def _kmeans_config(config: ExperimentConfig) -> KMeansConfig:
    return KMeansConfig(restarts=config.restarts, max_iter=config.max_iter)


def _record(config, rep_index, model, variant, tau, labels, truth, elapsed) -> ExperimentRecord:
    return ExperimentRecord(
        rep=rep_index,
        dgp=str(config.dgp),
        n=model.n,
        K=model.K,
        variant=variant,
        algo=config.algo,
        tau=float(tau),
        ccp=ccp_metric(labels, truth, model.K),
        nmi=nmi_metric(labels, truth, model.K),
        excluded=0,
        runtime_ms=elapsed * 1000.0 if config.timing else 0.0,
        tau_mode=config.tau_mode,
    )


def _excluded(config, rep_index, model, variant, tau) -> ExperimentRecord:
    return ExperimentRecord(
        rep=rep_index,
        dgp=str(config.dgp),
        n=model.n,
        K=model.K,
        variant=variant,
        algo=config.algo,
        tau=float(tau),
        ccp=nan,
        nmi=nan,
        excluded=1,
        runtime_ms=0.0,
        tau_mode=config.tau_mode,
    )


def _theta_for_dprime(config, A, K, kcfg, rng):
    """Bootstrap degree-correction estimates from a tau_prime pass.

    The tau_prime stage runs at the same tau_mode (grid_scan falls back to
    the average degree, since a scan has no single tau).
    """
    if config.tau_mode == "jy_select":
        sel = select_tau(A, K, variant="tau_prime", algo=config.algo, seed=rng, config=kcfg)
        return estimate_theta(A, sel.best_result.labels, K)
    d_bar = degrees(A).d_bar
    if config.tau_mode == "dbar" or config.tau_mode == "grid_scan":
        tau1 = d_bar
    elif config.tau_mode == "dbar_over_4":
        tau1 = d_bar / 4.0
    else:
        tau1 = float(config.tau_value)
    stage = spectral_cluster(A, K, variant="tau_prime", tau=tau1, algo=config.algo, config=kcfg, seed=rng)
    return estimate_theta(A, stage.labels, K)


def _run_variant(config, rep_index, model, truth, A, variant, rng):
    kcfg = _kmeans_config(config)
    K = model.K
    records = []
    t0 = time.perf_counter()
    try:
        if variant == "plain":
            result = spectral_cluster(A, K, variant="plain", tau=0.0, algo=config.algo, config=kcfg, seed=rng)
            records.append(_record(config, rep_index, model, variant, 0.0, result.labels, truth, time.perf_counter() - t0))
        elif variant == "adaptive":
            ad = adaptive_cluster(A, K, seed=rng, algo=config.algo, config=kcfg)
            records.append(_record(config, rep_index, model, variant, ad.sel2.tau_star, ad.labels, truth, time.perf_counter() - t0))
        else:
            theta_hat = None
            if variant == "tau_dprime":
                theta_hat = _theta_for_dprime(config, A, K, kcfg, rng)
            if config.tau_mode == "grid_scan":
                grid = tau_grid(degrees(A).d_bar)
                for tau in grid.values:
                    t1 = time.perf_counter()
                    try:
                        result = spectral_cluster(
                            A, K, variant=variant, tau=float(tau), algo=config.algo,
                            config=kcfg, seed=rng, theta_hat=theta_hat,
                        )
                        records.append(_record(config, rep_index, model, variant, tau, result.labels, truth, time.perf_counter() - t1))
                    except SpecbmError:
                        records.append(_excluded(config, rep_index, model, variant, tau))
            elif config.tau_mode == "jy_select":
                sel = select_tau(A, K, variant=variant, algo=config.algo, seed=rng, config=kcfg, theta_hat=theta_hat)
                records.append(_record(config, rep_index, model, variant, sel.tau_star, sel.best_result.labels, truth, time.perf_counter() - t0))
            else:
                d_bar = degrees(A).d_bar
                if config.tau_mode == "dbar":
                    tau = d_bar
                elif config.tau_mode == "dbar_over_4":
                    tau = d_bar / 4.0
                else:
                    tau = float(config.tau_value)
                result = spectral_cluster(A, K, variant=variant, tau=tau, algo=config.algo, config=kcfg, seed=rng, theta_hat=theta_hat)
                records.append(_record(config, rep_index, model, variant, tau, result.labels, truth, time.perf_counter() - t0))
    except SpecbmError:
        records.append(_excluded(config, rep_index, model, variant, 0.0 if variant == "plain" else nan))
    return records


def run_replication(config: ExperimentConfig, rep_index: int):
    """All records for replication rep_index (a list; grid_scan and
    multi-variant configs produce several)."""
    rng = RngSeed(config.seed, rep_index).generator()
    model, membership = _resolve_model(config, rng)
    A = sample_adjacency(sampling_prob_matrix(model, membership), rng)
    truth = membership.labels
    records = []
    for variant in config.variants:
        records.extend(_run_variant(config, rep_index, model, truth, A, variant, rng))
    return records


def run_experiment(config: ExperimentConfig):
    """All replications, flattened in replication order."""
    if config.workers <= 1:
        batches = [run_replication(config, r) for r in range(config.reps)]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            batches = list(pool.map(partial(run_replication, config), range(config.reps)))
    return [record for batch in batches for record in batch]


def _format_cell(value: float) -> str:
    return "" if isnan(value) else repr(float(value))


def write_records(records: Sequence[ExperimentRecord], path) -> None:
    """CSV with the fixed schema; nan fields are written empty."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.rep},{r.dgp},{r.n},{r.K},{r.variant},{r.algo},"
                f"{_format_cell(r.tau)},{_format_cell(r.ccp)},{_format_cell(r.nmi)},"
                f"{r.excluded},{repr(float(r.runtime_ms))}\n"
            )


def read_records(path) -> list:
    """Inverse of write_records (tau_mode is not persisted and reads back empty)."""
    records = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 11:
                raise ValueError(f"expected 11 fields, got {len(parts)}: {line!r}")
            rep, dgp, n, K, variant, algo, tau, ccp_s, nmi_s, excluded, rt = parts
            records.append(
                ExperimentRecord(
                    rep=int(rep),
                    dgp=dgp,
                    n=int(n),
                    K=int(K),
                    variant=variant,
                    algo=algo,
                    tau=float(tau) if tau else nan,
                    ccp=float(ccp_s) if ccp_s else nan,
                    nmi=float(nmi_s) if nmi_s else nan,
                    excluded=int(excluded),
                    runtime_ms=float(rt),
                )
            )
    return records


def summarize_records(records: Sequence[ExperimentRecord]):
    """Per-cell means over included records.

    Cells are keyed by (dgp, n, K, variant, algo, tau_mode); each summary
    row reports the record count, the included count, mean ccp/nmi/tau over
    included records (nan when none), and the included fraction (the
    strictly-positive-degree Ratio when the variant is plain).
    """
    groups = {}
    for r in records:
        key = (r.dgp, r.n, r.K, r.variant, r.algo, r.tau_mode)
        groups.setdefault(key, []).append(r)
    rows = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        recs = groups[key]
        included = [r for r in recs if not r.excluded]
        rows.append(
            {
                "dgp": key[0],
                "n": key[1],
                "K": key[2],
                "variant": key[3],
                "algo": key[4],
                "tau_mode": key[5],
                "records": len(recs),
                "included": len(included),
                "ratio_included": len(included) / len(recs),
                "mean_ccp": float(np.mean([r.ccp for r in included])) if included else nan,
                "mean_nmi": float(np.mean([r.nmi for r in included])) if included else nan,
                "mean_tau": float(np.mean([r.tau for r in included])) if included else nan,
            }
        )
    return rows


def table_rows(records_by_mode: dict):
    """Cross-tab for the comparison table: one row per (dgp, n), one
    (ccp, nmi) column pair per mode.

    records_by_mode maps a column name to a record list. Raises MissingCell
    when a (dgp, n) pair present in one column has no included records in
    another.
    """
    cells = {}
    keys = set()
    for mode, records in records_by_mode.items():
        for row in summarize_records(records):
            cell_key = (row["dgp"], row["n"])
            keys.add(cell_key)
            cells[(mode, cell_key)] = row
    rows = []
    for cell_key in sorted(keys, key=lambda k: (str(k[0]), k[1])):
        line = {"dgp": cell_key[0], "n": cell_key[1]}
        for mode in records_by_mode:
            row = cells.get((mode, cell_key))
            if row is None or not row["included"]:
                raise MissingCell(f"no records for dgp={cell_key[0]} n={cell_key[1]} in column {mode!r}")
            line[f"{mode}_ccp"] = row["mean_ccp"]
            line[f"{mode}_nmi"] = row["mean_nmi"]
        rows.append(line)
    return rows


def with_tau_mode(records: Sequence[ExperimentRecord], tau_mode: str):
    """Copies of records with tau_mode set (used after read_records)."""
    return [replace(r, tau_mode=tau_mode) for r in records]
