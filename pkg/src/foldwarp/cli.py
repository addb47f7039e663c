"""Command-line driver.

Subcommands
-----------
estimate   replicate CSV -> estimator-set directory (optionally preprocessed)
simulate   synthetic scenario -> estimator-set directory + ground truth
cluster    estimators (from file or scenario) -> aligned k-medoids clustering
evaluate   predicted labels vs truth labels -> ARI / V-measure
sweep-k    total cost and silhouette over a range of cluster counts
bench      wall-clock comparison of the matrix-based and on-the-fly algorithms

Every randomized path is keyed to ``--seed``; when absent, a seed is drawn and
logged so any run can be replayed.  Exit codes by error family: 2 usage,
3 input parsing, 4 data validation, 5 configuration, 6 numeric degeneracy.
"""
from __future__ import annotations

import argparse
import secrets
import sys
import time as time_mod
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import ClusterConfig, ClusteringResult, cluster_classic, cluster_fast, silhouette
from .dataset import FoldChangeSet, validate_dataset
from .estimation import PreprocessOptions, estimate, preprocess
from .exceptions import (
    EmptyAfterFiltering,
    FoldwarpError,
    InconsistentTimeGrid,
    InvalidCombination,
    LengthMismatch,
    NonPositiveValue,
    NonPositiveVariance,
    ParseError,
    SchemaError,
    SingleCluster,
    StepTooLarge,
    ZeroNorm,
    ZeroVariance,
)
from . import fileio
from .scores import ari, v_measure
from .simulation import SCENARIO_CODES, ScenarioSpec, simulate
from .warping import WarpSpec, build_owd_ow

_EXIT_CODES = [
    ((SchemaError, ParseError, NonPositiveValue), 3),
    ((EmptyAfterFiltering, InconsistentTimeGrid, LengthMismatch), 4),
    ((InvalidCombination, StepTooLarge, SingleCluster, ValueError), 5),
    ((ZeroVariance, ZeroNorm, NonPositiveVariance), 6),
]


def _exit_code(exc: Exception) -> int:
    for types, code in _EXIT_CODES:
        if isinstance(exc, types):
            return code
    return 1


def _add_input_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", type=Path, default=None,
                        help="replicate CSV file or estimator-set directory")
    parser.add_argument("--scenario", choices=SCENARIO_CODES, default=None,
                        help="simulate this synthetic scenario instead of reading input")
    parser.add_argument("--n-entities", type=int, default=300,
                        help="entity count for --scenario (default 300)")
    parser.add_argument("--log-transform", action="store_true",
                        help="natural-log transform raw replicate values at ingestion")
    parser.add_argument("--scale-std", action="store_true",
                        help="scale estimators by their per-time standard deviation")
    parser.add_argument("--scale-norm", action="store_true",
                        help="scale estimators to unit norm (after --scale-std if both)")


def _add_warp_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--s-max", type=int, default=1,
                        help="largest warp step searched (default 1)")
    parser.add_argument("--lambda", dest="penalty_weight", type=float, default=0.0,
                        help="sign-penalty weight (default 0)")
    parser.add_argument("--normalize", dest="normalize", action=argparse.BooleanOptionalAction,
                        default=True,
                        help="divide dissimilarities by overlap length (default on)")


def _add_cluster_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=4, help="number of clusters")
    parser.add_argument("--n-init", type=int, default=50,
                        help="number of k-means++ initializations (default 50)")
    parser.add_argument("--it-max", type=int, default=100,
                        help="iteration cap per initialization (default 100)")
    parser.add_argument("--epsilon", type=float, default=1e-9,
                        help="total-cost improvement threshold (default 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foldwarp",
        description="Clustering with temporal alignment of Gaussian fold-change estimators.",
    )
    parser.add_argument("--version", action="version", version=f"foldwarp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate fold changes from a replicate CSV")
    _add_input_options(p_est)
    p_est.add_argument("--out-dir", type=Path, required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic estimator set")
    p_sim.add_argument("--scenario", choices=SCENARIO_CODES, required=True)
    p_sim.add_argument("--n-entities", type=int, default=300)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out-dir", type=Path, required=True)

    p_clu = sub.add_parser("cluster", help="joint clustering with alignment")
    _add_input_options(p_clu)
    _add_warp_options(p_clu)
    _add_cluster_options(p_clu)
    p_clu.add_argument("--seed", type=int, default=None)
    p_clu.add_argument("--truth", type=Path, default=None,
                       help="truth labels CSV for ARI/V-measure reporting")
    p_clu.add_argument("--figures", action="store_true",
                       help="also render per-cluster PNG panels")
    p_clu.add_argument("--out-dir", type=Path, required=True)

    p_eval = sub.add_parser("evaluate", help="score predicted labels against truth")
    p_eval.add_argument("--input", type=Path, required=True,
                        help="predicted labels CSV (entity,label columns)")
    p_eval.add_argument("--truth", type=Path, required=True)
    p_eval.add_argument("--out-dir", type=Path, default=None)

    p_swp = sub.add_parser("sweep-k", help="total cost and silhouette over a K range")
    _add_input_options(p_swp)
    _add_warp_options(p_swp)
    p_swp.add_argument("--k-min", type=int, default=2)
    p_swp.add_argument("--k-max", type=int, default=10)
    p_swp.add_argument("--n-init", type=int, default=50)
    p_swp.add_argument("--it-max", type=int, default=100)
    p_swp.add_argument("--epsilon", type=float, default=1e-9)
    p_swp.add_argument("--seed", type=int, default=None)
    p_swp.add_argument("--figures", action="store_true")
    p_swp.add_argument("--out-dir", type=Path, required=True)

    p_bch = sub.add_parser("bench", help="time matrix-based vs on-the-fly clustering")
    _add_input_options(p_bch)
    _add_warp_options(p_bch)
    _add_cluster_options(p_bch)
    p_bch.add_argument("--seed", type=int, default=None)
    p_bch.add_argument("--out-dir", type=Path, required=True)

    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = secrets.randbelow(2**32)
    print(f"no --seed given; using seed {seed}", file=sys.stderr)
    return seed


def _preprocess_options(args) -> PreprocessOptions:
    return PreprocessOptions(
        scale_by_std=getattr(args, "scale_std", False),
        scale_by_norm=getattr(args, "scale_norm", False),
    )


def _load_fold_changes(args, seed: int):
    """Resolve --input / --scenario into (estimator set, truth or None)."""
    if (args.input is None) == (args.scenario is None):
        raise InvalidCombination("provide exactly one of --input or --scenario")
    truth = None
    if args.scenario is not None:
        spec = ScenarioSpec.from_code(args.scenario, n_entities=args.n_entities, seed=seed)
        sim = simulate(spec)
        fcs, truth = sim.fcs, sim.truth
    elif args.input.is_dir():
        fcs = fileio.read_fold_change_set(args.input)
    else:
        dataset = validate_dataset(fileio.ingest_csv(args.input, log_transform=args.log_transform))
        fcs = estimate(dataset)
    fcs = preprocess(fcs, _preprocess_options(args))
    return fcs, truth


def _truth_for(fcs: FoldChangeSet, args, scenario_truth) -> np.ndarray | None:
    if getattr(args, "truth", None) is not None:
        entities, labels = fileio.read_labels_csv(args.truth)
        lookup = dict(zip(entities, labels))
        missing = [e for e in fcs.entities if e not in lookup]
        if missing:
            raise LengthMismatch(f"truth file lacks labels for {len(missing)} entities")
        return np.asarray([lookup[e] for e in fcs.entities])
    return scenario_truth


def _base_config(args, seed: int) -> dict:
    # out_dir is deliberately not recorded: summaries stay byte-identical
    # across runs of the same configuration regardless of where they land
    keys = (
        "input", "scenario", "n_entities", "log_transform", "scale_std", "scale_norm",
        "s_max", "penalty_weight", "normalize", "k", "k_min", "k_max",
        "n_init", "it_max", "epsilon", "truth", "figures",
    )
    config = {"command": args.command, "seed": seed, "version": __version__}
    for key in keys:
        if hasattr(args, key):
            value = getattr(args, key)
            config[key] = str(value) if isinstance(value, Path) else value
    return config


def _cluster_result_payload(result: ClusteringResult) -> dict:
    return {
        "total_cost": result.total_cost,
        "best_init": result.best_init,
        "n_iterations_per_init": list(result.n_iterations_per_init),
        "tc_per_init": list(result.tc_per_init),
        "tc_trace_per_init": [list(t) for t in result.tc_trace_per_init],
        "converged_per_init": list(result.converged_per_init),
    }


def _cmd_estimate(args) -> int:
    dataset = validate_dataset(fileio.ingest_csv(args.input, log_transform=args.log_transform))
    fcs = preprocess(estimate(dataset), _preprocess_options(args))
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_fold_change_set(out / "fcset", fcs)
    config = _base_config(args, seed=0)
    config.pop("seed")
    fileio.write_json(out / "summary.json", {
        "config": config,
        "n_entities": fcs.n_entities,
        "n_times": fcs.n_times,
        "time": list(fcs.time.points),
    })
    print(f"estimated {fcs.n_entities} fold changes over {fcs.n_times} time points -> {out / 'fcset'}")
    return 0


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    spec = ScenarioSpec.from_code(args.scenario, n_entities=args.n_entities, seed=seed)
    sim = simulate(spec)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_fold_change_set(out / "fcset", sim.fcs)
    fileio.write_truth_csv(out / "truth.csv", sim.fcs.entities, sim.truth)
    if sim.shifts is not None:
        with open(out / "shifts.csv", "w") as fh:
            fh.write("entity,shift\n")
            for entity, shift in zip(sim.fcs.entities, sim.shifts):
                fh.write(f"{entity},{fileio.FMT % shift}\n")
    fileio.write_json(out / "summary.json", {
        "config": _base_config(args, seed),
        "n_entities": sim.fcs.n_entities,
        "n_clusters_truth": int(sim.truth.max()),
    })
    print(f"simulated scenario {spec.code} with {spec.n_entities} entities -> {out}")
    return 0


def _write_cluster_artifacts(args, fcs, mats, result, truth) -> dict:
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_clusters_csv(out / "clusters.csv", fcs.entities, result.labels,
                              result.warps, result.centroids)
    fileio.write_matrix_tsv(out / "owd.tsv", mats.owd, fcs.entities)
    fileio.write_matrix_tsv(out / "ow.tsv", mats.ow, fcs.entities, integer=True)
    fileio.write_plotdata(out / "plotdata", fcs, result.labels, result.warps, result.centroids)
    summary = {
        "n_entities": fcs.n_entities,
        "n_times": fcs.n_times,
        **_cluster_result_payload(result),
    }
    summary["silhouette"] = (
        silhouette(mats.owd, result.labels) if args.k >= 2 else None
    )
    if truth is not None:
        summary["ari"] = ari(truth, result.labels)
        summary["v_measure"] = v_measure(truth, result.labels)
        fileio.write_truth_csv(out / "truth.csv", fcs.entities, np.asarray(truth, dtype=int))
    if args.figures:
        from .report import render_cluster_panels

        render_cluster_panels(out / "figures", fcs, result.labels, result.warps,
                              result.centroids)
    return summary


def _cmd_cluster(args) -> int:
    seed = _resolve_seed(args)
    fcs, scenario_truth = _load_fold_changes(args, seed)
    truth = _truth_for(fcs, args, scenario_truth)
    spec = WarpSpec(s_max=args.s_max, penalty_weight=args.penalty_weight,
                    normalize_by_length=args.normalize)
    mats = build_owd_ow(fcs, spec)
    cfg = ClusterConfig(n_clusters=args.k, max_iter=args.it_max,
                        n_init=args.n_init, tol=args.epsilon, seed=seed)
    result = cluster_fast(mats, cfg)
    summary = {"config": _base_config(args, seed),
               **_write_cluster_artifacts(args, fcs, mats, result, truth)}
    fileio.write_json(args.out_dir / "summary.json", summary)
    line = f"clustered {fcs.n_entities} entities into {args.k} groups: total cost {result.total_cost:.6g}"
    if "ari" in summary:
        line += f", ARI {summary['ari']:.3f}, V-measure {summary['v_measure']:.3f}"
    print(line + f" -> {args.out_dir}")
    return 0


def _cmd_evaluate(args) -> int:
    pred_entities, pred = fileio.read_labels_csv(args.input)
    truth_entities, truth = fileio.read_labels_csv(args.truth)
    lookup = dict(zip(truth_entities, truth))
    missing = [e for e in pred_entities if e not in lookup]
    if missing:
        raise LengthMismatch(f"truth file lacks labels for {len(missing)} entities")
    aligned = np.asarray([lookup[e] for e in pred_entities])
    scores = {"ari": ari(aligned, pred), "v_measure": v_measure(aligned, pred),
              "n_entities": len(pred_entities)}
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        fileio.write_json(args.out_dir / "evaluation.json", scores)
    print(f"ARI {scores['ari']:.4f}  V-measure {scores['v_measure']:.4f}  (n={scores['n_entities']})")
    return 0


def _cmd_sweep_k(args) -> int:
    seed = _resolve_seed(args)
    fcs, _ = _load_fold_changes(args, seed)
    if args.k_min < 2 or args.k_max < args.k_min:
        raise ValueError("need 2 <= k-min <= k-max")
    spec = WarpSpec(s_max=args.s_max, penalty_weight=args.penalty_weight,
                    normalize_by_length=args.normalize)
    mats = build_owd_ow(fcs, spec)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    ks = list(range(args.k_min, args.k_max + 1))
    rows = []
    for k in ks:
        cfg = ClusterConfig(n_clusters=k, max_iter=args.it_max,
                            n_init=args.n_init, tol=args.epsilon, seed=seed)
        result = cluster_fast(mats, cfg)
        rows.append((k, result.total_cost, silhouette(mats.owd, result.labels)))
    with open(out / "sweep.tsv", "w") as fh:
        fh.write("k\ttotal_cost\tsilhouette\n")
        for k, tc, sil in rows:
            fh.write(f"{k}\t{fileio.FMT % tc}\t{fileio.FMT % sil}\n")
    fileio.write_json(out / "summary.json", {
        "config": _base_config(args, seed),
        "sweep": [{"k": k, "total_cost": tc, "silhouette": sil} for k, tc, sil in rows],
    })
    if args.figures:
        from .report import render_sweep_figure

        render_sweep_figure(out / "sweep.png", ks, [r[1] for r in rows], [r[2] for r in rows])
    best_sil = max(rows, key=lambda r: r[2])
    print(f"swept K={args.k_min}..{args.k_max}; best silhouette {best_sil[2]:.3f} at K={best_sil[0]} -> {out}")
    return 0


def _cmd_bench(args) -> int:
    seed = _resolve_seed(args)
    fcs, _ = _load_fold_changes(args, seed)
    spec = WarpSpec(s_max=args.s_max, penalty_weight=args.penalty_weight,
                    normalize_by_length=args.normalize)
    cfg = ClusterConfig(n_clusters=args.k, max_iter=args.it_max,
                        n_init=args.n_init, tol=args.epsilon, seed=seed)
    t0 = time_mod.perf_counter()
    mats = build_owd_ow(fcs, spec)
    t1 = time_mod.perf_counter()
    fast = cluster_fast(mats, cfg)
    t2 = time_mod.perf_counter()
    classic = cluster_classic(fcs, spec, cfg)
    t3 = time_mod.perf_counter()
    match = (
        np.array_equal(fast.labels, classic.labels)
        and np.array_equal(fast.centroids, classic.centroids)
        and np.array_equal(fast.warps, classic.warps)
        and abs(fast.total_cost - classic.total_cost) <= 1e-10 * max(1.0, abs(fast.total_cost))
    )
    payload = {
        "config": _base_config(args, seed),
        "n_entities": fcs.n_entities,
        "seconds_matrix_build": t1 - t0,
        "seconds_fast_cluster": t2 - t1,
        "seconds_fast_total": t2 - t0,
        "seconds_classic": t3 - t2,
        "speedup_total": (t3 - t2) / max(t2 - t0, 1e-12),
        "outputs_match": bool(match),
        "total_cost": fast.total_cost,
    }
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_json(out / "bench.json", payload)
    print(
        f"fast {payload['seconds_fast_total']:.3f}s (build {payload['seconds_matrix_build']:.3f}s) "
        f"vs classic {payload['seconds_classic']:.3f}s; speedup x{payload['speedup_total']:.1f}; "
        f"outputs match: {match}"
    )
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "cluster": _cmd_cluster,
    "evaluate": _cmd_evaluate,
    "sweep-k": _cmd_sweep_k,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FoldwarpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
