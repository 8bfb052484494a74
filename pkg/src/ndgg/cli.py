"""Command-line entry point.

Subcommands: train, sweep-depth, analyze {mdcn,kbound,limit,buckets}.
Flags override config-file values, which override built-in defaults;
the effective configuration is echoed into every output file (JSON
outputs carry a "config" object, CSV outputs a leading "# config:"
line). Exit codes: 0 success, 1 runtime failure, 2 usage error.
Existing outputs are never overwritten without --force.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import statistics
import sys
from dataclasses import asdict
from pathlib import Path

from .analysis import (
    KBoundConfig,
    bucket_accuracy_from_predictions,
    buckets_from_boundaries,
    k_bound,
    lambda2,
    mdcn_vs_depth,
    smoothing_limit_oracle,
)
from .container import load_container
from .errors import NdggError
from .graph import connected_components, normalize_adjacency
from .models import MODEL_KINDS, ModelConfig
from .training import TrainConfig, predict, train


class UsageError(Exception):
    """Bad invocation; maps to exit code 2."""


MODEL_KEYS = {
    "model": "gcn",
    "layers": 2,
    "hidden": 64,
    "degree_embed_dim": 16,
    "degree_cap": 32,
    "dropout": 0.5,
    "row_normalize": True,
    "gate_hidden_layers": 0,
    "gate_uses_raw_x": False,
}
TRAIN_KEYS = {
    "lr": 1e-2,
    "lr_decay_step": 10,
    "lr_decay_rate": 0.95,
    "weight_decay": 5e-4,
    "epochs": 500,
    "patience": None,
}
COMMON_KEYS = {
    "dataset": None,
    "out": None,
    "seed": 0,
    "seeds": None,
    "jobs": 1,
    "force": False,
    "eps": 1e-3,
    "kmax": 20,
    "buckets": "0,2,4,8",
    "depths": None,
}
ALL_KEYS = {**MODEL_KEYS, **TRAIN_KEYS, **COMMON_KEYS}


def _effective_config(args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags."""
    cfg = dict(ALL_KEYS)
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"config file is not valid JSON: {e}") from e
        unknown = set(loaded) - set(ALL_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in ALL_KEYS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None and value is not False:
            cfg[key] = value
    return cfg


def _model_config(cfg: dict) -> ModelConfig:
    return ModelConfig(
        kind=cfg["model"],
        layers=int(cfg["layers"]),
        hidden=int(cfg["hidden"]),
        degree_embed_dim=int(cfg["degree_embed_dim"]),
        degree_cap=int(cfg["degree_cap"]),
        dropout=float(cfg["dropout"]),
        row_normalize=bool(cfg["row_normalize"]),
        gate_hidden_layers=int(cfg["gate_hidden_layers"]),
        gate_uses_raw_x=bool(cfg["gate_uses_raw_x"]),
    )


def _train_config(cfg: dict, seed: int) -> TrainConfig:
    return TrainConfig(
        init_lr=float(cfg["lr"]),
        lr_decay_step=int(cfg["lr_decay_step"]),
        lr_decay_rate=float(cfg["lr_decay_rate"]),
        weight_decay=float(cfg["weight_decay"]),
        max_epochs=int(cfg["epochs"]),
        seed=seed,
        patience=None if cfg["patience"] is None else int(cfg["patience"]),
    )


def _parse_seeds(cfg: dict) -> list[int]:
    raw = cfg.get("seeds")
    if raw is None:
        return [int(cfg["seed"])]
    raw = str(raw)
    try:
        if ".." in raw:
            lo, hi = raw.split("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in raw.split(",")]
    except ValueError as e:
        raise UsageError(f"bad --seeds '{raw}': use N..M or comma list") from e
    if not seeds:
        raise UsageError("empty seed list")
    return seeds


def _load_dataset(cfg: dict):
    if not cfg.get("dataset"):
        raise UsageError("--dataset is required")
    path = Path(cfg["dataset"])
    if not path.is_file():
        raise UsageError(f"dataset not found: {path}")
    return load_container(path)


def _out_dir(cfg: dict) -> Path:
    if not cfg.get("out"):
        raise UsageError("--out is required")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _guard_overwrite(cfg: dict, *paths: Path) -> None:
    if cfg["force"]:
        return
    clashes = [str(p) for p in paths if p.exists()]
    if clashes:
        raise UsageError(f"refusing to overwrite {clashes}; pass --force")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv_with_config(path: Path, header: list[str], rows: list[list], config: dict) -> None:
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join("" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _run_seed(packed):
    """Worker for seed fan-out; returns JSON-able results only."""
    model_cfg_dict, train_cfg_dict, dataset_path, boundaries = packed
    dataset = load_container(dataset_path)
    model_cfg = ModelConfig(**model_cfg_dict)
    train_cfg = TrainConfig(**train_cfg_dict)
    params, report = train(model_cfg, train_cfg, dataset)
    buckets = buckets_from_boundaries(boundaries)
    rows = [
        {"bucket": b.label, "count": b.count, "accuracy": b.accuracy}
        for b in bucket_accuracy_from_predictions(predict(model_cfg, params, dataset), dataset, buckets)
    ]
    return train_cfg.seed, asdict(report), rows


def _fan_out_seeds(model_cfg: ModelConfig, cfg: dict, seeds: list[int], boundaries) -> list:
    jobs = int(cfg["jobs"])
    packed = [
        (asdict(model_cfg), asdict(_train_config(cfg, s)), str(cfg["dataset"]), tuple(boundaries))
        for s in seeds
    ]
    if jobs <= 1 or len(seeds) == 1:
        results = [_run_seed(p) for p in packed]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_seed, packed))
    return sorted(results, key=lambda r: r[0])


def _boundaries(cfg: dict) -> list[int]:
    try:
        return [int(b) for b in str(cfg["buckets"]).split(",")]
    except ValueError as e:
        raise UsageError(f"bad --buckets '{cfg['buckets']}'") from e


# ---- commands --------------------------------------------------------


def cmd_train(args) -> int:
    cfg = _effective_config(args)
    _load_dataset(cfg)  # fail fast on a bad path
    seeds = _parse_seeds(cfg)
    model_cfg = _model_config(cfg)
    out = _out_dir(cfg)
    boundaries = _boundaries(cfg)

    if len(seeds) == 1:
        targets = [out / "metrics.json", out / "history.csv"]
    else:
        targets = [out / "aggregate.json"]
        for s in seeds:
            targets += [out / f"metrics_seed{s}.json", out / f"history_seed{s}.csv"]
    _guard_overwrite(cfg, *targets)

    results = _fan_out_seeds(model_cfg, cfg, seeds, boundaries)
    echo = {**cfg, "command": "train"}
    accs = []
    for seed, report_dict, _rows in results:
        report_dict["config"]["cli"] = echo
        suffix = "" if len(seeds) == 1 else f"_seed{seed}"
        _write_json(out / f"metrics{suffix}.json", report_dict)
        rows = [[h["epoch"], h["train_loss"], h["val_acc"], h["lr"]] for h in report_dict["history"]]
        _write_csv_with_config(
            out / f"history{suffix}.csv", ["epoch", "train_loss", "val_acc", "lr"], rows, echo
        )
        accs.append(report_dict["test_acc"])
        print(f"seed {seed}: test_acc={report_dict['test_acc']:.4f}")
    if len(seeds) > 1:
        aggregate = {
            "config": echo,
            "seeds": seeds,
            "test_acc": {s: a for s, a in zip(seeds, accs)},
            "test_acc_mean": statistics.fmean(accs),
            "test_acc_std": statistics.pstdev(accs) if len(accs) > 1 else 0.0,
        }
        _write_json(out / "aggregate.json", aggregate)
        print(f"mean test_acc over {len(seeds)} seeds: {aggregate['test_acc_mean']:.4f}")
    return 0


def cmd_sweep_depth(args) -> int:
    cfg = _effective_config(args)
    _load_dataset(cfg)
    if not cfg.get("depths"):
        raise UsageError("--depths is required (for example --depths 2,4,8,16)")
    try:
        depths = [int(d) for d in str(cfg["depths"]).split(",")]
    except ValueError as e:
        raise UsageError(f"bad --depths '{cfg['depths']}'") from e
    if not depths or any(d < 1 for d in depths):
        raise UsageError("depths must be positive integers")
    models = [m.strip() for m in str(cfg["model"]).split(",")]
    for m in models:
        if m not in MODEL_KINDS:
            raise UsageError(f"unknown model '{m}'")
    seeds = _parse_seeds(cfg)
    boundaries = _boundaries(cfg)
    out = _out_dir(cfg)
    target = out / "sweep.csv"
    _guard_overwrite(cfg, target)

    echo = {**cfg, "command": "sweep-depth"}
    header = ["model", "depth", "bucket", "seed", "count", "accuracy"]
    rows: list[list] = []
    agg: dict[tuple, list] = {}
    for model in models:
        for depth in depths:
            model_cfg = _model_config({**cfg, "model": model, "layers": depth})
            results = _fan_out_seeds(model_cfg, cfg, seeds, boundaries)
            for seed, report_dict, bucket_rows in results:
                overall = report_dict["test_acc"]
                test_count = sum(r["count"] for r in bucket_rows)
                rows.append([model, depth, "all", seed, test_count, overall])
                agg.setdefault((model, depth, "all", test_count), []).append(overall)
                for r in bucket_rows:
                    rows.append([model, depth, r["bucket"], seed, r["count"], r["accuracy"]])
                    if r["accuracy"] is not None:
                        agg.setdefault((model, depth, r["bucket"], r["count"]), []).append(r["accuracy"])
                print(f"{model} depth={depth} seed={seed}: test_acc={overall:.4f}")
    for (model, depth, bucket, count), accs in agg.items():
        rows.append([model, depth, bucket, "mean", count, statistics.fmean(accs)])
        rows.append([model, depth, bucket, "std", count, statistics.pstdev(accs) if len(accs) > 1 else 0.0])
    _write_csv_with_config(target, header, rows, echo)
    return 0


def cmd_analyze(args) -> int:
    cfg = _effective_config(args)
    dataset = _load_dataset(cfg)
    out = _out_dir(cfg)
    echo = {**cfg, "command": f"analyze {args.what}"}

    if args.what == "mdcn":
        target = out / "mdcn.csv"
        _guard_overwrite(cfg, target)
        curve = mdcn_vs_depth(dataset.graph, dataset.features, int(cfg["kmax"]))
        rows = [[k, float(v)] for k, v in enumerate(curve)]
        _write_csv_with_config(target, ["k", "mdcn"], rows, echo)
    elif args.what == "kbound":
        target = out / "kbound.json"
        _guard_overwrite(cfg, target)
        a_hat = normalize_adjacency(dataset.graph)
        comps = connected_components(dataset.graph)
        lam2 = lambda2(a_hat, comps)
        result = k_bound(dataset.graph, KBoundConfig(eps=float(cfg["eps"])), lam2)
        payload = {
            "config": echo,
            "lambda2": result.lambda2,
            "eps": result.eps,
            "degenerate": result.degenerate,
            "k": [float(v) for v in result.k],
        }
        _write_json(target, payload)
    elif args.what == "limit":
        target = out / "limit.csv"
        _guard_overwrite(cfg, target)
        curve = smoothing_limit_oracle(dataset.graph, dataset.features, int(cfg["kmax"]))
        rows = [[k, float(v)] for k, v in enumerate(curve)]
        _write_csv_with_config(target, ["k", "distance"], rows, echo)
    elif args.what == "buckets":
        target = out / "buckets.csv"
        _guard_overwrite(cfg, target)
        seeds = _parse_seeds(cfg)
        model_cfg = _model_config(cfg)
        results = _fan_out_seeds(model_cfg, cfg, seeds, _boundaries(cfg))
        rows = []
        for seed, report_dict, bucket_rows in results:
            for r in bucket_rows:
                rows.append([cfg["model"], int(cfg["layers"]), r["bucket"], seed, r["count"], r["accuracy"]])
        _write_csv_with_config(target, ["model", "depth", "bucket", "seed", "count", "accuracy"], rows, echo)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown analyze subcommand '{args.what}'")
    return 0


# ---- argument parsing ------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="path to a .ndgg container")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file (flat keys mirroring flags)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--seed", type=int, help="single seed (default 0)")
    p.add_argument("--seeds", help="seed sweep: N..M or comma list")
    p.add_argument("--jobs", type=int, help="parallel worker processes for seed sweeps")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help=f"one of {', '.join(MODEL_KINDS)}")
    p.add_argument("--layers", type=int, help="propagation depth")
    p.add_argument("--hidden", type=int, help="hidden width")
    p.add_argument("--epochs", type=int, help="training epochs")
    p.add_argument("--lr", type=float, help="initial learning rate")
    p.add_argument("--weight-decay", dest="weight_decay", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--buckets", help="degree bucket boundaries, e.g. 0,2,4,8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndgg", description="train and analyze gated residual graph networks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one model, optionally over many seeds")
    _add_common(p_train)
    _add_train_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_sweep = sub.add_parser("sweep-depth", help="accuracy vs depth, overall and per degree bucket")
    _add_common(p_sweep)
    _add_train_flags(p_sweep)
    p_sweep.add_argument("--depths", help="comma list of depths, e.g. 2,4,8,16")
    p_sweep.set_defaults(func=cmd_sweep_depth)

    p_an = sub.add_parser("analyze", help="over-smoothing diagnostics")
    an_sub = p_an.add_subparsers(dest="what", required=True)
    for what, extra in (
        ("mdcn", "propagation-only neighbor-distance curve"),
        ("kbound", "per-node depth bound from lambda2"),
        ("limit", "distance to the stationary direction vs depth"),
        ("buckets", "train once, report per-degree-bucket accuracy"),
    ):
        p_what = an_sub.add_parser(what, help=extra)
        _add_common(p_what)
        _add_train_flags(p_what)
        p_what.add_argument("--eps", type=float, help="stationarity tolerance for kbound")
        p_what.add_argument("--kmax", type=int, help="max propagation depth for curves")
        p_what.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NdggError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
