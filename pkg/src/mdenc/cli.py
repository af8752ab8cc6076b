"""Command-line interface wiring the modules into end-to-end workflows.

Subcommands: ``fit``, ``encode``, ``eval``, ``stats``, ``bench``. All
machine-readable output is JSON (JSONL for sweeps); text tables are
human-readable mirrors only. Exit codes: 0 success, 2 usage/validation
error, 1 internal error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, data, encoders, probe, scaling, stats
from .errors import MdencError, ParameterError
from .raster import write_pgm, write_ppm


def _size_type(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        size = (int(w), int(h))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if size[0] < 1 or size[1] < 1:
        raise argparse.ArgumentTypeError("size must be positive")
    return size


def _grid_type(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of ints, got {text!r}") from None


def _load_dataset(args) -> data.Dataset:
    path = Path(args.dataset)
    if not path.exists():
        raise ParameterError(f"dataset not found: {path}")
    fmt = getattr(args, "format", "auto")
    if fmt == "auto":
        fmt = "keel" if path.suffix.lower() == ".dat" else "csv"
    if fmt == "keel":
        return data.load_keel(path)
    label = getattr(args, "label_column", None)
    if label is None:
        return data.load_csv(path)
    try:
        return data.load_csv(path, int(label))
    except ValueError:
        return data.load_csv(path, label)


def _parse_rows(spec: str, n_rows: int) -> list[int]:
    if spec == "all":
        return list(range(n_rows))
    if ":" in spec:
        start_s, _, stop_s = spec.partition(":")
        try:
            start = int(start_s) if start_s else 0
            stop = int(stop_s) if stop_s else n_rows
        except ValueError:
            raise ParameterError(f"bad row range {spec!r}") from None
        rows = list(range(max(0, start), min(n_rows, stop)))
    else:
        try:
            rows = [int(t) for t in spec.split(",") if t.strip()]
        except ValueError:
            raise ParameterError(f"bad row list {spec!r}") from None
    for r in rows:
        if not 0 <= r < n_rows:
            raise ParameterError(f"row {r} out of range (dataset has {n_rows} rows)")
    if not rows:
        raise ParameterError("no rows selected")
    return rows


def _config_echo(args, fields: tuple[str, ...]) -> dict:
    return {name: getattr(args, name) for name in fields if hasattr(args, name)}


def cmd_fit(args) -> int:
    ds = _load_dataset(args)
    model = encoders.fit(args.encoder, ds, l=args.l, u=args.u, size=args.size,
                         igtd_max_iters=args.igtd_iters,
                         igtd_patience=args.igtd_patience, seed=args.seed)
    encoders.save_model(model, args.out)
    print(f"wrote {args.out} ({args.encoder}, {ds.n_features} features)")
    return 0


def cmd_encode(args) -> int:
    model = encoders.load_model(args.model)
    ds = _load_dataset(args)
    rows = _parse_rows(args.rows, ds.n_instances)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    canvases = encoders.encode_batch(model, ds.X[rows], jobs=args.jobs)
    suffix = "ppm" if args.channels == 3 else "pgm"
    writer = write_ppm if args.channels == 3 else write_pgm
    for row, canvas in zip(rows, canvases):
        writer(canvas, out_dir / f"{ds.name}_{row}.{suffix}")
    print(f"wrote {len(rows)} {suffix} files to {out_dir}")
    return 0


_EVAL_CONFIG_FIELDS = ("dataset", "encoder", "l", "u", "seed", "jobs",
                       "igtd_iters", "igtd_patience")


def cmd_eval(args) -> int:
    ds = _load_dataset(args)
    plan = data.make_cv_plan(ds, args.seed)
    config = _config_echo(args, _EVAL_CONFIG_FIELDS)
    config["size"] = list(args.size)
    report = probe.run_cv_eval(ds, args.encoder, plan, l=args.l, u=args.u,
                               size=args.size, igtd_max_iters=args.igtd_iters,
                               igtd_patience=args.igtd_patience, seed=args.seed,
                               jobs=args.jobs, config=config)
    if args.out:
        report.save_json(args.out)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(report.to_dict(), indent=2))
    print(f"{ds.name} / {args.encoder}: mean BAC {report.mean_bac:.3f}")
    return 0


def _pair_key(name_a: str, name_b: str) -> str:
    return f"{name_a} vs {name_b}"


def _stats_payload(reports: list[probe.EvalReport], alpha: float) -> dict:
    datasets: list[str] = []
    methods: list[str] = []
    table: dict[tuple[str, str], probe.EvalReport] = {}
    for report in reports:
        if report.dataset not in datasets:
            datasets.append(report.dataset)
        if report.encoder not in methods:
            methods.append(report.encoder)
        key = (report.dataset, report.encoder)
        if key in table:
            raise ParameterError(f"duplicate report for {key}")
        table[key] = report
    missing = [(d, m) for d in datasets for m in methods if (d, m) not in table]
    if missing:
        raise ParameterError(f"missing reports for {missing}")
    if len(methods) < 2:
        raise ParameterError("need reports for at least 2 methods")

    per_dataset = {}
    for ds_name in datasets:
        means = {m: table[(ds_name, m)].mean_bac for m in methods}
        f_tests = {}
        better_than: dict[str, list[int]] = {m: [] for m in methods}
        for i, j in itertools.combinations(range(len(methods)), 2):
            m_i, m_j = methods[i], methods[j]
            result = stats.combined_5x2cv_f_test(
                np.asarray(table[(ds_name, m_i)].per_split_bac),
                np.asarray(table[(ds_name, m_j)].per_split_bac), alpha)
            f_tests[_pair_key(m_i, m_j)] = {
                "f_stat": result.f_stat, "p_value": result.p_value,
                "significant": result.significant, "degenerate": result.degenerate,
            }
            if result.significant:
                winner, loser = (m_i, m_j) if means[m_i] > means[m_j] else (m_j, m_i)
                better_than[winner].append(methods.index(loser) + 1)  # 1-based
        per_dataset[ds_name] = {
            "mean_bac": means,
            "significantly_better_than": {m: sorted(v) for m, v in better_than.items()},
            "f_tests": f_tests,
        }

    score_matrix = np.array([[table[(d, m)].mean_bac for m in methods] for d in datasets])
    ranks = stats.mean_ranks(score_matrix)
    wilcoxon = {}
    for i, j in itertools.combinations(range(len(methods)), 2):
        key = _pair_key(methods[i], methods[j])
        try:
            result = stats.wilcoxon_signed_rank(score_matrix[:, i], score_matrix[:, j], alpha)
            wilcoxon[key] = {"w_stat": result.w_stat, "p_value": result.p_value,
                             "significant": result.significant, "n": result.n,
                             "exact": result.exact}
        except MdencError as exc:
            wilcoxon[key] = {"error": str(exc)}
    return {
        "alpha": alpha,
        "methods": methods,
        "datasets": per_dataset,
        "mean_ranks": {m: float(r) for m, r in zip(methods, ranks)},
        "wilcoxon": wilcoxon,
    }


def _print_stats_table(payload: dict) -> None:
    methods = payload["methods"]
    name_width = max([len(d) for d in payload["datasets"]] + [len("mean rank")]) + 2
    header = "".join(f"{m:>12}" for m in methods)
    print(f"{'dataset':<{name_width}}{header}")
    for ds_name, entry in payload["datasets"].items():
        cells = []
        for m in methods:
            wins = entry["significantly_better_than"][m]
            marker = f" ({','.join(map(str, wins))})" if wins else ""
            cells.append(f"{entry['mean_bac'][m]:.3f}{marker}")
        print(f"{ds_name:<{name_width}}" + "".join(f"{c:>12}" for c in cells))
    rank_cells = "".join(f"{payload['mean_ranks'][m]:>12.3f}" for m in methods)
    print(f"{'mean rank':<{name_width}}{rank_cells}")
    degenerate = [key for ds in payload["datasets"].values()
                  for key, ft in ds["f_tests"].items() if ft["degenerate"]]
    if degenerate:
        print(f"degenerate-variance F-tests: {len(degenerate)}")


def cmd_stats(args) -> int:
    reports = [probe.EvalReport.load_json(p) for p in args.reports]
    payload = _stats_payload(reports, args.alpha)
    _print_stats_table(payload)
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2))
        print(f"wrote {args.out}")
    return 0


def cmd_bench(args) -> int:
    records = bench.run_timing_sweep(args.encoder, args.grid, args.samples,
                                     args.repeats, args.seed, args.budget_secs,
                                     args.size)
    text = bench.records_to_jsonl(records)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    complete = [r for r in records if not r.truncated]
    if len(complete) >= 3:
        slope, intercept, r_squared = bench.linearity_fit(complete)
        print(f"linear fit: slope {slope:.3e} s/feature, intercept {intercept:.3e} s, "
              f"r^2 {r_squared:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdenc",
                                     description="Tabular-to-image encoding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l", type=float, default=scaling.DEFAULT_L,
                        help="lower guard bound (default 0.05)")
    common.add_argument("--u", type=float, default=scaling.DEFAULT_U,
                        help="upper guard bound (default 0.95)")
    common.add_argument("--size", type=_size_type, default=encoders.DEFAULT_CANVAS,
                        metavar="WxH", help="canvas size (default 224x224)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--igtd-iters", type=int, default=encoders.DEFAULT_IGTD_MAX_ITERS)
    common.add_argument("--igtd-patience", type=int, default=encoders.DEFAULT_IGTD_PATIENCE)

    dataset_arg = argparse.ArgumentParser(add_help=False)
    dataset_arg.add_argument("--dataset", required=True, help="path to .dat or .csv")
    dataset_arg.add_argument("--format", choices=("auto", "keel", "csv"), default="auto")
    dataset_arg.add_argument("--label-column", default=None,
                             help="CSV label column name or index (default: last)")

    p_fit = sub.add_parser("fit", parents=[common, dataset_arg],
                           help="fit an encoder and write the model JSON")
    p_fit.add_argument("--encoder", choices=encoders.KINDS, required=True)
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(func=cmd_fit)

    p_encode = sub.add_parser("encode", parents=[dataset_arg],
                              help="encode dataset rows with a fitted model")
    p_encode.add_argument("--model", required=True)
    p_encode.add_argument("--rows", default="all", help="'all', 'a:b' or 'i,j,k'")
    p_encode.add_argument("--out", required=True, help="output directory")
    p_encode.add_argument("--channels", type=int, choices=(1, 3), default=1)
    p_encode.add_argument("--jobs", type=int, default=1)
    p_encode.set_defaults(func=cmd_encode)

    p_eval = sub.add_parser("eval", parents=[common, dataset_arg],
                            help="run the repeated 2-fold CV probe evaluation")
    p_eval.add_argument("--encoder", choices=probe.EVAL_KINDS, required=True)
    p_eval.add_argument("--out", default=None)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.set_defaults(func=cmd_eval)

    p_stats = sub.add_parser("stats", help="compare evaluation reports")
    p_stats.add_argument("--reports", nargs="+", required=True)
    p_stats.add_argument("--alpha", type=float, default=stats.DEFAULT_ALPHA)
    p_stats.add_argument("--out", default=None)
    p_stats.set_defaults(func=cmd_stats)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="encode-time sweep over feature counts")
    p_bench.add_argument("--encoder", choices=encoders.KINDS, required=True)
    p_bench.add_argument("--grid", type=_grid_type, default=bench.DEFAULT_GRID)
    p_bench.add_argument("--samples", type=int, default=bench.DEFAULT_SAMPLES)
    p_bench.add_argument("--repeats", type=int, default=bench.DEFAULT_REPEATS)
    p_bench.add_argument("--budget-secs", type=float, default=bench.DEFAULT_BUDGET_SECS)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MdencError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - anything else is an internal bug
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
