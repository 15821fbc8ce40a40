"""Command-line pipeline: join, select, regions, curriculum, mix, analyze,
export.

Exit codes: 0 success, 1 data error (parse/join/range), 2 usage error.
Machine-readable output goes to files only; the human summary line goes to
stderr. All outputs are written atomically (temp file + rename), so a failed
run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import analysis, curriculum, ingest, selection
from .core import Bounds1D, Bounds2D, DataError


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise DataError(f"{name} must look like LO:HI, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise DataError(f"{name}: {exc}") from exc


def _parse_bins(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise DataError(f"--bins must look like BX:BY, got {text!r}")
    return int(parts[0]), int(parts[1])


def _load_index(args: argparse.Namespace) -> ingest.QualityIndex:
    scores = ingest.load_scores(args.scores)
    samples = None
    if getattr(args, "dataset", None):
        samples = ingest.load_dataset(args.dataset, lenient=getattr(args, "lenient", False))
    return ingest.build_index(scores, samples, lenient=getattr(args, "lenient", False))


def _write_manifest(manifest, out: str, seed: int) -> None:
    params = dict(manifest.params)
    params.setdefault("seed", str(seed))
    manifest = type(manifest)(
        ids=manifest.ids, strategy=manifest.strategy, params=params,
        source_count=manifest.source_count,
    )
    ingest.write_manifest(manifest, out)


def cmd_join(args: argparse.Namespace) -> int:
    index = _load_index(args)
    _say(f"join ok: {index.n} records"
         + ("" if args.dataset is None else " (scores matched to samples)"))
    if args.out:
        stats = analysis.axis_stats(index)
        payload = {
            "n": index.n,
            "axes": {
                axis: {
                    "min": st.min, "max": st.max, "mean": st.mean, "std": st.std,
                    "quantiles": {str(q): v for q, v in st.quantiles.items()},
                }
                for axis, st in stats.items()
            },
        }
        ingest.atomic_write_text(args.out, json.dumps(payload, sort_keys=True,
                                                      indent=2) + "\n")
    return 0


def _selection_mode(args: argparse.Namespace) -> str:
    has_fraction = args.fraction is not None
    has_bounds = args.sim_bounds is not None or args.loss_bounds is not None
    has_pct = args.sim_percentiles is not None or args.loss_percentiles is not None
    chosen = [m for m, present in
              (("fraction", has_fraction), ("bounds", has_bounds),
               ("percentiles", has_pct)) if present]
    if len(chosen) != 1:
        raise DataError(
            "exactly one of --fraction, explicit bounds, or percentile bounds "
            f"must be given (got: {chosen or 'none'})"
        )
    return chosen[0]


def cmd_select(args: argparse.Namespace) -> int:
    index = _load_index(args)
    mode = _selection_mode(args)
    strategy = args.strategy

    if mode == "fraction":
        manifest = selection.select_top_fraction(index, strategy, args.fraction)
    else:
        def axis_bounds(flag: str | None, axis: str, name: str) -> Bounds1D:
            if flag is None:
                raise DataError(f"strategy {strategy} needs {name}")
            lo, hi = _parse_pair(flag, name)
            if mode == "percentiles":
                # hi=1.0 resolves to the axis maximum, which stays inclusive
                return Bounds1D(selection.quantile(index, axis, lo),
                                selection.quantile(index, axis, hi))
            return Bounds1D(lo, hi)

        if strategy == "dis":
            manifest = selection.select_dis(
                index, axis_bounds(args.sim_bounds if mode == "bounds"
                                   else args.sim_percentiles,
                                   "similarity", "--sim-bounds/--sim-percentiles"))
        elif strategy == "dil":
            manifest = selection.select_dil(
                index, axis_bounds(args.loss_bounds if mode == "bounds"
                                   else args.loss_percentiles,
                                   "loss", "--loss-bounds/--loss-percentiles"))
        else:
            manifest = selection.select_diq(index, Bounds2D(
                similarity=axis_bounds(args.sim_bounds if mode == "bounds"
                                       else args.sim_percentiles,
                                       "similarity", "--sim-bounds/--sim-percentiles"),
                loss=axis_bounds(args.loss_bounds if mode == "bounds"
                                 else args.loss_percentiles,
                                 "loss", "--loss-bounds/--loss-percentiles"),
            ))

    _write_manifest(manifest, args.out, args.seed)
    _say(f"select {strategy}: {len(manifest.ids)} of {index.n} ids -> {args.out} "
         f"(params {manifest.params})")
    return 0


def cmd_regions(args: argparse.Namespace) -> int:
    index = _load_index(args)
    grid = selection.partition_regions(index, binning=args.binning)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for (r, c), cell in sorted(grid.cells.items()):
        manifest = cell
        if args.sample is not None:
            manifest = selection.sample_from(cell, args.sample, args.seed)
        _write_manifest(manifest, str(out_dir / f"region_r{r}c{c}.manifest"),
                        args.seed)
    edges = {"row_edges": list(grid.row_edges), "col_edges": list(grid.col_edges),
             "binning": args.binning}
    ingest.atomic_write_text(out_dir / "edges.json",
                             json.dumps(edges, sort_keys=True, indent=2) + "\n")
    _say(f"regions: 9 manifests ({args.binning} binning"
         + (f", sampled {args.sample} each" if args.sample is not None else "")
         + f") -> {out_dir}")
    return 0


def cmd_curriculum(args: argparse.Namespace) -> int:
    index = _load_index(args)
    base = _parse_pair(args.base_percentiles, "--base-percentiles")
    deltas = None if args.deltas is None else _parse_pair(args.deltas, "--deltas")
    plan = curriculum.plan_curriculum(
        index, args.phases, base_percentiles=base, deltas=deltas,
        per_phase=args.per_phase, seed=args.seed,
    )
    manifests = curriculum.materialize(index, plan)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for manifest in manifests:
        k = manifest.params["k"]
        _write_manifest(manifest, str(out_dir / f"phase_{k}.manifest"), args.seed)
    if args.dataset:
        samples = ingest.load_dataset(args.dataset)
        curriculum.emit_training_schedule(manifests, samples, out_dir)
    else:
        schedule = {
            "version": 1,
            "seed": plan.seed,
            "phases": [
                {
                    "k": phase.k,
                    "label": phase.label,
                    "S_p": phase.s_threshold,
                    "L_p": phase.l_threshold,
                    "m": phase.draw_count,
                    "file": f"phase_{phase.k}.manifest",
                }
                for phase in plan.phases
            ],
        }
        ingest.atomic_write_text(out_dir / "schedule.json",
                                 json.dumps(schedule, sort_keys=True, indent=2)
                                 + "\n")
    thresholds = [(p.s_threshold, p.l_threshold) for p in plan.phases]
    _say(f"curriculum: {args.phases} phases x {args.per_phase} samples, "
         f"thresholds {thresholds} -> {out_dir}")
    return 0


def cmd_mix(args: argparse.Namespace) -> int:
    subsets = [ingest.read_manifest(path) for path in args.manifests]
    merged = selection.mix(subsets)
    _write_manifest(merged, args.out, args.seed)
    _say(f"mix: {len(merged.ids)} ids from {len(subsets)} subsets "
         f"(overlap {merged.params['overlap']}) -> {args.out}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    index = _load_index(args)
    what = args.what
    if what == "stats":
        stats = analysis.axis_stats(index)
        payload = {
            axis: {
                "min": st.min, "max": st.max, "mean": st.mean, "std": st.std,
                "quantiles": {str(q): v for q, v in st.quantiles.items()},
            }
            for axis, st in stats.items()
        }
        ingest.atomic_write_text(args.out, json.dumps(payload, sort_keys=True,
                                                      indent=2) + "\n")
    elif what == "grid":
        grid = analysis.density_grid(index, task_type=args.task_type,
                                     bins=_parse_bins(args.bins))
        analysis.export_grid_csv(grid, args.out)
    elif what == "heatmap":
        grid = analysis.token_length_grid(index, bins=_parse_bins(args.bins))
        analysis.export_grid_csv(grid, args.out)
    elif what == "scatter":
        analysis.render_scatter(index, args.out, color_by=args.color_by)
    elif what == "corr":
        value = analysis.correlation(index, args.a, args.b)
        payload = {"a": args.a, "b": args.b, "correlation": value}
        ingest.atomic_write_text(args.out, json.dumps(payload, sort_keys=True)
                                 + "\n")
    _say(f"analyze {what}: {index.n} records -> {args.out}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    manifest = ingest.read_manifest(args.manifest)
    samples = ingest.load_dataset(args.dataset)
    ingest.export_subset_dataset(manifest, samples, args.out)
    _say(f"export: {len(manifest.ids)} records -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspace",
        description="Quality-space curation for instruction-tuning datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, dataset: bool = True) -> None:
        p.add_argument("--scores", required=True, help="score file (jsonl)")
        if dataset:
            p.add_argument("--dataset", default=None, help="dataset file (jsonl)")
        p.add_argument("--lenient", action="store_true",
                       help="skip bad lines / unmatched ids instead of aborting")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("join", help="validate scores (+dataset) and report stats")
    add_common(p)
    p.add_argument("--out", default=None, help="optional stats JSON")
    p.set_defaults(func=cmd_join)

    p = sub.add_parser("select", help="DIS/DIL/DIQ subset selection")
    add_common(p)
    p.add_argument("--strategy", required=True, choices=selection.STRATEGIES)
    p.add_argument("--fraction", type=float, default=None,
                   help="top fraction, e.g. 0.05")
    p.add_argument("--sim-bounds", default=None, metavar="LO:HI")
    p.add_argument("--loss-bounds", default=None, metavar="LO:HI")
    p.add_argument("--sim-percentiles", default=None, metavar="LO:HI")
    p.add_argument("--loss-percentiles", default=None, metavar="LO:HI")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("regions", help="3x3 partition, optional per-region sample")
    add_common(p)
    p.add_argument("--binning", choices=("quantile", "equal_width"),
                   default="quantile")
    p.add_argument("--sample", type=int, default=None,
                   help="sample this many ids per region")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("curriculum", help="plan, materialize and emit phases")
    add_common(p)
    p.add_argument("--phases", type=int, required=True)
    p.add_argument("--per-phase", type=int, required=True)
    p.add_argument("--base-percentiles", default="0:0", metavar="QS:QL")
    p.add_argument("--deltas", default=None, metavar="DS:DL",
                   help="threshold increments; default splits [base, max] "
                        "into equal blocks")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_curriculum)

    p = sub.add_parser("mix", help="union of subset manifests")
    p.add_argument("manifests", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("analyze", help="stats | grid | heatmap | scatter | corr")
    p.add_argument("what", choices=("stats", "grid", "heatmap", "scatter", "corr"))
    add_common(p)
    p.add_argument("--bins", default="50:50", metavar="BX:BY")
    p.add_argument("--task-type", default=None)
    p.add_argument("--color-by", choices=("task_type", "token_length", "none"),
                   default="none")
    p.add_argument("--a", default="token_length", help="corr attribute a")
    p.add_argument("--b", default="loss", help="corr attribute b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="manifest -> dataset file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
