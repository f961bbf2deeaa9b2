"""Render line-chart panels from edgeauction sweep result files.

Consumes only the documented results CSV schema (one row per mechanism
variant and swept value); one image per panel, one series per variant.
Input files are never modified and rendering is deterministic, so repeated
runs produce identical images.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_HEADER = ["variant", "swept_parameter", "swept_value",
                   "expected_revenue", "satisfaction", "running_time_s",
                   "trials", "seed"]
SERIES_ORDER = ("dpam", "dtam", "dpam_s", "dtam_s")
SERIES_STYLE = {
    "dpam": dict(color="#1f77b4", marker="o"),
    "dtam": dict(color="#d62728", marker="s"),
    "dpam_s": dict(color="#2ca02c", marker="^"),
    "dtam_s": dict(color="#9467bd", marker="v"),
}
PANELS = {
    "revenue": ("expected_revenue", "expected revenue"),
    "satisfaction": ("satisfaction", "satisfaction"),
    "runtime": ("running_time_s", "running time per trial (s)"),
}
AXIS_LABELS = {
    "granularity": "price grid granularity",
    "k": "resource types",
    "m": "buyers",
    "epsilon": "privacy budget",
}


class SchemaError(ValueError):
    """Results file does not match the documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    input_path: Path
    panel: str
    output_path: Path
    series: tuple[str, ...] = SERIES_ORDER


def load_rows(path: Path) -> list[dict]:
    """Read and type a results file, validating the schema."""
    try:
        with Path(path).open(newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != EXPECTED_HEADER:
                raise SchemaError(f"{path}: expected header "
                                  f"{','.join(EXPECTED_HEADER)!r}, found "
                                  f"{header}")
            rows = []
            for record in reader:
                if len(record) != len(EXPECTED_HEADER):
                    raise SchemaError(f"{path}: row with "
                                      f"{len(record)} columns")
                fields = dict(zip(EXPECTED_HEADER, record))
                for name in ("swept_value", "expected_revenue",
                             "satisfaction", "running_time_s"):
                    fields[name] = float(fields[name]) if fields[name] else None
                rows.append(fields)
    except OSError as error:
        raise SchemaError(f"{path}: {error}") from error
    except ValueError as error:
        if isinstance(error, SchemaError):
            raise
        raise SchemaError(f"{path}: malformed value: {error}") from error
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def render(spec: FigureSpec) -> Path:
    """Write one panel image; returns the output path."""
    if spec.panel not in PANELS:
        raise SchemaError(f"unknown panel {spec.panel!r}")
    rows = load_rows(spec.input_path)
    metric, metric_label = PANELS[spec.panel]
    parameter = rows[0]["swept_parameter"]

    figure, axes = plt.subplots(figsize=(5.0, 3.6))
    plotted = 0
    for variant in spec.series:
        points = [(r["swept_value"], r[metric]) for r in rows
                  if r["variant"] == variant and r["swept_value"] is not None
                  and r[metric] is not None]
        if not points:
            continue
        xs, ys = zip(*points)
        axes.plot(xs, ys, label=variant.replace("_s", "-s").upper(),
                  **SERIES_STYLE.get(variant, {}))
        plotted += 1
    if plotted == 0:
        plt.close(figure)
        raise SchemaError(f"{spec.input_path}: no plottable series among "
                          f"{spec.series}")
    if spec.panel == "runtime":
        axes.set_yscale("log")
    axes.set_xlabel(AXIS_LABELS.get(parameter, parameter))
    axes.set_ylabel(metric_label)
    axes.legend()
    axes.grid(True, alpha=0.3)
    figure.tight_layout()
    spec.output_path.parent.mkdir(parents=True, exist_ok=True)
    figure.savefig(spec.output_path, dpi=150)
    plt.close(figure)
    return spec.output_path


def render_all_panels(input_path: Path, out_dir: Path,
                      series: tuple[str, ...] = SERIES_ORDER) -> list[Path]:
    stem = Path(input_path).stem
    return [render(FigureSpec(Path(input_path), panel,
                              Path(out_dir) / f"{stem}_{panel}.png", series))
            for panel in PANELS]


def render_directory(results_dir: Path, out_dir: Path,
                     series: tuple[str, ...] = SERIES_ORDER) -> list[Path]:
    """Render every panel for every sweep results file in a directory."""
    inputs = sorted(Path(results_dir).glob("*.csv"))
    if not inputs:
        raise SchemaError(f"no .csv results files under {results_dir}")
    written = []
    for path in inputs:
        written.extend(render_all_panels(path, out_dir, series))
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="auction-plots",
        description="Render revenue/satisfaction/runtime panels from sweep "
                    "results")
    sub = parser.add_subparsers(dest="command", required=True)

    one = sub.add_parser("render", help="render panels for one results file")
    one.add_argument("input")
    one.add_argument("--panel", choices=(*PANELS, "all"), default="all")
    one.add_argument("--out", required=True,
                     help="output image (single panel) or directory (all)")
    one.add_argument("--series", default=",".join(SERIES_ORDER),
                     help="comma-separated variants to draw")

    many = sub.add_parser("render-dir",
                          help="render all panels for every csv in a "
                               "directory")
    many.add_argument("results_dir")
    many.add_argument("--out-dir", required=True)
    many.add_argument("--series", default=",".join(SERIES_ORDER))

    args = parser.parse_args(argv)
    series = tuple(s for s in args.series.split(",") if s)
    try:
        if args.command == "render":
            if args.panel == "all":
                written = render_all_panels(Path(args.input), Path(args.out),
                                            series)
            else:
                written = [render(FigureSpec(Path(args.input), args.panel,
                                             Path(args.out), series))]
        else:
            written = render_directory(Path(args.results_dir),
                                       Path(args.out_dir), series)
    except SchemaError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
