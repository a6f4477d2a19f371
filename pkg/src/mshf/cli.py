"""Command-line driver: generate | fit | eval | plot-decision-graph.

Exit codes: 0 success, 2 parse/usage error, 3 pipeline error (the message
names the failing stage).
"""

from __future__ import annotations

import argparse
import sys

from .errors import FileFormatError, LengthMismatch, MshfError, PipelineStageError, UnknownTemplate
from .fileio import (
    read_config_file,
    read_decision_csv,
    read_labels,
    read_points,
    write_decision_csv,
    write_decision_svg,
    write_labels,
    write_modes_json,
    write_points,
)
from .metrics import fitting_error
from .pipeline import RunConfig, fit
from .synth import generate_scene, scene_templates


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mshf",
        description=(
            "Multi-structure geometric model fitting by mode seeking on "
            "hypergraphs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic labeled point file")
    gen.add_argument("template", help="scene template, e.g. 3-lines-3d or unbalanced-3-lines:8.0")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output point file")
    gen.add_argument("--list-templates", action="store_true", help=argparse.SUPPRESS)
    gen.set_defaults(func=_cmd_generate)

    fitp = sub.add_parser("fit", help="fit model instances to a point file")
    fitp.add_argument("input", help="point file (header optional)")
    fitp.add_argument("--out", required=True, help="output prefix for result files")
    fitp.add_argument("--config", help="key=value config file")
    fitp.add_argument("--kind", help="model kind (line2d|line3d|circle2d|homography|fundamental)")
    fitp.add_argument("--hypothesis-count", type=int)
    fitp.add_argument("--k-fraction", type=float)
    fitp.add_argument("--epsilon", type=float)
    fitp.add_argument("--variant", choices=("mshf1", "mshf2"))
    fitp.add_argument("--xi", type=float)
    fitp.add_argument("--proximity-sigma", type=float)
    fitp.add_argument("--rng-seed", type=int)
    fitp.add_argument("--neighbor-overlap", choices=("dice", "jaccard", "literal"))
    fitp.add_argument("--max-retries", type=int)
    fitp.add_argument(
        "--scale-cap-fraction",
        type=float,
        help="drop hypotheses whose scale exceeds this fraction of the "
        "bbox diagonal (<= 0 disables)",
    )
    fitp.add_argument("--backend", choices=("auto", "compiled", "python"))
    fitp.set_defaults(func=_cmd_fit)

    ev = sub.add_parser("eval", help="print the mislabeling percentage")
    ev.add_argument("labels", help="estimated labels file")
    ev.add_argument("truth", help="ground-truth labels file or labeled point file")
    ev.set_defaults(func=_cmd_eval)

    plot = sub.add_parser("plot-decision-graph", help="render a decision CSV to SVG")
    plot.add_argument("csv", help="decision-graph CSV from `mshf fit`")
    plot.add_argument("--out", required=True, help="output SVG path")
    plot.set_defaults(func=_cmd_plot)
    return parser


def _cmd_generate(args) -> int:
    scene = generate_scene(args.template, args.seed)
    write_points(args.out, scene.data.coords, scene.kind, scene.true_labels)
    print(
        f"wrote {len(scene.data)} observations "
        f"({scene.num_structures} structures, {scene.outlier_count} outliers) "
        f"to {args.out}"
    )
    return 0


_CONFIG_CASTS = {
    "kind": str,
    "hypothesis-count": int,
    "k-fraction": float,
    "epsilon": float,
    "variant": str,
    "xi": float,
    "proximity-sigma": float,
    "rng-seed": int,
    "neighbor-overlap": str,
    "max-retries": int,
    "scale-cap-fraction": float,
    "backend": str,
}


def _merge_config(args, header_kind) -> RunConfig:
    merged: dict = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            try:
                merged[key.replace("-", "_")] = _CONFIG_CASTS[key](raw)
            except ValueError:
                raise FileFormatError(
                    f"config key {key!r}: cannot parse value {raw!r}"
                ) from None
    for key in _CONFIG_CASTS:
        attr = key.replace("-", "_")
        value = getattr(args, attr, None)
        if value is not None:
            merged[attr] = value
    if merged.get("backend") == "auto":
        merged["backend"] = None
    if "kind" not in merged or not merged["kind"]:
        if header_kind is None:
            raise FileFormatError(
                "model kind is required (file header, --kind or config file)"
            )
        merged["kind"] = header_kind
    try:
        return RunConfig(**merged)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None


def _cmd_fit(args) -> int:
    data, _, header_kind = read_points(args.input, kind=args.kind)
    config = _merge_config(args, header_kind)
    result = fit(data, config)
    prefix = args.out
    write_labels(f"{prefix}.labels.txt", result.labels, result.config_echo)
    write_modes_json(f"{prefix}.modes.json", result)
    write_decision_csv(f"{prefix}.decision.csv", result)
    print(
        f"{result.num_structures} mode(s); labels -> {prefix}.labels.txt, "
        f"modes -> {prefix}.modes.json, decision graph -> {prefix}.decision.csv"
    )
    return 0


def _cmd_eval(args) -> int:
    estimated = read_labels(args.labels)
    truth = read_labels(args.truth)
    print(f"{fitting_error(estimated, truth):.2f}")
    return 0


def _cmd_plot(args) -> int:
    rows = read_decision_csv(args.csv)
    write_decision_svg(args.out, rows)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FileFormatError, UnknownTemplate, LengthMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MshfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
