"""File formats: point files, label files, result files, decision graphs.

Point file grammar::

    # mshf-points kind=<kind> dim=<d> labels=<0|1>
    <d floats> [label]
    ...

Lines starting with '#' and blank lines are ignored.  Headerless files are
accepted too: column counts 5 and 4 are read as correspondences (with and
without a trailing integer label column, the common export layout for
two-view keypoint benchmarks); 3 columns are 2D+label when the last column
is integral, otherwise 3D points; 2 columns are 2D points.

All writers are atomic (write to a temp file, then rename) and emit the
full effective run configuration as '#' comment lines for provenance.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import FileFormatError
from .models import DataSet, ModelKind
from .pipeline import FitResult

_POINT_MAGIC = "# mshf-points"
_LABEL_MAGIC = "# mshf-labels"
_DECISION_MAGIC = "# mshf-decision"

CONFIG_KEYS = (
    "kind",
    "hypothesis-count",
    "k-fraction",
    "epsilon",
    "variant",
    "xi",
    "proximity-sigma",
    "rng-seed",
    "neighbor-overlap",
    "max-retries",
    "scale-cap-fraction",
    "backend",
)


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mshf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_points(path, coords, kind, labels=None) -> None:
    kind = ModelKind.parse(kind)
    coords = np.asarray(coords, dtype=np.float64)
    lines = [f"{_POINT_MAGIC} kind={kind.value} dim={kind.dim} labels={int(labels is not None)}"]
    if labels is None:
        for row in coords:
            lines.append(" ".join(_fmt(x) for x in row))
    else:
        labels = np.asarray(labels, dtype=np.int64)
        for row, lab in zip(coords, labels):
            lines.append(" ".join(_fmt(x) for x in row) + f" {int(lab)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_header(line: str):
    fields = {}
    for token in line[len(_POINT_MAGIC):].split():
        if "=" not in token:
            raise FileFormatError(f"malformed point header token {token!r}")
        key, value = token.split("=", 1)
        fields[key] = value
    try:
        kind = ModelKind.parse(fields["kind"])
        dim = int(fields["dim"])
        has_labels = bool(int(fields["labels"]))
    except (KeyError, ValueError) as exc:
        raise FileFormatError(f"malformed point header: {exc}") from None
    if dim != kind.dim:
        raise FileFormatError(f"header dim {dim} does not match kind {kind.value}")
    return kind, has_labels


def _is_integral(column: np.ndarray) -> bool:
    return bool(np.all(column == np.round(column)))


def read_points(path, kind=None):
    """Parse a point file; returns (DataSet, labels-or-None, kind-or-None).

    ``kind`` (a ModelKind or name) disambiguates headerless files; when
    the file carries a header the two must agree.
    """
    want = ModelKind.parse(kind) if kind is not None else None
    header_kind = None
    has_labels = None
    rows = []
    try:
        with open(path) as handle:
            raw_lines = handle.readlines()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_POINT_MAGIC) and header_kind is None and not rows:
                header_kind, has_labels = _parse_header(line)
            continue
        try:
            rows.append([float(tok) for tok in line.replace(",", " ").split()])
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: not a numeric row: {line!r}") from None
    if not rows:
        raise FileFormatError(f"{path}: no observation rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FileFormatError(f"{path}: rows have inconsistent arity")
    table = np.asarray(rows, dtype=np.float64)

    if header_kind is not None:
        expect = header_kind.dim + (1 if has_labels else 0)
        if width != expect:
            raise FileFormatError(
                f"{path}: header promises {expect} columns, rows have {width}"
            )
        file_kind = header_kind
    else:
        # Headerless: infer the layout from the column count.
        if want is not None:
            if width == want.dim:
                has_labels = False
            elif width == want.dim + 1:
                has_labels = True
            else:
                raise FileFormatError(
                    f"{path}: {width} columns incompatible with kind {want.value}"
                )
            file_kind = want
        elif width == 5:
            file_kind, has_labels = None, True
        elif width == 4:
            file_kind, has_labels = None, False
        elif width == 3:
            has_labels = _is_integral(table[:, -1])
            file_kind = None
        elif width == 2:
            file_kind, has_labels = None, False
        else:
            raise FileFormatError(f"{path}: cannot infer layout from {width} columns")
    if want is not None and file_kind is not None and want is not file_kind:
        raise FileFormatError(
            f"{path}: file kind {file_kind.value} conflicts with requested {want.value}"
        )
    labels = None
    coords = table
    if has_labels:
        labels_col = table[:, -1]
        if not _is_integral(labels_col) or np.any(labels_col < 0):
            raise FileFormatError(f"{path}: label column must hold nonnegative integers")
        labels = labels_col.astype(np.int64)
        coords = table[:, :-1]
    try:
        data = DataSet(coords, labels)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from None
    return data, labels, file_kind


def _echo_lines(echo: dict) -> list[str]:
    return [f"# {key}={echo[key]}" for key in CONFIG_KEYS if key in echo]


def write_labels(path, labels, echo: dict) -> None:
    lines = [_LABEL_MAGIC]
    lines += _echo_lines(echo)
    lines += [str(int(lab)) for lab in np.asarray(labels, dtype=np.int64)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_labels(path) -> np.ndarray:
    """Read labels from a labels file or a labeled point file."""
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    for raw in lines:
        if raw.startswith(_POINT_MAGIC):
            data, labels, _ = read_points(path)
            if labels is None:
                raise FileFormatError(f"{path}: point file carries no labels")
            return labels
        if raw.strip() and not raw.startswith("#"):
            break
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: not an integer label: {line!r}") from None
    if not out:
        raise FileFormatError(f"{path}: no labels")
    return np.asarray(out, dtype=np.int64)


def write_modes_json(path, result: FitResult) -> None:
    payload = {
        "config": {k: result.config_echo[k] for k in result.config_echo},
        "num-points": int(result.labels.size),
        "num-modes": result.num_structures,
        "entropy": result.entropy,
        "total-vertices": result.total_vertices,
        "retained-vertices": result.retained_count,
        "modes": [
            {
                "label": m.label,
                "vertex-index": m.vertex_index,
                "kind": m.params.kind.value,
                "params": [float(v) for v in m.params.values],
                "scale": m.scale,
                "weight": m.weight,
                "mtd": m.mtd,
                "inliers": [int(i) for i in m.inliers],
            }
            for m in result.modes
        ],
    }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_decision_csv(path, result: FitResult) -> None:
    """Decision-graph table, one row per vertex, weight non-decreasing."""
    lines = [_DECISION_MAGIC]
    lines += _echo_lines(result.config_echo)
    lines.append("vertex_index,weight,mtd,retained,mode")
    for vertex, weight, mtd, retained, is_mode in result.decision_rows:
        mtd_txt = "" if mtd is None else _fmt(mtd)
        lines.append(f"{vertex},{_fmt(weight)},{mtd_txt},{int(retained)},{int(is_mode)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_decision_csv(path):
    try:
        with open(path) as handle:
            lines = [l.rstrip("\n") for l in handle]
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    body = [l for l in lines if l.strip() and not l.startswith("#")]
    if not body or body[0] != "vertex_index,weight,mtd,retained,mode":
        raise FileFormatError(f"{path}: missing decision-graph header row")
    rows = []
    for lineno, line in enumerate(body[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise FileFormatError(f"{path}:{lineno}: expected 5 fields")
        try:
            rows.append(
                {
                    "vertex_index": int(parts[0]),
                    "weight": float(parts[1]),
                    "mtd": float(parts[2]) if parts[2] else None,
                    "retained": bool(int(parts[3])),
                    "mode": bool(int(parts[4])),
                }
            )
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: malformed row {line!r}") from None
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return rows


def write_decision_svg(path, rows) -> None:
    """Static scatter of minimum T-distance against weight rank.

    Rows come weight-ascending from the decision CSV; only retained
    vertices carry an MTD and are plotted, modes highlighted.  Output is
    byte-deterministic for fixed input.
    """
    plotted = [r for r in rows if r["mtd"] is not None]
    if not plotted:
        raise FileFormatError("no retained vertices to plot")
    width, height = 640, 480
    left, right, top, bottom = 60, 20, 20, 50
    span_x = width - left - right
    span_y = height - top - bottom
    count = len(plotted)

    def sx(rank):
        return left + (span_x * (rank + 0.5) / count)

    def sy(mtd):
        return top + span_y * (1.0 - mtd)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="black" stroke-width="1"/>',
        f'<text x="{left - 10}" y="{sy(0.0):.1f}" text-anchor="end" font-size="12">0</text>',
        f'<text x="{left - 10}" y="{sy(0.5):.1f}" text-anchor="end" font-size="12">0.5</text>',
        f'<text x="{left - 10}" y="{sy(1.0) + 10:.1f}" text-anchor="end" font-size="12">1</text>',
        f'<text x="{(left + width - right) / 2:.1f}" y="{height - 15}" '
        'text-anchor="middle" font-size="13">vertices by weight (non-decreasing)</text>',
        f'<text x="18" y="{(top + height - bottom) / 2:.1f}" font-size="13" '
        f'transform="rotate(-90 18 {(top + height - bottom) / 2:.1f})" '
        'text-anchor="middle">minimum T-distance</text>',
    ]
    for rank, row in enumerate(plotted):
        if not row["mode"]:
            parts.append(
                f'<circle cx="{sx(rank):.2f}" cy="{sy(row["mtd"]):.2f}" r="2.5" '
                'fill="#808080" fill-opacity="0.7"/>'
            )
    for rank, row in enumerate(plotted):
        if row["mode"]:
            parts.append(
                f'<circle cx="{sx(rank):.2f}" cy="{sy(row["mtd"]):.2f}" r="5" '
                'fill="#d22222"/>'
            )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")


def read_config_file(path) -> dict:
    """Flat key=value config; '#' comments allowed, unknown keys rejected."""
    out = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise FileFormatError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value
    return out
