"""Synthetic multi-structure scenes with ground-truth labels.

Templates (case-insensitive):

* ``{k}-lines-2d`` and ``{k}-lines-3d`` for k in 3..7.  Geometry is fixed
  per template: 3 lines are mutually separated, 4 are concurrent in one
  point, 5 form a star through one center, 6 and 7 mix bundles.  Inliers
  get Gaussian perpendicular noise; outliers are uniform over the box.
* ``{k}-circles`` for k in 3..16: intersecting circle chains/grids with
  Gaussian radial noise.
* ``unbalanced-3-lines:R``: the 3-line 3D scene with per-line inlier
  counts (heavy, heavy, light) in ratio R while the total stays near 300.
* ``planar-homography[:k]``: correspondences from k planar patches mapped
  by randomized homographies, pixel noise in the second image.
* ``two-view-motion[:k]``: correspondences of k rigidly moving point
  clouds seen by two cameras, pixel noise in the second image.

Defaults mirror the line/circle benchmark regimes: 100 inliers per
structure; 400 outliers and sigma 1.0 for lines, sigma 0.5 for circles;
200 outliers and sigma 1.0 for the two correspondence families.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import UnknownTemplate
from .models import DataSet, ModelKind, ModelParams, _canonical, fit_minimal

_BOX = 100.0  # canonical side of the line-scene bounding box
_IMAGE = (640.0, 480.0)  # image bounds for correspondence scenes

# (center, angle in degrees, half-length); angles chosen so the 3-line
# scene has no in-box crossings while 4..7 exhibit intersection patterns.
_LINES_2D = {
    3: [((50.0, 15.0), 5.0, 48.0), ((50.0, 50.0), 10.0, 48.0), ((50.0, 85.0), 15.0, 48.0)],
    4: [((50.0, 50.0), a, 45.0) for a in (0.0, 45.0, 90.0, 135.0)],
    5: [((50.0, 50.0), a, 45.0) for a in (0.0, 36.0, 72.0, 108.0, 144.0)],
    6: [((30.0, 30.0), a, 28.0) for a in (0.0, 60.0, 120.0)]
    + [((70.0, 70.0), a, 28.0) for a in (30.0, 90.0, 150.0)],
    7: [((50.0, 14.0), 8.0, 46.0), ((50.0, 38.0), 8.0, 46.0), ((50.0, 62.0), 8.0, 46.0),
        ((50.0, 86.0), 8.0, 46.0), ((30.0, 50.0), 70.0, 30.0), ((50.0, 50.0), 100.0, 30.0),
        ((70.0, 50.0), 130.0, 30.0)],
}

# (center, direction, half-length) in the 3D box.
_LINES_3D = {
    3: [((25.0, 25.0, 25.0), (1.0, 0.25, 0.1), 30.0),
        ((50.0, 75.0, 50.0), (0.2, -1.0, 0.3), 30.0),
        ((80.0, 35.0, 75.0), (-0.1, 0.4, 1.0), 30.0)],
    4: [((50.0, 50.0, 50.0), d, 38.0)
        for d in ((1.0, 0.0, 0.2), (0.0, 1.0, -0.2), (1.0, 1.0, 1.0), (-1.0, 1.0, 0.4))],
    5: [((35.0, 35.0, 40.0), d, 28.0)
        for d in ((1.0, 0.2, 0.0), (0.0, 1.0, 0.3), (1.0, -1.0, 0.5))]
    + [((70.0, 70.0, 60.0), d, 28.0) for d in ((1.0, 0.0, -0.4), (0.3, 1.0, 0.5))],
    6: [((30.0, 30.0, 30.0), d, 26.0)
        for d in ((1.0, 0.1, 0.2), (0.1, 1.0, -0.2), (0.5, -0.6, 1.0))]
    + [((70.0, 70.0, 70.0), d, 26.0)
       for d in ((1.0, -0.2, 0.1), (-0.3, 1.0, 0.3), (0.4, 0.5, -1.0))],
    7: [((30.0, 30.0, 30.0), d, 26.0)
        for d in ((1.0, 0.1, 0.2), (0.1, 1.0, -0.2), (0.5, -0.6, 1.0))]
    + [((70.0, 70.0, 70.0), d, 26.0)
       for d in ((1.0, -0.2, 0.1), (-0.3, 1.0, 0.3))]
    + [((20.0, 75.0, 80.0), (1.0, -0.5, -0.6), 26.0),
       ((75.0, 20.0, 15.0), (-0.4, 1.0, 0.7), 26.0)],
}

# (cx, cy, r); 3 shares one radius, 4 and 5 vary them, larger counts use a
# same-radius grid. Adjacent spacing is below the radius sum, so
# neighboring circles intersect; the extent is large relative to the
# default noise so the rings stay thin against the outlier density.
_CIRCLES = {
    3: [(90.0, 150.0, 60.0), (174.0, 150.0, 60.0), (258.0, 150.0, 60.0)],
    4: [(105.0, 105.0, 42.0), (195.0, 105.0, 54.0), (105.0, 195.0, 66.0),
        (195.0, 195.0, 78.0)],
    5: [(105.0, 105.0, 42.0), (195.0, 105.0, 54.0), (105.0, 195.0, 66.0),
        (195.0, 195.0, 78.0), (150.0, 150.0, 48.0)],
}


def _circle_grid(k: int):
    cols = math.ceil(math.sqrt(k))
    spacing, radius = 72.0, 42.0
    out = []
    for i in range(k):
        row, col = divmod(i, cols)
        out.append((90.0 + spacing * col, 90.0 + spacing * row, radius))
    return out


_HOMOGRAPHY_PATCHES = [
    (40.0, 40.0, 260.0, 200.0),
    (340.0, 40.0, 260.0, 200.0),
    (40.0, 260.0, 260.0, 180.0),
    (340.0, 260.0, 260.0, 180.0),
]

_MOTION_CENTERS = [
    (-1.2, 0.0, 8.0),
    (1.2, 0.5, 9.0),
    (0.0, -1.0, 10.0),
    (0.8, 1.2, 11.0),
]


@dataclass(frozen=True)
class SyntheticScene:
    data: DataSet
    true_labels: np.ndarray
    kind: ModelKind
    true_params: tuple
    inlier_sigma: float
    outlier_count: int

    @property
    def num_structures(self) -> int:
        return len(self.true_params)


def scene_templates() -> list[str]:
    """Canonical template names (parameterized ones in default form)."""
    names = [f"{k}-lines-2d" for k in range(3, 8)]
    names += [f"{k}-lines-3d" for k in range(3, 8)]
    names += [f"{k}-circles" for k in range(3, 17)]
    names += ["unbalanced-3-lines", "planar-homography", "two-view-motion"]
    return names


def _perp_basis(d: np.ndarray):
    ref = np.array([0.0, 0.0, 1.0])
    if abs(float(d @ ref)) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    u = np.cross(d, ref)
    u /= np.linalg.norm(u)
    return u, np.cross(d, u)


def _line2d_points(rng, center, angle_deg, half_len, count, sigma):
    theta = math.radians(angle_deg)
    d = np.array([math.cos(theta), math.sin(theta)])
    normal = np.array([-d[1], d[0]])
    t = rng.uniform(-half_len, half_len, count)
    offsets = rng.normal(0.0, sigma, count)
    return np.asarray(center) + t[:, None] * d + offsets[:, None] * normal


def _line3d_points(rng, center, direction, half_len, count, sigma):
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    u, v = _perp_basis(d)
    t = rng.uniform(-half_len, half_len, count)
    g = rng.normal(0.0, sigma, (count, 2))
    return np.asarray(center) + t[:, None] * d + g[:, :1] * u + g[:, 1:] * v


def _circle_points(rng, cx, cy, r, count, sigma):
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    rad = r + rng.normal(0.0, sigma, count)
    return np.column_stack([cx + rad * np.cos(theta), cy + rad * np.sin(theta)])


def _apply_homography(h, xy):
    ones = np.ones((xy.shape[0], 1))
    mapped = np.hstack([xy, ones]) @ h.T
    return mapped[:, :2] / mapped[:, 2:]


def _random_homography(rng):
    phi = rng.uniform(-0.2, 0.2)
    s = rng.uniform(0.85, 1.15)
    tx, ty = rng.uniform(-60.0, 60.0, 2)
    p1, p2 = rng.uniform(-1e-4, 1e-4, 2)
    return np.array(
        [
            [s * math.cos(phi), -s * math.sin(phi), tx],
            [s * math.sin(phi), s * math.cos(phi), ty],
            [p1, p2, 1.0],
        ]
    )


def _rotation(axis, angle):
    axis = axis / np.linalg.norm(axis)
    kx, ky, kz = axis
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


_CAMERA = np.array([[600.0, 0.0, 320.0], [0.0, 600.0, 240.0], [0.0, 0.0, 1.0]])


def _project(points3d):
    proj = points3d @ _CAMERA.T
    return proj[:, :2] / proj[:, 2:]


_TEMPLATE_RE = re.compile(
    r"^(?:(?P<k>\d+)-(?P<family>lines-2d|lines-3d|circles)"
    r"|(?P<name>unbalanced-3-lines|planar-homography|two-view-motion)"
    r"(?::(?P<param>[-+0-9.eE]+))?)$"
)


def _parse_template(template: str):
    m = _TEMPLATE_RE.match(str(template).strip().lower())
    if not m:
        raise UnknownTemplate(f"unknown scene template {template!r}")
    if m.group("k"):
        k = int(m.group("k"))
        family = m.group("family")
        limits = {"lines-2d": (3, 7), "lines-3d": (3, 7), "circles": (3, 16)}
        lo, hi = limits[family]
        if not lo <= k <= hi:
            raise UnknownTemplate(
                f"{family} supports {lo}..{hi} structures, got {k}"
            )
        return family, k, None
    name = m.group("name")
    param = m.group("param")
    if name == "unbalanced-3-lines":
        ratio = float(param) if param is not None else 1.0
        if not ratio >= 1.0:
            raise UnknownTemplate("cardinality ratio must be >= 1.0")
        return name, 3, ratio
    k = int(float(param)) if param is not None else 2
    if not 1 <= k <= 4:
        raise UnknownTemplate(f"{name} supports 1..4 structures, got {k}")
    return name, k, None


def _unbalanced_counts(ratio: float):
    light = max(2, round(300.0 / (2.0 * ratio + 1.0)))
    heavy = max(light, round(ratio * light))
    return [heavy, heavy, light]


def generate_scene(
    template: str,
    seed: int,
    inliers_per_structure: int | None = None,
    outliers: int | None = None,
    sigma: float | None = None,
) -> SyntheticScene:
    """Deterministically generate the named scene for the given seed."""
    family, k, ratio = _parse_template(template)
    rng = np.random.default_rng(seed)

    if family in ("lines-2d", "lines-3d", "unbalanced-3-lines"):
        per = inliers_per_structure if inliers_per_structure is not None else 100
        n_out = outliers if outliers is not None else 400
        s = sigma if sigma is not None else 1.0
        if family == "lines-2d":
            table = _LINES_2D[k]
            chunks, params = [], []
            counts = [per] * k
            for (center, angle, half), count in zip(table, counts):
                chunks.append(_line2d_points(rng, center, angle, half, count, s))
                theta = math.radians(angle)
                d = np.array([math.cos(theta), math.sin(theta)])
                ends = np.array([np.asarray(center) - half * d, np.asarray(center) + half * d])
                params.append(fit_minimal(ModelKind.LINE2D, ends))
            out_box = np.array([[0.0, 0.0], [_BOX, _BOX]])
            kind = ModelKind.LINE2D
        else:
            table = _LINES_3D[3] if family == "unbalanced-3-lines" else _LINES_3D[k]
            counts = _unbalanced_counts(ratio) if family == "unbalanced-3-lines" else [per] * k
            chunks, params = [], []
            for (center, direction, half), count in zip(table, counts):
                chunks.append(_line3d_points(rng, center, direction, half, count, s))
                d = np.asarray(direction, dtype=np.float64)
                d = d / np.linalg.norm(d)
                ends = np.array([np.asarray(center) - half * d, np.asarray(center) + half * d])
                params.append(fit_minimal(ModelKind.LINE3D, ends))
            out_box = np.array([[0.0, 0.0, 0.0], [_BOX, _BOX, _BOX]])
            kind = ModelKind.LINE3D
        outlier_pts = rng.uniform(out_box[0], out_box[1], (n_out, out_box.shape[1]))

    elif family == "circles":
        per = inliers_per_structure if inliers_per_structure is not None else 100
        n_out = outliers if outliers is not None else 400
        s = sigma if sigma is not None else 0.5
        table = _CIRCLES.get(k) or _circle_grid(k)
        chunks, params = [], []
        for cx, cy, r in table:
            chunks.append(_circle_points(rng, cx, cy, r, per, s))
            params.append(ModelParams(ModelKind.CIRCLE2D, np.array([cx, cy, r])))
        counts = [per] * k
        lo = np.array([min(c[0] - c[2] for c in table), min(c[1] - c[2] for c in table)]) - 30.0
        hi = np.array([max(c[0] + c[2] for c in table), max(c[1] + c[2] for c in table)]) + 30.0
        outlier_pts = rng.uniform(lo, hi, (n_out, 2))
        kind = ModelKind.CIRCLE2D

    elif family == "planar-homography":
        per = inliers_per_structure if inliers_per_structure is not None else 100
        n_out = outliers if outliers is not None else 200
        s = sigma if sigma is not None else 1.0
        chunks, params = [], []
        counts = [per] * k
        for j in range(k):
            px, py, pw, ph = _HOMOGRAPHY_PATCHES[j]
            h = _random_homography(rng)
            x1 = np.column_stack(
                [rng.uniform(px, px + pw, per), rng.uniform(py, py + ph, per)]
            )
            x2 = _apply_homography(h, x1) + rng.normal(0.0, s, (per, 2))
            chunks.append(np.hstack([x1, x2]))
            params.append(
                ModelParams(ModelKind.HOMOGRAPHY, _canonical((h / np.linalg.norm(h)).ravel()))
            )
        w, hgt = _IMAGE
        outlier_pts = np.column_stack(
            [
                rng.uniform(0.0, w, n_out),
                rng.uniform(0.0, hgt, n_out),
                rng.uniform(0.0, w, n_out),
                rng.uniform(0.0, hgt, n_out),
            ]
        )
        kind = ModelKind.HOMOGRAPHY

    else:  # two-view-motion
        per = inliers_per_structure if inliers_per_structure is not None else 100
        n_out = outliers if outliers is not None else 200
        s = sigma if sigma is not None else 1.0
        chunks, params = [], []
        counts = [per] * k
        kinv = np.linalg.inv(_CAMERA)
        for j in range(k):
            center = np.asarray(_MOTION_CENTERS[j])
            pts3d = center + rng.uniform(-1.2, 1.2, (per, 3))
            axis = rng.normal(size=3)
            angle = rng.uniform(math.radians(8.0), math.radians(18.0))
            R = _rotation(axis, angle)
            t = rng.uniform(-0.8, 0.8, 3)
            x1 = _project(pts3d)
            x2 = _project(pts3d @ R.T + t) + rng.normal(0.0, s, (per, 2))
            chunks.append(np.hstack([x1, x2]))
            tx = np.array([[0.0, -t[2], t[1]], [t[2], 0.0, -t[0]], [-t[1], t[0], 0.0]])
            f = kinv.T @ tx @ R @ kinv
            params.append(
                ModelParams(ModelKind.FUNDAMENTAL, _canonical((f / np.linalg.norm(f)).ravel()))
            )
        w, hgt = _IMAGE
        outlier_pts = np.column_stack(
            [
                rng.uniform(0.0, w, n_out),
                rng.uniform(0.0, hgt, n_out),
                rng.uniform(0.0, w, n_out),
                rng.uniform(0.0, hgt, n_out),
            ]
        )
        kind = ModelKind.FUNDAMENTAL

    coords = np.vstack(chunks + [outlier_pts])
    labels = np.concatenate(
        [np.full(c, j + 1, dtype=np.int64) for j, c in enumerate(counts)]
        + [np.zeros(n_out, dtype=np.int64)]
    )
    sigma_val = s
    return SyntheticScene(
        data=DataSet(coords, labels),
        true_labels=labels,
        kind=kind,
        true_params=tuple(params),
        inlier_sigma=float(sigma_val),
        outlier_count=int(n_out),
    )
