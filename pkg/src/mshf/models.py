"""Geometric model families: minimal solvers, residuals, degeneracy tests.

Supported families: 2D/3D lines, circles, homographies and fundamental
matrices.  Each family provides an exact minimal-subset solver and an
absolute geometric residual: point-to-line distance for lines, radial
offset for circles, and the Sampson (first-order geometric) distance for
the two-view models.

All solvers are pure functions; degenerate subsets raise
:class:`~mshf.errors.DegenerateSubset` instead of returning garbage.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateSubset

# Solver systems whose relative conditioning is worse than this are rejected
# as degenerate (collinear circle points, coincident points, and so on).
CONDITION_CAP = 1e12
_RCOND = 1.0 / CONDITION_CAP

# Exact-fit tolerance for solutions emitted by the seven-point solver, in
# scene units relative to the coordinate magnitude.
_MINIMAL_FIT_TOL = 1e-7


class ModelKind(Enum):
    """Model family tag; the value doubles as the file/CLI spelling."""

    LINE2D = "line2d"
    LINE3D = "line3d"
    CIRCLE2D = "circle2d"
    HOMOGRAPHY = "homography"
    FUNDAMENTAL = "fundamental"

    @property
    def dim(self) -> int:
        """Observation length: 2/3 for points, 4 for a correspondence."""
        return _DIM[self]

    @property
    def minimal_size(self) -> int:
        """Smallest number of observations that determines a hypothesis."""
        return _MINIMAL[self]

    @classmethod
    def parse(cls, name) -> "ModelKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(f"unknown model kind: {name!r}") from None


_DIM = {
    ModelKind.LINE2D: 2,
    ModelKind.LINE3D: 3,
    ModelKind.CIRCLE2D: 2,
    ModelKind.HOMOGRAPHY: 4,
    ModelKind.FUNDAMENTAL: 4,
}
_MINIMAL = {
    ModelKind.LINE2D: 2,
    ModelKind.LINE3D: 2,
    ModelKind.CIRCLE2D: 3,
    ModelKind.HOMOGRAPHY: 4,
    ModelKind.FUNDAMENTAL: 7,
}


def minimal_subset_size(kind) -> int:
    return ModelKind.parse(kind).minimal_size


@dataclass(frozen=True)
class DataSet:
    """Ordered observations: one row of ``coords`` per observation.

    Rows are 2D/3D points or 4D correspondences (x, y, x', y').  Optional
    ``labels`` carry ground truth with 0 reserved for outliers.
    """

    coords: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise ValueError("coords must be a non-empty (n, d) array")
        if not np.all(np.isfinite(coords)):
            raise ValueError("all observation components must be finite")
        object.__setattr__(self, "coords", coords)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (coords.shape[0],):
                raise ValueError("labels length must match the observation count")
            if np.any(labels < 0):
                raise ValueError("labels must be nonnegative (0 = outlier)")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.coords.shape[0])


@dataclass(frozen=True)
class ModelParams:
    """One model hypothesis: family tag plus parameter vector.

    Layouts: Line2D (a, b, c) for ax+by+c=0 with a^2+b^2=1; Line3D point
    followed by a unit direction; Circle2D (cx, cy, r); Homography and
    Fundamental are row-major 3x3 with unit Frobenius norm, the latter
    rank-2 by construction.
    """

    kind: ModelKind
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=np.float64)
        )


def _canonical(v: np.ndarray) -> np.ndarray:
    # Fix the sign ambiguity of homogeneous vectors deterministically.
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


# ---------------------------------------------------------------------------
# Minimal solvers
# ---------------------------------------------------------------------------


def _fit_line2d(pts):
    d = pts[1] - pts[0]
    nrm = float(np.hypot(d[0], d[1]))
    if nrm <= (1.0 + float(np.abs(pts).max())) * _RCOND:
        raise DegenerateSubset("coincident points")
    a, b = -d[1] / nrm, d[0] / nrm
    c = -(a * pts[0, 0] + b * pts[0, 1])
    v = np.array([a, b, c])
    if a < 0 or (a == 0 and b < 0):
        v = -v
    return [v]


def _fit_line3d(pts):
    d = pts[1] - pts[0]
    nrm = float(np.linalg.norm(d))
    if nrm <= (1.0 + float(np.abs(pts).max())) * _RCOND:
        raise DegenerateSubset("coincident points")
    d = d / nrm
    for comp in d:
        if comp != 0.0:
            if comp < 0.0:
                d = -d
            break
    return [np.concatenate([pts[0], d])]


def _fit_circle2d(pts):
    p1, p2, p3 = pts
    r1 = 2.0 * (p2 - p1)
    r2 = 2.0 * (p3 - p1)
    det = r1[0] * r2[1] - r1[1] * r2[0]
    scale = float(np.linalg.norm(r1) * np.linalg.norm(r2))
    if scale == 0.0 or abs(det) <= scale * _RCOND:
        raise DegenerateSubset("collinear or coincident points")
    b1 = float(p2 @ p2 - p1 @ p1)
    b2 = float(p3 @ p3 - p1 @ p1)
    cx = (b1 * r2[1] - b2 * r1[1]) / det
    cy = (r1[0] * b2 - r2[0] * b1) / det
    r = float(np.hypot(p1[0] - cx, p1[1] - cy))
    if r <= 0.0:
        raise DegenerateSubset("zero radius")
    return [np.array([cx, cy, r])]


def _hartley(pts):
    # Similarity normalization: centroid to the origin, mean radius sqrt(2).
    c = pts.mean(axis=0)
    d = float(np.sqrt(((pts - c) ** 2).sum(axis=1)).mean())
    if d <= (1.0 + float(np.abs(pts).max())) * _RCOND:
        raise DegenerateSubset("coincident image points")
    s = np.sqrt(2.0) / d
    T = np.array([[s, 0.0, -s * c[0]], [0.0, s, -s * c[1]], [0.0, 0.0, 1.0]])
    return (pts - c) * s, T


def _fit_homography(corr):
    sn, T1 = _hartley(corr[:, :2])
    dn, T2 = _hartley(corr[:, 2:])
    A = np.zeros((8, 9))
    for i in range(4):
        x, y = sn[i]
        xp, yp = dn[i]
        A[2 * i] = [-x, -y, -1.0, 0.0, 0.0, 0.0, xp * x, xp * y, xp]
        A[2 * i + 1] = [0.0, 0.0, 0.0, -x, -y, -1.0, yp * x, yp * y, yp]
    _, s, vt = np.linalg.svd(A)
    # Nullity >= 2 (three collinear points, repeated correspondences, ...)
    # leaves the homography underdetermined.
    if s[7] <= s[0] * _RCOND:
        raise DegenerateSubset("degenerate correspondence configuration")
    H = np.linalg.inv(T2) @ vt[-1].reshape(3, 3) @ T1
    return [_canonical((H / np.linalg.norm(H)).ravel())]


# Interpolation nodes recovering a cubic's coefficients from 4 evaluations.
_CUBIC_NODES = (-1.0, 0.0, 1.0, 2.0)
_CUBIC_VAND_INV = np.linalg.inv(
    np.array([[a**3, a**2, a, 1.0] for a in _CUBIC_NODES])
)


def _fit_fundamental(corr):
    sn, T1 = _hartley(corr[:, :2])
    dn, T2 = _hartley(corr[:, 2:])
    x, y = sn[:, 0], sn[:, 1]
    xp, yp = dn[:, 0], dn[:, 1]
    A = np.column_stack(
        [xp * x, xp * y, xp, yp * x, yp * y, yp, x, y, np.ones(7)]
    )
    _, s, vt = np.linalg.svd(A)
    if s[6] <= s[0] * _RCOND:
        raise DegenerateSubset("rank-deficient epipolar system")
    F1 = vt[-1].reshape(3, 3)
    F2 = vt[-2].reshape(3, 3)
    # det(a*F1 + (1-a)*F2) is a cubic in a; recover it exactly from 4 nodes
    # and keep the real roots.
    g = np.array([np.linalg.det(a * F1 + (1.0 - a) * F2) for a in _CUBIC_NODES])
    coeffs = _CUBIC_VAND_INV @ g
    top = float(np.abs(coeffs).max())
    if top == 0.0:
        raise DegenerateSubset("identically singular pencil")
    lead = 0
    while lead < 3 and abs(coeffs[lead]) <= 1e-12 * top:
        lead += 1
    tol = _MINIMAL_FIT_TOL * (1.0 + float(np.abs(corr).max()))
    out = []
    for root in np.roots(coeffs[lead:]):
        if abs(root.imag) > 1e-8 * (1.0 + abs(root.real)):
            continue
        a = float(root.real)
        F = a * F1 + (1.0 - a) * F2
        u, sv, vvt = np.linalg.svd(F)
        sv[2] = 0.0
        F = T2.T @ ((u * sv) @ vvt) @ T1
        nrm = float(np.linalg.norm(F))
        if nrm == 0.0 or not np.isfinite(nrm):
            continue
        v = _canonical((F / nrm).ravel())
        if float(_res_fundamental(v, corr).max()) > tol:
            continue
        if all(float(np.abs(v - seen).max()) > 1e-9 for seen in out):
            out.append(v)
    if not out:
        raise DegenerateSubset("no real rank-2 solution fits the subset")
    return out


_FIT = {
    ModelKind.LINE2D: _fit_line2d,
    ModelKind.LINE3D: _fit_line3d,
    ModelKind.CIRCLE2D: _fit_circle2d,
    ModelKind.HOMOGRAPHY: _fit_homography,
    ModelKind.FUNDAMENTAL: _fit_fundamental,
}


def fit_minimal_all(kind, subset) -> list[ModelParams]:
    """Fit one minimal subset; returns every admissible solution.

    All families are single-solution except the fundamental matrix, whose
    seven-point system admits up to three rank-2 solutions.
    """
    kind = ModelKind.parse(kind)
    pts = np.asarray(subset, dtype=np.float64)
    if pts.shape != (kind.minimal_size, kind.dim):
        raise ValueError(
            f"{kind.value} expects shape {(kind.minimal_size, kind.dim)}, "
            f"got {pts.shape}"
        )
    if not np.all(np.isfinite(pts)):
        raise ValueError("subset must be finite")
    return [ModelParams(kind, v) for v in _FIT[kind](pts)]


def fit_minimal(kind, subset) -> ModelParams:
    """Single-solution form of :func:`fit_minimal_all` (first solution)."""
    return fit_minimal_all(kind, subset)[0]


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


def _res_line2d(v, xy):
    a, b, c = v
    # Dividing by hypot keeps the distance invariant to rescaling (a, b, c).
    return np.abs(xy[:, 0] * a + xy[:, 1] * b + c) / np.hypot(a, b)


def _res_line3d(v, xyz):
    d = v[3:] / np.linalg.norm(v[3:])
    rel = xyz - v[:3]
    return np.linalg.norm(np.cross(rel, d), axis=1)


def _res_circle2d(v, xy):
    cx, cy, r = v
    return np.abs(np.hypot(xy[:, 0] - cx, xy[:, 1] - cy) - r)


def _res_homography(v, corr):
    h = v.reshape(3, 3)
    x, y, xp, yp = corr.T
    u = h[0, 0] * x + h[0, 1] * y + h[0, 2]
    vv = h[1, 0] * x + h[1, 1] * y + h[1, 2]
    w = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    e1 = xp * w - u
    e2 = yp * w - vv
    # Jacobian of the algebraic error wrt (x, y, x', y').
    j11 = xp * h[2, 0] - h[0, 0]
    j12 = xp * h[2, 1] - h[0, 1]
    j21 = yp * h[2, 0] - h[1, 0]
    j22 = yp * h[2, 1] - h[1, 1]
    a = j11 * j11 + j12 * j12 + w * w
    c = j21 * j21 + j22 * j22 + w * w
    b = j11 * j21 + j12 * j22
    num = c * e1 * e1 - 2.0 * b * e1 * e2 + a * e2 * e2
    det = np.maximum(a * c - b * b, 1e-300)
    return np.sqrt(np.maximum(num / det, 0.0))


def _res_fundamental(v, corr):
    f = v.reshape(3, 3)
    x, y, xp, yp = corr.T
    l1 = f[0, 0] * x + f[0, 1] * y + f[0, 2]
    l2 = f[1, 0] * x + f[1, 1] * y + f[1, 2]
    l3 = f[2, 0] * x + f[2, 1] * y + f[2, 2]
    e = xp * l1 + yp * l2 + l3
    m1 = f[0, 0] * xp + f[1, 0] * yp + f[2, 0]
    m2 = f[0, 1] * xp + f[1, 1] * yp + f[2, 1]
    denom = np.maximum(l1 * l1 + l2 * l2 + m1 * m1 + m2 * m2, 1e-300)
    return np.abs(e) / np.sqrt(denom)


_RES = {
    ModelKind.LINE2D: _res_line2d,
    ModelKind.LINE3D: _res_line3d,
    ModelKind.CIRCLE2D: _res_circle2d,
    ModelKind.HOMOGRAPHY: _res_homography,
    ModelKind.FUNDAMENTAL: _res_fundamental,
}


def residuals(params: ModelParams, coords) -> np.ndarray:
    """Absolute geometric residuals of all observation rows (vectorized)."""
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != params.kind.dim:
        raise ValueError(
            f"{params.kind.value} expects (n, {params.kind.dim}) observations"
        )
    return _RES[params.kind](params.values, coords)


def residual(params: ModelParams, obs) -> float:
    """Absolute geometric residual of a single observation."""
    return float(residuals(params, np.asarray(obs, dtype=np.float64)[None, :])[0])
