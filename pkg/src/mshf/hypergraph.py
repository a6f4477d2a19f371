"""Hypergraph construction, kernel-density vertex weighting and reduction.

Vertices are model hypotheses, hyperedges are data points; a vertex is
incident to the hyperedges whose residual lies within 2.5 estimated noise
scales.  Vertex weights are mean Epanechnikov kernel densities over the
incident hyperedges only, so residuals of non-inliers never contribute.

Reduction keeps the vertices carrying more information than the entropy of
the prior built from below-average weight gaps, discarding low-weight
vertices while provably retaining every above-average one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergedScale, EmptyHypergraph
from .models import DataSet, ModelKind, ModelParams, residuals
from .scale import INLIER_BAND, ScaleConfig, _ikose_sorted

# Closed-form Epanechnikov integrals over [-1, 1] used by the plug-in
# bandwidth: the integral of psi^2 and of lambda^2 * psi.
PSI_SQUARED_INTEGRAL = 0.6
SECOND_MOMENT_INTEGRAL = 0.2

# Keep the reduction's retention guarantee provable: with xi <= 1e-9 and at
# most 1e6 vertices the entropy threshold stays below -log(xi).
_XI_MAX = 1e-9
_DEFAULT_XI = 1e-12


def epanechnikov(u):
    """Epanechnikov kernel 0.75(1 - u^2) on [-1, 1], zero outside."""
    u = np.asarray(u, dtype=np.float64)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def epanechnikov_bandwidth(scale: float, n: int) -> float:
    """Plug-in window radius: (243*0.6 / (35*0.2*n))^(1/5) times the scale."""
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    const = 243.0 * PSI_SQUARED_INTEGRAL / (35.0 * SECOND_MOMENT_INTEGRAL * n)
    return const**0.2 * scale


def vertex_weight(residual_seq, incidence, scale: float, bandwidth: float) -> float:
    """Mean kernel density over the incident hyperedges only.

    Non-incident residuals are masked out entirely, which keeps the weight
    unaffected by outliers however extreme.
    """
    if not scale > 0.0 or not bandwidth > 0.0:
        raise ValueError("scale and bandwidth must be positive")
    inc = np.asarray(incidence, dtype=np.int64)
    if inc.size == 0:
        raise ValueError("incidence must be non-empty")
    r = np.asarray(residual_seq, dtype=np.float64)[inc]
    k = epanechnikov(r / bandwidth)
    return float(k.sum() / (scale * bandwidth) / inc.size)


@dataclass(frozen=True)
class Vertex:
    """One model hypothesis embedded in the hypergraph."""

    params: ModelParams
    scale: float
    incidence: np.ndarray  # sorted hyperedge indices (the inlier set)
    weight: float
    bandwidth: float
    incident_residuals: np.ndarray  # residuals at `incidence`, same order
    scale_floored: bool = False

    @property
    def degree(self) -> int:
        return int(self.incidence.size)


@dataclass(frozen=True)
class Hypergraph:
    """Immutable vertex collection over a fixed hyperedge universe."""

    vertices: tuple
    num_hyperedges: int
    kind: ModelKind

    def __len__(self) -> int:
        return len(self.vertices)

    def weights(self) -> np.ndarray:
        return np.array([v.weight for v in self.vertices], dtype=np.float64)


@dataclass(frozen=True)
class ReductionReport:
    prior: np.ndarray
    entropy: float
    retained: np.ndarray  # indices into the parent hypergraph's vertices
    xi: float
    vacuous: bool


def build_hypergraph(
    data: DataSet,
    hypotheses,
    scale_cfg: ScaleConfig | None = None,
    max_scale: float | None = None,
) -> Hypergraph:
    """Construct the hypergraph from a hypothesis pool.

    Per hypothesis: residuals against every point, scale via the iterated
    K-th ordered estimator, incidence within 2.5 scales, then bandwidth and
    weight.  Hypotheses whose degree falls below the minimal subset size
    (or whose scale iteration diverges) cannot support a model instance and
    are dropped.

    ``max_scale`` treats larger scale estimates as estimation failures and
    drops those hypotheses too: an "inlier noise scale" comparable to the
    data extent means the estimator latched onto the whole cloud rather
    than one structure, and such vertices carry no discriminative power.
    """
    hypotheses = list(hypotheses)
    if not hypotheses:
        raise ValueError("hypothesis sequence is empty")
    kind = hypotheses[0].kind
    if any(p.kind is not kind for p in hypotheses):
        raise ValueError("all hypotheses must share one model kind")
    scale_cfg = scale_cfg if scale_cfg is not None else ScaleConfig()
    coords = data.coords
    n = coords.shape[0]
    k = scale_cfg.k_for(n)
    min_degree = kind.minimal_size

    verts = []
    for params in hypotheses:
        r = residuals(params, coords)
        try:
            est = _ikose_sorted(np.sort(r), k, scale_cfg)
        except DivergedScale:
            continue
        if max_scale is not None and est.scale > max_scale:
            continue
        inc = np.flatnonzero(r <= INLIER_BAND * est.scale)
        if inc.size < min_degree:
            continue
        bandwidth = epanechnikov_bandwidth(est.scale, n)
        weight = vertex_weight(r, inc, est.scale, bandwidth)
        verts.append(
            Vertex(params, est.scale, inc, weight, bandwidth, r[inc], est.zero_floored)
        )
    if not verts:
        raise EmptyHypergraph("every hypothesis was dropped during construction")
    return Hypergraph(tuple(verts), n, kind)


def reduce_hypergraph(g: Hypergraph, xi: float = _DEFAULT_XI):
    """Entropy-threshold the vertices; returns (reduced graph, report).

    The prior of a vertex is its weight gap below the average, normalized
    over the positive gaps; at-or-above-average vertices receive the small
    constant ``xi`` instead.  Vertices whose information content -log(p)
    exceeds the prior's entropy are retained.  When no vertex sits below
    the average the reduction is vacuous and the graph is returned as is.
    """
    if len(g) == 0:
        raise ValueError("hypergraph is empty")
    if not 0.0 < xi <= _XI_MAX:
        raise ValueError(f"xi must lie in (0, {_XI_MAX}]")
    w = g.weights()
    gap = w.mean() - w
    pos = gap > 0.0
    vacuous = not bool(pos.any())
    if vacuous:
        prior = np.full(w.size, xi)
    else:
        prior = np.where(pos, gap / gap[pos].sum(), xi)
    entropy = float(-(prior * np.log(prior)).sum())
    retained = np.flatnonzero(-np.log(prior) > entropy)
    report = ReductionReport(prior, entropy, retained, xi, vacuous)
    if vacuous:
        return g, report
    reduced = Hypergraph(
        tuple(g.vertices[i] for i in retained), g.num_hyperedges, g.kind
    )
    return reduced, report
