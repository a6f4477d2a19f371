"""Mode seeking on the reduced hypergraph.

Covers preference vectors, the Tanimoto distance between them, overlap
neighbor sets, per-vertex minimum T-distances (the decision graph),
largest-drop mode selection, and the final inlier/outlier labeling.

Two algorithm variants are provided: ``mshf1`` compares every vertex with
all higher-weight vertices, ``mshf2`` restricts the comparison to the
vertex's overlap neighbors, which prunes most T-distance evaluations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import backend as _backend
from .hypergraph import Hypergraph, Vertex
from .scale import INLIER_BAND

DEFAULT_EPSILON = 0.8

# How the shared-hyperedge ratio of two vertices is measured against
# epsilon.  "dice" (2|A∩B| / (|A|+|B|), 1 for identical sets) is the
# default; "literal" keeps the raw |A∩B| / (|A|+|B|) ratio, which is
# bounded by 0.5, for auditing.
OVERLAP_MODES = {"dice": 0, "jaccard": 1, "literal": 2}

VARIANTS = {"mshf1": 1, "mshf2": 2}


@dataclass(frozen=True)
class PreferenceVector:
    """Per-hyperedge preference of one vertex: exp(-r/scale) on inliers."""

    values: np.ndarray
    support: np.ndarray


@dataclass(frozen=True)
class DecisionGraphEntry:
    vertex_index: int
    weight: float
    mtd: float
    omega_empty: bool


@dataclass(frozen=True)
class ModeSelection:
    modes: tuple  # vertex indices in decreasing-MTD rank order
    drop_position: int
    sorted_mtd: tuple  # non-increasing
    degenerate: bool


def preference_vector(vertex: Vertex, residual_seq) -> PreferenceVector:
    """exp(-r/scale) on hyperedges within the inlier band, zero elsewhere."""
    r = np.asarray(residual_seq, dtype=np.float64)
    mask = r <= INLIER_BAND * vertex.scale
    values = np.where(mask, np.exp(-r / vertex.scale), 0.0)
    return PreferenceVector(values, np.flatnonzero(mask))


def _as_values(v) -> np.ndarray:
    return v.values if isinstance(v, PreferenceVector) else np.asarray(v, dtype=np.float64)


def tanimoto_distance(a, b) -> float:
    """1 - <a,b> / (|a|^2 + |b|^2 - <a,b>); 0 = identical, 1 = disjoint."""
    va, vb = _as_values(a), _as_values(b)
    if va.shape != vb.shape:
        raise ValueError("preference vectors must have equal length")
    dot = float(va @ vb)
    den = float(va @ va) + float(vb @ vb) - dot
    if den <= 0.0:
        if np.any(va) or np.any(vb):
            return 0.0  # identical vectors with cancellation
        warnings.warn(
            "both preference vectors are zero; distance defined as 1",
            RuntimeWarning,
            stacklevel=2,
        )
        return 1.0
    return float(min(max(1.0 - dot / den, 0.0), 1.0))


def _overlap_ok(common, deg_a, deg_b, epsilon, mode: str) -> bool:
    # Multiplicative comparisons; keep these identical across backends.
    c = float(common)
    dsum = float(deg_a + deg_b)
    if mode == "dice":
        return 2.0 * c > epsilon * dsum
    if mode == "jaccard":
        return c > epsilon * (dsum - c)
    if mode == "literal":
        return c > epsilon * dsum
    raise ValueError(f"unknown overlap mode {mode!r}")


def neighbor_set(
    g: Hypergraph, i: int, epsilon: float = DEFAULT_EPSILON, overlap: str = "dice"
) -> np.ndarray:
    """Vertices sharing a large-enough fraction of hyperedges with vertex i."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    vi = g.vertices[i]
    out = []
    for j, vj in enumerate(g.vertices):
        if j == i:
            continue
        common = np.intersect1d(vi.incidence, vj.incidence, assume_unique=True).size
        if _overlap_ok(common, vi.degree, vj.degree, epsilon, overlap):
            out.append(j)
    return np.array(out, dtype=np.int64)


def _preference_csr(g: Hypergraph):
    degrees = np.array([v.degree for v in g.vertices], dtype=np.int64)
    indptr = np.zeros(len(g) + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    indices = np.concatenate(
        [v.incidence for v in g.vertices]
    ).astype(np.int32)
    values = np.concatenate(
        [np.exp(-v.incident_residuals / v.scale) for v in g.vertices]
    ).astype(np.float64)
    sqnorm = np.array(
        [
            float(seg @ seg)
            for seg in np.split(values, indptr[1:-1])
        ],
        dtype=np.float64,
    )
    return indptr, indices, values, sqnorm


def minimum_t_distance(
    g: Hypergraph,
    variant: str = "mshf2",
    epsilon: float = DEFAULT_EPSILON,
    overlap: str = "dice",
    backend: str | None = None,
) -> list[DecisionGraphEntry]:
    """Minimum T-distance of every vertex to its comparison set.

    mshf1: all strictly higher-weight vertices; the single top-weight
    vertex instead takes its maximum distance over all others.
    mshf2: higher-weight vertices restricted to overlap neighbors; a
    vertex with no higher-weight neighbor (a local peak, flagged in the
    returned entries) falls back to the unrestricted higher-weight set so
    that genuine authority peaks keep their large distances.  Weight ties
    rank the lower index higher.
    """
    if len(g) == 0:
        raise ValueError("hypergraph is empty")
    try:
        var = VARIANTS[str(variant).lower()]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    try:
        mode = OVERLAP_MODES[str(overlap).lower()]
    except KeyError:
        raise ValueError(f"unknown overlap mode {overlap!r}") from None
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")

    w = g.weights()
    order = np.lexsort((np.arange(len(g)), -w)).astype(np.int64)
    indptr, indices, values, sqnorm = _preference_csr(g)
    fn = _backend.kernel(backend)
    eta, flags = fn(
        indptr, indices, values, sqnorm, order, g.num_hyperedges, var, float(epsilon), mode
    )
    return [
        DecisionGraphEntry(i, float(w[i]), float(eta[i]), bool(flags[i]))
        for i in range(len(g))
    ]


def select_modes(entries) -> ModeSelection:
    """Cut the MTD ranking at the largest consecutive drop.

    Entries are ranked by MTD (ties: higher weight, then lower index); the
    modes are everything above the biggest drop, earliest drop on ties.
    An all-equal ranking degenerates to the single top-weight vertex.
    """
    entries = list(entries)
    if len(entries) < 2:
        raise ValueError("need at least two decision-graph entries")
    ranked = sorted(entries, key=lambda e: (-e.mtd, -e.weight, e.vertex_index))
    mtd = np.array([e.mtd for e in ranked], dtype=np.float64)
    drops = mtd[:-1] - mtd[1:]
    pos = int(np.argmax(drops))  # earliest index wins ties
    degenerate = bool(drops[pos] <= 0.0)
    if degenerate:
        pos = 0
    modes = tuple(e.vertex_index for e in ranked[: pos + 1])
    return ModeSelection(modes, pos + 1, tuple(float(v) for v in mtd), degenerate)


def derive_labels(g: Hypergraph, modes, data) -> np.ndarray:
    """Label every point by the containing mode with the smallest r/scale.

    Points outside every mode's inlier band stay 0 (outliers); points
    claimed by several modes go to the one with the smallest normalized
    residual, first mode winning exact ties.
    """
    modes = list(modes)
    if not modes:
        raise ValueError("modes must be non-empty")
    n = g.num_hyperedges
    if data is not None and len(data) != n:
        raise ValueError("data length does not match the hyperedge universe")
    labels = np.zeros(n, dtype=np.int64)
    best = np.full(n, np.inf)
    for lab, vi in enumerate(modes, start=1):
        v = g.vertices[vi]
        normalized = v.incident_residuals / v.scale
        edges = v.incidence
        better = normalized < best[edges]
        target = edges[better]
        labels[target] = lab
        best[target] = normalized[better]
    return labels
