"""End-to-end fitting driver.

Ties the stages together: proximity sampling, hypergraph construction,
entropy reduction, minimum-T-distance computation, largest-drop mode
selection and labeling.  Each stage failure is re-raised as a
:class:`PipelineStageError` naming the stage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MshfError, PipelineStageError
from .hypergraph import Hypergraph, ReductionReport, build_hypergraph, reduce_hypergraph
from .models import DataSet, ModelKind, ModelParams
from .modes import (
    DecisionGraphEntry,
    ModeSelection,
    OVERLAP_MODES,
    VARIANTS,
    derive_labels,
    minimum_t_distance,
    select_modes,
)
from .sampling import HypothesisPool, SamplerConfig, sample_pool
from .scale import ScaleConfig


@dataclass(frozen=True)
class RunConfig:
    """Full parameterization of one fitting run.

    ``proximity_sigma=None`` means 10% of the data bounding-box diagonal;
    the materialized value is echoed into every result file.
    """

    kind: ModelKind | str | None = None
    hypothesis_count: int = 5000
    k_fraction: float = 0.10
    epsilon: float = 0.8
    variant: str = "mshf2"
    xi: float = 1e-12
    proximity_sigma: float | None = None
    rng_seed: int = 0
    neighbor_overlap: str = "dice"
    max_retries: int = 50
    backend: str | None = None
    # Hypotheses whose estimated noise scale exceeds this fraction of the
    # data bounding-box diagonal are dropped as scale-estimation failures;
    # None disables the guard.
    scale_cap_fraction: float | None = 0.05

    def __post_init__(self):
        if self.kind is not None:
            object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        variant = str(self.variant).lower()
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "variant", variant)
        overlap = str(self.neighbor_overlap).lower()
        if overlap not in OVERLAP_MODES:
            raise ValueError(f"unknown neighbor overlap mode {self.neighbor_overlap!r}")
        object.__setattr__(self, "neighbor_overlap", overlap)
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.hypothesis_count < 1:
            raise ValueError("hypothesis_count must be positive")
        if self.scale_cap_fraction is not None and self.scale_cap_fraction <= 0:
            object.__setattr__(self, "scale_cap_fraction", None)

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(
            hypothesis_count=self.hypothesis_count,
            proximity_sigma=self.proximity_sigma,
            rng_seed=self.rng_seed,
            max_retries_per_hypothesis=self.max_retries,
        )

    def scale_config(self) -> ScaleConfig:
        return ScaleConfig(k_fraction=self.k_fraction)

    def echo(self, proximity_sigma: float | None = None) -> dict:
        """All effective settings as a flat, file-friendly mapping."""
        sigma = proximity_sigma if proximity_sigma is not None else self.proximity_sigma
        return {
            "kind": self.kind.value if self.kind is not None else "",
            "hypothesis-count": self.hypothesis_count,
            "k-fraction": self.k_fraction,
            "epsilon": self.epsilon,
            "variant": self.variant,
            "xi": self.xi,
            "proximity-sigma": sigma if sigma is not None else "",
            "rng-seed": self.rng_seed,
            "neighbor-overlap": self.neighbor_overlap,
            "max-retries": self.max_retries,
            "scale-cap-fraction": (
                self.scale_cap_fraction if self.scale_cap_fraction is not None else ""
            ),
            "backend": self.backend or "auto",
        }


@dataclass(frozen=True)
class ModeInfo:
    """One selected mode, reported against the full hypergraph."""

    label: int
    vertex_index: int  # index into the pre-reduction vertex order
    params: ModelParams
    scale: float
    weight: float
    mtd: float
    inliers: np.ndarray


@dataclass
class FitResult:
    config_echo: dict
    labels: np.ndarray
    modes: list
    decision_rows: list  # (vertex, weight, mtd|None, retained, is_mode), weight-ascending
    selection: ModeSelection
    entropy: float
    retained_count: int
    total_vertices: int
    timings: dict = field(default_factory=dict)

    @property
    def num_structures(self) -> int:
        return len(self.modes)


@dataclass
class PreparedHypergraph:
    """Sampling + construction + reduction output, reusable across variants."""

    data: DataSet
    config: RunConfig
    pool: HypothesisPool
    full: Hypergraph
    reduced: Hypergraph
    report: ReductionReport
    timings: dict


def _run_stage(timings: dict, name: str, fn, *args, **kwargs):
    start = time.perf_counter()
    try:
        out = fn(*args, **kwargs)
    except MshfError as exc:
        raise PipelineStageError(name, exc) from exc
    timings[name] = timings.get(name, 0.0) + (time.perf_counter() - start)
    return out


def prepare(data: DataSet, config: RunConfig) -> PreparedHypergraph:
    """Run the variant-independent stages once."""
    if config.kind is None:
        raise ValueError("config.kind is required")
    timings: dict = {}
    pool = _run_stage(
        timings, "sampling", sample_pool, data, config.kind, config.sampler_config()
    )
    max_scale = None
    if config.scale_cap_fraction is not None:
        span = data.coords.max(axis=0) - data.coords.min(axis=0)
        max_scale = config.scale_cap_fraction * float(np.linalg.norm(span))
    full = _run_stage(
        timings,
        "hypergraph",
        build_hypergraph,
        data,
        pool.params,
        config.scale_config(),
        max_scale,
    )
    reduced, report = _run_stage(timings, "reduction", reduce_hypergraph, full, config.xi)
    return PreparedHypergraph(data, config, pool, full, reduced, report, timings)


def seek_modes(prep: PreparedHypergraph, variant: str | None = None) -> FitResult:
    """Mode seeking, selection and labeling on a prepared hypergraph."""
    cfg = prep.config if variant is None else replace(prep.config, variant=variant)
    timings = dict(prep.timings)
    entries = _run_stage(
        timings,
        "mode-seeking",
        minimum_t_distance,
        prep.reduced,
        cfg.variant,
        cfg.epsilon,
        cfg.neighbor_overlap,
        cfg.backend,
    )

    def _select_and_label():
        if len(entries) == 1:
            selection = ModeSelection((0,), 1, (entries[0].mtd,), False)
        else:
            selection = select_modes(entries)
        labels = derive_labels(prep.reduced, selection.modes, prep.data)
        return selection, labels

    selection, labels = _run_stage(timings, "selection", _select_and_label)

    retained = prep.report.retained
    mtd_by_orig = {int(retained[e.vertex_index]): e.mtd for e in entries}
    modes = []
    mode_orig = []
    for lab, reduced_idx in enumerate(selection.modes, start=1):
        vertex = prep.reduced.vertices[reduced_idx]
        orig = int(retained[reduced_idx])
        mode_orig.append(orig)
        modes.append(
            ModeInfo(
                label=lab,
                vertex_index=orig,
                params=vertex.params,
                scale=vertex.scale,
                weight=vertex.weight,
                mtd=mtd_by_orig[orig],
                inliers=vertex.incidence.copy(),
            )
        )

    retained_set = set(int(i) for i in retained)
    mode_set = set(mode_orig)
    weights = prep.full.weights()
    row_order = np.lexsort((np.arange(len(prep.full)), weights))
    decision_rows = [
        (
            int(i),
            float(weights[i]),
            mtd_by_orig.get(int(i)),
            int(i) in retained_set,
            int(i) in mode_set,
        )
        for i in row_order
    ]

    return FitResult(
        config_echo=cfg.echo(prep.pool.proximity_sigma),
        labels=labels,
        modes=modes,
        decision_rows=decision_rows,
        selection=selection,
        entropy=prep.report.entropy,
        retained_count=int(retained.size),
        total_vertices=len(prep.full),
        timings=timings,
    )


def fit(data: DataSet, config: RunConfig) -> FitResult:
    """One-shot pipeline: prepare the hypergraph and seek modes."""
    return seek_modes(prepare(data, config))
