"""Model-hypothesis generation by proximity-weighted minimal-subset sampling.

The first member of every subset is drawn uniformly; the remaining members
are drawn without replacement with probability proportional to
exp(-d^2 / sigma^2), where d is the Euclidean distance to the first member.
Sampling is sequential and fully determined by the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSubset, InsufficientData, TooManyDegenerate
from .models import DataSet, ModelKind, ModelParams, fit_minimal_all


@dataclass(frozen=True)
class SamplerConfig:
    hypothesis_count: int
    proximity_sigma: float | None = None  # None: 10% of the bbox diagonal
    rng_seed: int = 0
    max_retries_per_hypothesis: int = 50

    def __post_init__(self):
        if self.hypothesis_count < 1:
            raise ValueError("hypothesis_count must be positive")
        if self.proximity_sigma is not None and not self.proximity_sigma > 0:
            raise ValueError("proximity_sigma must be positive")
        if self.max_retries_per_hypothesis < 1:
            raise ValueError("max_retries_per_hypothesis must be positive")


@dataclass
class HypothesisPool:
    """Sampled hypotheses plus their generating subsets, for auditing."""

    params: list[ModelParams]
    subsets: list[np.ndarray]
    skipped: int
    proximity_sigma: float


def default_proximity_sigma(coords: np.ndarray) -> float:
    """10% of the data bounding-box diagonal (1.0 for degenerate spans)."""
    span = coords.max(axis=0) - coords.min(axis=0)
    diag = float(np.linalg.norm(span))
    return 0.1 * diag if diag > 0.0 else 1.0


def _draw_subset(rng, coords, k, inv_sigma_sq):
    n = coords.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    if k > 1:
        d2 = ((coords - coords[first]) ** 2).sum(axis=1)
        w = np.exp(-d2 * inv_sigma_sq)
        avail = np.ones(n, dtype=bool)
        w[first] = 0.0
        avail[first] = False
        for _ in range(k - 1):
            total = float(w.sum())
            if total > 0.0 and np.isfinite(total):
                p = w / total
            else:
                # All proximity weights underflowed: fall back to uniform
                # over the remaining points.
                p = avail / avail.sum()
            j = int(rng.choice(n, p=p))
            chosen.append(j)
            w[j] = 0.0
            avail[j] = False
    return np.array(chosen, dtype=np.int64)


def sample_pool(data: DataSet, kind, cfg: SamplerConfig) -> HypothesisPool:
    """Draw minimal subsets and fit them until the pool is full.

    Each of the ``hypothesis_count`` slots retries degenerate draws up to
    ``max_retries_per_hypothesis`` times and is then skipped; more than 50%
    skipped slots aborts with :class:`TooManyDegenerate`.
    """
    kind = ModelKind.parse(kind)
    coords = data.coords
    k = kind.minimal_size
    if len(data) < k:
        raise InsufficientData(
            f"{len(data)} observations < minimal subset size {k} for {kind.value}"
        )
    sigma = (
        cfg.proximity_sigma
        if cfg.proximity_sigma is not None
        else default_proximity_sigma(coords)
    )
    inv_sigma_sq = 1.0 / (sigma * sigma)
    rng = np.random.default_rng(cfg.rng_seed)

    target = cfg.hypothesis_count
    params: list[ModelParams] = []
    subsets: list[np.ndarray] = []
    skipped = 0
    for _slot in range(target):
        if len(params) >= target:
            break
        for _ in range(cfg.max_retries_per_hypothesis):
            subset = _draw_subset(rng, coords, k, inv_sigma_sq)
            try:
                solutions = fit_minimal_all(kind, coords[subset])
            except DegenerateSubset:
                continue
            for p in solutions:
                params.append(p)
                subsets.append(subset)
            break
        else:
            skipped += 1
    if 2 * skipped > target:
        raise TooManyDegenerate(
            f"{skipped} of {target} sampling slots exhausted their retries"
        )
    del params[target:]
    del subsets[target:]
    return HypothesisPool(params, subsets, skipped, sigma)


def sample_hypotheses(data: DataSet, kind, cfg: SamplerConfig) -> list[ModelParams]:
    """Sampled hypothesis parameters only (see :func:`sample_pool`)."""
    return sample_pool(data, kind, cfg).params
