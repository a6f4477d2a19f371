"""Fitting-error metric and repeated-trial experiment driver.

The error is the mislabeled fraction (as a percentage) after matching
estimated clusters to ground-truth clusters one-to-one by maximum
agreement; the outlier label 0 only ever matches itself, and unmatched
clusters count all of their points as mislabeled.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch
from .pipeline import RunConfig, fit
from .synth import generate_scene


def fitting_error(estimated, truth) -> float:
    """Mislabeling percentage under the optimal cluster matching."""
    est = np.asarray(estimated, dtype=np.int64).ravel()
    tru = np.asarray(truth, dtype=np.int64).ravel()
    if est.shape != tru.shape:
        raise LengthMismatch(
            f"label sequences differ in length: {est.size} vs {tru.size}"
        )
    n = est.size
    if n == 0:
        raise ValueError("label sequences are empty")
    correct = int(np.sum((est == 0) & (tru == 0)))
    est_ids = np.unique(est[est > 0])
    tru_ids = np.unique(tru[tru > 0])
    if est_ids.size and tru_ids.size:
        table = np.zeros((est_ids.size, tru_ids.size), dtype=np.int64)
        for a, ea in enumerate(est_ids):
            mask = est == ea
            for b, tb in enumerate(tru_ids):
                table[a, b] = int(np.sum(mask & (tru == tb)))
        rows, cols = linear_sum_assignment(table, maximize=True)
        correct += int(table[rows, cols].sum())
    return 100.0 * (1.0 - correct / n)


@dataclass
class TrialReport:
    """Aggregate statistics over seeded repetitions of one experiment."""

    template: str
    variant: str
    trials: int
    base_seed: int
    errors: tuple
    instance_counts: tuple
    mean_seconds: float

    @property
    def std(self) -> float:
        return float(np.std(self.errors))  # population std: one trial gives 0

    @property
    def avg(self) -> float:
        return float(np.mean(self.errors))

    @property
    def min(self) -> float:
        return float(np.min(self.errors))

    @property
    def count_histogram(self) -> dict:
        hist: dict[int, int] = {}
        for c in self.instance_counts:
            hist[c] = hist.get(c, 0) + 1
        return dict(sorted(hist.items()))

    def to_dict(self) -> dict:
        return {
            "template": self.template,
            "variant": self.variant,
            "trials": self.trials,
            "base-seed": self.base_seed,
            "errors": list(self.errors),
            "instance-counts": list(self.instance_counts),
            "std": self.std,
            "avg": self.avg,
            "min": self.min,
            "time": self.mean_seconds,
            "count-histogram": {str(k): v for k, v in self.count_histogram.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def format_table(self) -> str:
        """Aligned Std./Avg./Min./Time rows, one statistic per line."""
        lines = [
            f"{self.template}  ({self.variant}, {self.trials} trials)",
            f"  Std.   {self.std:8.2f}",
            f"  Avg.   {self.avg:8.2f}",
            f"  Min.   {self.min:8.2f}",
            f"  Time   {self.mean_seconds:8.2f}",
        ]
        return "\n".join(lines)


def trial_seeds(seed: int) -> tuple[int, int]:
    """Derive independent (scene, sampler) seeds from one trial seed."""
    scene_ss, sampler_ss = np.random.SeedSequence(seed).spawn(2)
    return (
        int(scene_ss.generate_state(1, np.uint64)[0]),
        int(sampler_ss.generate_state(1, np.uint64)[0]),
    )


def run_trials(
    template: str, config: RunConfig, trials: int, base_seed: int
) -> TrialReport:
    """Repeat generate+fit+score over consecutive seeds and aggregate."""
    if trials < 1:
        raise ValueError("trials must be positive")
    errors = []
    counts = []
    seconds = []
    for t in range(trials):
        scene_seed, sampler_seed = trial_seeds(base_seed + t)
        scene = generate_scene(template, scene_seed)
        cfg = replace(config, kind=scene.kind, rng_seed=sampler_seed)
        start = time.perf_counter()
        result = fit(scene.data, cfg)
        seconds.append(time.perf_counter() - start)
        errors.append(fitting_error(result.labels, scene.true_labels))
        counts.append(result.num_structures)
    return TrialReport(
        template=str(template),
        variant=config.variant,
        trials=trials,
        base_seed=base_seed,
        errors=tuple(errors),
        instance_counts=tuple(counts),
        mean_seconds=float(np.mean(seconds)),
    )
