"""Inlier noise-scale estimation from absolute residuals.

The estimator divides the K-th smallest absolute residual by the standard
normal quantile at (1 + K/n_in)/2, where n_in is the running inlier count
(residuals within 2.5 estimated scales, starting from all of them), and
iterates that update to a fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergedScale

# Residual band, in estimated scales, counted as inliers; 2.5 sigma covers
# about 98% of a zero-mean Gaussian.
INLIER_BAND = 2.5

# Coefficients of Acklam's rational approximation to the inverse normal CDF.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF.

    Acklam's rational approximation followed by one Halley refinement
    against the exact CDF, which brings the result to double precision.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    elif p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    else:
        q = p - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass(frozen=True)
class ScaleConfig:
    """K selection and iteration limits for the scale estimator."""

    k_fraction: float = 0.10
    k_absolute: int | None = None
    max_iterations: int = 50
    convergence_tol: float = 1e-6
    scale_floor: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.k_fraction <= 1.0:
            raise ValueError("k_fraction must lie in (0, 1]")
        if self.k_absolute is not None and self.k_absolute < 1:
            raise ValueError("k_absolute must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if self.scale_floor <= 0:
            raise ValueError("scale_floor must be positive")

    def k_for(self, n: int) -> int:
        k = self.k_absolute if self.k_absolute is not None else round(self.k_fraction * n)
        return int(min(max(k, 1), n))


@dataclass(frozen=True)
class ScaleEstimate:
    scale: float
    iterations: int
    converged: bool
    inlier_count: int
    zero_floored: bool


def _ikose_sorted(r_sorted: np.ndarray, k: int, cfg: ScaleConfig) -> ScaleEstimate:
    # Core iteration over a pre-sorted residual vector.
    n = int(r_sorted.shape[0])
    rk = float(r_sorted[k - 1])
    if rk <= 0.0:
        # The K-th ordered residual is exactly zero; no quantile scaling is
        # possible, so report the configured floor instead of dividing by it.
        n_in = int(np.searchsorted(r_sorted, INLIER_BAND * cfg.scale_floor, side="right"))
        return ScaleEstimate(cfg.scale_floor, 0, True, n_in, True)
    n_in = n
    s = 0.0
    s_prev = 0.0
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        iterations = it
        if n_in <= k:
            raise DivergedScale(f"inlier count {n_in} fell to K={k}")
        s = rk / normal_quantile(0.5 * (1.0 + k / n_in))
        if it > 1 and abs(s - s_prev) <= cfg.convergence_tol * s_prev:
            converged = True
            break
        s_prev = s
        n_in = int(np.searchsorted(r_sorted, INLIER_BAND * s, side="right"))
    final_count = int(np.searchsorted(r_sorted, INLIER_BAND * s, side="right"))
    return ScaleEstimate(float(s), iterations, converged, final_count, False)


def ikose_scale_detailed(abs_residuals, cfg: ScaleConfig | None = None) -> ScaleEstimate:
    """Estimate the inlier noise scale; returns the full iteration record."""
    cfg = cfg if cfg is not None else ScaleConfig()
    r = np.asarray(abs_residuals, dtype=np.float64).ravel()
    if r.size == 0:
        raise ValueError("residual sequence is empty")
    if not np.all(np.isfinite(r)) or np.any(r < 0.0):
        raise ValueError("residuals must be finite and nonnegative")
    r = np.sort(r)
    return _ikose_sorted(r, cfg.k_for(r.size), cfg)


def ikose_scale(abs_residuals, cfg: ScaleConfig | None = None) -> float:
    """Estimated inlier noise scale (strictly positive)."""
    return ikose_scale_detailed(abs_residuals, cfg).scale
