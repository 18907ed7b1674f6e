"""
Lifting/Driving Ratio Estimator
===============================

Windowed least-squares estimate of bucket-height gain per metre travelled,
extrapolated over the distance still to go to predict the height at which
the bucket will arrive at the load receiver.
"""

import logging
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# (time s, cumulative distance m, bucket height m)
Sample = Tuple[float, float, float]


@dataclass(frozen=True)
class EstimatorState:
    """Samples inside the time window and the current dh/ds"""
    samples: Tuple[Sample, ...] = ()
    slope: float = 0.0
    window: float = 1.0
    min_samples: int = 10

    @property
    def ready(self) -> bool:
        return len(self.samples) >= self.min_samples


def windowed_slope(samples: Sequence[Sample], min_samples: int = 2) -> float:
    """Least-squares dh/ds over the samples; 0 when they cannot support a fit"""
    if len(samples) < max(2, min_samples):
        return 0.0
    data = np.asarray(samples, dtype=float)
    s, h = data[:, 1], data[:, 2]
    if np.ptp(s) < 1e-9:
        return 0.0
    slope, _ = np.polyfit(s - s[0], h, 1)
    return float(slope)


def estimator_update(est: EstimatorState, t: float, s: float, h: float,
                     lifting: bool) -> EstimatorState:
    """
    Add a sample and drop those older than the window.

    Args:
        est: Current estimator
        t: Sample time
        s: Cumulative travelled distance
        h: Bucket height
        lifting: Whether the lift function is commanded; the ratio is zero otherwise
    """
    horizon = t - est.window
    samples = tuple(p for p in est.samples if p[0] >= horizon) + ((t, s, h),)
    slope = windowed_slope(samples, est.min_samples) if lifting else 0.0
    return replace(est, samples=samples, slope=slope)


def estimate_height_at_arrival(est: EstimatorState, h: float, L: float) -> float:
    """Predicted bucket height after travelling L more metres"""
    return h + est.slope * L
