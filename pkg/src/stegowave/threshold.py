"""Hard thresholding of transform coefficients and slot enumeration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_BPS = (1, 2, 3)


@dataclass(frozen=True)
class ThresholdResult:
    coeffs: np.ndarray
    mask: np.ndarray
    k: float

    @property
    def slots(self) -> list[tuple[int, int]]:
        """Zeroed positions in row-major order."""
        rows, cols = np.nonzero(self.mask)
        return list(zip(rows.tolist(), cols.tolist()))

    @property
    def slot_count(self) -> int:
        return int(np.count_nonzero(self.mask))


def hard_threshold(t, k: float) -> ThresholdResult:
    """Zero every coefficient with ``|s| < k``; ``|s| == k`` survives."""
    if not k >= 0:
        raise ValueError(f"threshold must be non-negative, got {k}")
    t = np.asarray(t, dtype=np.float64)
    mask = np.abs(t) < k
    coeffs = np.where(mask, 0.0, t)
    return ThresholdResult(coeffs=coeffs, mask=mask, k=float(k))


def capacity_bits(slot_count: int, bps: int) -> int:
    if bps not in VALID_BPS:
        raise ValueError(f"bits per symbol must be one of {VALID_BPS}, got {bps}")
    if slot_count < 0:
        raise ValueError("slot count must be non-negative")
    return int(slot_count) * bps
