"""Mean squared error and PSNR between 8-bit images."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BIT_DEPTH = 8
MAX_I = 2**BIT_DEPTH - 1


def _pair(y, z) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(y, dtype=np.float64)
    b = np.asarray(z, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def mse(y, z) -> float:
    a, b = _pair(y, z)
    return float(np.mean((a - b) ** 2))


def psnr_from_mse(err: float, max_i: int = MAX_I) -> float:
    """PSNR in dB; identical images give ``math.inf``."""
    if err < 0:
        raise ValueError("mse must be non-negative")
    if err == 0:
        return math.inf
    return 10.0 * math.log10(max_i**2 / err)


def psnr(y, z) -> float:
    return psnr_from_mse(mse(y, z))


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float
    max_i: int = MAX_I


def quality(y, z) -> QualityReport:
    err = mse(y, z)
    return QualityReport(mse=err, psnr_db=psnr_from_mse(err))
