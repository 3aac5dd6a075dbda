"""Bits <-> coefficient amplitudes on a uniform constellation with spacing 3.

For b bits per symbol the 2**b levels are 3*(m - (2**b - 1)/2), m = 0..2**b-1:

    1 b/s: -1.5, 1.5
    2 b/s: -4.5 .. 4.5
    3 b/s: -10.5 .. 10.5

Bit groups are read most-significant-first as the level index m (natural
binary, not Gray). A channel error below half the spacing never flips a symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPACING = 3.0


@dataclass(frozen=True)
class CodingScheme:
    bps: int
    spacing: float = SPACING
    levels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.bps not in (1, 2, 3):
            raise ValueError(f"bits per symbol must be 1, 2 or 3, got {self.bps}")
        m = np.arange(2**self.bps)
        levels = self.spacing * (m - (2**self.bps - 1) / 2)
        levels.flags.writeable = False
        object.__setattr__(self, "levels", levels)

    @property
    def max_level(self) -> float:
        return float(self.levels[-1])


def max_level(bps: int) -> float:
    return CodingScheme(bps).max_level


def _weights(bps: int) -> np.ndarray:
    return 1 << np.arange(bps - 1, -1, -1)


def encode(bits, scheme: CodingScheme) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size % scheme.bps:
        raise ValueError(f"{bits.size} bits is not a multiple of {scheme.bps}")
    if bits.size and bits.max() > 1:
        raise ValueError("bits must be 0 or 1")
    index = bits.reshape(-1, scheme.bps).astype(np.int64) @ _weights(scheme.bps)
    return scheme.levels[index]


def decode_indices(values, scheme: CodingScheme) -> np.ndarray:
    """Nearest level index; exact midpoints go to the higher level."""
    values = np.asarray(values, dtype=np.float64).ravel()
    # Midpoints between neighbours are exact in binary, so compare against
    # them directly rather than rescaling the values.
    bounds = (scheme.levels[:-1] + scheme.levels[1:]) / 2
    return np.searchsorted(bounds, values, side="right").astype(np.int64)


def decode(values, scheme: CodingScheme) -> np.ndarray:
    idx = decode_indices(values, scheme)
    shifts = np.arange(scheme.bps - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8).ravel()
