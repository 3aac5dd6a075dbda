"""Capacity / quality sweep over a grid of (K, bits per symbol) points."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import StegoError
from .image_io import GrayImage
from .pipeline import (
    EmbedParams,
    build_frame,
    embed_frame,
    extract,
    max_payload_bytes,
    threshold_cover,
)

# Default (bps, K) lattice, 18 points.
DEFAULT_GRID: list[tuple[float, int]] = (
    [(k, 1) for k in (1.5, 5, 10, 15, 20, 25, 30)]
    + [(k, 2) for k in (5, 10, 15, 20, 25, 30)]
    + [(k, 3) for k in (10.5, 15, 20, 25, 30)]
)

CSV_COLUMNS = ["bps", "k", "slot_count", "capacity_kb", "used_bits", "mse", "psnr_db", "lossless"]

FIXED_IV = bytes(range(16))


@dataclass(frozen=True)
class SweepRow:
    bps: int
    k: float
    slot_count: int
    capacity_kb: float
    used_bits: int
    mse: float | None
    psnr_db: float | None
    lossless: bool


def parse_grid(spec: str) -> list[tuple[float, int]]:
    """Parse ``"k:bps,k:bps,..."``; the literal ``default`` gives DEFAULT_GRID."""
    spec = spec.strip()
    if spec == "default":
        return list(DEFAULT_GRID)
    grid = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        try:
            k, bps = item.split(":")
            grid.append((float(k), int(bps)))
        except ValueError:
            raise ValueError(f"bad grid point {item!r}, expected k:bps") from None
    if not grid:
        raise ValueError("empty grid")
    return grid


def sweep_point(cover: GrayImage, key: bytes, k: float, bps: int, seed: int = 0,
                iv: bytes = FIXED_IV) -> SweepRow:
    """Embed the largest random payload that fits and try to recover it.

    Points below the separation condition are still measured; they simply
    report ``lossless=False`` when recovery fails.
    """
    slot_count = threshold_cover(cover, k).slot_count
    capacity_kb = slot_count * bps / 8 / 1024
    n = max_payload_bytes(slot_count, bps)
    if n < 0:
        return SweepRow(bps, k, slot_count, capacity_kb, 0, None, None, False)
    payload = np.random.default_rng(seed).bytes(n)
    frame = build_frame(payload, key, bps, iv)
    stego, stats = embed_frame(cover, frame, k, bps)
    try:
        ok = extract(stego, key, EmbedParams(k=k, bps=bps, strict=False)) == payload
    except (StegoError, ValueError):
        ok = False
    return SweepRow(bps, k, slot_count, capacity_kb, stats.used_bits, stats.mse, stats.psnr_db, ok)


def sweep(cover: GrayImage, key: bytes, grid, seed: int = 0, iv: bytes = FIXED_IV) -> list[SweepRow]:
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    return [sweep_point(cover, key, k, bps, seed, iv) for k, bps in grid]


def _fmt(value: float | None, spec: str) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return format(value, spec)


def to_csv(rows: list[SweepRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.bps,
            format(r.k, "g"),
            r.slot_count,
            f"{r.capacity_kb:.2f}",
            r.used_bits,
            _fmt(r.mse, ".4f"),
            _fmt(r.psnr_db, ".2f"),
            int(r.lossless),
        ])
    return out.getvalue()
