"""Embedding and extraction of a ciphered payload in Haar coefficient slots.

Embedding:

1. forward Haar transform of the cover;
2. hard-threshold at K, every zeroed coefficient becomes a slot;
3. compress, encrypt and frame the payload, check it fits;
4. write the frame bits as constellation amplitudes into the slots in
   row-major order; surplus slots get pseudo-random amplitudes;
5. inverse transform, clamp to [0, 255] and round.

Strict mode then extracts its own output. If rounding has pushed a
coefficient across a decision boundary, single pixels are nudged until every
coefficient is back within epsilon of its intended value.

Extraction transforms the stego image, treats every coefficient with
magnitude below ``(max_level + K) / 2`` as symbol-bearing, slices the
amplitudes back to bits and unwraps the frame.

Frame layout (big-endian)::

    magic 4 b"SWH1" | version 1 | bps 1 | ct_len uint32 | crc32 uint32 | ciphertext

where ciphertext is the 16-byte IV followed by the CBC body.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import aes, haar, lossless
from .errors import (
    CapacityError,
    CodecError,
    CrcMismatchError,
    DecryptError,
    FrameNotFoundError,
    PaddingError,
    SelfCheckError,
    SeparationError,
    StegoError,
)
from .haar import build_haar_matrix
from .image_io import GrayImage
from .metrics import mse as _mse, psnr_from_mse
from .symbol_codec import CodingScheme, decode, encode
from .threshold import ThresholdResult, capacity_bits, hard_threshold

FRAME_MAGIC = b"SWH1"
FRAME_VERSION = 1
_FRAME_HEADER = struct.Struct(">4sBBII")
FRAME_HEADER_SIZE = _FRAME_HEADER.size
SELF_CHECK_ATTEMPTS = 8
# Exact half-spacing errors are common (dyadic weights); stop clear of them.
_REPAIR_SLACK = 1e-6


@dataclass(frozen=True)
class EmbedParams:
    """Threshold K, bits per symbol and the channel error margin.

    Strict mode demands ``k >= max_level + 2*epsilon`` so that a coefficient
    perturbation within +-epsilon can never move a value across the detection
    threshold; permissive mode only demands ``k > max_level``.
    """

    k: float
    bps: int
    epsilon: float = 1.5
    strict: bool = True

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"threshold k must be positive, got {self.k}")
        if self.bps not in (1, 2, 3):
            raise ValueError(f"bits per symbol must be 1, 2 or 3, got {self.bps}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def scheme(self) -> CodingScheme:
        return CodingScheme(self.bps)

    @property
    def max_level(self) -> float:
        return self.scheme.max_level

    @property
    def detect_threshold(self) -> float:
        return (self.max_level + self.k) / 2

    def check_separation(self) -> None:
        if self.strict:
            need = self.max_level + 2 * self.epsilon
            if self.k < need:
                raise SeparationError(
                    f"k={self.k:g} too small for {self.bps} b/s in strict mode: "
                    f"need k >= {need:g} (max level {self.max_level:g} + 2*epsilon)"
                )
        elif not self.k > self.max_level:
            raise SeparationError(
                f"k={self.k:g} must exceed the largest amplitude {self.max_level:g}"
            )


@dataclass(frozen=True)
class StegoStats:
    slot_count: int
    capacity_bytes: int
    used_bits: int
    mse: float
    psnr_db: float

    def as_lines(self) -> str:
        return "".join(f"{name}={value}\n" for name, value in self.__dict__.items())


def normalize_round(values) -> GrayImage:
    """Clamp to [0, 255], then round half away from zero."""
    clipped = np.clip(np.asarray(values, dtype=np.float64), 0.0, 255.0)
    return GrayImage(np.floor(clipped + 0.5).astype(np.uint8))


# -- framing -----------------------------------------------------------------


def pack_frame(ciphertext: bytes, bps: int) -> bytes:
    crc = zlib.crc32(ciphertext) & 0xFFFFFFFF
    return _FRAME_HEADER.pack(FRAME_MAGIC, FRAME_VERSION, bps, len(ciphertext), crc) + ciphertext


def unpack_frame(data: bytes, bps: int) -> bytes:
    """Validate a frame at the start of ``data`` and return its ciphertext."""
    if len(data) < FRAME_HEADER_SIZE or data[:4] != FRAME_MAGIC:
        raise FrameNotFoundError("no frame found: magic missing (wrong k/bps or not a stego image)")
    _, version, frame_bps, ct_len, crc = _FRAME_HEADER.unpack_from(data)
    if version != FRAME_VERSION:
        raise FrameNotFoundError(f"no frame found: unsupported frame version {version}")
    if frame_bps != bps:
        raise FrameNotFoundError(f"no frame found: frame declares {frame_bps} b/s, expected {bps}")
    ciphertext = data[FRAME_HEADER_SIZE : FRAME_HEADER_SIZE + ct_len]
    if len(ciphertext) != ct_len:
        raise CrcMismatchError(
            f"CRC mismatch: frame declares {ct_len} ciphertext bytes, only {len(ciphertext)} present"
        )
    if zlib.crc32(ciphertext) & 0xFFFFFFFF != crc:
        raise CrcMismatchError("CRC mismatch: extracted ciphertext is corrupted")
    return ciphertext


def build_frame(payload: bytes, key: bytes, bps: int, iv: bytes | None = None) -> bytes:
    ct = aes.encrypt(lossless.compress(payload), key, iv)
    return pack_frame(ct.to_bytes(), bps)


def open_frame(data: bytes, key: bytes, bps: int) -> bytes:
    ciphertext = unpack_frame(data, bps)
    try:
        ct = aes.CipherText.from_bytes(ciphertext)
        blob = aes.decrypt(ct, key)
    except (ValueError, PaddingError) as exc:
        raise DecryptError(f"decrypt failed: {exc} (wrong key?)") from None
    try:
        return lossless.decompress(blob)
    except CodecError as exc:
        raise DecryptError(f"decrypt failed: plaintext is not a valid blob ({exc}); wrong key?") from None


def frame_size(payload_len: int) -> int:
    """Upper bound on the frame size for any payload of this length."""
    blob = payload_len + lossless.MAX_OVERHEAD
    body = aes.BLOCK_SIZE * (blob // aes.BLOCK_SIZE + 1)
    return FRAME_HEADER_SIZE + aes.BLOCK_SIZE + body


def max_payload_bytes(slot_count: int, bps: int) -> int:
    """Largest payload length guaranteed to fit, or -1 if not even an empty one fits."""
    cap = capacity_bits(slot_count, bps) // 8
    room = cap - FRAME_HEADER_SIZE - aes.BLOCK_SIZE
    if room < aes.BLOCK_SIZE:
        return -1
    blocks = room // aes.BLOCK_SIZE
    # body = 16 * (blob // 16 + 1) <= 16 * blocks  <=>  blob <= 16 * blocks - 1
    return aes.BLOCK_SIZE * blocks - 1 - lossless.MAX_OVERHEAD


# -- core --------------------------------------------------------------------


def threshold_cover(cover: GrayImage, k: float) -> ThresholdResult:
    return hard_threshold(haar.forward(cover), k)


def symbol_values(frame: bytes, th: ThresholdResult, bps: int, fill_seed=None) -> np.ndarray:
    """Thresholded coefficients with the frame's amplitudes written into the slots.

    With ``fill_seed`` set, slots past the frame get random amplitudes instead
    of 0. The receiver never reads them; they only dither the rounding.
    """
    scheme = CodingScheme(bps)
    bits = np.unpackbits(np.frombuffer(frame, dtype=np.uint8))
    bits = np.concatenate([bits, np.zeros(-bits.size % bps, dtype=np.uint8)])
    amps = encode(bits, scheme)
    slots = np.flatnonzero(th.mask)
    if amps.size > slots.size:
        raise CapacityError(
            f"capacity exceeded: {bits.size} bits required, "
            f"{capacity_bits(slots.size, bps)} available"
        )
    values = th.coeffs.copy()
    values.flat[slots[: amps.size]] = amps
    if fill_seed is not None:
        surplus = slots[amps.size :]
        rng = np.random.default_rng(fill_seed)
        values.flat[surplus] = rng.choice(scheme.levels, size=surplus.size)
    return values


def embed_frame(cover: GrayImage, frame: bytes, k: float, bps: int,
                attempt: int = 0) -> tuple[GrayImage, StegoStats]:
    """Hide raw frame bytes without any separation or self-check guard.

    The surplus-slot fill is seeded from the frame CRC and ``attempt`` so the
    output is a pure function of the inputs.
    """
    th = threshold_cover(cover, k)
    fill_seed = (zlib.crc32(frame), attempt)
    stego = normalize_round(haar.inverse(symbol_values(frame, th, bps, fill_seed)))
    err = _mse(cover, stego)
    stats = StegoStats(
        slot_count=th.slot_count,
        capacity_bytes=capacity_bits(th.slot_count, bps) // 8,
        used_bits=8 * len(frame),
        mse=err,
        psnr_db=psnr_from_mse(err),
    )
    return stego, stats


def embed(
    cover: GrayImage,
    payload: bytes,
    key: bytes,
    params: EmbedParams,
    iv: bytes | None = None,
) -> tuple[GrayImage, StegoStats]:
    """Hide ``payload`` in ``cover``; returns the stego image and its statistics.

    In strict mode the result is extracted again before returning. A failed
    round trip is retried with a different surplus fill, up to
    ``SELF_CHECK_ATTEMPTS`` times, before giving up with SelfCheckError.
    """
    params.check_separation()
    frame = build_frame(bytes(payload), key, params.bps, iv)
    if not params.strict:
        return embed_frame(cover, frame, params.k, params.bps)
    th = threshold_cover(cover, params.k)
    reason = ""
    for attempt in range(SELF_CHECK_ATTEMPTS):
        stego, stats = embed_frame(cover, frame, params.k, params.bps, attempt)
        ok, reason = _self_check(stego, key, params, payload)
        if ok:
            return stego, stats
        target = symbol_values(frame, th, params.bps, (zlib.crc32(frame), attempt))
        fixed = repair_rounding(stego, target, params.epsilon)
        if fixed is None:
            continue
        ok, reason = _self_check(fixed, key, params, payload)
        if ok:
            err = _mse(cover, fixed)
            return fixed, StegoStats(stats.slot_count, stats.capacity_bytes, stats.used_bits,
                                     err, psnr_from_mse(err))
    raise SelfCheckError(
        f"self-check failed after {SELF_CHECK_ATTEMPTS} attempts ({reason}); "
        f"cover unsuitable for k={params.k:g}, {params.bps} b/s"
    )


def _self_check(stego, key, params, payload) -> tuple[bool, str]:
    try:
        if extract(stego, key, params) == payload:
            return True, ""
        return False, "recovered payload differs"
    except StegoError as exc:
        return False, str(exc)


@lru_cache(maxsize=8)
def _column_support(n_side: int) -> tuple[np.ndarray, np.ndarray]:
    """For each pixel index i: the rows n with H[n, i] != 0 and those entries."""
    h = build_haar_matrix(n_side)
    rows = np.array([np.flatnonzero(h[:, i]) for i in range(n_side)])
    return rows, np.take_along_axis(h.T, rows, axis=1)


def repair_rounding(stego: GrayImage, target: np.ndarray, epsilon: float,
                    max_steps: int = 2000, max_candidates: int = 256) -> GrayImage | None:
    """Nudge single pixels by +-1 until every coefficient is within epsilon of target.

    Rounding can push a few coefficients a full half-spacing off their
    intended value when the reconstruction has repeated fractional parts.
    Each step takes the worst coefficient and changes the one pixel in its
    support that leaves the smallest worst-case error among the coefficients
    that pixel touches. Returns None if the budget runs out.
    """
    pixels = stego.pixels.astype(np.int64)
    n_side = pixels.shape[0]
    rows, weights = _column_support(n_side)
    h = build_haar_matrix(n_side)
    goal = epsilon - _REPAIR_SLACK
    err = haar.forward(pixels) - target
    for _ in range(max_steps):
        worst = np.unravel_index(np.argmax(np.abs(err)), err.shape)
        if abs(err[worst]) < goal:
            return GrayImage(pixels.astype(np.uint8))
        r, c = worst
        pi = np.flatnonzero(h[r])
        pj = np.flatnonzero(h[c])
        cand_i, cand_j = np.meshgrid(pi, pj, indexing="ij")
        cand_i, cand_j = cand_i.ravel(), cand_j.ravel()
        if cand_i.size > max_candidates:
            pick = np.linspace(0, cand_i.size - 1, max_candidates).astype(np.int64)
            cand_i, cand_j = cand_i[pick], cand_j[pick]
        own = h[r, cand_i] * h[c, cand_j]
        delta = -np.sign(err[worst] * own).astype(np.int64)
        new_px = pixels[cand_i, cand_j] + delta
        valid = (new_px >= 0) & (new_px <= 255)
        if not valid.any():
            return None
        cand_i, cand_j, delta = cand_i[valid], cand_j[valid], delta[valid]
        # Change in every coefficient touched by each candidate pixel.
        ri, wi = rows[cand_i], weights[cand_i]
        rj, wj = rows[cand_j], weights[cand_j]
        change = delta[:, None, None] * wi[:, :, None] * wj[:, None, :]
        after = err[ri[:, :, None], rj[:, None, :]] + change
        score = np.abs(after).reshape(after.shape[0], -1).max(axis=1)
        best = int(np.argmin(score))
        i, j = cand_i[best], cand_j[best]
        pixels[i, j] += delta[best]
        err[np.ix_(ri[best], rj[best])] += change[best]
    return None


def extract_frame_bytes(stego: GrayImage, params: EmbedParams) -> bytes:
    coeffs = haar.forward(stego)
    values = coeffs[np.abs(coeffs) < params.detect_threshold]
    bits = decode(values, params.scheme)
    return np.packbits(bits[: bits.size - bits.size % 8]).tobytes()


def extract(stego: GrayImage, key: bytes, params: EmbedParams) -> bytes:
    params.check_separation()
    return open_frame(extract_frame_bytes(stego, params), key, params.bps)


# -- analysis ----------------------------------------------------------------


@dataclass(frozen=True)
class DispersionReport:
    counts: np.ndarray
    edges: np.ndarray
    fraction_within: float
    max_abs: float
    p99_abs: float
    epsilon: float
    samples: int


def error_dispersion(
    cover: GrayImage,
    params: EmbedParams,
    trials: int = 1,
    fill: float = 1.0,
    seed: int = 0,
    bins: int = 61,
) -> DispersionReport:
    """Histogram of coefficient perturbations caused by clamping and rounding.

    Each trial fills the first ``fill`` fraction of slots with random symbols,
    reconstructs the stego image and measures forward(stego) minus the
    intended coefficients at every position.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0.0 <= fill <= 1.0:
        raise ValueError("fill must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    levels = params.scheme.levels
    th = threshold_cover(cover, params.k)
    slots = np.flatnonzero(th.mask)
    used = slots[: int(math.floor(fill * slots.size))]
    errors = []
    for _ in range(trials):
        values = th.coeffs.copy()
        values.flat[used] = rng.choice(levels, size=used.size)
        stego = normalize_round(haar.inverse(values))
        errors.append((haar.forward(stego) - values).ravel())
    err = np.concatenate(errors)
    span = max(3.0 * params.epsilon, float(np.abs(err).max()))
    counts, edges = np.histogram(err, bins=bins, range=(-span, span))
    absolute = np.abs(err)
    return DispersionReport(
        counts=counts,
        edges=edges,
        fraction_within=float(np.mean(absolute <= params.epsilon)),
        max_abs=float(absolute.max()),
        p99_abs=float(np.percentile(absolute, 99)),
        epsilon=params.epsilon,
        samples=int(err.size),
    )
