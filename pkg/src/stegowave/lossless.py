"""Lossless predictive compressor for the payload.

Byte layout (big-endian)::

    magic        4  b"SWC1"
    predictor    1  1 = left-neighbour residuals + canonical Huffman
                    2 = same, with zero-residual runs folded into (0, run-1) pairs
                    255 = raw
    original_len 4  uint32
    [predictors 1, 2] code lengths, 256 bytes, one per token value
    body            Huffman bitstream (MSB first, zero-padded) or raw bytes

Residuals are r[0] = d[0], r[i] = (d[i] - d[i-1]) mod 256. The smallest of
the three forms is emitted (ties go to the lower id, raw last), so a blob is
never longer than the input plus the 9-byte header.
"""

from __future__ import annotations

import heapq
import struct

import numpy as np

from .errors import CodecError

MAGIC = b"SWC1"
PRED_LEFT = 1
PRED_LEFT_RLE = 2
PRED_RAW = 255
MAX_CODE_LEN = 15
_HEADER = struct.Struct(">4sBI")
HEADER_SIZE = _HEADER.size
MAX_OVERHEAD = HEADER_SIZE


def residuals(data: np.ndarray) -> np.ndarray:
    out = data.copy()
    out[1:] = data[1:] - data[:-1]  # uint8 arithmetic wraps mod 256
    return out


def unresiduals(res: np.ndarray) -> np.ndarray:
    return np.cumsum(res, dtype=np.uint64).astype(np.uint8)


def _huffman_lengths(freq: np.ndarray) -> np.ndarray:
    """Code length per symbol; equal weights are broken by symbol value."""
    freq = freq.astype(np.int64)
    while True:
        lengths = np.zeros(256, dtype=np.int64)
        symbols = np.flatnonzero(freq)
        if symbols.size == 1:
            lengths[symbols[0]] = 1
            return lengths
        heap = [(int(freq[s]), int(s), [int(s)]) for s in symbols]
        heapq.heapify(heap)
        order = 256
        while len(heap) > 1:
            w1, _, s1 = heapq.heappop(heap)
            w2, _, s2 = heapq.heappop(heap)
            for s in s1:
                lengths[s] += 1
            for s in s2:
                lengths[s] += 1
            heapq.heappush(heap, (w1 + w2, order, s1 + s2))
            order += 1
        if lengths.max() <= MAX_CODE_LEN:
            return lengths
        # Flatten the distribution and rebuild until the depth limit holds.
        freq = np.where(freq > 0, (freq + 1) // 2, 0)


def canonical_codes(lengths: np.ndarray) -> np.ndarray:
    """Assign canonical codes: shorter first, ties by symbol value."""
    codes = np.zeros(256, dtype=np.int64)
    code = 0
    prev_len = 0
    for sym in sorted(np.flatnonzero(lengths), key=lambda s: (lengths[s], s)):
        code <<= int(lengths[sym]) - prev_len
        codes[sym] = code
        prev_len = int(lengths[sym])
        code += 1
    return codes


def _validate_lengths(lengths: np.ndarray, original_len: int) -> None:
    used = lengths[lengths > 0]
    if used.size == 0:
        if original_len:
            raise CodecError("invalid Huffman table: no symbols")
        return
    if used.max() > MAX_CODE_LEN:
        raise CodecError("invalid Huffman table: code length exceeds 15")
    kraft = sum(1 << (MAX_CODE_LEN - int(n)) for n in used)
    complete = 1 << MAX_CODE_LEN
    if used.size == 1:
        if used[0] != 1:
            raise CodecError("invalid Huffman table: single symbol must use length 1")
    elif kraft != complete:
        raise CodecError("invalid Huffman table: Kraft sum is not 1")


def _pack(res: np.ndarray, lengths: np.ndarray, codes: np.ndarray) -> bytes:
    lens = lengths[res]
    vals = codes[res]
    total = int(lens.sum())
    # Bit b of each symbol's code, MSB first.
    starts = np.repeat(np.cumsum(lens) - lens, lens)
    offset = np.arange(total) - starts
    shift = np.repeat(lens, lens) - 1 - offset
    bits = (np.repeat(vals, lens) >> shift) & 1
    return np.packbits(bits.astype(np.uint8)).tobytes()


def fold_zero_runs(res: np.ndarray) -> np.ndarray:
    """Replace each run of z zero residuals by pairs (0, min(z, 256) - 1)."""
    tokens: list[int] = []
    values = res.tolist()
    i, n = 0, len(values)
    while i < n:
        if values[i]:
            tokens.append(values[i])
            i += 1
            continue
        j = i
        while j < n and values[j] == 0 and j - i < 256:
            j += 1
        tokens += (0, j - i - 1)
        i = j
    return np.asarray(tokens, dtype=np.uint8)


def _huffman_blob(tokens: np.ndarray, predictor: int, n: int) -> bytes:
    freq = np.bincount(tokens, minlength=256)
    lengths = _huffman_lengths(freq)
    body = _pack(tokens, lengths, canonical_codes(lengths))
    return _HEADER.pack(MAGIC, predictor, n) + lengths.astype(np.uint8).tobytes() + body


def compress(data: bytes) -> bytes:
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    n = raw.size
    candidates = [_HEADER.pack(MAGIC, PRED_RAW, n) + raw.tobytes()]
    if n:
        res = residuals(raw)
        candidates.insert(0, _huffman_blob(res, PRED_LEFT, n))
        candidates.insert(1, _huffman_blob(fold_zero_runs(res), PRED_LEFT_RLE, n))
    return min(candidates, key=len)


def _unpack(body: bytes, lengths: np.ndarray, count: int, rle: bool) -> np.ndarray:
    codes = canonical_codes(lengths)
    width = int(lengths.max())
    # Lookup on the next `width` bits: symbol and its true code length.
    tab_sym = np.zeros(1 << width, dtype=np.int64)
    tab_len = np.zeros(1 << width, dtype=np.int64)
    for sym in np.flatnonzero(lengths):
        n = int(lengths[sym])
        lo = int(codes[sym]) << (width - n)
        tab_sym[lo : lo + (1 << (width - n))] = sym
        tab_len[lo : lo + (1 << (width - n))] = n

    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8)).astype(np.int64)
    nbits = bits.size
    padded = np.concatenate([bits, np.zeros(width, dtype=np.int64)])
    window = np.zeros(nbits + 1, dtype=np.int64)
    for b in range(width):
        window = (window << 1) | padded[b : b + nbits + 1]

    win = window.tolist()
    syms = tab_sym.tolist()
    lens = tab_len.tolist()
    pos = 0

    def next_token() -> int:
        nonlocal pos
        v = win[pos] if pos <= nbits else 0
        step = lens[v]
        if step == 0:
            raise CodecError("invalid code in body")
        pos += step
        if pos > nbits:
            raise CodecError("truncated body")
        return syms[v]

    if rle:
        out: list[int] = []
        while len(out) < count:
            tok = next_token()
            if tok:
                out.append(tok)
            else:
                out += [0] * (next_token() + 1)
        if len(out) != count:
            raise CodecError("zero run overruns original length")
    else:
        out = [next_token() for _ in range(count)]
    if (pos + 7) // 8 != len(body):
        raise CodecError("trailing data after body")
    return np.asarray(out, dtype=np.uint8)


def decompress(blob: bytes) -> bytes:
    blob = bytes(blob)
    if len(blob) < HEADER_SIZE or blob[:4] != MAGIC:
        raise CodecError("bad magic")
    _, predictor, original_len = _HEADER.unpack_from(blob)
    rest = blob[HEADER_SIZE:]
    if predictor == PRED_RAW:
        if len(rest) < original_len:
            raise CodecError("truncated body")
        if len(rest) > original_len:
            raise CodecError("trailing data after body")
        return rest
    if predictor not in (PRED_LEFT, PRED_LEFT_RLE):
        raise CodecError(f"unknown predictor id {predictor}")
    if len(rest) < 256:
        raise CodecError("truncated body: code-length table incomplete")
    lengths = np.frombuffer(rest[:256], dtype=np.uint8).astype(np.int64)
    _validate_lengths(lengths, original_len)
    if original_len == 0:
        if len(rest) > 256:
            raise CodecError("trailing data after body")
        return b""
    res = _unpack(rest[256:], lengths, original_len, predictor == PRED_LEFT_RLE)
    return unresiduals(res).tobytes()
