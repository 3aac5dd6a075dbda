"""Built-in known-answer and round-trip checks."""

from __future__ import annotations

import numpy as np

from . import aes, haar, lossless
from .symbol_codec import CodingScheme, decode, encode

FIPS197_KEY = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
FIPS197_PLAIN = bytes.fromhex("00112233445566778899aabbccddeeff")
FIPS197_CIPHER = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")


def check_aes_vector():
    assert aes.encrypt_block(FIPS197_PLAIN, FIPS197_KEY) == FIPS197_CIPHER
    assert aes.decrypt_block(FIPS197_CIPHER, FIPS197_KEY) == FIPS197_PLAIN


def check_haar_orthogonality():
    for n in (2, 4, 8, 16, 32, 64):
        h = haar.build_haar_matrix(n)
        dev = np.abs(h @ h.T - np.eye(n)).max()
        assert dev < 1e-9, f"N={n}: max deviation {dev:.3g}"


def check_haar_fast_matches_dense():
    rng = np.random.default_rng(0)
    for n in (2, 8, 64):
        f = rng.uniform(-1000, 1000, (n, n))
        assert np.abs(haar.forward(f) - haar.forward_dense(f)).max() < 1e-9
        assert np.abs(haar.inverse(f) - haar.inverse_dense(f)).max() < 1e-9


def check_symbol_codec():
    rng = np.random.default_rng(1)
    for bps in (1, 2, 3):
        scheme = CodingScheme(bps)
        bits = rng.integers(0, 2, 300 * bps, dtype=np.uint8)
        assert np.array_equal(decode(encode(bits, scheme), scheme), bits)


def check_compressor():
    rng = np.random.default_rng(2)
    samples = [b"", bytes(1000), rng.bytes(777), np.cumsum(rng.integers(-2, 3, 3000)).astype(np.uint8).tobytes()]
    for data in samples:
        assert lossless.decompress(lossless.compress(data)) == data


def check_cipher():
    rng = np.random.default_rng(3)
    for n in (0, 1, 15, 16, 17, 1000):
        key, iv, data = rng.bytes(16), rng.bytes(16), rng.bytes(n)
        assert aes.decrypt(aes.encrypt(data, key, iv), key) == data


CHECKS = [
    ("aes-fips197-vector", check_aes_vector),
    ("haar-orthogonality", check_haar_orthogonality),
    ("haar-fast-vs-dense", check_haar_fast_matches_dense),
    ("symbol-codec-round-trip", check_symbol_codec),
    ("compressor-round-trip", check_compressor),
    ("cipher-round-trip", check_cipher),
]


def run_checks() -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in CHECKS:
        try:
            fn()
            results.append((name, True, ""))
        except Exception as exc:  # a self-test reports, it does not crash
            results.append((name, False, str(exc) or type(exc).__name__))
    return results
