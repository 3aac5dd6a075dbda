"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np
import pytest

from stegowave import aes, haar, lossless
from stegowave.errors import CrcMismatchError, DecryptError, FrameNotFoundError
from stegowave.image_io import save_pgm
from stegowave.metrics import psnr_from_mse
from stegowave.pipeline import (EmbedParams, embed, error_dispersion, extract,
                                max_payload_bytes, threshold_cover)
from stegowave.selftest import FIPS197_CIPHER, FIPS197_KEY, FIPS197_PLAIN
from stegowave.sweep import sweep
from stegowave.symbol_codec import CodingScheme, decode, encode

from conftest import ACCEPTANCE_LINES
from test_symbol_codec import TABLE_1

pytestmark = pytest.mark.acceptance

KEY = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")


def record(tag: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    assert ok, detail


def test_ac01_worked_example(lena, horse):
    secret = save_pgm(horse)
    params = EmbedParams(k=20, bps=2)
    start = time.perf_counter()
    stego, _ = embed(lena, secret, KEY, params)
    recovered = extract(stego, KEY, params)
    elapsed = time.perf_counter() - start
    ok = recovered == secret and elapsed < 5.0
    record("AC1", ok, f"256x256 secret ({len(secret)} B) bit-exact={recovered == secret}, {elapsed:.2f} s")


def test_ac02_psnr_consistency():
    a, b = psnr_from_mse(16.5), psnr_from_mse(54.7)
    ok = abs(a - 35.9) <= 0.1 and abs(b - 30.7) <= 0.1
    record("AC2", ok, f"psnr(16.5)={a:.3f} dB, psnr(54.7)={b:.3f} dB")


def test_ac03_magnitude(lena):
    params = EmbedParams(k=20, bps=2)
    th = threshold_cover(lena, params.k)
    capacity_kb = th.slot_count * params.bps / 8 / 1024
    payload = np.random.default_rng(3).bytes(max_payload_bytes(th.slot_count, params.bps))
    stego, stats = embed(lena, payload, KEY, params)
    ok = abs(stats.psnr_db - 29.9) <= 3 and abs(capacity_kb - 14.2) <= 0.5 * 14.2
    record("AC3", ok, f"PSNR={stats.psnr_db:.2f} dB, capacity={capacity_kb:.2f} KB")


def test_ac04_trends(lena):
    ks = (5, 10, 15, 20, 25, 30)
    problems = []
    for bps in (1, 2, 3):
        rows = sweep(lena, KEY, [(k, bps) for k in ks])
        slots = [r.slot_count for r in rows]
        mses = [r.mse for r in rows]
        psnrs = [r.psnr_db for r in rows]
        if None in mses:
            problems.append(f"bps={bps}: unmeasured point")
            continue
        if any(x > y for x, y in zip(slots, slots[1:])):
            problems.append(f"bps={bps}: slot_count {slots}")
        if any(x > y for x, y in zip(mses, mses[1:])):
            problems.append(f"bps={bps}: mse {[round(m, 1) for m in mses]}")
        if any(x < y for x, y in zip(psnrs, psnrs[1:])):
            problems.append(f"bps={bps}: psnr {[round(p, 2) for p in psnrs]}")
    record("AC4", not problems, "; ".join(problems) or "monotone in K for bps 1, 2, 3")


def test_ac05_dispersion(lena):
    rep = error_dispersion(lena, EmbedParams(k=20, bps=2), trials=2)
    ok = rep.fraction_within >= 0.99
    record("AC5", ok, f"{100 * rep.fraction_within:.3f}% within +-1.5, max |e|={rep.max_abs:.3f}")


def test_ac06_net_capacity(lena):
    cover_bytes = lena.side**2
    parts, ok = [], True
    for bps, floor in ((3, 0.30), (2, 0.20)):
        net = max_payload_bytes(threshold_cover(lena, 30).slot_count, bps)
        frac = net / cover_bytes
        ok &= frac >= floor
        parts.append(f"bps={bps} K=30 net={net} B ({100 * frac:.1f}%)")
    # The claimed capacity must actually be usable.
    params = EmbedParams(k=30, bps=3)
    net = max_payload_bytes(threshold_cover(lena, 30).slot_count, 3)
    payload = np.random.default_rng(6).bytes(net)
    stego, _ = embed(lena, payload, KEY, params)
    ok &= extract(stego, KEY, params) == payload
    record("AC6", bool(ok), ", ".join(parts))


def test_ac07_fips197():
    enc = aes.encrypt_block(FIPS197_PLAIN, FIPS197_KEY)
    dec = aes.decrypt_block(FIPS197_CIPHER, FIPS197_KEY)
    ok = enc == FIPS197_CIPHER and dec == FIPS197_PLAIN
    record("AC7", ok, f"ciphertext {enc.hex()}")


def test_ac08_haar():
    rng = np.random.default_rng(8)
    ortho = max(np.abs(haar.build_haar_matrix(n) @ haar.build_haar_matrix(n).T - np.eye(n)).max()
                for n in (2**j for j in range(1, 9)))
    round_trip, energy = 0.0, 0.0
    for _ in range(100):
        n = int(2 ** rng.integers(1, 9))
        f = rng.uniform(-255, 255, (n, n))
        t = haar.forward(f)
        round_trip = max(round_trip, np.abs(haar.inverse(t) - f).max())
        energy = max(energy, abs((t**2).sum() - (f**2).sum()) / (f**2).sum())
    ok = ortho < 1e-9 and round_trip < 1e-6 and energy <= 1e-9
    record("AC8", ok, f"orthogonality {ortho:.2e}, round trip {round_trip:.2e}, energy {energy:.2e}")


def test_ac09_symbol_codec():
    rng = np.random.default_rng(9)
    rows = 0
    for bps, table in TABLE_1.items():
        scheme = CodingScheme(bps)
        for bits, amp in table.items():
            vec = [int(b) for b in bits]
            assert encode(vec, scheme).tolist() == [amp]
            assert decode([amp], scheme).tolist() == vec
            rows += 1
    for _ in range(10_000):
        bps = int(rng.integers(1, 4))
        scheme = CodingScheme(bps)
        bits = rng.integers(0, 2, bps * int(rng.integers(0, 64)), dtype=np.uint8)
        assert np.array_equal(decode(encode(bits, scheme), scheme), bits)
    for bps in (1, 2, 3):
        scheme = CodingScheme(bps)
        for m, level in enumerate(scheme.levels):
            received = level + rng.uniform(-1.5, 1.5, 100)
            received = received[np.abs(received - level) < 1.5]
            got = decode(received, scheme).reshape(-1, bps)
            want = [int(b) for b in format(m, f"0{bps}b")]
            assert (got == want).all()
    record("AC9", rows == 14, f"{rows} table rows, 10^4 streams, 100 perturbations per level")


def test_ac10_round_trips():
    rng = np.random.default_rng(10)
    bad = []
    for n in range(4097):
        # Alternate incompressible and smooth inputs.
        data = rng.bytes(n) if n % 2 else np.cumsum(rng.integers(-1, 2, n)).astype(np.uint8).tobytes()
        if lossless.decompress(lossless.compress(data)) != data:
            bad.append(n)
    cipher_bad = 0
    for _ in range(1000):
        data = rng.bytes(int(rng.integers(0, 2048)))
        key = rng.bytes(16)
        if aes.decrypt(aes.encrypt(data, key), key) != data:
            cipher_bad += 1
    ok = not bad and cipher_bad == 0
    record("AC10", ok, f"compressor failures {len(bad)}/4097, cipher failures {cipher_bad}/1000")


def test_ac11_end_to_end(lena):
    rng = np.random.default_rng(11)
    capacity = {}
    for bps in (1, 2, 3):
        params = EmbedParams(k=CodingScheme(bps).max_level + 3.5, bps=bps)
        capacity[bps] = (params, max_payload_bytes(threshold_cover(lena, params.k).slot_count, bps))
    failures = []
    for trial in range(100):
        bps = trial % 3 + 1
        params, cap = capacity[bps]
        payload = rng.bytes(int(rng.integers(0, cap + 1)))
        key = rng.bytes(16)
        stego, _ = embed(lena, payload, key, params)
        if stego.pixels.shape != lena.pixels.shape or extract(stego, key, params) != payload:
            failures.append((trial, bps, len(payload)))
    caps = ", ".join(f"bps={b} k={p.k} cap={c} B" for b, (p, c) in capacity.items())
    record("AC11", not failures, f"{100 - len(failures)}/100 identical ({caps})")


def test_ac12_negative_paths(lena):
    params = EmbedParams(k=20, bps=2)
    try:
        extract(lena, KEY, params)
        plain_ok = False
    except FrameNotFoundError as exc:
        plain_ok = "no frame found" in str(exc)

    rng = np.random.default_rng(12)
    stego, _ = embed(lena, rng.bytes(3000), KEY, params)
    silent = 0
    for _ in range(100):
        try:
            extract(stego, rng.bytes(16), params)
            silent += 1
        except (DecryptError, CrcMismatchError):
            pass
    ok = plain_ok and silent == 0
    record("AC12", ok, f"plain cover rejected={plain_ok}, silent wrong-key results {silent}/100")
