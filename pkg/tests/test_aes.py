import struct

import pytest
from hypothesis import given, settings, strategies as st

from stegowave import aes
from stegowave.errors import PaddingError

KEY = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
PLAIN = bytes.fromhex("00112233445566778899aabbccddeeff")
CIPHER = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")


def test_fips197_appendix_c1():
    assert aes.encrypt_block(PLAIN, KEY) == CIPHER
    assert aes.decrypt_block(CIPHER, KEY) == PLAIN


def test_fips197_appendix_a1_key_expansion():
    key = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
    rk = aes.expand_key(key)
    assert bytes(rk[1]).hex() == "a0fafe1788542cb123a339392a6c7605"
    assert bytes(rk[10]).hex() == "d014f9a8c9ee2589e13f0cc8b6630ca6"


def test_sbox_spot_values():
    assert aes.SBOX[0x00] == 0x63
    assert aes.SBOX[0x53] == 0xED
    assert sorted(aes.SBOX) == list(range(256))
    assert all(aes.INV_SBOX[aes.SBOX[i]] == i for i in range(256))


def test_sp800_38a_cbc_first_block():
    key = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
    iv = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
    pt = bytes.fromhex("6bc1bee22e409f96e93d7e117393172a")
    ct = aes.encrypt(pt, key, iv)
    assert ct.body[:16].hex() == "7649abac8119b246cee98e9b12e9197d"


def test_neighbouring_keys_differ():
    other = KEY[:-1] + bytes([KEY[-1] + 1])
    assert aes.encrypt_block(PLAIN, other) != CIPHER
    other = KEY[:-1] + bytes([KEY[-1] - 1])
    assert aes.encrypt_block(PLAIN, other) != CIPHER


def test_decrypt_is_deterministic():
    assert aes.decrypt_block(bytes(16), KEY) == aes.decrypt_block(bytes(16), KEY)


def test_wrong_sizes():
    with pytest.raises(ValueError):
        aes.encrypt_block(bytes(15), KEY)
    with pytest.raises(ValueError):
        aes.decrypt_block(bytes(17), KEY)
    with pytest.raises(ValueError):
        aes.encrypt_block(bytes(16), bytes(24))
    with pytest.raises(ValueError):
        aes.encrypt(b"x", KEY, bytes(8))


def test_block_round_trip_many(rng):
    for _ in range(10_000 // 20):
        key = rng.bytes(16)
        rk = aes.expand_key(key)
        for _ in range(20):
            block = rng.bytes(16)
            assert aes._decrypt(aes._encrypt(block, rk), rk) == block
            assert aes._encrypt(aes._decrypt(block, rk), rk) == block


def test_table_rounds_match_reference(rng):
    for _ in range(500):
        key, block = rng.bytes(16), rng.bytes(16)
        sched = aes._Schedule(key)
        words = struct.unpack(">4I", block)
        enc = struct.pack(">4I", *sched.encrypt(*words))
        assert enc == aes.encrypt_block(block, key)
        assert sched.decrypt(*struct.unpack(">4I", enc)) == words


def test_replaced_sbox_reaches_both_paths(monkeypatch):
    broken = list(aes.SBOX)
    broken[0x00], broken[0x01] = broken[0x01], broken[0x00]
    monkeypatch.setattr(aes, "SBOX", broken)
    assert aes.encrypt_block(PLAIN, KEY) != CIPHER
    assert aes.encrypt(PLAIN, KEY, bytes(16)).body[:16] != CIPHER


def test_empty_input_is_one_padding_block():
    ct = aes.encrypt(b"", KEY, bytes(16))
    assert len(ct.body) == 16
    assert ct.body == aes.encrypt_block(bytes([16]) * 16, KEY)


def test_zero_iv_first_block_is_ecb():
    ct = aes.encrypt(PLAIN, KEY, bytes(16))
    assert ct.body[:16] == CIPHER


def test_cbc_round_trip_exhaustive_lengths(rng):
    key, iv = rng.bytes(16), rng.bytes(16)
    source = rng.bytes(4096)
    for n in range(0, 4097):
        data = source[:n]
        ct = aes.encrypt(data, key, iv)
        assert len(ct.body) == 16 * ((n + 1 + 15) // 16)
        assert aes.decrypt(ct, key) == data


def test_cbc_round_trip_large(rng):
    data = rng.bytes(1 << 20)
    key, iv = rng.bytes(16), rng.bytes(16)
    assert aes.decrypt(aes.encrypt(data, key, iv), key) == data


def test_random_iv_when_omitted():
    a = aes.encrypt(b"same", KEY)
    b = aes.encrypt(b"same", KEY)
    assert a.iv != b.iv and a.body != b.body


def test_serialisation():
    ct = aes.encrypt(b"hello", KEY, bytes(range(16)))
    assert aes.CipherText.from_bytes(ct.to_bytes()) == ct
    with pytest.raises(ValueError):
        aes.CipherText(iv=bytes(16), body=bytes(15))


def test_bit_flip_is_caught(rng):
    """A flipped body bit either breaks the padding or garbles the plaintext."""
    data = rng.bytes(100)
    ct = aes.encrypt(data, KEY, bytes(16))
    outcomes = set()
    for byte in range(len(ct.body)):
        body = bytearray(ct.body)
        body[byte] ^= 0x10
        try:
            got = aes.decrypt(aes.CipherText(ct.iv, bytes(body)), KEY)
            assert got != data
            outcomes.add("garbled")
        except PaddingError:
            outcomes.add("padding")
    assert "padding" in outcomes


def test_wrong_keys_mostly_fail_padding(rng):
    ct = aes.encrypt(rng.bytes(64), KEY, bytes(16))
    padding_errors = 0
    for _ in range(100):
        try:
            aes.decrypt(ct, rng.bytes(16))
        except PaddingError:
            padding_errors += 1
    # A random plaintext ends in valid padding about 1 time in 256.
    assert padding_errors >= 95


@pytest.mark.parametrize("padded", [b"", bytes(15), bytes(16), b"a" * 15 + b"\x00", b"a" * 14 + b"\x01\x02", b"a" * 15 + b"\x11"])
def test_unpad_rejects(padded):
    with pytest.raises(PaddingError):
        aes.unpad(padded)


def test_parse_key():
    assert aes.parse_key("00" * 16) == bytes(16)
    for bad in ("00" * 15, "zz" * 16, "00" * 17):
        with pytest.raises(ValueError):
            aes.parse_key(bad)


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=300), st.binary(min_size=16, max_size=16), st.binary(min_size=16, max_size=16))
def test_cbc_round_trip_property(data, key, iv):
    assert aes.decrypt(aes.encrypt(data, key, iv), key) == data
