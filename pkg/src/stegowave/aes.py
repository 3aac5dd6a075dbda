"""AES-128 (FIPS-197) block cipher with CBC chaining and PKCS#7 padding.

Pure Python. The S-box is generated from its algebraic definition (inverse in
GF(2^8) followed by the affine map) at import time; the round functions look
it up through the module globals, so it can be swapped in tests.

Two round implementations exist: a byte-oriented one that follows the
standard's step names (used by encrypt_block/decrypt_block) and a 32-bit
T-table one (used by the CBC routines), which is several times faster. The
T-tables are derived from SBOX and rebuilt whenever SBOX is replaced.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

from .errors import PaddingError

BLOCK_SIZE = 16
KEY_SIZE = 16
ROUNDS = 10


def _xtime(a: int) -> int:
    a <<= 1
    return (a ^ 0x11B) if a & 0x100 else a


def gf_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a = _xtime(a)
        b >>= 1
    return out


def _make_sbox() -> list[int]:
    inv = [0] * 256
    for a in range(1, 256):
        for b in range(1, 256):
            if gf_mul(a, b) == 1:
                inv[a] = b
                break
    box = []
    for a in range(256):
        x = inv[a]
        y = x
        for shift in range(1, 5):
            y ^= ((x << shift) | (x >> (8 - shift))) & 0xFF
        box.append(y ^ 0x63)
    return box


SBOX = _make_sbox()
INV_SBOX = [0] * 256
for _i, _v in enumerate(SBOX):
    INV_SBOX[_v] = _i
del _i, _v

_MUL = {c: [gf_mul(a, c) for a in range(256)] for c in (2, 3, 9, 11, 13, 14)}
_M2, _M3 = _MUL[2], _MUL[3]
_M9, _M11, _M13, _M14 = _MUL[9], _MUL[11], _MUL[13], _MUL[14]

# State is a flat list s[r + 4c] (column-major, as the bytes arrive).
_SHIFT = [(r + 4 * ((c + r) % 4)) for c in range(4) for r in range(4)]
_INV_SHIFT = [0] * 16
for _dst, _src in enumerate(_SHIFT):
    _INV_SHIFT[_src] = _dst
del _dst, _src


def expand_key(key: bytes) -> list[list[int]]:
    """Return the 11 round keys, each as 16 ints."""
    if len(key) != KEY_SIZE:
        raise ValueError(f"AES-128 key must be {KEY_SIZE} bytes, got {len(key)}")
    sbox = SBOX
    words = [list(key[i : i + 4]) for i in range(0, 16, 4)]
    rcon = 1
    for i in range(4, 4 * (ROUNDS + 1)):
        temp = list(words[i - 1])
        if i % 4 == 0:
            temp = temp[1:] + temp[:1]
            temp = [sbox[b] for b in temp]
            temp[0] ^= rcon
            rcon = _xtime(rcon)
        words.append([a ^ b for a, b in zip(words[i - 4], temp)])
    return [sum(words[4 * r : 4 * r + 4], []) for r in range(ROUNDS + 1)]


def _mix_columns(s: list[int]) -> list[int]:
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c : c + 4]
        out[c] = _M2[a0] ^ _M3[a1] ^ a2 ^ a3
        out[c + 1] = a0 ^ _M2[a1] ^ _M3[a2] ^ a3
        out[c + 2] = a0 ^ a1 ^ _M2[a2] ^ _M3[a3]
        out[c + 3] = _M3[a0] ^ a1 ^ a2 ^ _M2[a3]
    return out


def _inv_mix_columns(s: list[int]) -> list[int]:
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c : c + 4]
        out[c] = _M14[a0] ^ _M11[a1] ^ _M13[a2] ^ _M9[a3]
        out[c + 1] = _M9[a0] ^ _M14[a1] ^ _M11[a2] ^ _M13[a3]
        out[c + 2] = _M13[a0] ^ _M9[a1] ^ _M14[a2] ^ _M11[a3]
        out[c + 3] = _M11[a0] ^ _M13[a1] ^ _M9[a2] ^ _M14[a3]
    return out


def _encrypt(block: bytes, round_keys: list[list[int]]) -> bytes:
    sbox = SBOX
    s = [b ^ k for b, k in zip(block, round_keys[0])]
    for rnd in range(1, ROUNDS + 1):
        s = [sbox[s[i]] for i in _SHIFT]
        if rnd != ROUNDS:
            s = _mix_columns(s)
        s = [b ^ k for b, k in zip(s, round_keys[rnd])]
    return bytes(s)


def _decrypt(block: bytes, round_keys: list[list[int]]) -> bytes:
    inv_sbox = INV_SBOX
    s = [b ^ k for b, k in zip(block, round_keys[ROUNDS])]
    for rnd in range(ROUNDS - 1, -1, -1):
        s = [inv_sbox[s[i]] for i in _INV_SHIFT]
        s = [b ^ k for b, k in zip(s, round_keys[rnd])]
        if rnd:
            s = _inv_mix_columns(s)
    return bytes(s)


def _ror8(w: int) -> int:
    return ((w >> 8) | (w << 24)) & 0xFFFFFFFF


def _build_tables(sbox: list[int]):
    inv = [0] * 256
    for i, v in enumerate(sbox):
        inv[v] = i
    te0 = [(_M2[v] << 24) | (v << 16) | (v << 8) | _M3[v] for v in sbox]
    td0 = [(_M14[v] << 24) | (_M9[v] << 16) | (_M13[v] << 8) | _M11[v] for v in inv]
    te, td = [te0], [td0]
    for _ in range(3):
        te.append([_ror8(w) for w in te[-1]])
        td.append([_ror8(w) for w in td[-1]])
    return sbox, inv, te, td


_tables = None


def _get_tables():
    global _tables
    if _tables is None or _tables[0] is not SBOX:
        _tables = _build_tables(SBOX)
    return _tables


class _Schedule:
    """Round keys as 32-bit words for the T-table rounds."""

    def __init__(self, key: bytes):
        self.sbox, self.inv_sbox, self.te, self.td = _get_tables()
        rks = expand_key(key)
        self.enc = [_words(rk) for rk in rks]
        # Equivalent inverse cipher: InvMixColumns folded into middle round keys.
        self.dec = [_words(rks[ROUNDS])]
        self.dec += [_words(_inv_mix_columns(rks[r])) for r in range(ROUNDS - 1, 0, -1)]
        self.dec.append(_words(rks[0]))

    def encrypt(self, w0: int, w1: int, w2: int, w3: int) -> tuple[int, int, int, int]:
        te0, te1, te2, te3 = self.te
        k = self.enc[0]
        w0, w1, w2, w3 = w0 ^ k[0], w1 ^ k[1], w2 ^ k[2], w3 ^ k[3]
        for r in range(1, ROUNDS):
            k = self.enc[r]
            w0, w1, w2, w3 = (
                te0[w0 >> 24] ^ te1[(w1 >> 16) & 255] ^ te2[(w2 >> 8) & 255] ^ te3[w3 & 255] ^ k[0],
                te0[w1 >> 24] ^ te1[(w2 >> 16) & 255] ^ te2[(w3 >> 8) & 255] ^ te3[w0 & 255] ^ k[1],
                te0[w2 >> 24] ^ te1[(w3 >> 16) & 255] ^ te2[(w0 >> 8) & 255] ^ te3[w1 & 255] ^ k[2],
                te0[w3 >> 24] ^ te1[(w0 >> 16) & 255] ^ te2[(w1 >> 8) & 255] ^ te3[w2 & 255] ^ k[3],
            )
        return _last_round(self.sbox, self.enc[ROUNDS], (w0, w1, w2, w3), (0, 1, 2, 3))

    def decrypt(self, w0: int, w1: int, w2: int, w3: int) -> tuple[int, int, int, int]:
        td0, td1, td2, td3 = self.td
        k = self.dec[0]
        w0, w1, w2, w3 = w0 ^ k[0], w1 ^ k[1], w2 ^ k[2], w3 ^ k[3]
        for r in range(1, ROUNDS):
            k = self.dec[r]
            w0, w1, w2, w3 = (
                td0[w0 >> 24] ^ td1[(w3 >> 16) & 255] ^ td2[(w2 >> 8) & 255] ^ td3[w1 & 255] ^ k[0],
                td0[w1 >> 24] ^ td1[(w0 >> 16) & 255] ^ td2[(w3 >> 8) & 255] ^ td3[w2 & 255] ^ k[1],
                td0[w2 >> 24] ^ td1[(w1 >> 16) & 255] ^ td2[(w0 >> 8) & 255] ^ td3[w3 & 255] ^ k[2],
                td0[w3 >> 24] ^ td1[(w2 >> 16) & 255] ^ td2[(w1 >> 8) & 255] ^ td3[w0 & 255] ^ k[3],
            )
        return _last_round(self.inv_sbox, self.dec[ROUNDS], (w0, w1, w2, w3), (0, 3, 2, 1))


def _words(b) -> list[int]:
    return [int.from_bytes(bytes(b[i : i + 4]), "big") for i in range(0, 16, 4)]


def _last_round(box, k, w, step):
    """SubBytes + (Inv)ShiftRows + AddRoundKey; ``step`` picks the source column per row."""
    out = []
    for c in range(4):
        out.append(
            (
                (box[w[(c + step[0]) % 4] >> 24] << 24)
                | (box[(w[(c + step[1]) % 4] >> 16) & 255] << 16)
                | (box[(w[(c + step[2]) % 4] >> 8) & 255] << 8)
                | box[w[(c + step[3]) % 4] & 255]
            )
            ^ k[c]
        )
    return tuple(out)


def _check_block(block: bytes) -> None:
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")


def encrypt_block(block: bytes, key: bytes) -> bytes:
    _check_block(block)
    return _encrypt(bytes(block), expand_key(key))


def decrypt_block(block: bytes, key: bytes) -> bytes:
    _check_block(block)
    return _decrypt(bytes(block), expand_key(key))


def pad(data: bytes) -> bytes:
    n = BLOCK_SIZE - len(data) % BLOCK_SIZE
    return data + bytes([n]) * n


def unpad(data: bytes) -> bytes:
    if not data or len(data) % BLOCK_SIZE:
        raise PaddingError("padding invalid: length not a positive block multiple")
    n = data[-1]
    if not 1 <= n <= BLOCK_SIZE or data[-n:] != bytes([n]) * n:
        raise PaddingError("padding invalid")
    return data[:-n]


@dataclass(frozen=True)
class CipherText:
    iv: bytes
    body: bytes

    def __post_init__(self):
        if len(self.iv) != BLOCK_SIZE:
            raise ValueError("IV must be 16 bytes")
        if not self.body or len(self.body) % BLOCK_SIZE:
            raise ValueError("ciphertext body must be a positive multiple of 16 bytes")

    def to_bytes(self) -> bytes:
        return self.iv + self.body

    @classmethod
    def from_bytes(cls, data: bytes) -> "CipherText":
        return cls(iv=bytes(data[:BLOCK_SIZE]), body=bytes(data[BLOCK_SIZE:]))


def encrypt(data: bytes, key: bytes, iv: bytes | None = None) -> CipherText:
    """CBC-encrypt ``data`` after PKCS#7 padding. A random IV is drawn if none is given."""
    if iv is None:
        iv = os.urandom(BLOCK_SIZE)
    if len(iv) != BLOCK_SIZE:
        raise ValueError("IV must be 16 bytes")
    sched = _Schedule(key)
    padded = pad(bytes(data))
    words = struct.unpack(f">{len(padded) // 4}I", padded)
    prev = struct.unpack(">4I", iv)
    out = []
    for i in range(0, len(words), 4):
        prev = sched.encrypt(
            words[i] ^ prev[0], words[i + 1] ^ prev[1], words[i + 2] ^ prev[2], words[i + 3] ^ prev[3]
        )
        out.extend(prev)
    return CipherText(iv=bytes(iv), body=struct.pack(f">{len(out)}I", *out))


def decrypt(ct: CipherText, key: bytes) -> bytes:
    sched = _Schedule(key)
    words = struct.unpack(f">{len(ct.body) // 4}I", ct.body)
    prev = struct.unpack(">4I", ct.iv)
    out = []
    for i in range(0, len(words), 4):
        block = words[i : i + 4]
        p = sched.decrypt(*block)
        out.extend((p[0] ^ prev[0], p[1] ^ prev[1], p[2] ^ prev[2], p[3] ^ prev[3]))
        prev = block
    return unpad(struct.pack(f">{len(out)}I", *out))


def parse_key(hex_key: str) -> bytes:
    try:
        key = bytes.fromhex(hex_key.strip())
    except ValueError:
        raise ValueError("key must be 32 hexadecimal characters") from None
    if len(key) != KEY_SIZE:
        raise ValueError(f"key must be 32 hexadecimal characters, got {len(hex_key.strip())}")
    return key
