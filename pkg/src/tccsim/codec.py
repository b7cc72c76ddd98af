"""Error detection and correction codes for 64-byte cache blocks.

Two codes protect a block:

* an 8-bit interleaved parity (the EDC). Bit ``j`` of the parity byte is the
  XOR of bit ``j`` of every byte in the block, so any single-bit error flips
  exactly one parity bit. The same byte doubles as the block *signature* used
  to filter silent write-backs.
* an extended Hamming (72,64) SEC-DED code per 64-bit word (the ECC), giving
  8 check bytes per block.

Codeword layout for one word (positions 0..71)::

    position 0                  overall parity
    positions 1,2,4,...,64      Hamming check bits
    remaining positions         data bits 0..63, ascending

The check byte packs check bit ``2**i`` into bit ``i`` (i = 0..6) and the
overall parity into bit 7.
"""

import enum
import struct
from dataclasses import dataclass

import numpy as np

BLOCK_SIZE = 64
WORDS_PER_BLOCK = 8
CODEWORD_BITS = 72

_CHECK_POSITIONS = tuple(1 << i for i in range(7))
DATA_POSITIONS = tuple(p for p in range(3, CODEWORD_BITS) if p & (p - 1))
assert len(DATA_POSITIONS) == 64

# data bit index for a codeword position, None for check/parity positions
_POSITION_TO_DATA_BIT = {p: i for i, p in enumerate(DATA_POSITIONS)}

# _CHECK_MASKS[i]: data bits covered by the check bit at position 2**i
_CHECK_MASKS = tuple(
    sum(1 << d for d, p in enumerate(DATA_POSITIONS) if p >> i & 1) for i in range(7)
)

_WORDS = struct.Struct("<8Q")

# Block-wide (bit-sliced) forms of the check masks: the same word mask
# repeated in each of the eight 64-bit lanes of a 512-bit block integer.
_LANE_LSB = sum(1 << (64 * k) for k in range(WORDS_PER_BLOCK))
_BLOCK_CHECK_MASKS = tuple(m * _LANE_LSB for m in _CHECK_MASKS)


def _lane_parity(y):
    # bit 64k of the result = XOR of bits 64k..64k+63 of y
    y ^= y >> 32
    y ^= y >> 16
    y ^= y >> 8
    y ^= y >> 4
    y ^= y >> 2
    y ^= y >> 1
    return y & _LANE_LSB


class DecodeStatus(enum.Enum):
    NO_ERROR = "no_error"
    CORRECTED = "corrected"
    UNCORRECTABLE = "detected_uncorrectable"


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of decoding one word.

    ``word`` is the (possibly repaired) data word; for uncorrectable outcomes
    it is the received word unchanged. ``position`` is the codeword position
    that was inverted, set only for corrected outcomes.
    """

    status: DecodeStatus
    word: int
    position: int = None


def parity_signature(block):
    """Interleaved parity byte of a 64-byte block."""
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")
    a, b, c, d, e, f, g, h = _WORDS.unpack(block)
    # XOR of the words, then fold on byte boundaries so each bit keeps its lane
    x = a ^ b ^ c ^ d ^ e ^ f ^ g ^ h
    x ^= x >> 32
    x ^= x >> 16
    return (x ^ (x >> 8)) & 0xFF


def parity_signatures(blocks):
    """Vectorised :func:`parity_signature` over an ``(n, 64)`` uint8 array."""
    blocks = np.asarray(blocks, dtype=np.uint8)
    if blocks.ndim != 2 or blocks.shape[1] != BLOCK_SIZE:
        raise ValueError(f"expected shape (n, {BLOCK_SIZE}), got {blocks.shape}")
    return np.bitwise_xor.reduce(blocks, axis=1)


def _hamming_bits(word):
    c = 0
    for i, mask in enumerate(_CHECK_MASKS):
        c |= ((word & mask).bit_count() & 1) << i
    return c


def secded_encode(word):
    """Check byte for a 64-bit word."""
    word &= 0xFFFFFFFFFFFFFFFF
    c = _hamming_bits(word)
    overall = (word.bit_count() + c.bit_count()) & 1
    return c | overall << 7


def secded_decode(word, check):
    """Decode a received ``(word, check)`` pair."""
    word &= 0xFFFFFFFFFFFFFFFF
    syndrome = (_hamming_bits(word) ^ check) & 0x7F
    # parity over all 72 received bits; zero for any even number of flips
    odd = (word.bit_count() + (check & 0xFF).bit_count()) & 1

    if not syndrome:
        if not odd:
            return DecodeOutcome(DecodeStatus.NO_ERROR, word)
        return DecodeOutcome(DecodeStatus.CORRECTED, word, 0)
    if not odd:
        return DecodeOutcome(DecodeStatus.UNCORRECTABLE, word)
    if syndrome & (syndrome - 1) == 0:
        # a check bit flipped; data intact
        return DecodeOutcome(DecodeStatus.CORRECTED, word, syndrome)
    bit = _POSITION_TO_DATA_BIT.get(syndrome)
    if bit is None:
        # syndrome points past position 71: three or more flips
        return DecodeOutcome(DecodeStatus.UNCORRECTABLE, word)
    return DecodeOutcome(DecodeStatus.CORRECTED, word ^ (1 << bit), syndrome)


def to_codeword(word, check):
    """Lay out ``(word, check)`` as a 72-bit integer, bit p = position p."""
    cw = (check >> 7) & 1
    for i, p in enumerate(_CHECK_POSITIONS):
        cw |= ((check >> i) & 1) << p
    for d, p in enumerate(DATA_POSITIONS):
        cw |= ((word >> d) & 1) << p
    return cw


def from_codeword(cw):
    """Inverse of :func:`to_codeword`."""
    check = (cw & 1) << 7
    for i, p in enumerate(_CHECK_POSITIONS):
        check |= ((cw >> p) & 1) << i
    word = 0
    for d, p in enumerate(DATA_POSITIONS):
        word |= ((cw >> p) & 1) << d
    return word, check


def block_words(block):
    """The eight little-endian 64-bit words of a block, word 0 first."""
    return _WORDS.unpack(block)


def words_to_block(words):
    return _WORDS.pack(*words)


def block_ecc(block):
    """Block-ECC: 8 check bytes, byte ``i`` protecting word ``i``."""
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")
    # all eight words at once; equivalent to secded_encode per word
    x = int.from_bytes(block, "little")
    z = 0
    for i, m in enumerate(_BLOCK_CHECK_MASKS):
        z |= _lane_parity(x & m) << i
    t = z ^ (z >> 4)
    t ^= t >> 2
    t ^= t >> 1
    z |= ((_lane_parity(x) ^ t) & _LANE_LSB) << 7
    return z.to_bytes(BLOCK_SIZE, "little")[::8]


def block_correct(block, ecc):
    """Correct a block against its block-ECC.

    Returns the repaired block, or ``None`` when any word holds a detected
    but uncorrectable error.
    """
    if len(ecc) != WORDS_PER_BLOCK:
        raise ValueError(f"block ECC must be {WORDS_PER_BLOCK} bytes")
    if block_ecc(block) == bytes(ecc):
        return bytes(block)
    words = []
    for w, c in zip(_WORDS.unpack(block), ecc):
        out = secded_decode(w, c)
        if out.status is DecodeStatus.UNCORRECTABLE:
            return None
        words.append(out.word)
    return _WORDS.pack(*words)
