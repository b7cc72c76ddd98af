"""Parity signatures and the (72,64) SEC-DED word code on a concrete block."""

import random

from tccsim.codec import (
    DecodeStatus,
    block_correct,
    block_ecc,
    from_codeword,
    parity_signature,
    secded_decode,
    secded_encode,
    to_codeword,
)

rng = random.Random(0)
block = bytes(rng.getrandbits(8) for _ in range(64))

# The signature is one byte: bit j is the XOR of bit j across all 64 bytes.
sig = parity_signature(block)
print(f"signature          {sig:08b}")

# Flipping any single bit changes exactly one signature bit.
flipped = bytearray(block)
flipped[17] ^= 0x20
print(f"after one flip     {parity_signature(bytes(flipped)):08b}")

# Two flips in the same bit lane (bit 5 of two different bytes) cancel out.
flipped[40] ^= 0x20
print(f"after a lane pair  {parity_signature(bytes(flipped)):08b}  (unchanged)")

# Word-level SEC-DED: one check byte per 64-bit word.
word = int.from_bytes(block[:8], "little")
check = secded_encode(word)
cw = to_codeword(word, check)
one = secded_decode(*from_codeword(cw ^ (1 << 23)))
two = secded_decode(*from_codeword(cw ^ (1 << 23) ^ (1 << 50)))
print(f"\nword {word:016x}, check byte {check:02x}")
print(f"single flip at position 23 -> {one.status.value}, position {one.position}, "
      f"restored {one.word == word}")
print(f"flips at 23 and 50         -> {two.status.value}")

# Block-ECC is the eight check bytes side by side; it repairs one flip per word.
ecc = block_ecc(block)
damaged = bytearray(block)
for w in range(8):
    damaged[8 * w + rng.randrange(8)] ^= 1 << rng.randrange(8)
print(f"\nblock-ECC {ecc.hex()}")
print("eight flips, one per word, repaired:", block_correct(bytes(damaged), ecc) == block)
damaged[3] ^= 0x01
print("a second flip in word 0 is uncorrectable:",
      block_correct(bytes(damaged), ecc) is None and
      secded_decode(int.from_bytes(damaged[:8], "little"), ecc[0]).status
      is DecodeStatus.UNCORRECTABLE)
