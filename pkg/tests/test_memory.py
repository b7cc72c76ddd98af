import io

import pytest

from tccsim.errors import UsageError
from tccsim.memory import EccGeometry, MemoryImage, ecc_address

BASE = 1 << 36
DEFAULT_GEOM = EccGeometry(2048, 8, BASE)


def blk(v):
    return bytes([v]) * 64


def test_unwritten_reads_zero():
    assert MemoryImage().read_block(0x1000) == bytes(64)


def test_round_trip_and_isolation():
    m = MemoryImage()
    m.write_block(0x1000, blk(1))
    m.write_block(0x1040, blk(2))
    assert m.read_block(0x1000) == blk(1)
    assert m.read_block(0x1040) == blk(2)


@pytest.mark.parametrize("addr", [0x1001, 0x1008, -64])
def test_unaligned_rejected(addr):
    with pytest.raises(UsageError):
        MemoryImage().read_block(addr)


def test_write_wrong_size():
    with pytest.raises(UsageError):
        MemoryImage().write_block(0, bytes(8))


def test_dump_load_round_trip():
    m = MemoryImage({0x40: blk(7), 0x0: blk(3), BASE: blk(9)})
    buf = io.BytesIO()
    m.dump(buf)
    assert len(buf.getvalue()) == 3 * 72
    buf.seek(0)
    assert MemoryImage.load(buf).items() == m.items()


def test_region_filters_zero_and_range():
    m = MemoryImage({0x0: blk(1), 0x40: bytes(64), BASE: blk(2)})
    assert m.region(0, BASE) == {0x0: blk(1)}


@pytest.mark.parametrize(
    "s, w, expect",
    [
        (5, 0, (BASE, 40)),
        (8, 0, (BASE + 64, 0)),
        (0, 1, (BASE + 64 * 256, 0)),
        (2047, 7, (BASE + 64 * (7 * 256 + 255), 56)),
    ],
)
def test_ecc_address_examples(s, w, expect):
    assert ecc_address(s, w, DEFAULT_GEOM) == expect


def test_ecc_address_injective_default_geometry():
    slots = {ecc_address(s, w, DEFAULT_GEOM) for s in range(2048) for w in range(8)}
    assert len(slots) == 2048 * 8


def test_ecc_region_is_one_eighth_of_l2():
    assert DEFAULT_GEOM.region_size * 8 == 1024 * 1024
    top = max(ecc_address(s, w, DEFAULT_GEOM)[0] for s in range(2048) for w in range(8))
    assert top + 64 == DEFAULT_GEOM.region_end


@pytest.mark.parametrize("s, w", [(2048, 0), (0, 8), (-1, 0)])
def test_ecc_address_out_of_range(s, w):
    with pytest.raises(UsageError):
        ecc_address(s, w, DEFAULT_GEOM)


def test_geometry_requires_multiple_of_eight_sets():
    with pytest.raises(UsageError):
        EccGeometry(12, 2)
