import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tccsim.cache import CacheGeometry
from tccsim.config import SimConfig
from tccsim.engine import TraceRecord, run
from tccsim.errors import TraceFormatError, UsageError
from tccsim.workload import generate, parse, random_trace, serialize


def test_parse_examples():
    text = "# header\nR 1000\nW 1008 00000000DEADBEEF  # store\n\nr 40\n"
    assert parse(text) == [
        TraceRecord("R", 0x1000),
        TraceRecord("W", 0x1008, 0xDEADBEEF),
        TraceRecord("R", 0x40),
    ]


def test_serialize_format():
    assert serialize([TraceRecord("W", 0x10, 0xAB), TraceRecord("R", 0x8)]) == (
        "W 10 00000000000000AB\nR 8\n"
    )


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("R 0\nX 10\n", 2),
        ("R 0\nR 0\nR 3\n", 3),
        ("W 8 12\n", 1),
        ("W 8 zzzzzzzzzzzzzzzz\n", 1),
        ("R\n", 1),
        ("R 0 0000000000000000\n", 1),
        ("# c\nR q\n", 2),
    ],
)
def test_parse_errors_carry_line(text, lineno):
    with pytest.raises(TraceFormatError) as ei:
        parse(text)
    assert ei.value.lineno == lineno
    assert str(ei.value).startswith(f"line {lineno}:")


def test_round_trip_ten_thousand():
    trace = random_trace(10_000, 500, 0.5, 11)
    assert parse(serialize(trace)) == trace


@given(st.lists(st.tuples(st.booleans(), st.integers(0, 2**40), st.integers(0, 2**64 - 1))))
def test_round_trip_property(items):
    trace = [TraceRecord("W", 8 * a, v) if w else TraceRecord("R", 8 * a) for w, a, v in items]
    assert parse(serialize(trace)) == trace


def test_generate_deterministic():
    a = generate(5000, 256, 0.7, 0.4, seed=3)
    b = generate(5000, 256, 0.7, 0.4, seed=3)
    assert a.records == b.records and a.silent_truth == b.silent_truth
    assert generate(5000, 256, 0.7, 0.4, seed=4).records != a.records


@pytest.mark.parametrize("frac", [0.0, 1.0])
def test_generate_forced_extremes(frac):
    g = generate(4000, 64, 0.8, frac, seed=1)
    assert g.silent_truth and g.silent_fraction == frac


def test_generate_exact_length():
    for n in (0, 5, 13, 1001):
        assert len(generate(n, 16, 0.5, 0.5, seed=0).records) == n


@pytest.mark.parametrize("kwargs", [dict(working_set_blocks=0), dict(write_ratio=1.5),
                                    dict(silent_fraction=-0.1), dict(n_ops=-1)])
def test_generate_rejects(kwargs):
    args = dict(n_ops=100, working_set_blocks=8, write_ratio=0.5, silent_fraction=0.5, seed=0)
    args.update(kwargs)
    with pytest.raises(UsageError):
        generate(**args)


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 1), st.floats(0.1, 1), st.integers(0, 1000))
def test_generated_truth_matches_engine(frac, write_ratio, seed):
    cfg = SimConfig(l1_size=1024, l1_ways=2, l2_size=16384, l2_ways=4)
    g = generate(1500, 40, write_ratio, frac, seed, l1=CacheGeometry(1024, 2))
    r = run(g.records, cfg, "tcc", record_writebacks=True, flush=False)
    observed = [c.value == "silent" for _, c in r.hierarchy.writeback_log]
    assert observed == g.silent_truth
