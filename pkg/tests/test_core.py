import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqfusion.core import (
    EPSILON,
    EnvLabel,
    FusionTrace,
    InvalidDistributionError,
    Method,
    ProbDist5,
    ScoreStream,
    argmax_label,
    normalize,
)

raw_vectors = st.lists(
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False), min_size=5, max_size=5
).filter(lambda v: sum(v) > 0)


def test_label_mapping_is_fixed():
    assert [(l.name, l.value) for l in EnvLabel] == [
        ("LG", 1), ("US", 2), ("DS", 3), ("UR", 4), ("DR", 5)
    ]
    assert EnvLabel.parse("us") is EnvLabel.US
    assert EnvLabel.parse("3") is EnvLabel.DS
    with pytest.raises(ValueError):
        EnvLabel.parse("XX")
    with pytest.raises(ValueError):
        EnvLabel(6)


def test_normalize_uniform():
    assert normalize([1, 1, 1, 1, 1]).p == pytest.approx((0.2,) * 5, abs=1e-15)


def test_normalize_clamps_zeros():
    d = normalize([2, 0, 0, 0, 0])
    assert d.p[1:] == (EPSILON,) * 4
    assert d.p[0] == pytest.approx(1 - 4e-9, abs=1e-15)
    assert math.fsum(d.p) == pytest.approx(1.0, abs=1e-12)


def test_normalize_keeps_normalized_input():
    assert normalize([0.3, 0.4, 0.1, 0.1, 0.1]).p == pytest.approx((0.3, 0.4, 0.1, 0.1, 0.1), abs=1e-15)


@pytest.mark.parametrize(
    "raw",
    [[0, 0, 0, 0, 0], [1, -0.1, 0, 0, 0], [1, math.nan, 0, 0, 0], [math.inf, 1, 1, 1, 1], [1, 1, 1, 1]],
)
def test_normalize_rejects(raw):
    with pytest.raises(InvalidDistributionError):
        normalize(raw)


def test_probdist_validates():
    with pytest.raises(InvalidDistributionError):
        ProbDist5((0.5, 0.5, 0.0, 0.0, 0.0))
    with pytest.raises(InvalidDistributionError):
        ProbDist5((0.3, 0.3, 0.3, 0.3, 0.3))


@given(raw_vectors)
def test_normalize_invariants(raw):
    d = normalize(raw)
    assert abs(math.fsum(d.p) - 1.0) <= 1e-9
    assert min(d.p) >= EPSILON


@given(raw_vectors)
def test_normalize_idempotent(raw):
    once = normalize(raw)
    twice = normalize(once.p)
    assert all(abs(a - b) <= 1e-12 for a, b in zip(once.p, twice.p))


@given(raw_vectors, st.floats(min_value=1e-3, max_value=1e3))
def test_argmax_scale_invariant(raw, c):
    assert argmax_label(normalize(raw).p) == argmax_label(normalize([c * x for x in raw]).p)


def test_argmax_unique_max():
    assert argmax_label([0.1, 0.6, 0.1, 0.1, 0.1], EnvLabel.LG) is EnvLabel.US


def test_argmax_tie_prefers_previous():
    assert argmax_label([0.2] * 5, EnvLabel.DS) is EnvLabel.DS


def test_argmax_tie_lowest_index():
    assert argmax_label([0.3, 0.3, 0.2, 0.1, 0.1]) is EnvLabel.LG
    # previous not among the tied labels
    assert argmax_label([0.1, 0.3, 0.3, 0.2, 0.1], EnvLabel.LG) is EnvLabel.US


def test_method_delays_and_names():
    assert [m.delay_frames(1) for m in Method] == [0, 1, 1, 2]
    assert [m.delay_frames(3) for m in Method] == [0, 3, 1, 4]
    assert Method.parse("hmm-voting") is Method.HMM_VOTING
    assert Method.parse("CNN+Voting") is Method.CNN_VOTING
    with pytest.raises(ValueError):
        Method.parse("svm")


def test_stream_and_trace_checks():
    f = ProbDist5.uniform()
    with pytest.raises(ValueError):
        ScoreStream(())
    with pytest.raises(ValueError):
        ScoreStream((f, f), (EnvLabel.LG,))
    with pytest.raises(ValueError):
        ScoreStream((f,), frame_rate_hz=0)
    with pytest.raises(ValueError):
        FusionTrace((EnvLabel.LG,), (), 0, Method.CNN)
