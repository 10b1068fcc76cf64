import numpy as np
import pytest

from fusionpid.label_space import (
    LabelSpaceError,
    build_label_space,
    decode,
    encode,
    qa_binarize,
    qa_space,
)


def test_ordinal_range_builds_seven_values():
    space = build_label_space({"kind": "ordinal", "range": [-3, 3]})
    assert space.size == 7
    assert space.values == (-3, -2, -1, 0, 1, 2, 3)


def test_nominal_two_class():
    space = build_label_space({"kind": "nominal", "values": ["not-sarcastic", "sarcastic"]})
    assert space.size == 2


def test_binned_continuous_bin_count():
    space = build_label_space({"kind": "binned-continuous", "bin_edges": [-3, -1, 1, 3]})
    assert space.size == 3


@pytest.mark.parametrize(
    "config",
    [
        {"kind": "nominal", "values": ["a", "a"]},
        {"kind": "binned-continuous", "bin_edges": [0, 2, 1]},
        {"kind": "nominal", "values": ["only"]},
        {"kind": "ordinal", "range": [2, 2]},
    ],
)
def test_invalid_configs_rejected(config):
    with pytest.raises(LabelSpaceError):
        build_label_space(config)


def test_encode_ordinal_endpoints():
    space = build_label_space({"kind": "ordinal", "range": [-3, 3]})
    assert encode(space, 3) == 6
    assert encode(space, -3) == 0
    assert encode(space, "2") == 5  # CSV string form


def test_encode_binned_middle_and_boundaries():
    space = build_label_space({"kind": "binned-continuous", "bin_edges": [-3, -1, 1, 3]})
    assert encode(space, 0.0) == 1
    # boundary values land in the lower bin; extremes clamp to end bins
    assert encode(space, -1.0) == 0
    assert encode(space, 1.0) == 1
    assert encode(space, -3.0) == 0
    assert encode(space, 3.0) == 2


def test_encode_unknown_and_out_of_range():
    nom = build_label_space({"kind": "nominal", "values": ["no", "yes"]})
    with pytest.raises(LabelSpaceError):
        encode(nom, "maybe")
    binned = build_label_space({"kind": "binned-continuous", "bin_edges": [-3, -1, 1, 3]})
    with pytest.raises(LabelSpaceError):
        encode(binned, 3.5)


def test_encode_decode_roundtrip():
    for config in (
        {"kind": "nominal", "values": ["a", "b", "c"]},
        {"kind": "ordinal", "range": [-2, 2]},
    ):
        space = build_label_space(config)
        for value in space.values:
            assert decode(space, encode(space, value)) == value


def test_binned_encode_monotone():
    space = build_label_space({"kind": "binned-continuous", "bin_edges": [-3, -1, 1, 3]})
    xs = np.sort(np.random.default_rng(0).uniform(-3, 3, size=200))
    idx = [encode(space, x) for x in xs]
    assert all(a <= b for a, b in zip(idx, idx[1:]))


def test_qa_binarize_rules():
    assert qa_binarize("Red", "red") == 0
    assert qa_binarize("crimson", "red") == 1
    assert qa_binarize("  two  dogs ", "two dogs") == 0


def test_qa_binarize_symmetric():
    pairs = [("a b", "A  B"), ("x", "y"), ("Dog", "dog ")]
    for a, b in pairs:
        assert qa_binarize(a, b) == qa_binarize(b, a)


def test_qa_binarize_empty_rejected():
    with pytest.raises(LabelSpaceError):
        qa_binarize("   ", "red")


def test_qa_space_values():
    assert qa_space().values == ("SAME", "DIFFERENT")
