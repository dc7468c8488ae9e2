import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polar_rcsc.code import (
    CodeError,
    NodeClass,
    PolarCode,
    bhattacharyya_parameters,
    bit_reversal_permutation,
    classify_tree,
    construct_frozen_set,
    encode,
    format_frozen_file,
    is_valid_codeword,
    load_frozen_file,
    node_class_counts,
    polar_transform,
    save_frozen_file,
)
from reference import all_codewords, generator_matrix


def test_bhattacharyya_n2_values():
    z = bhattacharyya_parameters(2, 0.5)
    np.testing.assert_allclose(z, [0.9375, 0.5625, 0.4375, 0.0625])


def test_construction_n3_k3_freezes_first_five():
    code = construct_frozen_set(3, 3)
    assert code.frozen_indices.tolist() == [0, 1, 2, 3, 4]
    assert code.info_indices.tolist() == [5, 6, 7]


def test_construction_degenerate_rates():
    assert construct_frozen_set(2, 4).frozen_indices.size == 0
    assert construct_frozen_set(2, 0).frozen_indices.tolist() == [0, 1, 2, 3]
    with pytest.raises(CodeError):
        construct_frozen_set(2, 5)


def test_construction_is_nested():
    # raising K only unfreezes positions
    for K in range(16):
        a = construct_frozen_set(4, K).frozen
        b = construct_frozen_set(4, K + 1).frozen
        assert np.all(b <= a)


def test_encode_example_n2():
    code = PolarCode.from_frozen_indices(2, [])
    assert encode(code, [0, 0, 0, 1]).tolist() == [1, 1, 1, 1]


def test_encode_rejects_frozen_one():
    code = PolarCode.from_frozen_indices(3, [0, 1, 2, 3, 4])
    u = np.zeros(8, np.uint8)
    u[2] = 1
    with pytest.raises(CodeError):
        encode(code, u)


@pytest.mark.parametrize("n", range(0, 6))
def test_transform_matches_generator_matrix(n):
    N = 1 << n
    G = generator_matrix(n)
    eye = np.eye(N, dtype=np.uint8)
    np.testing.assert_array_equal(polar_transform(eye), G)


@pytest.mark.parametrize("n", range(1, 5))
def test_transform_is_involution_exhaustive(n):
    N = 1 << n
    words = np.array(list(itertools.product((0, 1), repeat=N)), np.uint8)
    np.testing.assert_array_equal(polar_transform(polar_transform(words)), words)


@given(st.integers(1, 10), st.data())
@settings(max_examples=60, deadline=None)
def test_transform_linear_and_involutive(n, data):
    N = 1 << n
    a = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), np.uint8)
    b = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), np.uint8)
    np.testing.assert_array_equal(polar_transform(a ^ b), polar_transform(a) ^ polar_transform(b))
    np.testing.assert_array_equal(polar_transform(polar_transform(a)), a)


def test_bit_reversal():
    assert bit_reversal_permutation(3).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_validity_8_3_exhaustive(code_8_3):
    members = {tuple(x) for x, _ in all_codewords(code_8_3.frozen)}
    assert len(members) == 8
    for bits in itertools.product((0, 1), repeat=8):
        assert is_valid_codeword(code_8_3, np.array(bits)) == (bits in members)


def test_single_bit_flip_is_invalid(code_8_3):
    u = np.zeros(8, np.uint8)
    u[[5, 7]] = 1
    x = encode(code_8_3, u)
    assert is_valid_codeword(code_8_3, x)
    for j in range(8):
        y = x.copy()
        y[j] ^= 1
        assert not is_valid_codeword(code_8_3, y)


def test_classify_8_3(code_8_3):
    cls = classify_tree(code_8_3)
    R0, R1, MX = NodeClass.RATE0, NodeClass.RATE1, NodeClass.MIXED
    # level order: root, layer 1, layer 2, leaves
    assert cls[:7].tolist() == [MX, R0, MX, R0, R0, MX, R1]
    assert node_class_counts(cls) == {"rate0": 8, "rate1": 4, "mixed": 3}


def test_classify_extreme_rates():
    assert np.all(classify_tree(construct_frozen_set(3, 8)) == NodeClass.RATE1)
    assert np.all(classify_tree(construct_frozen_set(3, 0)) == NodeClass.RATE0)


def test_frozen_file_roundtrip(tmp_path):
    code = construct_frozen_set(6, 20)
    p = tmp_path / "c.frz"
    save_frozen_file(code, p)
    assert load_frozen_file(p) == code
    assert format_frozen_file(code).startswith("64 20\n")


@pytest.mark.parametrize("text", [
    "8 3\n0 1 2 3\n",          # count mismatch
    "8 3\n0 2 1 3 4\n",        # not ascending
    "8 3\n0 1 2 3 9\n",        # out of range
    "6 3\n0 1 2\n",            # N not a power of two
    "8\n0 1 2 3 4\n",          # bad header
    "8 3\n0 1 2 x 4\n",        # non-integer
])
def test_frozen_file_errors(tmp_path, text):
    p = tmp_path / "bad.frz"
    p.write_text(text)
    with pytest.raises(CodeError):
        load_frozen_file(p)


def test_code_validation():
    with pytest.raises(CodeError):
        PolarCode.from_frozen_indices(3, [8])
    with pytest.raises(CodeError):
        PolarCode(np.zeros(6, bool))
    code = PolarCode.from_frozen_indices(3, [0, 1, 2, 3, 4])
    assert (code.N, code.K, code.n) == (8, 3, 3)
    assert code.rate == pytest.approx(3 / 8)
