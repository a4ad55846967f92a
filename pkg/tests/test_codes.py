"""Generator matrix, code construction, and encoders.

Expected values marked as frozen were produced by independent oracles:
exact high-precision recursion for the construction, brute-force
codebook enumeration for the encoders.
"""

import numpy as np
import pytest

from polarbp import (
    CodeSpec,
    construct_frozen_set,
    encode,
    encode_systematic,
    generator_matrix,
    polar_transform,
)


def test_generator_matrix_base_case():
    assert np.array_equal(generator_matrix(1), [[1, 0], [1, 1]])
    assert np.array_equal(generator_matrix(0), [[1]])


def test_generator_matrix_structure_n3():
    G = generator_matrix(3)
    # row 7 touches every column, column 0 is hit by every row
    assert G[7].all()
    assert G[:, 0].all()
    for j in range(8):
        assert G[:, j].sum() == 2 ** (3 - bin(j).count("1"))
    # lower triangular with unit diagonal
    assert np.diag(G).all()
    assert not np.triu(G, 1).any()


@pytest.mark.parametrize("n", range(7))
def test_generator_matrix_is_involution(n):
    G = generator_matrix(n).astype(np.int64)
    assert np.array_equal(G @ G % 2, np.eye(2**n, dtype=np.int64))


def test_polar_transform_matches_matrix_product():
    rng = np.random.default_rng(0)
    G = generator_matrix(4).astype(np.int64)
    for _ in range(20):
        u = rng.integers(0, 2, 16, dtype=np.uint8)
        assert np.array_equal(polar_transform(u), u.astype(np.int64) @ G % 2)


def test_polar_transform_involution():
    rng = np.random.default_rng(1)
    for _ in range(10):
        u = rng.integers(0, 2, 64, dtype=np.uint8)
        assert np.array_equal(polar_transform(polar_transform(u)), u)


def test_construction_frozen_sets():
    # frozen oracle values: exact Bhattacharyya recursion at 60 digits
    assert sorted(construct_frozen_set(8, 4, 0.0).frozen_set) == [0, 1, 2, 4]
    assert sorted(construct_frozen_set(16, 8, 1.0).frozen_set) == [0, 1, 2, 3, 4, 5, 6, 8]
    for snr in (-2.0, 0.0, 1.0, 5.0):
        assert sorted(construct_frozen_set(2, 1, snr).frozen_set) == [0]


def test_construction_properties():
    for N, K, snr in ((32, 16, 1.0), (64, 32, 1.0), (128, 64, 1.0), (256, 64, 2.0)):
        spec = construct_frozen_set(N, K, snr)
        assert spec.N == N and spec.K == K
        assert len(spec.frozen_set) == N - K
        assert len(spec.info_set) == K
        assert not set(spec.frozen_set) & set(spec.info_set)
        # input 0 is the weakest synthetic channel at any design point
        assert 0 in spec.frozen_set
        # deterministic
        assert construct_frozen_set(N, K, snr) == spec


def test_codespec_text_roundtrip():
    spec = construct_frozen_set(64, 32, 1.5)
    again = CodeSpec.from_text(spec.to_text())
    assert again == spec
    assert again.design_snr_db == spec.design_snr_db
    with pytest.raises(ValueError):
        CodeSpec.from_text("N=8 K=4 frozen=0,1,2,4")  # missing designSNR
    with pytest.raises(ValueError):
        CodeSpec.from_text("nonsense")


def test_codespec_validation():
    with pytest.raises(ValueError):
        CodeSpec(12, 4, list(range(8)))
    with pytest.raises(ValueError):
        CodeSpec(8, 0, list(range(8)))
    with pytest.raises(ValueError):
        CodeSpec(8, 4, [0, 1, 2])  # wrong frozen size
    with pytest.raises(ValueError):
        CodeSpec(8, 4, [0, 1, 2, 8])  # out of range
    with pytest.raises(ValueError):
        CodeSpec(8, 5, [0, 1, 2, 2])  # duplicate


def test_encode_single_generator_row():
    spec = CodeSpec(8, 4, [0, 1, 2, 4], 0.0)
    # info positions are 3,5,6,7 ascending; data [1,0,0,0] selects row 3
    x = encode([1, 0, 0, 0], spec)
    assert x.tolist() == [1, 1, 1, 1, 0, 0, 0, 0]


def test_encode_rate_one():
    spec = CodeSpec(4, 4, [])
    assert encode([0, 1, 1, 0], spec).tolist() == [0, 1, 1, 0]


def test_encode_all_zero_data(pc84):
    spec, H, _ = pc84
    assert not encode(np.zeros(4, dtype=np.uint8), spec).any()


def test_encode_is_linear(pc84):
    spec, _, _ = pc84
    rng = np.random.default_rng(2)
    for _ in range(20):
        d1 = rng.integers(0, 2, 4, dtype=np.uint8)
        d2 = rng.integers(0, 2, 4, dtype=np.uint8)
        assert np.array_equal(encode(d1 ^ d2, spec), encode(d1, spec) ^ encode(d2, spec))


def test_encode_systematic_frozen_example(pc84):
    spec, H, _ = pc84
    # frozen oracle: unique codeword among all 16 with x3=1, x5=1, x6=0, x7=1
    x = encode_systematic([1, 1, 0, 1], spec)
    assert x.tolist() == [0, 1, 0, 1, 0, 1, 0, 1]


def test_encode_systematic_roundtrip():
    rng = np.random.default_rng(3)
    for N, K in ((8, 4), (16, 8), (64, 32), (128, 100)):
        spec = construct_frozen_set(N, K, 1.0)
        G = generator_matrix(spec.n).astype(np.int64)
        for _ in range(10):
            d = rng.integers(0, 2, K, dtype=np.uint8)
            x = encode_systematic(d, spec)
            assert np.array_equal(x[spec.info_set], d)
            # valid codeword: u = x G has zeros on the frozen inputs
            u = x.astype(np.int64) @ G % 2
            assert not u[spec.frozen_set].any()
