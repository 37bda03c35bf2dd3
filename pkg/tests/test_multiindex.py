import itertools
import math

import pytest

from grassvar.errors import InvalidDegreeError, InvalidIndexError
from grassvar.multiindex import (
    MultiIndex,
    enumerate_multiindices,
    normalize_tuple,
    permutation_sign,
    rank,
)


def test_enumerate_small_cases():
    assert [mi.indices for mi in enumerate_multiindices(2, 3)] == [(1, 2), (1, 3), (2, 3)]
    assert [mi.indices for mi in enumerate_multiindices(1, 4)] == [(1,), (2,), (3,), (4,)]
    assert [mi.indices for mi in enumerate_multiindices(3, 3)] == [(1, 2, 3)]


@pytest.mark.parametrize("k,m", [(1, 1), (2, 5), (3, 6), (4, 6)])
def test_enumerate_count_and_order(k, m):
    idx = enumerate_multiindices(k, m)
    assert len(idx) == math.comb(m, k)
    tuples = [mi.indices for mi in idx]
    assert tuples == sorted(tuples)
    assert len(set(tuples)) == len(tuples)


def test_enumerate_invalid_degree():
    with pytest.raises(InvalidDegreeError):
        enumerate_multiindices(0, 3)
    with pytest.raises(InvalidDegreeError):
        enumerate_multiindices(4, 3)


def test_normalize_examples():
    idx, sign = normalize_tuple((2, 1), 3)
    assert idx.indices == (1, 2) and sign == -1
    _, sign = normalize_tuple((1, 1), 3)
    assert sign == 0
    idx, sign = normalize_tuple((3, 1, 2), 3)
    assert idx.indices == (1, 2, 3) and sign == 1


def test_normalize_idempotent_on_increasing():
    idx, sign = normalize_tuple((1, 3, 4), 5)
    assert sign == 1 and idx.indices == (1, 3, 4)


def test_normalize_out_of_range():
    with pytest.raises(InvalidIndexError):
        normalize_tuple((0, 1), 3)
    with pytest.raises(InvalidIndexError):
        normalize_tuple((1, 4), 3)


def test_permutation_sign_consistency():
    base = (1, 3, 5, 6)
    _, base_sign = normalize_tuple(base, 6)
    for perm in itertools.permutations(base):
        _, sign = normalize_tuple(perm, 6)
        assert sign == permutation_sign(perm) * base_sign


def test_rank_examples():
    assert rank(MultiIndex((1, 2), 3)) == 0
    assert rank(MultiIndex((2, 3), 3)) == 2
    assert rank(MultiIndex((1,), 4)) == 0


def test_rank_is_inverse_of_enumeration():
    for k, m in [(1, 4), (2, 5), (3, 5)]:
        for r, mi in enumerate(enumerate_multiindices(k, m)):
            assert rank(mi) == r


def test_multiindex_validation():
    with pytest.raises(InvalidIndexError):
        MultiIndex((2, 2), 4)
    with pytest.raises(InvalidIndexError):
        MultiIndex((3, 2), 4)
    with pytest.raises(InvalidDegreeError):
        MultiIndex((1, 2, 3), 2)
