import itertools

import numpy as np
import pytest
from golden import ARRAY_T15, ARRAY_T5, ARRAY_T5_EXT, ARRAY_T5_LABEL_TO_Q

from zakzcz import florentine as fl


def verify_oracle(a):
    """Definition check by enumerating every symbol pair and step per row."""
    a = np.asarray(a)
    M, T = a.shape
    if any(sorted(r) != list(range(T)) for r in a.tolist()):
        return False
    for s, t in itertools.permutations(range(T), 2):
        for step in range(1, T):
            hits = sum(
                1 for row in a.tolist() if row[(row.index(s) + step) % T] == t
            )
            if hits > 1:
                return False
    return True


def test_t15_array_valid():
    assert fl.verify(ARRAY_T15)
    assert np.array_equal(fl.ARRAY_T15, ARRAY_T15)


def test_duplicate_symbol_reported():
    bad = ARRAY_T15.copy()
    bad[0, 1] = 2
    v = fl.verify(bad)
    assert not v
    assert v.violations[0].kind == "not-permutation" and v.violations[0].rows == (0,)


def test_repeated_step_reported():
    v = fl.verify([[0, 1, 2, 3, 4], [0, 1, 3, 2, 4]])
    assert not v
    assert {x.kind for x in v.violations} == {"repeated-step"}
    assert v.violations[0].rows == (0, 1)


def test_verify_never_raises():
    assert not fl.verify("not an array")
    assert not fl.verify([[]])


@pytest.mark.parametrize("T", [2, 3, 5, 7, 11, 13])
def test_base_array_prime(T):
    F = fl.base_array_prime(T)
    assert F.shape == (T - 1, T)
    assert fl.verify(F)
    if T <= 7:
        assert verify_oracle(F)


def test_base_array_matches_reference():
    assert np.array_equal(fl.base_array_prime(5), ARRAY_T5)
    assert fl.base_array_prime(2).tolist() == [[0, 1]]
    with pytest.raises(ValueError):
        fl.base_array_prime(9)


def test_reference_extensions():
    for label, arr in ARRAY_T5_EXT.items():
        assert fl.verify(arr)
        q = ARRAY_T5_LABEL_TO_Q[label]
        assert fl.extension_index(ARRAY_T5[0], arr[0]) == q
        assert np.array_equal(fl.extend_construction1(ARRAY_T5, q), arr)


def test_identity_extension_and_permutation_checks():
    assert np.array_equal(fl.extend_construction1(ARRAY_T5, 0), ARRAY_T5)
    with pytest.raises(ValueError):
        fl.extend_construction1(ARRAY_T5, fl.ExtensionPermutation(1, (1, 2, 4)))
    with pytest.raises(ValueError):
        fl.extension_permutation(ARRAY_T5[0], 6)


@pytest.mark.parametrize("T", [5, 7])
def test_all_extensions_valid(T):
    F = fl.base_array_prime(T)
    exts = fl.all_extensions(F)
    assert len(exts) == np.prod(range(1, T - 1)) - 1
    assert all(fl.verify(E) for E in exts)


def test_unique_shift_property():
    for z in range(5):
        assert fl.unique_shift_property(ARRAY_T5, 0, 1, z) == 1
    for i1, i2 in itertools.permutations(range(4), 2):
        for z in range(15):
            assert fl.unique_shift_property(ARRAY_T15, i1, i2, z) == 1
    with pytest.raises(ValueError):
        fl.unique_shift_property(ARRAY_T5, 1, 1, 0)


def test_search_small_existence_cases():
    assert fl.search_small(4, 1).shape == (1, 4)
    assert fl.search_small(4, 2) is None
    assert fl.search_small(6, 2) is None
    assert fl.search_small(8, 2) is None
    a = fl.search_small(9, 2)
    assert a.shape == (2, 9) and fl.verify(a) and verify_oracle(a)
    assert fl.search_small(9, 3) is None
    assert fl.search_small(5, 5) is None


def test_search_small_budget_exhaustion_returns_none():
    assert fl.search_small(15, 4, budget=1000) is None


def test_search_small_deterministic():
    assert np.array_equal(fl.search_small(15, 3), fl.search_small(15, 3))


@pytest.mark.slow
def test_search_small_fifteen_four_rows():
    a = fl.search_small(15, 4, budget=5_000_000)
    assert a is not None and a.shape == (4, 15) and fl.verify(a)


def test_known_array():
    assert fl.known_array(15).shape == (4, 15)
    assert fl.known_array(8).shape == (1, 8)
    assert fl.known_array(9).shape == (2, 9)


def test_csv_round_trip(tmp_path):
    p = tmp_path / "a.csv"
    fl.write_array_csv(ARRAY_T15, p)
    assert np.array_equal(fl.read_array_csv(p), ARRAY_T15)
    assert np.array_equal(fl.read_array_csv("# comment\n0,1\n"), [[0, 1]])
    with pytest.raises(ValueError):
        fl.read_array_csv("0,1\n0,1,2\n")
