import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zakzcz.zakcore import (
    UnitRootPhase,
    correlation_via_zak,
    fzt,
    ifzt,
    rescale_exponents,
    to_exponents,
    unit_roots,
    zak_correlate,
    zak_shift_columns,
)
from zakzcz.zczgen import generate_family


def fzt_direct(s, L, T):
    X = np.zeros((L, T), dtype=complex)
    for j in range(L):
        for t in range(T):
            X[j, t] = sum(s[t + l * T] * np.exp(-2j * np.pi * l * j / L) for l in range(L))
    return X


def pccf_direct(a, b):
    N = len(a)
    return np.array([sum(a[(n + tau) % N] * np.conj(b[n]) for n in range(N)) for tau in range(N)])


def rand_seq(rng, N):
    return rng.standard_normal(N) + 1j * rng.standard_normal(N)


def test_unit_root_phase_normalises():
    p = UnitRootPhase(17, 5)
    assert p.numerator == 2
    assert abs(abs(p.value) - 1) < 1e-15
    assert (p * UnitRootPhase(3, 10)).numerator == 7
    assert p.conjugate().numerator == 3
    assert UnitRootPhase(1, 4).over(8) == 2
    with pytest.raises(ValueError):
        UnitRootPhase(1, 4).over(2)
    with pytest.raises(ValueError):
        UnitRootPhase(1, 0)


def test_exponent_round_trip():
    e = np.arange(-20, 20)
    assert np.array_equal(to_exponents(unit_roots(e, 12), 12), e % 12)
    with pytest.raises(ValueError):
        to_exponents(np.array([1.5]), 4)
    with pytest.raises(ValueError):
        to_exponents(unit_roots([1], 8), 4)
    assert np.array_equal(rescale_exponents([1, 3], 4, 12), [3, 9])


def test_fzt_constant_sequence():
    X = fzt(np.ones(4), 2, 2)
    assert np.allclose(X, [[2, 2], [0, 0]])
    assert np.allclose(ifzt(X), np.ones(4))


def test_fzt_rejects_bad_factorisation():
    with pytest.raises(ValueError):
        fzt(np.ones(10), 3, 3)


def test_fzt_matches_direct_sum():
    rng = np.random.default_rng(1)
    s = rand_seq(rng, 24)
    assert np.allclose(fzt(s, 6, 4), fzt_direct(s, 6, 4), atol=1e-12)


@pytest.mark.parametrize("L,T", [(4, 3), (6, 2), (15, 5)])
def test_round_trip(L, T):
    rng = np.random.default_rng(L * 100 + T)
    for _ in range(100):
        s = rand_seq(rng, L * T)
        assert np.abs(ifzt(fzt(s, L, T)) - s).max() < 1e-12


def test_dft_degeneration():
    s = rand_seq(np.random.default_rng(3), 30)
    assert np.allclose(fzt(s, 30, 1)[:, 0], np.fft.fft(s), atol=1e-12)


def test_parseval():
    s = rand_seq(np.random.default_rng(4), 40)
    X = fzt(s, 8, 5)
    assert np.isclose(np.sum(np.abs(X) ** 2), 8 * np.sum(np.abs(s) ** 2))


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 8),
    st.integers(1, 8),
    st.integers(0, 2**32 - 1),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
)
def test_linearity(L, T, seed, a):
    rng = np.random.default_rng(seed)
    s0, s1 = rand_seq(rng, L * T), rand_seq(rng, L * T)
    lhs = fzt(a * s0 + s1, L, T)
    assert np.allclose(lhs, a * fzt(s0, L, T) + fzt(s1, L, T), atol=1e-9)


def test_shift_columns_matches_shifted_sequence():
    rng = np.random.default_rng(5)
    L, T = 5, 4
    s = rand_seq(rng, L * T)
    X = fzt(s, L, T)
    for k in range(-3, 2 * T):
        assert np.allclose(zak_shift_columns(X, k), fzt(np.roll(s, -k), L, T), atol=1e-10)


def test_zak_correlate_reconstructs_pccf():
    rng = np.random.default_rng(6)
    L, T = 6, 3
    a, b = rand_seq(rng, L * T), rand_seq(rng, L * T)
    Z = zak_correlate(fzt(a, L, T), fzt(b, L, T))
    assert np.allclose(ifzt(Z), pccf_direct(a, b), atol=1e-9)
    with pytest.raises(ValueError):
        zak_correlate(np.zeros((2, 3)), np.zeros((3, 2)))


def test_correlation_via_zak_energy_and_range():
    s = unit_roots(np.random.default_rng(7).integers(0, 8, 20), 8)
    X = fzt(s, 5, 4)
    assert np.isclose(correlation_via_zak(X, X, 0, 0), 20)
    with pytest.raises(ValueError):
        correlation_via_zak(X, X, 4, 0)
    with pytest.raises(ValueError):
        correlation_via_zak(X, X, 0, 5)


def test_perfect_sequence_zak_autocorrelation():
    s = generate_family("T1", 1, 5).sequences[0, 1]
    X = fzt(s, 5, 5)
    Z = ifzt(zak_correlate(X, X))
    assert np.isclose(Z[0], 25)
    assert np.abs(Z[1:]).max() < 1e-9 * 25


def test_correlation_via_zak_zcz_on_small_set():
    s = generate_family("T1", 1, 4, index_matrix=[[0, 1, 3, 2]]).sequences[0]
    X2, X3 = fzt(s[2], 4, 4), fzt(s[3], 4, 4)
    vals = np.array([correlation_via_zak(X2, X3, k % 4, k // 4) for k in range(16)])
    assert np.allclose(vals, pccf_direct(s[2], s[3]), atol=1e-9)
    assert np.abs(vals[:4]).max() < 1e-9 * 16
