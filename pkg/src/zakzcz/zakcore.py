"""
Finite Zak transform, its inverse, and Zak-domain correlation.

A period-``N`` sequence with ``N = L*T`` is laid out as an ``L x T`` array
``x[l, t] = s(t + l*T)``; the forward transform is an unnormalised length-``L``
DFT down each column and the inverse carries the ``1/L`` factor.

Roots of unity are handled through integer exponents over a common
denominator so that tables of phases can be compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

__all__ = [
    "UnitRootPhase",
    "unit_roots",
    "to_exponents",
    "rescale_exponents",
    "fzt",
    "ifzt",
    "zak_shift_columns",
    "zak_correlate",
    "correlation_via_zak",
]


@dataclass(frozen=True)
class UnitRootPhase:
    """The complex number ``exp(2*pi*i*numerator/denominator)``."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "numerator", self.numerator % self.denominator)

    @property
    def value(self) -> complex:
        return complex(unit_roots(self.numerator, self.denominator))

    def __mul__(self, other: "UnitRootPhase") -> "UnitRootPhase":
        d = self.denominator * other.denominator // gcd(self.denominator, other.denominator)
        return UnitRootPhase(
            self.numerator * (d // self.denominator) + other.numerator * (d // other.denominator), d
        )

    def conjugate(self) -> "UnitRootPhase":
        return UnitRootPhase(-self.numerator, self.denominator)

    def over(self, denominator: int) -> int:
        """Numerator of the same phase over ``denominator`` (must divide evenly)."""
        if (self.numerator * denominator) % self.denominator:
            raise ValueError(f"{self} is not a {denominator}-th root of unity")
        return self.numerator * denominator // self.denominator


def unit_roots(exponents, denominator: int) -> np.ndarray:
    """Evaluate ``exp(2*pi*i*e/denominator)`` for integer exponents ``e``.

    Exponents are reduced modulo ``denominator`` first so that large
    exponents do not lose precision in the angle.
    """
    e = np.mod(np.asarray(exponents, dtype=np.int64), denominator)
    return np.exp(2j * np.pi * e / denominator)


def to_exponents(values, denominator: int, atol: float = 1e-9) -> np.ndarray:
    """Recover integer exponents ``e`` with ``values == exp(2*pi*i*e/denominator)``.

    Raises
    ------
    ValueError
        If any value is off the unit circle or not a ``denominator``-th root
        of unity within ``atol``.
    """
    v = np.asarray(values, dtype=complex)
    if np.any(np.abs(np.abs(v) - 1.0) > atol):
        raise ValueError("values are not unimodular")
    e = np.rint(np.angle(v) * denominator / (2 * np.pi)).astype(np.int64)
    e = np.mod(e, denominator)
    if np.any(np.abs(unit_roots(e, denominator) - v) > atol):
        raise ValueError(f"values are not {denominator}-th roots of unity")
    return e


def rescale_exponents(exponents, from_den: int, to_den: int) -> np.ndarray:
    """Re-express exponents over ``from_den`` as exponents over ``to_den``."""
    e = np.asarray(exponents, dtype=np.int64) * to_den
    if np.any(e % from_den):
        raise ValueError(f"cannot express {from_den}-th roots over {to_den}")
    return np.mod(e // from_den, to_den)


def fzt(s, L: int, T: int) -> np.ndarray:
    """Finite Zak transform of a period ``L*T`` sequence.

    Parameters
    ----------
    s : array_like
        Sequence of length ``L*T``.
    L, T : int
        Factorisation of the period; ``L`` rows (frequency index ``j``) and
        ``T`` columns (time index ``t``).

    Returns
    -------
    X : ndarray, shape (L, T)
        ``X[j, t] = sum_l s(t + l*T) * w_L**(-l*j)``.
    """
    s = np.asarray(s, dtype=complex)
    if L <= 0 or T <= 0 or s.ndim != 1 or s.size != L * T:
        raise ValueError(f"sequence of length {s.size} does not factor as L*T = {L}*{T}")
    return np.fft.fft(s.reshape(L, T), axis=0)


def ifzt(X) -> np.ndarray:
    """Inverse finite Zak transform: ``s(t + l*T) = (1/L) sum_j X[j, t] w_L**(l*j)``."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise ValueError("Zak matrix must be two-dimensional")
    return np.fft.ifft(X, axis=0).reshape(-1)


def zak_shift_columns(X, shift: int) -> np.ndarray:
    """Return ``X(j, t + shift)`` for all ``j, t`` using quasi-periodic extension.

    Moving past the last column wraps to the first one and multiplies row
    ``j`` by ``w_L**j`` per wrap, which is what the Zak transform of a
    cyclically advanced sequence does.
    """
    X = np.asarray(X, dtype=complex)
    L, T = X.shape
    cols = np.arange(T) + shift
    wraps = np.floor_divide(cols, T)
    phase = unit_roots(np.outer(np.arange(L), wraps), L)
    return X[:, np.mod(cols, T)] * phase


def zak_correlate(X, Y) -> np.ndarray:
    """Zak-domain correlation ``Z(j, t) = sum_k X(j, k + t) conj(Y(j, k))``.

    ``ifzt(Z)`` equals the periodic cross-correlation of the two underlying
    time sequences.
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape != Y.shape or X.ndim != 2:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    L, T = X.shape
    Z = np.empty((L, T), dtype=complex)
    for t in range(T):
        Z[:, t] = np.sum(zak_shift_columns(X, t) * Y.conj(), axis=1)
    return Z


def correlation_via_zak(X, Y, tau1: int, tau2: int) -> complex:
    """Cross-correlation at shift ``tau1 + tau2*T`` computed in the Zak domain."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape != Y.shape or X.ndim != 2:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    L, T = X.shape
    if not (0 <= tau1 < T and 0 <= tau2 < L):
        raise ValueError(f"shift ({tau1}, {tau2}) outside [0, {T}) x [0, {L})")
    col = np.sum(zak_shift_columns(X, tau1) * Y.conj(), axis=1)
    return complex(np.sum(col * unit_roots(tau2 * np.arange(L), L)) / L)
