"""
Correlation analysis and certification of ZCZ sequence families.

Periodic correlations are computed with FFTs; ``theta(tau) =
sum_n s0((n + tau) mod N) conj(s1(n))``.  A correlation value counts as
zero when its magnitude is below ``ZERO_TOL * N``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import isclose, sqrt

import numpy as np

__all__ = [
    "ZERO_TOL",
    "CorrelationProfile",
    "ZczCertificate",
    "AmbiguityMap",
    "pccf",
    "zcz_width",
    "sarwate_lhs",
    "inter_set_theta",
    "cyclically_distinct",
    "distinctness_matrix",
    "ambiguity",
    "certify_set",
    "certify_family",
]

ZERO_TOL = 1e-9


@dataclass
class CorrelationProfile:
    values: np.ndarray
    kind: str  # "auto" or "cross"

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def __len__(self):
        return len(self.values)


def _pair(s0, s1):
    a = np.asarray(s0, dtype=complex)
    b = np.asarray(s1, dtype=complex)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"period mismatch: {a.shape} vs {b.shape}")
    return a, b


def _corr(a, b, axis=-1):
    # sum_n a(n + tau) conj(b(n)) is the inverse DFT of A * conj(B).
    return np.fft.ifft(np.fft.fft(a, axis=axis) * np.fft.fft(b, axis=axis).conj(), axis=axis)


def pccf(s0, s1=None) -> CorrelationProfile:
    """Periodic correlation profile; ``s1=None`` gives the autocorrelation."""
    if s1 is None:
        a, b = _pair(s0, s0)
        return CorrelationProfile(_corr(a, b), "auto")
    a, b = _pair(s0, s1)
    return CorrelationProfile(_corr(a, b), "cross")


def _set_array(sequences) -> np.ndarray:
    s = np.asarray(sequences, dtype=complex)
    if s.ndim != 2 or s.shape[0] == 0:
        raise ValueError("expected a nonempty (K, N) array of sequences")
    return s


def _all_pairs(s):
    """``theta[u, v, tau]`` for every ordered pair of rows of ``s``."""
    F = np.fft.fft(s, axis=1)
    return np.fft.ifft(F[:, None, :] * F[None, :, :].conj(), axis=2)


def zcz_width(sequences, tol: float = ZERO_TOL) -> int:
    """Largest ``Z`` with every autocorrelation zero on ``0 < tau < Z`` and every
    cross-correlation zero on ``0 <= tau < Z``.

    Measured from the sequences alone; ``Z = 0`` when two sequences already
    correlate at ``tau = 0``.
    """
    s = _set_array(sequences)
    K, N = s.shape
    theta = np.abs(_all_pairs(s))
    zero = theta <= tol * N
    zero[np.arange(K), np.arange(K), 0] = True  # in-phase autocorrelation is exempt
    ok = zero.all(axis=(0, 1))
    bad = np.flatnonzero(~ok)
    return int(bad[0]) if bad.size else N


def sarwate_lhs(theta_a: float, theta_c: float, N: int, T: int) -> float:
    """Left side of the Sarwate bound; equality with 1 means the bound is met."""
    if T <= 1:
        raise ValueError("Sarwate bound needs at least two sequences (T > 1)")
    if N <= 1:
        raise ValueError("N must exceed 1")
    return theta_c**2 / N + (N - 1) / (N * (T - 1)) * theta_a**2 / N


def inter_set_theta(sets, tol: float = ZERO_TOL):
    """Cross-correlation between different sets of a family.

    Parameters
    ----------
    sets : array_like, shape (M, T, N)

    Returns
    -------
    dict or None
        ``None`` when ``M < 2`` (not applicable).  Otherwise ``theta_c`` (the
        global maximum), ``theta_min`` (global minimum magnitude),
        ``constant`` (all magnitudes equal to ``tol * N``) and ``pairs``
        mapping ``(m1, m2)`` to that pair's maximum.
    """
    s = np.asarray(sets, dtype=complex)
    if s.ndim != 3:
        raise ValueError("expected an (M, T, N) array")
    M, _, N = s.shape
    if M < 2:
        return None
    F = np.fft.fft(s, axis=2)
    pairs = {}
    hi, lo = 0.0, np.inf
    for m1 in range(M):
        for m2 in range(M):
            if m1 == m2:
                continue
            mag = np.abs(np.fft.ifft(F[m1][:, None] * F[m2][None].conj(), axis=2))
            pairs[(m1, m2)] = float(mag.max())
            hi = max(hi, float(mag.max()))
            lo = min(lo, float(mag.min()))
    return {"theta_c": hi, "theta_min": lo, "constant": hi - lo <= tol * N, "pairs": pairs}


def cyclically_distinct(s0, s1, tol: float = ZERO_TOL) -> bool:
    """False iff some cyclic shift of ``s1`` times a unit constant equals ``s0``.

    Uses ``max |theta| == N`` (unimodular sequences); by Cauchy-Schwarz
    equality only occurs for a scaled shift.
    """
    a, b = _pair(s0, s1)
    N = a.size
    return not isclose(float(np.abs(_corr(a, b)).max()), N, abs_tol=tol * N)


def distinctness_matrix(sequences, tol: float = ZERO_TOL) -> np.ndarray:
    """Boolean ``K x K`` matrix of pairwise cyclic distinctness (diagonal False)."""
    s = _set_array(sequences)
    N = s.shape[1]
    peak = np.abs(_all_pairs(s)).max(axis=2)
    return ~np.isclose(peak, N, rtol=0, atol=tol * N)


@dataclass
class AmbiguityMap:
    """``magnitudes[i, k]`` is ``|AF(delays[i], dopplers[k])|``."""

    values: np.ndarray
    delays: np.ndarray
    dopplers: np.ndarray
    source: str = ""

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


def ambiguity(s, delays=None, dopplers=None, source: str = "") -> AmbiguityMap:
    """Periodic auto-ambiguity ``AF(tau, v) = sum_n s(n + tau) conj(s(n)) w_N**(v*n)``.

    Shifts may be negative (``-N < tau, v < N``); both axes default to ``0..N-1``.
    """
    s = np.asarray(s, dtype=complex)
    N = s.size
    delays = np.arange(N) if delays is None else np.asarray(delays, dtype=np.int64)
    dopplers = np.arange(N) if dopplers is None else np.asarray(dopplers, dtype=np.int64)
    for name, ax in (("delay", delays), ("doppler", dopplers)):
        if ax.size and (ax.min() <= -N or ax.max() >= N):
            raise ValueError(f"{name} shifts must lie in (-N, N)")
    n = np.arange(N)
    shifted = s[(n[None, :] + delays[:, None]) % N] * s.conj()[None, :]  # (tau, n)
    # Sum over n against w_N**(v n): an inverse DFT scaled by N, sampled at v mod N.
    full = np.fft.ifft(shifted, axis=1) * N
    return AmbiguityMap(full[:, dopplers % N], delays, dopplers, source)


@dataclass
class ZczCertificate:
    N: int
    T_set_size: int
    Z_measured: int
    tfm_optimal: bool
    theta_a: float  # max off-peak autocorrelation magnitude
    theta_c: float  # max within-set cross-correlation magnitude
    perfect: bool
    all_distinct: bool

    def to_dict(self) -> dict:
        return asdict(self)


def certify_set(sequences, tol: float = ZERO_TOL) -> ZczCertificate:
    s = _set_array(sequences)
    K, N = s.shape
    theta = np.abs(_all_pairs(s))
    auto = theta[np.arange(K), np.arange(K), 1:]
    off = ~np.eye(K, dtype=bool)
    cross = theta[off]
    theta_a = float(auto.max()) if auto.size else 0.0
    theta_c = float(cross.max()) if cross.size else 0.0
    Z = zcz_width(s, tol)
    distinct = distinctness_matrix(s, tol)[off]
    return ZczCertificate(
        N=N,
        T_set_size=K,
        Z_measured=Z,
        tfm_optimal=K * Z == N,
        theta_a=theta_a,
        theta_c=theta_c,
        perfect=theta_a <= tol * N,
        all_distinct=bool(distinct.all()),
    )


def certify_family(sets, R: int | None = None, T: int | None = None, tol: float = ZERO_TOL) -> dict:
    """Certificates for every set, inter-set cross-correlation and the Sarwate check.

    With ``R`` and ``T`` given, ``promised`` reports whether the measured
    values match the construction: perfect sequences, ``Z == R*T``, optimal
    sets, cyclic distinctness and (for ``M > 1``) constant inter-set
    magnitude ``sqrt(R)*T`` meeting the Sarwate bound.
    """
    s = np.asarray(sets, dtype=complex)
    if s.ndim == 2:
        s = s[None]
    M, K, N = s.shape
    certs = [certify_set(s[m], tol) for m in range(M)]
    inter = inter_set_theta(s, tol)
    out = {"sets": certs, "inter_set": inter, "sarwate_lhs": None}
    theta_a = max(c.theta_a for c in certs)
    if inter is not None and K > 1:
        out["sarwate_lhs"] = sarwate_lhs(theta_a, inter["theta_c"], N, K)
    ok = all(c.perfect and c.tfm_optimal and c.all_distinct for c in certs)
    if R is not None and T is not None:
        ok = ok and all(c.Z_measured == R * T for c in certs) and N == R * T * T
        if inter is not None:
            target = sqrt(R) * T
            ok = (
                ok
                and inter["constant"]
                and abs(inter["theta_c"] - target) <= tol * N
                and abs(out["sarwate_lhs"] - 1) <= 1e-9
            )
    out["promised"] = bool(ok)
    return out
