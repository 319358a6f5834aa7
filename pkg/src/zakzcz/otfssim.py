"""
OTFS link simulation with a Zak-domain preamble.

Three CP-prefixed ``L x T`` delay-Doppler frames (data | preamble | data)
are modulated by ISFFT + Heisenberg transform, passed through a
doubly-selective channel with integer delays and continuous Doppler, and
the preamble is located by sliding-window correlation against a bank of
Doppler hypotheses.  Data frames are then equalized by LMMSE with the
exact channel operator.

Randomness: trial ``k`` of a run with master seed ``s`` draws everything
(truncation, channel, data, noise) from ``default_rng([s, k])``, so trials
are independent of execution order.  A random preamble is drawn from its
own substream ``default_rng([s, k, 1])`` so both preambles see the same
channel and noise.  Noise is drawn once per trial at unit variance and
scaled per SNR.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from math import ceil

import numpy as np
from scipy.stats import binomtest

from .zakcore import ifzt

logger = logging.getLogger(__name__)

__all__ = [
    "SPEED_OF_LIGHT",
    "OtfsConfig",
    "ChannelRealization",
    "TxStream",
    "SyncTrialResult",
    "isfft",
    "heisenberg",
    "modulate",
    "modulation_matrix",
    "gen_channel",
    "apply_channel",
    "channel_matrix",
    "build_tx",
    "doppler_grid",
    "synchronize",
    "qpsk_modulate",
    "qpsk_demodulate",
    "random_qpsk_frame",
    "equalize_frame",
    "run_trial",
    "monte_carlo_sync",
    "ber_after_sync",
    "velocity_sweep",
    "wilson_ci",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class OtfsConfig:
    T_doppler_bins: int = 8
    L_delay_bins: int = 16
    f_c: float = 6e9  # Hz
    delta_f: float = 15e3  # Hz
    C_paths: int = 3
    v_max: float = 200.0  # km/h
    r_tau: float = 2.3
    sigma_tau: float = 1.5e-6  # s
    Z_p_dB: float = 0.0
    cp_len: int = 32
    window_len: int = 128

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> list[str]:
        errs = []
        for name in ("T_doppler_bins", "L_delay_bins", "C_paths", "window_len"):
            if getattr(self, name) < 1:
                errs.append(f"{name} must be positive")
        if self.cp_len < 0:
            errs.append("cp_len must be non-negative")
        for name in ("f_c", "delta_f", "r_tau", "sigma_tau"):
            if getattr(self, name) <= 0:
                errs.append(f"{name} must be positive")
        if self.v_max < 0:
            errs.append("v_max must be non-negative")
        if self.window_len != self.L_delay_bins * self.T_doppler_bins:
            errs.append("window_len must equal L_delay_bins * T_doppler_bins")
        if self.C_paths - 1 >= self.L_delay_bins:
            errs.append("C_paths - 1 must be below L_delay_bins")
        if self.C_paths - 1 > self.cp_len:
            errs.append("C_paths - 1 must not exceed cp_len")
        return errs

    @property
    def N(self) -> int:
        return self.L_delay_bins * self.T_doppler_bins

    @property
    def bandwidth(self) -> float:
        return self.T_doppler_bins * self.delta_f

    @property
    def T_s(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def nu_max(self) -> float:
        return self.f_c * (self.v_max / 3.6) / SPEED_OF_LIGHT

    @property
    def frame_len(self) -> int:
        return self.cp_len + self.N

    def path_powers(self) -> np.ndarray:
        tau = np.arange(self.C_paths) * self.T_s
        return np.exp(-tau * (self.r_tau - 1) / (self.r_tau * self.sigma_tau)) * 10 ** (
            -self.Z_p_dB / 10
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ChannelRealization:
    delays: np.ndarray  # integer samples
    dopplers: np.ndarray  # Hz
    coeffs: np.ndarray  # complex gains


@dataclass
class TxStream:
    """Transmitted samples after the initial truncation.

    ``frame_starts`` are the first body sample (after the CP) of each frame,
    in stream coordinates; ``true_offset`` is ``frame_starts[1]``.
    """

    samples: np.ndarray
    frame_starts: tuple[int, int, int]
    truncation: int
    data: np.ndarray  # (2, N) QPSK symbols of the data frames, delay-Doppler order
    bits: np.ndarray  # (2, 2N)
    reference: np.ndarray  # unit-power time-domain preamble body

    @property
    def true_offset(self) -> int:
        return self.frame_starts[1]


@dataclass
class SyncTrialResult:
    true_offset: int
    detected_offset: int
    snr_db: float
    seed: int
    success: bool = field(init=False)

    def __post_init__(self):
        self.success = self.detected_offset == self.true_offset


# --- modulation -----------------------------------------------------------


def isfft(X_dd) -> np.ndarray:
    """``X_tf[l, m] = (1/sqrt(LT)) sum_{j,t} X[j, t] exp(2 pi i (l j / L - m t / T))``."""
    X = np.asarray(X_dd, dtype=complex)
    if X.ndim != 2:
        raise ValueError("delay-Doppler frame must be two-dimensional")
    L, T = X.shape
    return np.fft.ifft(np.fft.fft(X, axis=1), axis=0) * (L / np.sqrt(L * T))


def heisenberg(X_tf) -> np.ndarray:
    """``s(t + l T) = (1/sqrt(T)) sum_m X_tf[l, m] exp(2 pi i m t / T)``."""
    X = np.asarray(X_tf, dtype=complex)
    if X.ndim != 2:
        raise ValueError("time-frequency frame must be two-dimensional")
    T = X.shape[1]
    return (np.fft.ifft(X, axis=1) * np.sqrt(T)).reshape(-1)


def modulate(X_dd) -> np.ndarray:
    """ISFFT then Heisenberg transform; equals ``sqrt(L) * ifzt(X_dd)``."""
    return heisenberg(isfft(X_dd))


def modulation_matrix(L: int, T: int) -> np.ndarray:
    """Unitary ``N x N`` matrix mapping ``X_dd.reshape(-1)`` to the time frame."""
    return np.sqrt(L) * np.stack([ifzt(e.reshape(L, T)) for e in np.eye(L * T)], axis=1)


def _add_cp(body: np.ndarray, cp: int) -> np.ndarray:
    return np.concatenate([body[body.size - cp :], body]) if cp else body.copy()


def _unit_power(x: np.ndarray) -> np.ndarray:
    return x / np.sqrt(np.mean(np.abs(x) ** 2))


# --- channel --------------------------------------------------------------


def gen_channel(cfg: OtfsConfig, rng) -> ChannelRealization:
    """One path per delay bin ``0..C-1`` with ``h ~ CN(0, q_p)`` and Jakes Doppler."""
    rng = np.random.default_rng(rng)
    q = cfg.path_powers()
    C = cfg.C_paths
    h = np.sqrt(q / 2) * (rng.standard_normal(C) + 1j * rng.standard_normal(C))
    theta = rng.uniform(0.0, 2 * np.pi, C)
    return ChannelRealization(np.arange(C), cfg.nu_max * np.cos(theta), h)


def apply_channel(samples, ch: ChannelRealization, T_s: float, noise=None) -> np.ndarray:
    """``r(n) = sum_p h_p s(n - tau_p) exp(2 pi i nu_p (n - tau_p) T_s) + noise(n)``.

    Samples before the start of the stream are zero; the output has the
    input length.  ``noise`` is added as given (already scaled).
    """
    s = np.asarray(samples, dtype=complex)
    n = np.arange(s.size)
    r = np.zeros(s.size, dtype=complex)
    for tau, nu, h in zip(ch.delays, ch.dopplers, ch.coeffs):
        tau = int(tau)
        if tau >= s.size:
            continue
        shifted = np.zeros(s.size, dtype=complex)
        shifted[tau:] = s[: s.size - tau]
        r += h * shifted * np.exp(2j * np.pi * nu * (n - tau) * T_s)
    if noise is not None:
        r = r + noise
    return r


def channel_matrix(ch: ChannelRealization, N: int, start: int, T_s: float) -> np.ndarray:
    """Operator from a CP-protected frame body to the ``N`` received samples at ``start``.

    Entry ``[i, (i - tau) mod N]`` collects ``h exp(2 pi i nu (start + i - tau) T_s)``;
    the CP turns the linear delay into a cyclic one inside the frame.
    """
    H = np.zeros((N, N), dtype=complex)
    i = np.arange(N)
    for tau, nu, h in zip(ch.delays, ch.dopplers, ch.coeffs):
        H[i, (i - int(tau)) % N] += h * np.exp(2j * np.pi * nu * (start + i - int(tau)) * T_s)
    return H


# --- transmit -------------------------------------------------------------

_QPSK_BITS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])


def qpsk_modulate(bits) -> np.ndarray:
    """Gray-mapped unit-power QPSK: bit pair ``(b0, b1)`` -> ``((1-2b0) + i(1-2b1))/sqrt(2)``."""
    b = np.asarray(bits, dtype=np.int64).reshape(-1, 2)
    return ((1 - 2 * b[:, 0]) + 1j * (1 - 2 * b[:, 1])) / np.sqrt(2)


def qpsk_demodulate(symbols) -> np.ndarray:
    x = np.asarray(symbols, dtype=complex).reshape(-1)
    return np.stack([(x.real < 0), (x.imag < 0)], axis=1).astype(np.int64).reshape(-1)


def random_qpsk_frame(L: int, T: int, rng) -> np.ndarray:
    """Random QPSK delay-Doppler frame (the baseline preamble)."""
    rng = np.random.default_rng(rng)
    return qpsk_modulate(rng.integers(0, 2, 2 * L * T)).reshape(L, T)


def build_tx(
    preamble_zak, cfg: OtfsConfig, rng, truncation: int | None = None, check: bool = True
) -> TxStream:
    """Data | preamble | data, each CP-prefixed and at unit average power.

    The first ``truncation`` samples are dropped (drawn uniformly from
    ``0..cp_len`` when not given, so the first data body stays intact).
    ``check`` logs a warning when the preamble is not a perfect sequence.
    """
    rng = np.random.default_rng(rng)
    L, T = cfg.L_delay_bins, cfg.T_doppler_bins
    X = np.asarray(preamble_zak, dtype=complex)
    if X.shape != (L, T):
        raise ValueError(f"preamble must be {L} x {T}, got {X.shape}")
    ref = _unit_power(modulate(X))
    pacf = np.fft.ifft(np.abs(np.fft.fft(ref)) ** 2)
    if check and np.abs(pacf[1:]).max() > 1e-9 * cfg.N:
        logger.warning("preamble is not a perfect sequence")
    if truncation is None:
        truncation = int(rng.integers(0, cfg.cp_len + 1))
    bits = rng.integers(0, 2, (2, 2 * cfg.N))
    data = np.stack([qpsk_modulate(b) for b in bits])
    bodies = [modulate(data[0].reshape(L, T)), ref, modulate(data[1].reshape(L, T))]
    stream = np.concatenate([_add_cp(b, cfg.cp_len) for b in bodies])[truncation:]
    starts = tuple(k * cfg.frame_len + cfg.cp_len - truncation for k in range(3))
    return TxStream(stream, starts, truncation, data, bits, ref)


# --- receive --------------------------------------------------------------


def doppler_grid(cfg: OtfsConfig) -> np.ndarray:
    """``2*ceil(nu_max * N * T_s) + 1`` equally spaced hypotheses on ``[-nu_max, nu_max]``."""
    if cfg.nu_max == 0:
        return np.zeros(1)
    k = ceil(cfg.nu_max * cfg.N * cfg.T_s - 1e-12)
    return np.linspace(-cfg.nu_max, cfg.nu_max, 2 * k + 1)


def sync_metric(r, reference, T_s: float, grid) -> np.ndarray:
    """``max_nu |sum_n r(k+n) conj(ref(n)) exp(-2 pi i nu n T_s)|`` for each offset ``k``."""
    r = np.asarray(r, dtype=complex)
    ref = np.asarray(reference, dtype=complex)
    if ref.size > r.size:
        raise ValueError("acquisition range exceeds the received stream")
    n = np.arange(ref.size)
    out = np.zeros(r.size - ref.size + 1)
    for nu in np.atleast_1d(grid):
        # np.correlate conjugates its second argument.
        c = np.abs(np.correlate(r, ref * np.exp(2j * np.pi * nu * n * T_s), mode="valid"))
        np.maximum(out, c, out=out)
    return out


def synchronize(r, reference, cfg: OtfsConfig, grid=None, search=None) -> int:
    """Offset of the correlation peak; ties go to the smallest offset.

    ``search`` is an optional ``(first, last)`` offset range; the default
    covers the whole stream minus one window.
    """
    ref = np.asarray(reference)
    if ref.size != cfg.window_len:
        raise ValueError("reference length must equal window_len")
    grid = doppler_grid(cfg) if grid is None else grid
    metric = sync_metric(r, ref, cfg.T_s, grid)
    lo, hi = (0, metric.size - 1) if search is None else search
    if lo < 0 or hi >= metric.size or lo > hi:
        raise ValueError("acquisition range exceeds the received stream")
    return lo + int(np.argmax(metric[lo : hi + 1]))


def equalize_frame(y, G, noise_var: float) -> np.ndarray:
    """LMMSE estimate of unit-power symbols ``x`` from ``y = G x + n``."""
    Gh = G.conj().T
    A = Gh @ G + noise_var * np.eye(G.shape[1])
    return np.linalg.solve(A, Gh @ y)


def _frame_bits(r, start, ch, cfg, Phi, noise_var):
    N = cfg.N
    y = np.zeros(N, dtype=complex)
    lo, hi = max(start, 0), min(start + N, r.size)
    if hi > lo:
        y[lo - start : hi - start] = r[lo:hi]
    G = channel_matrix(ch, N, start, cfg.T_s) @ Phi
    return qpsk_demodulate(equalize_frame(y, G, noise_var))


def data_bit_errors(r, detected: int, tx: TxStream, ch, cfg, noise_var, Phi=None) -> int:
    """Bit errors over both data frames when the preamble is taken to start at ``detected``."""
    Phi = modulation_matrix(cfg.L_delay_bins, cfg.T_doppler_bins) if Phi is None else Phi
    errors = 0
    for k, delta in enumerate((-cfg.frame_len, cfg.frame_len)):
        bits = _frame_bits(r, detected + delta, ch, cfg, Phi, noise_var)
        errors += int(np.count_nonzero(bits != tx.bits[k]))
    return errors


# --- Monte Carlo ----------------------------------------------------------


def _preamble_for_trial(preamble, cfg, master_seed, trial):
    if isinstance(preamble, str):
        if preamble != "random":
            raise ValueError(f"unknown preamble selector {preamble!r}")
        return random_qpsk_frame(cfg.L_delay_bins, cfg.T_doppler_bins, np.random.default_rng([master_seed, trial, 1]))
    return np.asarray(preamble, dtype=complex)


def run_trial(cfg, preamble, snr_list, master_seed: int, trial: int, ber: bool = False, Phi=None):
    """One channel/noise draw evaluated at every SNR.

    Returns a list of dicts with ``true_offset``, ``detected_offset``,
    ``success`` and, with ``ber=True``, ``bit_errors`` and
    ``bit_errors_perfect`` (equalized at the true offset).
    """
    rng = np.random.default_rng([master_seed, trial])
    X = _preamble_for_trial(preamble, cfg, master_seed, trial)
    tx = build_tx(X, cfg, rng, check=not isinstance(preamble, str))
    ch = gen_channel(cfg, rng)
    clean = apply_channel(tx.samples, ch, cfg.T_s)
    w = (rng.standard_normal(clean.size) + 1j * rng.standard_normal(clean.size)) / np.sqrt(2)
    grid = doppler_grid(cfg)
    out = []
    for snr_db in snr_list:
        noise_var = 0.0 if np.isinf(snr_db) else 10 ** (-snr_db / 10)
        r = clean + np.sqrt(noise_var) * w
        det = synchronize(r, tx.reference, cfg, grid)
        rec = {"snr_db": snr_db, "true_offset": tx.true_offset, "detected_offset": det, "success": det == tx.true_offset}
        if ber:
            nv = max(noise_var, 1e-12)
            rec["bit_errors_perfect"] = data_bit_errors(r, tx.true_offset, tx, ch, cfg, nv, Phi)
            rec["bit_errors"] = rec["bit_errors_perfect"] if rec["success"] else data_bit_errors(r, det, tx, ch, cfg, nv, Phi)
        out.append(rec)
    return out


def wilson_ci(successes: int, trials: int, confidence: float = 0.95):
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _campaign(cfg, preamble, snr_list, trials, master_seed, ber):
    if trials < 1:
        raise ValueError("trials must be at least 1")
    snr_list = [float(s) for s in snr_list]
    Phi = modulation_matrix(cfg.L_delay_bins, cfg.T_doppler_bins) if ber else None
    succ = np.zeros(len(snr_list), dtype=np.int64)
    errs = np.zeros(len(snr_list), dtype=np.int64)
    errs_perfect = np.zeros(len(snr_list), dtype=np.int64)
    for k in range(trials):
        for i, rec in enumerate(run_trial(cfg, preamble, snr_list, master_seed, k, ber, Phi)):
            succ[i] += rec["success"]
            if ber:
                errs[i] += rec["bit_errors"]
                errs_perfect[i] += rec["bit_errors_perfect"]
    rows = []
    nbits = trials * 2 * 2 * cfg.N
    for i, snr in enumerate(snr_list):
        lo, hi = wilson_ci(int(succ[i]), trials)
        row = {
            "snr_db": snr,
            "trials": trials,
            "successes": int(succ[i]),
            "success_prob": succ[i] / trials,
            "ci_low": lo,
            "ci_high": hi,
        }
        if ber:
            row["ber"] = errs[i] / nbits
            row["ber_perfect_sync"] = errs_perfect[i] / nbits
        rows.append(row)
    return rows


def monte_carlo_sync(cfg: OtfsConfig, preamble, snr_list, trials: int, master_seed: int) -> list[dict]:
    """Synchronization success probability per SNR with Wilson 95% intervals.

    ``preamble`` is an ``L x T`` delay-Doppler matrix or ``"random"`` for a
    fresh random QPSK preamble per trial.
    """
    return _campaign(cfg, preamble, snr_list, trials, master_seed, ber=False)


def ber_after_sync(cfg: OtfsConfig, preamble, snr_list, trials: int, master_seed: int) -> list[dict]:
    """As :func:`monte_carlo_sync`, adding BER at the detected offset and with perfect sync."""
    return _campaign(cfg, preamble, snr_list, trials, master_seed, ber=True)


def velocity_sweep(cfg: OtfsConfig, preamble, velocities, snr_db: float, trials: int, master_seed: int) -> list[dict]:
    """Success probability against maximum velocity (km/h) at a fixed SNR."""
    rows = []
    for v in velocities:
        row = monte_carlo_sync(replace(cfg, v_max=float(v)), preamble, [snr_db], trials, master_seed)[0]
        rows.append({"v_max_kmh": float(v), **row})
    return rows
