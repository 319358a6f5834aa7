"""
Zak-domain construction of multiple ZCZ sequence sets.

Each set ``m`` is described by an index row ``A[m]`` (a permutation of
``Z_T``) and a ``T x L`` phase matrix ``P^m`` with ``L = R*T``.  Sequence
``u`` of the set has Zak transform

    X_u(A[m][t] + r*T, t) = T*sqrt(R) * P^m[u, t + r*T],   0 <= r < R,

and zero elsewhere; the time sequence follows from the inverse transform.
The phase generators below give the three admissible families (``R = 1``,
odd ``R``, even ``R``) and their column-swapped variants; the ``verify_*``
functions check the admissibility conditions numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, lcm, sqrt

import numpy as np

from . import florentine
from .zakcore import ifzt, to_exponents, unit_roots

__all__ = [
    "THEOREMS",
    "PhaseMatrix",
    "SequenceFamily",
    "phase_theorem1",
    "phase_corollary1",
    "phase_theorem2",
    "phase_corollary2",
    "phase_theorem3",
    "phase_corollary3",
    "swap_block_tails",
    "assemble_zak",
    "generate_set",
    "generate_family",
    "max_sets",
    "sequence_denominator",
    "verify_lemma5",
    "verify_lemma6",
    "verify_lemma7",
    "verify_lemma8",
    "check_family",
]

THEOREMS = ("T1", "C1", "T2", "C2", "T3", "C3")


@dataclass(frozen=True)
class PhaseMatrix:
    """Unit-modulus ``T x L`` phases stored as integer exponents over ``denominator``."""

    exponents: np.ndarray
    denominator: int
    set_index: int = 0

    def __post_init__(self):
        e = np.mod(np.asarray(self.exponents, dtype=np.int64), self.denominator)
        if e.ndim != 2:
            raise ValueError("phase matrix must be two-dimensional")
        e.setflags(write=False)
        object.__setattr__(self, "exponents", e)

    @property
    def shape(self):
        return self.exponents.shape

    @property
    def values(self) -> np.ndarray:
        return unit_roots(self.exponents, self.denominator)

    def over(self, denominator: int) -> np.ndarray:
        """Exponents re-expressed over another denominator (a multiple of this one)."""
        if denominator % self.denominator:
            raise ValueError(f"{denominator} is not a multiple of {self.denominator}")
        return self.exponents * (denominator // self.denominator)


def _check_T(T: int):
    if T <= 3:
        raise ValueError(f"constructions need T > 3, got T={T}")


def _tu(T: int):
    u = np.arange(T)[:, None]
    t = np.arange(T)[None, :]
    return u * t


def phase_theorem1(T: int) -> PhaseMatrix:
    """``P[u, t] = w_T**(u*t)``."""
    _check_T(T)
    return PhaseMatrix(_tu(T), T)


def swap_block_tails(P: PhaseMatrix, T: int) -> PhaseMatrix:
    """Swap the last two columns of every length-``T`` block (an involution)."""
    e = np.array(P.exponents)
    L = e.shape[1]
    if L % T:
        raise ValueError("phase matrix width is not a multiple of T")
    for r in range(1, L // T + 1):
        e[:, [r * T - 2, r * T - 1]] = e[:, [r * T - 1, r * T - 2]]
    return PhaseMatrix(e, P.denominator, P.set_index)


def phase_corollary1(T: int) -> PhaseMatrix:
    """Theorem-1 phases with the last two columns swapped."""
    return swap_block_tails(phase_theorem1(T), T)


def _smallest_prime_divisor(R: int) -> int:
    return florentine.smallest_prime_factor(R)


def phase_theorem2(R: int, T: int, m: int) -> PhaseMatrix:
    """``P^m[u, t + r*T] = w_R**((m+1)*r*(r+1)/2) * w_T**(u*t)`` for odd ``R``."""
    _check_T(T)
    if R < 3 or R % 2 == 0:
        raise ValueError(f"R must be odd and at least 3 for Theorem 2, got R={R}")
    if not 0 <= m < _smallest_prime_divisor(R) - 1:
        raise ValueError(f"set index m={m} out of range for R={R}")
    D = lcm(R, T)
    r = np.arange(R)
    a = (m + 1) * r * (r + 1) // 2
    e = (a[None, :, None] * (D // R) + _tu(T)[:, None, :] * (D // T)).reshape(T, R * T)
    return PhaseMatrix(e, D, m)


def phase_corollary2(R: int, T: int, m: int) -> PhaseMatrix:
    return swap_block_tails(phase_theorem2(R, T, m), T)


def phase_theorem3(R: int, T: int) -> PhaseMatrix:
    """``P[u, t + r*T] = w_{2R}**(r*r) * w_T**(u*t)`` for even ``R``."""
    _check_T(T)
    if R < 2 or R % 2:
        raise ValueError(f"R must be even for Theorem 3, got R={R}")
    D = lcm(2 * R, T)
    r = np.arange(R)
    e = ((r * r)[None, :, None] * (D // (2 * R)) + _tu(T)[:, None, :] * (D // T)).reshape(T, R * T)
    return PhaseMatrix(e, D, 0)


def phase_corollary3(R: int, T: int) -> PhaseMatrix:
    return swap_block_tails(phase_theorem3(R, T), T)


def _check_row(A_row, T: int) -> np.ndarray:
    A = np.asarray(A_row, dtype=np.int64)
    if A.shape != (T,) or not np.array_equal(np.sort(A), np.arange(T)):
        raise ValueError(f"index row {A.tolist()} is not a permutation of Z_{T}")
    return A


def _dims(P: PhaseMatrix, R: int):
    Tu, L = P.shape
    if L % R:
        raise ValueError("phase matrix width is not a multiple of R")
    T = L // R
    if Tu != T:
        raise ValueError(f"phase matrix must be T x R*T, got {P.shape} for R={R}")
    return T, L


def assemble_zak(A_row, P: PhaseMatrix, R: int) -> np.ndarray:
    """Zak matrices of every sequence of one set.

    Returns
    -------
    X : ndarray, shape (T, L, T)
        ``X[u]`` is the ``L x T`` Zak matrix of sequence ``u``; each column
        holds ``R`` nonzeros of magnitude ``T*sqrt(R)``.
    """
    T, L = _dims(P, R)
    A = _check_row(A_row, T)
    X = np.zeros((T, L, T), dtype=complex)
    t = np.arange(T)
    vals = P.values.reshape(T, R, T)
    for r in range(R):
        X[:, A + r * T, t] = T * sqrt(R) * vals[:, r, :]
    return X


def generate_set(A_row, P: PhaseMatrix, R: int) -> np.ndarray:
    """Time-domain sequences of one set, shape ``(T, R*T*T)``.

    Evaluates ``s_u(t + l*T) = (T*sqrt(R)/L) * sum_r P[u, t + r*T] *
    w_L**(l*(A[t] + r*T))`` directly.
    """
    T, L = _dims(P, R)
    A = _check_row(A_row, T)
    l = np.arange(L)[:, None, None]
    j = A[None, None, :] + T * np.arange(R)[None, :, None]
    kernel = unit_roots(l * j, L)  # (L, R, T)
    vals = P.values.reshape(T, R, T)  # (u, r, t)
    s = np.einsum("urt,lrt->ult", vals, kernel) * (T * sqrt(R) / L)
    return s.reshape(T, L * T)


def sequence_denominator(R: int, T: int) -> int:
    """A root-of-unity order that holds every sample of a generated family.

    Quadratic Gauss sums contribute eighth roots of unity on top of the
    ``2*R*T``-th roots carried by the phase and index matrices.
    """
    return lcm(2 * R * T, 8)


@dataclass
class SequenceFamily:
    """``M`` sets of ``T`` sequences of period ``N = R*T*T``.

    ``sequences[m, u]`` is sequence ``u`` of set ``m``.  ``rows`` are the
    row indices taken from the source array (``None`` for a user-supplied
    index matrix) and ``q`` the extension index used to build it.
    """

    sequences: np.ndarray
    index_matrix: np.ndarray
    phases: list[PhaseMatrix]
    R: int
    T: int
    theorem: str | None = None
    q: int | None = None
    rows: list[int] | None = None
    source: str = "user"
    meta: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.sequences.shape[0]

    @property
    def L(self) -> int:
        return self.R * self.T

    @property
    def N(self) -> int:
        return self.R * self.T * self.T

    def zak(self, m: int) -> np.ndarray:
        return assemble_zak(self.index_matrix[m], self.phases[m], self.R)

    def exponent_form(self, denominator: int | None = None):
        """``(D, E)`` with ``sequences == exp(2*pi*i*E/D)``; raises if not exact."""
        D = denominator or sequence_denominator(self.R, self.T)
        return D, to_exponents(self.sequences, D)

    def expected(self) -> dict:
        """Parameters promised by the construction."""
        return {
            "N": self.N,
            "T": self.T,
            "M": self.M,
            "Z": self.R * self.T,
            "theta_c_family": None if self.M < 2 else sqrt(self.R) * self.T,
        }


def max_sets(theorem: str, R: int, rows_available: int) -> int:
    if theorem in ("T1", "C1"):
        return rows_available
    if theorem in ("T2", "C2"):
        return min(_smallest_prime_divisor(R) - 1, rows_available)
    return 1


def _check_theorem_params(theorem: str, R: int, T: int):
    if theorem not in THEOREMS:
        raise ValueError(f"unknown construction {theorem!r}; expected one of {THEOREMS}")
    _check_T(T)
    if theorem in ("T1", "C1") and R != 1:
        raise ValueError(f"R must be 1 for {theorem}, got R={R}")
    if theorem in ("T2", "C2") and (R < 3 or R % 2 == 0):
        raise ValueError(f"R must be odd for Theorem 2, got R={R}")
    if theorem in ("T3", "C3") and (R < 2 or R % 2):
        raise ValueError(f"R must be even for Theorem 3, got R={R}")


def _phases(theorem: str, R: int, T: int, M: int) -> list[PhaseMatrix]:
    if theorem == "T1":
        return [PhaseMatrix(phase_theorem1(T).exponents, T, m) for m in range(M)]
    if theorem == "C1":
        return [PhaseMatrix(phase_corollary1(T).exponents, T, m) for m in range(M)]
    if theorem == "T2":
        return [phase_theorem2(R, T, m) for m in range(M)]
    if theorem == "C2":
        return [phase_corollary2(R, T, m) for m in range(M)]
    if theorem == "T3":
        return [phase_theorem3(R, T)]
    return [phase_corollary3(R, T)]


def generate_family(
    theorem: str,
    R: int,
    T: int,
    q: int | None = None,
    rows=None,
    base=None,
    index_matrix=None,
) -> SequenceFamily:
    """Build a family of ZCZ sequence sets.

    Parameters
    ----------
    theorem : {"T1", "C1", "T2", "C2", "T3", "C3"}
        Construction: ``T*`` use an extended array ``F^q`` with the plain
        phases, ``C*`` the base array ``F`` with block-tail-swapped phases.
        ``*1`` needs ``R = 1``, ``*2`` odd ``R``, ``*3`` even ``R``.
    R, T : int
        Period is ``R*T*T``; ``T > 3``.
    q : int, optional
        Extension index for ``T*`` constructions, ``0 < q < (T-2)!``;
        defaults to 1.  Must be absent or 0 for ``C*``.
    rows : sequence of int, optional
        Rows of the (extended) array to use; defaults to the first ``M``.
    base : array_like, optional
        Base circular Florentine array with identity row 0; defaults to
        :func:`florentine.known_array`.
    index_matrix : array_like, optional
        Use these index rows directly instead of an array (``q``, ``rows``
        and ``base`` are then ignored).
    """
    _check_theorem_params(theorem, R, T)
    if index_matrix is not None:
        A = np.atleast_2d(np.asarray(index_matrix, dtype=np.int64))
        for row in A:
            _check_row(row, T)
        if len(A) > 1 and not florentine.verify(A):
            raise ValueError("index matrix with several rows must be circular Florentine")
        limit = max_sets(theorem, R, len(A))
        if len(A) > limit:
            raise ValueError(f"{theorem} allows at most {limit} sets, index matrix has {len(A)}")
        source, sel = "user", None
    else:
        F = florentine.known_array(T) if base is None else np.asarray(base, dtype=np.int64)
        if F.shape[1] != T or not florentine.verify(F):
            raise ValueError("base is not a circular Florentine array on Z_T")
        if theorem.startswith("T"):
            q = 1 if q is None else int(q)
            if not 0 < q < factorial(T - 2):
                raise ValueError(f"{theorem} needs 0 < q < (T-2)! = {factorial(T - 2)}, got q={q}")
            F = florentine.extend_construction1(F, q)
            source = f"F^{q}"
        else:
            if q not in (None, 0):
                raise ValueError(f"{theorem} uses the base array; q must be 0 or absent")
            q, source = 0, "base array"
        limit = max_sets(theorem, R, len(F))
        if rows is None:
            sel = list(range(limit))
        else:
            sel = [int(r) for r in rows]
            if len(sel) > limit:
                raise ValueError(f"{theorem} allows at most {limit} sets, {len(sel)} rows requested")
            if len(set(sel)) != len(sel) or any(not 0 <= r < len(F) for r in sel):
                raise ValueError(f"row selection {sel} invalid for a {len(F)}-row array")
        A = F[sel]
    M = len(A)
    phases = _phases(theorem, R, T, M)
    # Some extensions give a row with A(t) + d*t a permutation (or affine) for
    # some d; the set then has a shifted copy or a too-wide zone.
    for m in range(M):
        if not verify_lemma7(A[m], phases[m], R, T):
            where = "" if q is None else f" (q={q})"
            raise ValueError(
                f"index row {A[m].tolist()}{where} fails the in-set correlation conditions for {theorem}"
            )
    seqs = np.stack([generate_set(A[m], phases[m], R) for m in range(M)])
    return SequenceFamily(seqs, A, phases, R, T, theorem, q, sel, source)


# --- admissibility conditions ---------------------------------------------


def verify_lemma5(P: PhaseMatrix, R: int, T: int, atol: float = 1e-9) -> bool:
    """Unimodularity: ``|sum_r P[u, t + r*T] w_R**(l*r)| == sqrt(R)`` for all ``u, t, l``."""
    vals = P.values.reshape(P.shape[0], R, T)
    r = np.arange(R)
    kernel = unit_roots(np.outer(np.arange(R), r), R)  # (l mod R, r)
    sums = np.einsum("urt,lr->ult", vals, kernel)
    return bool(np.all(np.abs(np.abs(sums) - sqrt(R)) <= atol))


def verify_lemma6(A_row, P: PhaseMatrix, atol: float = 1e-12) -> bool:
    """Perfect autocorrelation: index row is a permutation and phases are unimodular."""
    A = np.asarray(A_row)
    perm = A.ndim == 1 and np.array_equal(np.sort(A), np.arange(A.size))
    return bool(perm and np.all(np.abs(np.abs(P.values) - 1) <= atol))


def verify_lemma7(A_row, P: PhaseMatrix, R: int, T: int, atol: float = 1e-9) -> bool:
    """Optimal ZCZ and cyclic distinctness within one set.

    For every ``u != v`` with ``C = P_u * conj(P_v)``: the sums
    ``sum_{r,t} w_L**(tau2*(A[t] + r*T)) C[t + r*T]`` vanish for
    ``0 <= tau2 < R``, and ``|sum_{r,t} w_T**A[t] C[t + r*T]|`` lies strictly
    between 0 and ``R*T``.
    """
    A = np.asarray(A_row, dtype=np.int64)
    if A.shape != (T,) or not np.array_equal(np.sort(A), np.arange(T)):
        return False
    L = R * T
    vals = P.values
    j = (A[None, :] + T * np.arange(R)[:, None]).reshape(-1)  # column t + r*T -> A[t] + r*T
    zero_kernel = unit_roots(np.outer(np.arange(R), j), L)  # (tau2, column)
    edge_kernel = unit_roots(np.tile(A, R), T)
    cross = vals[:, None, :] * vals[None, :, :].conj()  # (u, v, column)
    off = ~np.eye(T, dtype=bool)
    zero = np.abs(np.einsum("uvc,kc->uvk", cross, zero_kernel))[off]
    edge = np.abs(cross @ edge_kernel)[off]
    return bool(np.all(zero <= atol) and np.all((edge > atol) & (edge < L - atol)))


def verify_lemma8(P1: PhaseMatrix, P2: PhaseMatrix, R: int, T: int, atol: float = 1e-9) -> bool:
    """Inter-set condition: ``|sum_r P1_u(t + tau1 + r*T) conj(P2_v(t + r*T)) w_R**(r*tau2)| == sqrt(R)``.

    Checked for all ``u, v, t, tau1, tau2``.  When ``t + tau1`` passes the end
    of a block it wraps within the same block and picks up ``w_R**r``, the
    factor a column shift of the Zak matrix carries; since every ``tau2`` is
    tested this only relabels ``tau2``.
    """
    v1 = P1.values.reshape(P1.shape[0], R, T)
    v2 = P2.values.reshape(P2.shape[0], R, T)
    r = np.arange(R)
    t = np.arange(T)
    kernel = unit_roots(np.outer(r, r), R)  # (r, tau2)
    for tau1 in range(T):
        cols = t + tau1
        wrap = unit_roots(np.outer(r, cols // T), R)  # (r, t)
        shifted = v1[:, :, cols % T] * wrap
        prod = shifted[:, None] * v2[None].conj()  # (u, v, r, t)
        sums = np.einsum("uvrt,rk->uvtk", prod, kernel)
        if np.any(np.abs(np.abs(sums) - sqrt(R)) > atol):
            return False
    return True


def check_family(family: SequenceFamily, atol: float = 1e-9) -> dict:
    """Run every admissibility check on a family; keys map to booleans."""
    R, T = family.R, family.T
    out = {
        "lemma5": all(verify_lemma5(P, R, T, atol) for P in family.phases),
        "lemma6": all(verify_lemma6(A, P) for A, P in zip(family.index_matrix, family.phases)),
        "lemma7": all(
            verify_lemma7(A, P, R, T, atol) for A, P in zip(family.index_matrix, family.phases)
        ),
    }
    if family.M > 1:
        out["florentine"] = florentine.verify(family.index_matrix).valid
        out["lemma8"] = all(
            verify_lemma8(family.phases[a], family.phases[b], R, T, atol)
            for a in range(family.M)
            for b in range(family.M)
            if a != b
        )
    out["admissible"] = all(out.values())
    return out


def family_from_sets(sets, R: int, T: int, **kw) -> SequenceFamily:
    """Wrap raw sequences (e.g. read from disk) whose construction data is unknown."""
    seqs = np.asarray(sets, dtype=complex)
    if seqs.ndim == 2:
        seqs = seqs[None]
    return SequenceFamily(seqs, kw.pop("index_matrix", None), kw.pop("phases", []), R, T, **kw)


def zak_to_sequence(X) -> np.ndarray:
    """Convenience alias for :func:`zakcore.ifzt` on a single Zak matrix."""
    return ifzt(X)
