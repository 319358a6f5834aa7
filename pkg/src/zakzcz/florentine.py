"""
Circular Florentine arrays.

An ``M x T`` array over ``Z_T`` is circular Florentine when every row is a
permutation and, for every ordered pair of distinct symbols ``(s, t)`` and
every circular step ``a`` in ``1..T-1``, at most one row has ``t`` exactly
``a`` places to the right of ``s``.  The rows of such an array serve as the
Zak-domain support patterns of different sequence sets.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path

import numpy as np

__all__ = [
    "Violation",
    "Verdict",
    "ExtensionPermutation",
    "ARRAY_T15",
    "is_prime",
    "smallest_prime_factor",
    "verify",
    "base_array_prime",
    "unique_shift_property",
    "extension_permutation",
    "extension_index",
    "extend_construction1",
    "all_extensions",
    "search_small",
    "known_array",
    "read_array_csv",
    "write_array_csv",
]

# A known 4 x 15 circular Florentine array.
ARRAY_T15 = np.array(
    [
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14],
        [0, 7, 1, 8, 2, 12, 3, 11, 9, 4, 13, 5, 14, 6, 10],
        [0, 4, 11, 7, 10, 1, 13, 9, 5, 8, 3, 6, 2, 14, 12],
        [0, 13, 7, 2, 11, 6, 14, 10, 3, 5, 12, 9, 1, 4, 8],
    ]
)


@dataclass(frozen=True)
class Violation:
    """One failed condition.

    ``kind`` is ``"not-permutation"`` (only ``rows[0]`` is meaningful) or
    ``"repeated-step"`` (two rows both place ``symbols[1]`` exactly ``step``
    places right of ``symbols[0]``).
    """

    kind: str
    rows: tuple[int, ...]
    symbols: tuple[int, int] | None = None
    step: int | None = None


@dataclass
class Verdict:
    valid: bool
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class ExtensionPermutation:
    """Rearrangement of the last ``T-2`` entries of row 0, indexed by ``q``.

    ``q`` counts permutations of the tail in lexicographic order of the
    positions they draw from, so ``q = 0`` is the identity.
    """

    q_index: int
    tail_permutation: tuple[int, ...]


def is_prime(n: int) -> bool:
    return n >= 2 and smallest_prime_factor(n) == n


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError("n must be at least 2")
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def verify(arr) -> Verdict:
    """Check both circular Florentine conditions; never raises."""
    try:
        a = np.asarray(arr, dtype=np.int64)
    except (TypeError, ValueError):
        return Verdict(False, [Violation("not-permutation", (0,))])
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] == 0:
        return Verdict(False, [Violation("not-permutation", (0,))])
    M, T = a.shape
    violations = []
    target = np.arange(T)
    for m in range(M):
        if not np.array_equal(np.sort(a[m]), target):
            violations.append(Violation("not-permutation", (m,)))
    if violations:
        return Verdict(False, violations)

    owner = {}
    for m in range(M):
        row = a[m]
        for step in range(1, T):
            shifted = np.roll(row, -step)
            for s, t in zip(row.tolist(), shifted.tolist()):
                key = (s, t, step)
                if key in owner:
                    violations.append(Violation("repeated-step", (owner[key], m), (s, t), step))
                else:
                    owner[key] = m
    return Verdict(not violations, violations)


def base_array_prime(T: int) -> np.ndarray:
    """The ``(T-1) x T`` array with rows ``((m+1)*t) mod T``, ``T`` prime."""
    if not is_prime(T):
        raise ValueError(f"T={T} is not prime")
    t = np.arange(T)
    return np.array([((m + 1) * t) % T for m in range(T - 1)], dtype=np.int64)


def unique_shift_property(arr, i1: int, i2: int, z: int) -> int:
    """Count ``t`` with ``arr[i1, t] == arr[i2, (t + z) mod T]``.

    For two distinct rows of a circular Florentine array the count is 1 for
    every shift ``z``.
    """
    if i1 == i2:
        raise ValueError("rows must be distinct")
    a = np.asarray(arr)
    return int(np.count_nonzero(a[i1] == np.roll(a[i2], -z)))


def extension_permutation(row0, q: int) -> ExtensionPermutation:
    """The ``q``-th rearrangement of the tail of ``row0`` (lexicographic)."""
    row0 = [int(x) for x in row0]
    T = len(row0)
    if T < 3:
        raise ValueError("need at least three symbols to rearrange a tail")
    count = factorial(T - 2)
    if not 0 <= q < count:
        raise ValueError(f"q must lie in [0, {count})")
    # Unrank q in the factorial number system over tail positions.
    positions = list(range(T - 2))
    order = []
    rest = q
    for k in range(T - 2, 0, -1):
        idx, rest = divmod(rest, factorial(k - 1))
        order.append(positions.pop(idx))
    tail = row0[2:]
    return ExtensionPermutation(q, tuple(tail[i] for i in order))


def _rank(order) -> int:
    remaining = sorted(order)
    rank = 0
    n = len(order)
    for k, x in enumerate(order):
        idx = remaining.index(x)
        rank += idx * factorial(n - 1 - k)
        remaining.pop(idx)
    return rank


def extension_index(row0, new_row0) -> int:
    """Inverse of :func:`extension_permutation`: the ``q`` that maps ``row0`` to ``new_row0``."""
    row0 = [int(x) for x in row0]
    new_row0 = [int(x) for x in new_row0]
    if row0[:2] != new_row0[:2] or sorted(row0[2:]) != sorted(new_row0[2:]):
        raise ValueError("rows must share their first two entries and tail symbols")
    pos = {v: i for i, v in enumerate(row0[2:])}
    return _rank([pos[v] for v in new_row0[2:]])


def extend_construction1(F, perm: ExtensionPermutation | int) -> np.ndarray:
    """Extend a circular Florentine array by relabelling through a new row 0.

    Row 0 of the result is ``F[0]`` with its tail rearranged by ``perm`` and
    every other row is ``new_row0[F[m]]``.  Relabelling a valid array by a
    permutation of the symbols keeps it valid.

    Parameters
    ----------
    F : array_like, shape (M, T)
        Valid array whose row 0 is the identity arrangement on its symbols.
    perm : ExtensionPermutation or int
        Tail rearrangement, or its index ``q``.
    """
    F = np.asarray(F, dtype=np.int64)
    if F.ndim != 2:
        raise ValueError("F must be two-dimensional")
    if not verify(F):
        raise ValueError("F is not a circular Florentine array")
    if isinstance(perm, (int, np.integer)):
        perm = extension_permutation(F[0], int(perm))
    row0 = F[0]
    if sorted(perm.tail_permutation) != sorted(row0[2:].tolist()):
        raise ValueError("permutation must keep the first two entries of row 0 fixed")
    new_row0 = np.concatenate([row0[:2], np.array(perm.tail_permutation, dtype=np.int64)])
    # Map symbol row0[t] -> new_row0[t]; equals composition when row0 is the identity.
    relabel = np.empty_like(new_row0)
    relabel[row0] = new_row0
    return relabel[F]


def search_small(T: int, target_rows: int, budget: int = 2_000_000) -> np.ndarray | None:
    """Backtracking search for a ``target_rows x T`` circular Florentine array.

    Row 0 is fixed to the identity, every row starts with 0 and rows are
    ordered by their second entry; none of this loses generality (symbol
    relabelling, rotating a single row and reordering rows all preserve the
    property).  Each row is filled against a table of used ``(s, t, step)``
    triples, always branching on the open position with the fewest
    candidate symbols, with forward checking: every free symbol must still
    fit some open position and every open position some free symbol.

    Returns ``None`` when no array exists or ``budget`` candidate placements
    run out; the result is deterministic.  ``T = 15`` with 4 rows takes
    about two million placements.
    """
    if T < 2 or target_rows < 1:
        raise ValueError("need T >= 2 and target_rows >= 1")
    if target_rows > T - 1:
        return None
    used = np.zeros((T, T, T), dtype=bool)
    rows: list[list[int]] = [list(range(T))]
    nodes = 0
    positions = np.arange(T)

    def mark(row, value):
        for i in range(T):
            for step in range(1, T):
                used[row[i], row[(i + step) % T], step] = value

    def place(compat, x, k):
        # Symbol y at position p sits d = (p - k) mod T steps right of x.
        d = (positions - k) % T
        out = compat & ~used[x, :, d] & ~used[:, x, (T - d) % T].T
        out[:, x] = False
        out[k] = False
        out[k, x] = True
        return out

    def next_row():
        if len(rows) == target_rows:
            return True
        compat = np.ones((T, T), dtype=bool)
        compat[:, 0] = False
        return fill({0: 0}, place(compat, 0, 0), list(range(1, T)))

    def fill(row, compat, open_pos):
        nonlocal nodes
        if not open_pos:
            done = [row[p] for p in range(T)]
            rows.append(done)
            mark(done, True)
            if next_row():
                return True
            mark(done, False)
            rows.pop()
            return False
        sub = compat[open_pos]
        # Position 1 first (it carries the row-order symmetry break), then most constrained.
        i = 0 if open_pos[0] == 1 else int(np.argmin(sub.sum(axis=1)))
        k = open_pos[i]
        lowest = rows[-1][1] + 1 if k == 1 else 0
        rest = open_pos[:i] + open_pos[i + 1 :]
        for x in np.flatnonzero(sub[i]).tolist():
            if x < lowest:
                continue
            nodes += 1
            if nodes > budget:
                raise _BudgetExhausted
            nxt = place(compat, x, k)
            if rest:
                left = nxt[rest]
                free = np.ones(T, dtype=bool)
                free[list(row.values())] = False
                free[x] = False
                if not left.any(axis=1).all() or not left[:, free].any(axis=0).all():
                    continue
            row[k] = x
            if fill(row, nxt, rest):
                return True
            del row[k]
        return False

    mark(rows[0], True)
    try:
        found = next_row()
    except _BudgetExhausted:
        return None
    return np.array(rows, dtype=np.int64) if found else None


class _BudgetExhausted(Exception):
    pass


def known_array(T: int, budget: int = 2_000_000) -> np.ndarray:
    """A base array for ``T`` with as many rows as are cheaply available.

    Prime ``T`` gives the full multiplicative array, ``T = 15`` the stored
    4-row array, even ``T`` the single identity row (the maximum), and other
    ``T`` a searched array with ``p - 1`` rows, ``p`` the smallest prime
    factor of ``T``.
    """
    if is_prime(T):
        return base_array_prime(T)
    if T == 15:
        return ARRAY_T15.copy()
    if T % 2 == 0:
        return np.arange(T, dtype=np.int64)[None, :]
    rows = smallest_prime_factor(T) - 1
    arr = search_small(T, rows, budget)
    if arr is None:
        raise RuntimeError(f"no {rows}-row array for T={T} within budget")
    return arr


def read_array_csv(path_or_text) -> np.ndarray:
    """Parse an array CSV (one row per line, optional ``#`` comment lines)."""
    if isinstance(path_or_text, Path) or (
        isinstance(path_or_text, str) and "\n" not in path_or_text and Path(path_or_text).exists()
    ):
        text = Path(path_or_text).read_text()
    else:
        text = str(path_or_text)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = [[int(x) for x in rec] for rec in csv.reader(lines)]
    if len({len(r) for r in rows}) > 1:
        raise ValueError("ragged array CSV")
    return np.array(rows, dtype=np.int64)


def write_array_csv(arr, path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(arr).tolist():
        writer.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def all_extensions(F) -> list[np.ndarray]:
    """Every extension ``F^q`` for ``0 < q < (T-2)!``."""
    T = np.asarray(F).shape[1]
    return [extend_construction1(F, q) for q in range(1, factorial(T - 2))]

