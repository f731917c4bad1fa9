"""Interval exchange transformations and Rauzy-Veech induction.

A labelled permutation is a pair of rows listing the same labels; the top row
gives the order of the intervals before the exchange, the bottom row after.
Lengths are indexed by the permutation's alphabet, which stays fixed along
the induction.

Step naming: a step is called ``"top"`` when the last top interval is the
shorter one (it is cut off and the top row gets rearranged) and ``"bottom"``
in the symmetric case. With ``lengths_in = M @ lengths_out`` the cocycle
matrix of one step is ``I + E[winner, loser]``; cohomology vectors are carried
by ``M.T``.

This module is the exact, readable reference. The hot loop used for
Lyapunov estimation lives in :mod:`kzspectra._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .strata import Stratum

__all__ = [
    "Permutation",
    "Iet",
    "CocycleMatrix",
    "IntersectionForm",
    "TieError",
    "ReducibleError",
    "UnboundedRunError",
    "TIE_TOLERANCE",
    "MAX_ZORICH_COUNT",
    "rauzy_step",
    "zorich_step",
    "intersection_form",
    "singularity_data",
]

TIE_TOLERANCE = 1e-14
MAX_ZORICH_COUNT = 10**6


class TieError(ArithmeticError):
    """The two competing lengths are equal (a saddle connection)."""


class ReducibleError(ValueError):
    pass


class UnboundedRunError(RuntimeError):
    """A Zorich step exceeded the repetition cap."""


@dataclass(frozen=True)
class Permutation:
    top: tuple
    bottom: tuple
    alphabet: tuple = ()

    def __post_init__(self):
        top, bottom = tuple(self.top), tuple(self.bottom)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        if len(top) < 2:
            raise ValueError("need at least two intervals")
        if len(set(top)) != len(top) or set(top) != set(bottom) or len(top) != len(bottom):
            raise ValueError(f"rows are not permutations of the same labels: {top} / {bottom}")
        alphabet = tuple(self.alphabet) if self.alphabet else tuple(sorted(top, key=_label_key))
        if set(alphabet) != set(top) or len(alphabet) != len(top):
            raise ValueError("alphabet does not match the labels")
        object.__setattr__(self, "alphabet", alphabet)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse the two-line format ``"A B C D / D C B A"``."""
        parts = text.split("/")
        if len(parts) != 2:
            raise ValueError(f"expected 'top / bottom', got {text!r}")
        return cls(tuple(parts[0].split()), tuple(parts[1].split()))

    def __str__(self):
        return " ".join(map(str, self.top)) + " / " + " ".join(map(str, self.bottom))

    def __len__(self):
        return len(self.top)

    @property
    def n(self) -> int:
        return len(self.top)

    def index(self, label) -> int:
        return self.alphabet.index(label)

    def is_irreducible(self) -> bool:
        seen_top: set = set()
        seen_bot: set = set()
        for k in range(self.n - 1):
            seen_top.add(self.top[k])
            seen_bot.add(self.bottom[k])
            if seen_top == seen_bot:
                return False
        return True

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows as int64 arrays of alphabet indices (kernel representation)."""
        pos = {a: i for i, a in enumerate(self.alphabet)}
        return (
            np.array([pos[a] for a in self.top], dtype=np.int64),
            np.array([pos[a] for a in self.bottom], dtype=np.int64),
        )

    @classmethod
    def from_arrays(cls, top, bottom, alphabet) -> "Permutation":
        return cls(tuple(alphabet[i] for i in top), tuple(alphabet[i] for i in bottom), tuple(alphabet))

    def standardized(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Label-free form: top relabelled 0..n-1, bottom rewritten accordingly."""
        pos = {a: i for i, a in enumerate(self.top)}
        return tuple(range(self.n)), tuple(pos[a] for a in self.bottom)


def _label_key(label):
    s = str(label)
    return (0, int(s), s) if s.isdigit() else (1, 0, s)


@dataclass(frozen=True)
class Iet:
    perm: Permutation
    lengths: tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if len(lengths) != self.perm.n:
            raise ValueError("one length per label is required")
        if any(not (x > 0) for x in lengths):
            raise ValueError(f"lengths must be strictly positive, got {lengths}")

    def length(self, label) -> float:
        return self.lengths[self.perm.index(label)]

    @property
    def total(self) -> float:
        return float(sum(self.lengths))

    def normalized(self) -> "Iet":
        t = self.total
        return Iet(self.perm, tuple(x / t for x in self.lengths))


class CocycleMatrix:
    """Nonnegative integer matrix with ``lengths_in = M @ lengths_out``.

    Entries are Python integers (object dtype) so products never overflow.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=object)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("cocycle matrix must be square")
        self.entries = arr

    @classmethod
    def identity(cls, n: int) -> "CocycleMatrix":
        arr = np.zeros((n, n), dtype=object)
        for i in range(n):
            arr[i, i] = 1
        return cls(arr)

    @classmethod
    def elementary(cls, n: int, winner: int, loser: int) -> "CocycleMatrix":
        m = cls.identity(n)
        m.entries[winner, loser] = 1
        return m

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "CocycleMatrix") -> "CocycleMatrix":
        return CocycleMatrix(self.entries.dot(other.entries))

    def __eq__(self, other):
        if not isinstance(other, CocycleMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool((self.entries == other.entries).all())

    def __repr__(self):
        return f"CocycleMatrix({self.entries.tolist()})"

    def apply(self, vec) -> np.ndarray:
        return self.entries.astype(float) @ np.asarray(vec, dtype=float)

    def transpose_apply(self, vec) -> np.ndarray:
        return self.entries.T.astype(float) @ np.asarray(vec, dtype=float)

    def to_float(self) -> np.ndarray:
        return self.entries.astype(float)

    def determinant(self) -> int:
        """Exact determinant (fraction-free Bareiss elimination)."""
        a = [list(row) for row in self.entries.tolist()]
        n = len(a)
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for r in range(k + 1, n):
                    if a[r][k] != 0:
                        a[k], a[r] = a[r], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntersectionForm:
    omega: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.omega.astype(float)))

    @property
    def genus(self) -> int:
        return self.rank // 2


def _compare(perm: Permutation, lengths: Sequence[float], tol: float):
    a, b = perm.top[-1], perm.bottom[-1]
    la, lb = lengths[perm.index(a)], lengths[perm.index(b)]
    if abs(la - lb) <= tol * max(la, lb):
        raise TieError(f"last top length {la!r} and last bottom length {lb!r} coincide")
    return la > lb


def _move(perm: Permutation, top_wins: bool) -> Permutation:
    if top_wins:
        winner, loser = perm.top[-1], perm.bottom[-1]
        row = list(perm.bottom[:-1])
        row.insert(row.index(winner) + 1, loser)
        return Permutation(perm.top, tuple(row), perm.alphabet)
    winner, loser = perm.bottom[-1], perm.top[-1]
    row = list(perm.top[:-1])
    row.insert(row.index(winner) + 1, loser)
    return Permutation(tuple(row), perm.bottom, perm.alphabet)


def rauzy_step(iet: Iet, tol: float = TIE_TOLERANCE) -> tuple[Iet, CocycleMatrix, str]:
    """One step of right Rauzy-Veech induction.

    Returns the induced IET, the elementary matrix ``M`` with
    ``iet.lengths = M @ out.lengths``, and the step type.
    """
    perm = iet.perm
    if not perm.is_irreducible():
        raise ReducibleError(f"{perm} is reducible")
    top_wins = _compare(perm, iet.lengths, tol)
    if top_wins:
        winner, loser, kind = perm.top[-1], perm.bottom[-1], "bottom"
    else:
        winner, loser, kind = perm.bottom[-1], perm.top[-1], "top"
    wi, li = perm.index(winner), perm.index(loser)
    lengths = list(iet.lengths)
    lengths[wi] -= lengths[li]
    new_perm = _move(perm, top_wins)
    if not new_perm.is_irreducible():
        raise ReducibleError(f"induction produced reducible {new_perm}")
    return Iet(new_perm, tuple(lengths)), CocycleMatrix.elementary(perm.n, wi, li), kind


def zorich_step(
    iet: Iet, tol: float = TIE_TOLERANCE, max_count: int = MAX_ZORICH_COUNT
) -> tuple[Iet, CocycleMatrix, int]:
    """Zorich acceleration: Rauzy steps of one type grouped together.

    Returns the induced IET, the product of the elementary matrices (left to
    right in time order) and the number of Rauzy steps taken.
    """
    cur, matrix, kind = rauzy_step(iet, tol)
    count = 1
    while True:
        perm = cur.perm
        a, b = perm.top[-1], perm.bottom[-1]
        la, lb = cur.lengths[perm.index(a)], cur.lengths[perm.index(b)]
        if abs(la - lb) <= tol * max(la, lb):
            break  # the next call reports the tie
        if ("bottom" if la > lb else "top") != kind:
            break
        if count >= max_count:
            raise UnboundedRunError(f"more than {max_count} repetitions in one Zorich step")
        cur, m, _ = rauzy_step(cur, tol)
        matrix = matrix @ m
        count += 1
    return cur, matrix, count


def intersection_form(perm: Permutation) -> IntersectionForm:
    """Antisymmetric matrix Omega(pi) indexed by the alphabet.

    ``Omega[a, b] = +1`` if a precedes b on top and follows it on the bottom,
    ``-1`` in the reverse situation, 0 otherwise.
    """
    if not perm.is_irreducible():
        raise ReducibleError(f"{perm} is reducible")
    n = perm.n
    tpos = {a: i for i, a in enumerate(perm.top)}
    bpos = {a: i for i, a in enumerate(perm.bottom)}
    omega = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(perm.alphabet):
        for j, b in enumerate(perm.alphabet):
            if tpos[a] < tpos[b] and bpos[a] > bpos[b]:
                omega[i, j] = 1
            elif tpos[a] > tpos[b] and bpos[a] < bpos[b]:
                omega[i, j] = -1
    return IntersectionForm(omega)


def _vertex_classes(perm: Permutation) -> tuple[list[int], int]:
    """Union-find over the polygon vertices of the standard suspension.

    Top vertices are P_0..P_n (ids 0..n), bottom vertices Q_0..Q_n (ids
    n+1..2n+1). The side of label a joins P_i..P_{i+1} on top and
    Q_j..Q_{j+1} on the bottom; gluing by translation identifies both ends.
    """
    n = perm.n
    parent = list(range(2 * n + 2))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    bpos = {a: j for j, a in enumerate(perm.bottom)}
    q = n + 1
    for i, a in enumerate(perm.top):
        j = bpos[a]
        union(i, q + j)
        union(i + 1, q + j + 1)
    union(0, q)
    union(n, q + n)
    return [find(x) for x in range(2 * n + 2)], n


def singularity_data(perm: Permutation) -> Stratum:
    """Stratum of the suspension of ``perm``.

    Every singularity of order m is reached by exactly m+1 of the interior
    top vertices P_1..P_{n-1}; counting them per vertex class gives the
    orders (a class with one interior vertex is a marked point, order 0).
    """
    if not perm.is_irreducible():
        raise ReducibleError(f"{perm} is reducible")
    roots, n = _vertex_classes(perm)
    counts: dict[int, int] = {}
    for r in set(roots):
        counts[r] = 0
    for i in range(1, n):
        counts[roots[i]] += 1
    orders = sorted((c - 1 for c in counts.values()), reverse=True)
    if any(m < 0 for m in orders):
        raise ValueError(f"vertex class without interior top vertex for {perm}")
    return Stratum(tuple(orders))
