"""Offline component oracles for catalog generation and cross-checks.

Not part of the package: the toolkit treats component labels as data. These
helpers recompute the labels independently so the embedded catalog can be
audited.

- ``spin_parity``: Arf invariant of the mod-2 quadratic form with q(c_a) = 1
  on the interval cycles and bilinear form Omega(pi) mod 2.
- ``is_hyperelliptic``: membership of the standardized permutation in the
  Rauzy class of the reversal permutation on the same number of letters.
"""

from __future__ import annotations

from functools import lru_cache

from kzspectra.exchange import Permutation, intersection_form


def _bilinear(x: int, y: int, rows: list[int]) -> int:
    acc = 0
    i = 0
    while x:
        if x & 1:
            acc ^= bin(rows[i] & y).count("1") & 1
        x >>= 1
        i += 1
    return acc


def _quadratic(x: int, rows: list[int], n: int) -> int:
    bits = [i for i in range(n) if (x >> i) & 1]
    val = len(bits) & 1
    for a in range(len(bits)):
        for b in range(a + 1, len(bits)):
            val ^= (rows[bits[a]] >> bits[b]) & 1
    return val


def spin_parity(perm: Permutation) -> int:
    """0 for even spin, 1 for odd spin."""
    omega = intersection_form(perm).omega % 2
    n = perm.n
    rows = [sum(int(omega[i, j]) << j for j in range(n)) for i in range(n)]
    vecs = [1 << i for i in range(n)]
    arf = 0
    while True:
        pair = None
        for a in range(len(vecs)):
            for b in range(a + 1, len(vecs)):
                if _bilinear(vecs[a], vecs[b], rows):
                    pair = (a, b)
                    break
            if pair:
                break
        if pair is None:
            break
        u, v = vecs[pair[0]], vecs[pair[1]]
        arf ^= _quadratic(u, rows, n) & _quadratic(v, rows, n)
        rest = [w for k, w in enumerate(vecs) if k not in pair]
        vecs = []
        for w in rest:
            if _bilinear(w, v, rows):
                w ^= u
            if _bilinear(w, u, rows):
                w ^= v
            vecs.append(w)
    for w in vecs:
        if w and _quadratic(w, rows, n):
            raise ValueError(f"quadratic form does not vanish on the radical for {perm}")
    return arf


def _std_move(top, bot, top_wins):
    top, bot = list(top), list(bot)
    if top_wins:
        w, l = top[-1], bot.pop()
        bot.insert(bot.index(w) + 1, l)
    else:
        w, l = bot[-1], top.pop()
        top.insert(top.index(w) + 1, l)
    pos = {a: i for i, a in enumerate(top)}
    return tuple(range(len(top))), tuple(pos[a] for a in bot)


@lru_cache(maxsize=None)
def hyperelliptic_class(n: int) -> frozenset:
    start = (tuple(range(n)), tuple(range(n - 1, -1, -1)))
    seen = {start}
    todo = [start]
    while todo:
        t, b = todo.pop()
        for tw in (True, False):
            nxt = _std_move(t, b, tw)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return frozenset(seen)


def is_hyperelliptic(perm: Permutation) -> bool:
    return perm.standardized() in hyperelliptic_class(perm.n)
