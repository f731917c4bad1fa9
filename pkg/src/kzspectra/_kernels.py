"""Hot loop of the Lyapunov estimator: accelerated Rauzy-Veech induction
carrying a tracked basis of cohomology vectors.

Every kernel is written once as plain Python over numpy arrays and compiled
with ``numba.njit`` unless the environment variable ``KZSPECTRA_NUMBA`` is
set to ``0`` (or numba is missing). The uncompiled functions stay reachable
under ``*_py`` names so both paths can be compared in one process.

State conventions (all arrays are mutated in place):

- ``top``, ``bot``: int64 rows of alphabet indices.
- ``lengths``: float64, normalized to total 1 between Zorich steps.
- ``basis``: float64 (n, p); column j is a tracked vector indexed by label.
"""

from __future__ import annotations

import math
import os
import types

import numpy as np

__all__ = [
    "BACKEND",
    "OK",
    "TIE",
    "UNBOUNDED",
    "DEGENERATE",
    "run_chunk",
    "run_chunk_py",
    "orthonormalize",
    "orthonormalize_py",
    "omega_matrix",
    "omega_matrix_py",
]

OK, TIE, UNBOUNDED, DEGENERATE = 0, 1, 2, 3


def _numba_requested() -> bool:
    return os.environ.get("KZSPECTRA_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    if not _numba_requested():
        raise ImportError
    from numba import njit as _njit

    BACKEND = "numba"

    def _compile(fn):
        return _njit(cache=True, nogil=True)(fn)

except ImportError:
    BACKEND = "python"

    def _compile(fn):
        return fn


def omega_matrix_py(top, bot):
    n = top.shape[0]
    tpos = np.empty(n, dtype=np.int64)
    bpos = np.empty(n, dtype=np.int64)
    for i in range(n):
        tpos[top[i]] = i
        bpos[bot[i]] = i
    om = np.zeros((n, n), dtype=np.float64)
    for a in range(n):
        for b in range(n):
            if tpos[a] < tpos[b] and bpos[a] > bpos[b]:
                om[a, b] = 1.0
            elif tpos[a] > tpos[b] and bpos[a] < bpos[b]:
                om[a, b] = -1.0
    return om


omega_matrix = _compile(omega_matrix_py)


def orthonormalize_py(basis, logs):
    """Modified Gram-Schmidt on the columns; adds log|R_jj| to ``logs``.

    Returns False on rank collapse (a zero or non-finite diagonal entry).
    """
    n, p = basis.shape
    for j in range(p):
        for k in range(j):
            dot = 0.0
            for i in range(n):
                dot += basis[i, k] * basis[i, j]
            for i in range(n):
                basis[i, j] -= dot * basis[i, k]
        norm = 0.0
        for i in range(n):
            norm += basis[i, j] * basis[i, j]
        norm = math.sqrt(norm)
        if not (norm > 0.0) or not math.isfinite(norm):
            return False
        for i in range(n):
            basis[i, j] /= norm
        logs[j] += math.log(norm)
    return True


orthonormalize = _compile(orthonormalize_py)


def _project_image_py(top, bot, basis):
    # orthogonal projection onto Im Omega(pi) = (ker Omega)^perp
    om = omega_matrix(top, bot)
    u, s, _ = np.linalg.svd(om)
    cut = 1e-9 * s[0]
    n, p = basis.shape
    r = 0
    for i in range(s.shape[0]):
        if s[i] > cut:
            r += 1
    ur = np.ascontiguousarray(u[:, :r])
    coeff = ur.T @ basis
    proj = ur @ coeff
    for i in range(n):
        for j in range(p):
            basis[i, j] = proj[i, j]


_project_image = _compile(_project_image_py)


def _zorich_py(top, bot, lengths, basis, tie_rel, max_count):
    """One accelerated step; returns (status, rauzy_count)."""
    n = top.shape[0]
    p = basis.shape[1]
    a = top[n - 1]
    b = bot[n - 1]
    la = lengths[a]
    lb = lengths[b]
    if abs(la - lb) <= tie_rel * max(la, lb):
        return TIE, 0
    if la > lb:
        winner = a
        lose_row = bot
    else:
        winner = b
        lose_row = top
    pos = 0
    while lose_row[pos] != winner:
        pos += 1
    cycle = n - 1 - pos
    block = 0.0
    for i in range(pos + 1, n):
        block += lengths[lose_row[i]]
    count = 0
    lw = lengths[winner]
    if lw > block:
        # whole turns of the block after the winner leave the row unchanged
        q = math.floor(lw / block)
        if q * block >= lw:
            q -= 1
        if q > 0:
            if q * cycle > max_count:
                return UNBOUNDED, count
            lengths[winner] = lw - q * block
            fq = float(q)
            for i in range(pos + 1, n):
                lab = lose_row[i]
                for j in range(p):
                    basis[lab, j] += fq * basis[winner, j]
            count += q * cycle
    while True:
        loser = lose_row[n - 1]
        lw = lengths[winner]
        ll = lengths[loser]
        if abs(lw - ll) <= tie_rel * max(lw, ll):
            if count == 0:
                return TIE, 0
            break
        if lw < ll:
            break
        lengths[winner] = lw - ll
        for j in range(p):
            basis[loser, j] += basis[winner, j]
        for i in range(n - 1, pos + 1, -1):
            lose_row[i] = lose_row[i - 1]
        lose_row[pos + 1] = loser
        count += 1
        if count > max_count:
            return UNBOUNDED, count
    return OK, count


_zorich = _compile(_zorich_py)


def run_chunk_py(top, bot, lengths, basis, nsteps, renorm_every, tie_rel, max_count, project, logs):
    """Advance ``nsteps`` Zorich steps, orthonormalizing every ``renorm_every``.

    Stretch logs and Teichmueller time are committed only at
    orthonormalization points, so on an abnormal stop everything since
    the last commit is dropped consistently. Returns
    ``(status, committed_steps, teich_time, rauzy_steps)``.
    """
    p = basis.shape[1]
    pending = np.zeros(p, dtype=np.float64)
    time_committed = 0.0
    time_pending = 0.0
    rauzy_committed = 0
    rauzy_pending = 0
    committed = 0
    since = 0
    for step in range(nsteps):
        status, cnt = _zorich(top, bot, lengths, basis, tie_rel, max_count)
        if status != OK:
            return status, committed, time_committed, rauzy_committed
        total = 0.0
        for i in range(lengths.shape[0]):
            total += lengths[i]
        for i in range(lengths.shape[0]):
            lengths[i] /= total
        time_pending -= math.log(total)
        rauzy_pending += cnt
        since += 1
        if since == renorm_every or step == nsteps - 1:
            if project:
                _project_image(top, bot, basis)
            for j in range(p):
                pending[j] = 0.0
            if not orthonormalize(basis, pending):
                return DEGENERATE, committed, time_committed, rauzy_committed
            for j in range(p):
                logs[j] += pending[j]
            time_committed += time_pending
            rauzy_committed += rauzy_pending
            committed = step + 1
            time_pending = 0.0
            rauzy_pending = 0
            since = 0
    return OK, committed, time_committed, rauzy_committed


def _pure_copy(fn):
    """Rebind a kernel's helper globals to their uncompiled versions."""
    env = dict(fn.__globals__)
    env["omega_matrix"] = omega_matrix_py
    env["orthonormalize"] = orthonormalize_py
    env["_zorich"] = _zorich_py
    env["_project_image"] = types.FunctionType(_project_image_py.__code__, env)
    return types.FunctionType(fn.__code__, env, fn.__name__, fn.__defaults__)


run_chunk = _compile(run_chunk_py)
# reference path that never touches compiled code, for cross-checks and benchmarks
run_chunk_py = _pure_copy(run_chunk_py)
