"""Monte-Carlo estimation of the nonnegative Kontsevich-Zorich spectrum.

A trajectory of accelerated Rauzy-Veech induction starts from random lengths
(uniform on the simplex) and carries ``g`` vectors of the image of
``Omega(pi)`` by the transposed cocycle. Every ``renorm_every`` steps they are
orthonormalized and the logarithms of the diagonal stretches accumulate; the
raw exponents are these sums over Teichmueller time, and the reported ones are
divided by the first so that ``lambda_1 = 1``.

Error bars come from non-overlapping batch means after a 1% burn-in.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__, _kernels
from .exchange import MAX_ZORICH_COUNT, TIE_TOLERANCE, Permutation, ReducibleError, intersection_form

__all__ = [
    "SpectrumVector",
    "RunRecord",
    "ZeroLeadError",
    "DegenerateBasisError",
    "MixedConfigError",
    "SCHEMA",
    "enforce_spectrum",
    "estimate_spectrum",
    "merge_runs",
    "symmetry_check",
    "records_to_csv",
]

SCHEMA = "kzspectra.runrecord/1"
KINDS = ("lyapunov", "hn", "eigencurvature")

MIN_STEPS = 10**4
MIN_BATCHES = 10
MAX_RESTARTS = 1000  # consecutive restarts without progress before giving up


class ZeroLeadError(ValueError):
    """The leading exponent is not positive, so it cannot normalize."""


class DegenerateBasisError(ArithmeticError):
    """The trajectory kept breaking down; raised after MAX_RESTARTS in a row."""


class MixedConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumVector:
    values: tuple[float, ...]
    kind: str = "lyapunov"
    adjusted: bool = False  # clamping or reordering happened in enforcement

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    @property
    def total(self) -> float:
        return math.fsum(self.values)


def enforce_spectrum(raw: Sequence[float], kind: str = "lyapunov") -> SpectrumVector:
    """Normalize by the first entry, clamp to [0, 1] and sort decreasingly."""
    raw = [float(x) for x in raw]
    if not raw:
        raise ValueError("empty spectrum")
    if not raw[0] > 0:
        raise ZeroLeadError(f"leading exponent {raw[0]!r} is not positive")
    scaled = [x / raw[0] for x in raw]
    clamped = [min(1.0, max(0.0, x)) for x in scaled]
    ordered = sorted(clamped, reverse=True)
    adjusted = clamped != scaled or ordered != clamped
    return SpectrumVector(tuple(ordered), kind, adjusted)


_VECTOR_FIELDS = ("seeds", "stderr", "partial_sum_stderr", "tail_sum_stderr", "full_exponents", "full_stderr")


@dataclass
class RunRecord:
    """One estimation run, or a pool of runs sharing a permutation."""

    component: str
    permutation: str
    seeds: tuple[int, ...]
    steps: int
    batches: int
    renorm_every: int
    estimates: SpectrumVector
    stderr: tuple[float, ...]
    partial_sum_stderr: tuple[float, ...]
    tail_sum_stderr: tuple[float, ...]  # of lambda_i + ... + lambda_g
    theta1: float  # raw top exponent in Teichmueller time; should be close to 1
    restarts: int = 0
    rauzy_steps: int = 0
    wall_time: float = 0.0
    full: bool = False
    full_exponents: tuple[float, ...] = ()  # all 2g normalized exponents, full mode only
    full_stderr: tuple[float, ...] = ()
    version: str = __version__
    schema: str = SCHEMA
    runs: int = 1

    @property
    def genus(self) -> int:
        return len(self.estimates)

    @property
    def total(self) -> float:
        return self.estimates.total

    @property
    def total_stderr(self) -> float:
        return self.partial_sum_stderr[-1]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["estimates"] = list(self.estimates.values)
        d["adjusted"] = self.estimates.adjusted
        for key in _VECTOR_FIELDS:
            d[key] = list(d[key])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported run record schema {d.get('schema')!r}")
        d = dict(d)
        adjusted = d.pop("adjusted", False)
        d["estimates"] = SpectrumVector(tuple(d["estimates"]), "lyapunov", adjusted)
        for key in _VECTOR_FIELDS:
            d[key] = tuple(d.get(key, ()))
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "RunRecord":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def records_to_csv(records: Iterable[RunRecord]) -> str:
    """Rows ``component, index, lambda, stderr`` (1-based index)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["component", "index", "lambda", "stderr"])
    for rec in records:
        for i, (v, s) in enumerate(zip(rec.estimates, rec.stderr), 1):
            w.writerow([rec.component, i, repr(v), repr(s)])
    return buf.getvalue()


class _Trajectory:
    """Mutable kernel state plus restart bookkeeping."""

    def __init__(self, perm: Permutation, rng: np.random.Generator, p: int, full: bool, kernel):
        self.top, self.bot = perm.as_arrays()
        self.n = perm.n
        self.p = p
        self.full = full
        self.rng = rng
        self.kernel = kernel
        self.restarts = 0
        self._stalled = 0
        self.lengths = self._fresh_lengths()
        self.basis = self._fresh_basis()

    def _fresh_lengths(self) -> np.ndarray:
        x = self.rng.standard_exponential(self.n)
        return x / x.sum()

    def _fresh_basis(self) -> np.ndarray:
        om = _kernels.omega_matrix(self.top, self.bot)
        for _ in range(MAX_RESTARTS):
            basis = np.ascontiguousarray(om @ self.rng.standard_normal((self.n, self.p)))
            if _kernels.orthonormalize(basis, np.zeros(self.p)):
                return basis
        raise DegenerateBasisError("could not draw a nondegenerate basis")

    def _restart(self, status: int) -> None:
        self.restarts += 1
        self._stalled += 1
        if self._stalled > MAX_RESTARTS:
            raise DegenerateBasisError(f"gave up after {MAX_RESTARTS} restarts")
        if status == _kernels.DEGENERATE:
            self.basis = self._fresh_basis()
            return
        # tie or runaway Zorich step: new lengths, same permutation; the basis
        # is renormalized without recording its stretch
        self.lengths = self._fresh_lengths()
        if not _kernels.orthonormalize(self.basis, np.zeros(self.p)):
            self.basis = self._fresh_basis()

    def advance(self, nsteps: int, renorm_every: int, logs: np.ndarray) -> tuple[float, int]:
        """Run exactly ``nsteps`` committed steps; returns (time, rauzy steps)."""
        done = 0
        ttime = 0.0
        rauzy = 0
        while done < nsteps:
            status, committed, t, r = self.kernel(
                self.top, self.bot, self.lengths, self.basis, nsteps - done,
                renorm_every, TIE_TOLERANCE, MAX_ZORICH_COUNT, self.full, logs,
            )
            done += committed
            if committed:
                self._stalled = 0
            ttime += t
            rauzy += r
            if status != _kernels.OK:
                self._restart(status)
        return ttime, rauzy


def _batch_stats(samples: np.ndarray) -> np.ndarray:
    b = samples.shape[0]
    return samples.std(axis=0, ddof=1) / math.sqrt(b)


def estimate_spectrum(
    perm: Permutation,
    steps: int,
    seed: int,
    batches: int = 20,
    renorm_every: int = 8,
    full: bool = False,
    component: str | None = None,
    backend: str | None = None,
) -> RunRecord:
    """Estimate ``1 = lambda_1 >= ... >= lambda_g`` along one random trajectory.

    ``steps`` counts Zorich (accelerated) steps including the burn-in.
    ``full=True`` tracks all ``2g`` vectors and projects onto ``Im Omega`` at
    every orthonormalization; the negative half is kept in
    ``full_exponents`` for the symmetry check.
    ``backend`` is ``"numba"`` or ``"python"``; default follows the import-time
    selection of :mod:`kzspectra._kernels`.
    """
    if not perm.is_irreducible():
        raise ReducibleError(f"{perm} is reducible")
    if steps < MIN_STEPS:
        raise ValueError(f"steps must be at least {MIN_STEPS}")
    if batches < MIN_BATCHES:
        raise ValueError(f"batches must be at least {MIN_BATCHES}")
    if renorm_every < 1:
        raise ValueError("renorm_every must be positive")
    kernel = _kernels.run_chunk_py if backend == "python" else _kernels.run_chunk
    g = intersection_form(perm).genus
    p = 2 * g if full else g

    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    traj = _Trajectory(perm, rng, p, full, kernel)
    per_batch = (steps - steps // 100) // batches
    burn = steps - per_batch * batches
    traj.advance(burn, renorm_every, np.zeros(p))

    logs = np.zeros((batches, p))
    times = np.zeros(batches)
    rauzy = 0
    for b in range(batches):
        times[b], r = traj.advance(per_batch, renorm_every, logs[b])
        rauzy += r

    theta = logs.sum(axis=0) / times.sum()
    batch_theta = logs / times[:, None]
    batch_lam = batch_theta / batch_theta[:, :1]
    top = enforce_spectrum(theta[:g])
    stderr = _batch_stats(batch_lam[:, :g])
    psum_stderr = _batch_stats(np.cumsum(batch_lam[:, :g], axis=1))
    tail_stderr = _batch_stats(np.cumsum(batch_lam[:, g - 1::-1], axis=1)[:, ::-1])
    full_exp: tuple[float, ...] = ()
    full_se: tuple[float, ...] = ()
    if full:
        full_exp = tuple(float(x) for x in theta / theta[0])
        full_se = tuple(float(x) for x in _batch_stats(batch_lam))
    return RunRecord(
        component=component or "",
        permutation=str(perm),
        seeds=(int(seed),),
        steps=int(steps),
        batches=int(batches),
        renorm_every=int(renorm_every),
        estimates=top,
        stderr=tuple(float(x) for x in stderr),
        partial_sum_stderr=tuple(float(x) for x in psum_stderr),
        tail_sum_stderr=tuple(float(x) for x in tail_stderr),
        theta1=float(theta[0]),
        restarts=traj.restarts,
        rauzy_steps=int(rauzy),
        wall_time=time.perf_counter() - t0,
        full=full,
        full_exponents=full_exp,
        full_stderr=full_se,
    )


def merge_runs(records: Sequence[RunRecord]) -> RunRecord:
    """Pool independent runs, weighting each by its step count.

    Standard errors combine as for a weighted mean of independent estimates,
    so ``r`` equal runs shrink them by ``sqrt(r)``.
    """
    records = list(records)
    if not records:
        raise ValueError("nothing to merge")
    first = records[0]
    for rec in records[1:]:
        if rec.permutation != first.permutation:
            raise MixedConfigError(f"permutations differ: {first.permutation} vs {rec.permutation}")
        same = (rec.batches, rec.renorm_every, rec.full, rec.genus)
        if same != (first.batches, first.renorm_every, first.full, first.genus):
            raise MixedConfigError("runs use different batch, cadence or tracking settings")
    w = np.array([r.steps for r in records], dtype=float)
    w /= w.sum()

    def pool(attr):
        vals = np.array([getattr(r, attr) for r in records], dtype=float)
        return w @ vals

    def pool_se(attr):
        vals = np.array([getattr(r, attr) for r in records], dtype=float)
        return np.sqrt((w**2) @ vals**2)

    est = np.array([r.estimates.values for r in records], dtype=float)
    merged = enforce_spectrum(w @ est)
    full_exp: tuple[float, ...] = ()
    full_se: tuple[float, ...] = ()
    if first.full:
        full_exp = tuple(float(x) for x in pool("full_exponents"))
        full_se = tuple(float(x) for x in pool_se("full_stderr"))
    return RunRecord(
        component=first.component,
        permutation=first.permutation,
        seeds=tuple(s for r in records for s in r.seeds),
        steps=int(sum(r.steps for r in records)),
        batches=first.batches,
        renorm_every=first.renorm_every,
        estimates=merged,
        stderr=tuple(float(x) for x in pool_se("stderr")),
        partial_sum_stderr=tuple(float(x) for x in pool_se("partial_sum_stderr")),
        tail_sum_stderr=tuple(float(x) for x in pool_se("tail_sum_stderr")),
        theta1=float(pool("theta1")),
        restarts=sum(r.restarts for r in records),
        rauzy_steps=sum(r.rauzy_steps for r in records),
        wall_time=math.fsum(r.wall_time for r in records),
        full=first.full,
        full_exponents=full_exp,
        full_stderr=full_se,
        runs=sum(r.runs for r in records),
    )


@dataclass(frozen=True)
class SymmetryReport:
    pairs: tuple[tuple[int, float, float], ...] = field(default_factory=tuple)  # (i, theta_i + theta_{2g+1-i}, 3 sigma)

    @property
    def ok(self) -> bool:
        return all(abs(s) <= tol for _, s, tol in self.pairs)


def symmetry_check(record: RunRecord, nsigma: float = 3.0) -> SymmetryReport:
    """Compare ``theta_i`` with ``-theta_{2g+1-i}`` on a full-mode record."""
    if not record.full:
        raise ValueError("symmetry needs a run with full=True")
    ex, se = record.full_exponents, record.full_stderr
    m = len(ex)
    pairs = []
    for i in range(m // 2):
        j = m - 1 - i
        tol = nsigma * math.hypot(se[i], se[j])
        pairs.append((i + 1, ex[i] + ex[j], tol))
    return SymmetryReport(tuple(pairs))
