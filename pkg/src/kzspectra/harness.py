"""Conjecture checks comparing measured Lyapunov spectra with w-spectra.

A verdict compares the pooled estimate for a whole component with the
tabulated ``w`` of its Teichmueller curves, which presumes the w-data is the
same across the component (verdicts carry the label ``CONTINUITY``). A
partial sum falling short beyond three standard errors is reported as
inconclusive, never as a refutation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .hnfilt import WSpectrum, format_fraction, partial_sums, w_catalog
from .polygons import dominates, polygon_of, polygons_svg
from .spectra import RunRecord, estimate_spectrum, merge_runs
from .strata import Component, Stratum, component_catalog, get_component, parse_component_id

__all__ = [
    "Verdict",
    "BoundsOnlyW",
    "SiegelVeech",
    "CONTINUITY",
    "worker_count",
    "run_estimates",
    "evaluate",
    "verify_component",
    "verify_genus",
    "simplicity_gap",
    "kz_limit_table",
    "siegel_veech_from_sum",
    "report",
]

CONTINUITY = "component-level (continuity assumption)"
DOMINATES = "dominates"
INCONCLUSIVE = "inconclusive at current precision"
BOUNDS_HOLD = "tail-sum bounds hold"
NSIGMA = 3.0


class BoundsOnlyW(ValueError):
    """Only upper bounds are known for w on this component."""


def worker_count() -> int:
    """Worker cap from ``SPECTRA_THREADS`` (default: all CPUs)."""
    raw = os.environ.get("SPECTRA_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("SPECTRA_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _estimate_job(args) -> RunRecord:
    perm, steps, seed, batches, component = args
    return estimate_spectrum(perm, steps, seed, batches, component=component)


def run_estimates(jobs: Sequence[tuple], workers: int | None = None) -> list[RunRecord]:
    """Run ``(perm, steps, seed, batches, component)`` jobs, results in job order."""
    workers = min(workers or worker_count(), max(1, len(jobs)))
    if workers == 1:
        return [_estimate_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_estimate_job, jobs))


@dataclass(frozen=True)
class Verdict:
    component: str
    genus: int
    lambda_hat: tuple[float, ...]
    stderr: tuple[float, ...]
    partial_sum_stderr: tuple[float, ...]
    tail_sum_stderr: tuple[float, ...]
    w: WSpectrum
    mode: str  # "partial-sum" or "tail-sum bound check only"
    status: str
    dual_status: str
    forms_agree: bool
    first_failure: int | None
    sum_residual: float | None
    sum_ok: bool | None
    zero_w_ok: bool
    kz_limit: tuple[int, Fraction] | None
    seeds: tuple[int, ...]
    steps: int
    label: str = CONTINUITY
    tolerances: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "genus": self.genus,
            "lambda_hat": list(self.lambda_hat),
            "stderr": list(self.stderr),
            "partial_sum_stderr": list(self.partial_sum_stderr),
            "tail_sum_stderr": list(self.tail_sum_stderr),
            "w": self.w.to_dict(),
            "mode": self.mode,
            "status": self.status,
            "dual_status": self.dual_status,
            "forms_agree": self.forms_agree,
            "first_failure": self.first_failure,
            "sum_residual": self.sum_residual,
            "sum_ok": self.sum_ok,
            "zero_w_ok": self.zero_w_ok,
            "kz_limit": None if self.kz_limit is None else [self.kz_limit[0], format_fraction(self.kz_limit[1])],
            "seeds": list(self.seeds),
            "steps": self.steps,
            "label": self.label,
            "tolerances": list(self.tolerances),
        }


def _kz_limit(component: str) -> tuple[int, Fraction] | None:
    stratum, label = parse_component_id(component)
    if label != "hyp":
        return None
    g = stratum.genus
    n = 2 * g - 1 if len(stratum.orders) == 1 else 2 * g
    return n, Fraction(n - 2, n)


def evaluate(record: RunRecord, w: WSpectrum, allow_bounds: bool = True, nsigma: float = NSIGMA) -> Verdict:
    """Judge a pooled run against ``w`` without running anything."""
    lam = list(record.estimates.values)
    g = len(lam)
    if len(w) != g:
        raise ValueError(f"w has {len(w)} entries, the run {g}")
    zero_w_ok = all(
        lam[i] <= nsigma * record.stderr[i] for i in range(g) if w.exact[i] and w.values[i] == 0
    )
    try:
        kz = _kz_limit(record.component)
    except ValueError:
        kz = None
    common = dict(
        component=record.component,
        genus=g,
        lambda_hat=tuple(lam),
        stderr=tuple(record.stderr),
        partial_sum_stderr=tuple(record.partial_sum_stderr),
        tail_sum_stderr=tuple(record.tail_sum_stderr),
        w=w,
        zero_w_ok=zero_w_ok,
        kz_limit=kz,
        seeds=tuple(record.seeds),
        steps=record.steps,
    )

    if not w.is_exact:
        if not allow_bounds:
            raise BoundsOnlyW(f"{record.component}: w is known only through upper bounds")
        # the conjecture bounds every tail sum of lambda by that of w, hence
        # by the tail sums of the upper bounds
        tails_l = [math.fsum(lam[i:]) for i in range(g)]
        tails_w = [sum(w.values[i:], Fraction(0)) for i in range(g)]
        tol = [nsigma * s for s in record.tail_sum_stderr]
        bad = [i + 1 for i in range(g) if tails_l[i] > float(tails_w[i]) + tol[i]]
        status = BOUNDS_HOLD if not bad else INCONCLUSIVE
        return Verdict(
            **common, mode="tail-sum bound check only", status=status, dual_status=status,
            forms_agree=True, first_failure=bad[0] if bad else None, sum_residual=None,
            sum_ok=None, tolerances=tuple(tol),
        )

    # floats enter as exact rationals so that rounding cannot split the forms
    tol = [nsigma * s for s in record.partial_sum_stderr]
    lam_q = [Fraction(x) for x in lam]
    tol_q = [Fraction(t) for t in tol]
    primal = dominates(lam_q, list(w.values), tol_q)
    total_w = w.total
    residual = math.fsum(lam) - float(total_w)
    # dual form: tails measured from the common total, as the sum law gives
    tails_l = [total_w - sum(lam_q[:i], Fraction(0)) for i in range(g)]
    tails_w = [total_w - sum(w.values[:i], Fraction(0)) for i in range(g)]
    tail_tol = [Fraction(0)] + tol_q[:-1]
    dual_ok = abs(sum(lam_q, Fraction(0)) - total_w) <= tol_q[-1] and all(
        tails_l[i] <= tails_w[i] + tail_tol[i] for i in range(g)
    )
    status = DOMINATES if primal else INCONCLUSIVE
    dual_status = DOMINATES if dual_ok else INCONCLUSIVE
    return Verdict(
        **common, mode="partial-sum", status=status, dual_status=dual_status,
        forms_agree=status == dual_status, first_failure=primal.index, sum_residual=residual,
        sum_ok=abs(residual) < nsigma * record.total_stderr, tolerances=tuple(tol),
    )


def _resolve(component: Component | str) -> Component:
    return component if isinstance(component, Component) else get_component(component)


def verify_component(
    component: Component | str,
    steps: int,
    seeds: Sequence[int],
    batches: int = 20,
    allow_bounds: bool = True,
    workers: int | None = None,
) -> tuple[Verdict, RunRecord]:
    """Estimate over the given seeds, pool, and judge against ``w_catalog``."""
    comp = _resolve(component)
    w = w_catalog(comp)
    if not w.is_exact and not allow_bounds:
        raise BoundsOnlyW(f"{comp.id}: w is known only through upper bounds")
    jobs = [(comp.representative, steps, s, batches, comp.id) for s in seeds]
    record = merge_runs(run_estimates(jobs, workers))
    return evaluate(record, w, allow_bounds), record


def verify_genus(
    genus: int,
    steps: int,
    seeds: Sequence[int],
    batches: int = 20,
    exact_only: bool = False,
    workers: int | None = None,
) -> list[tuple[Verdict, RunRecord]]:
    """All catalogued components of one genus; jobs share one worker pool."""
    comps = [c for c in component_catalog() if c.genus == genus]
    if exact_only:
        comps = [c for c in comps if w_catalog(c).is_exact]
    jobs = [(c.representative, steps, s, batches, c.id) for c in comps for s in seeds]
    records = run_estimates(jobs, workers)
    out = []
    k = len(seeds)
    for i, c in enumerate(comps):
        rec = merge_runs(records[i * k:(i + 1) * k])
        out.append((evaluate(rec, w_catalog(c)), rec))
    return out


def simplicity_gap(component: Component | str | WSpectrum) -> list[tuple[int, Fraction]]:
    """Indices ``i >= 2`` with ``w_i > w_{i+1}``, and the gap.

    Combined with ``lambda_2 >= w_2`` (partial sums) and ``lambda_g <= w_g``
    (tail sums) such a drop separates consecutive exponents; for ``g = 3`` it
    forces ``lambda_2 > lambda_3`` outright.
    """
    w = component if isinstance(component, WSpectrum) else w_catalog(_resolve(component))
    if not w.is_exact:
        raise BoundsOnlyW("simplicity gaps need exact w")
    v = w.values
    return [(i + 1, v[i] - v[i + 1]) for i in range(1, len(v) - 1) if v[i] > v[i + 1]]


def kz_limit_table(g_max: int) -> list[tuple[int, int, Fraction]]:
    """Rows ``(g, N, (N-2)/N)`` for both hyperelliptic families, N = 2g-1 and 2g."""
    if g_max < 2:
        raise ValueError("g_max must be at least 2")
    rows = []
    for g in range(2, g_max + 1):
        for n in (2 * g - 1, 2 * g):
            rows.append((g, n, Fraction(n - 2, n)))
    return rows


@dataclass(frozen=True)
class SiegelVeech:
    kappa: Fraction
    c_area: float
    c_area_stderr: float
    negative: bool  # estimate below zero: reported, not raised


def siegel_veech_from_sum(stratum: Stratum | str, measured_sum: float, stderr: float = 0.0) -> SiegelVeech:
    """Invert the Eskin-Kontsevich-Zorich sum formula for ``c_area``."""
    if isinstance(stratum, str):
        stratum = parse_component_id(stratum)[0]
    kappa = sum((Fraction(m * (m + 2), m + 1) for m in stratum.orders), Fraction(0)) / 12
    c = 3.0 * (float(measured_sum) - float(kappa)) / math.pi**2
    se = 3.0 * float(stderr) / math.pi**2
    return SiegelVeech(kappa, c, se, c < 0)


def safe_name(ident: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", ident).strip("_") or "component"


def verdict_svg(v: Verdict) -> str:
    lam = polygon_of(sorted(v.lambda_hat, reverse=True))
    wpoly = polygon_of(v.w.values)
    return polygons_svg([("P_lambda (measured)", lam), ("P_w", wpoly)], title=f"{v.component}: {v.status}")


def report(verdicts: Sequence[Verdict], outdir) -> list[Path]:
    """Write ``verdicts.json``, ``summary.csv`` and one SVG per verdict."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    archive = {"schema": "kzspectra.verdicts/1", "verdicts": [v.to_dict() for v in verdicts]}
    paths = [out / "verdicts.json", out / "summary.csv"]
    paths[0].write_text(json.dumps(archive, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["component", "genus", "status", "mode", "sum_lambda", "sum_w", "sum_residual", "sum_ok", "label"])
    for v in verdicts:
        wr.writerow([
            v.component, v.genus, v.status, v.mode, repr(math.fsum(v.lambda_hat)),
            ("" if v.w.is_exact else "<=") + format_fraction(v.w.total),
            "" if v.sum_residual is None else repr(v.sum_residual),
            "" if v.sum_ok is None else v.sum_ok, v.label,
        ])
    paths[1].write_text(buf.getvalue(), encoding="utf-8")
    for v in verdicts:
        p = out / f"{safe_name(v.component)}.svg"
        p.write_text(verdict_svg(v), encoding="utf-8")
        paths.append(p)
    return paths
