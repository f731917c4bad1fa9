"""Exact bookkeeping for canonical double covers of quadratic differentials.

For ``q`` in ``Q(d_1..d_n)`` with genus-``g(Y)`` base, the cover lies in the
abelian stratum given by :func:`~kzspectra.strata.double_cover_image`. Its
Hodge bundle splits into invariant (``g(Y)`` slopes, sum ``L^+``) and
anti-invariant (``g_eff`` slopes, sum ``L^-``) parts, with

    L^- - L^+ = 1/4 * sum over odd d_j of 1/(d_j + 2)      (poles included).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .hnfilt import WSpectrum, format_fraction, w_catalog, w_hyperelliptic
from .strata import QStratum, Stratum, UnknownComponent, double_cover_image

__all__ = [
    "CoverReport",
    "SelfIntersection",
    "NegativePart",
    "NoValidPartition",
    "AmbiguousPartition",
    "cover_deficit",
    "deficit_from_intersections",
    "split_totals",
    "split_w",
    "self_intersections",
    "cover_report",
]


class NegativePart(ValueError):
    """The deficit exceeds the total, so one part would be negative."""


class NoValidPartition(ValueError):
    pass


class AmbiguousPartition(ValueError):
    def __init__(self, message: str, solutions):
        super().__init__(message)
        self.solutions = solutions


@dataclass(frozen=True)
class SelfIntersection:
    """``D^2 = coefficient * chi`` for the section through a zero of order ``order``."""

    order: int
    coefficient: Fraction


def self_intersections(stratum: Stratum) -> list[SelfIntersection]:
    """``D_i^2 = -chi / (2 (m_i + 1))`` for each zero, in the given order."""
    return [SelfIntersection(m, Fraction(-1, 2 * (m + 1))) for m in stratum.orders]


def cover_deficit(q: QStratum) -> Fraction:
    """``L^- - L^+`` as an exact rational."""
    return sum((Fraction(1, 4 * (d + 2)) for d in q.odd_orders), Fraction(0))


def deficit_from_intersections(q: QStratum) -> Fraction:
    """The same deficit recomputed from intersection numbers on the base.

    With ``B = sum_{odd} D_j = 2D`` the degree gap between the two direct
    images is ``D (omega + D) / 2 = B (B + sum d_j D_j + F) / 8``. Sections
    are disjoint, each meets ``F`` in degree ``chi``, and ``D_j^2`` on the
    base is twice the self-intersection of the section above it, which comes
    from the abelian formula at ``m = d_j + 1``. Dividing by ``chi / 2``
    normalizes degrees to slopes.
    """
    odd = q.odd_orders
    cover = self_intersections(Stratum(tuple(d + 1 for d in odd))) if odd else []
    gap = Fraction(0)
    for d, s in zip(odd, cover):
        base_sq = 2 * s.coefficient  # D_j^2 in units of chi
        gap += (d + 1) * base_sq + 1  # B.D_j terms plus D_j.F = chi
    gap /= 8
    return gap / Fraction(1, 2)


def split_totals(q: QStratum, total) -> tuple[Fraction, Fraction]:
    """``(L^+, L^-)`` from ``L^+ + L^- = total`` and the deficit."""
    total = Fraction(total)
    deficit = cover_deficit(q)
    if deficit > total:
        raise NegativePart(f"deficit {deficit} exceeds total {total}")
    return (total - deficit) / 2, (total + deficit) / 2


def _genera(q: QStratum) -> tuple[int, int]:
    g_plus = q.genus
    g_total = double_cover_image(q).genus
    return g_plus, g_total - g_plus


def split_w(q: QStratum, w: WSpectrum | Sequence) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Partition the slopes into invariant and anti-invariant parts.

    Every choice of ``g(Y)`` entries summing to ``L^+`` is tried. Solutions
    are compared as multisets; more than one raises
    :class:`AmbiguousPartition` carrying all of them.
    """
    if isinstance(w, WSpectrum):
        if not w.is_exact:
            raise ValueError("split_w needs exact slopes")
        values = list(w.values)
    else:
        values = [Fraction(v) for v in w]
    g_plus, g_minus = _genera(q)
    if len(values) != g_plus + g_minus:
        raise ValueError(f"{q} covers genus {g_plus + g_minus}, got {len(values)} slopes")
    l_plus, l_minus = split_totals(q, sum(values, Fraction(0)))
    found = []
    seen = set()
    for idx in combinations(range(len(values)), g_plus):
        part = [values[i] for i in idx]
        if sum(part, Fraction(0)) != l_plus:
            continue
        rest = [values[i] for i in range(len(values)) if i not in idx]
        plus = tuple(sorted(part, reverse=True))
        minus = tuple(sorted(rest, reverse=True))
        if (plus, minus) not in seen:
            seen.add((plus, minus))
            found.append((plus, minus))
    if not found:
        raise NoValidPartition(f"no {g_plus} slopes of {values} sum to L^+ = {l_plus}")
    if len(found) > 1:
        raise AmbiguousPartition(f"{len(found)} partitions of {values}", found)
    return found[0]


@dataclass(frozen=True)
class CoverReport:
    source: QStratum
    image: Stratum
    genus_base: int
    genus_eff: int
    deficit: Fraction
    total: Fraction | None = None
    l_plus: Fraction | None = None
    l_minus: Fraction | None = None
    w_plus: tuple[Fraction, ...] | None = None
    w_minus: tuple[Fraction, ...] | None = None
    w_source: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        def fr(x):
            return None if x is None else format_fraction(x)

        def vec(v):
            return None if v is None else [format_fraction(x) for x in v]

        return {
            "source": str(self.source),
            "image": str(self.image),
            "genus_base": self.genus_base,
            "genus_eff": self.genus_eff,
            "deficit": fr(self.deficit),
            "total": fr(self.total),
            "l_plus": fr(self.l_plus),
            "l_minus": fr(self.l_minus),
            "w_plus": vec(self.w_plus),
            "w_minus": vec(self.w_minus),
            "w_source": self.w_source,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        lines = [
            f"{self.source} -> {self.image}  (g(Y)={self.genus_base}, g_eff={self.genus_eff})",
            f"L^- - L^+ = {format_fraction(self.deficit)}",
        ]
        if self.l_plus is not None:
            lines.append(f"L^-+L^+ = {format_fraction(self.total)}  [w from {self.w_source}]")
            lines.append(f"L^-={format_fraction(self.l_minus)}, L^+={format_fraction(self.l_plus)}")
        if self.w_plus is not None:
            lines.append("w^+ = (" + ", ".join(format_fraction(x) for x in self.w_plus) + ")")
            lines.append("w^- = (" + ", ".join(format_fraction(x) for x in self.w_minus) + ")")
        if self.note:
            lines.append(self.note)
        return "\n".join(lines) + "\n"


def _slopes_for(q: QStratum, image: Stratum) -> tuple[WSpectrum | None, str]:
    if q.is_hyperelliptic_source:
        return w_hyperelliptic(q), "hyperelliptic formula"
    try:
        w = w_catalog(str(image))
    except UnknownComponent:
        return None, ""
    return (w, "catalog " + str(Stratum(image.key))) if w.is_exact else (None, "")


def cover_report(q: QStratum, w: WSpectrum | None = None) -> CoverReport:
    """Deficit, and when slopes are known, the totals and their split."""
    image = double_cover_image(q)
    g_plus, g_minus = _genera(q)
    source = "given"
    if w is None:
        w, source = _slopes_for(q, image)
    base = dict(source=q, image=image, genus_base=g_plus, genus_eff=g_minus, deficit=cover_deficit(q))
    if w is None:
        return CoverReport(**base, note="no exact slopes known for the image stratum")
    total = w.total
    l_plus, l_minus = split_totals(q, total)
    try:
        w_plus, w_minus = split_w(q, w)
        note = ""
    except AmbiguousPartition as exc:
        w_plus = w_minus = None
        note = f"split ambiguous: {len(exc.solutions)} candidate partitions"
    except NoValidPartition:
        w_plus = w_minus = None
        note = "no partition of the slopes matches L^+"
    return CoverReport(
        **base, total=total, l_plus=l_plus, l_minus=l_minus,
        w_plus=w_plus, w_minus=w_minus, w_source=source, note=note,
    )
