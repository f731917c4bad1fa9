"""Exact Harder-Narasimhan spectra ``w(C)`` of Teichmueller curves.

Everything here is exact rational arithmetic with :class:`fractions.Fraction`.

- :func:`w_hyperelliptic`: closed form for curves in a hyperelliptic locus,
  whose quotient is a genus-zero quadratic differential ``Q(d_1..d_n)``.
- :func:`w_upper_bounds`: bounds ``w_i <= 1 - a_{2i-2}`` from the sorted
  multiset ``{l/(m_j+1)}``.
- :func:`w_catalog`: tabulated values for the catalogued components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .strata import (
    Component,
    QStratum,
    Stratum,
    UnknownComponent,
    double_cover_image,
    parse_component_id,
)

__all__ = [
    "WSpectrum",
    "ArityMismatch",
    "BoundsOnly",
    "NotHyperellipticSource",
    "format_fraction",
    "parse_fraction",
    "hyperelliptic_slopes",
    "w_hyperelliptic",
    "w_upper_bounds",
    "w_catalog",
    "catalog_entries",
    "sum_bound_check",
    "wspec_closed_form",
    "hyperelliptic_source",
    "partial_sums",
]


class ArityMismatch(ValueError):
    """Fewer candidate slopes than the genus of the cover."""


class BoundsOnly(ValueError):
    """A sum was requested from a vector that carries upper bounds."""


class NotHyperellipticSource(ValueError):
    pass


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


@dataclass(frozen=True)
class WSpectrum:
    """Normalized slopes ``1 = w_1 >= ... >= w_g``; entries may be upper bounds."""

    values: tuple[Fraction, ...]
    exact: tuple[bool, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        exact = tuple(bool(e) for e in self.exact)
        if len(vals) != len(exact):
            raise ValueError("values and exactness flags differ in length")
        if not vals or vals[0] != 1 or not exact[0]:
            raise ValueError("w_1 must be exactly 1")
        if any(v < 0 or v > 1 for v in vals):
            raise ValueError(f"entries must lie in [0, 1]: {vals}")
        ex = [v for v, e in zip(vals, exact) if e]
        if any(a < b for a, b in zip(ex, ex[1:])):
            raise ValueError(f"exact entries must be weakly decreasing: {vals}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def exact_values(cls, values: Iterable) -> "WSpectrum":
        vals = tuple(Fraction(v) for v in values)
        return cls(vals, (True,) * len(vals))

    @property
    def genus(self) -> int:
        return len(self.values)

    @property
    def is_exact(self) -> bool:
        return all(self.exact)

    @property
    def total(self) -> Fraction:
        """Exact sum; for bound entries this is the bound on the sum."""
        return sum(self.values, Fraction(0))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def formatted(self) -> list[str]:
        return [("" if e else "<=") + format_fraction(v) for v, e in zip(self.values, self.exact)]

    def __str__(self):
        return "(" + ", ".join(self.formatted()) + ")"

    def to_dict(self) -> dict:
        return {"values": [format_fraction(v) for v in self.values], "exact": list(self.exact)}

    @classmethod
    def from_dict(cls, d: dict) -> "WSpectrum":
        return cls(tuple(parse_fraction(v) for v in d["values"]), tuple(d["exact"]))


def hyperelliptic_slopes(q: QStratum) -> list[Fraction]:
    """The multiset ``{1} + {1 - 2k/(d_j+2) : 0 < 2k <= d_j+1}``, sorted decreasingly."""
    out = [Fraction(1)]
    for d in q.orders:
        k = 1
        while 2 * k <= d + 1:
            out.append(1 - Fraction(2 * k, d + 2))
            k += 1
    return sorted(out, reverse=True)


def w_hyperelliptic(q: QStratum) -> WSpectrum:
    """w(C) for a Teichmueller curve in the hyperelliptic locus over ``q``.

    ``q`` must be a genus-zero source (orders summing to -4); the result has
    as many entries as the genus of the canonical double cover.
    """
    if not q.is_hyperelliptic_source:
        raise NotHyperellipticSource(f"{q}: orders sum to {sum(q.orders)}, expected -4")
    g = double_cover_image(q).genus
    slopes = hyperelliptic_slopes(q)
    if len(slopes) < g:
        raise ArityMismatch(f"{q} gives {len(slopes)} slopes for genus {g}")
    return WSpectrum.exact_values(slopes[:g])


def wspec_closed_form(g: int, kind: str) -> WSpectrum:
    """Arithmetic progressions for the two hyperelliptic families.

    ``kind="single"``: one zero, N = 2g-1, w = (N, N-2, ..., 1)/N.
    ``kind="pair"``: two zeros, N = 2g, w = (N, N-2, ..., 2)/N.
    """
    if g < 1:
        raise ValueError("genus must be positive")
    if kind == "single":
        n = 2 * g - 1
    elif kind == "pair":
        n = 2 * g
    else:
        raise ValueError(f"unknown family {kind!r}")
    return WSpectrum.exact_values(Fraction(n - 2 * i, n) for i in range(g))


def hyperelliptic_source(stratum: Stratum) -> QStratum:
    """Genus-zero quadratic stratum covered by ``H(2g-2)^hyp`` or ``H(g-1,g-1)^hyp``."""
    key = stratum.key
    g = stratum.genus
    if key == (2 * g - 2,):
        return QStratum((2 * g - 3,) + (-1,) * (2 * g + 1))
    if key == (g - 1, g - 1):
        return QStratum((2 * g - 2,) + (-1,) * (2 * g + 2))
    raise NotHyperellipticSource(f"{stratum} has no hyperelliptic component")


def w_upper_bounds(stratum: Stratum) -> WSpectrum:
    """Upper bounds ``w_i <= 1 - a_{2i-2}`` with ``a`` the sorted ``{l/(m_j+1)}``."""
    g = stratum.genus
    if g < 2:
        raise ValueError("bounds need genus at least 2")
    a = [Fraction(0)] + sorted(Fraction(l, m + 1) for m in stratum.orders for l in range(1, m + 1))
    vals = [Fraction(1)] + [1 - a[2 * i - 2] for i in range(2, g + 1)]
    return WSpectrum(tuple(vals), (True,) + (False,) * (g - 1))


# Tabulated w_2..w_g per component. "<=" marks an upper bound.
_W_TABLE = """
H(2)^hyp        | 1/3
H(1,1)^hyp      | 1/2
H(4)^hyp        | 3/5 1/5
H(4)^odd        | 2/5 1/5
H(3,1)          | 1/2 1/4
H(2,2)^hyp      | 2/3 1/3
H(2,2)^odd      | 1/3 1/3
H(2,1,1)        | 1/2 1/3
H(1,1,1,1)      | <=1/2 <=1/2
H(6)^hyp        | 5/7 3/7 1/7
H(6)^even       | 4/7 2/7 1/7
H(6)^odd        | 3/7 2/7 1/7
H(5,1)          | 1/2 1/3 1/6
H(3,3)^hyp      | 3/4 1/2 1/4
H(3,3)^nonhyp   | 1/2 1/4 1/4
H(4,2)^even     | 3/5 1/3 1/5
H(4,2)^odd      | 2/5 1/3 1/5
H(2,2,2)^odd    | 1/3 1/3 1/3
H(3,2,1)        | 1/2 1/3 1/4
H(2,2,2)^even   | <=2/3 <=1/3 <=1/3
H(3,1,1,1)      | <=1/2 <=1/2 <=1/4
H(2,2,1,1)      | <=2/3 <=1/2 <=1/3
H(2,1,1,1,1)    | <=1/2 <=1/2 <=1/3
H(1,1,1,1,1,1)  | <=1/2 <=1/2 <=1/2
H(8)^hyp        | 7/9 5/9 1/3 1/9
H(8)^even       | 5/9 1/3 2/9 1/9
H(8)^odd        | 4/9 1/3 2/9 1/9
H(5,3)          | 1/2 1/3 1/4 1/6
H(6,2)^odd      | 3/7 1/3 2/7 1/7
H(4,4)^hyp      | 4/5 3/5 2/5 1/5
H(7,1)          | <=3/4 <=1/2 <=3/8 <=1/8
H(6,2)^even     | <=5/7 <=4/7 <=1/3 <=1/7
H(6,1,1)        | <=5/7 <=1/2 <=3/7 <=1/7
H(5,2,1)        | <=2/3 <=1/2 <=1/3 <=1/6
H(5,1,1,1)      | <=2/3 <=1/2 <=1/2 <=1/6
"""


def _parse_table() -> dict[tuple, WSpectrum]:
    table = {}
    for line in _W_TABLE.strip().splitlines():
        ident, body = (s.strip() for s in line.split("|"))
        stratum, label = parse_component_id(ident)
        vals, exact = [Fraction(1)], [True]
        for tok in body.split():
            bound = tok.startswith("<=")
            vals.append(parse_fraction(tok[2:] if bound else tok))
            exact.append(not bound)
        w = WSpectrum(tuple(vals), tuple(exact))
        if w.genus != stratum.genus:
            raise ValueError(f"{ident}: {w.genus} entries for genus {stratum.genus}")
        table[(stratum, label or "unique")] = w
    return table


_TABLE = _parse_table()


def catalog_entries() -> list[tuple[str, WSpectrum]]:
    """All tabulated components in table order, as (id, w)."""
    out = []
    for (stratum, label), w in _TABLE.items():
        ident = str(Stratum(stratum.key)) + ("" if label == "unique" else f"^{label}")
        out.append((ident, w))
    return out


def w_catalog(component: Component | str) -> WSpectrum:
    """Tabulated w for a catalogued component (exact or upper bounds)."""
    if isinstance(component, Component):
        key = (component.stratum, component.label)
    else:
        stratum, label = parse_component_id(component)
        key = (stratum, label or "unique")
    try:
        return _TABLE[key]
    except KeyError:
        raise UnknownComponent(str(component)) from None


def sum_bound_check(w: WSpectrum, g: int) -> bool:
    """Whether ``sum(w) <= (g+1)/2`` holds exactly."""
    if not w.is_exact:
        raise BoundsOnly(f"{w} carries upper bounds; its sum is not defined")
    return w.total <= Fraction(g + 1, 2)


def partial_sums(values: Sequence[Fraction]) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for v in values:
        acc += v
        out.append(acc)
    return out
