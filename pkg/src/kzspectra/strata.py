"""Strata of abelian and quadratic differentials, component labels, and the
catalog of representative permutations.

Text formats::

    H(4)^hyp   H(3,1)   H(3,3)^nonhyp   Q(1,2,-1,-1,-1)

Orders are kept in the order they were written so that ``str(parse(s)) == s``;
equality and hashing treat them as multisets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

__all__ = [
    "Stratum",
    "QStratum",
    "Component",
    "NonIntegralGenus",
    "CatalogValidationError",
    "UnknownComponent",
    "LABELS",
    "parse_stratum",
    "parse_qstratum",
    "parse_component_id",
    "genus_of",
    "double_cover_image",
    "cover_genus_riemann_hurwitz",
    "component_catalog",
    "get_component",
    "CATALOG_VERSION",
]

LABELS = ("hyp", "odd", "even", "nonhyp", "unique")

_H_RE = re.compile(r"^\s*H\(\s*([0-9,\s]*)\)\s*(?:\^\s*([a-z\-]+))?\s*$")
_Q_RE = re.compile(r"^\s*Q\(\s*([0-9,\s\-]*)\)\s*$")


class NonIntegralGenus(ValueError):
    pass


class CatalogValidationError(RuntimeError):
    pass


class UnknownComponent(KeyError):
    pass


def _parse_orders(body: str) -> tuple[int, ...]:
    body = body.strip()
    if not body:
        raise ValueError("empty order list")
    return tuple(int(tok) for tok in body.split(","))


@dataclass(frozen=True, eq=False)
class Stratum:
    """Multiset of zero orders of an abelian differential."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(m) for m in self.orders)
        if not orders:
            raise ValueError("a stratum needs at least one zero")
        if any(m < 0 for m in orders):
            raise ValueError(f"zero orders must be nonnegative, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.orders, reverse=True))

    @property
    def genus(self) -> int:
        return genus_of(self)

    @property
    def num_zeros(self) -> int:
        return len(self.orders)

    @property
    def dimension(self) -> int:
        """Number of intervals of an IET whose suspension lies here (2g+k-1)."""
        return 2 * self.genus + self.num_zeros - 1

    def __eq__(self, other):
        if not isinstance(other, Stratum):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(("H", self.key))

    def __str__(self):
        return "H(" + ",".join(str(m) for m in self.orders) + ")"

    def __repr__(self):
        return f"Stratum({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Stratum":
        stratum, label = parse_component_id(text)
        if label is not None:
            raise ValueError(f"{text!r} carries a component label; use parse_component_id")
        return stratum


@dataclass(frozen=True, eq=False)
class QStratum:
    """Multiset of singularity orders d_i >= -1 of a quadratic differential."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        if not orders:
            raise ValueError("a quadratic stratum needs at least one singularity")
        if any(d < -1 for d in orders):
            raise ValueError(f"orders must be >= -1, got {orders}")
        if (sum(orders) + 4) % 4:
            raise ValueError(f"sum of orders must be 4g-4, got {sum(orders)}")
        if (sum(orders) + 4) // 4 < 0:
            raise ValueError(f"negative genus for {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.orders, reverse=True))

    @property
    def genus(self) -> int:
        return (sum(self.orders) + 4) // 4

    @property
    def odd_orders(self) -> tuple[int, ...]:
        return tuple(d for d in self.orders if d % 2)

    @property
    def is_hyperelliptic_source(self) -> bool:
        return sum(self.orders) == -4

    def __eq__(self, other):
        if not isinstance(other, QStratum):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(("Q", self.key))

    def __str__(self):
        return "Q(" + ",".join(str(d) for d in self.orders) + ")"

    def __repr__(self):
        return f"QStratum({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "QStratum":
        return parse_qstratum(text)


def parse_stratum(text: str) -> Stratum:
    return Stratum.parse(text)


def parse_qstratum(text: str) -> QStratum:
    m = _Q_RE.match(text)
    if not m:
        raise ValueError(f"not a quadratic stratum: {text!r}")
    return QStratum(_parse_orders(m.group(1)))


def parse_component_id(text: str) -> tuple[Stratum, str | None]:
    """Split ``"H(4)^hyp"`` into ``(Stratum((4,)), "hyp")``; no label gives None."""
    m = _H_RE.match(text)
    if not m:
        raise ValueError(f"not an abelian stratum: {text!r}")
    label = m.group(2)
    if label is not None and label not in LABELS:
        raise ValueError(f"unknown component label {label!r}")
    return Stratum(_parse_orders(m.group(1))), label


def genus_of(stratum: Stratum) -> int:
    total = sum(stratum.orders)
    if total % 2:
        raise NonIntegralGenus(f"{stratum}: sum of orders {total} is odd")
    return (total + 2) // 2


def double_cover_image(q: QStratum) -> Stratum:
    """Stratum of the canonical double cover of a quadratic differential.

    An even order d gives two zeros of order d/2, an odd order d a single
    zero of order d+1. Zeros of order 0 (from poles or d=0) are dropped.
    """
    image: list[int] = []
    for d in q.orders:
        if d % 2 == 0:
            if d:
                image.extend((d // 2, d // 2))
        elif d + 1:
            image.append(d + 1)
    if not image:
        # every singularity became a regular point: genus-one cover, no zeros
        image = [0]
    return Stratum(tuple(image))


def cover_genus_riemann_hurwitz(q: QStratum) -> int:
    """Genus of the double cover from Riemann-Hurwitz (branched at odd orders)."""
    branch = len(q.odd_orders)
    return 2 * q.genus - 1 + branch // 2


@dataclass(frozen=True)
class Component:
    stratum: Stratum
    label: str
    representative: "object" = field(compare=False)  # exchange.Permutation

    @property
    def id(self) -> str:
        if self.label == "unique":
            return str(Stratum(self.stratum.key))
        return f"{Stratum(self.stratum.key)}^{self.label}"

    @property
    def genus(self) -> int:
        return self.stratum.genus

    def __str__(self):
        return self.id


CATALOG_VERSION = None  # filled on first load


def _catalog_lines() -> list[str]:
    text = resources.files("kzspectra").joinpath("data/catalog.txt").read_text("utf-8")
    return text.splitlines()


@lru_cache(maxsize=1)
def _load_catalog() -> tuple[Component, ...]:
    from .exchange import Permutation, singularity_data

    global CATALOG_VERSION
    comps: list[Component] = []
    for lineno, raw in enumerate(_catalog_lines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# version:"):
                CATALOG_VERSION = line.split(":", 1)[1].strip()
            continue
        ident, perm_text = (part.strip() for part in line.split("|"))
        stratum, label = parse_component_id(ident)
        perm = Permutation.parse(perm_text)
        found = singularity_data(perm)
        if found != stratum:
            raise CatalogValidationError(
                f"line {lineno}: {ident} representative {perm} lies in {found}"
            )
        comps.append(Component(stratum, label or "unique", perm))
    return tuple(comps)


def component_catalog() -> list[Component]:
    """All catalogued components (genus 2 to 5), each validated at load."""
    return list(_load_catalog())


def get_component(ident: str) -> Component:
    """Look up ``"H(4)^odd"``; a bare stratum works when it has one component."""
    stratum, label = parse_component_id(ident)
    matches = [c for c in _load_catalog() if c.stratum == stratum]
    if label is None and len(matches) == 1:
        return matches[0]
    for comp in matches:
        if comp.label == (label or "unique"):
            return comp
    raise UnknownComponent(ident)
