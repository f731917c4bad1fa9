"""Convex polygons of type vectors and the majorization order.

Convention used throughout: a type vector ``mu`` is sorted decreasingly and
its polygon has vertices ``(i, mu_1 + ... + mu_i)``, a concave chain. One
polygon lies above another when, with the same endpoints, its interpolant is
pointwise at least as large. For vectors this is majorization.

Exact inputs (ints and Fractions) are compared exactly; floats take an
explicit slack.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "TypeVector",
    "ConvexPolygon",
    "DoublyStochastic",
    "Dominance",
    "NotSorted",
    "LengthMismatch",
    "SumMismatch",
    "NotMajorized",
    "NotDoublyStochastic",
    "NotHermitian",
    "NotSymmetric",
    "NotUnit",
    "MissingConstantTerm",
    "EndpointMismatch",
    "polygon_of",
    "dominates",
    "default_test_functions",
    "convex_function_test",
    "ds_certificate",
    "birkhoff_decompose",
    "birkhoff_reconstruct",
    "schur_diagonal_check",
    "symmetric_form_inequality",
    "valuation_polygon",
    "polygon_above",
    "polygon_csv",
    "polygons_svg",
]


class NotSorted(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class SumMismatch(ValueError):
    pass


class NotMajorized(ValueError):
    pass


class NotDoublyStochastic(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class NotUnit(ValueError):
    pass


class MissingConstantTerm(ValueError):
    pass


class EndpointMismatch(ValueError):
    pass


def _is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _as_number(v):
    return v if isinstance(v, Rational) else float(v)


def _partial_sums(values: Sequence) -> list:
    out, acc = [], (Fraction(0) if _is_exact(values) else 0.0)
    for v in values:
        acc = acc + v
        out.append(acc)
    return out


@dataclass(frozen=True)
class TypeVector:
    mu: tuple

    def __post_init__(self):
        mu = tuple(_as_number(v) for v in self.mu)
        if any(a < b for a, b in zip(mu, mu[1:])):
            raise NotSorted(f"type vector is not weakly decreasing: {mu}")
        object.__setattr__(self, "mu", mu)

    def __len__(self):
        return len(self.mu)

    def __iter__(self):
        return iter(self.mu)

    @property
    def total(self):
        return _partial_sums(self.mu)[-1] if self.mu else 0


@dataclass(frozen=True)
class ConvexPolygon:
    """Vertices ``(0, 0), (1, y_1), ..., (n, y_n)``."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple((int(x), _as_number(y)) for x, y in self.vertices)
        if not verts or verts[0] != (0, 0):
            raise ValueError("a polygon starts at (0, 0)")
        if [x for x, _ in verts] != list(range(len(verts))):
            raise ValueError("x-coordinates must be 0, 1, ..., n")
        object.__setattr__(self, "vertices", verts)

    @property
    def n(self) -> int:
        return len(self.vertices) - 1

    @property
    def heights(self) -> list:
        return [y for _, y in self.vertices]

    @property
    def slopes(self) -> list:
        h = self.heights
        return [b - a for a, b in zip(h, h[1:])]

    def is_concave(self, tol=0) -> bool:
        s = self.slopes
        if not tol:
            return all(a >= b for a, b in zip(s, s[1:]))  # exact inputs stay exact
        return all(a >= b - tol for a, b in zip(s, s[1:]))


def polygon_of(mu) -> ConvexPolygon:
    """Partial-sum polygon of a weakly decreasing vector."""
    tv = mu if isinstance(mu, TypeVector) else TypeVector(tuple(mu))
    sums = _partial_sums(tv.mu)
    zero = Fraction(0) if _is_exact(tv.mu) else 0.0
    return ConvexPolygon(((0, zero),) + tuple((i + 1, s) for i, s in enumerate(sums)))


@dataclass(frozen=True)
class Dominance:
    """Outcome of :func:`dominates`.

    ``status`` is ``"dominates"``, ``"fails_at"`` (``index`` is the 1-based
    first failing partial sum) or ``"sum_mismatch"`` (``delta`` is the
    difference of totals). ``slack`` holds every partial-sum difference.
    """

    status: str
    index: int | None = None
    delta: object = None
    slack: tuple = ()

    def __bool__(self):
        return self.status == "dominates"


def _tolerances(tol, n: int) -> list:
    if isinstance(tol, (int, float, Fraction)):
        return [tol] * n
    tol = list(tol)
    if len(tol) != n:
        raise LengthMismatch(f"{len(tol)} tolerances for {n} partial sums")
    return tol


def dominates(lam, mu, tol=0) -> Dominance:
    """Whether the polygon of ``lam`` lies above (or on) that of ``mu``.

    Both vectors are sorted decreasingly first. ``tol`` is a scalar or one
    slack per partial sum: the i-th partial sum of ``lam`` may fall short by
    ``tol[i]``, and the totals may differ by ``tol[-1]``.
    """
    lam = sorted((_as_number(v) for v in lam), reverse=True)
    mu = sorted((_as_number(v) for v in mu), reverse=True)
    if len(lam) != len(mu):
        raise LengthMismatch(f"lengths {len(lam)} and {len(mu)} differ")
    n = len(lam)
    if n == 0:
        return Dominance("dominates")
    tols = _tolerances(tol, n)
    pl, pm = _partial_sums(lam), _partial_sums(mu)
    slack = tuple(a - b for a, b in zip(pl, pm))
    if abs(slack[-1]) > tols[-1]:
        return Dominance("sum_mismatch", delta=slack[-1], slack=slack)
    for i in range(n - 1):
        if slack[i] < -tols[i]:
            return Dominance("fails_at", index=i + 1, slack=slack)
    return Dominance("dominates", slack=slack)


def default_test_functions(lam: Sequence[float], mu: Sequence[float]) -> list[Callable[[float], float]]:
    """``x^2``, ``exp`` and the hinge family ``|x - c|`` at every entry ``c``.

    The hinges at the data points already characterize majorization for
    finite vectors.
    """
    funcs: list[Callable[[float], float]] = [lambda x: x * x, math.exp]
    for c in sorted({float(v) for v in list(lam) + list(mu)}):
        funcs.append(lambda x, c=c: abs(x - c))
    return funcs


def convex_function_test(lam, mu, funcs=None, tol: float = 1e-9) -> bool:
    """``sum f(mu_i) <= sum f(lam_i)`` for each supplied convex ``f``."""
    lam = [float(v) for v in lam]
    mu = [float(v) for v in mu]
    if len(lam) != len(mu):
        raise LengthMismatch(f"lengths {len(lam)} and {len(mu)} differ")
    if abs(math.fsum(lam) - math.fsum(mu)) > tol:
        raise SumMismatch(f"sums differ by {math.fsum(lam) - math.fsum(mu)!r}")
    if funcs is None:
        funcs = default_test_functions(lam, mu)
    for f in funcs:
        lhs = math.fsum(f(x) for x in mu)
        rhs = math.fsum(f(x) for x in lam)
        if lhs > rhs + tol * max(1.0, abs(rhs)):
            return False
    return True


@dataclass(frozen=True)
class DoublyStochastic:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotDoublyStochastic("matrix must be square")
        if (m < -1e-12).any():
            raise NotDoublyStochastic("negative entries")
        if np.abs(m.sum(axis=0) - 1).max(initial=0) > 1e-12 or np.abs(m.sum(axis=1) - 1).max(initial=0) > 1e-12:
            raise NotDoublyStochastic("row or column sums differ from 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def ds_certificate(lam, mu, tol: float = 1e-12) -> DoublyStochastic:
    """Doubly stochastic ``P`` with ``mu = P @ lam`` built from T-transforms.

    Inputs are sorted decreasingly. Each T-transform moves mass between one
    entry that is too large and the next entry that is too small; at most
    ``n - 1`` of them are needed.
    """
    x = np.array(sorted((float(v) for v in lam), reverse=True))
    target = np.array(sorted((float(v) for v in mu), reverse=True))
    if x.shape != target.shape:
        raise LengthMismatch("lengths differ")
    if not dominates(x.tolist(), target.tolist(), tol * max(1.0, float(np.abs(x).sum()))):
        raise NotMajorized("lam does not majorize mu")
    n = x.size
    p = np.eye(n)
    scale = max(1.0, float(np.abs(x).max(initial=0)))
    for _ in range(2 * n):
        diff = x - target
        over = np.nonzero(diff > tol * scale)[0]
        if over.size == 0:
            break
        j = int(over[-1])
        under = np.nonzero(diff[j + 1:] < -tol * scale)[0]
        if under.size == 0:
            break
        k = j + 1 + int(under[0])
        delta = min(x[j] - target[j], target[k] - x[k])
        alpha = delta / (x[j] - x[k])
        t = np.eye(n)
        t[j, j] = t[k, k] = 1 - alpha
        t[j, k] = t[k, j] = alpha
        x = t @ x
        p = t @ p
    if np.abs(x - target).max(initial=0) > 1e-9 * scale:
        raise NotMajorized("T-transform sequence did not reach mu")
    return DoublyStochastic(p)


def birkhoff_decompose(P, tol: float = 1e-12) -> list[tuple[float, tuple[int, ...]]]:
    """Write ``P`` as a convex combination of permutation matrices.

    Repeatedly takes a maximum-weight perfect matching inside the support
    and removes it with weight equal to its smallest entry. A permutation is
    returned as ``sigma`` with ``sigma[i]`` the column used by row ``i``.
    """
    ds = P if isinstance(P, DoublyStochastic) else DoublyStochastic(np.asarray(P, dtype=float))
    r = ds.matrix.copy()
    n = ds.n
    terms: list[tuple[float, tuple[int, ...]]] = []
    remaining = 1.0
    while remaining > tol and len(terms) <= n * n:
        support = r > tol
        weight = np.where(support, r, -(n + 1.0))
        rows, cols = linear_sum_assignment(weight, maximize=True)
        if not support[rows, cols].all():
            raise NotDoublyStochastic("support has no perfect matching (matrix not doubly stochastic)")
        c = float(r[rows, cols].min())
        terms.append((c, tuple(int(j) for j in cols)))
        r[rows, cols] -= c
        r[np.abs(r) <= tol] = 0.0
        remaining -= c
    return terms


def birkhoff_reconstruct(terms, n: int) -> np.ndarray:
    m = np.zeros((n, n))
    for w, sigma in terms:
        m[np.arange(n), list(sigma)] += w
    return m


def schur_diagonal_check(H, tol: float = 1e-9) -> bool:
    """The eigenvalue vector of a Hermitian ``H`` majorizes its diagonal."""
    h = np.asarray(H)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian("matrix must be square")
    if np.abs(h - h.conj().T).max(initial=0) > 1e-12:
        raise NotHermitian("matrix is not Hermitian")
    eig = np.linalg.eigvalsh(h)
    diag = np.real(np.diag(h))
    scale = max(1.0, float(np.abs(eig).max(initial=0)))
    return bool(dominates(eig.tolist(), diag.tolist(), tol * scale))


def symmetric_form_inequality(B, alpha) -> tuple[float, float, bool]:
    """``alpha H alpha^*`` against ``|alpha B alpha^T|^2`` with ``H = B B^*``."""
    b = np.asarray(B, dtype=complex)
    a = np.asarray(alpha, dtype=complex).ravel()
    if b.ndim != 2 or b.shape[0] != b.shape[1] or np.abs(b - b.T).max(initial=0) > 1e-12:
        raise NotSymmetric("B must be a square complex symmetric matrix")
    if a.size != b.shape[0]:
        raise LengthMismatch("alpha and B sizes differ")
    if abs(np.linalg.norm(a) - 1.0) > 1e-12:
        raise NotUnit(f"|alpha| = {np.linalg.norm(a)!r}")
    h = b @ b.conj().T
    lhs = float(np.real(a @ h @ a.conj()))
    rhs = float(abs(a @ b @ a) ** 2)
    return lhs, rhs, lhs >= rhs - 1e-10


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def valuation_polygon(valuations) -> ConvexPolygon:
    """Polygon of the lower convex hull of points ``(j, v_j)``.

    ``valuations`` is a mapping or a list of ``(j, v_j)``; ``None`` or
    infinite values (vanishing coefficients) are skipped. The hull's slopes
    are listed in decreasing order, which reflects the indexing
    ``j -> beta - j + 1`` and makes the result a type-vector polygon.
    """
    items = valuations.items() if isinstance(valuations, dict) else valuations
    pts = {}
    for j, v in items:
        if v is None or (isinstance(v, float) and math.isinf(v)):
            continue
        pts[int(j)] = v if isinstance(v, Rational) else float(v)
    if pts.get(0) != 0:
        raise MissingConstantTerm("need the constant term with valuation 0")
    ordered = sorted(pts.items())
    hull: list = []
    for p in ordered:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    exact = _is_exact(pts.values())
    slopes = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        s = Fraction(y1 - y0, x1 - x0) if exact else (y1 - y0) / (x1 - x0)
        slopes.extend([s] * (x1 - x0))
    return polygon_of(sorted(slopes, reverse=True))


def polygon_above(upper: ConvexPolygon, lower: ConvexPolygon, tol=0) -> bool:
    """Pointwise comparison at integer abscissae, endpoints required equal."""
    if upper.n != lower.n:
        raise EndpointMismatch(f"polygons end at x={upper.n} and x={lower.n}")
    if abs(upper.heights[-1] - lower.heights[-1]) > tol:
        raise EndpointMismatch("polygons end at different heights")
    return all(a >= b - tol for a, b in zip(upper.heights, lower.heights))


def _fmt(v) -> str:
    if isinstance(v, Rational):
        v = Fraction(v)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return f"{v:.6g}"


def polygon_csv(polygon: ConvexPolygon) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in polygon.vertices:
        w.writerow([x, _fmt(y)])
    return buf.getvalue()


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def polygons_svg(polygons: Sequence[tuple[str, ConvexPolygon]], title: str = "", width: int = 480, height: int = 360) -> str:
    """Overlay polylines with labelled vertices; output depends only on inputs."""
    pad = 48
    xmax = max((p.n for _, p in polygons), default=1) or 1
    ymax = max((float(y) for _, p in polygons for y in p.heights), default=1.0) or 1.0

    def sx(x):
        return pad + (width - 2 * pad) * x / xmax

    def sy(y):
        return height - pad - (height - 2 * pad) * float(y) / ymax

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="20" text-anchor="middle" font-size="14">{_escape(title)}</text>')
    for k, (label, poly) in enumerate(polygons):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in poly.vertices)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in poly.vertices:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>')
            out.append(
                f'<text x="{sx(x) + 4:.2f}" y="{sy(y) - 6 - 12 * k:.2f}" font-size="10" fill="{color}">{_fmt(y)}</text>'
            )
        out.append(
            f'<text x="{width - pad:.2f}" y="{pad + 14 * k:.2f}" text-anchor="end" font-size="12" fill="{color}">{_escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
