import itertools
import math
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kzspectra.polygons import (
    DoublyStochastic,
    EndpointMismatch,
    LengthMismatch,
    MissingConstantTerm,
    NotDoublyStochastic,
    NotHermitian,
    NotMajorized,
    NotSorted,
    NotSymmetric,
    NotUnit,
    SumMismatch,
    TypeVector,
    birkhoff_decompose,
    birkhoff_reconstruct,
    convex_function_test,
    dominates,
    ds_certificate,
    polygon_above,
    polygon_csv,
    polygon_of,
    polygons_svg,
    schur_diagonal_check,
    symmetric_form_inequality,
    valuation_polygon,
)

F = Fraction


# -- polygons ------------------------------------------------------------

def test_polygon_examples():
    assert polygon_of([1, F(1, 2), F(1, 3)]).vertices == ((0, 0), (1, 1), (2, F(3, 2)), (3, F(11, 6)))
    assert polygon_of([0, 0, 0]).heights == [0, 0, 0, 0]
    assert polygon_of([1, F(3, 5), F(1, 5)]).vertices == ((0, 0), (1, 1), (2, F(8, 5)), (3, F(9, 5)))
    with pytest.raises(NotSorted):
        polygon_of([F(1, 3), F(1, 2)])
    assert polygon_of([1, F(1, 2)]).is_concave()


@given(st.lists(st.fractions(-5, 5), min_size=1, max_size=8))
def test_polygon_concave(values):
    p = polygon_of(sorted(values, reverse=True))
    assert p.is_concave() and [x for x, _ in p.vertices] == list(range(len(values) + 1))


# -- dominance -----------------------------------------------------------

def test_dominates_examples():
    # measured values with the sum forced to the exact total
    lam = [F(1), F(52, 100), F(7, 4) - 1 - F(52, 100)]
    assert dominates(lam, [1, F(1, 2), F(1, 4)], 0)
    assert dominates([1, F(1, 2)], [1, F(1, 2)], 0)
    assert dominates([1, 0.52, 0.37, 0.21, 0.09], [1, F(3, 7), F(1, 3), F(2, 7), F(1, 7)], 0.02)
    v = dominates([1, F(1, 4), F(1, 2)], [1, F(1, 2), F(1, 4)], 0)
    assert v  # inputs are sorted first
    v = dominates([1, F(1, 3), F(1, 3)], [1, F(1, 2), F(1, 6)], 0)
    assert not v and v.status == "fails_at" and v.index == 2
    v = dominates([1, F(1, 2)], [1, F(1, 3)], 0)
    assert v.status == "sum_mismatch" and v.delta == F(1, 6)
    with pytest.raises(LengthMismatch):
        dominates([1], [1, 0])


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@st.composite
def equal_sum_triple(draw):
    n = draw(st.integers(1, 6))
    vecs = []
    for _ in range(3):
        v = draw(st.lists(rationals, min_size=n, max_size=n))
        vecs.append(v)
    total = sum(vecs[0], F(0))
    out = []
    for v in vecs:
        v = [x + (total - sum(v, F(0))) / n for x in v]
        out.append(sorted(v, reverse=True))
    return out


@given(equal_sum_triple())
def test_partial_order(triple):
    a, b, c = triple
    assert dominates(a, a, 0)
    if dominates(a, b, 0) and dominates(b, a, 0):
        assert a == b
    if dominates(a, b, 0) and dominates(b, c, 0):
        assert dominates(a, c, 0)


@given(equal_sum_triple())
def test_polygon_above_matches_dominates(triple):
    a, b, _ = triple
    assert polygon_above(polygon_of(a), polygon_of(b), 0) == bool(dominates(a, b, 0))


def test_polygon_above_examples():
    p = polygon_of([2, 0])
    assert polygon_above(p, p)
    assert polygon_above(p, polygon_of([1, 1]))
    assert not polygon_above(polygon_of([1, 1]), p)
    with pytest.raises(EndpointMismatch):
        polygon_above(polygon_of([1, 1]), polygon_of([1, 0]))
    with pytest.raises(EndpointMismatch):
        polygon_above(polygon_of([1]), polygon_of([1, 0]))


# -- the three majorization criteria -------------------------------------

def random_pair(rng, majorizing):
    n = int(rng.integers(2, 9))
    lam = np.sort(rng.normal(size=n))[::-1]
    if majorizing:
        mu = lam.copy()
        for _ in range(int(rng.integers(1, 2 * n))):
            j, k = sorted(rng.choice(n, size=2, replace=False))
            t = rng.uniform()
            mu[j], mu[k] = (1 - t) * mu[j] + t * mu[k], t * mu[j] + (1 - t) * mu[k]
    else:
        mu = rng.normal(size=n)
        mu += (lam.sum() - mu.sum()) / n
    return lam.tolist(), sorted(mu.tolist(), reverse=True)


def test_majorization_criteria_equivalence_1000():
    rng = np.random.default_rng(20240601)
    failures = []
    counts = {True: 0, False: 0}
    for case in range(1000):
        lam, mu = random_pair(rng, majorizing=case % 2 == 0)
        d = bool(dominates(lam, mu, 1e-12))
        c = convex_function_test(lam, mu)
        try:
            p = ds_certificate(lam, mu)
            terms = birkhoff_decompose(p)
            err = np.abs(birkhoff_reconstruct(terms, p.n) - p.matrix).max()
            image = np.abs(p.matrix @ np.array(lam) - np.array(mu)).max()
            s = err < 1e-9 and image < 1e-9 and len(terms) <= (p.n - 1) ** 2 + 1
        except NotMajorized:
            s = False
        counts[d] += 1
        if not (d == c == s):
            failures.append((case, lam, mu, d, c, s))
    assert failures == []
    assert counts[True] >= 500 and counts[False] >= 100


def test_convex_function_examples():
    assert convex_function_test([2, 0], [1, 1], [lambda x: x * x])
    assert convex_function_test([1, F(1, 2)], [1, F(1, 2)])
    assert not convex_function_test([1, 1], [2, 0])
    with pytest.raises(SumMismatch):
        convex_function_test([1, 1], [1, 0])


# -- doubly stochastic matrices and Birkhoff -----------------------------

def test_birkhoff_examples():
    assert birkhoff_decompose(np.eye(3)) == [(1.0, (0, 1, 2))]
    terms = birkhoff_decompose(np.full((2, 2), 0.5))
    assert sorted(terms) == [(0.5, (0, 1)), (0.5, (1, 0))]
    with pytest.raises(NotDoublyStochastic):
        birkhoff_decompose(np.array([[0.5, 0.5], [0.6, 0.4]]))
    with pytest.raises(NotDoublyStochastic):
        DoublyStochastic(np.array([[1.5, -0.5], [-0.5, 1.5]]))


@pytest.mark.parametrize("seed", range(20))
def test_birkhoff_random_combination(seed):
    rng = np.random.default_rng(seed)
    n = 6
    weights = rng.dirichlet(np.ones(5))
    perms = [rng.permutation(n) for _ in range(5)]
    p = sum(w * np.eye(n)[perm] for w, perm in zip(weights, perms))
    terms = birkhoff_decompose(p)
    assert np.abs(birkhoff_reconstruct(terms, n) - p).max() < 1e-9
    assert all(w > 0 for w, _ in terms)
    assert math.isclose(sum(w for w, _ in terms), 1.0, abs_tol=1e-9)
    assert len(terms) <= (n - 1) ** 2 + 1


def test_birkhoff_deterministic():
    rng = np.random.default_rng(1)
    p = sum(w * np.eye(5)[rng.permutation(5)] for w in rng.dirichlet(np.ones(4)))
    assert birkhoff_decompose(p) == birkhoff_decompose(p)


def test_ds_certificate_rejects():
    with pytest.raises(NotMajorized):
        ds_certificate([1, 1], [2, 0])


# -- Schur and the symmetric form inequality ----------------------------------

def test_schur_examples():
    assert schur_diagonal_check(np.diag([3.0, 1.0, -2.0]))
    assert schur_diagonal_check(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(np.linalg.eigvalsh([[2.0, 1.0], [1.0, 2.0]]), [1.0, 3.0])
    with pytest.raises(NotHermitian):
        schur_diagonal_check(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_schur_500_random_hermitian():
    rng = np.random.default_rng(77)
    failures = 0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (a + a.conj().T) / 2
        eig, u = np.linalg.eigh(h)
        # oracle: diag(H) = |U|^2 eig with |U|^2 doubly stochastic
        s = np.abs(u) ** 2
        DoublyStochastic(s.T.copy() if n else s)
        assert np.allclose(s @ eig, np.real(np.diag(h)), atol=1e-9)
        if not schur_diagonal_check(h):
            failures += 1
    assert failures == 0


def test_symmetric_form_examples():
    alpha = np.array([0.6, 0.8j])
    lhs, rhs, ok = symmetric_form_inequality(np.eye(2), alpha)
    assert math.isclose(lhs, 1.0) and ok
    a = np.array([1, 1]) / math.sqrt(2)
    lhs, rhs, ok = symmetric_form_inequality(np.diag([2.0, 0.0]), a)
    assert math.isclose(lhs, 2.0) and math.isclose(rhs, 1.0) and ok
    lhs, rhs, ok = symmetric_form_inequality(np.eye(2), np.array([1.0, 0.0]))
    assert math.isclose(lhs, 1.0) and math.isclose(rhs, 1.0)
    with pytest.raises(NotSymmetric):
        symmetric_form_inequality(np.array([[0, 1], [0, 0]]), a)
    with pytest.raises(NotUnit):
        symmetric_form_inequality(np.eye(2), np.array([1.0, 1.0]))


def test_symmetric_form_10000_random():
    rng = np.random.default_rng(4321)
    failures = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 7))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = a + a.T
        al = rng.normal(size=n) + 1j * rng.normal(size=n)
        al /= np.linalg.norm(al)
        lhs, rhs, ok = symmetric_form_inequality(b, al)
        # oracle: lhs = |alpha B|^2 and Cauchy-Schwarz against conj(alpha)
        row = al @ b
        assert math.isclose(lhs, float(np.vdot(row, row).real), rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(rhs, abs(row @ al) ** 2, rel_tol=1e-9, abs_tol=1e-12)
        failures += not ok
    assert failures == 0


# -- valuation polygons --------------------------------------------------

def padic_valuation(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def test_ordinary_elliptic_numerator():
    p, a = 7, 3  # 1 - a t + p t^2 with p not dividing a
    coeffs = [1, -a, p]
    vals = [(j, padic_valuation(c, p)) for j, c in enumerate(coeffs)]
    assert valuation_polygon(vals).vertices == ((0, 0), (1, 1), (2, 1))


def test_hodge_polynomial_same_polygon():
    q = 5
    coeffs = [1, -(1 + q), q]  # (1 - t)(1 - q t)
    vals = [(j, padic_valuation(c, q)) for j, c in enumerate(coeffs)]
    newton = valuation_polygon(vals)
    assert newton.vertices == ((0, 0), (1, 1), (2, 1))
    assert polygon_above(newton, newton)


def test_valuation_polygon_misc():
    assert valuation_polygon([(0, 0), (1, 0), (2, 0)]).heights == [0, 0, 0]
    assert valuation_polygon({0: 0, 1: None, 2: 2}).vertices == ((0, 0), (1, 1), (2, 2))
    with pytest.raises(MissingConstantTerm):
        valuation_polygon([(1, 0), (2, 1)])


def lower_hull_brute(points):
    """Slopes of the lower convex hull by checking every candidate edge."""
    pts = sorted(points)
    edges = []
    for (i, a), (j, b) in itertools.combinations(pts, 2):
        s = F(b - a, j - i)
        if all(y >= a + s * (x - i) for x, y in pts):
            edges.append((i, j, s))
    out = {}
    for i, j, s in edges:
        for x in range(i, j):
            out.setdefault(x, s)
    return [out[x] for x in range(pts[-1][0])]


@given(st.lists(st.one_of(st.none(), st.integers(0, 6)), min_size=1, max_size=8))
def test_valuation_polygon_is_lower_hull(tail):
    vals = [(0, 0)] + [(j + 1, v) for j, v in enumerate(tail)]
    pts = [(j, v) for j, v in vals if v is not None]
    poly = valuation_polygon(vals)
    assert poly.is_concave()
    assert poly.n == pts[-1][0]
    assert sorted(poly.slopes, reverse=True) == sorted(lower_hull_brute(pts), reverse=True)


# -- exports -------------------------------------------------------------

def test_csv_and_svg():
    p = polygon_of([1, F(1, 2), F(1, 4)])
    assert polygon_csv(p) == "x,y\n0,0\n1,1\n2,3/2\n3,7/4\n"
    svg = polygons_svg([("P_lambda", polygon_of([1, 0.52, 0.23])), ("P_w", p)], title="H(3,1) <test>")
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.findall(f"{ns}polyline")
    assert len(lines) == 2
    assert all(len(pl.get("points").split()) == 4 for pl in lines)
    assert svg == polygons_svg([("P_lambda", polygon_of([1, 0.52, 0.23])), ("P_w", p)], title="H(3,1) <test>")


def test_typevector():
    assert TypeVector((3, 2, 2)).total == 7
    with pytest.raises(NotSorted):
        TypeVector((1, 2))
