"""Rauzy-Veech induction, cocycle matrices and singularity data.

The one-step oracle below is written from scratch: it evaluates the
exchange map pointwise and computes the first return to the induced
interval by iteration, never looking at how ``rauzy_step`` works.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kzspectra import _kernels
from kzspectra.exchange import (
    CocycleMatrix,
    Iet,
    Permutation,
    ReducibleError,
    TieError,
    UnboundedRunError,
    intersection_form,
    rauzy_step,
    singularity_data,
    zorich_step,
)
from kzspectra.strata import component_catalog, parse_stratum

CATALOG = component_catalog()
REPS = [c.representative for c in CATALOG]


def iet_map(perm, lengths, x):
    """T(x) for a labelled IET, from the positions of intervals on both rows."""
    ln = dict(zip(perm.alphabet, lengths))
    start_top, s = {}, 0.0
    for a in perm.top:
        start_top[a] = s
        s += ln[a]
    start_bot, s = {}, 0.0
    for a in perm.bottom:
        start_bot[a] = s
        s += ln[a]
    for a in perm.top:
        if start_top[a] <= x < start_top[a] + ln[a]:
            return start_bot[a] + (x - start_top[a])
    raise ValueError(x)


def first_return(perm, lengths, x, right_end):
    y = iet_map(perm, lengths, x)
    while y >= right_end:
        y = iet_map(perm, lengths, y)
    return y


def random_iet(perm, rng):
    x = rng.exponential(size=perm.n)
    return Iet(perm, tuple(x / x.sum()))


# -- examples ------------------------------------------------------------

def test_parse_and_print_round_trip():
    p = Permutation.parse("A B C D / D C B A")
    assert p.top == ("A", "B", "C", "D") and p.bottom == ("D", "C", "B", "A")
    assert str(p) == "A B C D / D C B A"
    for rep in REPS:
        assert Permutation.parse(str(rep)) == rep


def test_bad_permutations():
    with pytest.raises(ValueError):
        Permutation.parse("A B / A C")
    with pytest.raises(ValueError):
        Permutation.parse("A / A")
    with pytest.raises(ValueError):
        Permutation.parse("A B C")
    assert not Permutation.parse("A B C / A C B").is_irreducible()


def test_rotation_step():
    iet = Iet(Permutation.parse("A B / B A"), (0.7, 0.3))
    out, m, kind = rauzy_step(iet)
    assert kind == "top"
    assert out.perm == iet.perm
    assert out.lengths == pytest.approx((0.4, 0.3), abs=1e-15)
    assert m == CocycleMatrix([[1, 1], [0, 1]])


def test_exact_tie_raises():
    with pytest.raises(TieError):
        rauzy_step(Iet(Permutation.parse("A B / B A"), (0.5, 0.5)))


def test_four_interval_step():
    iet = Iet(Permutation.parse("A B C D / D C B A"), (0.1, 0.2, 0.3, 0.4))
    out, m, kind = rauzy_step(iet)
    assert kind == "bottom"
    assert sum(out.lengths) == pytest.approx(0.9, abs=1e-15)
    assert out.lengths == pytest.approx((0.1, 0.2, 0.3, 0.3), abs=1e-15)
    assert str(out.perm) == "A B C D / D A C B"
    assert np.allclose(m.apply(out.lengths), iet.lengths, atol=1e-15)


def test_rotation_zorich_step():
    iet = Iet(Permutation.parse("A B / B A"), (0.7, 0.3))
    out, m, count = zorich_step(iet)
    assert count == 2
    assert out.lengths == pytest.approx((0.1, 0.3), abs=1e-15)
    e = CocycleMatrix.elementary(2, 0, 1)
    assert m == e @ e


def test_zorich_count_one_is_rauzy():
    rng = np.random.default_rng(3)
    seen = 0
    for _ in range(200):
        iet = random_iet(REPS[4], rng)
        out_z, m_z, count = zorich_step(iet)
        if count != 1:
            continue
        out_r, m_r, _ = rauzy_step(iet)
        assert out_z == out_r and m_z == m_r
        seen += 1
    assert seen > 10


def test_unbounded_run():
    iet = Iet(Permutation.parse("A B / B A"), (1.0, 1e-9))
    with pytest.raises(UnboundedRunError):
        zorich_step(iet, max_count=1000)


def test_reducible_input():
    iet = Iet(Permutation.parse("A B C / A C B"), (0.2, 0.3, 0.5))
    with pytest.raises(ReducibleError):
        rauzy_step(iet)


def test_torus_intersection_form():
    om = intersection_form(Permutation.parse("A B / B A"))
    assert om.omega.tolist() == [[0, 1], [-1, 0]]
    assert om.rank == 2 and om.genus == 1


def brute_force_omega(perm):
    # +1 when a is left of b on top and right of it on the bottom
    n = perm.n
    out = np.zeros((n, n), dtype=int)
    for i, a in enumerate(perm.alphabet):
        for j, b in enumerate(perm.alphabet):
            dt = perm.top.index(b) - perm.top.index(a)
            db = perm.bottom.index(b) - perm.bottom.index(a)
            out[i, j] = (dt > 0 and db < 0) - (dt < 0 and db > 0)
    return out


@pytest.mark.parametrize("rep", REPS, ids=str)
def test_intersection_form_matches_brute_force(rep):
    assert np.array_equal(intersection_form(rep).omega, brute_force_omega(rep))
    assert np.array_equal(_kernels.omega_matrix_py(*rep.as_arrays()), brute_force_omega(rep))


def test_genus_two_rank():
    assert intersection_form(Permutation.parse("A B C D / D C B A")).rank == 4


@pytest.mark.parametrize(
    "text, stratum",
    [
        ("A B C D / D C B A", "H(2)"),
        ("A B C D E / E D C B A", "H(1,1)"),
        ("A B / B A", "H(0)"),
        ("A B C / C B A", "H(0,0)"),
    ],
)
def test_singularity_data_examples(text, stratum):
    assert singularity_data(Permutation.parse(text)) == parse_stratum(stratum)


@pytest.mark.parametrize("comp", CATALOG, ids=lambda c: c.id)
def test_singularity_data_genus_agrees_with_rank(comp):
    s = singularity_data(comp.representative)
    assert s == comp.stratum
    assert 2 * s.genus == intersection_form(comp.representative).rank


# -- independent first-return oracle -------------------------------------

@pytest.mark.parametrize("rep", REPS[:12], ids=str)
def test_rauzy_step_is_first_return(rep):
    rng = np.random.default_rng(11)
    iet = random_iet(rep, rng)
    for _ in range(20):
        la = iet.length(iet.perm.top[-1])
        lb = iet.length(iet.perm.bottom[-1])
        right = iet.total - min(la, lb)
        out, m, kind = rauzy_step(iet)
        assert kind == ("top" if la < lb else "bottom")
        assert out.total == pytest.approx(right, rel=1e-12)
        for x in rng.uniform(0, right, size=25):
            want = first_return(iet.perm, iet.lengths, x, right)
            assert iet_map(out.perm, out.lengths, x) == pytest.approx(want, abs=1e-12)
        iet = out.normalized()


# -- invariants along long trajectories ----------------------------------

def test_unimodularity_and_length_consistency_1e5():
    """100000 Rauzy steps over several strata; exact determinant each step."""
    rng = np.random.default_rng(2024)
    reps = [c.representative for c in CATALOG if c.genus in (2, 3, 4)]
    per = 100_000 // len(reps) + 1
    total = 0
    bad_det = bad_len = 0
    for rep in reps:
        iet = random_iet(rep, rng)
        for _ in range(per):
            try:
                out, m, _ = rauzy_step(iet)
            except TieError:
                iet = random_iet(rep, rng)
                continue
            # elementary matrix: I + one off-diagonal unit, so det is exactly 1
            e = m.entries
            off = [(i, j) for i in range(m.n) for j in range(m.n) if i != j and e[i, j] != 0]
            if len(off) != 1 or any(e[i, i] != 1 for i in range(m.n)) or m.determinant() not in (1, -1):
                bad_det += 1
            back = m.apply(out.lengths)
            if np.max(np.abs(back - np.array(iet.lengths))) > 1e-12 * max(iet.lengths):
                bad_len += 1
            iet = out.normalized()
            total += 1
    assert total >= 100_000
    assert bad_det == 0 and bad_len == 0


def test_zorich_products_unimodular():
    rng = np.random.default_rng(5)
    for rep in REPS[::3]:
        iet = random_iet(rep, rng)
        prod = CocycleMatrix.identity(rep.n)
        for _ in range(60):
            out, m, _ = zorich_step(iet)
            assert m.determinant() == 1
            assert np.allclose(m.apply(out.lengths), iet.lengths, rtol=1e-9, atol=1e-15)
            prod = prod @ m
            iet = out.normalized()
        assert prod.determinant() == 1


def zorich_and_rauzy_products(start, nsteps):
    """Both products along one trajectory, normalizing after each Zorich step.

    The Rauzy replay of every accelerated step starts from the same state,
    so the two products must agree as exact integer matrices.
    """
    n = start.perm.n
    prod_z, prod_r = CocycleMatrix.identity(n), CocycleMatrix.identity(n)
    iet = start
    for _ in range(nsteps):
        out, m, c = zorich_step(iet)
        prod_z = prod_z @ m
        cur = iet
        for _ in range(c):
            cur, mr, _ = rauzy_step(cur)
            prod_r = prod_r @ mr
        assert cur.perm == out.perm
        assert np.allclose(cur.lengths, out.lengths, rtol=1e-12, atol=0)
        iet = out.normalized()
    return prod_z, prod_r


@pytest.mark.parametrize("seed", range(5))
def test_acceleration_equivalence_n5(seed):
    """Product of 100 Zorich matrices = product of the underlying Rauzy matrices."""
    rep = Permutation.parse("A B C D E / E D C B A")
    start = random_iet(rep, np.random.default_rng(seed))
    prod_z, prod_r = zorich_and_rauzy_products(start, 100)
    assert prod_z == prod_r
    assert prod_z.determinant() == 1


@given(st.sampled_from(REPS), st.integers(0, 2**32 - 1))
def test_acceleration_equivalence_property(rep, seed):
    start = random_iet(rep, np.random.default_rng(seed))
    prod_z, prod_r = zorich_and_rauzy_products(start, 100)
    assert prod_z == prod_r


def test_rank_and_stratum_invariant_along_rauzy_class():
    rng = np.random.default_rng(9)
    for comp in CATALOG[::4]:
        iet = random_iet(comp.representative, rng)
        r0 = intersection_form(iet.perm).rank
        for _ in range(1000):
            try:
                iet, m, _ = rauzy_step(iet)
            except TieError:
                iet = random_iet(iet.perm, rng)
                continue
            iet = iet.normalized()
            assert intersection_form(iet.perm).rank == r0
            assert singularity_data(iet.perm) == comp.stratum


def test_omega_congruence():
    """Omega(pi') = M^T Omega(pi) M for one step (exact integers)."""
    rng = np.random.default_rng(4)
    for rep in REPS[::2]:
        iet = random_iet(rep, rng)
        for _ in range(50):
            out, m, _ = rauzy_step(iet)
            a = m.entries
            lhs = intersection_form(out.perm).omega.astype(object)
            rhs = a.T.dot(intersection_form(iet.perm).omega.astype(object)).dot(a)
            assert (lhs == rhs).all()
            iet = out.normalized()


# -- compiled kernel agrees with the reference step ----------------------

@pytest.mark.parametrize("kernel", ["python", "compiled"])
def test_kernel_zorich_matches_reference(kernel):
    fn = _kernels._zorich_py if kernel == "python" else _kernels._zorich
    rng = np.random.default_rng(21)
    for rep in REPS:
        iet = random_iet(rep, rng)
        for _ in range(30):
            out, m, count = zorich_step(iet)
            top, bot = iet.perm.as_arrays()
            lengths = np.array(iet.lengths)
            basis = np.eye(rep.n)
            status, k = fn(top, bot, lengths, basis, 1e-14, 10**6)
            assert status == _kernels.OK
            assert k == count
            assert Permutation.from_arrays(top, bot, rep.alphabet) == out.perm
            assert np.allclose(lengths, out.lengths, rtol=1e-9, atol=1e-15)
            assert np.array_equal(basis, m.to_float().T)
            iet = out.normalized()
