from fractions import Fraction
from itertools import combinations

import pytest

from xclab.bounds import FORBIDDEN
from xclab.errors import InputError
from xclab.matchgen import enumerate_perfect_matchings, perfect_matching_polytope
from xclab.polytope import Rectangle, slack_matrix
from xclab.sepmeasure import (
    CutMatchingGround,
    MatchingCutInstance,
    biased_indices,
    canonical_rectangle,
    mu,
    perfect_matching_count,
    q_class_size,
    q_class_total,
    rectangle_w_value,
    weight_matrix,
    weight_values,
    ws_inner_product,
    ws_inner_product_materialized,
)


def brute_class_sizes(n, t):
    sizes = {}
    pms = enumerate_perfect_matchings(n)
    for cut in combinations(range(n), t):
        inside = set(cut)
        for pm in pms:
            ell = sum(1 for a, b in pm if (a in inside) != (b in inside))
            sizes[ell] = sizes.get(ell, 0) + 1
    return sizes


@pytest.fixture(scope="module")
def ground63():
    return CutMatchingGround.build(6, 3)


@pytest.fixture(scope="module")
def ground105():
    return CutMatchingGround.build(10, 5)


# ---------------------------------------------------------------------------
# Class sizes

def test_perfect_matching_count():
    assert [perfect_matching_count(n) for n in (0, 2, 4, 6, 8, 10)] == [
        1, 1, 3, 15, 105, 945,
    ]
    assert perfect_matching_count(5) == 0
    assert perfect_matching_count(-2) == 0


def test_q_class_size_validation():
    with pytest.raises(InputError):
        q_class_size(5, 3, 1)
    with pytest.raises(InputError):
        q_class_size(6, 2, 1)
    with pytest.raises(InputError):
        q_class_size(6, 7, 1)
    with pytest.raises(InputError):
        q_class_size(6, 3, -1)


def test_q_class_size_even_is_zero():
    for ell in (0, 2, 4, 6):
        assert q_class_size(10, 5, ell) == 0


@pytest.mark.parametrize("n", [4, 6, 8])
def test_q_class_size_matches_brute_force(n):
    for t in range(1, n, 2):
        brute = brute_class_sizes(n, t)
        for ell in range(0, n + 1):
            assert q_class_size(n, t, ell) == brute.get(ell, 0), (t, ell)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
def test_q_class_sizes_sum_to_ground_total(n):
    for t in range(1, n, 2):
        total = sum(q_class_size(n, t, ell) for ell in range(1, t + 1, 2))
        assert total == q_class_total(n, t)


def test_frozen_sizes_6_3():
    assert q_class_size(6, 3, 1) == 180
    assert q_class_size(6, 3, 3) == 120
    assert q_class_total(6, 3) == 300


def test_frozen_sizes_10_5():
    assert q_class_size(10, 5, 1) == 56700
    assert q_class_size(10, 5, 3) == 151200
    assert q_class_size(10, 5, 5) == 30240
    assert q_class_total(10, 5) == 238140


# ---------------------------------------------------------------------------
# Parameter scheme

def test_instance_from_mk():
    inst = MatchingCutInstance.from_mk(1, 5)
    assert (inst.n, inst.t) == (16, 5)
    inst = MatchingCutInstance.from_mk(3, 5)
    assert (inst.n, inst.t) == (28, 7)
    inst = MatchingCutInstance.from_mk(1, 7)
    assert (inst.n, inst.t) == (26, 7)
    assert inst.t % 2 == 1


def test_instance_validation():
    with pytest.raises(InputError):
        MatchingCutInstance.from_mk(2, 5)
    with pytest.raises(InputError):
        MatchingCutInstance.from_mk(1, 4)
    with pytest.raises(InputError):
        MatchingCutInstance.from_mk(1, 3)
    with pytest.raises(InputError):
        MatchingCutInstance(1, 5, 16, 7)
    with pytest.raises(InputError):
        MatchingCutInstance(1, 5, 18, 5)


# ---------------------------------------------------------------------------
# Materialized grounds

def test_ground_shape_and_counts(ground63):
    assert ground63.n_cuts == 20
    assert ground63.n_matchings == 15
    assert ground63.class_counts() == {1: 180, 3: 120}


def test_ground_counts_match_closed_form(ground105):
    assert ground105.class_counts() == {1: 56700, 3: 151200, 5: 30240}


def test_ground_parity(ground63, ground105):
    for g in (ground63, ground105):
        for ell in g.class_counts():
            assert ell % 2 == 1


def test_ground_cap():
    with pytest.raises(InputError, match="cap"):
        CutMatchingGround.build(10, 5, cap=1000)


def test_ground_validation():
    with pytest.raises(InputError):
        CutMatchingGround.build(7, 3)
    with pytest.raises(InputError):
        CutMatchingGround.build(6, 4)


def test_ground_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("XCLAB_CACHE_DIR", str(tmp_path))
    first = CutMatchingGround.build(6, 3)
    cache = tmp_path / "ground-n6-t3.txt"
    assert cache.exists()
    again = CutMatchingGround.build(6, 3)
    assert again._table == first._table
    assert again.class_counts() == {1: 180, 3: 120}


def test_ground_cache_ignores_corrupt_file(tmp_path, monkeypatch):
    monkeypatch.setenv("XCLAB_CACHE_DIR", str(tmp_path))
    (tmp_path / "ground-n6-t3.txt").write_text("not a table\n")
    g = CutMatchingGround.build(6, 3)
    assert g.class_counts() == {1: 180, 3: 120}


def test_ground_slack_matches_polytope_rows(ground63):
    """A proper odd-set row of the polytope and the two complementary
    ground cuts all carry slack = crossing count minus one."""
    poly = perfect_matching_polytope(6)
    s = slack_matrix(poly, row_filter=lambda lab: lab.startswith("oddset:"))
    cut_index = {cut: i for i, cut in enumerate(ground63.cuts)}
    checked = 0
    for r, label in enumerate(s.row_labels):
        body = label.split(":", 1)[1]
        cut = tuple(int(x) for x in body.split(","))
        comp = tuple(v for v in range(6) if v not in cut)
        for g_row in (cut_index[cut], cut_index[comp]):
            for j in range(ground63.n_matchings):
                assert s.matrix.entry(r, j) == ground63.ell(g_row, j) - 1
        checked += 1
    assert checked == 10


# ---------------------------------------------------------------------------
# Weights and the inner product

def test_weight_values():
    vals = weight_values(10, 5, 5)
    assert vals[1] is FORBIDDEN
    assert vals[3] == Fraction(1, 151200)
    assert vals[5] == Fraction(-1, 4 * 30240)


def test_weight_values_validation():
    with pytest.raises(InputError, match="Q_5"):
        weight_values(6, 3, 5)
    with pytest.raises(InputError, match="Q_7"):
        weight_values(10, 5, 7)
    with pytest.raises(InputError):
        weight_values(10, 5, 4)
    with pytest.raises(InputError):
        weight_values(10, 5, 3)


def test_ws_inner_product_counting():
    assert ws_inner_product(10, 5, 5) == 1
    assert ws_inner_product(16, 5, 5) == 1
    inst = MatchingCutInstance.from_mk(3, 5)
    assert ws_inner_product(inst.n, inst.t, inst.k) == 1


def test_ws_inner_product_materialized(ground105):
    assert ws_inner_product_materialized(ground105, 5) == 1
    assert ws_inner_product(10, 5, 5) == ws_inner_product_materialized(ground105, 5)


def test_weight_matrix_entries(ground63, ground105):
    w = weight_matrix(ground105, 5)
    assert w.nrows == 252 and w.ncols == 945
    i, j = 0, 0
    seen = set()
    for i in range(3):
        for j in range(ground105.n_matchings):
            ell = ground105.ell(i, j)
            expected = weight_values(10, 5, 5).get(ell, Fraction(0))
            assert w.entry(i, j) == expected or (
                expected is FORBIDDEN and w.entry(i, j) is FORBIDDEN
            )
            seen.add(ell)
    assert 1 in seen
    with pytest.raises(InputError, match="Q_5"):
        weight_matrix(ground63, 5)


# ---------------------------------------------------------------------------
# Rectangle measures

def test_mu_full_ground(ground63):
    full = Rectangle.of(range(20), range(15))
    assert mu(ground63, full, 1) == 1
    assert mu(ground63, full, 3) == 1
    with pytest.raises(InputError, match="Q_5"):
        mu(ground63, full, 5)
    with pytest.raises(InputError, match="Q_2"):
        mu(ground63, full, 2)


def test_mu_single_cut(ground63):
    rect = Rectangle.of([0], range(15))
    assert mu(ground63, rect, 1) == Fraction(9, 180)
    assert mu(ground63, rect, 3) == Fraction(6, 120)


def test_canonical_rectangle(ground63):
    rect = canonical_rectangle(ground63, (0, 1), (2, 3))
    assert len(rect.rows) == 8
    assert len(rect.cols) == 1
    (j,) = rect.cols
    pm = ground63.matchings[j]
    assert (0, 1) in pm and (2, 3) in pm
    for i in rect.rows:
        inside = set(ground63.cuts[i])
        assert (0 in inside) != (1 in inside)
        assert (2 in inside) != (3 in inside)


def test_canonical_rectangle_validation(ground63):
    with pytest.raises(InputError, match="share"):
        canonical_rectangle(ground63, (0, 1), (1, 2))
    with pytest.raises(InputError):
        canonical_rectangle(ground63, (0, 0), (2, 3))
    with pytest.raises(InputError):
        canonical_rectangle(ground63, (0, 6), (2, 3))


def test_rectangle_w_value_canonical_is_finite(ground105):
    rect = canonical_rectangle(ground105, (0, 1), (2, 3))
    report = rectangle_w_value(ground105, rect, 5)
    assert report.finite
    assert report.q1_hits == 0
    assert report.value == report.mu3 - report.muk / 4
    w = weight_matrix(ground105, 5)
    assert w.rectangle_sum(rect.rows, rect.cols) == report.value


def test_rectangle_w_value_violation(ground105):
    i = 0
    j = next(
        j for j in range(ground105.n_matchings) if ground105.ell(i, j) == 1
    )
    report = rectangle_w_value(ground105, Rectangle.of([i], [j]), 5)
    assert not report.finite
    assert report.value is None
    assert report.q1_hits == 1
    w = weight_matrix(ground105, 5)
    assert w.rectangle_sum([i], [j]) is FORBIDDEN


# ---------------------------------------------------------------------------
# Bias checker

def test_biased_indices_full_product():
    y = [(a, b) for a in (0, 1) for b in (0, 1)]
    assert biased_indices(y, [(0, 1), (0, 1)], 0) == ()


def test_biased_indices_fixed_coordinate():
    y = [(0, b, c) for b in (0, 1) for c in (0, 1)]
    doms = [(0, 1)] * 3
    assert biased_indices(y, doms, Fraction(1, 2)) == (0,)
    assert biased_indices(y, doms, 100) == (0,)


def test_biased_indices_mixed_domains():
    y = [(a, b) for a in (0, 1) for b in ("x", "y", "z")]
    assert biased_indices(y, [(0, 1), ("x", "y", "z")], 0) == ()


def test_biased_indices_skew_threshold():
    y = [(0,)] * 3 + [(1,)] * 2
    dom = [(0, 1)]
    assert biased_indices(y, dom, Fraction(1, 2)) == ()
    assert biased_indices(y, dom, Fraction(1, 10)) == (0,)
    assert biased_indices(y, dom, "1/10") == (0,)


def test_biased_indices_validation():
    with pytest.raises(InputError, match="nonempty"):
        biased_indices([], [(0, 1)], 0)
    with pytest.raises(InputError, match="width"):
        biased_indices([(0, 1)], [(0, 1)], 0)
    with pytest.raises(InputError, match="outside"):
        biased_indices([(2,)], [(0, 1)], 0)
    with pytest.raises(InputError, match="repeat"):
        biased_indices([(0,)], [(0, 0)], 0)
    with pytest.raises(InputError, match="nonnegative"):
        biased_indices([(0,)], [(0, 1)], -1)
