"""Hermitian curve geometry: points, fibers, valuations, function bases."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from hermipir.curve import (
    INFINITY,
    CurveFunction,
    basis_csv,
    build_h,
    curve_for_q,
    info_basis,
    interpolation_basis,
    interpolation_labels,
    one_point_basis,
    one_point_monomials,
    points_csv,
    two_point_monomial_set,
    two_point_monomials,
)
from hermipir.linalg import rank


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_point_count_and_membership(q):
    c = curve_for_q(q)
    pts = c.enumerate_points()
    assert len(pts) == q**3 + 1
    assert pts[-1] == INFINITY
    assert len(set(pts)) == q**3 + 1
    for x, y in pts[:-1]:
        assert c.on_curve(x, y)
    assert (0, 0) in pts[:-1]


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_fibers(q):
    c = curve_for_q(q)
    seen = Counter()
    for x in c.field.elements():
        fib = c.fiber_of_x(x)
        assert len(fib) == q
        assert list(fib) == sorted(fib)
        for y in fib:
            assert c.on_curve(x, y)
        seen[len(fib)] += 1
    assert seen == {q: q**2}
    # the origin is on the fiber over 0 and y=0 appears nowhere else
    assert 0 in c.fiber_of_x(0)
    for x in c.field.elements():
        if x != 0:
            assert 0 not in c.fiber_of_x(x)


def test_enumeration_deterministic():
    a = curve_for_q(3).enumerate_points()
    b = curve_for_q(3).enumerate_points()
    assert a == b


def test_evaluate_is_ring_homomorphism():
    c = curve_for_q(3)
    f = c.field
    rng = np.random.default_rng(77)
    pts = [p for p in c.affine_points() if p != (0, 0)][:25]
    for _ in range(100):
        terms1 = {(int(rng.integers(0, 5)), int(rng.integers(0, 2 * c.q))): int(rng.integers(1, f.order)) for _ in range(3)}
        terms2 = {(int(rng.integers(0, 5)), int(rng.integers(0, 2 * c.q))): int(rng.integers(1, f.order)) for _ in range(3)}
        f1, f2 = CurveFunction(c, terms1), CurveFunction(c, terms2)
        if f1.is_zero() or f2.is_zero():
            continue
        prod = f1 * f2
        total = f1 + f2
        v1, v2 = f1.evaluate_many(pts), f2.evaluate_many(pts)
        assert (prod.evaluate_many(pts) == f.mul_arr(v1, v2)).all()
        assert (total.evaluate_many(pts) == f.add_arr(v1, v2)).all()


def test_curve_relation_collapses_under_reduction():
    # y^q + y - x^(q+1) is the zero function on the curve
    c = curve_for_q(4)
    rel = {(0, 4): 1, (0, 1): 1, (5, 0): c.field.neg(1)}
    assert c.reduce_poly(rel) == {}


def test_evaluate_rejects_infinity_and_poles():
    c = curve_for_q(3)
    fn = c.monomial_function(1, 0)
    with pytest.raises(ValueError, match="infinity"):
        fn.evaluate(INFINITY)
    h = build_h(c, [1, 2])
    data_pt = (1, c.fiber_of_x(1)[0])
    with pytest.raises(ValueError, match="pole"):
        h.evaluate(data_pt)


def test_basic_valuations():
    c = curve_for_q(5)
    assert c.monomial_function(1, 0).valuation_at_infinity() == -5
    assert c.monomial_function(0, 1).valuation_at_infinity() == -6
    assert c.monomial_function(0, 1).valuation_at_origin() == 6
    assert c.monomial_function(1, 0).valuation_at_origin() == 1
    assert c.monomial_function(2, 3).valuation_at_infinity() == -(2 * 5 + 3 * 6)
    # x - alpha has the same infinity pole order as x
    assert CurveFunction(c, c.linear_factor(7)).valuation_at_infinity() == -5
    with pytest.raises(ValueError):
        CurveFunction(c, {}).valuation_at_infinity()


def test_one_point_monomial_counts():
    assert len(one_point_monomials(5, 26)) == 17
    assert one_point_monomials(5, 5) == [(0, 0), (1, 0)]
    assert one_point_monomials(2, 3) == [(0, 0), (1, 0), (0, 1)]
    # ordering is by pole order, and pole orders are pairwise distinct
    for q, m in [(3, 11), (4, 17), (5, 26)]:
        orders = [q * i + (q + 1) * j for i, j in one_point_monomials(q, m)]
        assert orders == sorted(orders)
        assert len(set(orders)) == len(orders)
        genus = q * (q - 1) // 2
        if m > 2 * genus - 2:
            assert len(orders) == m - genus + 1


def test_one_point_basis_evaluates_independently():
    c = curve_for_q(4)
    fns = one_point_basis(c, 9)
    pts = [p for p in c.affine_points() if p != (0, 0)]
    m = np.stack([fn.evaluate_many(pts) for fn in fns], axis=1)
    assert rank(c.field, m) == len(fns)


def test_two_point_monomial_set_against_lattice_count():
    c = curve_for_q(5)
    fns, complete = two_point_monomial_set(c, 45, 24)
    assert complete
    assert len(fns) == 60
    profile = Counter(max(ij for ij in fn.num)[0] if fn.den == {(0, 0): 1} else None for fn in fns)
    mons = two_point_monomials(5, 45, 24)
    by_i = Counter(i for i, _ in mons)
    assert [by_i[i] for i in range(6)] == [12, 11, 10, 10, 9, 8]
    orders = [5 * i + 6 * j for i, j in mons]
    assert orders == sorted(orders) and len(set(orders)) == len(orders)


def test_two_point_trivial_bounds():
    c = curve_for_q(5)
    fns, complete = two_point_monomial_set(c, 0, 0)
    assert len(fns) == 1
    assert fns[0].num == {(0, 0): 1} and fns[0].den == {(0, 0): 1}
    assert not complete  # degree 0 is below the Riemann-Roch threshold 2g-1


def test_two_point_negative_powers_evaluate():
    c = curve_for_q(3)
    fn = c.monomial_function(1, -1)  # x / y
    pts = [p for p in c.affine_points() if p != (0, 0)][:10]
    vals = fn.evaluate_many(pts)
    f = c.field
    for (x, y), v in zip(pts, vals):
        assert int(v) == f.mul(x, f.inv(y))
    assert fn.valuation_at_infinity() == -3 + 4
    assert fn.valuation_at_origin() == 1 - 4


def test_build_h_poles_and_zero_at_infinity():
    c = curve_for_q(5)
    alphas = [1, 2, 3]
    h = build_h(c, alphas)
    assert h.valuation_at_infinity() == 3 * 5
    data = [(a, y) for a in alphas for y in c.fiber_of_x(a)]
    for p in data:
        with pytest.raises(ValueError, match="pole"):
            h.evaluate(p)
    others = [p for p in c.affine_points() if p[0] not in alphas]
    assert (h.evaluate_many(others) != 0).all()


def test_build_h_rejects_bad_alphas():
    c = curve_for_q(5)
    with pytest.raises(ValueError, match="distinct"):
        build_h(c, [1, 1])
    with pytest.raises(ValueError, match="avoid 0"):
        build_h(c, [0, 1])


def test_interpolation_labels_structure():
    # the truncated z-major listing always ends exactly at a row boundary
    for q, m in [(3, 2), (3, 3), (4, 3), (4, 4), (5, 3), (5, 5), (5, 7)]:
        genus = q * (q - 1) // 2
        labels = interpolation_labels(q, m)
        assert len(labels) == m * q - genus
        assert labels == sorted(labels, key=lambda zi: (zi[0], zi[1]))
        rows = Counter(z for z, _ in labels)
        for z, count in rows.items():
            assert count == m - z + 1
        assert max(rows) == min(2 * m - q + 1, q)


def test_interpolation_basis_valuation_identity():
    c = curve_for_q(5)
    alphas = [1, 2, 3, 4, 5]
    fns = interpolation_basis(c, 5, alphas)
    for (z, _), fn in zip(interpolation_labels(5, 5), fns):
        assert fn.valuation_at_infinity() == -((5 - z) * 5 + (z - 1) * 6)
    # anchor: z = 2 gives pole order 21
    z2 = interpolation_labels(5, 5).index((2, 1))
    assert fns[z2].valuation_at_infinity() == -21


@pytest.mark.parametrize("q,m", [(3, 2), (3, 3), (4, 3), (4, 4), (5, 3), (5, 5), (5, 7)])
def test_interpolation_basis_size_and_rank(q, m):
    c = curve_for_q(q)
    genus = q * (q - 1) // 2
    alphas = list(range(1, m + 1))
    fns = interpolation_basis(c, m, alphas)
    frag_count = m * q - genus
    assert len(fns) == frag_count
    data = [(a, y) for a in alphas for y in c.fiber_of_x(a)]
    assert len(data) == m * q
    mat = np.stack([fn.evaluate_many(data) for fn in fns], axis=1)
    assert rank(c.field, mat) == frag_count


def test_interpolation_basis_requires_enough_alphas():
    c = curve_for_q(5)
    with pytest.raises(ValueError, match="at least"):
        interpolation_basis(c, 2, [1, 2])
    with pytest.raises(ValueError, match="alpha count"):
        interpolation_basis(c, 5, [1, 2, 3])


def test_per_fiber_vandermonde_invertible():
    # powers 1, y, ..., y^(q-1) on a fiber form an invertible q x q matrix
    for q in [3, 4, 5]:
        c = curve_for_q(q)
        for alpha in [1, 2]:
            fib = c.fiber_of_x(alpha)
            v = np.ones((q, q), dtype=np.int64)
            ys = np.array(fib, dtype=np.int64)
            for k in range(1, q):
                v[:, k] = c.field.mul_arr(v[:, k - 1], ys)
            assert rank(c.field, v) == q


@pytest.mark.parametrize("q,m", [(4, 4), (5, 5), (5, 7)])
def test_info_basis_matches_h_times_interpolation(q, m):
    c = curve_for_q(q)
    alphas = list(range(1, m + 1))
    h = build_h(c, alphas)
    interp = interpolation_basis(c, m, alphas)
    info = info_basis(c, m, alphas)
    alpha_set = set(alphas)
    eval_pts = [p for p in c.affine_points() if p[0] not in alpha_set and p != (0, 0)][:40]
    f = c.field
    for fn_i, fn_b in zip(info, interp):
        lhs = fn_i.evaluate_many(eval_pts)
        rhs = f.mul_arr(h.evaluate_many(eval_pts), fn_b.evaluate_many(eval_pts))
        assert (lhs == rhs).all()


def test_info_basis_shape_and_valuations():
    c = curve_for_q(5)
    alphas = [1, 2, 3, 4, 5]
    fns = info_basis(c, 5, alphas)
    labels = interpolation_labels(5, 5)
    for (z, i), fn in zip(labels, fns):
        # denominator carries exactly z linear factors: x-degree z, y-degree 0
        assert max(ij[0] for ij in fn.den) == z
        assert all(ij[1] == 0 for ij in fn.den)
        assert fn.valuation_at_infinity() == 5 - z + 1
        assert fn.valuation_at_origin() == (z - 1) * 6
        # no pole at infinity and none at the origin
        assert fn.valuation_at_infinity() >= 0
        # poles confined to data fibers: evaluates everywhere else
        alpha_set = set(alphas)
        good = [p for p in c.affine_points() if p[0] not in alpha_set]
        fn.evaluate_many(good)


def test_points_csv_round_trip():
    import csv
    import io

    c = curve_for_q(3)
    text = points_csv(c)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x", "y"]
    assert len(rows) == 3**3 + 2
    assert rows[-1] == ["infinity", "infinity"]
    f = c.field
    parsed = [(f.element_from_str(r[0]), f.element_from_str(r[1])) for r in rows[1:-1]]
    assert parsed == c.affine_points()


def test_basis_csv_layout():
    c = curve_for_q(5)
    text = basis_csv(c, 5, [1, 2, 3, 4, 5])
    lines = text.strip().split("\n")
    assert lines[0] == "z,i,numerator,denominator"
    assert len(lines) == 16
    assert lines[1].startswith("1,1,")
    assert "y" in lines[-1]  # z = 5 row carries y^4 upstairs
