import itertools
import random
from fractions import Fraction

import pytest

from modelsets.errors import RefusalError
from modelsets.groups import Subgroup, cyclic_product, euclidean, sample_haar, torus
from modelsets.window import (
    CylinderWindow,
    FiniteWindow,
    IntervalWindow,
    as_finite,
    cylinder_window,
    empty_window,
    finite_window,
    half_open_window,
    interval_window,
    point_window,
)


def brute_periods(window):
    """Exhaustive period group of a finite-group window."""
    g = window.group
    members = [h for h in g.elements() if window.translate(h).same_set(window)]
    return frozenset(members)


# -- finite subsets ---------------------------------------------------------


def test_finite_window_measure_and_contains():
    g = cyclic_product([4])
    w = finite_window(g, [(0,), (2,)])
    assert w.measure() == Fraction(1, 2)
    assert w.contains((0,)) and w.contains((2,))
    assert not w.contains((1,))
    assert w.kind == "finite-subset"


def test_finite_window_translate_and_overlap():
    g = cyclic_product([4])
    w = finite_window(g, [(0,), (1,)])
    assert set(w.translate((1,)).elements) == {(1,), (2,)}
    assert w.overlap_measure((1,)) == Fraction(1, 4)  # {0,1} cap {1,2} = {1}
    assert w.overlap_measure((2,)) == Fraction(0)
    assert w.symdiff_measure((1,)) == Fraction(1, 2)
    assert w.symdiff_measure((0,)) == Fraction(0)


def test_finite_window_periods_examples():
    g = cyclic_product([4])
    assert set(finite_window(g, [(0,), (2,)]).periods().elements()) == {(0,), (2,)}
    assert set(finite_window(g, [(0,), (1,)]).periods().elements()) == {(0,)}
    assert finite_window(g, []).periods().is_full()
    assert finite_window(g, g.elements()).periods().is_full()


def test_finite_window_periods_exhaustive_small_groups():
    for moduli in ([6], [2, 3], [2, 2, 2], [8], [2, 4]):
        g = cyclic_product(moduli)
        elems = list(g.elements())
        for mask in range(1 << g.order):
            w = FiniteWindow(g, frozenset(e for i, e in enumerate(elems) if mask >> i & 1))
            assert set(w.periods().elements()) == brute_periods(w)


def test_finite_window_haar_equals_set_periods():
    # counting measure has no null sets, so the two period notions coincide
    rng = random.Random(3)
    g = cyclic_product([3, 4])
    elems = list(g.elements())
    for _ in range(50):
        w = FiniteWindow(g, frozenset(e for e in elems if rng.random() < 0.5))
        assert w.haar_periods().same(w.periods())
        assert w.regularize() is w
        interior, closure, boundary = w.topo_parts()
        assert interior.same_set(w) and closure.same_set(w) and boundary.is_empty()


def test_finite_window_periods_translation_invariant():
    g = cyclic_product([12])
    w = finite_window(g, [(0,), (3,), (6,), (9,), (1,)])
    base = set(w.periods().elements())
    for h in g.elements():
        assert set(w.translate(h).periods().elements()) == base


def test_finite_window_canonicalizes_and_rejects_bad_arity():
    g = cyclic_product([4])
    assert finite_window(g, [(4,), (-1,)]).elements == frozenset({(0,), (3,)})
    with pytest.raises(ValueError):
        finite_window(g, [(0, 0)])


# -- cylinder predicates ----------------------------------------------------


def test_cylinder_measure_and_membership():
    g = cyclic_product([2, 3])
    w = cylinder_window(g, [{0}, {0}])
    assert w.measure() == Fraction(1, 2) * Fraction(2, 3)
    assert w.contains((1, 1))
    assert not w.contains((0, 1))
    assert not w.contains((1, 0))
    assert not w.is_empty()


def test_cylinder_rejects_full_forbidden_coordinate():
    g = cyclic_product([2, 3])
    with pytest.raises(ValueError):
        cylinder_window(g, [{0, 1}, {0}])


def test_cylinder_matches_materialized_form():
    g = cyclic_product([4, 3])
    w = cylinder_window(g, [{0, 2}, {1}])
    fin = as_finite(w)
    assert fin.measure() == w.measure()
    for h in g.elements():
        assert w.contains(h) == fin.contains(h)
        assert w.overlap_measure(h) == fin.overlap_measure(h)
    assert w.periods().same(fin.periods())
    assert w.haar_periods().same(fin.haar_periods())
    assert w.same_set(fin)


def test_cylinder_periods_are_stabilizer_products():
    g = cyclic_product([4, 2])
    w = cylinder_window(g, [{0, 2}, {0}])
    # {0,2} is stabilized by shifts {0,2} mod 4; {0} only by 0 mod 2
    assert set(w.periods().elements()) == {(0, 0), (2, 0)}


def test_cylinder_random_periods_against_brute_force():
    rng = random.Random(9)
    for _ in range(40):
        moduli = [rng.randint(2, 5) for _ in range(rng.randint(1, 3))]
        g = cyclic_product(moduli)
        forb = [frozenset(rng.sample(range(b), rng.randint(0, b - 1))) for b in moduli]
        w = CylinderWindow(g, tuple(forb))
        assert set(w.periods().elements()) == brute_periods(w)
        assert w.haar_periods().same(w.periods())


def test_cylinder_translate_matches_membership_shift():
    g = cyclic_product([5])
    w = cylinder_window(g, [{0, 1}])
    t = w.translate((2,))
    for h in g.elements():
        assert t.contains(h) == w.contains(g.sub(h, (2,)))


# -- interval unions on the torus -------------------------------------------


def tw(*pieces):
    return interval_window(torus(1), pieces)


def test_interval_canonicalization_wraps_and_merges():
    w = tw((0.9, 1.1, True, False))
    assert w.pieces == ((0.0, pytest.approx(0.1), True, False), (0.9, 1.0, True, False))
    merged = tw((0.1, 0.3, True, False), (0.3, 0.5, True, False))
    assert merged.pieces == ((0.1, 0.5, True, False),)
    assert tw((0.2, 0.2, True, True)).pieces == ((0.2, 0.2, True, True),)
    assert tw((0.2, 0.2, True, False)).is_empty()


def test_interval_full_circle_forms():
    assert tw((0.0, 1.0, True, False)).is_full_circle()
    assert tw((0.25, 1.25, True, False)).is_full_circle()
    assert tw((0.0, 0.6, True, True), (0.6, 1.0, True, True)).is_full_circle()
    assert not tw((0.0, 0.6, True, False), (0.6, 1.0, False, False)).is_full_circle()
    assert tw((0.0, 1.0, True, False)).measure() == pytest.approx(1.0)


def test_interval_measure_and_contains_flags():
    w = tw((0.1, 0.3, True, False), (0.5, 0.6, False, True))
    assert w.measure() == pytest.approx(0.3)
    assert w.contains(0.1)
    assert not w.contains(0.3)
    assert not w.contains(0.5)
    assert w.contains(0.6)
    assert w.contains((0.2,))
    assert not w.contains(0.45)


def test_interval_contains_wraps_at_seam():
    w = tw((0.95, 1.05, True, True))
    assert w.contains(0.97)
    assert w.contains(0.03)
    assert w.contains(0.0)
    assert w.contains(1.0)  # same point as 0.0 on the circle
    assert not w.contains(0.5)


def test_interval_translate_and_overlap():
    w = tw((0.0, 0.25, True, False))
    t = w.translate((0.5,))
    assert t.pieces == ((0.5, 0.75, True, False),)
    assert w.overlap_measure((0.1,)) == pytest.approx(0.15)
    assert w.overlap_measure((0.5,)) == pytest.approx(0.0)
    assert w.symdiff_measure((0.1,)) == pytest.approx(0.2)
    back = t.translate((-0.5,))
    assert back.same_set(w)


def test_interval_overlap_respects_wrap():
    w = tw((0.9, 1.1, True, False))
    assert w.overlap_measure((0.05,)) == pytest.approx(0.15)


def test_interval_intersection():
    a = tw((0.0, 0.5, True, True))
    b = tw((0.25, 0.75, True, True))
    inter = a.intersection(b)
    assert inter.pieces == ((0.25, 0.5, True, True),)
    # touching at a single shared closed endpoint leaves a point piece
    c = tw((0.5, 0.8, True, False))
    point = a.intersection(c)
    assert point.measure() == pytest.approx(0.0)
    assert point.contains(0.5)
    # open endpoints kill the shared point
    d = tw((0.5, 0.8, False, False))
    assert a.intersection(d).is_empty()


def test_interval_regularize_drops_null_parts_and_closes():
    w = tw((0.0, 0.25, True, False), (0.4, 0.4, True, True))
    r = w.regularize()
    assert r.pieces == ((0.0, 0.25, True, True),)
    assert r.regularize().same_set(r)
    assert not w.same_set(r)


def test_interval_topo_parts():
    w = tw((0.1, 0.3, True, False), (0.5, 0.5, True, True))
    interior, closure, boundary = w.topo_parts()
    assert interior.pieces == ((0.1, 0.3, False, False),)
    assert closure.pieces == ((0.1, 0.3, True, True), (0.5, 0.5, True, True))
    assert {lo for lo, hi, _, _ in boundary.pieces} == {0.1, 0.3, 0.5}
    assert boundary.measure() == pytest.approx(0.0)
    full = tw((0.0, 1.0, True, False))
    fi, fc, fb = full.topo_parts()
    assert fi.is_full_circle() and fc.is_full_circle() and fb.is_empty()


def test_interval_topo_parts_glue_seam_arc():
    # [0.9, 1.0) u [0, 0.1] is a single arc; its boundary is two points
    w = tw((0.9, 1.1, True, True))
    interior, closure, boundary = w.topo_parts()
    assert interior.measure() == pytest.approx(0.2)
    assert not interior.contains(0.9)
    assert not interior.contains(0.1)
    assert interior.contains(0.0)
    assert len(boundary.pieces) == 2
    assert closure.contains(0.9) and closure.contains(0.1)


def test_interval_periods_rotational_symmetry():
    w = tw((0.0, 0.2, True, False), (0.5, 0.7, True, False))
    members = {h[0] for h in w.periods().elements()}
    assert members == {0.0, 0.5}
    asym = tw((0.0, 0.2, True, False), (0.5, 0.6, True, False))
    assert {h[0] for h in asym.periods().elements()} == {0.0}
    third = tw((0.0, 0.1, True, False), (1 / 3, 1 / 3 + 0.1, True, False),
               (2 / 3, 2 / 3 + 0.1, True, False))
    got = sorted(h[0] for h in third.periods().elements())
    assert got == pytest.approx([0.0, 1 / 3, 2 / 3])


def test_interval_periods_grid_oracle():
    # windows with endpoints on a q-grid: periods must match a full scan of
    # the grid rotations, and nothing off the grid can be a period
    rng = random.Random(21)
    q = 8
    for _ in range(30):
        spans = []
        for k in range(q):
            if rng.random() < 0.4:
                spans.append((k / q, (k + 1) / q))
        w = half_open_window(torus(1), spans)
        if w.is_empty() or w.is_full_circle():
            assert w.periods().is_full()
            continue
        got = {h[0] for h in w.periods().elements()}
        want = {k / q for k in range(q) if w.translate((k / q,)).same_set(w)}
        assert got == pytest.approx(sorted(want)) or got == want


def test_interval_haar_periods_ignore_null_differences():
    w = tw((0.0, 0.2, True, False), (0.5, 0.7, True, False), (0.35, 0.35, True, True))
    assert {h[0] for h in w.periods().elements()} == {0.0}
    haar = {h[0] for h in w.haar_periods().elements()}
    assert haar == {0.0, 0.5}
    reg = w.regularize()
    assert {h[0] for h in reg.periods().elements()} == {0.0, 0.5}
    assert w.haar_periods().same(reg.periods())


def test_interval_empty_and_full_period_groups():
    assert tw().periods().is_full_marker
    assert tw((0.2, 1.2, True, False)).periods().is_full_marker
    assert point_window(torus(1), [0.3]).haar_periods().is_full_marker


def test_interval_bounds_and_as_finite_refusals():
    with pytest.raises(RefusalError):
        tw().bounds()
    with pytest.raises(RefusalError):
        as_finite(tw((0.0, 0.5, True, False)))


def test_interval_same_set_is_flag_sensitive_only_on_positive_length():
    a = tw((0.1, 0.2, True, False))
    b = tw((0.1, 0.2, True, True))
    assert not a.same_set(b)
    p = point_window(torus(1), [0.4])
    q = tw((0.4, 0.4, True, True))
    assert p.same_set(q)


def test_interval_random_haar_identity():
    # the two period routes agree through regularization on random unions
    rng = random.Random(17)
    for _ in range(60):
        pieces = []
        for _ in range(rng.randint(1, 4)):
            lo = rng.randrange(12) / 12
            hi = lo + rng.randrange(1, 4) / 12
            pieces.append((lo, hi, bool(rng.getrandbits(1)), bool(rng.getrandbits(1))))
        if rng.random() < 0.5:
            pieces.append((rng.randrange(12) / 12,) * 2 + (True, True))
        w = interval_window(torus(1), pieces)
        assert w.haar_periods().same(w.regularize().periods())


# -- interval unions on the line --------------------------------------------


def test_euclidean_interval_windows():
    e = euclidean(1)
    w = interval_window(e, [(-1.5, 2.0, True, True)])
    assert w.measure() == pytest.approx(3.5)
    assert w.contains(-1.5) and w.contains(0.0) and not w.contains(2.5)
    assert w.bounds() == (-1.5, 2.0)
    assert w.periods().is_trivial()
    assert w.haar_periods().is_trivial()
    assert empty_window(e).periods().is_full_marker
    assert point_window(e, [0.0]).haar_periods().is_full_marker
    t = w.translate(3.0)
    assert t.bounds() == (pytest.approx(1.5), pytest.approx(5.0))
    assert w.overlap_measure(1.0) == pytest.approx(2.5)


def test_euclidean_pieces_do_not_wrap():
    e = euclidean(1)
    w = interval_window(e, [(0.9, 1.1, True, False)])
    assert w.pieces == ((0.9, 1.1, True, False),)


# -- constructors and cross-representation checks ---------------------------


def test_constructor_helpers():
    g = cyclic_product([4])
    assert empty_window(g).is_empty()
    assert empty_window(torus(1)).is_empty()
    w = half_open_window(torus(1), [(0.0, 0.3)])
    assert w.pieces == ((0.0, 0.3, True, False),)
    p = point_window(torus(1), [0.1, 0.7])
    assert p.measure() == pytest.approx(0.0)
    assert p.contains(0.7)


def test_interval_rejects_wrong_group():
    with pytest.raises(ValueError):
        interval_window(cyclic_product([2]), [(0.0, 0.5, True, False)])
    with pytest.raises(ValueError):
        finite_window(torus(1), [(0.5,)])


def test_negative_length_piece_rejected():
    with pytest.raises(ValueError):
        tw((0.5, 0.2, True, True))


def test_window_membership_consistent_with_haar_sampling():
    # measure approximates the hit rate of Haar samples, all representations
    g = cyclic_product([4, 3])
    w = cylinder_window(g, [{0}, {2}])
    pts = sample_haar(g, 4000, seed=13)
    rate = sum(w.contains(p) for p in pts) / len(pts)
    assert abs(rate - float(w.measure())) < 0.05
    t = torus(1)
    iw = tw((0.2, 0.55, True, False))
    tpts = sample_haar(t, 4000, seed=14)
    trate = sum(iw.contains(p) for p in tpts) / len(tpts)
    assert abs(trate - iw.measure()) < 0.05
