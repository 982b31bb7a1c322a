import itertools
import math
import random
from fractions import Fraction

import pytest

from modelsets.errors import RefusalError
from modelsets.groups import Subgroup, cyclic_product, euclidean, torus
from modelsets.quotient import (
    MefDescriptor,
    _smith_with_left,
    mef_descriptor,
    quotient_scheme,
    quotient_window,
    verify_projection_identity,
)
from modelsets.scheme import PHYSICAL_R, PHYSICAL_Z, Region, build_scheme
from modelsets.window import (
    FiniteWindow,
    finite_window,
    interval_window,
    point_window,
)

PHI = (1.0 + math.sqrt(5.0)) / 2.0
BETA = 1.0 / PHI


def exact_det(rows):
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    for c in range(n):
        out *= a[c][c]
    return sign * out


def minors_gcd(rows, k):
    m, n = len(rows), len(rows[0])
    g = 0
    for ri in itertools.combinations(range(m), k):
        for ci in itertools.combinations(range(n), k):
            sub = [[rows[i][j] for j in ci] for i in ri]
            g = math.gcd(g, abs(int(exact_det(sub))))
    return g


# -- Smith normal form --------------------------------------------------------


def test_smith_small_examples():
    diag, u = _smith_with_left([[2, 0], [0, 3]])
    assert diag == [1, 6]
    assert abs(int(exact_det(u))) == 1
    diag, _ = _smith_with_left([[1, 0], [0, 1]])
    assert diag == [1, 1]
    diag, _ = _smith_with_left([[0, 0], [0, 0]])
    assert diag == [0, 0]
    diag, _ = _smith_with_left([[-4, 2]])
    assert diag == [2]


def test_smith_random_matches_determinantal_divisors():
    rng = random.Random(5)
    for _ in range(150):
        k = rng.randint(1, 3)
        m = rng.randint(k, 4)
        rows = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(k)]
        diag, u = _smith_with_left([r[:] for r in rows])
        assert abs(int(exact_det(u))) == 1
        nonzero = [d for d in diag if d]
        for a, b in zip(nonzero, nonzero[1:]):
            assert b % a == 0
        assert all(d >= 0 for d in diag)
        prev = 1
        for i, d in enumerate(diag):
            dk = minors_gcd(rows, i + 1)
            assert d == (dk // prev if prev else 0)
            prev = dk
            if prev == 0:
                break


# -- finite quotients ----------------------------------------------------------


def test_quotient_z4_by_period_pair():
    s = build_scheme(PHYSICAL_Z, cyclic_product([4]), star_generator=(1,))
    kernel = Subgroup.from_elements(s.internal, [(0,), (2,)])
    qs = quotient_scheme(s, kernel)
    assert qs.quotient.internal.moduli == (2,)
    assert qs.quotient.star_gen == (1,)
    assert qs.phi((2,)) == (0,)
    assert qs.phi((1,)) == qs.phi((3,)) == (1,)
    w = finite_window(s.internal, [(0,), (2,)])
    qw = quotient_window(qs, w)
    assert qw.elements == frozenset({(0,)})
    for h0 in s.internal.elements():
        res = verify_projection_identity(qs, w, (0, h0), Region(0, 200))
        assert res["match"] and res["first_mismatch"] is None


def test_quotient_z2xz3_by_second_factor():
    s = build_scheme(PHYSICAL_Z, cyclic_product([2, 3]), star_generator=(1, 1))
    kernel = Subgroup.from_elements(s.internal, [(0, 0), (0, 1), (0, 2)])
    qs = quotient_scheme(s, kernel)
    assert qs.quotient.internal.moduli == (2,)
    w = finite_window(s.internal, [(0, 0), (0, 1), (0, 2)])
    res = verify_projection_identity(qs, w, None, Region(0, 100))
    assert res["match"]
    assert res["points"] == 50  # the even integers


def test_quotient_by_full_group_is_trivial():
    s = build_scheme(PHYSICAL_Z, cyclic_product([6]), star_generator=(1,))
    qs = quotient_scheme(s, Subgroup.full(s.internal))
    assert qs.quotient.internal.order == 1
    assert qs.phi((3,)) == ()
    w = finite_window(s.internal, s.internal.elements())
    res = verify_projection_identity(qs, w, None, Region(0, 30))
    assert res["match"] and res["points"] == 30


def test_phi_is_homomorphism_with_kernel_exactly_h0():
    rng = random.Random(23)
    pools = [[6], [12], [2, 3], [4, 3], [2, 9], [5, 4]]
    for moduli in pools:
        g = cyclic_product(moduli)
        gen = (1,) * g.dim
        s = build_scheme(PHYSICAL_Z, g, star_generator=gen)
        elems = list(g.elements())
        for _ in range(6):
            seeds = rng.sample(elems, rng.randint(1, 2))
            kernel = Subgroup.generated(g, seeds)
            qs = quotient_scheme(s, kernel)
            qg = qs.quotient.internal
            zero = qg.zero()
            images = set()
            for h in elems:
                images.add(qs.phi(h))
                assert (qs.phi(h) == zero) == kernel.contains(h)
                for h2 in elems[:6]:
                    assert qs.phi(g.add(h, h2)) == qg.add(qs.phi(h), qs.phi(h2))
            assert len(images) == g.order // kernel.order
            assert images == set(qg.elements())


def test_coset_representatives():
    s = build_scheme(PHYSICAL_Z, cyclic_product([6]), star_generator=(1,))
    kernel = Subgroup.from_elements(s.internal, [(0,), (3,)])
    qs = quotient_scheme(s, kernel)
    assert qs.coset_representative((4,)) == (1,)
    assert qs.coset_representative((1,)) == (1,)
    assert qs.coset_representative((3,)) == (0,)
    for h in s.internal.elements():
        rep = qs.coset_representative(h)
        assert qs.phi(rep) == qs.phi(h)


def test_projection_identity_random_kernels_inside_period_group():
    rng = random.Random(41)
    for moduli in ([6], [12], [2, 3], [8], [3, 5]):
        g = cyclic_product(moduli)
        s = build_scheme(PHYSICAL_Z, g, star_generator=(1,) * g.dim)
        elems = list(g.elements())
        for _ in range(8):
            w = FiniteWindow(g, frozenset(e for e in elems if rng.random() < 0.5))
            if w.is_empty():
                continue
            periods = w.periods()
            seeds = rng.sample(periods.elements(), 1)
            kernel = Subgroup.generated(g, seeds)
            qs = quotient_scheme(s, kernel)
            x = (0, rng.choice(elems))
            res = verify_projection_identity(qs, w, x, Region(-60, 60))
            assert res["match"], (moduli, sorted(w.elements), sorted(kernel.elements()), x)


def test_projection_identity_refused_for_non_period_kernel():
    s = build_scheme(PHYSICAL_Z, cyclic_product([4]), star_generator=(1,))
    kernel = Subgroup.from_elements(s.internal, [(0,), (2,)])
    qs = quotient_scheme(s, kernel)
    w = finite_window(s.internal, [(0,)])  # (2,) is not a period
    with pytest.raises(RefusalError):
        verify_projection_identity(qs, w, None, Region(0, 50))


def test_quotient_window_measure():
    s = build_scheme(PHYSICAL_Z, cyclic_product([4]), star_generator=(1,))
    kernel = Subgroup.from_elements(s.internal, [(0,), (2,)])
    qs = quotient_scheme(s, kernel)
    saturated = finite_window(s.internal, [(1,), (3,)])
    assert quotient_window(qs, saturated).measure() == saturated.measure()
    lone = finite_window(s.internal, [(0,)])
    # a non-saturated window fattens: its image covers the whole coset
    assert quotient_window(qs, lone).measure() == Fraction(1, 2) > lone.measure()


def test_quotient_aperiodic_after_dividing_by_period_group():
    # dividing by the full period group leaves a window with trivial periods
    for moduli in ([6], [8], [12], [2, 3], [10]):
        g = cyclic_product(moduli)
        s = build_scheme(PHYSICAL_Z, g, star_generator=(1,) * g.dim)
        elems = list(g.elements())
        for mask in range(1, 1 << g.order):
            w = FiniteWindow(g, frozenset(e for i, e in enumerate(elems) if mask >> i & 1))
            qs = quotient_scheme(s, w.periods())
            qw = quotient_window(qs, w)
            assert qw.periods().order == 1, (moduli, sorted(w.elements))


def test_quotient_aperiodicity_random_larger_groups():
    rng = random.Random(7)
    for n in range(13, 25):
        g = cyclic_product([n])
        s = build_scheme(PHYSICAL_Z, g, star_generator=(1,))
        elems = list(g.elements())
        for _ in range(40):
            w = FiniteWindow(g, frozenset(e for e in elems if rng.random() < 0.5))
            if w.is_empty():
                continue
            qs = quotient_scheme(s, w.periods())
            assert quotient_window(qs, w).periods().order == 1


# -- torus quotients -------------------------------------------------------------


def test_torus_quotient_by_rotation_pair():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    kernel = Subgroup.from_elements(s.internal, [(0.0,), (0.5,)])
    qs = quotient_scheme(s, kernel)
    assert qs.quotient.star_gen == (pytest.approx((2 * BETA) % 1.0),)
    assert qs.phi((0.3,)) == (pytest.approx(0.6),)
    assert qs.phi((0.8,)) == (pytest.approx(0.6),)
    w = interval_window(
        s.internal, [(0.0, 0.2, True, False), (0.5, 0.7, True, False)]
    )
    qw = quotient_window(qs, w)
    assert qw.measure() == pytest.approx(0.4)
    res = verify_projection_identity(qs, w, (0, (0.31,)), Region(-80, 80))
    assert res["match"]
    assert res["points"] > 0


def test_torus_quotient_rejects_non_rotation_kernel():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    bad = Subgroup.from_elements(s.internal, [(0.0,), (0.31,)], verify=False)
    with pytest.raises(ValueError):
        quotient_scheme(s, bad)


def test_torus_quotient_window_requires_interval_form():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    kernel = Subgroup.from_elements(s.internal, [(0.0,), (0.5,)])
    qs = quotient_scheme(s, kernel)
    foreign = finite_window(cyclic_product([2]), [(0,)])
    with pytest.raises(RefusalError):
        quotient_window(qs, foreign)


def test_quotient_refusals_and_validation():
    fib = build_scheme(
        PHYSICAL_R, euclidean(1), basis=((1.0, 1.0), (PHI, -1.0 / PHI))
    )
    with pytest.raises(RefusalError):
        quotient_scheme(fib, Subgroup.trivial(fib.internal))
    s = build_scheme(PHYSICAL_Z, cyclic_product([4]), star_generator=(1,))
    foreign = Subgroup.trivial(cyclic_product([2]))
    with pytest.raises(ValueError):
        quotient_scheme(s, foreign)


# -- factor descriptors ------------------------------------------------------------


def test_mef_descriptor_trivial_for_boundary_only_windows():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    d = mef_descriptor(s, point_window(s.internal, [0.25]))
    assert d.trivial
    assert d.group == {"kind": "point"}
    assert d.order == 1
    assert d.interior_periods_equal_window_periods is None


def test_mef_descriptor_cyclic():
    s = build_scheme(PHYSICAL_Z, cyclic_product([4]), star_generator=(1,))
    w = finite_window(s.internal, [(0,), (2,)])
    d = mef_descriptor(s, w)
    assert not d.trivial
    assert d.group == {"kind": "cyclic-product-torus", "moduli": [2]}
    assert d.order == 2
    assert d.interior_periods_equal_window_periods is True
    assert set(d.kernel.elements()) == {(0,), (2,)}


def test_mef_descriptor_torus_covering():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    w = interval_window(
        s.internal, [(0.0, 0.2, True, True), (0.5, 0.7, True, True)]
    )
    d = mef_descriptor(s, w)
    assert not d.trivial
    assert d.group == {"kind": "torus", "covering_degree": 2}
    assert d.interior_periods_equal_window_periods is True
    full = interval_window(s.internal, [(0.0, 1.0, True, False)])
    dd = mef_descriptor(s, full)
    assert dd.trivial
    assert dd.group == {"kind": "point"}


def test_mef_descriptor_interior_vs_window_period_flag():
    s = build_scheme(PHYSICAL_Z, torus(1), star_generator=(BETA,))
    # a null part at 0.35 breaks the window's own symmetry but not the interior's
    w = interval_window(
        s.internal,
        [(0.0, 0.2, True, True), (0.5, 0.7, True, True), (0.35, 0.35, True, True)],
    )
    d = mef_descriptor(s, w)
    assert d.interior_periods_equal_window_periods is False
    assert d.kernel.order == 2
    assert d.window_periods.order == 1


def test_mef_descriptor_euclidean():
    fib = build_scheme(
        PHYSICAL_R, euclidean(1), basis=((1.0, 1.0), (PHI, -1.0 / PHI))
    )
    w = interval_window(fib.internal, [(-0.5, 0.5, True, True)])
    d = mef_descriptor(fib, w)
    assert not d.trivial
    assert d.group["kind"] == "plane-torus"
    assert d.group["basis"] == [[1.0, 1.0], [PHI, -1.0 / PHI]]
    assert d.kernel.is_trivial()


def test_mef_descriptor_order_matches_quotient_moduli():
    rng = random.Random(31)
    for moduli in ([6], [12], [2, 3], [4, 3]):
        g = cyclic_product(moduli)
        s = build_scheme(PHYSICAL_Z, g, star_generator=(1,) * g.dim)
        elems = list(g.elements())
        for _ in range(10):
            w = FiniteWindow(g, frozenset(e for e in elems if rng.random() < 0.6))
            if w.is_empty():
                continue
            d = mef_descriptor(s, w)
            assert d.order == g.order // d.kernel.order
            assert math.prod(d.group["moduli"]) == d.order
