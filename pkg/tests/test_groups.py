import itertools
import math
import random

import pytest

from modelsets.errors import RefusalError
from modelsets.groups import (
    FLOAT_TOL,
    InternalGroup,
    Subgroup,
    cyclic_product,
    euclidean,
    sample_haar,
    torus,
)


def test_cyclic_product_basics():
    g = cyclic_product([2, 3])
    assert g.order == 6
    assert g.is_compact
    assert g.zero() == (0, 0)
    assert g.canonical((5, 7)) == (1, 1)
    assert g.add((1, 2), (1, 2)) == (0, 1)
    assert g.neg((1, 2)) == (1, 1)
    assert g.sub((0, 1), (1, 2)) == (1, 2)
    assert g.scale(4, (1, 1)) == (0, 1)
    assert g.eq(g.canonical((3, 3)), (1, 0))


def test_cyclic_elements_enumeration_order():
    g = cyclic_product([2, 3])
    assert list(g.elements()) == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
    ]


def test_trivial_cyclic_product():
    g = cyclic_product([])
    assert g.order == 1
    assert list(g.elements()) == [()]
    assert g.element_order(()) == 1


def test_cyclic_product_rejects_bad_moduli():
    with pytest.raises(ValueError):
        cyclic_product([0])
    with pytest.raises(ValueError):
        cyclic_product([2, -3])


def test_element_order_matches_brute_force():
    g = cyclic_product([4, 6])
    for a in g.elements():
        n = 1
        acc = a
        while acc != g.zero():
            acc = g.add(acc, a)
            n += 1
        assert g.element_order(a) == n


def test_element_order_refused_off_cyclic():
    with pytest.raises(RefusalError):
        torus(1).element_order((0.5,))


def test_torus_canonical_wraps_and_snaps_seam():
    t = torus(1)
    assert t.canonical((1.25,)) == (0.25,)
    assert t.canonical((-0.25,)) == (0.75,)
    # both sides of the seam collapse to the same representative
    assert t.canonical((1.0 - FLOAT_TOL / 2,)) == (0.0,)
    assert t.canonical((FLOAT_TOL / 2,)) == (0.0,)
    assert t.eq((0.999999999999,), (0.0,))


def test_torus_arithmetic():
    t = torus(1)
    assert t.add((0.7,), (0.6,)) == (0.3000000000000001,) or math.isclose(
        t.add((0.7,), (0.6,))[0], 0.3
    )
    assert math.isclose(t.neg((0.3,))[0], 0.7)
    assert t.order is None
    assert t.is_compact


def test_euclidean_is_not_compact():
    e = euclidean(1)
    assert not e.is_compact
    assert e.order is None
    assert e.add((1.5,), (-0.25,)) == (1.25,)
    assert e.canonical((3.5,)) == (3.5,)


def test_validate_rejects_wrong_shape_and_type():
    g = cyclic_product([2, 3])
    with pytest.raises(ValueError):
        g.validate((1,))
    with pytest.raises(ValueError):
        g.validate((0.5, 1))
    with pytest.raises(ValueError):
        g.validate((3, 3))  # not canonical
    t = torus(1)
    with pytest.raises(ValueError):
        t.validate((1.0, 0.0))  # canonical torus coordinates live in [0,1)


def test_describe_roundtrips_kind():
    d = cyclic_product([2, 3]).describe()
    assert d["kind"] == "cyclic-product"
    assert d["moduli"] == [2, 3]
    assert torus(2).describe()["dim"] == 2


def test_sample_haar_deterministic_and_in_range():
    g = cyclic_product([4, 9])
    a = sample_haar(g, 50, seed=7)
    b = sample_haar(g, 50, seed=7)
    assert a == b
    assert all(0 <= x < 4 and 0 <= y < 9 for x, y in a)
    t = sample_haar(torus(2), 20, seed=1)
    assert all(len(p) == 2 and 0.0 <= p[0] < 1.0 and 0.0 <= p[1] < 1.0 for p in t)
    assert sample_haar(torus(2), 20, seed=1) == t


def test_sample_haar_refuses_euclidean():
    with pytest.raises(RefusalError):
        sample_haar(euclidean(1), 1, seed=0)


def test_subgroup_trivial_and_full():
    g = cyclic_product([4])
    triv = Subgroup.trivial(g)
    assert triv.is_trivial()
    assert triv.order == 1
    full = Subgroup.full(g)
    assert full.is_full()
    assert full.order == 4
    assert not full.is_full_marker  # finite groups materialize the full set
    tfull = Subgroup.full(torus(1))
    assert tfull.is_full_marker
    assert tfull.is_full()
    assert tfull.contains((0.123,))
    assert tfull.order is None


def test_subgroup_from_elements_verifies_closure():
    g = cyclic_product([4])
    sub = Subgroup.from_elements(g, [(0,), (2,)])
    assert sub.contains((2,))
    assert not sub.contains((1,))
    with pytest.raises(ValueError):
        Subgroup.from_elements(g, [(1,), (2,)])  # no identity
    with pytest.raises(ValueError):
        Subgroup.from_elements(g, [(0,), (1,)])  # 1+1=2 missing


def test_subgroup_generated_closure():
    g = cyclic_product([12])
    sub = Subgroup.generated(g, [(8,)])
    assert set(sub.elements()) == {(0,), (4,), (8,)}
    assert sub.order == 3
    two = Subgroup.generated(g, [(8,), (6,)])
    assert two.order == 6  # gcd(8,6,12)=2 generates the even residues


def test_subgroup_generated_random_agrees_with_brute_force():
    rng = random.Random(11)
    for _ in range(25):
        moduli = [rng.randint(2, 6) for _ in range(rng.randint(1, 3))]
        g = cyclic_product(moduli)
        gens = [tuple(rng.randrange(b) for b in moduli) for _ in range(2)]
        sub = Subgroup.generated(g, gens)
        # brute force: all Z-linear combinations within the group order
        order = g.order
        brute = set()
        for c1 in range(order):
            for c2 in range(order):
                brute.add(g.add(g.scale(c1, gens[0]), g.scale(c2, gens[1])))
        assert set(sub.elements()) == brute


def test_subgroup_same_and_describe():
    g = cyclic_product([4])
    a = Subgroup.from_elements(g, [(0,), (2,)])
    b = Subgroup.generated(g, [(2,)])
    assert a.same(b)
    assert not a.same(Subgroup.full(g))
    assert Subgroup.full(torus(1)).describe() == {"full_group": True}
    assert a.describe() == {"full_group": False, "elements": [[0], [2]]}


def test_full_marker_same_as_materialized_full():
    # on the torus the only finite way to be "full" is the marker
    t = torus(1)
    assert Subgroup.full(t).same(Subgroup.full(t))
    assert not Subgroup.full(t).same(Subgroup.trivial(t))


def test_subgroup_elements_sorted_deterministically():
    g = cyclic_product([5])
    sub = Subgroup.from_elements(g, [(0,), (1,), (2,), (3,), (4,)])
    assert sub.elements() == ((0,), (1,), (2,), (3,), (4,))


def test_exhaustive_subgroups_of_z12_are_closed():
    g = cyclic_product([12])
    for d in (1, 2, 3, 4, 6, 12):
        sub = Subgroup.generated(g, [(d,)])
        assert sub.order == 12 // math.gcd(d, 12)
        for a, b in itertools.product(sub.elements(), repeat=2):
            assert sub.contains(g.add(a, b))
