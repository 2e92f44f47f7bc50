import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spancat.finset import (
    POINT,
    POINT_ELEMENT,
    FinMap,
    FinSet,
    FinSetError,
    IncompatibleCospan,
    cartesian_product,
    collision,
    compose,
    constant,
    identity,
    is_injective,
    nest,
    pullback,
    unnest,
)


def fs(name, *elems):
    return FinSet(name, elems)


def test_duplicate_elements_rejected():
    with pytest.raises(FinSetError):
        FinSet("A", ("a", "a"))


def test_bad_element_shape_rejected():
    with pytest.raises(FinSetError):
        FinSet("A", (("a", "b", "c"),))


def test_structural_equality_and_determinism():
    a1 = fs("A", "x", "y")
    a2 = fs("A", "x", "y")
    assert a1 == a2 and hash(a1) == hash(a2)
    assert a1 != fs("A", "y", "x")  # element order matters
    assert a1 != fs("B", "x", "y")


def test_nest_unnest_round_trip():
    assert nest([]) == POINT_ELEMENT
    assert nest(["a"]) == "a"
    assert nest(["a", "b", "c"]) == (("a", "b"), "c")
    for n in range(1, 5):
        items = [f"e{i}" for i in range(n)]
        assert unnest(nest(items), n) == items


def test_empty_product_is_the_point():
    total, projections = cartesian_product([])
    assert total == POINT
    assert projections == []


def test_singleton_factor_product():
    a = fs("A", "a")
    b = fs("B", "b1", "b2")
    total, (p, q) = cartesian_product([a, b])
    assert total.elements == (("a", "b1"), ("a", "b2"))
    assert [p(e) for e in total] == ["a", "a"]
    assert [q(e) for e in total] == ["b1", "b2"]


def test_triple_product_size_matches_enumeration():
    a = fs("A", "a0", "a1")
    b = fs("B", "b0", "b1", "b2")
    c = fs("C", "c0", "c1")
    total, projections = cartesian_product([a, b, c])
    expected = list(itertools.product(a.elements, b.elements, c.elements))
    assert len(total) == len(expected) == 12
    flattened = [tuple(unnest(e, 3)) for e in total]
    assert flattened == expected
    for i, proj in enumerate(projections):
        assert [proj(e) for e in total] == [row[i] for row in expected]


def test_product_of_one_set_is_that_set():
    a = fs("A", "x")
    total, (p,) = cartesian_product([a])
    assert total == a
    assert p == identity(a)


def test_map_totality_enforced():
    a = fs("A", "x", "y")
    b = fs("B", "u")
    with pytest.raises(FinSetError):
        FinMap(a, b, {"x": "u"})
    with pytest.raises(FinSetError):
        FinMap(a, b, {"x": "u", "y": "v"})


def test_compose_requires_matching_middle():
    a, b, c = fs("A", "x"), fs("B", "u"), fs("C", "w")
    f = FinMap(a, b, {"x": "u"})
    g = FinMap(c, c, {"w": "w"})
    with pytest.raises(FinSetError):
        compose(g, f)


def test_pullback_of_identities_is_diagonal():
    a = fs("A", "x", "y")
    total, p1, p2 = pullback(identity(a), identity(a))
    assert total.elements == (("x", "x"), ("y", "y"))
    for e in total:
        assert p1(e) == p2(e)


def test_pullback_constant_cospan():
    a = fs("A", "a1", "a2")
    b = fs("B", "b1")
    c = fs("C", "c")
    total, _, _ = pullback(constant(a, c, "c"), constant(b, c, "c"))
    assert total.elements == (("a1", "b1"), ("a2", "b1"))


def test_pullback_disjoint_images_is_empty():
    a, b = fs("A", "a"), fs("B", "b")
    c = fs("C", "c1", "c2")
    total, _, _ = pullback(constant(a, c, "c1"), constant(b, c, "c2"))
    assert len(total) == 0


def test_pullback_target_mismatch():
    a, b = fs("A", "a"), fs("B", "b")
    with pytest.raises(IncompatibleCospan):
        pullback(identity(a), identity(b))


def test_injectivity_and_witness():
    a = fs("A", "x", "y")
    c = fs("C", "c")
    assert is_injective(identity(a))
    f = constant(a, c, "c")
    assert not is_injective(f)
    assert collision(f) == ("x", "y")


def _random_map(draw, src, dst):
    images = draw(
        st.lists(
            st.sampled_from(dst.elements), min_size=len(src), max_size=len(src)
        )
    )
    return FinMap(src, dst, dict(zip(src.elements, images)))


@st.composite
def _three_composable_maps(draw):
    sizes = [draw(st.integers(min_value=1, max_value=4)) for _ in range(4)]
    sets = [
        FinSet(f"S{i}", tuple(f"s{i}.{j}" for j in range(n)))
        for i, n in enumerate(sizes)
    ]
    f = _random_map(draw, sets[0], sets[1])
    g = _random_map(draw, sets[1], sets[2])
    h = _random_map(draw, sets[2], sets[3])
    return f, g, h


@settings(max_examples=60, deadline=None)
@given(_three_composable_maps())
def test_compose_associative(maps):
    f, g, h = maps
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)


@st.composite
def _cospan(draw):
    nb = draw(st.integers(min_value=0, max_value=4))
    nc = draw(st.integers(min_value=0, max_value=4))
    nd = draw(st.integers(min_value=1, max_value=3))
    b = FinSet("B", tuple(f"b{i}" for i in range(nb)))
    c = FinSet("C", tuple(f"c{i}" for i in range(nc)))
    d = FinSet("D", tuple(f"d{i}" for i in range(nd)))
    return _random_map(draw, b, d), _random_map(draw, c, d)


@settings(max_examples=60, deadline=None)
@given(_cospan())
def test_pullback_size_formula_and_symmetry(cospan):
    f, g = cospan
    total, p1, p2 = pullback(f, g)
    expected = 0
    for d in f.target.elements:
        nf = sum(1 for x in f.source if f(x) == d)
        ng = sum(1 for x in g.source if g(x) == d)
        expected += nf * ng
    assert len(total) == expected

    swapped, q1, q2 = pullback(g, f)
    swap = FinMap(total, swapped, {e: (e[1], e[0]) for e in total})
    assert swap.is_bijection()
    for e in total:
        assert q1(swap(e)) == p2(e)
        assert q2(swap(e)) == p1(e)
