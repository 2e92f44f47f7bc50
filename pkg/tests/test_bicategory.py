from random import Random

import pytest

from spancat.bicategory import (
    Cell1,
    Cell2,
    UnknownDiagram,
    associator,
    check_diagram,
    compose,
    hcompose,
    identity2,
    interchange_failure,
    left_unitor,
    pentagon_failure,
    right_unitor,
    rotator,
    shadow,
    shadow_assoc_failure,
    shadow_on_2cells,
    shadow_unitor_failure,
    triangle_failure,
    unit,
    vcompose,
)
from spancat.finset import FinMap, FinSet, compose as compose_maps, identity
from spancat.randgen import (
    NameSource,
    random_cell,
    random_cell2,
    random_cell_chain,
    random_cell_cycle,
    random_indexed_space,
    two_point_base_context,
)
from spancat.smbf import (
    BaseContext,
    EndpointMismatch,
    FinSetError,
    MultiSpan,
    ParamSet,
    SmbfError,
    fiber_product,
    multispan_action,
    over_point,
)

ABS = BaseContext.absolute()


def space(name, size):
    return over_point(FinSet(name, tuple(f"{name}{i}" for i in range(size))))


def cell_with_counts(name, src, dst, counts):
    """A 1-cell over src x dst with the given fiber count matrix."""
    base, _ = fiber_product(ABS, [src, dst])
    elems, proj = [], {}
    for (i, a) in enumerate(src.space.elements):
        for (j, c) in enumerate(dst.space.elements):
            for k in range(counts[i][j]):
                e = f"{name}.{i}.{j}.{k}"
                elems.append(e)
                proj[e] = (a, c)
    total = FinSet(name, elems)
    return Cell1(ABS, src, dst, ParamSet(total, base, FinMap(total, base.space, proj)))


def graph_cell(name, a, mapping):
    """The 1-cell of a self-map: one element per point, over (f(x), x)."""
    base, _ = fiber_product(ABS, [a, a])
    total = FinSet(name, a.space.elements)
    proj = FinMap(total, base.space, {x: (mapping[x], x) for x in total})
    return Cell1(ABS, a, a, ParamSet(total, base, proj))


def test_unit_sizes():
    pt = space("P", 1)
    assert len(unit(ABS, pt).body.total) == 1
    a3 = space("A", 3)
    u = unit(ABS, a3)
    assert len(u.body.total) == 3
    for x in u.body.total:
        assert u.body.proj(x) == (x, x)
    empty = space("E", 0)
    assert len(unit(ABS, empty).body.total) == 0


def test_compose_counts_multiply_like_matrices():
    a = space("A", 1)
    b = space("B", 2)
    c = space("C", 1)
    x = cell_with_counts("X", a, b, [[1, 2]])
    y = cell_with_counts("Y", b, c, [[3], [1]])
    xy = compose(x, y)
    assert len(xy.body.total) == 1 * 3 + 2 * 1


def test_compose_empty_middle():
    a, e, c = space("A", 2), space("E", 0), space("C", 2)
    x = cell_with_counts("X", a, e, [[], []])
    y = cell_with_counts("Y", e, c, [])
    assert len(compose(x, y).body.total) == 0


def test_compose_endpoint_mismatch():
    a, b, c = space("A", 1), space("B", 1), space("C", 1)
    x = cell_with_counts("X", a, b, [[1]])
    z = cell_with_counts("Z", c, c, [[1]])
    with pytest.raises(EndpointMismatch):
        compose(x, z)


def test_compose_agrees_with_span_action_route():
    """The pairing formula and the pull-push route give bijective results
    with matching fibers."""
    rng = Random(11)
    for _ in range(20):
        names = NameSource()
        x, y = random_cell_chain(rng, ABS, 2, names)
        direct = compose(x, y)

        a, e, c = x.src, x.dst, y.dst
        wedge, projs = fiber_product(ABS, [a, e, c])
        pa, pe, pc = projs
        ac, _ = fiber_product(ABS, [a, c])
        ae, _ = fiber_product(ABS, [a, e])
        ec, _ = fiber_product(ABS, [e, c])
        f = FinMap(wedge.space, ac.space, {w: (pa(w), pc(w)) for w in wedge.space})
        g1 = FinMap(wedge.space, ae.space, {w: (pa(w), pe(w)) for w in wedge.space})
        g2 = FinMap(wedge.space, ec.space, {w: (pe(w), pc(w)) for w in wedge.space})
        span = MultiSpan(ABS, wedge, ac, (ae, ec), f, (g1, g2))
        routed = multispan_action(span, [x.body, y.body])

        assert len(routed.total) == len(direct.body.total)
        fibers_direct = {}
        for el in direct.body.total:
            fibers_direct[direct.body.proj(el)] = (
                fibers_direct.get(direct.body.proj(el), 0) + 1
            )
        fibers_routed = {}
        for el in routed.total:
            fibers_routed[routed.proj(el)] = fibers_routed.get(routed.proj(el), 0) + 1
        assert fibers_direct == fibers_routed


def test_unit_compose_agrees_with_nullary_span():
    """unit(A) matches the action of the diagonal wedge with no inputs."""
    a = space("A", 3)
    u = unit(ABS, a)
    aa, _ = fiber_product(ABS, [a, a])
    f = FinMap(a.space, aa.space, {x: (x, x) for x in a.space})
    span = MultiSpan(ABS, a, aa, (), f, ())
    routed = multispan_action(span, [])
    assert len(routed.total) == len(u.body.total)
    for e in routed.total:
        assert routed.proj(e) in {u.body.proj(x) for x in u.body.total}


def test_associator_structural():
    rng = Random(5)
    names = NameSource()
    x, y, z = random_cell_chain(rng, ABS, 3, names)
    alpha = associator(x, y, z)
    for e in alpha.forward.src.body.total:
        assert alpha.forward((e)) == (e[0][0], (e[0][1], e[1]))


def test_unitors_cancel_units():
    rng = Random(6)
    for _ in range(10):
        names = NameSource()
        (x,) = random_cell_chain(rng, ABS, 1, names)
        lu = left_unitor(x)
        assert len(lu.forward.src.body.total) == len(x.body.total)
        ru = right_unitor(x)
        assert len(ru.forward.src.body.total) == len(x.body.total)


def test_shadow_of_unit_is_the_0cell():
    a = space("A", 3)
    sh = shadow(unit(ABS, a))
    assert len(sh) == len(a.space)


def test_shadow_counts_fixed_points():
    a = space("A", 3)
    f = {"A0": "A0", "A1": "A2", "A2": "A1"}
    cell = graph_cell("G", a, f)
    assert len(shadow(cell)) == 1


def test_shadow_of_empty_cell():
    a = space("A", 2)
    cell = cell_with_counts("X", a, a, [[0, 0], [0, 0]])
    assert len(shadow(cell)) == 0


def test_shadow_requires_endo():
    x = cell_with_counts("X", space("A", 1), space("B", 1), [[1]])
    with pytest.raises(EndpointMismatch):
        shadow(x)


def test_rotator_is_cyclic_involution():
    rng = Random(8)
    for _ in range(15):
        names = NameSource()
        x, y = random_cell_cycle(rng, ABS, 2, names)
        th = rotator(x, y)
        back = rotator(y, x)
        assert compose_maps(back, th) == identity(th.source)
        assert len(th.source) == len(th.target)


def test_shadow_functorial_on_2cells():
    rng = Random(9)
    for _ in range(10):
        names = NameSource()
        a = random_indexed_space(rng, ABS, names)
        x = random_cell(rng, ABS, a, a, names)
        phi = random_cell2(rng, x, names)
        psi = random_cell2(rng, phi.dst, names)
        lhs = shadow_on_2cells(vcompose(psi, phi))
        rhs = compose_maps(shadow_on_2cells(psi), shadow_on_2cells(phi))
        assert lhs == rhs


def test_interchange():
    rng = Random(10)
    for _ in range(10):
        names = NameSource()
        x, y = random_cell_chain(rng, ABS, 2, names)
        phi = random_cell2(rng, x, names)
        phi2 = random_cell2(rng, phi.dst, names)
        psi = random_cell2(rng, y, names)
        psi2 = random_cell2(rng, psi.dst, names)
        assert interchange_failure(phi, phi2, psi, psi2) is None


def test_cell2_validation_rejects_non_commuting_maps():
    a = space("A", 2)
    x = cell_with_counts("X", a, a, [[1, 0], [0, 1]])
    bad = {
        x.body.total.elements[0]: x.body.total.elements[1],
        x.body.total.elements[1]: x.body.total.elements[0],
    }
    with pytest.raises(SmbfError):
        Cell2(x, x, FinMap(x.body.total, x.body.total, bad))


@pytest.mark.parametrize("name", ["pentagon", "triangle", "shadow_assoc", "shadow_unitor"])
@pytest.mark.parametrize("fiberwise", [False, True])
def test_diagram_suites_pass(name, fiberwise):
    ctx = two_point_base_context() if fiberwise else ABS
    rng = Random(42)
    failures = check_diagram(name, 25, rng, ctx=ctx)
    assert failures == []


def test_unknown_diagram():
    with pytest.raises(UnknownDiagram):
        check_diagram("heptagon", 1, Random(0))


def test_defining_spans_are_rigid():
    """The wedges presenting the unit, the composition, the shadow and the
    rotator all have injective tupled maps."""
    from spancat.finset import POINT, terminal_map
    from spancat.smbf import fiber_product, rigidity_witness

    a, b = space("A", 3), space("B", 2)

    # unit: diagonal against the empty product
    aa, _ = fiber_product(ABS, [a, a])
    diag = FinMap(a.space, aa.space, {x: (x, x) for x in a.space})
    unit_span = MultiSpan(ABS, a, aa, (), diag, ())
    assert rigidity_witness(unit_span) is None

    # shadow: wedge A over the point with the diagonal as input leg
    shadow_span = MultiSpan(
        ABS, a, over_point(POINT), (aa,), terminal_map(a.space), (diag,)
    )
    assert rigidity_witness(shadow_span) is None

    # rotator: wedge A x B over the point with the two interleaved diagonals
    ab, (pa, pb) = fiber_product(ABS, [a, b])
    ba, _ = fiber_product(ABS, [b, a])
    abba, _ = fiber_product(ABS, [ab, ba])
    legs = FinMap(
        ab.space,
        abba.space,
        {e: ((pa(e), pb(e)), (pb(e), pa(e))) for e in ab.space},
    )
    rot_span = MultiSpan(
        ABS, ab, over_point(POINT), (abba,), terminal_map(ab.space), (legs,)
    )
    assert rigidity_witness(rot_span) is None
