from random import Random

import pytest

from spancat.basechange import base_change
from spancat.bicategory import compose, compose_many, shadow, unit
from spancat.finset import FinMap, FinSet, identity
from spancat.fuller import (
    box,
    box2,
    check_diagram,
    i_box,
    m_box,
    shift_overmap,
    tau,
    twist_cell,
    vartheta,
)
from spancat.randgen import (
    NameSource,
    random_cell,
    random_cell2,
    random_cell_chain,
    random_indexed_space,
)
from spancat.smbf import (
    BaseContext,
    EndpointMismatch,
    OverMap,
    fiber_product,
    over_point,
)

ABS = BaseContext.absolute()


def space(name, size):
    return over_point(FinSet(name, tuple(f"{name}{i}" for i in range(size))))


def graph_overmap(a, mapping):
    return OverMap(a, a, FinMap(a.space, a.space, mapping))


def test_box_of_one_cell_is_that_cell():
    rng = Random(0)
    names = NameSource()
    (x,) = random_cell_chain(rng, ABS, 1, names)
    assert box([x]) == x


def test_box_sizes_multiply():
    rng = Random(1)
    names = NameSource()
    a, b = space("A", 1), space("B", 1)
    c, d = space("C", 1), space("D", 1)
    x = random_cell(rng, ABS, a, b, names, max_fiber=2, max_total=2)
    y = random_cell(rng, ABS, c, d, names, max_fiber=3, max_total=3)
    assert len(box([x, y]).body.total) == len(x.body.total) * len(y.body.total)


def test_box_with_empty_factor_is_empty():
    rng = Random(2)
    names = NameSource()
    a, b = space("A", 2), space("B", 2)
    x = random_cell(rng, ABS, a, b, names)
    e = random_cell(rng, ABS, a, b, names, max_fiber=0, max_total=0)
    assert len(box([x, e]).body.total) == 0


def test_box_rejects_empty_list():
    with pytest.raises(EndpointMismatch):
        box([])


def test_m_box_n1_is_identity():
    rng = Random(3)
    names = NameSource()
    x, y = random_cell_chain(rng, ABS, 2, names)
    iso = m_box([x], [y])
    for e in iso.forward.src.body.total:
        assert iso.forward(e) == e


def test_m_box_cardinalities_agree():
    rng = Random(4)
    for _ in range(10):
        names = NameSource()
        chains = [random_cell_chain(rng, ABS, 2, names) for _ in range(2)]
        ms = [c[0] for c in chains]
        ns = [c[1] for c in chains]
        iso = m_box(ms, ns)
        assert len(iso.forward.src.body.total) == len(iso.forward.dst.body.total)


def test_i_box_sizes():
    a, b = space("A", 2), space("B", 3)
    iso = i_box(ABS, [a, b])
    assert len(iso.forward.src.body.total) == 6
    assert len(iso.forward.dst.body.total) == 6
    empty = space("E", 0)
    iso2 = i_box(ABS, [a, empty])
    assert len(iso2.forward.src.body.total) == 0


def test_twist_cell_is_the_shift_base_change_cell():
    a, b = space("A", 2), space("B", 3)
    t = twist_cell(ABS, [a, b])
    gamma = shift_overmap(ABS, [a, b])
    assert t.cell == base_change(ABS, gamma).cell
    assert len(t.cell.body.total) == 6


def test_twist_single_space_is_the_unit():
    a = space("A", 3)
    assert twist_cell(ABS, [a]).cell == unit(ABS, a)


def test_twist_with_empty_space_is_empty():
    a, e = space("A", 2), space("E", 0)
    assert len(twist_cell(ABS, [a, e]).cell.body.total) == 0


def test_vartheta_n1_conjugates_the_unitors():
    rng = Random(5)
    names = NameSource()
    (m,) = random_cell_chain(rng, ABS, 1, names)
    iso = vartheta([m])
    # lhs is unit . m, rhs is m . unit; through the unitors the map is the
    # identity on m itself
    from spancat.bicategory import left_unitor, right_unitor

    lu = left_unitor(m)
    ru = right_unitor(m)
    for e in iso.forward.src.body.total:
        assert ru.forward(iso.forward(e)) == lu.forward(e)


def test_vartheta_cardinalities():
    rng = Random(6)
    for n in (2, 3):
        names = NameSource()
        ms = [random_cell_chain(rng, ABS, 1, names)[0] for _ in range(n)]
        iso = vartheta(ms)
        assert len(iso.forward.src.body.total) == len(iso.forward.dst.body.total)


def test_tau_n1_reduces_to_the_shadow():
    rng = Random(7)
    names = NameSource()
    a = random_indexed_space(rng, ABS, names)
    q = random_cell(rng, ABS, a, a, names)
    m = tau([q])
    target = shadow(q)
    assert m.target == target
    assert len(m.source) == len(target)


def test_tau_three_cycle_counts():
    a = space("A", 3)
    cyc = {"A0": "A1", "A1": "A2", "A2": "A0"}
    f = base_change(ABS, graph_overmap(a, cyc))
    m = tau([f.cell, f.cell, f.cell])
    # the threefold iterate of a 3-cycle is the identity
    assert len(m.source) == 3
    assert len(m.target) == 3


def test_tau_cardinalities_random():
    rng = Random(8)
    from spancat.randgen import random_cell_cycle

    for n in (1, 2, 3):
        names = NameSource()
        qs = random_cell_cycle(rng, ABS, n, names)
        m = tau(qs)
        assert len(m.source) == len(m.target)


def test_tau_rejects_non_cyclic():
    rng = Random(9)
    names = NameSource()
    x, y = random_cell_chain(rng, ABS, 2, names)
    with pytest.raises(EndpointMismatch):
        tau([x, y])


def test_vartheta_pseudonatural_squares():
    """Naturality of the twist comparison against componentwise 2-cells."""
    rng = Random(10)
    from spancat.bicategory import hcompose, identity2, vcompose
    from spancat.fuller import box2

    for n in (1, 2):
        names = NameSource()
        ms = [random_cell_chain(rng, ABS, 1, names)[0] for _ in range(n)]
        phis = [random_cell2(rng, m, names) for m in ms]
        targets = [p.dst for p in phis]
        iso_src = vartheta(ms)
        iso_dst = vartheta(targets)
        t_a = twist_cell(ABS, [m.src for m in ms]).cell
        t_b = twist_cell(ABS, [m.dst for m in ms]).cell
        phis_shift = phis[1:] + phis[:1]
        lhs = vcompose(iso_dst.forward, hcompose(identity2(t_a), box2(phis)))
        rhs = vcompose(hcompose(box2(phis_shift), identity2(t_b)), iso_src.forward)
        assert lhs.map == rhs.map


def test_n_zero_rejected():
    with pytest.raises(EndpointMismatch):
        twist_cell(ABS, [])
    with pytest.raises(EndpointMismatch):
        check_diagram("fuller.assoc", 1, Random(0), n=0)


@pytest.mark.parametrize("name", [
    "fuller.assoc", "fuller.unit", "fuller.nat_comp", "fuller.nat_unit", "fuller.twist",
])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_fuller_suites(name, n):
    failures = check_diagram(name, 10, Random(100 + n), n=n)
    assert failures == []
