"""The componentwise product of cells, the cyclic twist, and their
compatibility with composition and the shadow.

``box`` sends an n-tuple of 1-cells to one 1-cell between product
0-cells; ``twist_cell`` is the 1-cell of the cyclic shift of a product;
``vartheta`` commutes the twist past boxes; ``tau`` unwinds a twisted
box into a cyclic composite at the level of shadows.  Subscript
arithmetic is mod n, with the leftmost factor moved to the rightmost
position.  The empty tuple is rejected everywhere.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .basechange import base_change
from .bicategory import (
    Cell1,
    Cell2,
    Iso2,
    UnknownDiagram,
    _first_difference,
    associator,
    compose,
    compose_many,
    hcompose,
    hcompose_iso,
    identity2,
    identity_iso,
    left_unitor,
    right_unitor,
    rotator,
    shadow,
    shadow_on_2cells,
    unit,
    vcompose,
)
from .finset import FinMap, FinSet, nest, unnest
from .smbf import (
    BaseContext,
    ContextMismatch,
    EndpointMismatch,
    IndexedSpace,
    OverMap,
    ParamSet,
    SmbfError,
    fiber_product,
)
from dataclasses import dataclass


def _require_nonempty(cells) -> list:
    cells = list(cells)
    if not cells:
        raise EndpointMismatch("at least one factor is required")
    return cells


def box(cells: Sequence[Cell1], validate: bool = True) -> Cell1:
    """The componentwise product 1-cell between product 0-cells."""
    cells = _require_nonempty(cells)
    ctx = cells[0].ctx
    for c in cells[1:]:
        if c.ctx != ctx:
            raise ContextMismatch("factors from different contexts")
    if len(cells) == 1:
        return cells[0]
    src_prod, _ = fiber_product(ctx, [c.src for c in cells])
    dst_prod, _ = fiber_product(ctx, [c.dst for c in cells])
    base, _ = fiber_product(ctx, [src_prod, dst_prod])

    c0 = cells[0]
    tb0 = c0.src.to_base.mapping
    rows = []
    for e in c0.body.total.elements:
        s, d = c0.body.proj.mapping[e]
        rows.append((e, (s,), (d,), tb0[s]))
    for c in cells[1:]:
        tb = c.src.to_base.mapping
        new_rows = []
        for te, sflat, dflat, b in rows:
            for e in c.body.total.elements:
                s, d = c.body.proj.mapping[e]
                if tb[s] == b:
                    new_rows.append(((te, e), sflat + (s,), dflat + (d,), b))
        rows = new_rows
    name = "prod(" + ",".join(c.body.total.name for c in cells) + ")"
    total = FinSet(name, (te for te, _, _, _ in rows), validate=False)
    proj = FinMap(
        total,
        base.space,
        {te: (nest(sflat), nest(dflat)) for te, sflat, dflat, _ in rows},
        validate=False,
    )
    body = ParamSet(total, base, proj, validate=False)
    return Cell1(ctx, src_prod, dst_prod, body, validate=validate)


def box2(phis: Sequence[Cell2]) -> Cell2:
    """The product of 2-cells, componentwise on nested tuples."""
    phis = _require_nonempty(phis)
    if len(phis) == 1:
        return phis[0]
    n = len(phis)
    src = box([p.src for p in phis])
    dst = box([p.dst for p in phis])
    comps = [p.map.mapping for p in phis]
    mapping = {
        e: nest([comps[i][part] for i, part in enumerate(unnest(e, n))])
        for e in src.body.total.elements
    }
    return Cell2(src, dst, FinMap(src.body.total, dst.body.total, mapping, validate=False))


def box2_iso(isos: Sequence[Iso2]) -> Iso2:
    isos = list(isos)
    return Iso2(box2([i.forward for i in isos]), box2([i.backward for i in isos]))


def m_box(ms: Sequence[Cell1], ns: Sequence[Cell1]) -> Iso2:
    """(box m_i) . (box n_i)  ->  box(m_i . n_i), interleaving components."""
    ms, ns = _require_nonempty(ms), _require_nonempty(ns)
    if len(ms) != len(ns):
        raise EndpointMismatch("factor lists of different lengths")
    n = len(ms)
    lhs = compose(box(ms), box(ns))
    rhs = box([compose(m, nn) for m, nn in zip(ms, ns)])
    if n == 1:
        fwd = {e: e for e in lhs.body.total.elements}
        bwd = fwd
    else:
        fwd = {
            (mv, nv): nest(list(zip(unnest(mv, n), unnest(nv, n))))
            for (mv, nv) in lhs.body.total.elements
        }
        bwd = {}
        for e in rhs.body.total.elements:
            pairs = unnest(e, n)
            bwd[e] = (nest([p[0] for p in pairs]), nest([p[1] for p in pairs]))
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd, validate=False)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd, validate=False)),
    )


def i_box(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> Iso2:
    """unit(prod A_i)  ->  box(unit A_i); the diagonal-tuple comparison."""
    spaces = _require_nonempty(spaces)
    prod, _ = fiber_product(ctx, spaces)
    lhs = unit(ctx, prod)
    rhs = box([unit(ctx, a) for a in spaces])
    fwd = {e: e for e in lhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd, validate=False)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, fwd, validate=False)),
    )


def shift_overmap(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> OverMap:
    """The cyclic shift prod(A_1..A_n) -> prod(A_2..A_n, A_1)."""
    spaces = _require_nonempty(spaces)
    n = len(spaces)
    prod, _ = fiber_product(ctx, spaces)
    shifted, _ = fiber_product(ctx, spaces[1:] + spaces[:1])
    if n == 1:
        from .finset import identity

        return OverMap(prod, shifted, identity(prod.space))
    mapping = {}
    for e in prod.space.elements:
        parts = unnest(e, n)
        mapping[e] = nest(parts[1:] + parts[:1])
    return OverMap(prod, shifted, FinMap(prod.space, shifted.space, mapping, validate=False))


@dataclass(frozen=True)
class TwistCell:
    """The 1-cell of the cyclic shift on a product of 0-cells."""

    inputs: tuple
    cell: Cell1


def twist_cell(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> TwistCell:
    """Structurally the base-change cell of the cyclic shift."""
    spaces = _require_nonempty(spaces)
    gamma = shift_overmap(ctx, spaces)
    return TwistCell(tuple(spaces), base_change(ctx, gamma).cell)


def vartheta(ms: Sequence[Cell1]) -> Iso2:
    """twist(src) . box(m_i)  ->  box(m_{i+1}) . twist(dst)."""
    ms = _require_nonempty(ms)
    n = len(ms)
    ctx = ms[0].ctx
    srcs = [m.src for m in ms]
    dsts = [m.dst for m in ms]
    t_src = twist_cell(ctx, srcs)
    t_dst = twist_cell(ctx, dsts)
    shifted = list(ms[1:]) + [ms[0]]
    lhs = compose(t_src.cell, box(ms))
    rhs = compose(box(shifted), t_dst.cell)

    def parts_of(mvec):
        return unnest(mvec, n) if n > 1 else [mvec]

    fwd = {}
    for (t, mvec) in lhs.body.total.elements:
        parts = parts_of(mvec)
        mshift = nest(parts[1:] + parts[:1])
        bvec = nest([ms[i].dst_coord(parts[i]) for i in range(n)])
        fwd[(t, mvec)] = (mshift, bvec)
    bwd = {}
    for (mshift, bvec) in rhs.body.total.elements:
        sparts = parts_of(mshift)
        parts = sparts[-1:] + sparts[:-1]
        mvec = nest(parts)
        avec = nest([ms[i].src_coord(parts[i]) for i in range(n)])
        bwd[(mshift, bvec)] = (avec, mvec)
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd, validate=False)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd, validate=False)),
    )


def tau(qs: Sequence[Cell1]) -> FinMap:
    """sh(twist . box(q_i))  ->  sh(q_1 . ... . q_n), unwinding the twist.

    The factors must be cyclically composable.
    """
    qs = _require_nonempty(qs)
    n = len(qs)
    ctx = qs[0].ctx
    for i in range(n):
        if qs[i].dst != qs[(i + 1) % n].src:
            raise EndpointMismatch("factors are not cyclically composable")
    t = twist_cell(ctx, [q.src for q in qs])
    lhs = shadow(compose(t.cell, box(qs)))
    rhs = shadow(compose_many(qs))
    mapping = {}
    for e in lhs.elements:
        _, qvec = e
        parts = unnest(qvec, n) if n > 1 else [qvec]
        acc = parts[0]
        for p in parts[1:]:
            acc = (acc, p)
        mapping[e] = acc
    m = FinMap(lhs, rhs, mapping)
    if not m.is_bijection():
        raise SmbfError("twist unwinding failed to be a bijection")
    return m


# ---------------------------------------------------------------------------
# figure checks


def fuller_assoc_failure(
    ms: Sequence[Cell1], ns: Sequence[Cell1], ps: Sequence[Cell1]
) -> Optional[dict]:
    bm, bn, bp = box(ms), box(ns), box(ps)
    nps = [compose(x, y) for x, y in zip(ns, ps)]
    mns = [compose(x, y) for x, y in zip(ms, ns)]
    route_a = vcompose(
        m_box(ms, nps).forward,
        vcompose(
            hcompose_iso(identity_iso(bm), m_box(ns, ps)).forward,
            associator(bm, bn, bp).forward,
        ),
    )
    route_b = vcompose(
        box2([associator(m, nn, p).forward for m, nn, p in zip(ms, ns, ps)]),
        vcompose(
            m_box(mns, ps).forward,
            hcompose_iso(m_box(ms, ns), identity_iso(bp)).forward,
        ),
    )
    return _first_difference(route_a.map, route_b.map)


def fuller_unit_failure(ms: Sequence[Cell1]) -> Optional[dict]:
    ms = list(ms)
    ctx = ms[0].ctx
    bm = box(ms)
    units = [unit(ctx, m.src) for m in ms]
    route_a = left_unitor(bm).forward
    route_b = vcompose(
        box2([left_unitor(m).forward for m in ms]),
        vcompose(
            m_box(units, ms).forward,
            hcompose_iso(i_box(ctx, [m.src for m in ms]), identity_iso(bm)).forward,
        ),
    )
    d = _first_difference(route_a.map, route_b.map)
    if d is not None:
        return d
    units_r = [unit(ctx, m.dst) for m in ms]
    route_c = right_unitor(bm).forward
    route_d = vcompose(
        box2([right_unitor(m).forward for m in ms]),
        vcompose(
            m_box(ms, units_r).forward,
            hcompose_iso(identity_iso(bm), i_box(ctx, [m.dst for m in ms])).forward,
        ),
    )
    return _first_difference(route_c.map, route_d.map)


def fuller_nat_comp_failure(ms: Sequence[Cell1], ns: Sequence[Cell1]) -> Optional[dict]:
    ms, ns = list(ms), list(ns)
    ctx = ms[0].ctx
    t_a = twist_cell(ctx, [m.src for m in ms]).cell
    bm, bn = box(ms), box(ns)
    mns = [compose(x, y) for x, y in zip(ms, ns)]
    route_a = vcompose(
        vartheta(mns).forward,
        vcompose(
            hcompose_iso(identity_iso(t_a), m_box(ms, ns)).forward,
            associator(t_a, bm, bn).forward,
        ),
    )
    ms_shift = ms[1:] + ms[:1]
    ns_shift = ns[1:] + ns[:1]
    t_b = twist_cell(ctx, [m.dst for m in ms]).cell
    bms, bns = box(ms_shift), box(ns_shift)
    step1 = hcompose_iso(vartheta(ms), identity_iso(bn)).forward
    step2 = associator(bms, t_b, bn).forward
    step3 = hcompose_iso(identity_iso(bms), vartheta(ns)).forward
    step4 = associator(bms, bns, twist_cell(ctx, [nn.dst for nn in ns]).cell).backward
    step5 = hcompose_iso(
        m_box(ms_shift, ns_shift),
        identity_iso(twist_cell(ctx, [nn.dst for nn in ns]).cell),
    ).forward
    route_b = vcompose(step5, vcompose(step4, vcompose(step3, vcompose(step2, step1))))
    return _first_difference(route_a.map, route_b.map)


def fuller_nat_unit_failure(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> Optional[dict]:
    spaces = list(spaces)
    t = twist_cell(ctx, spaces).cell
    shifted = spaces[1:] + spaces[:1]
    route_a = vcompose(
        hcompose_iso(identity_iso(t), i_box(ctx, spaces)).forward,
        vcompose(right_unitor(t).backward, left_unitor(t).forward),
    )
    route_b = vcompose(
        vartheta([unit(ctx, a) for a in spaces]).backward,
        hcompose_iso(i_box(ctx, shifted), identity_iso(t)).forward,
    )
    return _first_difference(route_a.map, route_b.map)


def fuller_twist_failure(rs: Sequence[Cell1], ss: Sequence[Cell1]) -> Optional[dict]:
    """The full compatibility square between the twist, the product and
    the shadow rotation."""
    rs, ss = list(rs), list(ss)
    n = len(rs)
    ctx = rs[0].ctx
    t_r = twist_cell(ctx, [r.src for r in rs]).cell
    br, bs = box(rs), box(ss)

    # top route
    t1 = shadow_on_2cells(hcompose(identity2(t_r), m_box(rs, ss).forward))
    t2 = tau([compose(r, s) for r, s in zip(rs, ss)])
    # cyclic rotation by one cell with regrouping (the suppressed
    # rebracketing of the figure, spelled out on elements)
    rot_src = t2.target
    target_cells = [compose(ss[i], rs[(i + 1) % n]) for i in range(n)]
    rot_dst = shadow(compose_many(target_cells))
    rot_map = {}
    for e in rot_src.elements:
        pairs = [e] if n == 1 else unnest(e, n)
        flat: List = []
        for p in pairs:
            flat.extend([p[0], p[1]])
        flat = flat[1:] + flat[:1]
        regrouped = [(flat[2 * i], flat[2 * i + 1]) for i in range(n)]
        acc = regrouped[0]
        for p in regrouped[1:]:
            acc = (acc, p)
        rot_map[e] = acc
    t3 = FinMap(rot_src, rot_dst, rot_map)
    from .finset import compose as cm

    route_a = cm(t3, cm(t2, t1))

    # left route
    rs_shift = rs[1:] + rs[:1]
    t_b = twist_cell(ctx, [r.dst for r in rs]).cell
    brs = box(rs_shift)
    b1 = shadow_on_2cells(associator(t_r, br, bs).backward)
    b2 = shadow_on_2cells(hcompose(vartheta(rs).forward, identity2(bs)))
    b3 = shadow_on_2cells(associator(brs, t_b, bs).forward)
    b4 = rotator(brs, compose(t_b, bs))
    b5 = shadow_on_2cells(associator(t_b, bs, brs).forward)
    b6 = shadow_on_2cells(hcompose(identity2(t_b), m_box(ss, rs_shift).forward))
    b7 = tau(target_cells)
    route_b = cm(b7, cm(b6, cm(b5, cm(b4, cm(b3, cm(b2, b1))))))
    return _first_difference(route_a, route_b)


DIAGRAMS = (
    "fuller.assoc",
    "fuller.unit",
    "fuller.nat_comp",
    "fuller.nat_unit",
    "fuller.twist",
)


def check_diagram(
    name: str,
    instances: int,
    rng,
    ctx: Optional[BaseContext] = None,
    n: int = 2,
    max_size: int = 4,
    max_fiber: int = 3,
    max_total: int = 6,
    **_,
) -> list:
    """Seeded random instances of the product/twist coherence figures."""
    from . import randgen

    if ctx is None:
        ctx = BaseContext.absolute()
    if name not in DIAGRAMS:
        raise UnknownDiagram(f"unknown diagram {name!r}")
    if n < 1:
        raise EndpointMismatch("the factor count must be at least 1")
    failures = []
    for i in range(instances):
        names = randgen.NameSource()

        def chains(length):
            return [
                randgen.random_cell_chain(rng, ctx, length, names, max_size, max_fiber, max_total)
                for _ in range(n)
            ]

        if name == "fuller.assoc":
            triples = chains(3)
            failure = fuller_assoc_failure(
                [t[0] for t in triples], [t[1] for t in triples], [t[2] for t in triples]
            )
        elif name == "fuller.unit":
            singles = chains(1)
            failure = fuller_unit_failure([t[0] for t in singles])
        elif name == "fuller.nat_comp":
            pairs = chains(2)
            failure = fuller_nat_comp_failure(
                [t[0] for t in pairs], [t[1] for t in pairs]
            )
        elif name == "fuller.nat_unit":
            spaces = [
                randgen.random_indexed_space(rng, ctx, names, max_size)
                for _ in range(n)
            ]
            failure = fuller_nat_unit_failure(ctx, spaces)
        else:
            a_spaces = [
                randgen.random_indexed_space(rng, ctx, names, max_size)
                for _ in range(n)
            ]
            b_spaces = [
                randgen.random_indexed_space(rng, ctx, names, max_size)
                for _ in range(n)
            ]
            rs = [
                randgen.random_cell(rng, ctx, a_spaces[i], b_spaces[i], names, max_fiber, max_total)
                for i in range(n)
            ]
            ss = [
                randgen.random_cell(
                    rng, ctx, b_spaces[i], a_spaces[(i + 1) % n], names, max_fiber, max_total
                )
                for i in range(n)
            ]
            failure = fuller_twist_failure(rs, ss)
        if failure is not None:
            failure["instance"] = i
            failures.append(failure)
    return failures
