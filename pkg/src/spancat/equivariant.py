"""Finite group actions on the span bicategory.

Groups are given by multiplication tables and validated exhaustively.
Cells with compatible actions form the equivariant bicategory; taking
H-fixed points everywhere gives a functor to cells over the Weyl group
of H, and forgetting actions restricts to a subgroup.  The comparison
isomorphisms for fixed points (with composition, units, shadows and
base-change cells) are identity-on-elements bijections here, validated
as equivariant 2-cells; the figure checks exercise their coherence.

The ambient base is assumed to carry the trivial action.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .basechange import BaseChangeCell, base_change, m_bc
from .bicategory import (
    Cell1,
    Cell2,
    Iso2,
    UnknownDiagram,
    _first_difference,
    associator,
    compose,
    identity2,
    left_unitor,
    right_unitor,
    rotator,
    shadow,
    shadow_on_2cells,
    unit,
    vcompose,
)
from .finset import Element, FinMap, FinSet, FinSetError, compose as compose_maps
from .smbf import (
    BaseContext,
    EndpointMismatch,
    IndexedSpace,
    OverMap,
    ParamSet,
    SmbfError,
    external_product,
    over_point,
    pullback_along,
    pushforward_along,
)


class GroupError(FinSetError):
    pass


class SubgroupError(GroupError):
    pass


class NotEquivariant(GroupError):
    pass


@dataclass(frozen=True)
class FinGroup:
    """A finite group given by its multiplication table."""

    carrier: FinSet
    table: tuple  # ((g, h, gh), ...) in carrier order
    unit: Element
    inverse: tuple  # ((g, ginv), ...)

    def __post_init__(self):
        elems = self.carrier.elements
        mul = self.mul_table()
        if set(mul) != {(g, h) for g in elems for h in elems}:
            raise GroupError("multiplication table is not total")
        for (g, h), gh in mul.items():
            if gh not in self.carrier:
                raise GroupError(f"product {g!r}*{h!r} escapes the carrier")
        for g in elems:
            if mul[(self.unit, g)] != g or mul[(g, self.unit)] != g:
                raise GroupError(f"unit fails at {g!r}")
        inv = dict(self.inverse)
        for g in elems:
            if mul[(g, inv[g])] != self.unit or mul[(inv[g], g)] != self.unit:
                raise GroupError(f"inverse fails at {g!r}")
        for a in elems:
            for b in elems:
                for c in elems:
                    if mul[(mul[(a, b)], c)] != mul[(a, mul[(b, c)])]:
                        raise GroupError(f"associativity fails at {(a, b, c)!r}")

    def mul_table(self) -> Dict[tuple, Element]:
        return {(g, h): gh for g, h, gh in self.table}

    def mul(self, g: Element, h: Element) -> Element:
        return self.mul_table()[(g, h)]

    def inv(self, g: Element) -> Element:
        return dict(self.inverse)[g]

    def __len__(self) -> int:
        return len(self.carrier)

    @classmethod
    def from_table(cls, name: str, elements: Sequence[str], table: Sequence[Sequence[str]]) -> "FinGroup":
        """Build from a square table with table[i][j] = elements[i] * elements[j]."""
        elems = tuple(elements)
        carrier = FinSet(name, elems)
        mul = {}
        for i, g in enumerate(elems):
            for j, h in enumerate(elems):
                mul[(g, h)] = table[i][j]
        unit = None
        for g in elems:
            if all(mul[(g, h)] == h and mul[(h, g)] == h for h in elems):
                unit = g
                break
        if unit is None:
            raise GroupError("no unit element found")
        inverse = {}
        for g in elems:
            for h in elems:
                if mul[(g, h)] == unit and mul[(h, g)] == unit:
                    inverse[g] = h
                    break
            else:
                raise GroupError(f"no inverse for {g!r}")
        return cls(
            carrier,
            tuple((g, h, gh) for (g, h), gh in mul.items()),
            unit,
            tuple(inverse.items()),
        )

    @classmethod
    def cyclic(cls, n: int) -> "FinGroup":
        elems = ["e"] + [f"r{i}" for i in range(1, n)]
        table = [
            [elems[(i + j) % n] for j in range(n)]
            for i in range(n)
        ]
        return cls.from_table(f"C{n}", elems, table)

    @classmethod
    def symmetric3(cls) -> "FinGroup":
        from itertools import permutations

        perms = list(permutations((0, 1, 2)))
        names = {p: "s" + "".join(map(str, p)) for p in perms}
        elems = [names[p] for p in perms]
        by_name = {v: k for k, v in names.items()}

        def mul(a, b):
            pa, pb = by_name[a], by_name[b]
            return names[tuple(pa[pb[i]] for i in range(3))]

        table = [[mul(a, b) for b in elems] for a in elems]
        return cls.from_table("S3", elems, table)


BUILTIN_GROUPS = {
    "C2": lambda: FinGroup.cyclic(2),
    "C3": lambda: FinGroup.cyclic(3),
    "S3": FinGroup.symmetric3,
}


@dataclass(frozen=True)
class Subgroup:
    group: FinGroup
    members: tuple

    def __post_init__(self):
        mem = set(self.members)
        if not mem <= set(self.group.carrier.elements):
            raise SubgroupError("members escape the group")
        if self.group.unit not in mem:
            raise SubgroupError("missing the unit")
        mul = self.group.mul_table()
        inv = dict(self.group.inverse)
        for g in self.members:
            if inv[g] not in mem:
                raise SubgroupError(f"missing inverse of {g!r}")
            for h in self.members:
                if mul[(g, h)] not in mem:
                    raise SubgroupError(f"not closed under {g!r}*{h!r}")

    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def is_full(self) -> bool:
        return len(self.members) == len(self.group)


def trivial_subgroup(group: FinGroup) -> Subgroup:
    return Subgroup(group, (group.unit,))


def full_subgroup(group: FinGroup) -> Subgroup:
    return Subgroup(group, group.carrier.elements)


def all_subgroups(group: FinGroup) -> list:
    """Every subgroup, enumerated deterministically by size then members."""
    elems = [g for g in group.carrier.elements if g != group.unit]
    out = []
    for k in range(len(elems) + 1):
        for chosen in combinations(elems, k):
            members = (group.unit,) + chosen
            try:
                out.append(Subgroup(group, members))
            except SubgroupError:
                continue
    return out


def subgroup_as_group(h: Subgroup) -> FinGroup:
    members = [g for g in h.group.carrier.elements if g in set(h.members)]
    mul = h.group.mul_table()
    table = [[mul[(a, b)] for b in members] for a in members]
    return FinGroup.from_table(
        f"sub({h.group.carrier.name};{','.join(members)})", members, table
    )


@dataclass(frozen=True)
class GSet:
    """A finite set with a validated group action."""

    group: FinGroup
    space: FinSet
    action: tuple  # ((g, x, gx), ...)

    def __post_init__(self):
        act = self.act_table()
        elems = self.space.elements
        gs = self.group.carrier.elements
        if set(act) != {(g, x) for g in gs for x in elems}:
            raise GroupError(f"action on {self.space.name!r} is not total")
        for (g, x), gx in act.items():
            if gx not in self.space:
                raise GroupError(f"action escapes the space at {(g, x)!r}")
        for x in elems:
            if act[(self.group.unit, x)] != x:
                raise GroupError(f"unit does not act trivially on {x!r}")
        mul = self.group.mul_table()
        for g in gs:
            for h in gs:
                for x in elems:
                    if act[(g, act[(h, x)])] != act[(mul[(g, h)], x)]:
                        raise GroupError(f"action not associative at {(g, h, x)!r}")

    def act_table(self) -> Dict[tuple, Element]:
        return {(g, x): gx for g, x, gx in self.action}

    def act(self, g: Element, x: Element) -> Element:
        return self.act_table()[(g, x)]

    def __len__(self) -> int:
        return len(self.space)


def trivial_gset(group: FinGroup, space: FinSet) -> GSet:
    return GSet(
        group,
        space,
        tuple((g, x, x) for g in group.carrier.elements for x in space.elements),
    )


def action_dict(gset: GSet) -> Dict[tuple, Element]:
    return gset.act_table()


def is_equivariant(
    m: FinMap, src: GSet, dst: GSet, members: Optional[Iterable[Element]] = None
) -> bool:
    if members is None:
        members = src.group.carrier.elements
    sa, da, mp = src.act_table(), dst.act_table(), m.mapping
    for g in members:
        for x in m.source.elements:
            if mp[sa[(g, x)]] != da[(g, mp[x])]:
                return False
    return True


def stabilizer(gset: GSet, x: Element) -> tuple:
    act = gset.act_table()
    return tuple(g for g in gset.group.carrier.elements if act[(g, x)] == x)


@dataclass(frozen=True)
class WeylData:
    """The normalizer quotient with coset representatives."""

    parent: FinGroup
    subgroup: Subgroup
    group: FinGroup
    cosets: tuple  # tuple of coset member tuples, aligned with group carrier
    rep_of: tuple  # ((normalizer element, representative), ...)

    def rep(self, w: Element) -> Element:
        # quotient elements are named by their representatives
        return w


def weyl(group: FinGroup, h: Subgroup) -> WeylData:
    """The quotient of the normalizer of h by h, computed by enumeration."""
    if h.group != group:
        raise SubgroupError("subgroup belongs to a different group")
    mul = group.mul_table()
    inv = dict(group.inverse)
    hset = set(h.members)
    normalizer = [
        g
        for g in group.carrier.elements
        if {mul[(mul[(g, x)], inv[g])] for x in h.members} == hset
    ]
    cosets = []
    seen = set()
    rep_of = {}
    for g in normalizer:
        if g in seen:
            continue
        coset = tuple(sorted((mul[(g, x)] for x in h.members),
                             key=group.carrier.elements.index))
        rep = group.unit if group.unit in coset else g
        for y in coset:
            seen.add(y)
            rep_of[y] = rep
        cosets.append(coset)
    reps = [rep_of[c[0]] for c in cosets]
    name = f"weyl({group.carrier.name};{','.join(h.members)})"
    table = [
        [rep_of[mul[(a, b)]] for b in reps]
        for a in reps
    ]
    wh = FinGroup.from_table(name, reps, table)
    return WeylData(group, h, wh, tuple(cosets), tuple(rep_of.items()))


def fixed_elements(gset: GSet, h: Subgroup) -> list:
    act = gset.act_table()
    return [
        x
        for x in gset.space.elements
        if all(act[(g, x)] == x for g in h.members)
    ]


def fixed_points(gset: GSet, h: Subgroup, w: Optional[WeylData] = None) -> GSet:
    """The h-fixed subset with its residual Weyl-group action."""
    if h.group != gset.group:
        raise SubgroupError("subgroup belongs to a different group")
    if w is None:
        w = weyl(gset.group, h)
    elems = fixed_elements(gset, h)
    space = FinSet(f"fix({gset.space.name})", elems, validate=False)
    act = gset.act_table()
    action = tuple(
        (rep, x, act[(rep, x)])
        for rep in w.group.carrier.elements
        for x in elems
    )
    return GSet(w.group, space, action)


# ---------------------------------------------------------------------------
# equivariant parametrized sets and cells


@dataclass(frozen=True)
class GParam:
    """A parametrized set whose total and base carry compatible actions."""

    group: FinGroup
    param: ParamSet
    base_act: GSet
    total_act: GSet

    def __post_init__(self):
        if self.base_act.space != self.param.base.space:
            raise GroupError("base action on the wrong space")
        if self.total_act.space != self.param.total:
            raise GroupError("total action on the wrong space")
        if not is_equivariant(self.param.proj, self.total_act, self.base_act):
            raise NotEquivariant("projection is not equivariant")


@dataclass(frozen=True)
class GCell1:
    """A 1-cell whose endpoints and total carry compatible actions."""

    group: FinGroup
    cell: Cell1
    src_act: GSet
    dst_act: GSet
    total_act: GSet

    def __post_init__(self):
        if self.src_act.space != self.cell.src.space:
            raise GroupError("source action on the wrong space")
        if self.dst_act.space != self.cell.dst.space:
            raise GroupError("target action on the wrong space")
        if self.total_act.space != self.cell.body.total:
            raise GroupError("total action on the wrong space")
        sa, da, ta = (
            self.src_act.act_table(),
            self.dst_act.act_table(),
            self.total_act.act_table(),
        )
        proj = self.cell.body.proj.mapping
        tb = self.cell.src.to_base.mapping
        for g in self.group.carrier.elements:
            for x in self.cell.body.total.elements:
                a, c = proj[x]
                a2, c2 = proj[ta[(g, x)]]
                if a2 != sa[(g, a)] or c2 != da[(g, c)]:
                    raise NotEquivariant(
                        f"projection not equivariant at {(g, x)!r}"
                    )
        for g in self.group.carrier.elements:
            for a in self.cell.src.space.elements:
                if tb[sa[(g, a)]] != tb[a]:
                    raise NotEquivariant("action moves points across the ambient base")


@dataclass(frozen=True)
class GCell2:
    src: GCell1
    dst: GCell1
    cell2: Cell2

    def __post_init__(self):
        if self.cell2.src != self.src.cell or self.cell2.dst != self.dst.cell:
            raise EndpointMismatch("wrapped 2-cell endpoints do not match")
        if not is_equivariant(self.cell2.map, self.src.total_act, self.dst.total_act):
            raise NotEquivariant("2-cell is not equivariant")


def pair_action(group: FinGroup, space: FinSet, left: GSet, right: GSet) -> GSet:
    """The componentwise action on a set of pairs drawn from two actions."""
    la, ra = left.act_table(), right.act_table()
    action = tuple(
        (g, x, (la[(g, x[0])], ra[(g, x[1])]))
        for g in group.carrier.elements
        for x in space.elements
    )
    return GSet(group, space, action)


def g_unit(group: FinGroup, a: GSet, ctx: Optional[BaseContext] = None) -> GCell1:
    if ctx is None:
        ctx = BaseContext.absolute()
    cell = unit(ctx, over_point(a.space))
    total_act = GSet(group, cell.body.total, a.action)
    return GCell1(group, cell, a, a, total_act)


def g_compose(x: GCell1, y: GCell1) -> GCell1:
    if x.group != y.group:
        raise GroupError("cells carry different groups")
    cell = compose(x.cell, y.cell)
    total_act = pair_action(x.group, cell.body.total, x.total_act, y.total_act)
    return GCell1(x.group, cell, x.src_act, y.dst_act, total_act)


def g_base_change(
    group: FinGroup,
    f: OverMap,
    src_act: GSet,
    dst_act: GSet,
    ctx: Optional[BaseContext] = None,
) -> Tuple[BaseChangeCell, GCell1]:
    """The equivariant base-change cell of an equivariant map."""
    if ctx is None:
        ctx = BaseContext.absolute()
    if not is_equivariant(f.map, src_act, dst_act):
        raise NotEquivariant("base-change map is not equivariant")
    bc = base_change(ctx, f)
    total_act = GSet(group, bc.cell.body.total, src_act.action)
    return bc, GCell1(group, bc.cell, dst_act, src_act, total_act)


def restrict_gset(x: GSet, h: Subgroup, hgroup: Optional[FinGroup] = None) -> GSet:
    if hgroup is None:
        hgroup = subgroup_as_group(h)
    members = set(h.members)
    action = tuple((g, a, ga) for g, a, ga in x.action if g in members)
    return GSet(hgroup, x.space, action)


def restrict(x: GCell1, h: Subgroup) -> GCell1:
    """Forget the action down to a subgroup; the cell itself is unchanged."""
    if h.group != x.group:
        raise SubgroupError("subgroup belongs to a different group")
    hgroup = subgroup_as_group(h)
    return GCell1(
        hgroup,
        x.cell,
        restrict_gset(x.src_act, h, hgroup),
        restrict_gset(x.dst_act, h, hgroup),
        restrict_gset(x.total_act, h, hgroup),
    )


def _fixed_param(
    param: ParamSet,
    base_act: GSet,
    total_act: GSet,
    h: Subgroup,
    w: WeylData,
    ctx: BaseContext,
) -> GParam:
    fixed_base = fixed_points(base_act, h, w)
    fixed_total = fixed_points(total_act, h, w)
    to_base = FinMap(
        fixed_base.space,
        ctx.base,
        {x: param.base.to_base.mapping[x] for x in fixed_base.space.elements},
        validate=False,
    )
    proj = FinMap(
        fixed_total.space,
        fixed_base.space,
        {x: param.proj.mapping[x] for x in fixed_total.space.elements},
        validate=False,
    )
    new = ParamSet(fixed_total.space, IndexedSpace(fixed_base.space, to_base), proj)
    return GParam(w.group, new, fixed_base, fixed_total)


def phi_param(x: GParam, h: Subgroup, w: Optional[WeylData] = None) -> GParam:
    """H-fixed points of an equivariant parametrized set."""
    if h.group != x.group:
        raise SubgroupError("subgroup belongs to a different group")
    if w is None:
        w = weyl(x.group, h)
    ctx = BaseContext(x.param.base.to_base.target)
    return _fixed_param(x.param, x.base_act, x.total_act, h, w, ctx)


def geometric_fixed_points(
    x: GCell1, h: Subgroup, w: Optional[WeylData] = None
) -> GCell1:
    """H-fixed points on endpoints and total, over the Weyl group of H."""
    if h.group != x.group:
        raise SubgroupError("subgroup belongs to a different group")
    if w is None:
        w = weyl(x.group, h)
    ctx = x.cell.ctx
    fsrc = fixed_points(x.src_act, h, w)
    fdst = fixed_points(x.dst_act, h, w)
    ftot = fixed_points(x.total_act, h, w)
    src = IndexedSpace(
        fsrc.space,
        FinMap(
            fsrc.space,
            ctx.base,
            {a: x.cell.src.to_base.mapping[a] for a in fsrc.space.elements},
            validate=False,
        ),
    )
    dst = IndexedSpace(
        fdst.space,
        FinMap(
            fdst.space,
            ctx.base,
            {c: x.cell.dst.to_base.mapping[c] for c in fdst.space.elements},
            validate=False,
        ),
    )
    from .smbf import fiber_product

    base, _ = fiber_product(ctx, [src, dst])
    proj = FinMap(
        ftot.space,
        base.space,
        {t: x.cell.body.proj.mapping[t] for t in ftot.space.elements},
        validate=False,
    )
    body = ParamSet(ftot.space, base, proj)
    cell = Cell1(ctx, src, dst, body)
    return GCell1(w.group, cell, fsrc, fdst, ftot)


def phi_cell2(phi: Cell2, src: GCell1, dst: GCell1, h: Subgroup,
              w: Optional[WeylData] = None) -> Cell2:
    """Restrict a 2-cell to fixed points.

    Only equivariance for the subgroup itself is required, so this also
    applies to maps that are not equivariant for the whole group.
    """
    if not is_equivariant(phi.map, src.total_act, dst.total_act, h.members):
        raise NotEquivariant("2-cell is not equivariant for the subgroup")
    if w is None:
        w = weyl(src.group, h)
    psrc = geometric_fixed_points(src, h, w)
    pdst = geometric_fixed_points(dst, h, w)
    mapping = {
        x: phi.map.mapping[x] for x in psrc.cell.body.total.elements
    }
    return Cell2(
        psrc.cell,
        pdst.cell,
        FinMap(psrc.cell.body.total, pdst.cell.body.total, mapping),
    )


def m_phi(x: GCell1, y: GCell1, h: Subgroup, w: Optional[WeylData] = None) -> Iso2:
    """fix(x) . fix(y)  ->  fix(x . y); the identity on pairs."""
    if w is None:
        w = weyl(x.group, h)
    lhs = compose(
        geometric_fixed_points(x, h, w).cell, geometric_fixed_points(y, h, w).cell
    )
    rhs = geometric_fixed_points(g_compose(x, y), h, w).cell
    fwd = {e: e for e in lhs.body.total.elements}
    bwd = {e: e for e in rhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd)),
    )


def i_phi(a: GSet, h: Subgroup, w: Optional[WeylData] = None) -> Iso2:
    """unit(fix a)  ->  fix(unit a); the identity on fixed points."""
    if w is None:
        w = weyl(a.group, h)
    fixed = fixed_points(a, h, w)
    lhs = unit(BaseContext.absolute(), over_point(fixed.space))
    rhs = geometric_fixed_points(g_unit(a.group, a), h, w).cell
    fwd = {e: e for e in lhs.body.total.elements}
    bwd = {e: e for e in rhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd)),
    )


def s_phi(x: GCell1, h: Subgroup, w: Optional[WeylData] = None) -> FinMap:
    """sh(fix x)  ->  fix(sh x); the identity on diagonal fixed elements."""
    if not x.cell.is_endo():
        raise EndpointMismatch("shadow comparison needs an endo-cell")
    if w is None:
        w = weyl(x.group, h)
    lhs = shadow(geometric_fixed_points(x, h, w).cell)
    sh = shadow(x.cell)
    sh_act = GSet(
        x.group,
        sh,
        tuple(
            (g, e, ge)
            for g, e, ge in x.total_act.action
            if e in sh
        ),
    )
    rhs = fixed_points(sh_act, h, w).space
    m = FinMap(lhs, rhs, {e: e for e in lhs.elements})
    if not m.is_bijection():
        raise SmbfError("shadow comparison failed to be a bijection")
    return m


def icon_eta(
    group: FinGroup,
    f: OverMap,
    src_act: GSet,
    dst_act: GSet,
    h: Subgroup,
    w: Optional[WeylData] = None,
) -> Iso2:
    """fix([f])  ->  [fix f]; the identity on fixed points of the graph."""
    if w is None:
        w = weyl(group, h)
    bc, gcell = g_base_change(group, f, src_act, dst_act)
    lhs = geometric_fixed_points(gcell, h, w).cell
    fsrc = fixed_points(src_act, h, w)
    fdst = fixed_points(dst_act, h, w)
    fixed_map = OverMap(
        over_point(fsrc.space),
        over_point(fdst.space),
        FinMap(
            fsrc.space,
            fdst.space,
            {a: f.map.mapping[a] for a in fsrc.space.elements},
        ),
    )
    rhs = base_change(BaseContext.absolute(), fixed_map).cell
    fwd = {e: e for e in lhs.body.total.elements}
    bwd = {e: e for e in rhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd)),
    )


# ---------------------------------------------------------------------------
# figure checks


def phi_assoc_failure(x: GCell1, y: GCell1, z: GCell1, h: Subgroup) -> Optional[dict]:
    w = weyl(x.group, h)
    px = geometric_fixed_points(x, h, w).cell
    py = geometric_fixed_points(y, h, w).cell
    pz = geometric_fixed_points(z, h, w).cell
    yz = g_compose(y, z)
    xy = g_compose(x, y)
    from .bicategory import hcompose_iso, identity_iso

    route_a = vcompose(
        m_phi(x, yz, h, w).forward,
        vcompose(
            hcompose_iso(identity_iso(px), m_phi(y, z, h, w)).forward,
            associator(px, py, pz).forward,
        ),
    )
    alpha_fixed = phi_cell2(
        associator(x.cell, y.cell, z.cell).forward,
        g_compose(xy, z),
        g_compose(x, yz),
        h,
        w,
    )
    route_b = vcompose(
        alpha_fixed,
        vcompose(
            m_phi(xy, z, h, w).forward,
            hcompose_iso(m_phi(x, y, h, w), identity_iso(pz)).forward,
        ),
    )
    return _first_difference(route_a.map, route_b.map)


def phi_unit_failure(x: GCell1, h: Subgroup) -> Optional[dict]:
    w = weyl(x.group, h)
    px = geometric_fixed_points(x, h, w).cell
    u = g_unit(x.group, x.src_act)
    from .bicategory import hcompose_iso, identity_iso

    route_a = left_unitor(px).forward
    ell_fixed = phi_cell2(
        left_unitor(x.cell).forward, g_compose(u, x), x, h, w
    )
    route_b = vcompose(
        ell_fixed,
        vcompose(
            m_phi(u, x, h, w).forward,
            hcompose_iso(i_phi(x.src_act, h, w), identity_iso(px)).forward,
        ),
    )
    d = _first_difference(route_a.map, route_b.map)
    if d is not None:
        return d
    ur = g_unit(x.group, x.dst_act)
    route_c = right_unitor(px).forward
    r_fixed = phi_cell2(right_unitor(x.cell).forward, g_compose(x, ur), x, h, w)
    route_d = vcompose(
        r_fixed,
        vcompose(
            m_phi(x, ur, h, w).forward,
            hcompose_iso(identity_iso(px), i_phi(x.dst_act, h, w)).forward,
        ),
    )
    return _first_difference(route_c.map, route_d.map)


def phi_rotator_failure(x: GCell1, y: GCell1, h: Subgroup) -> Optional[dict]:
    w = weyl(x.group, h)
    px = geometric_fixed_points(x, h, w).cell
    py = geometric_fixed_points(y, h, w).cell
    xy, yx = g_compose(x, y), g_compose(y, x)
    s_xy = s_phi(xy, h, w)
    s_yx = s_phi(yx, h, w)
    theta = rotator(x.cell, y.cell)
    theta_fixed = FinMap(
        s_xy.target,
        s_yx.target,
        {e: theta.mapping[e] for e in s_xy.target.elements},
    )
    route_a = compose_maps(
        theta_fixed,
        compose_maps(s_xy, shadow_on_2cells(m_phi(x, y, h, w).forward)),
    )
    route_b = compose_maps(
        compose_maps(s_yx, shadow_on_2cells(m_phi(y, x, h, w).forward)),
        rotator(px, py),
    )
    return _first_difference(route_a, route_b)


def icon_unit_failure(a: GSet, h: Subgroup) -> Optional[dict]:
    """The unit square: fixed points of the identity cell against the
    identity cell of the fixed points."""
    from .finset import identity as id_map

    w = weyl(a.group, h)
    f = OverMap(over_point(a.space), over_point(a.space), id_map(a.space))
    eta = icon_eta(a.group, f, a, a, h, w)
    iphi = i_phi(a, h, w)
    fixed = fixed_points(a, h, w)
    ident_cell = base_change(
        BaseContext.absolute(),
        OverMap(over_point(fixed.space), over_point(fixed.space), id_map(fixed.space)),
    ).cell
    if ident_cell != unit(BaseContext.absolute(), over_point(fixed.space)):
        return {"detail": "identity base-change cell is not the unit", "element": None}
    route = vcompose(eta.forward, iphi.forward)
    return _first_difference(
        route.map, identity2(ident_cell).map
    )


def icon_comp_failure(
    group: FinGroup,
    g: OverMap,
    f: OverMap,
    acts: Tuple[GSet, GSet, GSet],
    h: Subgroup,
) -> Optional[dict]:
    """The composition square relating fixed points of base-change cells."""
    a_act, b_act, c_act = acts
    w = weyl(group, h)
    bc_f, gcell_f = g_base_change(group, f, a_act, b_act)
    bc_g, gcell_g = g_base_change(group, g, b_act, c_act)
    eta_f = icon_eta(group, f, a_act, b_act, h, w)
    eta_g = icon_eta(group, g, b_act, c_act, h, w)
    from .bicategory import hcompose_iso

    gf = OverMap(f.src, g.dst, compose_maps(g.map, f.map))
    eta_gf = icon_eta(group, gf, a_act, c_act, h, w)
    fsrc = fixed_points(a_act, h, w)
    fmid = fixed_points(b_act, h, w)
    fdst = fixed_points(c_act, h, w)
    f_fixed = base_change(
        BaseContext.absolute(),
        OverMap(
            over_point(fsrc.space),
            over_point(fmid.space),
            FinMap(fsrc.space, fmid.space, {x: f.map.mapping[x] for x in fsrc.space.elements}),
        ),
    )
    g_fixed = base_change(
        BaseContext.absolute(),
        OverMap(
            over_point(fmid.space),
            over_point(fdst.space),
            FinMap(fmid.space, fdst.space, {x: g.map.mapping[x] for x in fmid.space.elements}),
        ),
    )
    route_a = vcompose(
        m_bc(g_fixed, f_fixed).forward,
        hcompose_iso(eta_g, eta_f).forward,
    )
    comp_fixed = phi_cell2(
        m_bc(bc_g, bc_f).forward,
        g_compose(gcell_g, gcell_f),
        _g_bc_cell(group, gf, a_act, c_act),
        h,
        w,
    )
    route_b = vcompose(eta_gf.forward, vcompose(comp_fixed, m_phi(gcell_g, gcell_f, h, w).forward))
    return _first_difference(route_a.map, route_b.map)


def _g_bc_cell(group, f, src_act, dst_act):
    _, cell = g_base_change(group, f, src_act, dst_act)
    return cell


def phi_smash_failure(xs: Sequence[GParam], h: Subgroup) -> Optional[dict]:
    """Fixed points of an external product against the product of fixed
    points, compared elementwise."""
    xs = list(xs)
    group = xs[0].group
    w = weyl(group, h)
    ctx = BaseContext(xs[0].param.base.to_base.target)
    prod = external_product(ctx, [x.param for x in xs])
    n = len(xs)
    base_act = _nested_action(group, prod.base.space, [x.base_act for x in xs], n)
    total_act = _nested_action(group, prod.total, [x.total_act for x in xs], n)
    gprod = GParam(group, prod, base_act, total_act)
    lhs = phi_param(gprod, h, w)
    fixed_factors = [phi_param(x, h, w) for x in xs]
    rhs = external_product(ctx, [x.param for x in fixed_factors])
    if sorted(map(repr, lhs.param.total.elements)) != sorted(
        map(repr, rhs.total.elements)
    ):
        return {"detail": "fixed product and product of fixed parts differ",
                "element": None}
    for e in lhs.param.total.elements:
        if lhs.param.proj.mapping[e] != rhs.proj.mapping[e]:
            return {"detail": "projections disagree", "element": repr(e)}
    return None


def _nested_action(group, space, factor_acts, n):
    from .finset import nest, unnest

    tables = [a.act_table() for a in factor_acts]
    action = []
    for g in group.carrier.elements:
        for e in space.elements:
            parts = unnest(e, n) if n > 1 else [e]
            image = nest([tables[i][(g, parts[i])] for i in range(n)])
            action.append((g, e, image))
    return GSet(group, space, tuple(action))


def phi_pullback_failure(hmap: OverMap, x: GParam, acts: Tuple[GSet, GSet],
                         h: Subgroup) -> Optional[dict]:
    """Fixed points commute with pullback along an equivariant map."""
    src_act, dst_act = acts
    group = x.group
    w = weyl(group, h)
    if not is_equivariant(hmap.map, src_act, dst_act):
        raise NotEquivariant("pullback map is not equivariant")
    pulled, _ = pullback_along(hmap, x.param)
    base_act = GSet(group, pulled.base.space, src_act.action)
    total_act = pair_action(group, pulled.total, src_act, x.total_act)
    gpulled = GParam(group, pulled, base_act, total_act)
    lhs = phi_param(gpulled, h, w)

    fx = phi_param(x, h, w)
    fsrc = fixed_points(src_act, h, w)
    fixed_map = OverMap(
        IndexedSpace(fsrc.space, FinMap(
            fsrc.space, hmap.src.to_base.target,
            {a: hmap.src.to_base.mapping[a] for a in fsrc.space.elements},
            validate=False)),
        fx.param.base,
        FinMap(fsrc.space, fx.param.base.space,
               {a: hmap.map.mapping[a] for a in fsrc.space.elements}),
    )
    rhs, _ = pullback_along(fixed_map, fx.param)
    if sorted(map(repr, lhs.param.total.elements)) != sorted(map(repr, rhs.total.elements)):
        return {"detail": "fixed pullback and pullback of fixed parts differ",
                "element": None}
    return None


def phi_pushforward_failure(hmap: OverMap, x: GParam, acts: Tuple[GSet, GSet],
                            h: Subgroup) -> Optional[dict]:
    """Fixed points commute with pushforward along an equivariant map."""
    src_act, dst_act = acts
    group = x.group
    w = weyl(group, h)
    if not is_equivariant(hmap.map, src_act, dst_act):
        raise NotEquivariant("pushforward map is not equivariant")
    pushed = pushforward_along(hmap, x.param)
    gpushed = GParam(group, pushed, GSet(group, pushed.base.space, dst_act.action),
                     x.total_act)
    lhs = phi_param(gpushed, h, w)
    fx = phi_param(x, h, w)
    fdst = fixed_points(dst_act, h, w)
    fixed_map = OverMap(
        fx.param.base,
        IndexedSpace(fdst.space, FinMap(
            fdst.space, hmap.dst.to_base.target,
            {a: hmap.dst.to_base.mapping[a] for a in fdst.space.elements},
            validate=False)),
        FinMap(fx.param.base.space, fdst.space,
               {a: hmap.map.mapping[a] for a in fx.param.base.space.elements}),
    )
    rhs = pushforward_along(fixed_map, fx.param)
    if set(lhs.param.total.elements) != set(rhs.total.elements):
        return {"detail": "fixed pushforward and pushforward of fixed parts differ",
                "element": None}
    for e in lhs.param.total.elements:
        if lhs.param.proj.mapping[e] != rhs.proj.mapping[e]:
            return {"detail": "projections disagree", "element": repr(e)}
    return None


def restrict_is_strict(x: GCell1, y: GCell1, h: Subgroup) -> Optional[dict]:
    """Restriction is a strict functor: no comparison maps are needed."""
    rx, ry = restrict(x, h), restrict(y, h)
    if restrict(g_compose(x, y), h) != g_compose(rx, ry):
        return {"detail": "restriction fails to be strict on composites",
                "element": None}
    ru = restrict(g_unit(x.group, x.src_act), h)
    if ru != g_unit(subgroup_as_group(h), restrict_gset(x.src_act, h)):
        return {"detail": "restriction fails to be strict on units", "element": None}
    return None


DIAGRAMS = (
    "equivariant.assoc",
    "equivariant.unit",
    "equivariant.rotator",
    "equivariant.icon",
    "equivariant.smash",
    "equivariant.pullback",
    "equivariant.pushforward",
    "equivariant.restrict",
)


def check_diagram(
    name: str,
    instances: int,
    rng,
    group: Optional[FinGroup] = None,
    subgroup: Optional[Subgroup] = None,
    max_size: int = 4,
    max_total: int = 6,
    **_,
) -> list:
    """Seeded random instances of the fixed-point functor figures.

    Without an explicit group, each instance draws one of the built-in
    groups and one of its subgroups.
    """
    from . import randgen_equivariant as rge

    if name not in DIAGRAMS:
        raise UnknownDiagram(f"unknown diagram {name!r}")
    failures = []
    for i in range(instances):
        g = group if group is not None else rge.draw_group(rng)
        h = subgroup if subgroup is not None else rng.choice(all_subgroups(g))
        names = rge.NameSource()
        failure = _run_equivariant_instance(name, rng, g, h, names, max_size, max_total)
        if failure is not None:
            failure["instance"] = i
            failure["group"] = g.carrier.name
            failure["subgroup"] = ",".join(h.members)
            failures.append(failure)
    return failures


def _run_equivariant_instance(name, rng, g, h, names, max_size, max_total):
    from . import randgen_equivariant as rge

    if name == "equivariant.assoc":
        a, b, c, d = (rge.random_gset(rng, g, names, max_size) for _ in range(4))
        x = rge.random_gcell(rng, g, a, b, names, max_total)
        y = rge.random_gcell(rng, g, b, c, names, max_total)
        z = rge.random_gcell(rng, g, c, d, names, max_total)
        return phi_assoc_failure(x, y, z, h)
    if name == "equivariant.unit":
        a, b = (rge.random_gset(rng, g, names, max_size) for _ in range(2))
        x = rge.random_gcell(rng, g, a, b, names, max_total)
        return phi_unit_failure(x, h)
    if name == "equivariant.rotator":
        a, b = (rge.random_gset(rng, g, names, max_size) for _ in range(2))
        x = rge.random_gcell(rng, g, a, b, names, max_total)
        y = rge.random_gcell(rng, g, b, a, names, max_total)
        return phi_rotator_failure(x, y, h)
    if name == "equivariant.icon":
        a = rge.random_gset(rng, g, names, max_size)
        d = icon_unit_failure(a, h)
        if d is not None:
            return d
        b = rge.random_gset(rng, g, names, max_size)
        c = rge.random_gset(rng, g, names, max_size)
        try:
            f = rge.random_equivariant_overmap(rng, g, a, b)
            gm = rge.random_equivariant_overmap(rng, g, b, c)
        except ValueError:
            return None
        return icon_comp_failure(g, gm, f, (a, b, c), h)
    if name == "equivariant.smash":
        xs = [rge.random_gparam(rng, g, names, max_size, max_total) for _ in range(2)]
        return phi_smash_failure(xs, h)
    if name == "equivariant.pullback":
        a = rge.random_gset(rng, g, names, max_size)
        b = rge.random_gset(rng, g, names, max_size)
        try:
            hm = rge.random_equivariant_overmap(rng, g, a, b)
        except ValueError:
            return None
        x = rge.random_gparam_over(rng, g, b, names, max_total)
        return phi_pullback_failure(hm, x, (a, b), h)
    if name == "equivariant.pushforward":
        a = rge.random_gset(rng, g, names, max_size)
        b = rge.random_gset(rng, g, names, max_size)
        try:
            hm = rge.random_equivariant_overmap(rng, g, a, b)
        except ValueError:
            return None
        x = rge.random_gparam_over(rng, g, a, names, max_total)
        return phi_pushforward_failure(hm, x, (a, b), h)
    # equivariant.restrict
    a, b, c = (rge.random_gset(rng, g, names, max_size) for _ in range(3))
    x = rge.random_gcell(rng, g, a, b, names, max_total)
    y = rge.random_gcell(rng, g, b, c, names, max_total)
    return restrict_is_strict(x, y, h)
