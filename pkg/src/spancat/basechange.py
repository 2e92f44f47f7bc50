"""Base-change 1-cells: encoding maps of 0-cells inside the bicategory.

The cell of a map f: A -> B is A sitting over B x A via (f, 1); its
graph-style structure map is injective, so the defining span is rigid
and these cells admit no nonidentity automorphisms.  Composing with a
base-change cell on either side performs pushforward or pullback, and
the comparison isomorphisms below realize pseudofunctoriality.

Orientation: the cell of f: A -> B runs from B to A, so that cells
compose in the same order as the underlying maps ([g] after [f] equals
[g o f]).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .bicategory import Cell1, Cell2, Iso2, compose, shadow, unit
from .finset import FinMap, FinSet, compose as compose_maps, identity, is_injective, nest, unnest
from .smbf import (
    BaseContext,
    EndpointMismatch,
    IndexedSpace,
    OverMap,
    ParamSet,
    SmbfError,
    fiber_product,
)


@dataclass(frozen=True)
class BaseChangeCell:
    """A map of 0-cells together with the 1-cell presenting it."""

    f: OverMap
    cell: Cell1

    def __post_init__(self):
        if not is_injective(self.cell.body.proj):
            raise SmbfError("base-change structure map failed to be injective")


def base_change(ctx: BaseContext, f: OverMap) -> BaseChangeCell:
    """The 1-cell of f: A -> B, running from B to A over B x A."""
    ctx.check_space(f.src)
    ctx.check_space(f.dst)
    base, _ = fiber_product(ctx, [f.dst, f.src])
    total = f.src.space
    proj = FinMap(
        total, base.space, {a: (f.map.mapping[a], a) for a in total.elements},
        validate=False,
    )
    body = ParamSet(total, base, proj, validate=False)
    return BaseChangeCell(f, Cell1(ctx, f.dst, f.src, body, validate=False))


def m_bc(g: BaseChangeCell, f: BaseChangeCell) -> Iso2:
    """[g] . [f]  ->  [g o f], dropping the redundant middle coordinate."""
    if g.f.src != f.f.dst:
        raise EndpointMismatch("base-change cells are not composable")
    lhs = compose(g.cell, f.cell)
    gf = OverMap(f.f.src, g.f.dst, compose_maps(g.f.map, f.f.map))
    rhs = base_change(f.cell.ctx, gf).cell
    fwd = {e: e[1] for e in lhs.body.total.elements}
    bwd = {a: (f.f.map.mapping[a], a) for a in rhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd, validate=False)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, bwd, validate=False)),
    )


def iterated_bc(f: BaseChangeCell, n: int) -> tuple:
    """([f]^n as a left-nested composite, the comparison to [f^n]).

    Builds the comparison by induction on the pairwise isomorphism, so
    the result is the composite 2-cell chain evaluated in one map.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ctx = f.cell.ctx
    power = f
    composite = f.cell
    comparison = {e: e for e in f.cell.body.total.elements}
    for _ in range(n - 1):
        composite = compose(composite, f.cell)
        step = m_bc(power, f)
        fpow = OverMap(
            f.f.src, power.f.dst, compose_maps(power.f.map, f.f.map)
        )
        power = base_change(ctx, fpow)
        comparison = {
            e: step.forward.map.mapping[(comparison[e[0]], e[1])]
            for e in composite.body.total.elements
        }
    cmp_map = FinMap(
        composite.body.total, power.cell.body.total, comparison, validate=False
    )
    return composite, power, cmp_map


def nu(ctx: BaseContext, fs: Sequence[BaseChangeCell]) -> Iso2:
    """box([f_i])  ->  [prod f_i], regrouping the product coordinates."""
    from .fuller import box

    fs = list(fs)
    if not fs:
        raise EndpointMismatch("empty family")
    lhs = box([c.cell for c in fs])
    src_prod, src_projs = fiber_product(ctx, [c.f.src for c in fs])
    dst_prod, _ = fiber_product(ctx, [c.f.dst for c in fs])
    n = len(fs)
    if n == 1:
        prod_map = fs[0].f.map
    else:
        prod_map = FinMap(
            src_prod.space,
            dst_prod.space,
            {
                e: nest([fs[i].f.map.mapping[p] for i, p in enumerate(unnest(e, n))])
                for e in src_prod.space.elements
            },
            validate=False,
        )
    rhs = base_change(ctx, OverMap(src_prod, dst_prod, prod_map)).cell
    fwd = {e: e for e in lhs.body.total.elements}
    return Iso2(
        Cell2(lhs, rhs, FinMap(lhs.body.total, rhs.body.total, fwd, validate=False)),
        Cell2(rhs, lhs, FinMap(rhs.body.total, lhs.body.total, fwd, validate=False)),
    )


def fixed_point_set(f: BaseChangeCell) -> FinSet:
    """The shadow of an endo base-change cell: the fixed points of f."""
    if f.f.src != f.f.dst:
        raise EndpointMismatch("fixed points need an endo map")
    return shadow(f.cell)


# ---------------------------------------------------------------------------
# figure checks


def bc_assoc_failure(h: BaseChangeCell, g: BaseChangeCell, f: BaseChangeCell) -> Optional[dict]:
    """Both composition routes ([h][g])[f] -> [hgf] agree pointwise."""
    from .bicategory import associator, hcompose_iso, identity_iso, vcompose

    alpha = associator(h.cell, g.cell, f.cell).forward
    route_a = vcompose(
        m_bc(h, _compose_bc(g, f)).forward,
        hcompose_iso(identity_iso(h.cell), m_bc(g, f)).forward,
    )
    route_a = vcompose(route_a, alpha)
    route_b = vcompose(
        m_bc(_compose_bc(h, g), f).forward,
        hcompose_iso(m_bc(h, g), identity_iso(f.cell)).forward,
    )
    from .bicategory import _first_difference

    return _first_difference(route_a.map, route_b.map)


def _compose_bc(g: BaseChangeCell, f: BaseChangeCell) -> BaseChangeCell:
    return base_change(
        f.cell.ctx, OverMap(f.f.src, g.f.dst, compose_maps(g.f.map, f.f.map))
    )


def bc_unit_failure(f: BaseChangeCell) -> Optional[dict]:
    """The unit route U . [f] -> [f] through [id] equals the left unitor."""
    from .bicategory import _first_difference, left_unitor

    ctx = f.cell.ctx
    ident = base_change(ctx, OverMap(f.f.dst, f.f.dst, identity(f.f.dst.space)))
    if ident.cell != unit(ctx, f.f.dst):
        return {"detail": "identity base-change cell is not the unit", "element": None}
    route_a = m_bc(ident, f).forward
    route_b = left_unitor(f.cell).forward
    return _first_difference(route_a.map, route_b.map)


def bc_vert_comp_failure(
    ctx: BaseContext, gs: Sequence[BaseChangeCell], fs: Sequence[BaseChangeCell]
) -> Optional[dict]:
    """Composing then regrouping equals regrouping then composing."""
    from .bicategory import _first_difference, hcompose_iso, vcompose
    from .fuller import box2, m_box

    gs, fs = list(gs), list(fs)
    pair_m = m_box([g.cell for g in gs], [f.cell for f in fs])
    boxed_pairs = box2([m_bc(g, f).forward for g, f in zip(gs, fs)])
    route_a = vcompose(boxed_pairs, pair_m.forward)
    route_a = vcompose(nu(ctx, [_compose_bc(g, f) for g, f in zip(gs, fs)]).forward, route_a)

    prod_g = nu(ctx, gs)
    prod_f = nu(ctx, fs)
    route_b = vcompose(
        m_bc(_nu_target(ctx, gs), _nu_target(ctx, fs)).forward,
        hcompose_iso(prod_g, prod_f).forward,
    )
    # the two routes end at [prod g o prod f] and [prod (g o f)]; these
    # agree strictly because products of maps compose componentwise
    if route_a.dst != route_b.dst:
        return {"detail": "strict product equality failed", "element": None}
    return _first_difference(route_a.map, route_b.map)


def _nu_target(ctx: BaseContext, fs: Sequence[BaseChangeCell]) -> BaseChangeCell:
    iso = nu(ctx, list(fs))
    target = iso.forward.dst
    # rebuild the BaseChangeCell wrapper for the product map
    n = len(list(fs))
    fs = list(fs)
    src_prod, _ = fiber_product(ctx, [c.f.src for c in fs])
    dst_prod, _ = fiber_product(ctx, [c.f.dst for c in fs])
    if n == 1:
        prod_map = fs[0].f.map
    else:
        prod_map = FinMap(
            src_prod.space,
            dst_prod.space,
            {
                e: nest([fs[i].f.map.mapping[p] for i, p in enumerate(unnest(e, n))])
                for e in src_prod.space.elements
            },
            validate=False,
        )
    return BaseChangeCell(OverMap(src_prod, dst_prod, prod_map), target)


def bc_vert_unit_failure(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> Optional[dict]:
    """On identity maps, regrouping is compatible with the unit comparison."""
    from .bicategory import _first_difference
    from .fuller import i_box

    spaces = list(spaces)
    ids = [base_change(ctx, OverMap(a, a, identity(a.space))) for a in spaces]
    prod, _ = fiber_product(ctx, spaces)
    ident_prod = base_change(ctx, OverMap(prod, prod, identity(prod.space)))
    if ident_prod.cell != unit(ctx, prod):
        return {"detail": "identity base-change cell is not the unit", "element": None}
    for a, c in zip(spaces, ids):
        if c.cell != unit(ctx, a):
            return {"detail": "identity base-change cell is not the unit", "element": None}
    route_a = i_box(ctx, spaces).forward
    route_b = nu(ctx, ids).backward
    return _first_difference(route_a.map, route_b.map)


def bc_final_failure(ctx: BaseContext, ps: Sequence[BaseChangeCell]) -> Optional[dict]:
    """The twist-versus-product square for base-change cells.

    Uses the structural equality between the twist cell and the
    base-change cell of the cyclic shift.
    """
    from .bicategory import _first_difference, hcompose_iso, identity_iso, vcompose
    from .fuller import twist_cell, vartheta

    ps = list(ps)
    n = len(ps)
    bs = [p.f.dst for p in ps]
    es = [p.f.src for p in ps]
    t_b = twist_cell(ctx, bs)
    t_e = twist_cell(ctx, es)

    gamma_b = _shift_overmap(ctx, bs)
    gamma_e = _shift_overmap(ctx, es)
    if t_b.cell != base_change(ctx, gamma_b).cell:
        return {"detail": "twist cell is not the shift base-change cell", "element": None}

    theta = vartheta([p.cell for p in ps])
    shifted = [ps[(i + 1) % n] for i in range(n)]
    route_a = vcompose(
        hcompose_iso(nu(ctx, shifted), identity_iso(t_e.cell)).forward, theta.forward
    )
    route_a = vcompose(
        m_bc(_nu_target(ctx, shifted), BaseChangeCell(gamma_e, t_e.cell)).forward,
        route_a,
    )
    route_b = vcompose(
        m_bc(BaseChangeCell(gamma_b, t_b.cell), _nu_target(ctx, ps)).forward,
        hcompose_iso(identity_iso(t_b.cell), nu(ctx, ps)).forward,
    )
    if route_a.dst != route_b.dst:
        return {"detail": "shifted product maps disagree", "element": None}
    return _first_difference(route_a.map, route_b.map)


def _shift_overmap(ctx: BaseContext, spaces: Sequence[IndexedSpace]) -> OverMap:
    spaces = list(spaces)
    n = len(spaces)
    prod, _ = fiber_product(ctx, spaces)
    shifted, _ = fiber_product(ctx, spaces[1:] + spaces[:1])
    if n == 1:
        return OverMap(prod, shifted, identity(prod.space))
    mapping = {
        e: nest(unnest(e, n)[1:] + unnest(e, n)[:1]) for e in prod.space.elements
    }
    return OverMap(prod, shifted, FinMap(prod.space, shifted.space, mapping, validate=False))


DIAGRAMS = ("bc.assoc", "bc.unit", "bc.vert_comp", "bc.vert_unit", "bc.final")


def check_diagram(
    name: str,
    instances: int,
    rng,
    ctx: Optional[BaseContext] = None,
    max_size: int = 4,
    n: int = 2,
    **_,
):
    """Seeded random instances of the base-change coherence figures."""
    from . import randgen
    from .bicategory import UnknownDiagram

    if ctx is None:
        ctx = BaseContext.absolute()
    if name not in DIAGRAMS:
        raise UnknownDiagram(f"unknown diagram {name!r}")
    failures = []
    for i in range(instances):
        names = randgen.NameSource()
        try:
            if name == "bc.assoc":
                cells = _random_bc_chain(rng, ctx, 3, names, max_size)
                failure = bc_assoc_failure(*cells)
            elif name == "bc.unit":
                (f,) = _random_bc_chain(rng, ctx, 1, names, max_size)
                failure = bc_unit_failure(f)
            elif name == "bc.vert_comp":
                gs, fs = [], []
                for _k in range(n):
                    g, f = _random_bc_chain(rng, ctx, 2, names, max_size)
                    gs.append(g)
                    fs.append(f)
                failure = bc_vert_comp_failure(ctx, gs, fs)
            elif name == "bc.vert_unit":
                spaces = [
                    randgen.random_indexed_space(rng, ctx, names, max_size)
                    for _k in range(n)
                ]
                failure = bc_vert_unit_failure(ctx, spaces)
            else:
                ps = []
                for _k in range(n):
                    (p,) = _random_bc_chain(rng, ctx, 1, names, max_size)
                    ps.append(p)
                failure = bc_final_failure(ctx, ps)
        except ValueError:
            continue
        if failure is not None:
            failure["instance"] = i
            failures.append(failure)
    return failures


def _random_bc_chain(rng, ctx, length, names, max_size):
    """Base-change cells along a chain A0 <- A1 <- ... so they compose."""
    from . import randgen

    spaces = [
        randgen.random_indexed_space(rng, ctx, names, max_size, cover_base=True)
        for _ in range(length + 1)
    ]
    cells = []
    for i in range(length):
        m = randgen._random_over_map(rng, spaces[i + 1], spaces[i])
        cells.append(base_change(ctx, OverMap(spaces[i + 1], spaces[i], m)))
    # cells[0] encodes the outermost map, so the list is (g, f, ...) ordered
    return cells
