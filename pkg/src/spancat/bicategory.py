"""The bicategory of spans of finite sets over an ambient base.

0-cells are indexed spaces, a 1-cell from A to C is a parametrized set
over the fiber product A x C, and 2-cells are maps over that product.
Horizontal composition pairs elements that agree over the middle
0-cell.  The coherence isomorphisms (associator, unitors, rotator) are
given by direct element formulas; their agreement with the
pull-push route through span actions is checked in the test suite, and
the figure-level axioms are exercised by :func:`check_diagram`.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .finset import Element, FinMap, FinSet, compose as compose_maps, identity
from .smbf import (
    BaseContext,
    ContextMismatch,
    EndpointMismatch,
    IndexedSpace,
    ParamSet,
    SmbfError,
    fiber_product,
)


class UnknownDiagram(SmbfError):
    pass


class Cell1:
    """A 1-cell: a parametrized set over src x dst with named endpoints."""

    __slots__ = ("ctx", "src", "dst", "body")

    def __init__(
        self,
        ctx: BaseContext,
        src: IndexedSpace,
        dst: IndexedSpace,
        body: ParamSet,
        validate: bool = True,
    ):
        self.ctx = ctx
        self.src = src
        self.dst = dst
        self.body = body
        if validate:
            base, _ = fiber_product(ctx, [src, dst])
            if body.base != base:
                raise EndpointMismatch(
                    f"cell body over {body.base.space.name!r} does not sit over "
                    f"{base.space.name!r}"
                )

    def src_coord(self, x: Element) -> Element:
        return self.body.proj.mapping[x][0]

    def dst_coord(self, x: Element) -> Element:
        return self.body.proj.mapping[x][1]

    def is_endo(self) -> bool:
        return self.src == self.dst

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cell1):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.src == other.src
            and self.dst == other.dst
            and self.body == other.body
        )

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"Cell1({self.src.space.name!r} -> {self.dst.space.name!r}, "
            f"{len(self.body.total)} elements)"
        )


class Cell2:
    """A 2-cell: a map of totals commuting with both projections."""

    __slots__ = ("src", "dst", "map")

    def __init__(self, src: Cell1, dst: Cell1, map: FinMap, validate: bool = True):
        self.src = src
        self.dst = dst
        self.map = map
        if validate:
            if src.src != dst.src or src.dst != dst.dst or src.ctx != dst.ctx:
                raise EndpointMismatch("2-cell between 1-cells with different endpoints")
            if map.source != src.body.total or map.target != dst.body.total:
                raise EndpointMismatch("2-cell map endpoints do not match the bodies")
            sp, dp, m = src.body.proj.mapping, dst.body.proj.mapping, map.mapping
            for x in src.body.total.elements:
                if dp[m[x]] != sp[x]:
                    raise SmbfError(f"2-cell does not commute with projections at {x!r}")

    def __call__(self, x: Element) -> Element:
        return self.map.mapping[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cell2):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.map == other.map

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Cell2({self.src!r} => {self.dst!r})"


class Iso2:
    """An invertible 2-cell with its stored inverse, checked on construction."""

    __slots__ = ("forward", "backward")

    def __init__(self, forward: Cell2, backward: Cell2, validate: bool = True):
        self.forward = forward
        self.backward = backward
        if validate:
            if forward.src != backward.dst or forward.dst != backward.src:
                raise EndpointMismatch("inverse endpoints do not match")
            fm, bm = forward.map.mapping, backward.map.mapping
            for x in forward.src.body.total.elements:
                if bm[fm[x]] != x:
                    raise SmbfError(f"not a two-sided inverse at {x!r}")
            for y in forward.dst.body.total.elements:
                if fm[bm[y]] != y:
                    raise SmbfError(f"not a two-sided inverse at {y!r}")

    @property
    def src(self) -> Cell1:
        return self.forward.src

    @property
    def dst(self) -> Cell1:
        return self.forward.dst

    def inverse(self) -> "Iso2":
        return Iso2(self.backward, self.forward, validate=False)


def identity2(x: Cell1) -> Cell2:
    return Cell2(x, x, identity(x.body.total), validate=False)


def identity_iso(x: Cell1) -> Iso2:
    return Iso2(identity2(x), identity2(x), validate=False)


def vcompose(second: Cell2, first: Cell2) -> Cell2:
    """Vertical composition: second after first."""
    if first.dst != second.src:
        raise EndpointMismatch("2-cells are not vertically composable")
    return Cell2(first.src, second.dst, compose_maps(second.map, first.map), validate=False)


def vcompose_iso(second: Iso2, first: Iso2) -> Iso2:
    return Iso2(
        vcompose(second.forward, first.forward),
        vcompose(first.backward, second.backward),
        validate=False,
    )


def unit(ctx: BaseContext, a: IndexedSpace) -> Cell1:
    """The unit 1-cell: the 0-cell itself sitting over the diagonal."""
    ctx.check_space(a)
    base, _ = fiber_product(ctx, [a, a])
    proj = FinMap(a.space, base.space, {x: (x, x) for x in a.space.elements}, validate=False)
    return Cell1(ctx, a, a, ParamSet(a.space, base, proj, validate=False), validate=False)


def compose(x: Cell1, y: Cell1, validate: bool = True) -> Cell1:
    """Horizontal composition: pairs of elements agreeing over the middle."""
    if x.ctx != y.ctx:
        raise ContextMismatch("cells from different contexts")
    if x.dst != y.src:
        raise EndpointMismatch(
            f"cannot compose {x.dst.space.name!r} with {y.src.space.name!r}"
        )
    base, _ = fiber_product(x.ctx, [x.src, y.dst])
    index: dict = {}
    for e in y.body.total.elements:
        index.setdefault(y.src_coord(e), []).append(e)
    pairs = []
    proj = {}
    for ex in x.body.total.elements:
        a = x.src_coord(ex)
        for ey in index.get(x.dst_coord(ex), ()):
            p = (ex, ey)
            pairs.append(p)
            proj[p] = (a, y.dst_coord(ey))
    name = f"odot({x.body.total.name},{y.body.total.name})"
    total = FinSet(name, pairs, validate=False)
    body = ParamSet(
        total, base, FinMap(total, base.space, proj, validate=False), validate=False
    )
    return Cell1(x.ctx, x.src, y.dst, body, validate=validate)


def compose_many(cells: Sequence[Cell1]) -> Cell1:
    """Left-nested horizontal composite of a nonempty chain."""
    cells = list(cells)
    if not cells:
        raise EndpointMismatch("empty composite")
    acc = cells[0]
    for c in cells[1:]:
        acc = compose(acc, c)
    return acc


def hcompose(phi: Cell2, psi: Cell2) -> Cell2:
    """Horizontal composition of 2-cells, componentwise on pairs."""
    src = compose(phi.src, psi.src)
    dst = compose(phi.dst, psi.dst)
    pm, qm = phi.map.mapping, psi.map.mapping
    mapping = {e: (pm[e[0]], qm[e[1]]) for e in src.body.total.elements}
    return Cell2(src, dst, FinMap(src.body.total, dst.body.total, mapping, validate=False))


def hcompose_iso(phi: Iso2, psi: Iso2) -> Iso2:
    return Iso2(hcompose(phi.forward, psi.forward), hcompose(phi.backward, psi.backward))


def associator(x: Cell1, y: Cell1, z: Cell1) -> Iso2:
    """The rebracketing isomorphism (x . y) . z  ->  x . (y . z)."""
    left = compose(compose(x, y), z)
    right = compose(x, compose(y, z))
    fwd = {e: (e[0][0], (e[0][1], e[1])) for e in left.body.total.elements}
    bwd = {e: ((e[0], e[1][0]), e[1][1]) for e in right.body.total.elements}
    return Iso2(
        Cell2(left, right, FinMap(left.body.total, right.body.total, fwd, validate=False)),
        Cell2(right, left, FinMap(right.body.total, left.body.total, bwd, validate=False)),
    )


def left_unitor(x: Cell1) -> Iso2:
    """unit(src) . x  ->  x, dropping the diagonal component."""
    u = unit(x.ctx, x.src)
    ux = compose(u, x)
    fwd = {e: e[1] for e in ux.body.total.elements}
    bwd = {e: (x.src_coord(e), e) for e in x.body.total.elements}
    return Iso2(
        Cell2(ux, x, FinMap(ux.body.total, x.body.total, fwd, validate=False)),
        Cell2(x, ux, FinMap(x.body.total, ux.body.total, bwd, validate=False)),
    )


def right_unitor(x: Cell1) -> Iso2:
    """x . unit(dst)  ->  x."""
    u = unit(x.ctx, x.dst)
    xu = compose(x, u)
    fwd = {e: e[0] for e in xu.body.total.elements}
    bwd = {e: (e, x.dst_coord(e)) for e in x.body.total.elements}
    return Iso2(
        Cell2(xu, x, FinMap(xu.body.total, x.body.total, fwd, validate=False)),
        Cell2(x, xu, FinMap(x.body.total, xu.body.total, bwd, validate=False)),
    )


def shadow(x: Cell1) -> FinSet:
    """Elements of an endo-1-cell whose two projections agree."""
    if not x.is_endo():
        raise EndpointMismatch("shadow of a non-endo 1-cell")
    pm = x.body.proj.mapping
    elems = [e for e in x.body.total.elements if pm[e][0] == pm[e][1]]
    return FinSet(f"sh({x.body.total.name})", elems, validate=False)


def shadow_on_2cells(phi: Cell2) -> FinMap:
    """The restriction of a 2-cell between endo-cells to the shadows."""
    src, dst = shadow(phi.src), shadow(phi.dst)
    return FinMap(src, dst, {e: phi.map.mapping[e] for e in src.elements}, validate=False)


def rotator(x: Cell1, y: Cell1) -> FinMap:
    """The cyclic bijection  sh(x . y) -> sh(y . x),  (a, b) -> (b, a)."""
    if x.src != y.dst:
        raise EndpointMismatch("cells are not cyclically composable")
    sxy = shadow(compose(x, y))
    syx = shadow(compose(y, x))
    m = FinMap(sxy, syx, {e: (e[1], e[0]) for e in sxy.elements}, validate=False)
    if not m.is_bijection():
        raise SmbfError("rotator failed to be a bijection")
    return m


# ---------------------------------------------------------------------------
# figure checks


def pentagon_failure(x: Cell1, y: Cell1, z: Cell1, w: Cell1) -> Optional[dict]:
    """Both rebracketing routes ((xy)z)w -> x(y(zw)) must agree pointwise."""
    r1 = hcompose_iso(associator(x, y, z), identity_iso(w)).forward
    r2 = associator(x, compose(y, z), w).forward
    r3 = hcompose_iso(identity_iso(x), associator(y, z, w)).forward
    route_a = vcompose(r3, vcompose(r2, r1))
    s1 = associator(compose(x, y), z, w).forward
    s2 = associator(x, y, compose(z, w)).forward
    route_b = vcompose(s2, s1)
    return _first_difference(route_a.map, route_b.map)


def triangle_failure(x: Cell1, y: Cell1) -> Optional[dict]:
    """(x . unit) . y -> x . y via the associator+left unitor equals the
    right unitor route."""
    if x.dst != y.src:
        raise EndpointMismatch("cells are not composable")
    a = associator(x, unit(x.ctx, x.dst), y).forward
    route_a = vcompose(hcompose_iso(identity_iso(x), left_unitor(y)).forward, a)
    route_b = hcompose_iso(right_unitor(x), identity_iso(y)).forward
    return _first_difference(route_a.map, route_b.map)


def shadow_assoc_failure(x: Cell1, y: Cell1, z: Cell1) -> Optional[dict]:
    """The hexagon relating the rotator and the associator on shadows."""
    xy = compose(x, y)
    yz = compose(y, z)
    zx = compose(z, x)
    path_a = compose_maps(
        shadow_on_2cells(associator(z, x, y).backward), rotator(xy, z)
    )
    step1 = shadow_on_2cells(associator(x, y, z).forward)
    step2 = rotator(x, yz)
    step3 = shadow_on_2cells(associator(y, z, x).forward)
    step4 = rotator(y, zx)
    path_b = compose_maps(step4, compose_maps(step3, compose_maps(step2, step1)))
    return _first_difference(path_a, path_b)


def shadow_unitor_failure(x: Cell1) -> Optional[dict]:
    """On shadows, the two unitors agree through the rotator."""
    if not x.is_endo():
        raise EndpointMismatch("shadow unitor needs an endo-cell")
    u = unit(x.ctx, x.src)
    r = shadow_on_2cells(right_unitor(x).forward)
    l = shadow_on_2cells(left_unitor(x).forward)
    theta_xu = rotator(x, u)
    theta_ux = rotator(u, x)
    d = _first_difference(r, compose_maps(l, theta_xu))
    if d is not None:
        return d
    return _first_difference(l, compose_maps(r, theta_ux))


def interchange_failure(
    phi: Cell2, phi2: Cell2, psi: Cell2, psi2: Cell2
) -> Optional[dict]:
    """(phi2 . phi) x (psi2 . psi) against the composite of horizontal pieces."""
    lhs = hcompose(vcompose(phi2, phi), vcompose(psi2, psi))
    rhs = vcompose(hcompose(phi2, psi2), hcompose(phi, psi))
    return _first_difference(lhs.map, rhs.map)


def _first_difference(f: FinMap, g: FinMap) -> Optional[dict]:
    if f.source != g.source or f.target != g.target:
        return {"detail": "route endpoints differ", "element": None}
    for e in f.source.elements:
        if f.mapping[e] != g.mapping[e]:
            return {
                "detail": "routes disagree",
                "element": repr(e),
                "left": repr(f.mapping[e]),
                "right": repr(g.mapping[e]),
            }
    return None


DIAGRAMS = ("pentagon", "triangle", "shadow_assoc", "shadow_unitor")


def check_diagram(
    name: str,
    instances: int,
    rng,
    ctx: Optional[BaseContext] = None,
    max_size: int = 4,
    max_fiber: int = 3,
    max_total: int = 6,
) -> list:
    """Run one named coherence check on seeded random instances.

    Returns the list of failures (empty means the diagram commuted on
    every instance).
    """
    from . import randgen

    if ctx is None:
        ctx = BaseContext.absolute()
    if name not in DIAGRAMS:
        raise UnknownDiagram(f"unknown diagram {name!r}")
    failures = []
    for i in range(instances):
        names = randgen.NameSource()
        if name == "pentagon":
            cells = randgen.random_cell_chain(rng, ctx, 4, names, max_size, max_fiber, max_total)
            failure = pentagon_failure(*cells)
        elif name == "triangle":
            cells = randgen.random_cell_chain(rng, ctx, 2, names, max_size, max_fiber, max_total)
            failure = triangle_failure(*cells)
        elif name == "shadow_assoc":
            cells = randgen.random_cell_cycle(rng, ctx, 3, names, max_size, max_fiber, max_total)
            failure = shadow_assoc_failure(*cells)
        else:
            a = randgen.random_indexed_space(rng, ctx, names, max_size)
            cell = randgen.random_cell(rng, ctx, a, a, names, max_fiber, max_total)
            failure = shadow_unitor_failure(cell)
        if failure is not None:
            failure["instance"] = i
            failures.append(failure)
    return failures
