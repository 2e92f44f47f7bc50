"""Parametrized finite sets over an ambient base, and span actions on them.

Everything here is relative to a :class:`BaseContext`.  With the
one-point base this is the absolute theory; a nontrivial base gives the
fiberwise theory, where every product is a fiber product over the base.

The three primitive operations are the external product, pullback along
a map, and pushforward along a map.  A multi-span bundles them into a
single action, and injectivity of the span's tupled map is the
``rigid`` predicate that guarantees the action has no nonidentity
natural automorphisms.  :func:`search_automorphisms` verifies that
claim by brute force on finite families.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product as iterproduct
from math import factorial
from typing import Optional, Sequence, Tuple

from .finset import (
    Element,
    FinMap,
    FinSet,
    FinSetError,
    compose,
    identity,
    is_injective,
    collision,
    nest,
    pullback,
    unnest,
)


class SmbfError(FinSetError):
    pass


class ContextMismatch(SmbfError):
    pass


class EndpointMismatch(SmbfError):
    pass


class NotPullbackSquare(SmbfError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SearchBudgetExceeded(SmbfError):
    pass


@dataclass(frozen=True)
class BaseContext:
    """The ambient base object; all indexing spaces carry a map to it."""

    base: FinSet

    @classmethod
    def absolute(cls) -> "BaseContext":
        from .finset import POINT

        return cls(POINT)

    def check_space(self, sp: "IndexedSpace") -> None:
        if sp.to_base.target != self.base:
            raise ContextMismatch(
                f"space {sp.space.name!r} is indexed over "
                f"{sp.to_base.target.name!r}, not {self.base.name!r}"
            )


@dataclass(frozen=True)
class IndexedSpace:
    """A finite set together with its structure map to the ambient base."""

    space: FinSet
    to_base: FinMap

    def __post_init__(self):
        if self.to_base.source != self.space:
            raise SmbfError(
                f"structure map of {self.space.name!r} has wrong source"
            )


def over_point(space: FinSet) -> IndexedSpace:
    """The space seen in the absolute context."""
    from .finset import terminal_map

    return IndexedSpace(space, terminal_map(space))


@dataclass(frozen=True)
class OverMap:
    """A map of indexed spaces commuting with the structure maps."""

    src: IndexedSpace
    dst: IndexedSpace
    map: FinMap

    def __post_init__(self):
        if self.map.source != self.src.space or self.map.target != self.dst.space:
            raise EndpointMismatch("map endpoints do not match the indexed spaces")
        if compose(self.dst.to_base, self.map) != self.src.to_base:
            raise SmbfError(
                f"map {self.src.space.name!r}->{self.dst.space.name!r} "
                "does not commute with the structure maps"
            )


def identity_over(sp: IndexedSpace) -> OverMap:
    return OverMap(sp, sp, identity(sp.space))


class ParamSet:
    """A finite set over an indexed space: a total set with a projection."""

    __slots__ = ("total", "base", "proj")

    def __init__(self, total: FinSet, base: IndexedSpace, proj: FinMap, validate: bool = True):
        self.total = total
        self.base = base
        self.proj = proj
        if validate:
            if proj.source != total or proj.target != base.space:
                raise SmbfError(
                    f"projection of {total.name!r} does not land in {base.space.name!r}"
                )

    def fiber(self, b: Element) -> list:
        pm = self.proj.mapping
        return [x for x in self.total.elements if pm[x] == b]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamSet):
            return NotImplemented
        return (
            self.total == other.total
            and self.base == other.base
            and self.proj == other.proj
        )

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ParamSet({self.total.name!r} over {self.base.space.name!r})"


@dataclass(frozen=True)
class ParamMap:
    """A map of parametrized sets over a shared base."""

    src: ParamSet
    dst: ParamSet
    map: FinMap

    def __post_init__(self):
        if self.src.base != self.dst.base:
            raise EndpointMismatch("parametrized map across different bases")
        if self.map.source != self.src.total or self.map.target != self.dst.total:
            raise EndpointMismatch("map endpoints do not match the totals")
        sp, dp, m = self.src.proj.mapping, self.dst.proj.mapping, self.map.mapping
        for x in self.src.total.elements:
            if dp[m[x]] != sp[x]:
                raise SmbfError(f"map does not commute with projections at {x!r}")


def identity_param(x: ParamSet) -> ParamMap:
    return ParamMap(x, x, identity(x.total))


def compose_param(g: ParamMap, f: ParamMap) -> ParamMap:
    if f.dst != g.src:
        raise EndpointMismatch("parametrized maps are not composable")
    return ParamMap(f.src, g.dst, compose(g.map, f.map))


@dataclass(frozen=True)
class ParamIso:
    """An invertible map of parametrized sets with its stored inverse."""

    forward: ParamMap
    backward: ParamMap

    def __post_init__(self):
        if self.forward.src != self.backward.dst or self.forward.dst != self.backward.src:
            raise EndpointMismatch("inverse endpoints do not match")
        fm, bm = self.forward.map.mapping, self.backward.map.mapping
        for x in self.forward.src.total.elements:
            if bm[fm[x]] != x:
                raise SmbfError(f"not a two-sided inverse at {x!r}")
        for y in self.forward.dst.total.elements:
            if fm[bm[y]] != y:
                raise SmbfError(f"not a two-sided inverse at {y!r}")


def fiber_product(
    ctx: BaseContext, spaces: Sequence[IndexedSpace]
) -> Tuple[IndexedSpace, list]:
    """Left-nested fiber product over the ambient base, with projections.

    The empty fiber product is the base itself; a single factor is
    returned unchanged.
    """
    spaces = list(spaces)
    for sp in spaces:
        ctx.check_space(sp)
    if not spaces:
        return IndexedSpace(ctx.base, identity(ctx.base)), []
    if len(spaces) == 1:
        return spaces[0], [identity(spaces[0].space)]
    name = "prod(" + ",".join(sp.space.name for sp in spaces) + ")"
    tb0 = spaces[0].to_base.mapping
    rows = [(x, (x,), tb0[x]) for x in spaces[0].space.elements]
    for sp in spaces[1:]:
        tb = sp.to_base.mapping
        rows = [
            ((acc, x), flat + (x,), b)
            for acc, flat, b in rows
            for x in sp.space.elements
            if tb[x] == b
        ]
    total = FinSet(name, (nested for nested, _, _ in rows), validate=False)
    to_base = FinMap(
        total, ctx.base, {nested: b for nested, _, b in rows}, validate=False
    )
    projections = [
        FinMap(
            total,
            sp.space,
            {nested: flat[i] for nested, flat, _ in rows},
            validate=False,
        )
        for i, sp in enumerate(spaces)
    ]
    return IndexedSpace(total, to_base), projections


def unit_param(ctx: BaseContext) -> ParamSet:
    """The monoidal unit: the base over itself by the identity."""
    sp = IndexedSpace(ctx.base, identity(ctx.base))
    return ParamSet(ctx.base, sp, identity(ctx.base), validate=False)


def external_product(
    ctx: BaseContext, xs: Sequence[ParamSet], validate: bool = True
) -> ParamSet:
    """Fiber product of totals over fiber product of bases.

    The empty product is the monoidal unit of the context.
    """
    xs = list(xs)
    for x in xs:
        ctx.check_space(x.base)
    if not xs:
        return unit_param(ctx)
    if len(xs) == 1:
        return xs[0]
    base, _ = fiber_product(ctx, [x.base for x in xs])
    x0 = xs[0]
    tb0 = x0.base.to_base.mapping
    p0 = x0.proj.mapping
    rows = [(e, p0[e], tb0[p0[e]]) for e in x0.total.elements]
    for x in xs[1:]:
        tb = x.base.to_base.mapping
        pm = x.proj.mapping
        rows = [
            ((te, e), (pe, pm[e]), b)
            for te, pe, b in rows
            for e in x.total.elements
            if tb[pm[e]] == b
        ]
    name = "prod(" + ",".join(x.total.name for x in xs) + ")"
    total = FinSet(name, (te for te, _, _ in rows), validate=False)
    proj = FinMap(total, base.space, {te: pe for te, pe, _ in rows}, validate=False)
    return ParamSet(total, base, proj, validate=validate)


def pullback_along(h: OverMap, x: ParamSet) -> Tuple[ParamSet, FinMap]:
    """Base change along h, with the cartesian comparison map to x."""
    if x.base != h.dst:
        raise EndpointMismatch(
            f"cannot pull {x.total.name!r} back along a map into "
            f"{h.dst.space.name!r}"
        )
    index: dict = {}
    for e in x.total.elements:
        index.setdefault(x.proj.mapping[e], []).append(e)
    hm = h.map.mapping
    pairs = [
        (a, e) for a in h.src.space.elements for e in index.get(hm[a], ())
    ]
    total = FinSet(f"plb({h.src.space.name};{x.total.name})", pairs, validate=False)
    proj = FinMap(total, h.src.space, {p: p[0] for p in pairs}, validate=False)
    comparison = FinMap(total, x.total, {p: p[1] for p in pairs}, validate=False)
    return ParamSet(total, h.src, proj, validate=False), comparison


def pushforward_along(h: OverMap, x: ParamSet) -> ParamSet:
    """Reindex along h: the total is unchanged, the projection composes."""
    if x.base != h.src:
        raise EndpointMismatch(
            f"cannot push {x.total.name!r} forward along a map out of "
            f"{h.src.space.name!r}"
        )
    return ParamSet(x.total, h.dst, compose(h.map, x.proj), validate=False)


@dataclass(frozen=True)
class PullbackSquare:
    """A commuting square (k, j, f, h) that is cartesian.

    The corner object is the common source of k and j; f and h share
    their target.  Cartesianness is verified on construction by
    comparing the corner with the pullback of f and h.
    """

    k: OverMap
    j: OverMap
    f: OverMap
    h: OverMap

    def __post_init__(self):
        if self.k.src != self.j.src:
            raise NotPullbackSquare("corner maps have different sources")
        if self.f.src != self.k.dst or self.h.src != self.j.dst:
            raise NotPullbackSquare("square sides do not match up")
        if self.f.dst != self.h.dst:
            raise NotPullbackSquare("bottom maps have different targets")
        fk = compose(self.f.map, self.k.map)
        hj = compose(self.h.map, self.j.map)
        for a in self.k.src.space.elements:
            if fk.mapping[a] != hj.mapping[a]:
                raise NotPullbackSquare(
                    f"square does not commute at {a!r}", witness=a
                )
        pb, _, _ = pullback(self.f.map, self.h.map)
        corner = self.k.src.space
        cmp_map = {a: (self.k.map.mapping[a], self.j.map.mapping[a]) for a in corner.elements}
        seen: dict = {}
        for a in corner.elements:
            v = cmp_map[a]
            if v in seen:
                raise NotPullbackSquare(
                    f"not a pullback square: {seen[v]!r} and {a!r} collide",
                    witness=(seen[v], a),
                )
            seen[v] = a
        for v in pb.elements:
            if v not in seen:
                raise NotPullbackSquare(
                    f"not a pullback square: {v!r} is not hit", witness=v
                )

    def corner_element(self, b: Element, c: Element) -> Element:
        for a in self.k.src.space.elements:
            if self.k.map.mapping[a] == b and self.j.map.mapping[a] == c:
                return a
        raise SmbfError(f"no corner element over ({b!r}, {c!r})")


def beck_chevalley(square: PullbackSquare, x: ParamSet) -> ParamIso:
    """The canonical bijection (push then pull) = (pull then push).

    For a cartesian square with sides k, j over f, h and a parametrized
    set x over the f-leg source, the two composites land over the h-leg
    source and agree by the explicit pairing below.
    """
    if x.base != square.f.src:
        raise EndpointMismatch("input is not parametrized over the square's corner")
    kx, _ = pullback_along(square.k, x)
    lhs = pushforward_along(square.j, kx)
    fx = pushforward_along(square.f, x)
    rhs, _ = pullback_along(square.h, fx)
    jm = square.j.map.mapping
    corner_index = {
        (square.k.map.mapping[a], square.j.map.mapping[a]): a
        for a in square.k.src.space.elements
    }
    fwd = {p: (jm[p[0]], p[1]) for p in lhs.total.elements}
    bwd = {
        q: (corner_index[(x.proj.mapping[q[1]], q[0])], q[1])
        for q in rhs.total.elements
    }
    return ParamIso(
        ParamMap(lhs, rhs, FinMap(lhs.total, rhs.total, fwd, validate=False)),
        ParamMap(rhs, lhs, FinMap(rhs.total, lhs.total, bwd, validate=False)),
    )


@dataclass(frozen=True)
class MultiSpan:
    """A wedge with one output leg and any number of input legs.

    ``apex`` carries a map ``f`` to the output space and a map ``g[i]``
    to each input space, all over the ambient base.
    """

    ctx: BaseContext
    apex: IndexedSpace
    target: IndexedSpace
    inputs: Tuple[IndexedSpace, ...]
    f: FinMap
    g: Tuple[FinMap, ...]

    def __post_init__(self):
        self.ctx.check_space(self.apex)
        self.ctx.check_space(self.target)
        for sp in self.inputs:
            self.ctx.check_space(sp)
        if len(self.g) != len(self.inputs):
            raise EndpointMismatch("arity mismatch between legs and input spaces")
        OverMap(self.apex, self.target, self.f)
        for sp, leg in zip(self.inputs, self.g):
            OverMap(self.apex, sp, leg)

    @property
    def arity(self) -> int:
        return len(self.inputs)


def tupled_input_map(s: MultiSpan) -> OverMap:
    """The map from the apex into the fiber product of the input spaces."""
    prod, _ = fiber_product(s.ctx, list(s.inputs))
    if not s.inputs:
        return OverMap(s.apex, prod, s.apex.to_base)
    mapping = {
        b: nest([leg.mapping[b] for leg in s.g]) for b in s.apex.space.elements
    }
    return OverMap(s.apex, prod, FinMap(s.apex.space, prod.space, mapping, validate=False))


def multispan_action(s: MultiSpan, xs: Sequence[ParamSet]) -> ParamSet:
    """Pull the external product back along the legs, push along f."""
    xs = list(xs)
    if len(xs) != s.arity:
        raise EndpointMismatch(
            f"span of arity {s.arity} applied to {len(xs)} inputs"
        )
    for x, sp in zip(xs, s.inputs):
        if x.base != sp:
            raise EndpointMismatch(
                f"input over {x.base.space.name!r} does not match leg into "
                f"{sp.space.name!r}"
            )
    prod = external_product(s.ctx, xs)
    pulled, _ = pullback_along(tupled_input_map(s), prod)
    return pushforward_along(OverMap(s.apex, s.target, s.f), pulled)


def rigidity_map(s: MultiSpan) -> OverMap:
    """The tupled map from the apex into output x inputs."""
    prod, _ = fiber_product(s.ctx, [s.target, *s.inputs])
    mapping = {
        b: nest([s.f.mapping[b]] + [leg.mapping[b] for leg in s.g])
        for b in s.apex.space.elements
    }
    return OverMap(s.apex, prod, FinMap(s.apex.space, prod.space, mapping, validate=False))


def is_rigid(s: MultiSpan) -> bool:
    return is_injective(rigidity_map(s).map)


def rigidity_witness(s: MultiSpan) -> Optional[Tuple[Element, Element]]:
    """A pair of apex points that the tupled map identifies, if one exists."""
    return collision(rigidity_map(s).map)


def action_on_cells(s: MultiSpan, phis: Sequence[ParamMap]) -> ParamMap:
    """The induced map between span actions, componentwise on input maps."""
    phis = list(phis)
    if len(phis) != s.arity:
        raise EndpointMismatch("wrong number of component maps")
    out_src = multispan_action(s, [p.src for p in phis])
    out_dst = multispan_action(s, [p.dst for p in phis])
    n = s.arity
    if n == 0:
        mapping = {e: e for e in out_src.total.elements}
    else:
        comps = [p.map.mapping for p in phis]
        mapping = {}
        for e in out_src.total.elements:
            b, xvec = e
            parts = unnest(xvec, n) if n > 1 else [xvec]
            image = nest([comps[i][parts[i]] for i in range(n)])
            mapping[e] = (b, image)
    return ParamMap(
        out_src, out_dst, FinMap(out_src.total, out_dst.total, mapping, validate=False)
    )


@dataclass(frozen=True)
class FamilyCell:
    """A componentwise map between two input tuples of a family."""

    src: int
    dst: int
    maps: Tuple[ParamMap, ...]


@dataclass(frozen=True)
class ActionFamily:
    """A finite diagram of input tuples and maps for automorphism search."""

    tuples: Tuple[Tuple[ParamSet, ...], ...]
    cells: Tuple[FamilyCell, ...] = ()


def _fiber_bijection_count(x: ParamSet) -> int:
    sizes: dict = {}
    for e in x.total.elements:
        b = x.proj.mapping[e]
        sizes[b] = sizes.get(b, 0) + 1
    n = 1
    for k in sizes.values():
        n *= factorial(k)
    return n


def _fiber_bijections(x: ParamSet):
    """All projection-preserving bijections of a parametrized set.

    Deterministic: the identity comes first.
    """
    fibers: dict = {}
    for e in x.total.elements:
        fibers.setdefault(x.proj.mapping[e], []).append(e)
    fiber_lists = list(fibers.values())
    for combo in iterproduct(*(permutations(f) for f in fiber_lists)):
        mapping = {}
        for orig, perm in zip(fiber_lists, combo):
            mapping.update(zip(orig, perm))
        yield FinMap(x.total, x.total, mapping, validate=False)


def search_automorphisms(
    s: MultiSpan, family: ActionFamily, budget: int = 10**6
) -> list:
    """Exhaustively list natural automorphisms of the action on a family.

    Each result assigns to every input tuple a projection-preserving
    bijection of the action output, commuting with the maps induced by
    every cell of the family.  The identity assignment is always
    present.  Raises :class:`SearchBudgetExceeded` when the number of
    candidate assignments exceeds the budget.
    """
    tuples = list(family.tuples)
    if s.arity == 0 and not tuples:
        tuples = [()]
    for t in tuples:
        if len(t) != s.arity:
            raise EndpointMismatch("family tuple of wrong arity")
    for cell in family.cells:
        if not (0 <= cell.src < len(tuples) and 0 <= cell.dst < len(tuples)):
            raise SmbfError("family cell references a missing tuple")
        for i, m in enumerate(cell.maps):
            if m.src != tuples[cell.src][i] or m.dst != tuples[cell.dst][i]:
                raise SmbfError("family cell maps do not match their tuples")

    outputs = [multispan_action(s, list(t)) for t in tuples]
    total = 1
    for out in outputs:
        total *= _fiber_bijection_count(out)
        if total > budget:
            raise SearchBudgetExceeded("search budget exceeded")

    induced = [
        (cell.src, cell.dst, action_on_cells(s, list(cell.maps)).map.mapping)
        for cell in family.cells
    ]

    found = []
    for combo in iterproduct(*(list(_fiber_bijections(out)) for out in outputs)):
        ok = True
        for si, di, act in induced:
            bi, bj = combo[si].mapping, combo[di].mapping
            for e in outputs[si].total.elements:
                if bj[act[e]] != act[bi[e]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(tuple(combo))
    return found
