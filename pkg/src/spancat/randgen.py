"""Seeded random instance generators for the coherence suites.

All randomness flows through an explicit ``random.Random`` so that a
suite rerun with the same seed rebuilds byte-identical instances.
Element names come from a per-instance :class:`NameSource`.
"""

from __future__ import annotations

from random import Random
from typing import List, Optional

from .bicategory import Cell1, Cell2
from .finset import FinMap, FinSet
from .smbf import (
    BaseContext,
    IndexedSpace,
    MultiSpan,
    ParamSet,
    fiber_product,
)


class NameSource:
    """A deterministic stream of fresh atom names."""

    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self._counts: dict = {}

    def fresh(self, kind: str) -> str:
        k = self._counts.get(kind, 0)
        self._counts[kind] = k + 1
        return f"{self.prefix}{kind}{k}"


def random_indexed_space(
    rng: Random,
    ctx: BaseContext,
    names: NameSource,
    max_size: int = 4,
    min_size: int = 0,
    cover_base: bool = False,
) -> IndexedSpace:
    """A random space over the context base.

    With ``cover_base`` every base point gets at least one element, so
    maps into the space always exist fiberwise.
    """
    base_elems = ctx.base.elements
    kind = names.fresh("S")
    values = []
    if cover_base:
        values.extend(base_elems)
        extra = rng.randint(0, max(0, max_size - len(base_elems)))
    else:
        extra = rng.randint(min_size, max_size)
    values.extend(rng.choice(base_elems) for _ in range(extra))
    elems = [f"{kind}.{i}" for i in range(len(values))]
    space = FinSet(kind, elems, validate=False)
    to_base = FinMap(space, ctx.base, dict(zip(elems, values)), validate=False)
    return IndexedSpace(space, to_base)


def random_cell(
    rng: Random,
    ctx: BaseContext,
    src: IndexedSpace,
    dst: IndexedSpace,
    names: NameSource,
    max_fiber: int = 3,
    max_total: int = 6,
) -> Cell1:
    """A random 1-cell with fiber sizes in [0, max_fiber], total capped."""
    base, _ = fiber_product(ctx, [src, dst])
    kind = names.fresh("X")
    elems: List[str] = []
    proj = {}
    for b in base.space.elements:
        if len(elems) >= max_total:
            break
        k = rng.randint(0, max_fiber)
        k = min(k, max_total - len(elems))
        for _ in range(k):
            e = f"{kind}.{len(elems)}"
            elems.append(e)
            proj[e] = b
    total = FinSet(kind, elems, validate=False)
    body = ParamSet(
        total, base, FinMap(total, base.space, proj, validate=False), validate=False
    )
    return Cell1(ctx, src, dst, body, validate=False)


def random_cell_chain(
    rng: Random,
    ctx: BaseContext,
    length: int,
    names: NameSource,
    max_size: int = 4,
    max_fiber: int = 3,
    max_total: int = 6,
) -> List[Cell1]:
    """Composable 1-cells sharing successive endpoints."""
    spaces = [
        random_indexed_space(rng, ctx, names, max_size) for _ in range(length + 1)
    ]
    return [
        random_cell(rng, ctx, spaces[i], spaces[i + 1], names, max_fiber, max_total)
        for i in range(length)
    ]


def random_cell_cycle(
    rng: Random,
    ctx: BaseContext,
    length: int,
    names: NameSource,
    max_size: int = 4,
    max_fiber: int = 3,
    max_total: int = 6,
) -> List[Cell1]:
    """Cyclically composable 1-cells (last endpoint equals the first)."""
    spaces = [random_indexed_space(rng, ctx, names, max_size) for _ in range(length)]
    spaces.append(spaces[0])
    return [
        random_cell(rng, ctx, spaces[i], spaces[i + 1], names, max_fiber, max_total)
        for i in range(length)
    ]


def random_cell2(rng: Random, src: Cell1, names: NameSource, max_fiber: int = 3,
                 max_total: int = 6) -> Cell2:
    """A random 2-cell out of ``src`` into a freshly generated target.

    The target gets a nonempty fiber wherever the source has one, so a
    commuting map always exists.
    """
    kind = names.fresh("Y")
    ctx = src.ctx
    needed: dict = {}
    for e in src.body.total.elements:
        needed.setdefault(src.body.proj.mapping[e], []).append(e)
    elems: List[str] = []
    proj = {}
    fibers: dict = {}
    for b in src.body.base.space.elements:
        k = rng.randint(1 if b in needed else 0, max_fiber)
        if len(elems) + k > max_total and b not in needed:
            k = 0
        if b in needed:
            k = max(k, 1)
        fiber = []
        for _ in range(k):
            e = f"{kind}.{len(elems)}"
            elems.append(e)
            proj[e] = b
            fiber.append(e)
        fibers[b] = fiber
    total = FinSet(kind, elems, validate=False)
    body = ParamSet(
        total,
        src.body.base,
        FinMap(total, src.body.base.space, proj, validate=False),
        validate=False,
    )
    dst = Cell1(ctx, src.src, src.dst, body, validate=False)
    mapping = {
        e: rng.choice(fibers[src.body.proj.mapping[e]])
        for e in src.body.total.elements
    }
    return Cell2(
        src, dst, FinMap(src.body.total, body.total, mapping, validate=False)
    )


def random_cell2_between(rng: Random, src: Cell1, dst: Cell1) -> Optional[Cell2]:
    """A random 2-cell src -> dst if one exists (fiberwise surjectable)."""
    fibers: dict = {}
    for e in dst.body.total.elements:
        fibers.setdefault(dst.body.proj.mapping[e], []).append(e)
    mapping = {}
    for e in src.body.total.elements:
        b = src.body.proj.mapping[e]
        if not fibers.get(b):
            return None
        mapping[e] = rng.choice(fibers[b])
    return Cell2(
        src, dst, FinMap(src.body.total, dst.body.total, mapping, validate=False)
    )


def random_multispan(
    rng: Random,
    ctx: BaseContext,
    arity: int,
    names: NameSource,
    max_size: int = 4,
) -> MultiSpan:
    apex = random_indexed_space(rng, ctx, names, max_size)
    target = random_indexed_space(rng, ctx, names, max_size, cover_base=True)
    inputs = [
        random_indexed_space(rng, ctx, names, max_size, cover_base=True)
        for _ in range(arity)
    ]
    f = _random_over_map(rng, apex, target)
    legs = [_random_over_map(rng, apex, sp) for sp in inputs]
    return MultiSpan(ctx, apex, target, tuple(inputs), f, tuple(legs))


def _random_over_map(rng: Random, src: IndexedSpace, dst: IndexedSpace) -> FinMap:
    """A random map src -> dst over the base; requires matching fibers."""
    fibers: dict = {}
    for e in dst.space.elements:
        fibers.setdefault(dst.to_base.mapping[e], []).append(e)
    mapping = {}
    for e in src.space.elements:
        b = src.to_base.mapping[e]
        pool = fibers.get(b)
        if not pool:
            raise ValueError("no compatible target fiber; regenerate the instance")
        mapping[e] = rng.choice(pool)
    return FinMap(src.space, dst.space, mapping, validate=False)


def random_param_set(
    rng: Random,
    ctx: BaseContext,
    base: IndexedSpace,
    names: NameSource,
    max_fiber: int = 3,
    max_total: int = 6,
) -> ParamSet:
    kind = names.fresh("P")
    elems: List[str] = []
    proj = {}
    for b in base.space.elements:
        if len(elems) >= max_total:
            break
        k = min(rng.randint(0, max_fiber), max_total - len(elems))
        for _ in range(k):
            e = f"{kind}.{len(elems)}"
            elems.append(e)
            proj[e] = b
    total = FinSet(kind, elems, validate=False)
    return ParamSet(
        total, base, FinMap(total, base.space, proj, validate=False), validate=False
    )


def two_point_base_context() -> BaseContext:
    """The standard nontrivial context used by the fiberwise suites."""
    return BaseContext(FinSet("B2", ("b0", "b1")))
