"""Seeded random generators for equivariant instances.

Group actions are assembled from coset orbits, so every generated set,
cell and map is equivariant by construction and then revalidated by the
wrapping types.
"""

from __future__ import annotations

from random import Random
from typing import List

from .equivariant import (
    FinGroup,
    GCell1,
    GParam,
    GSet,
    Subgroup,
    all_subgroups,
    stabilizer,
)
from .finset import FinMap, FinSet
from .randgen import NameSource
from .smbf import (
    BaseContext,
    OverMap,
    ParamSet,
    fiber_product,
    over_point,
)

_GROUP_CACHE: dict = {}


def builtin_group(name: str) -> FinGroup:
    if name not in _GROUP_CACHE:
        from .equivariant import BUILTIN_GROUPS

        _GROUP_CACHE[name] = BUILTIN_GROUPS[name]()
    return _GROUP_CACHE[name]


def draw_group(rng: Random) -> FinGroup:
    return builtin_group(rng.choice(("C2", "C3", "S3")))


_SUBGROUP_CACHE: dict = {}


def subgroups_of(group: FinGroup) -> list:
    key = group.carrier.name
    if key not in _SUBGROUP_CACHE:
        _SUBGROUP_CACHE[key] = all_subgroups(group)
    return _SUBGROUP_CACHE[key]


def _cosets(group: FinGroup, members: tuple) -> List[tuple]:
    mul = group.mul_table()
    order = group.carrier.elements
    seen = set()
    cosets = []
    for g in order:
        if g in seen:
            continue
        coset = tuple(sorted((mul[(g, k)] for k in members), key=order.index))
        cosets.append(coset)
        seen.update(coset)
    return cosets


def _orbit_component(group: FinGroup, k: Subgroup, kind: str, start: int):
    """Element names and action for the coset orbit of a subgroup."""
    cosets = _cosets(group, k.members)
    index = {c: i for i, c in enumerate(cosets)}
    member_of = {}
    for c in cosets:
        for g in c:
            member_of[g] = c
    names = [f"{kind}.{start + i}" for i in range(len(cosets))]
    mul = group.mul_table()
    action = []
    for g in group.carrier.elements:
        for i, c in enumerate(cosets):
            moved = member_of[mul[(g, c[0])]]
            action.append((g, names[i], names[index[moved]]))
    return names, cosets, action


def random_gset(rng: Random, group: FinGroup, names: NameSource, max_size: int = 4) -> GSet:
    """A disjoint union of coset orbits within the size bound."""
    kind = names.fresh("G")
    elems: List[str] = []
    action: List[tuple] = []
    for _ in range(rng.randint(0, 3)):
        k = rng.choice(subgroups_of(group))
        orbit = len(group) // len(k.members)
        if len(elems) + orbit > max_size:
            continue
        onames, _, oact = _orbit_component(group, k, kind, len(elems))
        elems.extend(onames)
        action.extend(oact)
    space = FinSet(kind, elems, validate=False)
    return GSet(group, space, tuple(action))


def random_gparam_over(
    rng: Random,
    group: FinGroup,
    base: GSet,
    names: NameSource,
    max_total: int = 6,
) -> GParam:
    """A random equivariant parametrized set over a given base."""
    kind = names.fresh("Q")
    act = base.act_table()
    elems: List[str] = []
    action: List[tuple] = []
    proj = {}
    if len(base.space):
        for _ in range(rng.randint(0, 3)):
            x0 = rng.choice(base.space.elements)
            stab = set(stabilizer(base, x0))
            candidates = [
                k for k in subgroups_of(group) if set(k.members) <= stab
            ]
            k = rng.choice(candidates)
            orbit = len(group) // len(k.members)
            if len(elems) + orbit > max_total:
                continue
            onames, cosets, oact = _orbit_component(group, k, kind, len(elems))
            for name, coset in zip(onames, cosets):
                proj[name] = act[(coset[0], x0)]
            elems.extend(onames)
            action.extend(oact)
    total = FinSet(kind, elems, validate=False)
    param = ParamSet(
        total,
        over_point(base.space),
        FinMap(total, base.space, proj, validate=False),
    )
    return GParam(group, param, base, GSet(group, total, tuple(action)))


def random_gcell(
    rng: Random,
    group: FinGroup,
    src: GSet,
    dst: GSet,
    names: NameSource,
    max_total: int = 6,
) -> GCell1:
    """A random equivariant 1-cell between two G-sets."""
    from .bicategory import Cell1

    ctx = BaseContext.absolute()
    base, _ = fiber_product(ctx, [over_point(src.space), over_point(dst.space)])
    sact, dact = src.act_table(), dst.act_table()
    kind = names.fresh("GX")
    elems: List[str] = []
    action: List[tuple] = []
    proj = {}
    if len(src.space) and len(dst.space):
        for _ in range(rng.randint(0, 3)):
            a0 = rng.choice(src.space.elements)
            c0 = rng.choice(dst.space.elements)
            stab = set(stabilizer(src, a0)) & set(stabilizer(dst, c0))
            candidates = [
                k for k in subgroups_of(group) if set(k.members) <= stab
            ]
            k = rng.choice(candidates)
            orbit = len(group) // len(k.members)
            if len(elems) + orbit > max_total:
                continue
            onames, cosets, oact = _orbit_component(group, k, kind, len(elems))
            for name, coset in zip(onames, cosets):
                g0 = coset[0]
                proj[name] = (sact[(g0, a0)], dact[(g0, c0)])
            elems.extend(onames)
            action.extend(oact)
    total = FinSet(kind, elems, validate=False)
    body = ParamSet(
        total, base, FinMap(total, base.space, proj, validate=False)
    )
    cell = Cell1(ctx, over_point(src.space), over_point(dst.space), body)
    return GCell1(group, cell, src, dst, GSet(group, total, tuple(action)))


def random_gparam(
    rng: Random, group: FinGroup, names: NameSource, max_size: int = 4,
    max_total: int = 6,
) -> GParam:
    base = random_gset(rng, group, names, max_size)
    return random_gparam_over(rng, group, base, names, max_total)


def orbit_representatives(x: GSet) -> List:
    act = x.act_table()
    seen = set()
    reps = []
    for e in x.space.elements:
        if e in seen:
            continue
        reps.append(e)
        for g in x.group.carrier.elements:
            seen.add(act[(g, e)])
    return reps


def random_equivariant_overmap(
    rng: Random, group: FinGroup, src: GSet, dst: GSet
) -> OverMap:
    """A random equivariant map of G-sets in the absolute context.

    Raises ValueError when no equivariant map exists (an orbit with no
    target point of compatible isotropy).
    """
    sact, dact = src.act_table(), dst.act_table()
    mapping: dict = {}
    for rep in orbit_representatives(src):
        stab = set(stabilizer(src, rep))
        candidates = [
            y for y in dst.space.elements if stab <= set(stabilizer(dst, y))
        ]
        if not candidates:
            raise ValueError("no equivariant extension for an orbit")
        y0 = rng.choice(candidates)
        for g in group.carrier.elements:
            mapping[sact[(g, rep)]] = dact[(g, y0)]
    return OverMap(
        over_point(src.space),
        over_point(dst.space),
        FinMap(src.space, dst.space, mapping),
    )


def random_equivariant_endomap(
    rng: Random, group: FinGroup, x: GSet
) -> FinMap:
    """A random equivariant self-map (always exists)."""
    return random_equivariant_overmap(rng, group, x, x).map
