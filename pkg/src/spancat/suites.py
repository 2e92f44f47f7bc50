"""The coherence-suite registry: one name per checked figure, seeded
instances, machine-readable reports.

Reports are deterministic for a fixed seed and parameter set, so a
rerun produces byte-identical output.  Suites may be sharded by
deriving per-shard seeds; shard reports merge in shard order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from random import Random
from typing import Optional

from . import basechange, bicategory, equivariant, fuller
from .bicategory import UnknownDiagram
from .equivariant import FinGroup, Subgroup
from .finset import FinSet
from .randgen import NameSource
from .serialize import dumps
from .smbf import (
    ActionFamily,
    BaseContext,
    FamilyCell,
    FinMap,
    MultiSpan,
    ParamMap,
    ParamSet,
    is_rigid,
    over_point,
    rigidity_witness,
    search_automorphisms,
)


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    instances: int
    failures: tuple
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "instances": self.instances,
            "failures": list(self.failures),
            "passed": self.passed,
            "params": self.params,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


_DIAGRAM_MODULES = (
    (bicategory.DIAGRAMS, bicategory.check_diagram),
    (fuller.DIAGRAMS, fuller.check_diagram),
    (basechange.DIAGRAMS, basechange.check_diagram),
)


def suite_names() -> list:
    names = []
    for diagrams, _ in _DIAGRAM_MODULES:
        names.extend(diagrams)
    names.extend(equivariant.DIAGRAMS)
    names.append("rigidity")
    return names


def run_suite(
    name: str,
    instances: int = 100,
    seed: int = 0,
    max_size: int = 4,
    max_fiber: int = 3,
    max_total: int = 6,
    n: int = 2,
    base: Optional[FinSet] = None,
    group: Optional[FinGroup] = None,
    subgroup: Optional[Subgroup] = None,
    workers: Optional[int] = None,
) -> SuiteReport:
    """Run one named suite and assemble its report.

    ``workers`` splits the instances into that many shards with seeds
    derived from (seed, shard); shard results merge in order, so any
    worker count produces the same report.
    """
    params = {
        "max_size": max_size,
        "max_fiber": max_fiber,
        "max_total": max_total,
    }
    if base is not None:
        params["base"] = base.name
    if group is not None:
        params["group"] = group.carrier.name
    if subgroup is not None:
        params["subgroup"] = ",".join(subgroup.members)
    if name in fuller.DIAGRAMS or name in basechange.DIAGRAMS:
        params["n"] = n
    if workers is None:
        workers = int(os.environ.get("SPANCAT_WORKERS", "1"))
    shards = _shard_counts(instances, max(1, workers))
    failures: list = []
    done = 0
    for shard_index, count in enumerate(shards):
        rng = Random(_shard_seed(seed, shard_index))
        shard_failures = _run_shard(
            name, count, rng, max_size, max_fiber, max_total, n, base, group, subgroup
        )
        for f in shard_failures:
            f["instance"] = done + f.get("instance", 0)
            failures.append(f)
        done += count
    return SuiteReport(name, seed, instances, tuple(failures), params)


def _shard_counts(instances: int, workers: int) -> list:
    base_count, extra = divmod(instances, workers)
    return [base_count + (1 if i < extra else 0) for i in range(workers)]


def _shard_seed(seed: int, shard_index: int) -> int:
    # stable arithmetic derivation; tuple seeding is hash-dependent
    return (seed * 1_000_003 + shard_index) % (2**63)


def _run_shard(
    name, count, rng, max_size, max_fiber, max_total, n, base, group, subgroup
):
    ctx = BaseContext(base) if base is not None else None
    if name in bicategory.DIAGRAMS:
        return bicategory.check_diagram(
            name, count, rng, ctx=ctx, max_size=max_size,
            max_fiber=max_fiber, max_total=max_total,
        )
    if name in fuller.DIAGRAMS:
        return fuller.check_diagram(
            name, count, rng, ctx=ctx, n=n, max_size=max_size,
            max_fiber=max_fiber, max_total=max_total,
        )
    if name in basechange.DIAGRAMS:
        return basechange.check_diagram(
            name, count, rng, ctx=ctx, n=n, max_size=max_size,
        )
    if name in equivariant.DIAGRAMS:
        return equivariant.check_diagram(
            name, count, rng, group=group, subgroup=subgroup,
            max_size=max_size, max_total=max_total,
        )
    if name == "rigidity":
        return rigidity_check(count, rng, max_size=max_size)
    raise UnknownDiagram(f"unknown suite {name!r}")


# ---------------------------------------------------------------------------
# the rigidity suite


def canonical_non_rigid_span() -> MultiSpan:
    """Two apex points over a single output point, with no inputs."""
    ctx = BaseContext.absolute()
    b = over_point(FinSet("W", ("w0", "w1")))
    c = over_point(FinSet("C", ("c0",)))
    f = FinMap(b.space, c.space, {"w0": "c0", "w1": "c0"})
    return MultiSpan(ctx, b, c, (), f, ())


def _injective_span(rng: Random, arity: int, names: NameSource, max_size: int) -> MultiSpan:
    """A span whose output leg is injective, hence rigid outright."""
    ctx = BaseContext.absolute()
    apex_size = rng.randint(0, min(3, max_size))
    apex = over_point(
        FinSet(names.fresh("B"), tuple(f"b{i}" for i in range(apex_size)))
    )
    pad = rng.randint(0, 2)
    target = over_point(
        FinSet(
            names.fresh("C"),
            tuple(f"c{i}" for i in range(apex_size + pad)),
        )
    )
    perm = list(range(apex_size + pad))
    rng.shuffle(perm)
    f = FinMap(
        apex.space,
        target.space,
        {f"b{i}": f"c{perm[i]}" for i in range(apex_size)},
    )
    inputs = []
    legs = []
    for _ in range(arity):
        size = rng.randint(1, min(3, max_size))
        sp = over_point(
            FinSet(names.fresh("A"), tuple(f"a{i}" for i in range(size)))
        )
        inputs.append(sp)
        legs.append(
            FinMap(
                apex.space,
                sp.space,
                {b: rng.choice(sp.space.elements) for b in apex.space.elements},
            )
        )
    return MultiSpan(ctx, apex, target, tuple(inputs), f, tuple(legs))


def _point_inputs(span: MultiSpan, names: NameSource):
    """One singleton fiber over every input point."""
    out = []
    for sp in span.inputs:
        kind = names.fresh("S")
        elems = [f"{kind}.{i}" for i in range(len(sp.space))]
        total = FinSet(kind, elems, validate=False)
        proj = FinMap(total, sp.space, dict(zip(elems, sp.space.elements)), validate=False)
        out.append(ParamSet(total, sp, proj, validate=False))
    return out


def _small_inputs(span: MultiSpan, rng: Random, names: NameSource):
    """Random inputs with fibers of size one or two."""
    out = []
    for sp in span.inputs:
        kind = names.fresh("X")
        elems = []
        proj = {}
        for a in sp.space.elements:
            for j in range(rng.randint(1, 2)):
                e = f"{kind}.{len(elems)}"
                elems.append(e)
                proj[e] = a
        total = FinSet(kind, elems, validate=False)
        out.append(ParamSet(total, sp, FinMap(total, sp.space, proj, validate=False)))
    return out


def _covering_cells(points, targets):
    """2-cell tuples from the point inputs jointly covering every choice
    of fiber elements, using the four first/second selection patterns."""
    cells = []
    seen = set()
    n = len(targets)
    wanted = [(0, 0), (0, 1), (1, 0), (1, 1)] if n >= 2 else [(0, 0), (1, 1)]
    for pattern in wanted:
        maps = []
        for i, (p, x) in enumerate(zip(points, targets)):
            pick = pattern[i % len(pattern)]
            fibers = {}
            for e in x.total.elements:
                fibers.setdefault(x.proj.mapping[e], []).append(e)
            mapping = {}
            for e in p.total.elements:
                fiber = fibers[p.proj.mapping[e]]
                mapping[e] = fiber[min(pick, len(fiber) - 1)]
            maps.append(ParamMap(p, x, FinMap(p.total, x.total, mapping, validate=False)))
        key = tuple(tuple(sorted(m.map.mapping.items())) for m in maps)
        if key not in seen:
            seen.add(key)
            cells.append(tuple(maps))
    return cells


def rigidity_check(count: int, rng: Random, max_size: int = 4) -> list:
    """Rigid spans admit only the identity automorphism on pinning
    families; the canonical non-rigid span admits exactly two."""
    failures = []
    witness_span = canonical_non_rigid_span()
    autos = search_automorphisms(witness_span, ActionFamily(tuples=()))
    if len(autos) != 2:
        failures.append(
            {
                "instance": -1,
                "detail": f"non-rigid witness found {len(autos)} automorphisms",
                "element": None,
            }
        )
    if is_rigid(witness_span) or rigidity_witness(witness_span) is None:
        failures.append(
            {"instance": -1, "detail": "witness span wrongly judged rigid", "element": None}
        )
    for i in range(count):
        names = NameSource()
        arity = rng.choice((0, 0, 1, 2))
        span = _injective_span(rng, arity, names, max_size)
        if not is_rigid(span):
            failures.append(
                {"instance": i, "detail": "generated span is not rigid", "element": None}
            )
            continue
        if arity == 0:
            family = ActionFamily(tuples=())
        else:
            targets = _small_inputs(span, rng, names)
            points = _point_inputs(span, names)
            cells = _covering_cells(points, targets)
            family = ActionFamily(
                tuples=(tuple(targets), tuple(points)),
                cells=tuple(
                    FamilyCell(src=1, dst=0, maps=maps) for maps in cells
                ),
            )
            if len(family.cells) > 5 or len(family.tuples) > 3:
                failures.append(
                    {"instance": i, "detail": "family budget exceeded", "element": None}
                )
                continue
        autos = search_automorphisms(span, family)
        if len(autos) != 1:
            failures.append(
                {
                    "instance": i,
                    "detail": f"rigid span admitted {len(autos)} automorphisms",
                    "element": repr(rigidity_witness(span)),
                }
            )
    return failures
