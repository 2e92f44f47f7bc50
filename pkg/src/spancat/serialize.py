"""JSON encoding of the engine's values.

Documents carry a ``sets`` table; maps and structures reference sets by
name.  An element is a string or a two-element array for a pair.
Encoding is deterministic (sorted keys, fixed separators) so reports
and round-trips are byte-stable.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence

from .equivariant import FinGroup, GSet, Subgroup
from .finset import Element, FinMap, FinSet, FinSetError
from .smbf import BaseContext, IndexedSpace, MultiSpan, ParamSet


class SerializationError(FinSetError):
    pass


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def elem_to_json(x: Element):
    if isinstance(x, str):
        return x
    return [elem_to_json(x[0]), elem_to_json(x[1])]


def elem_from_json(x) -> Element:
    if isinstance(x, str):
        return x
    if isinstance(x, list) and len(x) == 2:
        return (elem_from_json(x[0]), elem_from_json(x[1]))
    raise SerializationError(f"bad element {x!r}")


def finset_to_json(s: FinSet) -> dict:
    return {"name": s.name, "elements": [elem_to_json(x) for x in s.elements]}


def finset_from_json(doc: dict) -> FinSet:
    if not isinstance(doc, dict) or "name" not in doc or "elements" not in doc:
        raise SerializationError("a set needs a name and elements")
    return FinSet(doc["name"], (elem_from_json(x) for x in doc["elements"]))


def finmap_to_json(m: FinMap) -> dict:
    return {
        "source": m.source.name,
        "target": m.target.name,
        "map": [
            [elem_to_json(x), elem_to_json(m.mapping[x])] for x in m.source.elements
        ],
    }


class SetTable:
    """The per-document registry of named sets."""

    def __init__(self, sets: Sequence[FinSet]):
        self.by_name: Dict[str, FinSet] = {}
        for s in sets:
            if s.name in self.by_name and self.by_name[s.name] != s:
                raise SerializationError(f"conflicting definitions of set {s.name!r}")
            self.by_name[s.name] = s

    @classmethod
    def from_json(cls, doc: dict) -> "SetTable":
        return cls([finset_from_json(s) for s in doc.get("sets", [])])

    def get(self, name: str) -> FinSet:
        if name not in self.by_name:
            raise SerializationError(f"unknown set {name!r}")
        return self.by_name[name]


def finmap_from_json(table: SetTable, doc: dict) -> FinMap:
    src = table.get(doc["source"])
    dst = table.get(doc["target"])
    mapping = {
        elem_from_json(pair[0]): elem_from_json(pair[1]) for pair in doc["map"]
    }
    return FinMap(src, dst, mapping)


def indexed_space_to_json(sp: IndexedSpace) -> dict:
    return {"space": sp.space.name, "to_base": finmap_to_json(sp.to_base)}


def indexed_space_from_json(table: SetTable, doc, ctx: BaseContext) -> IndexedSpace:
    """A space name alone means the terminal structure map (point base)."""
    if isinstance(doc, str):
        space = table.get(doc)
        if len(ctx.base) != 1:
            raise SerializationError(
                f"space {doc!r} needs an explicit structure map over "
                f"{ctx.base.name!r}"
            )
        from .finset import constant

        return IndexedSpace(space, constant(space, ctx.base, ctx.base.elements[0]))
    return IndexedSpace(table.get(doc["space"]), finmap_from_json(table, doc["to_base"]))


def param_set_to_document(p: ParamSet) -> dict:
    return {
        "sets": [
            finset_to_json(p.total),
            finset_to_json(p.base.space),
            finset_to_json(p.base.to_base.target),
        ],
        "param": {
            "total": p.total.name,
            "base": indexed_space_to_json(p.base),
            "proj": finmap_to_json(p.proj),
        },
    }


def param_set_from_json(table: SetTable, doc: dict, ctx: BaseContext) -> ParamSet:
    base = indexed_space_from_json(table, doc["base"], ctx)
    total = table.get(doc["total"])
    return ParamSet(total, base, finmap_from_json(table, doc["proj"]))


def cell1_to_document(c) -> dict:
    """Encode a 1-cell with its endpoint names and body."""
    sets = {}
    for s in (
        c.ctx.base,
        c.src.space,
        c.dst.space,
        c.body.total,
        c.body.base.space,
    ):
        sets.setdefault(s.name, s)
    return {
        "sets": [finset_to_json(s) for s in sets.values()],
        "cell": {
            "ctx": c.ctx.base.name,
            "src": indexed_space_to_json(c.src),
            "dst": indexed_space_to_json(c.dst),
            "body": {
                "total": c.body.total.name,
                "base": indexed_space_to_json(c.body.base),
                "proj": finmap_to_json(c.body.proj),
            },
        },
    }


def cell1_from_document(doc: dict):
    from .bicategory import Cell1

    table = SetTable.from_json(doc)
    cell = doc.get("cell")
    if cell is None:
        raise SerializationError("document has no cell")
    ctx = BaseContext(table.get(cell.get("ctx", "pt")))
    src = indexed_space_from_json(table, cell["src"], ctx)
    dst = indexed_space_from_json(table, cell["dst"], ctx)
    body = param_set_from_json(table, cell["body"], ctx)
    return Cell1(ctx, src, dst, body)


def multispan_from_document(doc: dict) -> MultiSpan:
    """Load {"sets": [...], "span": {ctx, B, C, inputs, f, g}}."""
    table = SetTable.from_json(doc)
    span = doc.get("span")
    if span is None:
        raise SerializationError("document has no span")
    ctx = BaseContext(table.get(span["ctx"]))
    apex = indexed_space_from_json(table, span["B"], ctx)
    target = indexed_space_from_json(table, span["C"], ctx)
    inputs = tuple(
        indexed_space_from_json(table, sp, ctx) for sp in span.get("inputs", [])
    )
    f = finmap_from_json(table, span["f"])
    legs = tuple(finmap_from_json(table, g) for g in span.get("g", []))
    return MultiSpan(ctx, apex, target, inputs, f, legs)


def multispan_to_document(s: MultiSpan) -> dict:
    sets = {s.ctx.base.name: s.ctx.base}
    for sp in (s.apex, s.target, *s.inputs):
        sets.setdefault(sp.space.name, sp.space)
    return {
        "sets": [finset_to_json(x) for x in sets.values()],
        "span": {
            "ctx": s.ctx.base.name,
            "B": indexed_space_to_json(s.apex),
            "C": indexed_space_to_json(s.target),
            "inputs": [indexed_space_to_json(sp) for sp in s.inputs],
            "f": finmap_to_json(s.f),
            "g": [finmap_to_json(g) for g in s.g],
        },
    }


def param_list_from_document(doc: dict, ctx: BaseContext) -> List[ParamSet]:
    table = SetTable.from_json(doc)
    return [
        param_set_from_json(table, p, ctx) for p in doc.get("inputs", [])
    ]


def endomap_from_document(doc: dict) -> FinMap:
    """Load {"sets": [...], "map": FinMap} and require an endo map."""
    table = SetTable.from_json(doc)
    if "map" not in doc:
        raise SerializationError("document has no map")
    m = finmap_from_json(table, doc["map"])
    if m.source != m.target:
        raise SerializationError("map is not an endo map")
    return m


def group_to_json(g: FinGroup, subgroups: Optional[Dict[str, Sequence[str]]] = None) -> dict:
    elems = list(g.carrier.elements)
    mul = g.mul_table()
    doc = {
        "name": g.carrier.name,
        "elements": elems,
        "table": [[mul[(a, b)] for b in elems] for a in elems],
    }
    if subgroups:
        doc["subgroups"] = {k: list(v) for k, v in subgroups.items()}
    return doc


def group_from_json(doc: dict) -> FinGroup:
    return FinGroup.from_table(
        doc.get("name", "G"), doc["elements"], doc["table"]
    )


def subgroup_from_spec(group: FinGroup, doc: dict, spec: str) -> Subgroup:
    """Resolve a subgroup from an alias table or a comma list of members."""
    aliases = doc.get("subgroups", {}) if doc else {}
    if spec in aliases:
        members = tuple(aliases[spec])
    else:
        members = tuple(x.strip() for x in spec.split(",") if x.strip())
    order = group.carrier.elements
    members = tuple(sorted(set(members) | {group.unit}, key=order.index))
    return Subgroup(group, members)


def gset_from_document(doc: dict, group: FinGroup) -> GSet:
    """An action given as triples [g, x, gx] over the document's map source."""
    table = SetTable.from_json(doc)
    m = finmap_from_json(table, doc["map"]) if "map" in doc else None
    space = m.source if m is not None else table.get(doc["space"])
    action = tuple(
        (g, elem_from_json(x), elem_from_json(gx)) for g, x, gx in doc["action"]
    )
    return GSet(group, space, action)
