"""A finite exercise model for the deformation calculus: directed graphs
with collapsing maps and condensation as the replacement.

Objects are all directed graphs (self-loops allowed) on subsets of a
fixed label pool.  A morphism is a vertex map sending every edge to an
edge or collapsing its endpoints; a weak equivalence is a map inducing
an isomorphism of condensations.  The radiant objects are the condensed
graphs (no cycles, no loops), where every weak equivalence is an
isomorphism, so the radiant subcategory is a model of the localization.

The functor suite contains the vertex set and the vertex-plus-edge set
(valued in finite sets, where equivalences are bijections), edge
reversal, and condensation itself.  The vertex-set functor genuinely
needs the deformation: collapsing a 2-cycle to a point is a weak
equivalence that changes the vertex count.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product as iterproduct
from typing import Dict, List, Optional, Tuple

from .deformation import (
    DeformationError,
    Mor,
    NatTransformation,
    RightDeformation,
    SetCategory,
    WECategory,
    WEFunctor,
    identity_functor,
)


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        vs = set(self.vertices)
        if tuple(sorted(vs)) != self.vertices:
            raise DeformationError("vertices must be sorted and distinct")
        es = set(self.edges)
        if tuple(sorted(es)) != self.edges:
            raise DeformationError("edges must be sorted and distinct")
        for (u, v) in self.edges:
            if u not in vs or v not in vs:
                raise DeformationError("edge endpoint outside the vertex set")


def make_graph(vertices, edges) -> Graph:
    return Graph(tuple(sorted(set(vertices))), tuple(sorted(set(edges))))


def strongly_connected_classes(g: Graph) -> List[tuple]:
    """Mutual-reachability classes, ordered by least vertex label."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    k = len(g.vertices)
    reach = [[False] * k for _ in range(k)]
    for i in range(k):
        reach[i][i] = True
    for (u, v) in g.edges:
        reach[idx[u]][idx[v]] = True
    for m in range(k):
        rm = reach[m]
        for i in range(k):
            if reach[i][m]:
                ri = reach[i]
                for j in range(k):
                    if rm[j]:
                        ri[j] = True
    classes = []
    assigned = set()
    for i, v in enumerate(g.vertices):
        if v in assigned:
            continue
        cls = tuple(
            w
            for j, w in enumerate(g.vertices)
            if reach[i][j] and reach[j][i]
        )
        classes.append(cls)
        assigned.update(cls)
    return classes


def condense(g: Graph) -> Tuple[Dict, Graph]:
    """The condensation and the class-representative map.

    Intra-class edges (including loops) are dropped; one edge survives
    per ordered pair of distinct classes that any edge connects.
    Classes are named by their least vertex label.
    """
    classes = strongly_connected_classes(g)
    rep = {}
    for cls in classes:
        least = cls[0]
        for v in cls:
            rep[v] = least
    edges = sorted(
        {
            (rep[u], rep[v])
            for (u, v) in g.edges
            if rep[u] != rep[v]
        }
    )
    condensed = Graph(tuple(sorted(rep[c[0]] for c in classes)), tuple(edges))
    return rep, condensed


def is_condensed(g: Graph) -> bool:
    _, c = condense(g)
    return c == g


def enumerate_graphs(pool_size: int) -> List[Graph]:
    """Every graph on a subset of the label pool, loops included,
    enumerated deterministically by vertex set then edge bitmask."""
    labels = list(range(pool_size))
    out = []
    for k in range(pool_size + 1):
        for vs in combinations(labels, k):
            pairs = [(u, v) for u in vs for v in vs]
            for mask in range(1 << len(pairs)):
                edges = tuple(
                    sorted(p for i, p in enumerate(pairs) if mask >> i & 1)
                )
                out.append(Graph(tuple(vs), edges))
    return out


class GraphCategory(WECategory):
    """Graphs with edge-collapsing vertex maps."""

    def __init__(self, pool_size: int, cache_cap: int = 4096):
        self.name = f"graphs({pool_size})"
        self.pool_size = pool_size
        self._objects = tuple(enumerate_graphs(pool_size))
        self._hom_cache: dict = {}
        self._cond_cache: dict = {}
        self._edge_sets: dict = {}
        self._cache_cap = cache_cap

    def objects(self):
        return self._objects

    def _edge_set(self, g: Graph):
        s = self._edge_sets.get(g)
        if s is None:
            s = frozenset(g.edges)
            if len(self._edge_sets) < 200000:
                self._edge_sets[g] = s
        return s

    def condensation(self, g: Graph):
        c = self._cond_cache.get(g)
        if c is None:
            c = condense(g)
            if len(self._cond_cache) < 200000:
                self._cond_cache[g] = c
        return c

    def hom(self, a: Graph, b: Graph):
        key = (a, b)
        cached = self._hom_cache.get(key)
        if cached is not None:
            return cached
        va, vb = a.vertices, b.vertices
        if va and not vb:
            result: tuple = ()
        elif not va:
            result = (Mor(a, b, ()),)
        else:
            eb = self._edge_set(b)
            maps = []
            edges = a.edges
            for images in iterproduct(vb, repeat=len(va)):
                phi = dict(zip(va, images))
                for (u, v) in edges:
                    pu, pv = phi[u], phi[v]
                    if pu != pv and (pu, pv) not in eb:
                        break
                else:
                    maps.append(Mor(a, b, tuple(zip(va, images))))
            result = tuple(maps)
        if len(self._hom_cache) < self._cache_cap:
            self._hom_cache[key] = result
        return result

    def compose(self, g: Mor, f: Mor) -> Mor:
        if f.dst != g.src:
            raise DeformationError("graph maps are not composable")
        gm = dict(g.data)
        return Mor(f.src, g.dst, tuple((x, gm[y]) for x, y in f.data))

    def identity(self, a: Graph) -> Mor:
        return Mor(a, a, tuple((v, v) for v in a.vertices))

    def induced_condensed(self, f: Mor) -> Mor:
        rep_a, ca = self.condensation(f.src)
        rep_b, cb = self.condensation(f.dst)
        phi = dict(f.data)
        data = tuple((r, rep_b[phi[r]]) for r in ca.vertices)
        return Mor(ca, cb, data)

    def is_we(self, f: Mor) -> bool:
        """True when the induced map of condensations is an isomorphism."""
        _, ca = self.condensation(f.src)
        _, cb = self.condensation(f.dst)
        ind = self.induced_condensed(f)
        values = [y for _, y in ind.data]
        if len(set(values)) != len(values) or len(values) != len(cb.vertices):
            return False
        if len(ca.edges) != len(cb.edges):
            return False
        m = dict(ind.data)
        ebs = self._edge_set(cb)
        return all((m[u], m[v]) in ebs for (u, v) in ca.edges)

    def is_iso(self, f: Mor) -> bool:
        values = [y for _, y in f.data]
        if len(set(values)) != len(values) or len(values) != len(f.dst.vertices):
            return False
        if len(f.src.edges) != len(f.dst.edges):
            return False
        m = dict(f.data)
        ebs = self._edge_set(f.dst)
        return all((m[u], m[v]) in ebs for (u, v) in f.src.edges)


def vertex_elements(g: Graph):
    return frozenset(("v", v) for v in g.vertices)


def vertex_edge_elements(g: Graph):
    """Vertices plus non-loop edges; loops collapse under any map that
    identifies endpoints, so only proper edges are tracked."""
    return frozenset(
        [("v", v) for v in g.vertices]
        + [("e", u, v) for (u, v) in g.edges if u != v]
    )


def _vertex_mor(f: Mor) -> tuple:
    phi = dict(f.data)
    return tuple(
        sorted(((("v", x), ("v", phi[x])) for x in phi), key=repr)
    )


def _vertex_edge_mor(f: Mor) -> tuple:
    phi = dict(f.data)
    pairs = []
    for x in dict(f.data):
        pairs.append((("v", x), ("v", phi[x])))
    for (u, v) in f.src.edges:
        if u == v:
            continue
        pu, pv = phi[u], phi[v]
        if pu == pv:
            pairs.append(((("e", u, v)), ("v", pu)))
        else:
            pairs.append(((("e", u, v)), ("e", pu, pv)))
    return tuple(sorted(pairs, key=repr))


@dataclass(frozen=True)
class GraphModel:
    category: GraphCategory
    sets: SetCategory
    deformation: RightDeformation
    functors: dict
    deformations: dict
    nats: dict


def exhaustive_battery(model: "GraphModel", morphism_budget: Optional[int] = None) -> dict:
    """One pass over every morphism evaluating all morphism-level claims.

    Combines unit naturality, replacement functoriality on endpoints,
    preservation of weak equivalences by the derived vertex-set functor,
    and radiant-preservation of the plain vertex-set functor, so large
    models are swept once instead of once per check.
    """
    from .deformation import BudgetExceeded

    cat = model.category
    d = model.deformation
    vertices = model.functors["vertices"]
    reverse = model.functors["reverse"]
    sets = model.sets
    unit_dicts: dict = {}
    replacements: dict = {}
    radiant: dict = {}
    for g in cat.objects():
        unit_dicts[g] = dict(d.unit(g).data)
        replacements[g] = d.replace_obj(g)
        radiant[g] = d.is_radiant(g)
    counts = {
        "morphisms": 0,
        "weak_equivalences": 0,
        "violations": [],
        "complete": True,
    }
    try:
        for f in cat.iter_homs(morphism_budget):
            counts["morphisms"] += 1
            rf = cat.induced_condensed(f)
            if rf.src != replacements[f.src] or rf.dst != replacements[f.dst]:
                counts["violations"].append(("replacement-endpoints", f))
                continue
            ua, ub = unit_dicts[f.src], unit_dicts[f.dst]
            rfm = dict(rf.data)
            if any(ub[img] != rfm[ua[v]] for v, img in f.data):
                counts["violations"].append(("unit-not-natural", f))
            # a weak equivalence is a map whose induced condensed map is
            # an isomorphism; rf is that induced map
            if cat.is_iso(rf):
                counts["weak_equivalences"] += 1
                # the derived vertex-set functor inverts every w.e.
                if not sets.is_we(vertices.mor(rf)):
                    counts["violations"].append(("derived-breaks-we", f))
                # edge reversal preserves w.e. outright
                if not cat.is_we(reverse.mor(f)):
                    counts["violations"].append(("reverse-breaks-we", f))
                if radiant[f.src] and radiant[f.dst]:
                    if not sets.is_we(vertices.mor(f)):
                        counts["violations"].append(("we-not-preserved-on-radiant", f))
    except BudgetExceeded:
        counts["complete"] = False
    counts["ok"] = not counts["violations"]
    return counts


_MODEL_CACHE: dict = {}


def graph_model(pool_size: int = 3) -> GraphModel:
    """The category, deformation and functor suite at a given pool size."""
    if pool_size in _MODEL_CACHE:
        return _MODEL_CACHE[pool_size]
    cat = GraphCategory(pool_size)

    set_objects = []
    seen = set()
    for g in cat.objects():
        for obj in (vertex_elements(g), vertex_edge_elements(g)):
            if obj not in seen:
                seen.add(obj)
                set_objects.append(obj)
    sets = SetCategory(f"sets({pool_size})", set_objects)

    def replace_obj(g):
        return cat.condensation(g)[1]

    def replace_mor(f):
        return cat.induced_condensed(f)

    def unit(g):
        rep, c = cat.condensation(g)
        return Mor(g, c, tuple((v, rep[v]) for v in g.vertices))

    condensed_deformation = RightDeformation(
        cat,
        is_radiant=lambda g: cat.condensation(g)[1] == g,
        replace_obj=replace_obj,
        replace_mor=replace_mor,
        unit=unit,
        name="condensation",
    )

    vertices = WEFunctor(
        "vertices", cat, sets, vertex_elements, lambda f: Mor(
            vertex_elements(f.src), vertex_elements(f.dst), _vertex_mor(f)
        )
    )
    vertices_edges = WEFunctor(
        "vertices_edges", cat, sets, vertex_edge_elements, lambda f: Mor(
            vertex_edge_elements(f.src),
            vertex_edge_elements(f.dst),
            _vertex_edge_mor(f),
        )
    )

    def reverse_obj(g: Graph) -> Graph:
        return Graph(g.vertices, tuple(sorted((v, u) for (u, v) in g.edges)))

    reverse = WEFunctor(
        "reverse", cat, cat,
        reverse_obj,
        lambda f: Mor(reverse_obj(f.src), reverse_obj(f.dst), f.data),
    )
    condensation_functor = WEFunctor(
        "condense", cat, cat, replace_obj, replace_mor
    )

    ident = identity_functor(cat)

    vertex_inclusion = NatTransformation(
        "vertex-inclusion",
        vertices,
        vertices_edges,
        lambda g: Mor(
            vertex_elements(g),
            vertex_edge_elements(g),
            tuple(sorted(((("v", v), ("v", v)) for v in g.vertices), key=repr)),
        ),
    )
    unit_nat = NatTransformation("unit", ident, condensation_functor, unit)

    model = GraphModel(
        category=cat,
        sets=sets,
        deformation=condensed_deformation,
        functors={
            "vertices": vertices,
            "vertices_edges": vertices_edges,
            "reverse": reverse,
            "condense": condensation_functor,
            "id": ident,
        },
        deformations={
            "vertices": condensed_deformation,
            "vertices_edges": condensed_deformation,
            "reverse": condensed_deformation,
            "condense": condensed_deformation,
            "id": condensed_deformation,
        },
        nats={"vertex_inclusion": vertex_inclusion, "unit": unit_nat},
    )
    _MODEL_CACHE[pool_size] = model
    return model
