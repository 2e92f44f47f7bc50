"""Right-deformable functors over finitely presented categories with
weak equivalences.

A category here is a finite object list with hom-sets enumerable on
demand; enumeration is metered so exhaustive checks degrade gracefully
to budgeted ones on large categories.  A right deformation is a
radiant-objects predicate, a replacement endofunctor landing in them,
and a unit transformation through weak equivalences.  The derived
functor of F is F after replacement; comparisons between derived
composites are built by inserting replacement units and verified to be
weak equivalences componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple


class DeformationError(ValueError):
    pass


class BudgetExceeded(DeformationError):
    pass


@dataclass(frozen=True)
class Mor:
    """A morphism with a hashable payload identifying it."""

    src: object
    dst: object
    data: object


class WECategory:
    """A finite category with weak equivalences and lazy hom-sets."""

    name: str = "cat"

    def objects(self) -> Sequence:
        raise NotImplementedError

    def hom(self, a, b) -> Sequence[Mor]:
        raise NotImplementedError

    def compose(self, g: Mor, f: Mor) -> Mor:
        raise NotImplementedError

    def identity(self, a) -> Mor:
        raise NotImplementedError

    def is_we(self, f: Mor) -> bool:
        raise NotImplementedError

    def is_iso(self, f: Mor) -> bool:
        """Default: search the reverse hom-set for a two-sided inverse."""
        for g in self.hom(f.dst, f.src):
            if (
                self.compose(g, f) == self.identity(f.src)
                and self.compose(f, g) == self.identity(f.dst)
            ):
                return True
        return False

    def iter_homs(self, budget: Optional[int] = None) -> Iterable[Mor]:
        """Stream every morphism in deterministic object order.

        Raises :class:`BudgetExceeded` after yielding ``budget`` many.
        """
        count = 0
        for a in self.objects():
            for b in self.objects():
                for f in self.hom(a, b):
                    if budget is not None and count >= budget:
                        raise BudgetExceeded(
                            f"morphism budget {budget} exhausted"
                        )
                    count += 1
                    yield f


class TableCategory(WECategory):
    """A category given by explicit tables (the JSON-loadable form)."""

    def __init__(
        self,
        name: str,
        objects: Sequence,
        homs: Dict[tuple, Sequence],
        compose_table: Dict[tuple, object],
        identities: Dict[object, object],
        we_flags: Dict[tuple, bool],
        validate: bool = True,
    ):
        self.name = name
        self._objects = tuple(objects)
        self._homs = {
            (a, b): tuple(Mor(a, b, d) for d in ds) for (a, b), ds in homs.items()
        }
        self._compose = dict(compose_table)
        self._identities = dict(identities)
        self._we = dict(we_flags)
        if validate:
            self._validate()

    def _validate(self):
        for a in self._objects:
            if a not in self._identities:
                raise DeformationError(f"no identity for {a!r}")
            ida = self.identity(a)
            for b in self._objects:
                for f in self.hom(a, b):
                    if self.compose(f, ida) != f:
                        raise DeformationError(f"right identity fails at {f!r}")
                    if self.compose(self.identity(b), f) != f:
                        raise DeformationError(f"left identity fails at {f!r}")
        for a in self._objects:
            for b in self._objects:
                for c in self._objects:
                    for d in self._objects:
                        for f in self.hom(a, b):
                            for g in self.hom(b, c):
                                for h in self.hom(c, d):
                                    if self.compose(h, self.compose(g, f)) != self.compose(
                                        self.compose(h, g), f
                                    ):
                                        raise DeformationError(
                                            "composition is not associative"
                                        )
        for a in self._objects:
            if not self.is_we(self.identity(a)):
                raise DeformationError(f"identity at {a!r} is not a weak equivalence")

    def objects(self):
        return self._objects

    def hom(self, a, b):
        return self._homs.get((a, b), ())

    def compose(self, g, f):
        if f.dst != g.src:
            raise DeformationError("morphisms are not composable")
        data = self._compose[(g.data, f.data)]
        return Mor(f.src, g.dst, data)

    def identity(self, a):
        return Mor(a, a, self._identities[a])

    def is_we(self, f):
        return bool(self._we.get(f.data, False))

    @classmethod
    def from_json(cls, doc: dict) -> "TableCategory":
        """Load {objects, homs, composition, identities, we} tables."""
        homs = {}
        for entry in doc["homs"]:
            homs[(entry["src"], entry["dst"])] = list(entry["maps"])
        compose_table = {
            (e["second"], e["first"]): e["result"] for e in doc["composition"]
        }
        we = {m: True for m in doc.get("we", [])}
        return cls(
            doc.get("name", "table"),
            doc["objects"],
            homs,
            compose_table,
            doc["identities"],
            we,
        )


class SetCategory(WECategory):
    """Finite sets and all functions; weak equivalences are bijections."""

    def __init__(self, name: str, objects: Sequence[frozenset]):
        self.name = name
        self._objects = tuple(dict.fromkeys(objects))
        self._hom_cache: dict = {}

    def objects(self):
        return self._objects

    def hom(self, a, b):
        key = (a, b)
        if key not in self._hom_cache:
            from itertools import product as iterproduct

            src = sorted(a, key=repr)
            dst = sorted(b, key=repr)
            if src and not dst:
                self._hom_cache[key] = ()
            else:
                maps = []
                for images in iterproduct(dst, repeat=len(src)):
                    maps.append(Mor(a, b, tuple(zip(src, images))))
                self._hom_cache[key] = tuple(maps)
        return self._hom_cache[key]

    def compose(self, g, f):
        if f.dst != g.src:
            raise DeformationError("functions are not composable")
        gm = dict(g.data)
        return Mor(f.src, g.dst, tuple((x, gm[y]) for x, y in f.data))

    def identity(self, a):
        return Mor(a, a, tuple((x, x) for x in sorted(a, key=repr)))

    def is_we(self, f):
        values = [y for _, y in f.data]
        return len(set(values)) == len(values) == len(f.dst)

    def is_iso(self, f):
        return self.is_we(f)


class WEFunctor:
    """A functor between categories with weak equivalences."""

    def __init__(self, name: str, source: WECategory, target: WECategory,
                 obj: Callable, mor: Callable):
        self.name = name
        self.source = source
        self.target = target
        self.obj = obj
        self.mor = mor

    def __repr__(self):
        return f"WEFunctor({self.name!r})"


def identity_functor(cat: WECategory) -> WEFunctor:
    return WEFunctor("id", cat, cat, lambda a: a, lambda f: f)


def compose_functors(second: WEFunctor, first: WEFunctor) -> WEFunctor:
    if first.target is not second.source:
        raise DeformationError("functors are not composable")
    return WEFunctor(
        f"{second.name}.{first.name}",
        first.source,
        second.target,
        lambda a: second.obj(first.obj(a)),
        lambda f: second.mor(first.mor(f)),
    )


def validate_functor(functor: WEFunctor, pair_budget: Optional[int] = None) -> "Report":
    """Identities and composition are preserved, up to a pair budget."""
    violations = []
    cat = functor.source
    for a in cat.objects():
        if functor.mor(cat.identity(a)) != functor.target.identity(functor.obj(a)):
            violations.append(("identity", a))
    checked = 0
    complete = True
    try:
        for f in cat.iter_homs():
            for b in cat.objects():
                for g in cat.hom(f.dst, b):
                    if pair_budget is not None and checked >= pair_budget:
                        raise BudgetExceeded("pair budget exhausted")
                    checked += 1
                    if functor.mor(cat.compose(g, f)) != functor.target.compose(
                        functor.mor(g), functor.mor(f)
                    ):
                        violations.append(("composition", (f, g)))
    except BudgetExceeded:
        complete = False
    return Report(not violations, tuple(violations), checked, complete)


@dataclass(frozen=True)
class Report:
    ok: bool
    violations: tuple
    checked_morphisms: int = 0
    complete: bool = True

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [repr(v) for v in self.violations[:10]],
            "checked_morphisms": self.checked_morphisms,
            "complete": self.complete,
        }


class RightDeformation:
    """Radiant objects, a replacement landing in them, and a unit."""

    def __init__(
        self,
        cat: WECategory,
        is_radiant: Callable,
        replace_obj: Callable,
        replace_mor: Callable,
        unit: Callable,
        name: str = "deformation",
    ):
        self.cat = cat
        self.is_radiant = is_radiant
        self.replace_obj = replace_obj
        self.replace_mor = replace_mor
        self.unit = unit
        self.name = name


def validate_deformation(
    functor: WEFunctor,
    d: RightDeformation,
    morphism_budget: Optional[int] = None,
) -> Report:
    """Check the deformation data against a functor.

    Object-level clauses (replacement lands radiant, units are weak
    equivalences) run over every object.  Morphism-level clauses (unit
    naturality, replacement functoriality, preservation of weak
    equivalences between radiant objects) stream hom-sets up to the
    budget.
    """
    if d.cat is not functor.source:
        raise DeformationError("deformation lives on a different category")
    cat = d.cat
    violations: List = []
    units: Dict = {}
    replacements: Dict = {}
    radiant: Dict = {}
    for a in cat.objects():
        ra = d.replace_obj(a)
        replacements[a] = ra
        radiant[a] = d.is_radiant(a)
        if not d.is_radiant(ra):
            violations.append(("replacement-not-radiant", a))
        u = d.unit(a)
        units[a] = u
        if u.src != a or u.dst != ra:
            violations.append(("unit-endpoints", a))
        elif not cat.is_we(u):
            violations.append(("unit-not-we", a))
    checked = 0
    complete = True
    try:
        for f in cat.iter_homs(morphism_budget):
            checked += 1
            rf = d.replace_mor(f)
            if rf.src != replacements[f.src] or rf.dst != replacements[f.dst]:
                violations.append(("replacement-endpoints", f))
                continue
            if cat.compose(rf, units[f.src]) != cat.compose(units[f.dst], f):
                violations.append(("unit-not-natural", f))
            if radiant[f.src] and radiant[f.dst] and cat.is_we(f):
                if not functor.target.is_we(functor.mor(f)):
                    violations.append(("we-not-preserved-on-radiant", f))
    except BudgetExceeded:
        complete = False
    return Report(not violations, tuple(violations), checked, complete)


def derived_functor(
    functor: WEFunctor,
    d: RightDeformation,
    morphism_budget: Optional[int] = None,
) -> Tuple[WEFunctor, Report]:
    """F after replacement, verified to preserve every weak equivalence."""
    derived = WEFunctor(
        f"R{functor.name}",
        functor.source,
        functor.target,
        lambda a: functor.obj(d.replace_obj(a)),
        lambda f: functor.mor(d.replace_mor(f)),
    )
    violations = []
    checked = 0
    complete = True
    try:
        for f in functor.source.iter_homs(morphism_budget):
            checked += 1
            if functor.source.is_we(f) and not functor.target.is_we(derived.mor(f)):
                violations.append(("derived-breaks-we", f))
    except BudgetExceeded:
        complete = False
    return derived, Report(not violations, tuple(violations), checked, complete)


def expand_radiant(
    d: RightDeformation,
    functor: WEFunctor,
    extra: Sequence,
    morphism_budget: Optional[int] = None,
):
    """Enlarge the radiant objects by the given ones, when the functor
    sends their units to weak equivalences.

    Returns the enlarged deformation, or the first offending object.
    On success the enlarged preservation property is re-verified up to
    the budget.
    """
    extra = list(extra)
    for x in extra:
        u = d.unit(x)
        if not functor.target.is_we(functor.mor(u)):
            return x
    extra_set = set(extra)

    def is_radiant(a):
        return d.is_radiant(a) or a in extra_set

    enlarged = RightDeformation(
        d.cat, is_radiant, d.replace_obj, d.replace_mor, d.unit,
        name=f"{d.name}+{len(extra)}",
    )
    checked = 0
    try:
        for f in d.cat.iter_homs(morphism_budget):
            checked += 1
            if (
                is_radiant(f.src)
                and is_radiant(f.dst)
                and d.cat.is_we(f)
                and not functor.target.is_we(functor.mor(f))
            ):
                raise DeformationError(
                    f"expansion broke preservation at {f!r}"
                )
    except BudgetExceeded:
        pass
    return enlarged


@dataclass(frozen=True)
class NatTransformation:
    name: str
    src: WEFunctor
    dst: WEFunctor
    component: Callable = field(compare=False)


def validate_nat(eta: NatTransformation, morphism_budget: Optional[int] = None) -> Report:
    cat, target = eta.src.source, eta.src.target
    violations = []
    for a in cat.objects():
        c = eta.component(a)
        if c.src != eta.src.obj(a) or c.dst != eta.dst.obj(a):
            violations.append(("component-endpoints", a))
    checked = 0
    complete = True
    try:
        for f in cat.iter_homs(morphism_budget):
            checked += 1
            lhs = target.compose(eta.component(f.dst), eta.src.mor(f))
            rhs = target.compose(eta.dst.mor(f), eta.component(f.src))
            if lhs != rhs:
                violations.append(("not-natural", f))
    except BudgetExceeded:
        complete = False
    return Report(not violations, tuple(violations), checked, complete)


def derived_nat(
    eta: NatTransformation,
    d_src: RightDeformation,
    d_dst: RightDeformation,
    morphism_budget: Optional[int] = None,
) -> Tuple[NatTransformation, Report]:
    """The transformation between derived functors: the component at an
    object is the original component at its replacement."""
    if d_src.cat is not eta.src.source or d_dst.cat is not eta.src.source:
        raise DeformationError("deformations live on the wrong category")
    report = validate_nat(eta, morphism_budget)
    if not report.ok:
        raise DeformationError("input transformation is not natural")
    rf, _ = derived_functor(eta.src, d_src, morphism_budget=0)
    rg, _ = derived_functor(eta.dst, d_dst, morphism_budget=0)

    def component(a):
        return eta.component(d_src.replace_obj(a))

    derived = NatTransformation(f"R{eta.name}", rf, rg, component)
    out = validate_nat(derived, morphism_budget)
    if not out.ok:
        raise DeformationError("derived transformation failed naturality")
    return derived, out


def vertical_compose_nat(second: NatTransformation, first: NatTransformation) -> NatTransformation:
    if first.dst is not second.src and first.dst.name != second.src.name:
        raise DeformationError("transformations are not vertically composable")
    target = first.src.target

    def component(a):
        return target.compose(second.component(a), first.component(a))

    return NatTransformation(
        f"{second.name}.{first.name}", first.src, second.dst, component
    )


@dataclass(frozen=True)
class DeformableList:
    """Composable functors with a deformation for each source stage."""

    functors: tuple
    deformations: tuple

    def __post_init__(self):
        if len(self.functors) != len(self.deformations):
            raise DeformationError("one deformation per functor is required")
        for f, d in zip(self.functors, self.deformations):
            if d.cat is not f.source:
                raise DeformationError("deformation on the wrong category")
        for i in range(len(self.functors) - 1):
            if self.functors[i].target is not self.functors[i + 1].source:
                raise DeformationError("functors do not compose")


def validate_list(dl: DeformableList, morphism_budget: Optional[int] = None) -> Report:
    """Each stage validates, and each functor sends the previous stage's
    radiant objects into the next stage's."""
    violations = []
    checked = 0
    complete = True
    for i, (f, d) in enumerate(zip(dl.functors, dl.deformations)):
        rep = validate_deformation(f, d, morphism_budget)
        checked += rep.checked_morphisms
        complete = complete and rep.complete
        if not rep.ok:
            violations.append((f"stage-{i}", rep.violations[:3]))
        if i + 1 < len(dl.functors):
            nxt = dl.deformations[i + 1]
            for a in d.cat.objects():
                if d.is_radiant(a) and not nxt.is_radiant(f.obj(a)):
                    violations.append((f"stage-{i}-radiance-not-preserved", a))
                    break
    return Report(not violations, tuple(violations), checked, complete)


def compare_composites(
    dl: DeformableList, morphism_budget: Optional[int] = None
) -> Tuple[NatTransformation, Report]:
    """The canonical map from the derived composite to the composite of
    derived functors, built by inserting replacement units.

    Every component is verified to be a weak equivalence.
    """
    rep = validate_list(dl, morphism_budget)
    if not rep.ok:
        raise DeformationError(f"list is not coherently deformable: {rep.violations[:2]}")
    functors = list(dl.functors)
    defs = list(dl.deformations)
    n = len(functors)
    target = functors[-1].target

    composite = functors[0]
    for f in functors[1:]:
        composite = compose_functors(f, composite)
    derived_composite, _ = derived_functor(composite, defs[0], morphism_budget=0)
    pointwise = None
    for f, d in zip(functors, defs):
        rf, _ = derived_functor(f, d, morphism_budget=0)
        pointwise = rf if pointwise is None else compose_functors(rf, pointwise)

    def tail_mor(i, m):
        for f in functors[i:]:
            m = f.mor(m)
        return m

    def component(x):
        v = defs[0].replace_obj(x)
        maps = []
        for i in range(n - 1):
            v_next = functors[i].obj(v)
            u = defs[i + 1].unit(v_next)
            maps.append(tail_mor(i + 1, u))
            v = defs[i + 1].replace_obj(v_next)
        out = target.identity(derived_composite.obj(x))
        for m in maps:
            out = target.compose(m, out)
        return out

    comparison = NatTransformation(
        "composite-comparison", derived_composite, pointwise, component
    )
    violations = []
    for x in dl.deformations[0].cat.objects():
        c = component(x)
        if c.src != derived_composite.obj(x) or c.dst != pointwise.obj(x):
            violations.append(("component-endpoints", x))
        elif not target.is_we(c):
            violations.append(("component-not-we", x))
    return comparison, Report(not violations, tuple(violations))


class FullSubcategory(WECategory):
    """The full subcategory on chosen objects, with chosen equivalences."""

    def __init__(self, parent: WECategory, objects: Sequence, we=None, name=None):
        self.parent = parent
        self._objects = tuple(objects)
        self._we = we
        self.name = name or f"{parent.name}|sub"

    def objects(self):
        return self._objects

    def hom(self, a, b):
        return self.parent.hom(a, b)

    def compose(self, g, f):
        return self.parent.compose(g, f)

    def identity(self, a):
        return self.parent.identity(a)

    def is_we(self, f):
        if self._we is None:
            return self.parent.is_we(f)
        return self._we(f)


def homotopy_category(
    cat: WECategory,
    d: RightDeformation,
    morphism_budget: Optional[int] = None,
    radiant_pair_budget: Optional[int] = None,
) -> Tuple[WECategory, WEFunctor, Report]:
    """The radiant full subcategory as a model of the localization.

    Requires the replacement to be idempotent and weak equivalences
    between radiant objects to be isomorphisms; both hypotheses are
    checked and a precise witness is reported on failure.
    """
    violations: List = []
    for a in cat.objects():
        ra = d.replace_obj(a)
        if d.replace_obj(ra) != ra:
            violations.append(("replacement-not-idempotent", a))
    radiant = [a for a in cat.objects() if d.is_radiant(a)]
    checked = 0
    complete = True
    outer = 0
    done = False
    for a in radiant:
        if done:
            break
        for b in radiant:
            outer += 1
            if radiant_pair_budget is not None and outer > radiant_pair_budget:
                complete = False
                done = True
                break
            for f in cat.hom(a, b):
                checked += 1
                if cat.is_we(f) and not cat.is_iso(f):
                    violations.append(("we-not-iso-between-radiant", f))
    if violations:
        return (
            FullSubcategory(cat, radiant),
            identity_functor(cat),
            Report(False, tuple(violations), checked, complete),
        )
    ho = FullSubcategory(cat, radiant, we=cat.is_iso, name=f"Ho({cat.name})")
    localization = WEFunctor("localize", cat, ho, d.replace_obj, d.replace_mor)
    return ho, localization, Report(True, (), checked, complete)


def localization_factors(
    s: WEFunctor, d: RightDeformation, morphism_budget: Optional[int] = None
) -> Report:
    """A weak-equivalence-inverting functor factors through replacement:
    its value on each unit is an isomorphism, naturally."""
    cat = d.cat
    violations = []
    for a in cat.objects():
        if not s.target.is_iso(s.mor(d.unit(a))):
            violations.append(("unit-not-inverted", a))
    checked = 0
    complete = True
    try:
        for f in cat.iter_homs(morphism_budget):
            checked += 1
            lhs = s.target.compose(s.mor(d.unit(f.dst)), s.mor(f))
            rhs = s.target.compose(s.mor(d.replace_mor(f)), s.mor(d.unit(f.src)))
            if lhs != rhs:
                violations.append(("factorization-not-natural", f))
    except BudgetExceeded:
        complete = False
    return Report(not violations, tuple(violations), checked, complete)
