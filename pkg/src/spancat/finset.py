"""Finite sets and total maps between them.

Elements are atoms (strings) or ordered pairs of elements; products are
built as left-nested pairs and never flattened implicitly.  Construction
is deterministic: rebuilding an expression from equal inputs yields a
structurally equal object, element order included.  All values are
immutable after construction, so they can be shared freely across
threads and worker processes.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence, Tuple


class FinSetError(ValueError):
    """Malformed set or map data, or an ill-typed operation."""


class IncompatibleCospan(FinSetError):
    """Pullback legs whose targets differ."""


# An Element is a str or a pair (Element, Element).
Element = object

_MISSING = object()


def is_element(x) -> bool:
    if isinstance(x, str):
        return True
    return (
        isinstance(x, tuple)
        and len(x) == 2
        and is_element(x[0])
        and is_element(x[1])
    )


def nest(items: Sequence[Element]) -> Element:
    """Left-nest a sequence into pairs: [a, b, c] -> ((a, b), c).

    The empty sequence nests to the canonical point element, and a
    one-element sequence is the element itself.
    """
    if not items:
        return POINT_ELEMENT
    acc = items[0]
    for x in items[1:]:
        acc = (acc, x)
    return acc


def unnest(x: Element, n: int) -> list:
    """Recover the n components of a left-nested element, n >= 1."""
    out = []
    for _ in range(n - 1):
        out.append(x[1])
        x = x[0]
    out.append(x)
    out.reverse()
    return out


class FinSet:
    """A named finite set with a fixed, construction-order element tuple."""

    __slots__ = ("name", "elements", "_members")

    def __init__(self, name: str, elements: Iterable[Element], validate: bool = True):
        self.name = name
        self.elements = tuple(elements)
        self._members = frozenset(self.elements)
        if validate:
            if len(self._members) != len(self.elements):
                raise FinSetError(f"duplicate elements in {name!r}")
            for x in self.elements:
                if not is_element(x):
                    raise FinSetError(f"bad element {x!r} in {name!r}")

    def __contains__(self, x) -> bool:
        return x in self._members

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return self.name == other.name and self.elements == other.elements

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        return hash((self.name, self.elements))

    def __repr__(self) -> str:
        return f"FinSet({self.name!r}, {list(self.elements)!r})"


POINT_ELEMENT: Element = "*"
POINT = FinSet("pt", (POINT_ELEMENT,))


class FinMap:
    """A total map between finite sets given by an explicit association."""

    __slots__ = ("source", "target", "mapping")

    def __init__(self, source: FinSet, target: FinSet, mapping, validate: bool = True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if validate:
            if len(self.mapping) != len(source):
                raise FinSetError(
                    f"map {source.name!r}->{target.name!r} is not total: "
                    f"{len(self.mapping)} images for {len(source)} elements"
                )
            for x in source.elements:
                y = self.mapping.get(x, _MISSING)
                if y is _MISSING:
                    raise FinSetError(f"no image for {x!r} in map from {source.name!r}")
                if y not in target:
                    raise FinSetError(
                        f"image {y!r} of {x!r} is not in {target.name!r}"
                    )

    def __call__(self, x: Element) -> Element:
        return self.mapping[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.mapping == other.mapping
        )

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"FinMap({self.source.name!r} -> {self.target.name!r})"

    def is_bijection(self) -> bool:
        return len(set(self.mapping.values())) == len(self.source) == len(self.target)


def identity(a: FinSet) -> FinMap:
    return FinMap(a, a, {x: x for x in a.elements}, validate=False)


def compose(g: FinMap, f: FinMap) -> FinMap:
    """g after f.  Defined only when f.target structurally equals g.source."""
    if f.target != g.source:
        raise FinSetError(
            f"not composable: {f.target.name!r} != {g.source.name!r}"
        )
    gm = g.mapping
    return FinMap(
        f.source, g.target, {x: gm[y] for x, y in f.mapping.items()}, validate=False
    )


def constant(a: FinSet, b: FinSet, value: Element) -> FinMap:
    if value not in b:
        raise FinSetError(f"constant value {value!r} is not in {b.name!r}")
    return FinMap(a, b, {x: value for x in a.elements}, validate=False)


def terminal_map(a: FinSet) -> FinMap:
    return constant(a, POINT, POINT_ELEMENT)


def cartesian_product(sets: Sequence[FinSet]) -> Tuple[FinSet, list]:
    """Left-nested product with component projections.

    The empty product is the fixed one-point set; a singleton list
    returns the set itself with the identity as its projection.
    """
    sets = list(sets)
    if not sets:
        return POINT, []
    if len(sets) == 1:
        return sets[0], [identity(sets[0])]
    name = "prod(" + ",".join(s.name for s in sets) + ")"
    rows = [(x, (x,)) for x in sets[0].elements]
    for s in sets[1:]:
        rows = [((acc, x), flat + (x,)) for acc, flat in rows for x in s.elements]
    total = FinSet(name, (nested for nested, _ in rows), validate=False)
    projections = [
        FinMap(total, s, {nested: flat[i] for nested, flat in rows}, validate=False)
        for i, s in enumerate(sets)
    ]
    return total, projections


def pullback(f: FinMap, g: FinMap) -> Tuple[FinSet, FinMap, FinMap]:
    """The set of pairs (b, c) with f(b) = g(c), with its two projections."""
    if f.target != g.target:
        raise IncompatibleCospan("incompatible cospan")
    index: dict = {}
    for c in g.source.elements:
        index.setdefault(g.mapping[c], []).append(c)
    pairs = [
        (b, c) for b in f.source.elements for c in index.get(f.mapping[b], ())
    ]
    total = FinSet(f"pb({f.source.name},{g.source.name})", pairs, validate=False)
    p1 = FinMap(total, f.source, {e: e[0] for e in pairs}, validate=False)
    p2 = FinMap(total, g.source, {e: e[1] for e in pairs}, validate=False)
    return total, p1, p2


def collision(f: FinMap) -> Optional[Tuple[Element, Element]]:
    """The first pair of distinct source elements with equal images, if any."""
    seen: dict = {}
    for x in f.source.elements:
        y = f.mapping[x]
        if y in seen:
            return (seen[y], x)
        seen[y] = x
    return None


def is_injective(f: FinMap) -> bool:
    return collision(f) is None
