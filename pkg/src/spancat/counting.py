"""Fixed- and periodic-point counting through shadows.

``fix_count`` counts points of period dividing n by composing the cell
of f with itself and taking the shadow of the identified power cell.
``fuller_count`` counts the same set a second way, as the shadow of the
twist cell composed with the n-fold product of copies of the cell of f,
together with a certified bijection between the two answers.  The
remaining operations are the Moebius refinement to exact periods and
the equivariant variant through fixed points.

For large products the twisted composite is enumerated directly in an
integer encoding instead of materializing the intermediate cells; the
two evaluation strategies are checked against each other in the tests
where their ranges overlap.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .basechange import base_change, iterated_bc
from .bicategory import compose_many, shadow
from .equivariant import (
    GSet,
    NotEquivariant,
    Subgroup,
    icon_eta,
    is_equivariant,
    weyl,
)
from .finset import FinMap, FinSet, FinSetError, nest
from .fuller import tau
from .smbf import BaseContext, OverMap, over_point

_DIVISOR_CAP = 10**6
_OBJECT_ROUTE_CAP = 100
_FUSED_ROW_CAP = 5 * 10**7
_FIX_CACHE: Dict[tuple, int] = {}
_FIX_CACHE_CAP = 500_000


def _check_endo(f: FinMap) -> None:
    if f.source != f.target:
        raise FinSetError("expected a self-map")


def _endo_cell(f: FinMap):
    ctx = BaseContext.absolute()
    sp = over_point(f.source)
    return base_change(ctx, OverMap(sp, sp, f))


def _map_key(f: FinMap, n: int) -> tuple:
    elems = f.source.elements
    return (elems, tuple(f.mapping[x] for x in elems), n)


def fix_count(f: FinMap, n: int) -> int:
    """Points of period dividing n, counted via the power cell.

    The n-fold composite of the cell of f is identified with the cell
    of the n-fold iterate, whose shadow is the fixed-point set.  The
    count is memoized per (map, n), since callers share subexpressions.
    """
    _check_endo(f)
    if n < 1:
        raise ValueError("n must be at least 1")
    key = _map_key(f, n)
    cached = _FIX_CACHE.get(key)
    if cached is not None:
        return cached
    cell = _endo_cell(f)
    composite, power, comparison = iterated_bc(cell, n)
    if not comparison.is_bijection():
        raise FinSetError("power-cell comparison failed to be a bijection")
    count = len(shadow(power.cell))
    if len(_FIX_CACHE) < _FIX_CACHE_CAP:
        _FIX_CACHE[key] = count
    return count


def iterate_count(f: FinMap, n: int) -> int:
    """Independent oracle: iterate the map pointwise and count fixed points."""
    _check_endo(f)
    count = 0
    for x in f.source.elements:
        y = x
        for _ in range(n):
            y = f.mapping[y]
        if y == x:
            count += 1
    return count


_DIGIT_CACHE: Dict[Tuple[int, int], np.ndarray] = {}


def _digit_rows(size: int, n: int) -> np.ndarray:
    """All length-n index tuples over range(size), row-major."""
    key = (size, n)
    if key not in _DIGIT_CACHE:
        rows = size**n
        if rows > _FUSED_ROW_CAP:
            raise ValueError("product enumeration too large")
        idx = np.arange(rows)
        cols = []
        for i in range(n - 1, -1, -1):
            cols.append((idx // (size**i)) % size)
        _DIGIT_CACHE[key] = np.stack(cols, axis=1)
    return _DIGIT_CACHE[key]


def _fused_twisted_shadow(f: FinMap, n: int):
    """Enumerate the twisted composite's total in an integer encoding and
    keep the shadow elements.

    Element k of the enumeration stands for the composite element
    (nest(f(a_1)..f(a_n)), nest(a_1..a_n)); the shadow condition asks the
    shifted source tuple to equal the target tuple.
    """
    elems = f.source.elements
    size = len(elems)
    index = {x: i for i, x in enumerate(elems)}
    if size == 0:
        return []
    arr = np.array([index[f.mapping[x]] for x in elems], dtype=np.int64)
    digits = _digit_rows(size, n)
    if n == 1:
        cond = arr[digits[:, 0]] == digits[:, 0]
    else:
        cond = arr[digits[:, 1]] == digits[:, 0]
        for i in range(2, n):
            cond &= arr[digits[:, i]] == digits[:, i - 1]
        cond &= arr[digits[:, 0]] == digits[:, n - 1]
    matches = np.nonzero(cond)[0]
    out = []
    for row in digits[matches]:
        parts = [elems[i] for i in row]
        tvec = nest([f.mapping[p] for p in parts])
        qvec = nest(parts)
        out.append((parts, (tvec, qvec)))
    return out


def fuller_count(f: FinMap, n: int, certify: bool = False):
    """Count via the twisted product route, with an optional certificate.

    Returns the size of the shadow of twist . box([f], ..., [f]) and,
    when asked, the verified bijection onto the power-cell shadow used
    by :func:`fix_count`.
    """
    _check_endo(f)
    if n < 1:
        raise ValueError("n must be at least 1")
    cell = _endo_cell(f)
    size = len(f.source)
    if size**n <= _OBJECT_ROUTE_CAP:
        bijection = tau([cell.cell] * n)
        count = len(bijection.source)
    else:
        matched = _fused_twisted_shadow(f, n)
        count = len(matched)
        source = FinSet(
            f"sh(twisted;{f.source.name};{n})",
            (e for _, e in matched),
            validate=False,
        )
        composite = compose_many([cell.cell] * n)
        target = shadow(composite)
        mapping = {}
        for parts, e in matched:
            acc = parts[0]
            for p in parts[1:]:
                acc = (acc, p)
            mapping[e] = acc
        bijection = FinMap(source, target, mapping)
        if not bijection.is_bijection():
            raise FinSetError("twisted-route certificate failed to be a bijection")
    expected = fix_count(f, n)
    if count != expected:
        raise FinSetError(
            f"twisted count {count} disagrees with the power-cell count {expected}"
        )
    if certify:
        return count, bijection
    return count


def mobius(m: int) -> int:
    """The Moebius function by trial-division factorization."""
    if m < 1:
        raise ValueError("mobius needs a positive integer")
    result = 1
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def divisors(n: int) -> list:
    if n < 1 or n > _DIVISOR_CAP:
        raise ValueError("n out of range")
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if n // d not in small]
    return small + large


def least_period_count(f: FinMap, n: int) -> int:
    """Points of exact period n, by Moebius inversion of fix_count."""
    _check_endo(f)
    if n < 1:
        raise ValueError("n must be at least 1")
    return sum(mobius(n // d) * fix_count(f, d) for d in divisors(n))


def equivariant_fix_count(
    x: GSet, f: FinMap, h: Subgroup, n: int
) -> int:
    """Fixed points of the n-th iterate on the h-fixed subset.

    The count is taken on the fixed-point cell produced by the icon
    comparison, so it factors through the same shadow machinery as the
    non-equivariant counts.
    """
    _check_endo(f)
    if f.source != x.space:
        raise FinSetError("map does not act on the given carrier")
    if not is_equivariant(f, x, x):
        raise NotEquivariant("map is not equivariant")
    w = weyl(x.group, h)
    sp = over_point(x.space)
    eta = icon_eta(x.group, OverMap(sp, sp, f), x, x, h, w)
    fixed_cell = eta.forward.dst
    fixed_space = fixed_cell.dst.space
    fixed_map = FinMap(
        fixed_space,
        fixed_space,
        {a: f.mapping[a] for a in fixed_space.elements},
    )
    return fix_count(fixed_map, n)
