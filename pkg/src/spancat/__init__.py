"""Spans of finite sets as an executable bicategory with shadow.

The package provides the span calculus over an ambient base (products,
pullback, pushforward, span actions and their rigidity), the bicategory
layer with its coherence isomorphisms, the cyclic twist structure,
base-change cells, finite group actions with fixed-point functors,
trace-style fixed- and periodic-point counting, and a small calculus of
right-deformable functors exercised on a graph model.  Every coherence
figure is a seeded randomized suite; see :mod:`spancat.suites`.
"""

from .finset import FinMap, FinSet, cartesian_product, is_injective, pullback
from .smbf import (
    BaseContext,
    IndexedSpace,
    MultiSpan,
    OverMap,
    ParamSet,
    beck_chevalley,
    external_product,
    is_rigid,
    multispan_action,
    pullback_along,
    pushforward_along,
    search_automorphisms,
)
from .bicategory import Cell1, Cell2, Iso2, associator, compose, rotator, shadow, unit
from .suites import SuiteReport, run_suite, suite_names

__version__ = "0.1.0"

__all__ = [
    "BaseContext",
    "Cell1",
    "Cell2",
    "FinMap",
    "FinSet",
    "IndexedSpace",
    "Iso2",
    "MultiSpan",
    "OverMap",
    "ParamSet",
    "SuiteReport",
    "associator",
    "beck_chevalley",
    "cartesian_product",
    "compose",
    "external_product",
    "is_injective",
    "is_rigid",
    "multispan_action",
    "pullback",
    "pullback_along",
    "pushforward_along",
    "rotator",
    "run_suite",
    "search_automorphisms",
    "shadow",
    "suite_names",
    "unit",
]
