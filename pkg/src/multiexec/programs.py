"""Example programs, secure and insecure, used by tests and benchmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .enforcement import Program
from .labeled import Facet, Faceted, LabeledSet, facet_labels, facet_select, labels_of, project
from .lattices import TOP, Label, Lattice, LatticeError, TwoPoint, join_all


def secure(x: LabeledSet) -> LabeledSet:
    """How many inputs each of L and H can see; needs two-point labels."""
    return x.with_items((len(project(x, lvl)), lvl) for lvl in ("L", "H"))


def insecure(x: LabeledSet) -> LabeledSet:
    """Publishes the total input size, secret elements included."""
    return x.with_items([(len(x), "L")])


def bad_sum(x: LabeledSet) -> LabeledSet:
    # the output label depends on which labels are present
    total = sum(v for v, _ in x.items)
    return x.with_items([(total, join_all(x.lattice, labels_of(x)))])


def good_sum(levels: Iterable[Label]) -> Callable[[LabeledSet], LabeledSet]:
    """Sum of the elements labeled by a member of ``levels``, output at their join."""
    levels = frozenset(levels)

    def run(x: LabeledSet) -> LabeledSet:
        total = sum(v for v, l in x.items if l in levels)
        return x.with_items([(total, join_all(x.lattice, levels))])

    run.__name__ = "goodSum"
    return run


def pairwise(x: LabeledSet) -> LabeledSet:
    """``max(a, b)`` at ``l ⊔ j`` for every ordered pair of inputs, self-pairs included."""
    join = x.lattice.join
    items = list(x.items)
    return x.with_items((max(a, b), join(l, j)) for a, l in items for b, j in items)


def label_size(label: Label) -> float:
    """Number of principals in a set-shaped label; TOP counts as unbounded."""
    if label is TOP:
        return math.inf
    if isinstance(label, frozenset):
        return len(label)
    raise LatticeError(f"pairwise1 needs powerset-style labels, got {label!r}")


def pairwise_1(x: LabeledSet) -> LabeledSet:
    """:func:`pairwise` restricted to inputs whose labels have at most one principal."""
    small = x.with_items(p for p in x.items if label_size(p[1]) <= 1)
    return pairwise(small)


# ---------------------------------------------------------------------------
# Faceted list sums


def _labels(i: list[Faceted]) -> set:
    out: set = set()
    for f in i:
        out |= facet_labels(f)
    return out


def bad_list_sum1(i: list[Faceted], L: Lattice) -> Faceted:
    """Sums the most privileged view and returns it unguarded."""
    return sum(facet_select(f, L.top, L) for f in i)


def bad_list_sum2(i: list[Faceted], L: Lattice) -> Faceted:
    """Guards the sum by the join of the labels present, which itself leaks."""
    return Facet(join_all(L, _labels(i)), sum(facet_select(f, L.top, L) for f in i), 0)


def good_list_sum(level: Label, L: Lattice) -> Callable[[list[Faceted]], Faceted]:
    """Fixes the guard up front: the sum of the ``level`` views, visible at ``level``."""

    def run(i: list[Faceted]) -> Faceted:
        return Facet(level, sum(facet_select(f, level, L) for f in i), 0)

    return run


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class ProgramSpec:
    name: str
    make: Callable[..., Callable[[LabeledSet], LabeledSet]]
    noninterfering: bool
    needs: tuple[str, ...] = field(default_factory=tuple)
    parameterized: bool = False

    def build(self, *args, trace: bool = False) -> Program:
        fn = self.make(*args) if self.parameterized else self.make
        return Program(fn, self.name, trace=trace)

    def check_lattice(self, L: Lattice) -> None:
        if "two-point" in self.needs and not isinstance(L, TwoPoint):
            raise LatticeError(f"{self.name} runs on two-point labels only, not {L.descriptor}")


PROGRAMS: dict[str, ProgramSpec] = {
    "secure": ProgramSpec("secure", secure, True, ("two-point",)),
    "insecure": ProgramSpec("insecure", insecure, False, ("two-point",)),
    "badSum": ProgramSpec("badSum", bad_sum, False),
    "goodSum": ProgramSpec("goodSum", good_sum, True, parameterized=True),
    "pairwise": ProgramSpec("pairwise", pairwise, True),
    "pairwise1": ProgramSpec("pairwise1", pairwise_1, True, ("set-labels",)),
}
