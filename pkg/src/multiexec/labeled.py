"""Labeled sets and faceted values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Union

from .lattices import Label, Lattice, LatticeError, split_top


class LabeledSet:
    """A finite set of ``(value, label)`` pairs over one lattice.

    Equality and hashing look only at the pairs.  Iteration is sorted by the
    lattice's canonical order on labels and then by value, so printing and
    enumeration are deterministic.
    """

    __slots__ = ("lattice", "items")

    def __init__(self, lattice: Lattice, items: Iterable[tuple[Any, Label]] = ()):
        self.lattice = lattice
        self.items = frozenset((v, l) for v, l in items)

    @classmethod
    def of(cls, lattice: Lattice, *pairs: tuple[Any, Label]) -> "LabeledSet":
        return cls(lattice, pairs)

    def __iter__(self) -> Iterator[tuple[Any, Label]]:
        key = self.lattice.key
        return iter(sorted(self.items, key=lambda p: (key(p[1]), _value_key(p[0]))))

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, pair) -> bool:
        return pair in self.items

    def __eq__(self, other) -> bool:
        if isinstance(other, LabeledSet):
            return self.items == other.items
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.items)

    def __or__(self, other: "LabeledSet") -> "LabeledSet":
        return LabeledSet(self.lattice, self.items | other.items)

    def __le__(self, other: "LabeledSet") -> bool:
        return self.items <= other.items

    def values(self) -> list:
        return [v for v, _ in self]

    def with_items(self, items: Iterable[tuple[Any, Label]]) -> "LabeledSet":
        return LabeledSet(self.lattice, items)

    def format(self) -> str:
        fmt = self.lattice.format
        return "{" + ", ".join(f"{v}^{_wrap(fmt(l))}" for v, l in self) + "}"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"LabeledSet({self.format()})"


def _value_key(v) -> tuple:
    # values of different types still need a total order
    return (type(v).__name__, v)


def _wrap(text: str) -> str:
    return text if text.startswith("{") else "{" + text + "}"


def project(x: LabeledSet, level: Label) -> LabeledSet:
    """``x↓ℓ``: the elements whose labels flow to ``level``."""
    leq = x.lattice.leq
    return x.with_items(p for p in x.items if leq(p[1], level))


def equivalent_at(x: LabeledSet, y: LabeledSet, level: Label) -> bool:
    return project(x, level) == project(y, level)


def labels_of(x: LabeledSet) -> frozenset:
    return frozenset(l for _, l in x.items)


def select(x: LabeledSet, levels: Iterable[Label]) -> LabeledSet:
    """``x@L``: the elements whose label is a member of ``levels``."""
    levels = frozenset(levels)
    return x.with_items(p for p in x.items if p[1] in levels)


def select_where(x: LabeledSet, pred) -> LabeledSet:
    """Selection by a label predicate, for up-sets that are never materialized."""
    return x.with_items(p for p in x.items if pred(p[1]))


def perturb_above(x: LabeledSet, level: Label, rng, max_new: int = 3,
                  values: Iterable[Any] | None = None) -> LabeledSet:
    """A random ``y`` with ``y↓level = x↓level``.

    Elements invisible at ``level`` may be dropped, relabelled to another
    invisible label, or joined by fresh invisible elements.
    """
    L = x.lattice
    values = list(values) if values is not None else list(range(10))

    def invisible_label():
        for _ in range(20):
            cand = L.sample(rng)
            if not L.leq(cand, level):
                return cand
        if L.top is not None and not L.leq(L.top, level):
            return L.top
        return None

    out = []
    for v, l in x.items:
        if L.leq(l, level):
            out.append((v, l))
            continue
        r = rng.random()
        if r < 0.3:
            continue
        if r < 0.6:
            new = invisible_label()
            if new is not None:
                l = new
            if rng.random() < 0.5:
                v = rng.choice(values)
        out.append((v, l))
    for _ in range(rng.randint(0, max_new)):
        new = invisible_label()
        if new is None:
            break
        out.append((rng.choice(values), new))
    return x.with_items(out)


def random_labeled_set(L: Lattice, rng, max_size: int = 5, values: Iterable[Any] | None = None) -> LabeledSet:
    values = list(values) if values is not None else list(range(10))
    return LabeledSet(L, [(rng.choice(values), L.sample(rng)) for _ in range(rng.randint(0, max_size))])


def parse_labeled(L: Lattice, text: str) -> LabeledSet:
    """Parse ``{1^{p1}, 2^{p1,p2}}``.  Integer values are read as ints."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise LatticeError(f"labeled sets are written {{v^{{label}}, ...}}, got {text!r}")
    pairs = []
    for item in split_top(text[1:-1]):
        if not item:
            raise LatticeError(f"empty element in {text!r}")
        if "^" not in item:
            raise LatticeError(f"element {item!r} has no ^label")
        raw_v, raw_l = item.split("^", 1)
        raw_v = raw_v.strip()
        try:
            value: Any = int(raw_v)
        except ValueError:
            value = raw_v
        pairs.append((value, L.parse(raw_l.strip())))
    return LabeledSet(L, pairs)


# ---------------------------------------------------------------------------
# Faceted values


@dataclass(frozen=True)
class Facet:
    """``⟨guard ? private : public⟩``."""

    guard: Label
    private: "Faceted"
    public: "Faceted"


Faceted = Union[Facet, Any]


def facet_select(f: Faceted, level: Label, L: Lattice) -> Any:
    """The view of ``f`` for an observer at ``level``."""
    while isinstance(f, Facet):
        f = f.private if L.leq(f.guard, level) else f.public
    return f


def facet_labels(f: Faceted) -> set:
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Facet):
            out.add(g.guard)
            stack += [g.private, g.public]
    return out
