"""Security lattices: the join-semilattice interface and its concrete constructions.

Every lattice is an immutable value object.  Labels are plain hashable Python
values (strings, ints, frozensets, tuples, :class:`Bound` markers), so they can
be stored in sets and used as dictionary keys.  Each lattice also supplies a
``key`` function giving a deterministic total order used whenever labels have
to be listed or printed.
"""

from __future__ import annotations

import itertools
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, reduce
from typing import Any, Hashable, Iterable, Iterator

Label = Hashable


class LatticeError(ValueError):
    """A label outside a lattice's carrier, or an unsupported lattice operation."""


class Bound(Enum):
    """Adjoined least/greatest elements (discrete, truncated and horizontal-sum lattices)."""

    BOT = "bot"
    TOP = "top"

    def __repr__(self) -> str:
        return self.value


BOT = Bound.BOT
TOP = Bound.TOP

_DIGITS = re.compile(r"(\d+)")


def atom_key(name: str) -> tuple:
    """Natural sort key for principal names, so that p2 sorts before p10."""
    parts = _DIGITS.split(name)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


def principals(n: int) -> tuple[str, ...]:
    return tuple(f"p{i}" for i in range(1, n + 1))


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` at bracket depth zero; empty input gives an empty list."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "({[<":
            depth += 1
        elif ch in ")}]>":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return out


def _unbrace(text: str, open_: str = "{", close: str = "}") -> str:
    text = text.strip()
    if text.startswith(open_) and text.endswith(close):
        return text[1:-1].strip()
    return text


class Lattice(ABC):
    """A join-semilattice with a least element.

    ``top`` is ``None`` when the lattice has no greatest element; ``meet``
    raises :class:`LatticeError` unless ``has_meet`` is true.
    """

    #: closure sets can grow exponentially in the number of input labels
    exponential: bool = False

    @property
    @abstractmethod
    def descriptor(self) -> str: ...

    @property
    @abstractmethod
    def bot(self) -> Label: ...

    @property
    def top(self) -> Label | None:
        return None

    @property
    def has_meet(self) -> bool:
        return False

    @abstractmethod
    def join(self, a: Label, b: Label) -> Label: ...

    @abstractmethod
    def leq(self, a: Label, b: Label) -> bool: ...

    def meet(self, a: Label, b: Label) -> Label:
        raise LatticeError(f"{self.descriptor} does not provide meets")

    @abstractmethod
    def key(self, label: Label) -> tuple: ...

    @abstractmethod
    def contains(self, label: Label) -> bool: ...

    def size(self) -> int | None:
        """Carrier cardinality, or ``None`` when infinite or too large to enumerate."""
        return None

    def elements(self) -> list[Label]:
        raise LatticeError(f"{self.descriptor} has no enumerable carrier")

    @abstractmethod
    def sample(self, rng) -> Label: ...

    @abstractmethod
    def format(self, label: Label) -> str: ...

    @abstractmethod
    def parse(self, text: str) -> Label: ...

    #: how many distinct principal labels ``atom`` can produce (None = unbounded)
    atom_capacity: int | None = 0

    def atom(self, i: int) -> Label:
        """The label of the ``i``-th principal (1-based), as used for benchmark inputs."""
        cap = self.atom_capacity
        if cap is not None and not 1 <= i <= cap:
            raise LatticeError(f"{self.descriptor} has only {cap} principal labels, asked for #{i}")
        return self._atom(i)

    def _atom(self, i: int) -> Label:
        raise LatticeError(f"{self.descriptor} has no principal labels")

    def check(self, label: Label) -> Label:
        if not self.contains(label):
            raise LatticeError(f"{label!r} is not a label of {self.descriptor}")
        return label

    def sort(self, labels: Iterable[Label]) -> list[Label]:
        return sorted(labels, key=self.key)

    def __str__(self) -> str:
        return self.descriptor


def join_all(lattice: Lattice, labels: Iterable[Label]) -> Label:
    """Least upper bound of a finite set of labels; the empty join is bottom."""
    acc = lattice.bot
    for label in labels:
        acc = lattice.join(acc, lattice.check(label))
    return acc


def meet_all(lattice: Lattice, labels: Iterable[Label]) -> Label:
    """Greatest lower bound of a finite set; the empty meet is top (which must exist)."""
    labels = list(labels)
    if not labels:
        if lattice.top is None:
            raise LatticeError(f"empty meet needs a top element; {lattice.descriptor} has none")
        return lattice.top
    return reduce(lattice.meet, labels)


# ---------------------------------------------------------------------------
# Basic lattices


@dataclass(frozen=True)
class TwoPoint(Lattice):
    """Public ``L`` below secret ``H``."""

    atom_capacity = 1

    @property
    def descriptor(self) -> str:
        return "two-point"

    @property
    def bot(self):
        return "L"

    @property
    def top(self):
        return "H"

    @property
    def has_meet(self) -> bool:
        return True

    def join(self, a, b):
        return "H" if "H" in (a, b) else "L"

    def meet(self, a, b):
        return "L" if "L" in (a, b) else "H"

    def leq(self, a, b) -> bool:
        return a == "L" or b == "H"

    def key(self, label) -> tuple:
        return (0,) if label == "L" else (1,)

    def contains(self, label) -> bool:
        return label in ("L", "H")

    def size(self) -> int:
        return 2

    def elements(self):
        return ["L", "H"]

    def sample(self, rng):
        return rng.choice(("L", "H"))

    def format(self, label) -> str:
        return label

    def parse(self, text: str):
        text = _unbrace(text)
        aliases = {"L": "L", "H": "H", "bot": "L", "top": "H", "⊥": "L", "⊤": "H"}
        if text not in aliases:
            raise LatticeError(f"cannot parse {text!r} as a two-point label")
        return aliases[text]

    def _atom(self, i: int):
        return "H"


@dataclass(frozen=True)
class NatChain(Lattice):
    """The naturals under their usual order; 0 is bottom and there is no top."""

    atom_capacity = None

    @property
    def descriptor(self) -> str:
        return "nat"

    @property
    def bot(self):
        return 0

    @property
    def has_meet(self) -> bool:
        return True

    def join(self, a, b):
        return max(a, b)

    def meet(self, a, b):
        return min(a, b)

    def leq(self, a, b) -> bool:
        return a <= b

    def key(self, label) -> tuple:
        return (label,)

    def contains(self, label) -> bool:
        return isinstance(label, int) and not isinstance(label, bool) and label >= 0

    def sample(self, rng):
        return rng.randint(0, 12)

    def format(self, label) -> str:
        return str(label)

    def parse(self, text: str):
        try:
            value = int(_unbrace(text))
        except ValueError:
            raise LatticeError(f"cannot parse {text!r} as a natural number") from None
        return self.check(value)

    def _atom(self, i: int):
        return i


@dataclass(frozen=True)
class Discrete(Lattice):
    """Bottom, top, and pairwise incomparable principals in between."""

    atoms: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(set(self.atoms)) != len(self.atoms):
            raise LatticeError("duplicate principal names")

    @cached_property
    def _atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    @property
    def atom_capacity(self) -> int:
        return len(self.atoms)

    @property
    def descriptor(self) -> str:
        return f"discrete:{len(self.atoms)}"

    @property
    def bot(self):
        return BOT

    @property
    def top(self):
        return TOP

    def join(self, a, b):
        if a == b or b is BOT:
            return a
        if a is BOT:
            return b
        return TOP

    def leq(self, a, b) -> bool:
        return a == b or a is BOT or b is TOP

    def key(self, label) -> tuple:
        if label is BOT:
            return (0,)
        if label is TOP:
            return (2,)
        return (1, atom_key(label))

    def contains(self, label) -> bool:
        return label is BOT or label is TOP or (isinstance(label, str) and label in self._atom_set)

    def size(self) -> int:
        return len(self.atoms) + 2

    def elements(self):
        return [BOT, *self.atoms, TOP]

    def sample(self, rng):
        return rng.choice(self.elements())

    def format(self, label) -> str:
        return label.value if isinstance(label, Bound) else label

    def parse(self, text: str):
        text = _unbrace(text)
        if text in ("bot", "⊥"):
            return BOT
        if text in ("top", "⊤"):
            return TOP
        return self.check(text)

    def _atom(self, i: int):
        return self.atoms[i - 1]


def _format_set(s: frozenset) -> str:
    return "{" + ",".join(sorted(s, key=atom_key)) + "}"


def _set_key(s: frozenset) -> tuple:
    return tuple(sorted(atom_key(a) for a in s))


@dataclass(frozen=True)
class Powerset(Lattice):
    """Finite subsets of a principal set, ordered by inclusion."""

    atoms: tuple[str, ...]
    exponential = True

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(set(self.atoms)) != len(self.atoms):
            raise LatticeError("duplicate principal names")

    @cached_property
    def _atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    @property
    def atom_capacity(self) -> int:
        return len(self.atoms)

    @property
    def descriptor(self) -> str:
        return f"powerset:{len(self.atoms)}"

    @property
    def bot(self):
        return frozenset()

    @property
    def top(self):
        return self._atom_set

    @property
    def has_meet(self) -> bool:
        return True

    def join(self, a, b):
        return a | b

    def meet(self, a, b):
        return a & b

    def leq(self, a, b) -> bool:
        return a <= b

    def key(self, label) -> tuple:
        return _set_key(label)

    def contains(self, label) -> bool:
        return isinstance(label, frozenset) and label <= self._atom_set

    def size(self) -> int | None:
        return 2 ** len(self.atoms) if len(self.atoms) <= 16 else None

    def elements(self):
        if self.size() is None:
            return super().elements()
        return [frozenset(c) for r in range(len(self.atoms) + 1)
                for c in itertools.combinations(self.atoms, r)]

    def sample(self, rng):
        return frozenset(a for a in self.atoms if rng.random() < 0.35)

    def format(self, label) -> str:
        return _format_set(label)

    def parse(self, text: str):
        names = [t for t in split_top(_unbrace(text)) if t]
        return self.check(frozenset(names))

    def _atom(self, i: int):
        return frozenset({self.atoms[i - 1]})


@dataclass(frozen=True)
class TruncatedPowerset(Lattice):
    """Subsets of at most ``k`` principals, with every larger set collapsed to ``TOP``."""

    k: int
    atoms: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.k < 0:
            raise LatticeError("truncation bound must be non-negative")
        if len(set(self.atoms)) != len(self.atoms):
            raise LatticeError("duplicate principal names")

    @cached_property
    def _atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    @property
    def atom_capacity(self) -> int:
        return len(self.atoms) if self.k >= 1 else 0

    @property
    def descriptor(self) -> str:
        return f"trunc:{self.k}:{len(self.atoms)}"

    @property
    def bot(self):
        return frozenset()

    @property
    def top(self):
        return TOP

    @property
    def has_meet(self) -> bool:
        return True

    def join(self, a, b):
        if a is TOP or b is TOP:
            return TOP
        u = a | b
        return u if len(u) <= self.k else TOP

    def meet(self, a, b):
        if a is TOP:
            return b
        if b is TOP:
            return a
        return a & b

    def leq(self, a, b) -> bool:
        return b is TOP or (a is not TOP and a <= b)

    def key(self, label) -> tuple:
        return (1,) if label is TOP else (0, _set_key(label))

    def contains(self, label) -> bool:
        if label is TOP:
            return True
        return isinstance(label, frozenset) and len(label) <= self.k and label <= self._atom_set

    def size(self) -> int:
        return sum(math.comb(len(self.atoms), i) for i in range(min(self.k, len(self.atoms)) + 1)) + 1

    def elements(self):
        small = [frozenset(c) for r in range(min(self.k, len(self.atoms)) + 1)
                 for c in itertools.combinations(self.atoms, r)]
        return small + [TOP]

    def sample(self, rng):
        if rng.random() < 0.1:
            return TOP
        r = rng.randint(0, min(self.k, len(self.atoms)))
        return frozenset(rng.sample(self.atoms, r))

    def format(self, label) -> str:
        return "top" if label is TOP else _format_set(label)

    def parse(self, text: str):
        inner = _unbrace(text)
        if inner in ("top", "⊤"):
            return TOP
        return self.check(frozenset(t for t in split_top(inner) if t))

    def _atom(self, i: int):
        return frozenset({self.atoms[i - 1]})


# ---------------------------------------------------------------------------
# Constructions


@dataclass(frozen=True)
class Product(Lattice):
    """Pairs ordered componentwise."""

    left: Lattice
    right: Lattice

    @property
    def exponential(self) -> bool:
        return self.left.exponential or self.right.exponential

    @property
    def descriptor(self) -> str:
        return f"product({self.left.descriptor},{self.right.descriptor})"

    @property
    def bot(self):
        return (self.left.bot, self.right.bot)

    @property
    def top(self):
        if self.left.top is None or self.right.top is None:
            return None
        return (self.left.top, self.right.top)

    @property
    def has_meet(self) -> bool:
        return self.left.has_meet and self.right.has_meet

    def join(self, a, b):
        return (self.left.join(a[0], b[0]), self.right.join(a[1], b[1]))

    def meet(self, a, b):
        if not self.has_meet:
            return super().meet(a, b)
        return (self.left.meet(a[0], b[0]), self.right.meet(a[1], b[1]))

    def leq(self, a, b) -> bool:
        return self.left.leq(a[0], b[0]) and self.right.leq(a[1], b[1])

    def key(self, label) -> tuple:
        return (self.left.key(label[0]), self.right.key(label[1]))

    def contains(self, label) -> bool:
        return (isinstance(label, tuple) and len(label) == 2
                and self.left.contains(label[0]) and self.right.contains(label[1]))

    def size(self) -> int | None:
        a, b = self.left.size(), self.right.size()
        return None if a is None or b is None else a * b

    def elements(self):
        return list(itertools.product(self.left.elements(), self.right.elements()))

    def sample(self, rng):
        return (self.left.sample(rng), self.right.sample(rng))

    def format(self, label) -> str:
        return f"({self.left.format(label[0])},{self.right.format(label[1])})"

    def parse(self, text: str):
        text = text.strip()
        if text.startswith("{(") and text.endswith(")}"):
            text = text[1:-1]
        parts = split_top(_unbrace(text, "(", ")"))
        if len(parts) != 2:
            raise LatticeError(f"cannot parse {text!r} as a pair")
        return (self.left.parse(parts[0]), self.right.parse(parts[1]))

    @property
    def atom_capacity(self) -> int | None:
        caps = [c for c in (self.left.atom_capacity, self.right.atom_capacity) if c is not None]
        return min(caps) if caps else None

    def _atom(self, i: int):
        return (self.left.atom(i), self.right.atom(i))


@dataclass(frozen=True)
class VSum(Lattice):
    """``upper`` stacked on top of ``lower``; labels are ``(0, a)`` or ``(1, b)``."""

    lower: Lattice
    upper: Lattice

    @property
    def exponential(self) -> bool:
        return self.lower.exponential or self.upper.exponential

    @property
    def descriptor(self) -> str:
        return f"vsum({self.lower.descriptor},{self.upper.descriptor})"

    @property
    def bot(self):
        return (0, self.lower.bot)

    @property
    def top(self):
        return None if self.upper.top is None else (1, self.upper.top)

    def _side(self, side: int) -> Lattice:
        return self.upper if side else self.lower

    def join(self, a, b):
        if a[0] != b[0]:
            return a if a[0] == 1 else b
        return (a[0], self._side(a[0]).join(a[1], b[1]))

    def leq(self, a, b) -> bool:
        if a[0] != b[0]:
            return a[0] < b[0]
        return self._side(a[0]).leq(a[1], b[1])

    def key(self, label) -> tuple:
        return (label[0], self._side(label[0]).key(label[1]))

    def contains(self, label) -> bool:
        return (isinstance(label, tuple) and len(label) == 2 and label[0] in (0, 1)
                and self._side(label[0]).contains(label[1]))

    def size(self) -> int | None:
        a, b = self.lower.size(), self.upper.size()
        return None if a is None or b is None else a + b

    def elements(self):
        return [(0, x) for x in self.lower.elements()] + [(1, y) for y in self.upper.elements()]

    def sample(self, rng):
        side = rng.randint(0, 1)
        return (side, self._side(side).sample(rng))

    def format(self, label) -> str:
        return ("hi:" if label[0] else "lo:") + self._side(label[0]).format(label[1])

    def parse(self, text: str):
        text = _unbrace(text).strip()
        for tag, side in (("lo:", 0), ("hi:", 1)):
            if text.startswith(tag):
                return (side, self._side(side).parse(text[len(tag):]))
        raise LatticeError(f"vertical-sum labels look like lo:<label> or hi:<label>, got {text!r}")


@dataclass(frozen=True)
class HSum(Lattice):
    """``left`` and ``right`` side by side between a fresh bottom and a fresh top."""

    left: Lattice
    right: Lattice

    @property
    def exponential(self) -> bool:
        return self.left.exponential or self.right.exponential

    @property
    def descriptor(self) -> str:
        return f"hsum({self.left.descriptor},{self.right.descriptor})"

    @property
    def bot(self):
        return BOT

    @property
    def top(self):
        return TOP

    def _side(self, side: int) -> Lattice:
        return self.right if side else self.left

    def join(self, a, b):
        if a is BOT or b is TOP:
            return b
        if b is BOT or a is TOP:
            return a
        if a[0] != b[0]:
            return TOP
        return (a[0], self._side(a[0]).join(a[1], b[1]))

    def leq(self, a, b) -> bool:
        if a is BOT or b is TOP:
            return True
        if a is TOP or b is BOT:
            return False
        return a[0] == b[0] and self._side(a[0]).leq(a[1], b[1])

    def key(self, label) -> tuple:
        if label is BOT:
            return (0,)
        if label is TOP:
            return (2,)
        return (1, label[0], self._side(label[0]).key(label[1]))

    def contains(self, label) -> bool:
        if label is BOT or label is TOP:
            return True
        return (isinstance(label, tuple) and len(label) == 2 and label[0] in (0, 1)
                and self._side(label[0]).contains(label[1]))

    def size(self) -> int | None:
        a, b = self.left.size(), self.right.size()
        return None if a is None or b is None else a + b + 2

    def elements(self):
        return ([BOT] + [(0, x) for x in self.left.elements()]
                + [(1, y) for y in self.right.elements()] + [TOP])

    def sample(self, rng):
        r = rng.random()
        if r < 0.1:
            return BOT
        if r < 0.2:
            return TOP
        side = rng.randint(0, 1)
        return (side, self._side(side).sample(rng))

    def format(self, label) -> str:
        if isinstance(label, Bound):
            return label.value
        return ("right:" if label[0] else "left:") + self._side(label[0]).format(label[1])

    def parse(self, text: str):
        text = _unbrace(text).strip()
        if text in ("bot", "⊥"):
            return BOT
        if text in ("top", "⊤"):
            return TOP
        for tag, side in (("left:", 0), ("right:", 1)):
            if text.startswith(tag):
                return (side, self._side(side).parse(text[len(tag):]))
        raise LatticeError(f"horizontal-sum labels are bot, top, left:<label> or right:<label>, got {text!r}")


@dataclass(frozen=True)
class Exponential(Lattice):
    """Antichains of ``base`` labels, ordered by domination.

    The preorder on arbitrary subsets is made antisymmetric by storing only the
    maximal elements, so equivalent subsets share one representation and plain
    equality decides the quotient.
    """

    base: Lattice
    exponential = True

    @property
    def descriptor(self) -> str:
        return f"exp({self.base.descriptor})"

    @property
    def bot(self):
        return frozenset()

    @property
    def top(self):
        return None if self.base.top is None else frozenset({self.base.top})

    def normalize(self, labels: Iterable[Label]) -> frozenset:
        """The antichain of maximal elements of ``labels``."""
        labels = set(labels)
        leq = self.base.leq
        return frozenset(x for x in labels if not any(x != y and leq(x, y) for y in labels))

    def join(self, a, b):
        return self.normalize(a | b)

    def leq(self, a, b) -> bool:
        leq = self.base.leq
        return all(any(leq(x, y) for y in b) for x in a)

    def key(self, label) -> tuple:
        return tuple(sorted(self.base.key(x) for x in label))

    def contains(self, label) -> bool:
        return (isinstance(label, frozenset) and all(self.base.contains(x) for x in label)
                and self.normalize(label) == label)

    def _antichains(self) -> list[frozenset]:
        base = self.base.sort(self.base.elements())
        leq = self.base.leq
        out = []

        def extend(start: int, chosen: list):
            out.append(frozenset(chosen))
            for i in range(start, len(base)):
                x = base[i]
                if all(not leq(x, y) and not leq(y, x) for y in chosen):
                    chosen.append(x)
                    extend(i + 1, chosen)
                    chosen.pop()

        extend(0, [])
        return out

    def size(self) -> int | None:
        n = self.base.size()
        if n is None or n > 12:
            return None
        return len(self._antichains())

    def elements(self):
        if self.size() is None:
            return super().elements()
        return self._antichains()

    def sample(self, rng):
        return self.normalize(self.base.sample(rng) for _ in range(rng.randint(0, 3)))

    def format(self, label) -> str:
        return "[" + ",".join(self.base.format(x) for x in self.base.sort(label)) + "]"

    def parse(self, text: str):
        parts = split_top(_unbrace(_unbrace(text), "[", "]"))
        return self.normalize(self.base.parse(p) for p in parts if p)

    @property
    def atom_capacity(self) -> int | None:
        return self.base.atom_capacity

    def _atom(self, i: int):
        return frozenset({self.base.atom(i)})


def elements_of(lattice: Lattice, limit: int | None = None) -> list[Label] | None:
    """The carrier as a list when it is finite and (optionally) no larger than ``limit``."""
    n = lattice.size()
    if n is None or (limit is not None and n > limit):
        return None
    return lattice.elements()


def iter_pairs(items: list) -> Iterator[tuple[Any, Any]]:
    return itertools.product(items, repeat=2)
