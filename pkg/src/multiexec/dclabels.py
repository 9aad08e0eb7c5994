"""DC labels: pairs of monotone CNF formulas over a finite principal set.

A formula is a frozenset of clauses and a clause is a nonempty frozenset of
principal names read as a disjunction.  The empty formula is ``true``.
Formulas are kept reduced (no clause is a superset of another), which makes
the representation canonical: two formulas are logically equivalent exactly
when their reduced forms are equal.

The confidentiality component grows more restrictive as clauses are conjoined,
so its order is reverse implication.  The integrity component is ordered by
implication and its join is disjunction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .lattices import Lattice, LatticeError, atom_key, principals, split_top

Clause = frozenset
CNF = frozenset

TRUE: CNF = frozenset()


def reduce_cnf(clauses: Iterable[Iterable[str]]) -> CNF:
    """Drop duplicate and subsumed (superset) clauses."""
    cs = {frozenset(c) for c in clauses}
    if frozenset() in cs:
        raise LatticeError("empty clause (false) is not a DC-label formula")
    return frozenset(c for c in cs if not any(d < c for d in cs))


def implies(f: CNF, g: CNF) -> bool:
    """``f ⇒ g`` for reduced monotone CNFs: each clause of g contains a clause of f."""
    return all(any(d <= c for d in f) for c in g)


def conj(f: CNF, g: CNF) -> CNF:
    return reduce_cnf(f | g)


def disj(f: CNF, g: CNF) -> CNF:
    if not f or not g:
        return TRUE
    return reduce_cnf(a | b for a in f for b in g)


def all_cnfs(atoms: tuple[str, ...]) -> list[CNF]:
    """Every reduced monotone CNF over ``atoms`` (antichains of nonempty subsets)."""
    subsets = [frozenset(c) for r in range(1, len(atoms) + 1)
               for c in itertools.combinations(atoms, r)]
    out: list[CNF] = []

    def extend(start: int, chosen: list):
        out.append(frozenset(chosen))
        for i in range(start, len(subsets)):
            s = subsets[i]
            if all(not (s <= c or c <= s) for c in chosen):
                chosen.append(s)
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


def cnf_key(f: CNF) -> tuple:
    return tuple(sorted(tuple(sorted(atom_key(a) for a in c)) for c in f))


def format_cnf(f: CNF) -> str:
    if not f:
        return "true"
    parts = []
    for c in sorted(f, key=lambda c: (len(c), sorted(atom_key(a) for a in c))):
        names = sorted(c, key=atom_key)
        inner = " | ".join(names)
        parts.append(inner if len(names) == 1 or len(f) == 1 else f"({inner})")
    return " & ".join(parts)


def parse_cnf(text: str) -> CNF:
    text = text.strip()
    if text in ("", "true", "True", "⊤"):
        return TRUE
    clauses = []
    for part in split_top(text, "&"):
        part = part.strip()
        while part.startswith("(") and part.endswith(")"):
            part = part[1:-1].strip()
        names = [n.strip() for n in split_top(part, "|")]
        if not names or any(not n for n in names):
            raise LatticeError(f"malformed clause {part!r} in {text!r}")
        clauses.append(names)
    return reduce_cnf(clauses)


@dataclass(frozen=True)
class CNFLattice(Lattice):
    """One DC-label component.  ``role`` is ``"conf"`` or ``"integ"``."""

    atoms: tuple[str, ...]
    role: str = "conf"
    exponential = True

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.role not in ("conf", "integ"):
            raise LatticeError(f"unknown CNF role {self.role!r}")
        if not self.atoms:
            raise LatticeError("DC labels need at least one principal")

    @cached_property
    def _strongest(self) -> CNF:
        return frozenset(frozenset({a}) for a in self.atoms)

    @cached_property
    def _atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    @property
    def descriptor(self) -> str:
        return f"cnf-{self.role}:{len(self.atoms)}"

    @property
    def bot(self):
        return TRUE if self.role == "conf" else self._strongest

    @property
    def top(self):
        return self._strongest if self.role == "conf" else TRUE

    @property
    def has_meet(self) -> bool:
        return True

    def join(self, a, b):
        return conj(a, b) if self.role == "conf" else disj(a, b)

    def meet(self, a, b):
        return disj(a, b) if self.role == "conf" else conj(a, b)

    def leq(self, a, b) -> bool:
        return implies(b, a) if self.role == "conf" else implies(a, b)

    def key(self, label) -> tuple:
        return cnf_key(label)

    def contains(self, label) -> bool:
        if not isinstance(label, frozenset):
            return False
        for c in label:
            if not isinstance(c, frozenset) or not c or not c <= self._atom_set:
                return False
        return all(not (c < d) for c in label for d in label)

    def size(self) -> int | None:
        return len(self.elements()) if len(self.atoms) <= 4 else None

    def elements(self):
        if len(self.atoms) > 4:
            return super().elements()
        return self._elements

    @cached_property
    def _elements(self) -> list:
        return all_cnfs(self.atoms)

    def sample(self, rng):
        clauses = []
        for _ in range(rng.randint(0, 3)):
            r = rng.randint(1, min(3, len(self.atoms)))
            clauses.append(rng.sample(self.atoms, r))
        return reduce_cnf(clauses)

    def format(self, label) -> str:
        return format_cnf(label)

    def parse(self, text: str):
        return self.check(parse_cnf(text))


@dataclass(frozen=True)
class DCLabel:
    conf: CNF
    integ: CNF

    def __repr__(self) -> str:
        return f"dc({format_cnf(self.conf)}; {format_cnf(self.integ)})"


@dataclass(frozen=True)
class DCLattice(Lattice):
    """DC labels over a finite principal set."""

    atoms: tuple[str, ...]
    exponential = True

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @classmethod
    def of_size(cls, n: int) -> "DCLattice":
        return cls(principals(n))

    @cached_property
    def conf(self) -> CNFLattice:
        return CNFLattice(self.atoms, "conf")

    @cached_property
    def integ(self) -> CNFLattice:
        return CNFLattice(self.atoms, "integ")

    @property
    def atom_capacity(self) -> int:
        return len(self.atoms)

    @property
    def descriptor(self) -> str:
        return f"dc:{len(self.atoms)}"

    @property
    def bot(self):
        return DCLabel(self.conf.bot, self.integ.bot)

    @property
    def top(self):
        return DCLabel(self.conf.top, self.integ.top)

    def join(self, a, b):
        return DCLabel(conj(a.conf, b.conf), disj(a.integ, b.integ))

    def leq(self, a, b) -> bool:
        return implies(b.conf, a.conf) and implies(a.integ, b.integ)

    def key(self, label) -> tuple:
        return (cnf_key(label.conf), cnf_key(label.integ))

    def contains(self, label) -> bool:
        return (isinstance(label, DCLabel) and self.conf.contains(label.conf)
                and self.integ.contains(label.integ))

    def size(self) -> int | None:
        n = self.conf.size()
        return None if n is None else n * n

    def elements(self):
        if self.conf.size() is None:
            return super().elements()
        return [DCLabel(c, i) for c in self.conf.elements() for i in self.integ.elements()]

    def sample(self, rng):
        return DCLabel(self.conf.sample(rng), self.integ.sample(rng))

    def format(self, label) -> str:
        return repr(label)

    def parse(self, text: str):
        text = text.strip()
        if text.startswith("{") and text.endswith("}"):
            text = text[1:-1].strip()
        if text.startswith("dc(") and text.endswith(")"):
            text = text[3:-1]
        elif text.startswith("<") and text.endswith(">"):
            text = text[1:-1]
        parts = split_top(text, ";")
        if len(parts) != 2:
            raise LatticeError(f"DC labels look like dc(<conf>; <integ>), got {text!r}")
        return self.check(DCLabel(parse_cnf(parts[0]), parse_cnf(parts[1])))

    def label(self, conf: str, integ: str) -> DCLabel:
        return self.check(DCLabel(parse_cnf(conf), parse_cnf(integ)))

    def _atom(self, i: int):
        a = frozenset({frozenset({self.atoms[i - 1]})})
        return DCLabel(a, a)
