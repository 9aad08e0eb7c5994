"""Textual descriptors for lattices, Galois connections and programs.

Lattices::

    two-point | nat | discrete:<n> | powerset:<n> | trunc:<k>:<n> | dc:<n>
    product(<d>,<d>) | vsum(<d>,<d>) | hsum(<d>,<d>) | exp(<d>)

``<n>`` may be left out of ``discrete``, ``powerset``, ``trunc`` and ``dc``;
such a lattice is sized by the caller (the benchmark uses its largest input).

Galois connections::

    identity | specify:<label> | specify:auto | trunc:<k> | dc-chain:<k>
    compose(<g>,<g>) | kp:<program>

Programs::

    secure | insecure | badSum | goodSum | goodSum:<label>;<label>;... | pairwise | pairwise1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .dclabels import DCLattice
from .galois import (GaloisConnection, GaloisError, closure_to_galois, compose_galois,
                     dc_truncation_chain, identity_galois, kp_oracle, specify_unspecify,
                     truncate_embed)
from .labeled import LabeledSet
from .lattices import (Discrete, Exponential, HSum, Label, Lattice, LatticeError, NatChain, Powerset,
                       Product, TruncatedPowerset, TwoPoint, VSum, join_all, principals, split_top)
from .programs import PROGRAMS, ProgramSpec


class DescriptorError(LatticeError):
    """A descriptor that does not parse or cannot be built."""


_CALL = re.compile(r"^([a-z-]+)\((.*)\)$", re.S)


def _count(text: str, what: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise DescriptorError(f"{what} must be an integer, got {text!r}") from None
    if n < 0:
        raise DescriptorError(f"{what} must be non-negative, got {n}")
    return n


def parse_lattice(text: str, default_n: int | None = None) -> Lattice:
    text = text.strip()
    m = _CALL.match(text)
    if m:
        head, args = m.group(1), split_top(m.group(2))
        if head == "exp":
            if len(args) != 1:
                raise DescriptorError(f"exp takes one lattice, got {text!r}")
            return Exponential(parse_lattice(args[0], default_n))
        ctor = {"product": Product, "vsum": VSum, "hsum": HSum}.get(head)
        if ctor is None or len(args) != 2:
            raise DescriptorError(f"unknown lattice construction {text!r}")
        return ctor(parse_lattice(args[0], default_n), parse_lattice(args[1], default_n))

    parts = text.split(":")
    head = parts[0]
    if head in ("two-point", "nat") and len(parts) == 1:
        return TwoPoint() if head == "two-point" else NatChain()

    def size(i: int) -> int:
        if len(parts) > i:
            return _count(parts[i], "principal count")
        if default_n is None:
            raise DescriptorError(f"{text!r} needs a principal count")
        return default_n

    if head == "discrete" and len(parts) <= 2:
        return Discrete(principals(size(1)))
    if head == "powerset" and len(parts) <= 2:
        return Powerset(principals(size(1)))
    if head == "dc" and len(parts) <= 2:
        n = size(1)
        if n < 1:
            raise DescriptorError("dc needs at least one principal")
        return DCLattice.of_size(n)
    if head == "trunc" and 2 <= len(parts) <= 3:
        return TruncatedPowerset(_count(parts[1], "truncation bound"), principals(size(2)))
    raise DescriptorError(f"unknown lattice descriptor {text!r}")


def is_auto_sized(text: str) -> bool:
    """Whether the descriptor leaves some principal count to the caller."""
    try:
        parse_lattice(text)
    except DescriptorError as exc:
        return "principal count" in str(exc)
    return False


# ---------------------------------------------------------------------------


def parse_levels(L: Lattice, text: str) -> frozenset:
    return frozenset(L.parse(t) for t in split_top(text, ";") if t.strip())


@dataclass
class ProgramChoice:
    spec: ProgramSpec
    levels: frozenset | None = None  # goodSum's label set, None = use the input's labels

    @property
    def name(self) -> str:
        return self.spec.name

    def build(self, x: LabeledSet | None = None, trace: bool = False):
        if self.spec.parameterized:
            levels = self.levels
            if levels is None:
                levels = frozenset(l for _, l in x.items) if x is not None else frozenset()
            return self.spec.build(levels, trace=trace)
        return self.spec.build(trace=trace)

    def auto_level(self, L: Lattice, x: LabeledSet | None) -> Label:
        """``⨆L`` for goodSum, otherwise the join of the input labels."""
        if self.spec.parameterized and self.levels is not None:
            return join_all(L, self.levels)
        return join_all(L, (l for _, l in x.items) if x is not None else ())


def parse_program(text: str, L: Lattice) -> ProgramChoice:
    text = text.strip()
    name, _, arg = text.partition(":")
    spec = PROGRAMS.get(name)
    if spec is None:
        raise DescriptorError(f"unknown program {name!r}; expected one of {', '.join(PROGRAMS)}")
    spec.check_lattice(L)
    if arg and not spec.parameterized:
        raise DescriptorError(f"{name} takes no parameters")
    levels = parse_levels(L, arg) if arg else None
    return ProgramChoice(spec, levels)


# ---------------------------------------------------------------------------


@dataclass
class GaloisContext:
    """What ``specify:auto`` and ``kp:<program>`` need to know about the run."""

    auto_labels: frozenset = frozenset()
    universe: Callable[[Lattice], Iterable[LabeledSet]] | None = None
    extra: dict = field(default_factory=dict)


def default_universe(L: Lattice, n: int | None = None) -> list[LabeledSet]:
    """Benchmark-style inputs ``{1^{p1}..m^{pm}}`` for every m, plus each singleton input."""
    cap = L.atom_capacity if n is None else n
    if cap is None:
        cap = 6
    out = [LabeledSet(L, [(i, L.atom(i)) for i in range(1, m + 1)]) for m in range(cap + 1)]
    out += [LabeledSet(L, [(1, L.atom(i))]) for i in range(1, cap + 1)]
    return out


def parse_galois(text: str, source: Lattice, ctx: GaloisContext | None = None) -> GaloisConnection:
    ctx = ctx or GaloisContext()
    text = text.strip()
    m = _CALL.match(text)
    if m and m.group(1) == "compose":
        args = split_top(m.group(2))
        if len(args) != 2:
            raise DescriptorError(f"compose takes two connections, got {text!r}")
        first = parse_galois(args[0], source, ctx)
        inner = GaloisContext(first.lower_all(ctx.auto_labels), ctx.universe, ctx.extra)
        return compose_galois(first, parse_galois(args[1], first.target, inner))
    head, _, arg = text.partition(":")
    try:
        if head == "identity" and not arg:
            return identity_galois(source)
        if head == "specify":
            if arg in ("", "auto"):
                level = join_all(source, ctx.auto_labels)
            else:
                level = source.parse(arg)
            return specify_unspecify(source, level)
        if head == "trunc":
            if not isinstance(source, Powerset):
                raise DescriptorError(f"trunc:<k> connects a powerset lattice, not {source.descriptor}")
            return truncate_embed(source.atoms, _count(arg, "truncation bound"))
        if head == "dc-chain":
            if not isinstance(source, DCLattice):
                raise DescriptorError(f"dc-chain:<k> starts from DC labels, not {source.descriptor}")
            return dc_truncation_chain(source.atoms, _count(arg, "truncation bound"))
        if head == "kp":
            choice = parse_program(arg, source)
            universe = list(ctx.universe(source) if ctx.universe else default_universe(source))
            prog = choice.build(ctx.extra.get("input"))
            return closure_to_galois(kp_oracle(prog, universe, source))
    except GaloisError as exc:
        raise DescriptorError(str(exc)) from exc
    raise DescriptorError(f"unknown Galois connection descriptor {text!r}")
