"""Closure sets: the levels multi-execution has to run.

``C(S)`` is the set of joins of all subsets of ``S``.  This module has the
brute-force oracle, the linear membership test, candidate-bounded enumeration,
the linear up-set membership test, a closure-size profiler, and generators for
the witness families that attain known closure-size growth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .lattices import (BOT, TOP, Discrete, Exponential, Label, Lattice, LatticeError,
                       NatChain, Powerset, Product, TruncatedPowerset, principals)

BRUTEFORCE_LIMIT = 20


class ClosureLimitError(LatticeError):
    """Refusal to compute an exponentially large closure."""


class UnsoundGeneratorError(AssertionError):
    """A candidate generator missed a closure element."""

    def __init__(self, generator: str, missing: Label):
        super().__init__(f"generator {generator!r} is unsound: it never proposed {missing!r}")
        self.generator = generator
        self.missing = missing


def incremental_closure(L: Lattice, S: Iterable[Label]) -> frozenset:
    """``C(S)`` via ``C(S ∪ {s}) = C(S) ∪ {c ⊔ s | c ∈ C(S)}``, with no size limit."""
    acc = {L.bot}
    join = L.join
    for s in set(S):
        acc |= {join(c, s) for c in acc}
    return frozenset(acc)


def closure_bruteforce(L: Lattice, S: Iterable[Label], limit: int = BRUTEFORCE_LIMIT) -> frozenset:
    """The reference closure ``{⨆S' | S' ⊆ S}``; refuses inputs larger than ``limit``."""
    S = set(S)
    if limit is not None and len(S) > limit:
        raise ClosureLimitError(f"brute-force closure refuses |S| = {len(S)} > limit {limit}")
    for s in S:
        L.check(s)
    return incremental_closure(L, S)


def in_closure(L: Lattice, level: Label, S: Iterable[Label]) -> bool:
    """``level ∈ C(S)`` iff the join of the elements of S below it is the level itself."""
    acc = L.bot
    leq, join = L.leq, L.join
    for s in S:
        if leq(s, level):
            acc = join(acc, s)
    return acc == level


@dataclass(frozen=True)
class CandidateGenerator:
    """A function giving a finite superset of ``C(S)``."""

    name: str
    generate: Callable[[frozenset], Iterable[Label]]
    bound: str = ""

    def __call__(self, S) -> Iterable[Label]:
        return self.generate(frozenset(S))


def bruteforce_generator(L: Lattice) -> CandidateGenerator:
    return CandidateGenerator("closure", lambda S: incremental_closure(L, S), "|C(S)| <= 2^|S|")


def discrete_generator(L: Discrete) -> CandidateGenerator:
    return CandidateGenerator("discrete", lambda S: S | {BOT, TOP}, "|S| + 2")


def product_generator(L: Product) -> CandidateGenerator:
    gl, gr = default_generator(L.left), default_generator(L.right)

    def gen(S):
        left = enumerate_closure(L.left, {s[0] for s in S}, gl)
        right = enumerate_closure(L.right, {s[1] for s in S}, gr)
        return itertools.product(left, right)

    return CandidateGenerator("product", gen, "|C(S0)| * |C(S1)|")


def trunc_generator(L: TruncatedPowerset) -> CandidateGenerator:
    def gen(S):
        support = sorted({a for s in S if s is not TOP for a in s})
        out = [TOP]
        for r in range(min(L.k, len(support)) + 1):
            out += [frozenset(c) for c in itertools.combinations(support, r)]
        return out

    return CandidateGenerator(f"trunc{L.k}", gen, f"2 + sum_(i<={L.k}) C(|support|, i)")


def default_generator(L: Lattice) -> CandidateGenerator:
    if isinstance(L, Discrete):
        return discrete_generator(L)
    if isinstance(L, TruncatedPowerset):
        return trunc_generator(L)
    if isinstance(L, Product):
        return product_generator(L)
    return bruteforce_generator(L)


def enumerate_closure(L: Lattice, S: Iterable[Label], g: CandidateGenerator | None = None,
                      validate: bool = False) -> frozenset:
    """``C(S)`` by filtering the generator's candidates through :func:`in_closure`.

    With ``validate`` the result is cross-checked against the brute-force
    oracle and a missed label raises :class:`UnsoundGeneratorError`.
    """
    S = frozenset(S)
    g = g or default_generator(L)
    out = frozenset(c for c in g(S) if in_closure(L, c, S))
    if validate:
        truth = closure_bruteforce(L, S)
        for c in L.sort(truth - out):
            raise UnsoundGeneratorError(g.name, c)
        extra = out - truth
        if extra:
            raise AssertionError(f"in_closure accepted non-members {L.sort(extra)}")
    return out


def upset_contains(L: Lattice, j: Label, level: Label, S: Iterable[Label],
                   validate: bool = False) -> bool:
    """``j ∈ level↑C(S)``, decided with O(|S|) lattice operations."""
    if validate and not in_closure(L, level, S):
        raise LatticeError(f"{level!r} is not in the closure of the given label set")
    leq = L.leq
    if not leq(level, j):
        return False
    return all(leq(i, level) for i in S if leq(i, j))


def upset_definitional(L: Lattice, j: Label, level: Label, closure: Iterable[Label]) -> bool:
    """Oracle: ``level ⊑ j`` and every closure element below ``j`` is below ``level``."""
    leq = L.leq
    return leq(level, j) and all(leq(c, level) for c in closure if leq(c, j))


# ---------------------------------------------------------------------------
# Closure-size profiles


@dataclass
class ProfileRow:
    n: int
    cs: int
    witness: tuple


@dataclass
class ClosureProfile:
    lattice: str
    rows: list[ProfileRow] = field(default_factory=list)

    def cs(self, n: int) -> int:
        return self.rows[n].cs

    def to_csv(self, L: Lattice) -> str:
        lines = ["n,cs,witness"]
        for r in self.rows:
            wit = " ".join(L.format(w) for w in r.witness)
            lines.append(f'{r.n},{r.cs},"{wit}"')
        return "\n".join(lines) + "\n"


def closure_size_profile(L: Lattice, n_max: int, pool: Iterable[Label] | None = None,
                         pool_limit: int = 20, n_limit: int = 6) -> ClosureProfile:
    """``CS(n)`` restricted to subsets of ``pool``, for n = 0..n_max.

    The value is a lower bound of the unrestricted closure size and is exact
    when the pool is the whole carrier.
    """
    if pool is None:
        if L.size() is None:
            raise LatticeError(f"{L.descriptor} is infinite or large; give an explicit pool")
        pool = L.elements()
    pool = L.sort(set(pool))
    if len(pool) > pool_limit:
        raise ClosureLimitError(f"pool of {len(pool)} labels exceeds limit {pool_limit}")
    if n_max > n_limit:
        raise ClosureLimitError(f"n_max = {n_max} exceeds limit {n_limit}")
    profile = ClosureProfile(L.descriptor)
    best, witness = 1, ()
    for n in range(n_max + 1):
        for S in itertools.combinations(pool, n):
            size = len(incremental_closure(L, S))
            if size > best:
                best, witness = size, S
        profile.rows.append(ProfileRow(n, best, witness))
    return profile


# ---------------------------------------------------------------------------
# Witness families

OMEGA_KINDS = ("powerset-singletons", "natchain2-L", "exponential-singletons", "discrete-atoms")


def omega_lattice(kind: str, n: int) -> Lattice:
    if kind == "powerset-singletons":
        return Powerset(principals(n))
    if kind == "natchain2-L":
        return Product(NatChain(), NatChain())
    if kind == "exponential-singletons":
        return Exponential(Discrete(principals(n)))
    if kind == "discrete-atoms":
        return Discrete(principals(n))
    raise LatticeError(f"unknown witness family {kind!r}; expected one of {', '.join(OMEGA_KINDS)}")


def omega_family(kind: str, n: int) -> frozenset:
    """A label set of size at most ``n`` whose closure attains the family's growth rate."""
    L = omega_lattice(kind, n)
    if kind in ("powerset-singletons", "discrete-atoms", "exponential-singletons"):
        return frozenset(L.atom(i) for i in range(1, n + 1))
    half = n // 2
    return frozenset({(i, 0) for i in range(half)} | {(0, i) for i in range(half)})
