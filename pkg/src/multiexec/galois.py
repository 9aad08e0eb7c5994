"""Galois connections, closure operators and the k_p oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

from .closure import enumerate_closure, incremental_closure
from .dclabels import DCLabel, DCLattice
from .laws import LawReport, cover_pairs
from .lattices import (TOP, Label, Lattice, LatticeError, Powerset, Product, TruncatedPowerset,
                       TwoPoint, elements_of, meet_all)


class GaloisError(LatticeError):
    """A connection that cannot be built (missing top or meet, mismatched lattices)."""


@dataclass(frozen=True, eq=False)
class GaloisConnection:
    """Lower adjoint ``F: source → target`` and upper adjoint ``G: target → source``."""

    source: Lattice
    target: Lattice
    F: Callable[[Label], Label]
    G: Callable[[Label], Label]
    name: str = "galois"

    def lower_all(self, labels: Iterable[Label]) -> frozenset:
        """``F*(S)``."""
        return frozenset(self.F(l) for l in labels)

    def upper_all(self, labels: Iterable[Label]) -> frozenset:
        """``G*(S)``."""
        return frozenset(self.G(l) for l in labels)

    def round_trip(self, label: Label) -> Label:
        return self.G(self.F(label))

    def closure_operator(self) -> "ClosureOperator":
        return ClosureOperator(self.source, self.round_trip, f"G.F of {self.name}")

    def __str__(self) -> str:
        return f"{self.name}: {self.source.descriptor} -> {self.target.descriptor}"


def identity_galois(L: Lattice) -> GaloisConnection:
    ident = lambda l: l  # noqa: E731
    return GaloisConnection(L, L, ident, ident, "identity")


def specify_unspecify(L: Lattice, level: Label) -> GaloisConnection:
    """Collapse ``L`` onto {L, H}: labels below ``level`` become L, the rest H."""
    if L.top is None:
        raise GaloisError(f"specify needs a lattice with top; {L.descriptor} has none")
    L.check(level)
    two = TwoPoint()
    top = L.top

    def F(l):
        return "L" if L.leq(l, level) else "H"

    def G(t):
        return top if t == "H" else level

    return GaloisConnection(L, two, F, G, f"specify[{L.format(level)}]")


def truncate_embed(atoms: Iterable[str], k: int) -> GaloisConnection:
    """``Powerset(A) → TruncatedPowerset(k, A)``; embed sends TOP back to the full set A."""
    src = Powerset(tuple(atoms))
    tgt = TruncatedPowerset(k, src.atoms)
    full = src.top

    def F(s):
        return s if len(s) <= k else TOP

    def G(t):
        return full if t is TOP else t

    return GaloisConnection(src, tgt, F, G, f"trunc{k}")


def meet_generated(L: Lattice, atoms: Iterable[str], m: dict[str, Label], name: str) -> GaloisConnection:
    """``L → Powerset(A)`` from one element ``m[a]`` per principal.

    ``F(l) = {a | l ⋢ m[a]}`` and ``G(S) = ⨅{m[a] | a ∉ S}``.  This is a
    Galois connection for any choice of the ``m[a]`` since
    ``F(l) ⊆ S ⟺ ∀a ∉ S. l ⊑ m[a] ⟺ l ⊑ G(S)``.
    """
    P = Powerset(tuple(atoms))

    def F(l):
        return frozenset(a for a in P.atoms if not L.leq(l, m[a]))

    @lru_cache(maxsize=4096)
    def G(s):
        return meet_all(L, [m[a] for a in P.atoms if a not in s])

    return GaloisConnection(L, P, F, G, name)


def _conf_generators(D: DCLattice) -> dict:
    # m_a = the conjunction of every other principal: the largest secrecy a does not need
    return {a: frozenset(frozenset({b}) for b in D.atoms if b != a) for a in D.atoms}


def _integ_generators(D: DCLattice) -> dict:
    # m_a = the disjunction of every other principal: vouching that never involves a
    out = {}
    for a in D.atoms:
        rest = frozenset(b for b in D.atoms if b != a)
        out[a] = frozenset({rest}) if rest else D.integ.bot
    return out


def dc_collect(atoms: Iterable[str]) -> GaloisConnection:
    """DC labels → pairs of principal sets, one set per component.

    On the confidentiality side a principal is collected when its own
    secrecy is demanded (it occurs as a unit clause); on the integrity side
    when every clause needs its endorsement.  The backward map sends a pair
    ``(S, T)`` to the greatest DC label whose collected sets fit inside it;
    for ``S = T = A minus one principal`` that is the conjunction and the
    disjunction of ``S``.
    """
    D = DCLattice(tuple(atoms))
    conf = meet_generated(D.conf, D.atoms, _conf_generators(D), "collect-conf")
    integ = meet_generated(D.integ, D.atoms, _integ_generators(D), "collect-integ")
    P = Powerset(D.atoms)
    pair = Product(P, P)

    def F(d):
        return (conf.F(d.conf), integ.F(d.integ))

    def G(st):
        return DCLabel(conf.G(st[0]), integ.G(st[1]))

    return GaloisConnection(D, pair, F, G, "collect")


def unite(atoms: Iterable[str]) -> GaloisConnection:
    """``Powerset(A)² → Powerset(A)`` by union; the upper adjoint duplicates."""
    P = Powerset(tuple(atoms))
    return GaloisConnection(Product(P, P), P, lambda st: st[0] | st[1], lambda s: (s, s), "unite")


def compose_galois(first: GaloisConnection, second: GaloisConnection) -> GaloisConnection:
    """``(F2 ∘ F1) ⊣ (G1 ∘ G2)``."""
    if first.target != second.source:
        raise GaloisError(f"cannot compose: {first.target.descriptor} is not {second.source.descriptor}")
    F1, G1, F2, G2 = first.F, first.G, second.F, second.G
    return GaloisConnection(first.source, second.target, lambda l: F2(F1(l)), lambda t: G1(G2(t)),
                            f"{first.name};{second.name}")


def dc_truncation_chain(atoms: Iterable[str], k: int) -> GaloisConnection:
    atoms = tuple(atoms)
    chain = compose_galois(compose_galois(dc_collect(atoms), unite(atoms)), truncate_embed(atoms, k))
    return GaloisConnection(chain.source, chain.target, chain.F, chain.G, f"dc-chain{k}")


# ---------------------------------------------------------------------------
# Closure sets through a connection


def galois_closure(gc: GaloisConnection, S: Iterable[Label]) -> frozenset:
    """``C_{F⊣G}(S) = G*(C(F*(S)))``."""
    return gc.upper_all(enumerate_closure(gc.target, gc.lower_all(S)))


# ---------------------------------------------------------------------------
# Closure operators


@dataclass(frozen=True, eq=False)
class ClosureOperator:
    lattice: Lattice
    k: Callable[[Label], Label]
    name: str = "closure"

    def __call__(self, label: Label) -> Label:
        return self.k(label)

    def fixpoints(self, labels: Iterable[Label] | None = None) -> list:
        if labels is None:
            labels = self.lattice.elements()
        return self.lattice.sort({self.k(l) for l in labels})


def _label_pool(L: Lattice, limit: int, trials: int, rng, extra=()) -> tuple[list, bool]:
    full = elements_of(L, limit)
    if full is not None:
        return list(full), True
    pool = {L.bot, *extra}
    if L.top is not None:
        pool.add(L.top)
    for _ in range(trials):
        pool.add(L.sample(rng))
    return L.sort(pool), False


def _monotone_pairs(L: Lattice, pool: list, exhaustive: bool, pair_limit: int, rng, trials: int):
    """Ordered pairs ``a ⊑ b`` sufficient to decide monotonicity on the pool."""
    if exhaustive and len(pool) ** 2 <= pair_limit and len(pool) <= 256:
        return [(a, b) for a in pool for b in pool if L.leq(a, b)], True
    if exhaustive:
        return cover_pairs(L), True
    pairs = []
    for _ in range(trials * 4):
        a, b = rng.choice(pool), rng.choice(pool)
        if L.leq(a, b):
            pairs.append((a, b))
        elif L.leq(b, a):
            pairs.append((b, a))
    return pairs, False


def check_closure_laws(op: ClosureOperator, sample: Iterable[Label] | None = None, trials: int = 300,
                       seed: int = 0, limit: int = 30000) -> LawReport:
    """Extensive, idempotent and monotone on the pool (the whole carrier when enumerable)."""
    rng = random.Random(seed)
    L = op.lattice
    if sample is not None:
        pool, exhaustive = L.sort(set(sample)), False
    else:
        pool, exhaustive = _label_pool(L, limit, trials, rng)
    report = LawReport(op.name, exhaustive)
    _closure_laws(report, L, op.k, pool, exhaustive, rng, trials, "")
    return report


def _closure_laws(report, L, k, pool, exhaustive, rng, trials, prefix):
    ext, idem, mono = (report.law(prefix + "extensive"), report.law(prefix + "idempotent"),
                       report.law(prefix + "monotone"))
    cache = {}
    for a in pool:
        ka = cache[a] = k(a)
        ext.checked += 1
        if not L.leq(a, ka):
            ext.fail(a)
        idem.checked += 1
        if k(ka) != ka:
            idem.fail(a)
    if exhaustive:
        pairs, _ = _monotone_pairs(L, pool, True, 70000, rng, trials)
    else:
        pairs = [(a, b) for a in pool for b in pool if L.leq(a, b)][: trials * 20]
    for a, b in pairs:
        mono.checked += 1
        ka = cache[a] if a in cache else k(a)
        kb = cache[b] if b in cache else k(b)
        if not L.leq(ka, kb):
            mono.fail((a, b))


def check_galois_laws(gc: GaloisConnection, trials: int = 300, seed: int = 0,
                      pool_limit: int = 30000, pair_limit: int = 1_500_000,
                      source_sample: Iterable[Label] | None = None,
                      target_sample: Iterable[Label] | None = None) -> LawReport:
    """Adjunction, monotonicity of both maps, ``FGF = F``, ``GFG = G``, and closure laws of ``G∘F``.

    Both carriers are enumerated when they have at most ``pool_limit``
    labels.  Adjunction is then checked on every pair (up to
    ``pair_limit``); monotonicity on every comparable pair of small
    carriers and on every cover pair of larger ones.
    """
    rng = random.Random(seed)
    S, T = gc.source, gc.target
    if source_sample is not None:
        src, src_ex = S.sort(set(source_sample)), False
    else:
        src, src_ex = _label_pool(S, pool_limit, trials, rng)
    if target_sample is not None:
        tgt, tgt_ex = T.sort(set(target_sample)), False
    else:
        tgt, tgt_ex = _label_pool(T, pool_limit, trials, rng, extra=[gc.F(l) for l in src[:trials]])
    report = LawReport(str(gc), src_ex and tgt_ex)
    for l in src:
        S.check(l)
    for t in tgt:
        T.check(t)

    F = {l: gc.F(l) for l in src}
    G = {t: gc.G(t) for t in tgt}

    rng_ok = report.law("ranges")
    for l, fl in F.items():
        rng_ok.checked += 1
        if not T.contains(fl):
            rng_ok.fail(("F", l, fl))
    for t, gt in G.items():
        rng_ok.checked += 1
        if not S.contains(gt):
            rng_ok.fail(("G", t, gt))
    if not rng_ok.passed:
        return report

    adj = report.law("adjunction")
    if len(src) * len(tgt) <= pair_limit:
        pairs = ((l, t) for l in src for t in tgt)
    else:
        report.exhaustive = False
        pairs = ((rng.choice(src), rng.choice(tgt)) for _ in range(pair_limit))
    for l, t in pairs:
        adj.checked += 1
        if T.leq(F[l], t) != S.leq(l, G[t]):
            adj.fail((l, t))

    for side, L, pool, ex, fmap in (("F", S, src, src_ex, F), ("G", T, tgt, tgt_ex, G)):
        law = report.law(f"{side}-monotone")
        cod = T if side == "F" else S
        fn = gc.F if side == "F" else gc.G
        pairs, _ = _monotone_pairs(L, pool, ex, 70000, rng, trials)
        for a, b in pairs:
            law.checked += 1
            fa = fmap[a] if a in fmap else fn(a)
            fb = fmap[b] if b in fmap else fn(b)
            if not cod.leq(fa, fb):
                law.fail((a, b))

    fgf = report.law("FGF=F")
    for l, fl in F.items():
        fgf.checked += 1
        if gc.F(gc.G(fl)) != fl:
            fgf.fail(l)
    gfg = report.law("GFG=G")
    for t, gt in G.items():
        gfg.checked += 1
        if gc.G(gc.F(gt)) != gt:
            gfg.fail(t)

    _closure_laws(report, S, gc.round_trip, src, src_ex, rng, trials, "GF-")
    return report


# ---------------------------------------------------------------------------
# Quotients by closure operators


@dataclass(frozen=True, eq=False)
class QuotientLattice(Lattice):
    """The fixpoints of a closure operator, ordered as in the base lattice.

    Labels are the fixpoints themselves, so equality is the base equality.
    """

    base: Lattice
    k: Callable[[Label], Label]
    name: str = "k"

    @property
    def exponential(self) -> bool:
        return self.base.exponential

    @property
    def descriptor(self) -> str:
        return f"quotient({self.base.descriptor},{self.name})"

    @property
    def bot(self):
        return self.k(self.base.bot)

    @property
    def top(self):
        return self.base.top

    @property
    def has_meet(self) -> bool:
        return self.base.has_meet

    def join(self, a, b):
        return self.k(self.base.join(a, b))

    def meet(self, a, b):
        # fixpoints of a closure operator are closed under meets
        return self.base.meet(a, b)

    def leq(self, a, b) -> bool:
        return self.base.leq(a, b)

    def key(self, label) -> tuple:
        return self.base.key(label)

    def contains(self, label) -> bool:
        return self.base.contains(label) and self.k(label) == label

    def elements(self):
        return self.base.sort({self.k(l) for l in self.base.elements()})

    def size(self) -> int | None:
        if self.base.size() is None:
            return None
        return len(self.elements())

    def sample(self, rng):
        return self.k(self.base.sample(rng))

    def format(self, label) -> str:
        return self.base.format(label)

    def parse(self, text: str):
        return self.check(self.base.parse(text))

    @property
    def atom_capacity(self):
        return self.base.atom_capacity

    def _atom(self, i: int):
        return self.k(self.base.atom(i))


def closure_to_galois(op: ClosureOperator, validate: bool = False) -> GaloisConnection:
    """``k ⊣ inclusion`` into the quotient of fixpoints."""
    if validate:
        report = check_closure_laws(op)
        if not report.passed:
            raise GaloisError(f"{op.name} is not a closure operator: {report.failures()[0]}")
    Q = QuotientLattice(op.lattice, op.k, op.name)
    return GaloisConnection(op.lattice, Q, op.k, lambda l: l, f"closure[{op.name}]")


# ---------------------------------------------------------------------------
# k_p and canonicity


def kp_oracle(p, universe: Iterable, L: Lattice) -> ClosureOperator:
    """``k_p(l) = ⨅{j ∈ W | l ⊑ j}`` with ``W`` the output labels of ``p`` on the universe."""
    if not L.has_meet or L.top is None:
        raise GaloisError(f"k_p needs meets and a top element; {L.descriptor} lacks them")
    witnesses: set = set()
    for x in universe:
        witnesses |= {l for _, l in p(x).items}
    W = L.sort(witnesses)

    def k(l):
        return meet_all(L, [j for j in W if L.leq(l, j)])

    op = ClosureOperator(L, k, f"k_{getattr(p, 'name', 'p')}")
    object.__setattr__(op, "witnesses", tuple(W))
    return op


@dataclass
class CanonicityReport:
    checked: int = 0
    violations: list = field(default_factory=list)
    equalities: int = 0
    transparency: object = None

    @property
    def passed(self) -> bool:
        return not self.violations


def canonicity_check(gc: GaloisConnection, p, universe: Iterable, samples: Iterable[Iterable[Label]],
                     kp: ClosureOperator | None = None, check_transparent: bool = True) -> CanonicityReport:
    """``|C_{F⊣G}(L)| ≥ |k_p*(C(L))|`` on each sampled label set ``L``."""
    universe = list(universe)
    report = CanonicityReport()
    if check_transparent:
        from .enforcement import check_transparency_on

        report.transparency = check_transparency_on(p, universe, gc)
    kp = kp or kp_oracle(p, universe, gc.source)
    for labels in samples:
        labels = frozenset(labels)
        lhs = len(galois_closure(gc, labels))
        rhs = len({kp(c) for c in incremental_closure(gc.source, labels)})
        report.checked += 1
        if lhs < rhs:
            report.violations.append((labels, lhs, rhs))
        elif lhs == rhs:
            report.equalities += 1
    return report
