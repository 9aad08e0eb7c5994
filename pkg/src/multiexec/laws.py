"""Executable lattice laws.

Law checks never raise on failure: they return a :class:`LawReport` whose
entries carry a counterexample.  Checks are exhaustive when the carrier is
small and fall back to seeded random sampling otherwise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .dclabels import DCLabel, DCLattice
from .lattices import Lattice, Product, elements_of

EXHAUSTIVE_LIMIT = 64


@dataclass
class LawResult:
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: Any = None

    def fail(self, witness) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = witness


@dataclass
class LawReport:
    subject: str
    exhaustive: bool
    results: dict[str, LawResult] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)

    def law(self, name: str) -> LawResult:
        if name not in self.results:
            self.results[name] = LawResult(name)
        return self.results[name]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failures(self) -> list[LawResult]:
        return [r for r in self.results.values() if not r.passed]

    def __getitem__(self, name: str) -> LawResult:
        return self.results[name]

    def summary(self) -> str:
        mode = "exhaustive" if self.exhaustive else "sampled"
        lines = [f"{self.subject} ({mode})"]
        for r in self.results.values():
            status = "ok" if r.passed else f"FAIL {r.counterexample!r}"
            lines.append(f"  {r.name:<14} {r.checked:>8}  {status}")
        return "\n".join(lines)


def _pool(L: Lattice, sample, trials: int, rng, limit: int) -> tuple[list, bool]:
    full = elements_of(L, limit)
    if full is not None:
        return list(full), True
    draw = sample or L.sample
    pool = {L.bot}
    if L.top is not None:
        pool.add(L.top)
    for _ in range(max(trials, 8)):
        pool.add(draw(rng))
    return L.sort(pool), False


def _pairs(pool: list, exhaustive: bool, trials: int, rng) -> Iterable[tuple]:
    if exhaustive:
        return itertools.product(pool, repeat=2)
    return [(rng.choice(pool), rng.choice(pool)) for _ in range(trials)]


def _triples(pool: list, exhaustive: bool, trials: int, rng) -> Iterable[tuple]:
    if exhaustive:
        return itertools.product(pool, repeat=3)
    return [(rng.choice(pool), rng.choice(pool), rng.choice(pool)) for _ in range(trials)]


def upset_masks(L: Lattice, items: list) -> list[int]:
    """Bit ``j`` of entry ``i`` is set iff ``items[i] ⊑ items[j]``."""
    masks = []
    for a in items:
        m = 0
        for j, b in enumerate(items):
            if L.leq(a, b):
                m |= 1 << j
        masks.append(m)
    return masks


def check_lattice_laws(L: Lattice, sample: Callable | None = None, trials: int = 300,
                       seed: int = 0, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                       lub_limit: int = 400) -> LawReport:
    """Check the join-semilattice axioms (and top/meet when present) on ``L``.

    Laws: assoc, comm, idem, identity, coherence (``a ⊑ b`` iff ``a ⊔ b = b``),
    antisymmetry, top, meet, lub (join is the least upper bound) and key
    (the canonical order separates distinct labels).
    """
    rng = random.Random(seed)
    pool, exhaustive = _pool(L, sample, trials, rng, exhaustive_limit)
    report = LawReport(L.descriptor, exhaustive)
    j, leq = L.join, L.leq

    law = report.law("assoc")
    for a, b, c in _triples(pool, exhaustive, trials, rng):
        law.checked += 1
        if j(j(a, b), c) != j(a, j(b, c)):
            law.fail((a, b, c))

    comm, coh, anti = report.law("comm"), report.law("coherence"), report.law("antisymmetry")
    for a, b in _pairs(pool, exhaustive, trials, rng):
        ab = j(a, b)
        comm.checked += 1
        if ab != j(b, a):
            comm.fail((a, b))
        coh.checked += 1
        if leq(a, b) != (ab == b):
            coh.fail((a, b))
        anti.checked += 1
        if a != b and leq(a, b) and leq(b, a):
            anti.fail((a, b))

    idem, ident, keyl = report.law("idem"), report.law("identity"), report.law("key")
    keys: dict = {}
    for a in pool:
        idem.checked += 1
        if j(a, a) != a:
            idem.fail(a)
        ident.checked += 1
        if j(L.bot, a) != a or j(a, L.bot) != a:
            ident.fail(a)
        keyl.checked += 1
        k = L.key(a)
        if k in keys and keys[k] != a:
            keyl.fail((keys[k], a))
        keys[k] = a

    top = report.law("top")
    if L.top is not None:
        for a in pool:
            top.checked += 1
            if not leq(a, L.top):
                top.fail(a)

    if L.has_meet:
        meet = report.law("meet")
        for a, b in _pairs(pool, exhaustive, trials, rng):
            meet.checked += 1
            m = L.meet(a, b)
            if not (leq(m, a) and leq(m, b)):
                meet.fail((a, b, m))
                continue
            # greatest: anything below both is below the meet
            for c in (pool if exhaustive else rng.sample(pool, min(len(pool), 16))):
                if leq(c, a) and leq(c, b) and not leq(c, m):
                    meet.fail((a, b, c))
                    break

    # least upper bound, via up-set bitmasks: (a ⊔ b)↑ = a↑ ∩ b↑ on the pool
    lub = report.law("lub")
    carrier = elements_of(L, lub_limit)
    items = list(carrier) if carrier is not None else pool
    index = {x: i for i, x in enumerate(items)}
    masks = upset_masks(L, items)
    lub_exhaustive = carrier is not None
    pairs = (itertools.product(range(len(items)), repeat=2) if lub_exhaustive
             else [(rng.randrange(len(items)), rng.randrange(len(items))) for _ in range(trials)])
    for ia, ib in pairs:
        lub.checked += 1
        ab = j(items[ia], items[ib])
        if ab in index:
            up = masks[index[ab]]
        else:
            up = sum(1 << t for t, x in enumerate(items) if leq(ab, x))
        if up != masks[ia] & masks[ib]:
            lub.fail((items[ia], items[ib], ab))
    report.notes["lub_exhaustive"] = lub_exhaustive
    return report


def check_homomorphism(h: Callable, L: Lattice, L2: Lattice, sample: Callable | None = None,
                       trials: int = 300, seed: int = 0,
                       exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> LawReport:
    """Check ``h(⊥) = ⊥`` and ``h(a ⊔ b) = h(a) ⊔ h(b)``; record injectivity on the pool."""
    rng = random.Random(seed)
    pool, exhaustive = _pool(L, sample, trials, rng, exhaustive_limit)
    report = LawReport(f"{L.descriptor} -> {L2.descriptor}", exhaustive)
    bot = report.law("bottom")
    bot.checked = 1
    if h(L.bot) != L2.bot:
        bot.fail((L.bot, h(L.bot)))
    join = report.law("join")
    for a, b in _pairs(pool, exhaustive, trials, rng):
        join.checked += 1
        if h(L.join(a, b)) != L2.join(h(a), h(b)):
            join.fail((a, b))
    seen: dict = {}
    injective, witness = True, None
    for a in pool:
        img = h(a)
        if img in seen and seen[img] != a:
            injective, witness = False, (seen[img], a)
            break
        seen[img] = a
    report.notes["injective"] = injective
    report.notes["collision"] = witness
    return report


def generic_covers(L: Lattice, items: list) -> list[tuple]:
    """Cover pairs ``a ⋖ b`` of the finite poset ``items``."""
    ups = upset_masks(L, items)
    downs = [0] * len(items)
    for i, m in enumerate(ups):
        for t in range(len(items)):
            if m >> t & 1:
                downs[t] |= 1 << i
    out = []
    for i in range(len(items)):
        strict_up = ups[i] & ~(1 << i)
        t = strict_up
        while t:
            low = t & -t
            k = low.bit_length() - 1
            t ^= low
            between = strict_up & downs[k] & ~(1 << k)
            if not between:
                out.append((items[i], items[k]))
    return out


def cover_pairs(L: Lattice) -> list[tuple]:
    """Cover pairs of a finite lattice.

    Products (including DC labels) are decomposed: in a product, ``a ⋖ b``
    iff the pair moves by a cover in exactly one component.  A map is monotone
    on a finite poset iff it is monotone on every cover pair.
    """
    if isinstance(L, DCLattice):
        cc, ic = cover_pairs(L.conf), cover_pairs(L.integ)
        ce, ie = L.conf.elements(), L.integ.elements()
        return ([(DCLabel(a, i), DCLabel(b, i)) for a, b in cc for i in ie]
                + [(DCLabel(c, a), DCLabel(c, b)) for a, b in ic for c in ce])
    if isinstance(L, Product):
        lc, rc = cover_pairs(L.left), cover_pairs(L.right)
        le, re_ = L.left.elements(), L.right.elements()
        return ([((a, r), (b, r)) for a, b in lc for r in re_]
                + [((l, a), (l, b)) for a, b in rc for l in le])
    items = elements_of(L)
    if items is None:
        raise ValueError(f"{L.descriptor} has no enumerable carrier")
    return generic_covers(L, list(items))
