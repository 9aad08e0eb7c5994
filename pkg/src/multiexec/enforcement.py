"""Multi-execution: run a program once per closure level and recombine.

``mef`` enumerates ``C(L(x))`` in the program's own lattice, ``mef_galois``
enumerates ``C_{F⊣G}(L(x))`` through a Galois connection.  Both count the
executions of the wrapped program, which is what the benchmarks measure.
"""

from __future__ import annotations

import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .closure import enumerate_closure
from .galois import GaloisConnection, galois_closure
from .labeled import LabeledSet, equivalent_at, labels_of, perturb_above, project, random_labeled_set
from .lattices import Label, Lattice


class EnforcementError(RuntimeError):
    """A run of the wrapped program failed; ``level`` is the projection it ran on."""

    def __init__(self, program: str, level: Label, cause: BaseException):
        super().__init__(f"{program} failed on the projection at {level!r}: {cause}")
        self.program = program
        self.level = level
        self.cause = cause


class Program:
    """A labeled-set transformer with a thread-safe invocation counter."""

    def __init__(self, fn: Callable[[LabeledSet], LabeledSet], name: str | None = None,
                 trace: bool = False):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "program")
        self.trace = trace
        self.history: list[LabeledSet] = []
        self._calls = 0
        self._lock = threading.Lock()

    def __call__(self, x: LabeledSet) -> LabeledSet:
        with self._lock:
            self._calls += 1
            if self.trace:
                self.history.append(x)
        return self.fn(x)

    @property
    def calls(self) -> int:
        with self._lock:
            return self._calls

    def reset(self) -> int:
        """Zero the counter (and trace), returning the previous count."""
        with self._lock:
            n, self._calls = self._calls, 0
            self.history = []
            return n

    def __repr__(self) -> str:
        return f"Program({self.name}, calls={self._calls})"


def _run_levels(p, x: LabeledSet, levels: list, keep: Callable[[Label, Label], bool],
                workers: int | None) -> LabeledSet:
    name = getattr(p, "name", "program")

    def one(level):
        try:
            out = p(project(x, level))
        except Exception as exc:  # annotate with the level, whatever p raised
            raise EnforcementError(name, level, exc) from exc
        return [(v, j) for v, j in out.items if keep(j, level)]

    if workers and workers > 1 and len(levels) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, levels))
    else:
        parts = [one(level) for level in levels]
    return LabeledSet(x.lattice, (pair for part in parts for pair in part))


def mef(p, x: LabeledSet, workers: int | None = None) -> LabeledSet:
    """``⋃{p(x↓l)@(l↑C(L(x))) | l ∈ C(L(x))}``."""
    L = x.lattice
    S = labels_of(x)
    levels = L.sort(enumerate_closure(L, S))
    leq = L.leq

    def keep(j, level):
        return leq(level, j) and all(leq(i, level) for i in S if leq(i, j))

    return _run_levels(p, x, levels, keep, workers)


def mef_galois(gc: GaloisConnection, p, x: LabeledSet, workers: int | None = None) -> LabeledSet:
    """Multi-execution over ``C_{F⊣G}(L(x)) = G*(C(F*(L(x))))``.

    Output selection uses the linear test
    ``level ⊑ j ∧ ∀i ∈ F*(L(x)). G(i) ⊑ j ⟹ G(i) ⊑ level``.
    """
    L = x.lattice
    S = labels_of(x)
    levels = L.sort(galois_closure(gc, S))
    back = L.sort(gc.upper_all(gc.lower_all(S)))
    leq = L.leq

    def keep(j, level):
        return leq(level, j) and all(leq(g, level) for g in back if leq(g, j))

    return _run_levels(p, x, levels, keep, workers)


def count_runs(enforce: Callable[[], Any], p: Program) -> int:
    """Execute ``enforce`` and return how many times it invoked ``p``."""
    before = p.calls
    enforce()
    return p.calls - before


# ---------------------------------------------------------------------------
# Property checkers


@dataclass
class PropertyReport:
    name: str
    trials: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        status = "ok" if self.passed else f"{len(self.violations)} violations"
        return f"{self.name}: {self.trials} trials, {status}"


def default_triples(L: Lattice, max_size: int = 5, values: Iterable[Any] | None = None):
    """An input generator for the noninterference checker: ``rng -> (level, x)``."""
    values = list(values) if values is not None else list(range(6))

    def gen(rng):
        return L.sample(rng), random_labeled_set(L, rng, max_size, values)

    return gen


def check_noninterference(subject: Callable[[LabeledSet], LabeledSet], L: Lattice,
                          gen: Callable | None = None, trials: int = 1000, seed: int = 0,
                          name: str | None = None, max_violations: int = 10) -> PropertyReport:
    """For each trial, ``subject(x) ~_l subject(y)`` where ``y`` perturbs ``x`` above ``l``."""
    rng = random.Random(seed)
    gen = gen or default_triples(L)
    report = PropertyReport(name or getattr(subject, "name", "subject"))
    for _ in range(trials):
        level, x = gen(rng)
        y = perturb_above(x, level, rng)
        ox, oy = subject(x), subject(y)
        report.trials += 1
        if not equivalent_at(ox, oy, level):
            if len(report.violations) < max_violations:
                report.violations.append({"level": level, "x": x, "y": y, "out_x": ox, "out_y": oy})
            else:
                report.violations.append(None)
    return report


def _transparent_at(p, x: LabeledSet, gc: GaloisConnection | None, full: bool):
    expected = p(x)
    if gc is None:
        got = mef(p, x)
        return got == expected, expected, got
    got = mef_galois(gc, p, x)
    if full:
        return got == expected, expected, got
    for j in labels_of(expected) | labels_of(got):
        if gc.round_trip(j) != j:
            continue
        if {v for v, l in got.items if l == j} != {v for v, l in expected.items if l == j}:
            return False, expected, got
    return True, expected, got


def check_transparency(p, L: Lattice, gen: Callable | None = None, trials: int = 500,
                       gc: GaloisConnection | None = None, seed: int = 0, full: bool = False,
                       name: str | None = None) -> PropertyReport:
    """``MEF[p](x) = p(x)``; with ``gc``, equality at every (G∘F)-fixpoint output label.

    ``full`` forces whole-output comparison in the Galois case.
    ``gen`` maps an rng to an input labeled set.
    """
    rng = random.Random(seed)
    gen = gen or (lambda r: random_labeled_set(L, r, 5))
    report = PropertyReport(name or f"transparency[{getattr(p, 'name', 'p')}]")
    for _ in range(trials):
        x = gen(rng)
        ok, expected, got = _transparent_at(p, x, gc, full)
        report.trials += 1
        if not ok:
            report.violations.append({"x": x, "expected": expected, "got": got})
    return report


def check_transparency_on(p, inputs: Iterable[LabeledSet], gc: GaloisConnection | None = None,
                          full: bool = False) -> PropertyReport:
    report = PropertyReport(f"transparency[{getattr(p, 'name', 'p')}]")
    for x in inputs:
        ok, expected, got = _transparent_at(p, x, gc, full)
        report.trials += 1
        if not ok:
            report.violations.append({"x": x, "expected": expected, "got": got})
    return report
