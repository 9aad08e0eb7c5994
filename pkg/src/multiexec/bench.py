"""Benchmark harness: execution counts and wall-clock means per input size."""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .descriptors import (GaloisContext, ProgramChoice, default_universe, is_auto_sized,
                          parse_galois, parse_lattice, parse_program)
from .enforcement import mef, mef_galois
from .galois import GaloisConnection
from .labeled import LabeledSet, labels_of
from .lattices import Lattice, LatticeError

DEFAULT_REPS = 10
SAFETY_CAP = 20  # largest n allowed for exponential-class runs without an override


class SafetyCapError(RuntimeError):
    """An exponential configuration beyond the safety cap."""


class InvariantViolation(AssertionError):
    """Count mode saw different results on repeated runs."""


@dataclass
class BenchConfig:
    program: str = "goodSum"
    lattice: str = "powerset"
    galois: str | None = None
    sizes: range = field(default_factory=lambda: range(0, 11))
    reps: int = DEFAULT_REPS
    mode: str = "count"
    out: str | None = None
    seed: int = 0
    enforce: str = "mef"
    allow_exponential: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("repetitions must be at least 1")
        if self.mode not in ("count", "time"):
            raise ValueError(f"mode must be count or time, not {self.mode!r}")
        if self.enforce not in ("none", "mef"):
            raise ValueError(f"enforce must be none or mef, not {self.enforce!r}")
        if any(n < 0 for n in self.sizes):
            raise ValueError("sizes must be non-negative")

    @property
    def pipeline(self) -> str:
        if self.galois:
            return "mef-galois"
        return self.enforce


@dataclass(frozen=True)
class BenchRecord:
    size: int
    mean: float | int
    runs: int | None


def parse_sizes(text: str) -> range:
    """``a..b`` or ``a..b:stride`` (inclusive), or a single ``n``."""
    text = text.strip()
    stride = 1
    if ":" in text:
        text, s = text.rsplit(":", 1)
        stride = int(s)
        if stride < 1:
            raise ValueError("stride must be positive")
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(text)
    if lo < 0 or hi < lo:
        raise ValueError(f"bad size range {text!r}")
    return range(lo, hi + 1, stride)


def gen_input(L: Lattice, n: int, rng: random.Random | None = None) -> LabeledSet:
    """``{1^{p1}, ..., n^{pn}}`` using the lattice's principal labels."""
    cap = L.atom_capacity
    if cap is not None and n > cap:
        raise LatticeError(f"{L.descriptor} has {cap} principal labels; input size {n} needs {n}")
    order = list(range(1, n + 1))
    if rng is not None:
        rng.shuffle(order)  # insertion order must not matter
    return LabeledSet(L, [(i, L.atom(i)) for i in order])


@dataclass
class Pipeline:
    """One configured per-size experiment."""

    lattice: Lattice
    choice: ProgramChoice
    galois_text: str | None
    pipeline: str

    def prepare(self, x: LabeledSet):
        prog = self.choice.build(x)
        gc = None
        if self.pipeline == "mef-galois":
            auto = self.choice.levels if self.choice.levels is not None else labels_of(x)
            universe = lambda L: default_universe(L, len(x))  # noqa: E731
            ctx = GaloisContext(frozenset(auto), universe, {"input": x})
            gc = parse_galois(self.galois_text, self.lattice, ctx)
        return prog, gc

    def runner(self, prog, gc: GaloisConnection | None) -> Callable[[LabeledSet], LabeledSet]:
        if self.pipeline == "none":
            return prog
        if self.pipeline == "mef":
            return lambda x: mef(prog, x)
        return lambda x: mef_galois(gc, prog, x)


def build_pipeline(cfg: BenchConfig) -> Pipeline:
    sizes = list(cfg.sizes)
    default_n = max(sizes) if sizes else 0
    L = parse_lattice(cfg.lattice, default_n if is_auto_sized(cfg.lattice) else None)
    choice = parse_program(cfg.program, L)
    pipe = Pipeline(L, choice, cfg.galois, cfg.pipeline)
    if not cfg.allow_exponential:
        enum_lattice = L
        if pipe.pipeline == "mef-galois":
            probe = gen_input(L, min(default_n, L.atom_capacity or default_n))
            enum_lattice = pipe.prepare(probe)[1].target
        if pipe.pipeline != "none" and enum_lattice.exponential and default_n > SAFETY_CAP:
            raise SafetyCapError(
                f"{pipe.pipeline} over {enum_lattice.descriptor} is exponential; n = {default_n} exceeds"
                f" the cap of {SAFETY_CAP} (pass --allow-exponential to run anyway)")
    return pipe


def run_benchmark(cfg: BenchConfig, progress: Callable[[BenchRecord], None] | None = None) -> list[BenchRecord]:
    pipe = build_pipeline(cfg)
    rng = random.Random(cfg.seed)
    records = []
    for n in cfg.sizes:
        x = gen_input(pipe.lattice, n, rng)
        prog, gc = pipe.prepare(x)
        run = pipe.runner(prog, gc)
        if cfg.mode == "count":
            counts, outputs = [], []
            for _ in range(2):
                before = prog.calls
                outputs.append(run(x))
                counts.append(prog.calls - before)
            if counts[0] != counts[1] or outputs[0] != outputs[1]:
                raise InvariantViolation(f"size {n}: repeated runs disagree ({counts[0]} vs {counts[1]})")
            rec = BenchRecord(n, counts[0], counts[0])
        else:
            run(x)  # warm-up
            prog.reset()
            start = time.perf_counter()
            for _ in range(cfg.reps):
                run(x)
            elapsed = time.perf_counter() - start
            rec = BenchRecord(n, elapsed / cfg.reps, prog.calls // cfg.reps)
        records.append(rec)
        if progress:
            progress(rec)
    if cfg.out:
        write_csv(records, cfg.out)
    return records


def write_csv(records: list[BenchRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["Size", "Mean"])
        for r in records:
            w.writerow([r.size, r.mean if isinstance(r.mean, int) else repr(float(r.mean))])


def read_csv(path: str | Path) -> list[BenchRecord]:
    """Parse a file written by :func:`write_csv`; integer means are read back as run counts."""
    out = []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows)
        if header != ["Size", "Mean"]:
            raise ValueError(f"unexpected CSV header {header}")
        for size, mean in rows:
            if mean.lstrip("-").isdigit():
                out.append(BenchRecord(int(size), int(mean), int(mean)))
            else:
                out.append(BenchRecord(int(size), float(mean), None))
    return out
