"""Command-line entry point: ``multiexec closure|profile|run|bench``.

Exit codes: 0 success, 1 usage error, 2 safety-cap refusal, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (DEFAULT_REPS, BenchConfig, InvariantViolation, SafetyCapError, parse_sizes,
                    run_benchmark, write_csv)
from .closure import (ClosureLimitError, UnsoundGeneratorError, bruteforce_generator,
                      closure_size_profile, enumerate_closure)
from .descriptors import GaloisContext, parse_galois, parse_lattice, parse_program
from .enforcement import EnforcementError, mef, mef_galois
from .labeled import labels_of, parse_labeled
from .lattices import LatticeError

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_closure(args) -> int:
    L = parse_lattice(args.lattice)
    S = [L.parse(t) for t in args.labels]
    g = bruteforce_generator(L) if args.generator == "bruteforce" else None
    C = enumerate_closure(L, S, g, validate=args.validate)
    for c in L.sort(C):
        print(L.format(c))
    return EXIT_OK


def cmd_profile(args) -> int:
    L = parse_lattice(args.lattice)
    pool = [L.parse(t) for t in args.pool] if args.pool else None
    prof = closure_size_profile(L, args.n_max, pool)
    sys.stdout.write(prof.to_csv(L))
    return EXIT_OK


def cmd_run(args) -> int:
    L = parse_lattice(args.lattice)
    x = parse_labeled(L, args.input)
    choice = parse_program(args.program, L)
    prog = choice.build(x)
    mode, _, gtext = args.enforce.partition(":")
    if mode == "none":
        out = prog(x)
    elif mode == "mef":
        out = mef(prog, x)
    elif mode == "mef-galois":
        if not gtext:
            raise UsageError("--enforce mef-galois:<connection> needs a connection descriptor")
        auto = choice.levels if choice.levels is not None else labels_of(x)
        gc = parse_galois(gtext, L, GaloisContext(frozenset(auto), extra={"input": x}))
        out = mef_galois(gc, prog, x)
    else:
        raise UsageError(f"--enforce must be none, mef or mef-galois:<g>, not {args.enforce!r}")
    print(out.format())
    print(f"runs: {prog.calls}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(program=args.program, lattice=args.lattice, galois=args.galois,
                      sizes=parse_sizes(args.sizes) if args.sizes else _default_sizes(args.lattice),
                      reps=args.reps, mode=args.mode, out=None, seed=args.seed,
                      enforce=args.enforce, allow_exponential=args.allow_exponential)

    def show(rec):
        if not args.quiet:
            print(f"{rec.size},{rec.mean}", file=sys.stderr if args.out else sys.stdout)

    records = run_benchmark(cfg, progress=show if args.out else None)
    if args.out:
        write_csv(records, args.out)
    else:
        print("Size,Mean")
        for r in records:
            print(f"{r.size},{r.mean if isinstance(r.mean, int) else repr(r.mean)}")
    return EXIT_OK


def _default_sizes(lattice: str) -> range:
    try:
        L = parse_lattice(lattice)
    except LatticeError:
        return range(0, 11)
    cap = L.atom_capacity
    return range(0, (cap if cap is not None else 10) + 1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="multiexec", description="Multi-execution enforcement toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("closure", help="print the closure set of some labels")
    c.add_argument("--lattice", required=True)
    c.add_argument("labels", nargs="*", help="labels in the lattice's syntax, e.g. {p1} {p2}")
    c.add_argument("--generator", choices=("default", "bruteforce"), default="default")
    c.add_argument("--validate", action="store_true", help="cross-check against the brute-force oracle")
    c.set_defaults(func=cmd_closure)

    pr = sub.add_parser("profile", help="closure-size profile as CSV n,cs,witness")
    pr.add_argument("--lattice", required=True)
    pr.add_argument("--n-max", type=int, default=4)
    pr.add_argument("--pool", nargs="*", help="label pool (default: the whole carrier)")
    pr.set_defaults(func=cmd_profile)

    r = sub.add_parser("run", help="run a program on a labeled set")
    r.add_argument("--program", required=True)
    r.add_argument("--lattice", required=True)
    r.add_argument("--enforce", default="mef", help="none | mef | mef-galois:<g>")
    r.add_argument("--input", required=True, help="e.g. '{1^{p1}, 2^{p2}}'")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="execution counts or timings per input size")
    b.add_argument("--program", required=True)
    b.add_argument("--lattice", required=True)
    b.add_argument("--galois", default=None)
    b.add_argument("--enforce", choices=("none", "mef"), default="mef")
    b.add_argument("--sizes", default=None, help="a..b[:stride], inclusive")
    b.add_argument("--reps", type=int, default=DEFAULT_REPS)
    b.add_argument("--mode", choices=("time", "count"), default="count")
    b.add_argument("--out", default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--allow-exponential", action="store_true")
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SafetyCapError as exc:
        print(f"multiexec: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvariantViolation, UnsoundGeneratorError) as exc:
        print(f"multiexec: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, LatticeError, ClosureLimitError, EnforcementError, ValueError) as exc:
        print(f"multiexec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
