from __future__ import annotations

import itertools
import math
import random

import pytest

from multiexec import bench
from multiexec.bench import (BenchConfig, BenchRecord, SafetyCapError, gen_input, parse_sizes, read_csv,
                             run_benchmark, write_csv)
from multiexec.cli import main
from multiexec.dclabels import DCLattice
from multiexec.descriptors import (DescriptorError, default_universe, is_auto_sized, parse_galois,
                                   parse_lattice, parse_program, GaloisContext)
from multiexec.lattices import (Discrete, Exponential, HSum, NatChain, Powerset, Product, TruncatedPowerset,
                                TwoPoint, VSum, LatticeError)


def fs(*xs):
    return frozenset(xs)


def test_parse_lattice_descriptors():
    assert parse_lattice("two-point") == TwoPoint()
    assert parse_lattice("nat") == NatChain()
    assert parse_lattice("powerset:3") == Powerset(("p1", "p2", "p3"))
    assert parse_lattice("discrete:2") == Discrete(("p1", "p2"))
    assert parse_lattice("trunc:2:4") == TruncatedPowerset(2, ("p1", "p2", "p3", "p4"))
    assert parse_lattice("dc:2") == DCLattice.of_size(2)
    assert parse_lattice("product(nat,two-point)") == Product(NatChain(), TwoPoint())
    assert parse_lattice("vsum(two-point,powerset:1)") == VSum(TwoPoint(), Powerset(("p1",)))
    assert parse_lattice("hsum(nat,nat)") == HSum(NatChain(), NatChain())
    assert parse_lattice("exp(powerset:2)") == Exponential(Powerset(("p1", "p2")))
    assert parse_lattice("powerset", 5) == Powerset(tuple(f"p{i}" for i in range(1, 6)))
    assert is_auto_sized("powerset") and not is_auto_sized("powerset:2")
    for bad in ("nope", "powerset:x", "trunc:2:3:4", "product(nat)", "powerset"):
        with pytest.raises(DescriptorError):
            parse_lattice(bad)


def test_parse_program_descriptors():
    P = parse_lattice("powerset:3")
    assert parse_program("goodSum:{p1};{p2,p3}", P).levels == {fs("p1"), fs("p2", "p3")}
    assert parse_program("goodSum", P).levels is None
    with pytest.raises(LatticeError):
        parse_program("secure", P)
    with pytest.raises(LatticeError):
        parse_program("pairwise:{p1}", P)
    with pytest.raises(LatticeError):
        parse_program("nope", P)


def test_parse_galois_descriptors():
    P = parse_lattice("powerset:3")
    ctx = GaloisContext(frozenset({fs("p1"), fs("p2")}))
    assert parse_galois("specify:auto", P, ctx).G("L") == fs("p1", "p2")
    assert parse_galois("specify:{p3}", P).G("L") == fs("p3")
    assert parse_galois("trunc:2", P).target == TruncatedPowerset(2, P.atoms)
    assert parse_galois("identity", P).F(fs("p1")) == fs("p1")
    comp = parse_galois("compose(trunc:2,specify:auto)", P, ctx)
    assert comp.G("L") == fs("p1", "p2") and comp.F(P.top) == "H"
    assert parse_galois("dc-chain:2", parse_lattice("dc:3")).name == "dc-chain2"
    kp = parse_galois("kp:pairwise1", P)
    assert kp.round_trip(P.top) == P.top and kp.round_trip(fs("p1")) == fs("p1")
    for bad in ("nope", "trunc:x", "compose(identity)"):
        with pytest.raises(DescriptorError):
            parse_galois(bad, P)
    with pytest.raises(DescriptorError):
        parse_galois("dc-chain:2", P)
    with pytest.raises(DescriptorError):
        parse_galois("specify:auto", NatChain())


def test_default_universe():
    U = default_universe(parse_lattice("powerset:3"))
    assert len(U) == 4 + 3
    assert len(U[3]) == 3


def test_parse_sizes():
    assert parse_sizes("0..4") == range(0, 5)
    assert parse_sizes("2..10:4") == range(2, 11, 4)
    assert parse_sizes("7") == range(7, 8)
    for bad in ("4..2", "-1..3", "1..3:0", "a..b"):
        with pytest.raises(ValueError):
            parse_sizes(bad)


def test_gen_input():
    P = parse_lattice("powerset:5")
    x = gen_input(P, 3)
    assert x.items == {(1, fs("p1")), (2, fs("p2")), (3, fs("p3"))}
    assert gen_input(P, 3, random.Random(7)) == x
    assert gen_input(P, 0) == gen_input(P, 0, random.Random(1))
    with pytest.raises(LatticeError):
        gen_input(P, 6)


def test_csv_round_trip(tmp_path):
    records = [BenchRecord(0, 1, 1), BenchRecord(1, 2, 2)]
    path = tmp_path / "counts.csv"
    write_csv(records, path)
    assert path.read_text().splitlines() == ["Size,Mean", "0,1", "1,2"]
    assert read_csv(path) == records
    timed = [BenchRecord(3, 1.25e-05, 4)]
    write_csv(timed, path)
    back = read_csv(path)
    assert back[0].size == 3 and back[0].mean == 1.25e-05
    path.write_text("a,b\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_bench_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(reps=0)
    with pytest.raises(ValueError):
        BenchConfig(mode="wall")
    with pytest.raises(ValueError):
        BenchConfig(enforce="faceted")


def test_counts_are_seed_independent():
    runs = []
    for seed in (0, 1, 2):
        cfg = BenchConfig("pairwise", "powerset", "trunc:2", range(0, 7), seed=seed)
        runs.append([r.runs for r in run_benchmark(cfg)])
    assert runs[0] == runs[1] == runs[2]


def test_count_mode_values():
    cfg = BenchConfig("badSum", "powerset", None, range(0, 8))
    assert [r.mean for r in run_benchmark(cfg)] == [2 ** n for n in range(8)]
    none = BenchConfig("badSum", "powerset", None, range(0, 4), enforce="none")
    assert [r.mean for r in run_benchmark(none)] == [1, 1, 1, 1]
    trunc = BenchConfig("pairwise", "powerset", "trunc:1", range(0, 6))
    assert [r.mean for r in run_benchmark(trunc)] == [1, 2, 4, 5, 6, 7]


def test_time_mode():
    cfg = BenchConfig("goodSum", "powerset", None, range(0, 4), reps=2, mode="time")
    records = run_benchmark(cfg)
    assert all(isinstance(r.mean, float) and r.mean > 0 for r in records)
    assert [r.runs for r in records] == [1, 2, 4, 8]


def test_safety_cap():
    with pytest.raises(SafetyCapError):
        run_benchmark(BenchConfig("goodSum", "powerset", None, range(0, 21 + 1)))
    # truncation keeps the closure polynomial, so larger sizes are allowed
    cap = BenchConfig("pairwise", "powerset", "trunc:2", range(24, 25))
    assert run_benchmark(cap)[0].runs == 1 + 24 + math.comb(24, 2) + 1


def test_cli_bench_stdout(capsys):
    assert main(["bench", "--program", "goodSum", "--lattice", "powerset", "--sizes", "0..3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["Size,Mean", "0,1", "1,2", "2,4", "3,8"]


def test_cli_bench_file(tmp_path, capsys):
    path = tmp_path / "o.csv"
    code = main(["bench", "--program", "pairwise", "--lattice", "powerset", "--galois", "trunc:2",
                 "--sizes", "0..4", "--out", str(path)])
    assert code == 0
    assert [r.mean for r in read_csv(path)] == [1, 2, 4, 8, 12]
    assert "4,12" in capsys.readouterr().err


def test_cli_exit_codes(capsys):
    assert main(["bench", "--program", "goodSum", "--lattice", "powerset:25", "--sizes", "25"]) == 2
    assert main(["bench", "--program", "nope", "--lattice", "powerset", "--sizes", "1"]) == 1
    assert main(["bench", "--program", "goodSum", "--lattice", "powerset", "--sizes", "3..1"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["bench", "--program"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    assert "refused" in capsys.readouterr().err


def test_cli_invariant_violation(monkeypatch, capsys):
    counter = itertools.count()

    def flaky(prog, x, workers=None):
        out = prog(x)
        for _ in range(next(counter)):
            prog(x)
        return out

    monkeypatch.setattr(bench, "mef", flaky)
    assert main(["bench", "--program", "goodSum", "--lattice", "powerset", "--sizes", "1"]) == 3
    assert "invariant" in capsys.readouterr().err


def test_cli_allow_exponential(capsys):
    assert main(["bench", "--program", "badSum", "--lattice", "powerset:21", "--sizes", "21",
                 "--enforce", "none", "--allow-exponential"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "21,1"


def test_cli_run(capsys):
    assert main(["run", "--program", "goodSum:{Alice};{Bob}", "--lattice", "powerset:3",
                 "--input", "{1^{p1}}"]) == 1  # unknown principal
    capsys.readouterr()
    assert main(["run", "--program", "goodSum:{p1};{p2}", "--lattice", "powerset:3",
                 "--input", "{1^{p1}, 2^{p3}}"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["{1^{p1,p2}}", "runs: 4"]
    assert main(["run", "--program", "badSum", "--lattice", "powerset:2", "--enforce", "none",
                 "--input", "{1^{p1}}"]) == 0
    assert capsys.readouterr().out.splitlines() == ["{1^{p1}}", "runs: 1"]
    assert main(["run", "--program", "goodSum:{p1};{p2}", "--lattice", "powerset:3",
                 "--enforce", "mef-galois:specify:auto", "--input", "{1^{p1}, 2^{p3}}"]) == 0
    assert capsys.readouterr().out.splitlines() == ["{1^{p1,p2}}", "runs: 2"]
    assert main(["run", "--program", "secure", "--lattice", "two-point", "--enforce", "bogus",
                 "--input", "{1^L}"]) == 1


def test_cli_closure_and_profile(capsys):
    assert main(["closure", "--lattice", "powerset:3", "{p1}", "{p3}", "--validate"]) == 0
    assert sorted(capsys.readouterr().out.split()) == sorted(["{}", "{p1}", "{p3}", "{p1,p3}"])
    assert main(["closure", "--lattice", "discrete:3", "p1", "p2", "--generator", "bruteforce"]) == 0
    assert len(capsys.readouterr().out.split()) == 4
    assert main(["profile", "--lattice", "powerset:3", "--n-max", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,cs,witness" and [l.split(",")[1] for l in lines[1:]] == ["1", "2", "4", "8"]
    assert main(["profile", "--lattice", "nat", "--n-max", "2", "--pool", "0", "1", "2"]) == 0
    assert [l.split(",")[1] for l in capsys.readouterr().out.splitlines()[1:]] == ["1", "2", "3"]
