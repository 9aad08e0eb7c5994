from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from multiexec.dclabels import DCLattice  # noqa: E402
from multiexec.lattices import (Discrete, Exponential, HSum, NatChain, Powerset, Product,  # noqa: E402
                                TruncatedPowerset, TwoPoint, VSum, principals)

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def small_lattices():
    """One small instance of every lattice family, keyed by a readable id."""
    return {
        "two-point": TwoPoint(),
        "nat": NatChain(),
        "discrete4": Discrete(principals(4)),
        "powerset4": Powerset(principals(4)),
        "trunc2-4": TruncatedPowerset(2, principals(4)),
        "product": Product(TwoPoint(), Powerset(principals(2))),
        "nat2": Product(NatChain(), NatChain()),
        "vsum": VSum(Discrete(principals(2)), Powerset(principals(2))),
        "hsum": HSum(TwoPoint(), Powerset(principals(2))),
        "exp": Exponential(Discrete(principals(3))),
        "dc2": DCLattice.of_size(2),
        "dc3": DCLattice.of_size(3),
    }


LATTICES = small_lattices()


def label_strategy(L):
    if L.size() is not None and L.size() <= 2000:
        return st.sampled_from(L.elements())
    return st.randoms(use_true_random=False).map(L.sample)


@pytest.fixture
def rng():
    return random.Random(1234)


# one PASS/FAIL line per acceptance criterion, printed at the end of the run
_CRITERIA: dict[str, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for mark in report.keywords:
        if mark.startswith("criterion_"):
            _CRITERIA.setdefault(mark, []).append(report.passed)


def pytest_configure(config):
    for i in range(1, 12):
        config.addinivalue_line("markers", f"criterion_{i}: acceptance criterion {i}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split("_")[1])):
        results = _CRITERIA[key]
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(
            f"criterion {key.split('_')[1]:>2}: {status} ({sum(results)}/{len(results)} checks)")
