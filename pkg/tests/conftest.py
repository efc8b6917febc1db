import sys

import pytest

from symdiv.distributions import PairSampler, make_distribution, sample_corpus

STANDARD_SEED = 42
STANDARD_PAIRS = 10_000


def rel_close(a, b, rel, floor=1e-300):
    """|a - b| <= rel * max(|a|, |b|), with a tiny absolute floor for zeros."""
    return abs(a - b) <= rel * max(abs(a), abs(b)) + floor


@pytest.fixture(scope="session")
def worked_pair():
    return make_distribution([0.5, 0.5]), make_distribution([0.25, 0.75])


@pytest.fixture(scope="session")
def corpus_1000():
    return [(p, q) for _, p, q in sample_corpus(PairSampler(seed=1), 1000)]


@pytest.fixture(scope="session")
def corpus_standard():
    return list(sample_corpus(PairSampler(seed=STANDARD_SEED), STANDARD_PAIRS))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
