import pytest

from truthhyp.data import ClaimDataset, Mode
from truthhyp.generator import GeneratorConfig, generate

_acceptance = []


@pytest.fixture
def toy():
    return ClaimDataset([("s1", "o1", "a"), ("s2", "o1", "a"), ("s3", "o1", "b")])


@pytest.fixture
def small_single():
    # two objects, one dissenter per object
    return ClaimDataset([
        ("s1", "o1", "a"), ("s2", "o1", "a"), ("s3", "o1", "b"),
        ("s1", "o2", "x"), ("s2", "o2", "y"), ("s3", "o2", "y"),
    ])


@pytest.fixture
def children():
    """Several sources listing a person's children."""
    rows = []
    for s, kids in {
        "s1": ["Anna", "Tim"],
        "s2": ["Anna", "Tim", "Lucas"],
        "s3": ["Anna"],
        "s4": ["Anna", "Tim", "Bob"],
    }.items():
        rows.extend((s, "tom", k) for k in kids)
    rows += [("s1", "ann", "Joe"), ("s2", "ann", "Joe"), ("s3", "ann", "Max"), ("s4", "ann", "Joe")]
    return ClaimDataset(rows, Mode.MULTI)


@pytest.fixture(scope="session")
def corpus_factory():
    cache = {}

    def make(gt_dist="80P", seed=0, **kw):
        key = (gt_dist, seed, tuple(sorted(kw.items())))
        if key not in cache:
            cfg = GeneratorConfig(num_sources=kw.pop("num_sources", 30),
                                  num_objects=kw.pop("num_objects", 80),
                                  values_per_object=kw.pop("values_per_object", 6),
                                  gt_dist=gt_dist, seed=seed, **kw)
            cache[key] = generate(cfg)
        return cache[key]

    return make


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        detail = [ln for ln in report.capstdout.splitlines() if ln.startswith("criterion")]
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, report.duration,
                            detail[-1] if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration, detail in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({duration:.2f}s)  {detail.split('  ', 1)[-1]}")
