import time

import pytest


def pytest_addoption(parser):
    parser.addoption("--allow-long", action="store_true", default=False,
                     help="run the desk-scale three-party enumerations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--allow-long"):
        return
    skip = pytest.mark.skip(reason="long run, enable with --allow-long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


# acceptance bookkeeping: one line per criterion in the terminal summary

_RESULTS: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when != "call" and not (rep.skipped or rep.failed):
        return
    num, text = mark.args
    entry = _RESULTS.setdefault(num, {"text": text, "states": []})
    state = "FAIL" if rep.failed else "SKIP" if rep.skipped else "PASS"
    entry["states"].append((item.name, state))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        entry = _RESULTS[num]
        states = [s for _, s in entry["states"]]
        if "FAIL" in states:
            verdict = "FAIL"
        elif "PASS" in states:
            verdict = "PASS" if "SKIP" not in states else "PASS (long part skipped)"
        else:
            verdict = "SKIP"
        tr.write_line(f"criterion {num:2d}: {verdict:24s} {entry['text']}")
        for name, state in entry["states"]:
            if state != "PASS":
                tr.write_line(f"    {state}: {name}")


@pytest.fixture
def budget():
    """``with budget(seconds): ...`` asserts the block finishes in time."""
    class _Budget:
        def __init__(self, seconds):
            self.seconds = seconds

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            self.elapsed = time.perf_counter() - self.start
            if exc_type is None:
                assert self.elapsed < self.seconds, \
                    f"took {self.elapsed:.2f}s, budget {self.seconds}s"
    return _Budget


@pytest.fixture(scope="session")
def ns3_rays():
    from bellcone.scenario import ns_extreme_rays
    return ns_extreme_rays(3)


@pytest.fixture(scope="session")
def b3_facets():
    from bellcone.scenario import bell_facets
    return bell_facets(3)
