import os

from hypothesis import settings

settings.register_profile("default", deadline=None, derandomize=True, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance bookkeeping: criterion number -> list of test outcomes
_CRITERIA: dict[int, list[bool]] = {}
_NAMES: dict[int, str] = {}
_ITEMS: dict[str, int] = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        n = mark.args[0]
        _ITEMS[item.nodeid] = n
        _NAMES.setdefault(n, getattr(item.module, "CRITERIA", {}).get(n, ""))
        _CRITERIA.setdefault(n, [])


def pytest_runtest_logreport(report):
    n = _ITEMS.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed:
        _CRITERIA[n].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        status = "PASS" if results and all(results) else ("NOT RUN" if not results else "FAIL")
        terminalreporter.write_line(f"criterion {n}: {status} ({sum(results)}/{len(results)} checks) {_NAMES[n]}")
