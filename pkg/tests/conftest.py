"""Per-criterion PASS/FAIL summary for the acceptance suite."""

import pytest

_RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    key, title = mark.args
    entry = _RESULTS.setdefault(key, {"title": title, "parts": []})
    passed = rep.passed and not hasattr(rep, "wasxfail")
    detail = getattr(item, "acceptance_detail", "")
    entry["parts"].append((item.name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        entry = _RESULTS[key]
        ok = all(p for _, p, _ in entry["parts"])
        tr.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {entry['title']}")
        for name, passed, detail in entry["parts"]:
            if detail or not passed:
                tr.write_line(f"    [{'ok' if passed else 'FAILED'}] {name}: {detail}")
