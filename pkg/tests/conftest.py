from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _criteria.append((props["criterion"], props["title"], report.passed, report.duration, props["limit"]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, secs, limit in sorted(_criteria):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2} {verdict}  {title}  ({secs:.2f}s, limit {limit}s)")
