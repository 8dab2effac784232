from hypothesis import settings

settings.register_profile("wittkit", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("wittkit")

_ACCEPTANCE: list[str] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "acceptance":
            _ACCEPTANCE.append(f"{'PASS' if report.passed else 'FAIL'}  {value}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
