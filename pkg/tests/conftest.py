"""Shared pytest wiring: print one verdict line per acceptance criterion."""

_config = None


def pytest_configure(config):
    global _config
    _config = config


def pytest_runtest_logreport(report):
    # acceptance tests are named test_criterion_NN_label; echo an
    # uncaptured PASS/FAIL line for each so the verdicts survive -q runs
    if _config is None:
        return
    reporter = _config.pluginmanager.get_plugin("terminalreporter")
    if reporter is None:
        return
    name = report.nodeid.rsplit("::", 1)[-1].split("[")[0]
    if not name.startswith("test_criterion_"):
        return
    failed_setup = report.when == "setup" and not report.passed
    if report.when != "call" and not failed_setup:
        return
    tag = name[len("test_criterion_"):]
    num, _, label = tag.partition("_")
    verdict = "PASS" if report.passed else "FAIL"
    reporter.write_line(
        f"criterion {num} ({label.replace('_', ' ')}): {verdict}"
    )
