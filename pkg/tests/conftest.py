from __future__ import annotations

from hypothesis import HealthCheck, settings

settings.register_profile("nevlab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nevlab")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in sorted(RESULTS, key=lambda r: int(r.key)):
            terminalreporter.write_line(r.line())
