import os

# fix the thread pool before numba is imported so every test sees 4 workers
os.environ.setdefault("NUMBA_NUM_THREADS", "4")

from hypothesis import HealthCheck, settings  # noqa: E402

settings.register_profile("rieszpol", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("rieszpol")

# criterion number -> (passed, detail); filled by test_acceptance
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
