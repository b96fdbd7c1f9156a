import sys
from pathlib import Path

import pytest

from conpat import kernels

sys.path.insert(0, str(Path(__file__).parent))


def pytest_addoption(parser):
    parser.addoption(
        "--kernel-backend",
        choices=("cython", "python"),
        default=None,
        help="force the kernel backend for the whole run",
    )


def pytest_configure(config):
    name = config.getoption("--kernel-backend")
    if name is not None:
        kernels.set_backend(name)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test once per importable kernel backend."""
    previous = kernels.get_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record(request):
    """Store a one-line verdict for an acceptance criterion."""

    def _record(ok: bool, detail: str) -> None:
        _ACCEPTANCE[request.node.name] = (bool(ok), detail)

    return _record


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and report.when == "call" and report.failed:
        prev = _ACCEPTANCE.get(name, (False, ""))
        _ACCEPTANCE[name] = (False, prev[1] or str(report.longrepr).splitlines()[-1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
