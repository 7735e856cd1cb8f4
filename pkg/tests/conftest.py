import pytest

from conemono.classify import ClassifyParams
from conemono.gallery import gallery_generate

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion; echoed in the summary."""

    def log(number, title, ok, detail=""):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def params():
    return ClassifyParams()


@pytest.fixture(scope="session")
def gallery():
    cache = {}

    def get(name, nx=65, **kw):
        key = (name, nx, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = gallery_generate(name, nx=nx, **kw)
        return cache[key]

    return get
