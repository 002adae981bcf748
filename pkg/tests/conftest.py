import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def golden():
    """Oracle values frozen by ``casimir-roughness oracle``; see the ``grid`` keys."""
    with open(FIXTURES / "golden.json") as fh:
        return json.load(fh)["values"]


@pytest.fixture
def record(request):
    """Log one ``criterion N: PASS|FAIL`` line, then assert the criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def _record(n: int, ok: bool, detail: str) -> None:
        lines.append(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
