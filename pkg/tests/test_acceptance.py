"""The nine acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line, and the module repeats all of them in
a block at the end of the terminal report.
"""

import pytest

from nashlab.acceptance import CRITERIA, run_criterion

_lines: dict[int, str] = {}


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    if _lines:
        body = "\n".join(_lines[k] for k in sorted(_lines))
        tr = request.config.pluginmanager.get_plugin("terminalreporter")
        if tr is not None:
            tr.write_line("")
            tr.write_line("acceptance report:")
            for ln in body.splitlines():
                tr.write_line(ln)


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    r = run_criterion(number)
    _lines[number] = r.line()
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.line()
