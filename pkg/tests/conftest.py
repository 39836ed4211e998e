from __future__ import annotations

import pytest

from skytrees import parse_query

FIX1 = "<a><b><c/><d><e/></d><f/></b></a>"
FIX2 = "<a><b><c/><e/><f/></b></a>"
FIX3 = "<a><b><c/><e/><f/></b><b><c/><d><e/></d><f/></b></a>"
# d holding both e and f, behind a first b that lacks d
TRACE_DOC = "<a><b><c/></b><b><c/><d><e/><f/></d></b></a>"
Q1 = "a[/b[/c]/d?[/e?]/f]"

SEC41_QUERIES = [
    ("SigmodRecord[/issue[/volume?/15?]/articles/article/authors/author/Sophie Cluet]", 2),
    ("/authors[/author/Sergey Brin]/author/Rajeev Meitwani?", 1),
    ("table[/T[/INT/P_BRAND/Brand#13?]/P_CONTAINER/SM_CASE]", 1),
    ("table[/T[/P_TYPE/LARGE?]/[P_SIZE/10]/P_CONTAINER/MED_BOX?]", 2),
    ("a[/b[/c]/d?[/e?]/f]", 2),
    ("a[/b[/c]/d?[/e]/f]", 1),
]


@pytest.fixture
def q1():
    return parse_query(Q1)


# acceptance reporting: one line per criterion at the end of the run

_criteria: dict[int, tuple[str, list[str]]] = {}
_notes: dict[int, list[str]] = {}


@pytest.fixture
def note(request):
    """Attach a measurement to the running criterion's summary line."""
    number = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _notes.setdefault(number, []).append(text)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _, outcomes = _criteria.setdefault(number, (title, []))
    outcomes.append("passed" if call.excinfo is None else "failed")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        verdict = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
        for text in _notes.get(number, []):
            terminalreporter.write_line(f"    {text}")
