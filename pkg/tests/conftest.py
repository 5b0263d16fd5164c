import numpy as np
import pytest

ACCEPTANCE = {}


def record_criterion(number, title, part, ok, detail):
    ACCEPTANCE.setdefault(number, {"title": title, "parts": []})["parts"].append(
        (part, bool(ok), detail)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        ok = all(p[1] for p in entry["parts"])
        terminalreporter.write_line(f"C{number} {'PASS' if ok else 'FAIL'}  {entry['title']}")
        for part, part_ok, detail in entry["parts"]:
            terminalreporter.write_line(f"    [{'ok' if part_ok else 'FAIL'}] {part}: {detail}")
