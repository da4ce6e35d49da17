"""Collects acceptance-criterion outcomes and prints one line per criterion."""
from __future__ import annotations

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> bool:
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed = prev[0] and passed
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[number] = (passed, detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
