"""Shared fixtures and the acceptance-criteria summary printer."""

from __future__ import annotations

import pathlib

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
SPEC_DIR = REPO_ROOT / "specs"
GOLDEN_DIR = pathlib.Path(__file__).resolve().parent / "golden"

# (criterion number, short description, passed) filled by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []

# free-form findings that are reported but not asserted
ACCEPTANCE_NOTES: list[str] = []


def record_criterion(number: int, description: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.append((number, description, passed))


def record_note(text: str) -> None:
    ACCEPTANCE_NOTES.append(text)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number:2d}: {description}")
    for note in ACCEPTANCE_NOTES:
        terminalreporter.write_line(f"[NOTE] {note}")


@pytest.fixture(scope="session")
def spec_dir() -> pathlib.Path:
    return SPEC_DIR
