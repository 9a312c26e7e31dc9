"""Acceptance criteria 1-11, one test each, at the stated tolerances.

Each test prints its PASS/FAIL line immediately, and the lines are repeated
as one block in the terminal summary.  Run this file as a script for the
plain report.
"""
import xml.etree.ElementTree as ET

import pytest

from birkhoff import verify

RESULTS = {}


@pytest.mark.parametrize("number", sorted(verify.CRITERIA))
def test_criterion(number, tmp_path, capsys):
    if number == 5:
        svg = tmp_path / "gamma.svg"
        check = verify.CRITERIA[5](svg)
        ET.fromstring(svg.read_bytes())
    else:
        check = verify.CRITERIA[number]()
    RESULTS[number] = check
    with capsys.disabled():
        print(f"\n{check.line()}", end=" ")
    assert check.passed, check.line()


if __name__ == "__main__":
    import sys

    checks = verify.run_acceptance()
    print(verify.format_report(checks))
    sys.exit(0 if all(c.passed for c in checks) else 1)
