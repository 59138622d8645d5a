"""One PASS/FAIL line per acceptance criterion, with wall time against its budget.

Runs the full reproduction summary once under the default seed.  Also
runnable directly: ``python3 tests/test_acceptance.py``.
"""

import pytest

from blowup_csc.suite import DISCREPANCY, paper_suite

CRITERIA = [str(k) for k in range(1, 11)]


@pytest.fixture(scope="module")
def rows():
    return {r.key: r for r in paper_suite()}


def verdict_line(row) -> tuple[bool, str]:
    ok = row.ok and row.runtime_s <= row.budget_s
    tag = "PASS" if ok else "FAIL"
    extra = " [discrepancy documented]" if row.status == DISCREPANCY else ""
    line = (f"{tag} criterion {row.key:>9}: {row.claim} "
            f"({row.runtime_s:.2f} s of {row.budget_s:g} s){extra}")
    return ok, line


def test_all_criteria_present(rows):
    assert set(CRITERIA) <= set(rows)


@pytest.mark.parametrize("key", CRITERIA + ["7-leading"])
def test_criterion(rows, key, capsys):
    ok, line = verdict_line(rows[key])
    with capsys.disabled():
        print("\n" + line)
        if rows[key].note:
            print(f"    note: {rows[key].note}")
    assert ok, rows[key].to_dict()


if __name__ == "__main__":
    results = paper_suite()
    for r in results:
        print(verdict_line(r)[1])
        if r.note:
            print(f"    note: {r.note}")
