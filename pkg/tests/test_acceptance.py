"""The fourteen acceptance criteria, each at its stated tolerance."""
import pytest

from equiaffine.verification import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=[f"{n:02d}-{CRITERIA[n][0].replace(' ', '-')}"
                                                            for n in sorted(CRITERIA)])
def test_criterion(number, report_acceptance):
    result = run_criterion(number)
    print(result.line())
    for check in result.checks:
        print(f"    {check.label}: {check.measured:.3e} ({check.kind} {check.tolerance:.1e})")
    report_acceptance(result.line())
    failing = [c.label for c in result.checks if not c.passed]
    assert result.passed, f"criterion {number} failed: {failing}"
