from __future__ import annotations

import pytest

from artinflat import AlgebraMorphism, compile_text


@pytest.fixture
def dual_numbers_sq():
    """F_2[x,y]/(x^2, y^2)."""
    return compile_text("F_2[x,y]/(x^2, y^2)")


@pytest.fixture
def flat_pair():
    """F_2[s]/(s^2) -> F_2[x]/(x^4), s -> x^2."""
    A = compile_text("F_2[s]/(s^2)")
    B = compile_text("F_2[x]/(x^4)")
    return A, B, AlgebraMorphism.from_images(A, B, [B.element("x^2")])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
