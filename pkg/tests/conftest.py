import itertools

import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    def record(criterion, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def brute_force(t, y, lam, symbols=(0.0, -1.0, 1.0)):
    """Scalar-loop enumeration of every candidate; returns (best_x, best_value, table)."""
    t = np.asarray(t, dtype=float)
    m, k = t.shape
    table = []
    for cand in itertools.product(symbols, repeat=k):
        value = 0.0
        for i in range(m):
            r = y[i]
            for j in range(k):
                r -= t[i][j] * cand[j]
            value += r * r
        value += lam * sum(1 for c in cand if c != 0)
        table.append((cand, value))
    best = min(v for _, v in table)
    for cand, v in table:
        if v <= best + 1e-10 * (1 + abs(best)):
            return np.array(cand), v, table
