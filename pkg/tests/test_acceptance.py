"""Acceptance criteria, one test each, at their stated tolerances and runtime budgets.

Each test records a ``[PASS]``/``[FAIL]`` line that is printed in the pytest
terminal summary; ``python tests/test_acceptance.py`` prints the same lines.
"""
from __future__ import annotations

import time

import pytest

from fds3.models import MODEL_NAMES, make_model
from fds3.verify import (
    ORACLE_CASES,
    RECIPROCITY_PAIRS,
    canonical_suite,
    catmap_suite,
    cocycle_suite,
    lattice_suite,
    oracle_suite,
    periods_suite,
    reciprocity_suite,
    stability_suite,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from outside tests/
    ACCEPTANCE_LINES = []


def _report(number: int, title: str, checks, elapsed: float, budget: float | None = None, extra: bool = True) -> None:
    failed = [c for c in checks if not c.passed]
    worst = max((c.residual for c in checks), default=0.0)
    ok = not failed and extra and (budget is None or elapsed < budget)
    timing = f"{elapsed:.2f}s" + (f" (< {budget:g}s)" if budget is not None else "")
    line = (f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: "
            f"{len(checks) - len(failed)}/{len(checks)} checks, worst residual {worst:.2e}, {timing}")
    ACCEPTANCE_LINES.append(line)
    print(line)
    for c in failed:
        print(f"    failed: {c.name} residual={c.residual:.3e} tolerance={c.tolerance:g}")
    assert not failed, [c.name for c in failed]
    assert extra
    if budget is not None:
        assert elapsed < budget, f"{elapsed:.2f}s exceeds {budget}s"


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_1_cat_map_counts():
    checks, dt = _timed(catmap_suite, 6)
    _report(1, "cat map fixed points and counts n=1..6", checks, dt, 1.0)


def test_criterion_2_canonical_form():
    checks, dt = _timed(canonical_suite, 10_000)
    two_flows = all(len(make_model(name).flows) == 2 for name in MODEL_NAMES)
    _report(2, "canonical form on all five models", checks, dt, 10.0, two_flows)


def test_criterion_3_period_groups():
    checks, dt = _timed(periods_suite)
    _report(3, "period groups", checks, dt, 5.0, len(checks) == len(MODEL_NAMES))


def test_criterion_4_flag_direct_equivalence():
    assert len(ORACLE_CASES) >= 12
    assert {c[0] for c in ORACLE_CASES} == {"product", "rotation"}
    checks, dt = _timed(oracle_suite, ORACLE_CASES, 1, 16)
    _report(4, f"flag = direct on {len(ORACLE_CASES)} cases", checks, dt, 60.0)


def test_criterion_5_reciprocity():
    n_product = sum(p[0] == "product" for p in RECIPROCITY_PAIRS)
    n_rotation = sum(p[0] == "rotation" for p in RECIPROCITY_PAIRS)
    checks, dt = _timed(reciprocity_suite, RECIPROCITY_PAIRS)
    _report(5, f"reciprocity on {n_product} product and {n_rotation} rotation pairs", checks, dt, 120.0,
            n_product >= 6 and n_rotation >= 3)


def test_criterion_6_stability():
    checks, dt = _timed(stability_suite, ORACLE_CASES, 0.1, 16, 1000)
    _report(6, "tube radius, refinement and index map independence", checks, dt)


def test_criterion_7_cocycles():
    checks, dt = _timed(cocycle_suite, 5, 4, ORACLE_CASES)
    _report(7, "cocycle validity, flag counts, Euler characteristic", checks, dt)


def test_criterion_8_lattice_round_trip():
    checks, dt = _timed(lattice_suite, 1000, 1000)
    _report(8, "lattice reduction round trip", checks, dt)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
