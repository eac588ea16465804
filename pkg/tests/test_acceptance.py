"""One test per acceptance criterion, each at its stated tolerance."""

import math
import time

from torsionlab.suites import (
    DEFAULTS,
    filtration_run,
    limtf_run,
    run_suite,
    scalar_values,
    suite_convergence,
)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _worst(report):
    return max(r.residual for r in report.records)


def test_c01_scalar_metric_change(verdict):
    vals, wall = _timed(lambda: scalar_values(1e-10))
    err = max(abs(v + 0.5 * math.log(r)) for r, v in vals.items())
    ok = err <= 1e-9 and wall < 1.0
    verdict("1 scalar metric change", ok, f"max |T + 1/2 ln r| = {err:.2e} (tol 1e-9), {wall:.2f} s (< 1 s)")
    assert ok


def test_c02_anomaly_t1(verdict):
    report, wall = _timed(lambda: run_suite("anomaly"))
    rec = report.records[0]
    ok = rec.residual <= 1e-6 and wall < 60.0
    verdict("2 dT = f on T^1, grid 64", ok,
            f"residual {rec.residual:.2e} (tol 1e-6) against |f| = {rec.scale:.2f}, {wall:.2f} s (< 60 s)")
    assert ok


def test_c03_mod4_vanishing(verdict):
    rec = run_suite("mod4").records[0]
    ok = rec.residual <= 1e-9
    verdict("3 mod-4 vanishing, real data on T^2, grid 32", ok, f"sup |T^[2]| = {rec.residual:.2e} (tol 1e-9)")
    assert ok


def test_c04_filtration_independence(verdict):
    a, b = filtration_run(32, 1e-9)
    diff, size = abs(a - b), max(abs(a), abs(b))
    # the values themselves must be far above the tolerance for the check to mean anything
    ok = diff <= 1e-6 and size > 100 * 1e-6
    verdict("4 filtration independence", ok, f"|difference| = {diff:.2e} (tol 1e-6), values {a.real:.6e}, {b.real:.6e}")
    assert ok


def test_c05_exact_sequence_compatibility(verdict):
    a, b = limtf_run(32, 1e-9)
    diff, size = abs(a - b), max(abs(a), abs(b))
    ok = diff <= 1e-6 and size > 100 * 1e-6
    verdict("5 exact-sequence compatibility", ok,
            f"|difference| = {diff:.2e} (tol 1e-6), values {a.real:.6e}, {b.real:.6e}")
    assert ok


def test_c06_main_theorem(verdict):
    report, wall = _timed(lambda: run_suite("circle"))
    worst = _worst(report)
    ok = report.passed and worst <= 1e-10 and wall < 10.0
    verdict("6 main-theorem residuals, n <= 12, degrees <= 7, k = 1 value", ok,
            f"worst {worst:.2e} (tol 1e-10), {wall:.2f} s (< 10 s)")
    assert ok


def test_c07_induction(verdict):
    report = run_suite("induction")
    worst = _worst(report)
    ok = worst <= 1e-10
    verdict("7 induction / distribution relation, n <= 8, 2 <= s <= 7", ok, f"worst {worst:.2e} (tol 1e-10)")
    assert ok


def test_c08_triviality(verdict):
    report = run_suite("triviality")
    worst = _worst(report)
    ok = worst == 0.0
    verdict("8 triviality at alpha = 1", ok, f"max |odd coefficient| = {worst!r} (exactly 0 required)")
    assert ok


def test_c09_special_functions(verdict):
    report = run_suite("specialfn")
    worst = _worst(report)
    ok = worst <= 1e-12
    verdict("9 zeta'(-2), Li_2(1), Li_3(1) + Li_3(-1)", ok, f"worst {worst:.2e} (tol 1e-12)")
    assert ok


def test_c10_convergence(verdict):
    records = suite_convergence()
    bad = [r.name for r in records if not r.passed]
    worst = max(r.residual / r.tolerance for r in records)
    ok = not bad
    verdict("10 grid doubling and tol halving for criteria 1-5", ok,
            f"{len(records)} comparisons, worst change {worst:.1e} x its tolerance" + (f"; failed: {bad}" if bad else ""))
    assert ok
    assert set(DEFAULTS) >= {"scalar", "anomaly", "mod4", "filtration", "limtf"}
