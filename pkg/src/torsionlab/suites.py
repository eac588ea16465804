"""Named verification suites and the deterministic test data they run on."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circle_model import (
    EVEN,
    bl_coefficient,
    check_induction_axiom,
    continuity_modulus,
    check_continuity_axiom,
    main_theorem_residual_for_degree,
    main_theorem_sides,
)
from .datafiles import bundled_complex
from .exterior import DifferentialForm, TorusBase, exterior_d, harmonic_coefficients
from .flat_bundle import FlatBundleData, MetricFamily, graded_odd_char_form
from .special_fn import RootOfUnity, polylog, zeta_prime_neg_even
from .torsion import (
    FiltrationData,
    FlatComplexWithMetrics,
    graded_torsion_class,
    metric_change_torsion,
    torsion_class_rep,
    torsion_form,
)

# Known constants used as golden values.
ZETA3 = 1.2020569031595942854
ZETA_PRIME_M2 = -0.030448457058393270

DEFAULTS = {
    "scalar": 1e-9,
    "anomaly": 1e-6,
    "mod4": 1e-9,
    "filtration": 1e-6,
    "limtf": 1e-6,
    "circle": 1e-10,
    "induction": 1e-10,
    "triviality": 0.0,
    "specialfn": 1e-12,
    "continuity": 0.0,
}


@dataclass
class CheckRecord:
    name: str
    anchor: str
    residual: float
    tolerance: float
    wall_time: float = 0.0
    # size of the compared quantities, when a residual alone could hide a vacuous check
    scale: float | None = None

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "anchor": self.anchor,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        if self.scale is not None:
            out["scale"] = float(self.scale)
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


@dataclass
class SuiteReport:
    suite: str
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self, timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "checks": [r.to_json(timing) for r in self.records],
        }


# -- test data ----------------------------------------------------------------

def default_modes(dim: int) -> tuple[tuple[int, ...], ...]:
    """Fourier modes for test metrics.  On T^2 they contain a resonant triad
    (1,0) + (0,1) = (1,1); without one the degree-2 harmonic parts vanish to
    leading order and the torus identities would be checked against zero."""
    if dim == 1:
        return ((1,), (2,), (3,))
    if dim == 2:
        return ((1, 0), (0, 1), (1, 1))
    return tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))


def band_limited_metric(
    base: TorusBase,
    rank: int,
    seed: int,
    amplitude: float = 1.0,
    modes=None,
    real: bool = False,
) -> MetricFamily:
    """g = c exp(H) with H = sum_k S_k cos(k.x) + T_k sin(k.x), S_k, T_k Hermitian.

    ||H|| <= amplitude.  exp(H) is entire in H, so g stays spectrally resolved
    on moderate grids.  With ``real`` the S_k, T_k are real symmetric and g is
    real.
    """
    rng = np.random.default_rng(seed)
    scale = float(rng.uniform(0.5, 2.0))

    def herm():
        a = rng.normal(size=(rank, rank)) + (0 if real else 1j * rng.normal(size=(rank, rank)))
        h = a + np.conj(a.T)
        return h / np.linalg.norm(h, 2)

    modes = default_modes(base.dim) if modes is None else modes
    h = np.zeros(base.shape + (rank, rank), dtype=complex)
    xs = base.coords()
    weight = amplitude / (2 * max(len(modes), 1))
    for mode in modes:
        s, t = herm(), herm()
        phase = sum(k * x for k, x in zip(mode, xs)) if base.dim else np.zeros(())
        h = h + weight * (np.cos(phase)[..., None, None] * s + np.sin(phase)[..., None, None] * t)
    if base.dim == 0:
        h = h + 0.5 * amplitude * herm()
    w, v = np.linalg.eigh(h)
    g = scale * (v * np.exp(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    if real:
        g = g.real
    return MetricFamily(base, rank, g)


def exact_complex_121(base: TorusBase, seed: int, real: bool = False, **metric_kw) -> FlatComplexWithMetrics:
    """0 -> C -> C^2 -> C -> 0 with boundary a and (a_2, -a_1) and varying metrics."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=2) + (0 if real else 1j * rng.normal(size=2))
    d0 = a.reshape(2, 1)
    d1 = np.array([[a[1], -a[0]]])
    metrics = tuple(band_limited_metric(base, r, seed * 10 + k + 1, real=real, **metric_kw) for k, r in enumerate((1, 2, 1)))
    return FlatComplexWithMetrics(base, (1, 2, 1), (d0, d1), metrics)


def random_full_flag(rank: int, seed: int, real: bool = False) -> FiltrationData:
    rng = np.random.default_rng(seed)
    basis = rng.normal(size=(rank, rank)) + (0 if real else 1j * rng.normal(size=(rank, rank)))
    mets = tuple(np.array([[rng.uniform(0.5, 2.0)]]) for _ in range(rank))
    return FiltrationData(tuple(basis[:, :j] for j in range(1, rank + 1)), mets)


def scalar_complex(r: float) -> FlatComplexWithMetrics:
    base = TorusBase.point()
    return FlatComplexWithMetrics(
        base, (1, 1), (np.eye(1),), (MetricFamily.constant(base, [[1.0]]), MetricFamily.constant(base, [[r]]))
    )


# -- computations shared by the suites and the convergence study ---------------

SCALAR_RS = (0.5, 2.0, 10.0)
T1_GRID, T2_GRID = 64, 32


def scalar_values(tol: float) -> dict[float, float]:
    base = TorusBase.point()
    one = MetricFamily.constant(base, [[1.0]])
    return {r: float(metric_change_torsion(one, MetricFamily.constant(base, [[r]]), tol).form.component(()).real)
            for r in SCALAR_RS}


def anomaly_run(grid: int, tol: float):
    cx = bundled_complex("t1_anomaly", grid)
    res = torsion_form(cx, tol)
    f = graded_odd_char_form(cx.bundles())
    residual = (exterior_d(res.form) - f).sup_norm()
    return res.form, residual, f.sup_norm()


def mod4_run(grid: int, tol: float) -> float:
    cx = exact_complex_121(TorusBase(2, grid), seed=21, real=True, amplitude=2.0)
    return torsion_form(cx, tol).form.degree_part(2).sup_norm()


def _harmonic_top(form: DifferentialForm) -> complex:
    return harmonic_coefficients(form).get((0, 1), 0j)


def filtration_run(grid: int, tol: float) -> tuple[complex, complex]:
    base = TorusBase(2, grid)
    bundle = FlatBundleData.with_metric(band_limited_metric(base, 3, seed=31, amplitude=2.0))
    reps = [torsion_class_rep(bundle, random_full_flag(3, seed), tol) for seed in (32, 33)]
    return _harmonic_top(reps[0]), _harmonic_top(reps[1])


def limtf_run(grid: int, tol: float) -> tuple[complex, complex]:
    cx = exact_complex_121(TorusBase(2, grid), seed=41, amplitude=2.0)
    lhs = _harmonic_top(torsion_form(cx, tol).form.positive_part())
    items = [(k, FlatBundleData.with_metric(g), random_full_flag(g.rank, 42 + k)) for k, g in enumerate(cx.metrics)]
    rhs = _harmonic_top(graded_torsion_class(items, tol))
    return lhs, rhs


# -- suites ---------------------------------------------------------------------

def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def suite_scalar(tol: float) -> list[CheckRecord]:
    vals, wall = _timed(lambda: scalar_values(min(tol, 1e-10)))
    return [CheckRecord(f"scalar metric change r={r:g}", "T = -1/2 log r", abs(v + 0.5 * math.log(r)), tol, wall / 3)
            for r, v in vals.items()]


def suite_anomaly(tol: float) -> list[CheckRecord]:
    (form, residual, fnorm), wall = _timed(lambda: anomaly_run(T1_GRID, 1e-9))
    return [CheckRecord(f"dT = f on the bundled T^1 example, ranks (1,2,1), grid {T1_GRID}", "dT = f", residual, tol, wall,
                        scale=fnorm)]


def suite_mod4(tol: float) -> list[CheckRecord]:
    top, wall = _timed(lambda: mod4_run(T2_GRID, 1e-10))
    return [CheckRecord(f"degree-2 part vanishes for real data on T^2, grid {T2_GRID}", "mod 4 vanishing", top, tol, wall)]


def suite_filtration(tol: float) -> list[CheckRecord]:
    (a, b), wall = _timed(lambda: filtration_run(T2_GRID, 1e-9))
    return [CheckRecord("two full flags, rank 3 on T^2: harmonic degree-2 parts", "filtration independence",
                        abs(a - b), tol, wall, scale=max(abs(a), abs(b)))]


def suite_limtf(tol: float) -> list[CheckRecord]:
    (a, b), wall = _timed(lambda: limtf_run(T2_GRID, 1e-9))
    return [CheckRecord("graded class vs positive part of torsion form, (1,2,1) on T^2", "exact sequence compatibility",
                        abs(a - b), tol, wall, scale=max(abs(a), abs(b)))]


def suite_circle(tol: float) -> list[CheckRecord]:
    t0 = time.perf_counter()
    worst, where = 0.0, ""
    for n in range(1, 13):
        for j in range(n):
            alpha = RootOfUnity(j, n)
            for m in range(1, 8):
                r = main_theorem_residual_for_degree(alpha, n, m)
                if r > worst or not where:
                    worst, where = r, f"j/n={j}/{n}, degree {m}"
    wall = time.perf_counter() - t0
    records = [CheckRecord(f"main theorem, all alpha with n <= 12, degrees 1..7 (worst at {where})", "main theorem",
                           worst, tol, wall)]
    one = RootOfUnity(0, 1)
    lhs, rhs = main_theorem_sides(one, 1, 1, EVEN)
    target = -ZETA3 / (4 * math.pi**2)
    records.append(CheckRecord("k = 1, alpha = 1: both sides equal -zeta(3)/(4 pi^2)", "main theorem, k = 1",
                               max(abs(lhs - target), abs(rhs - target)), tol))
    worst_k1 = 0.0
    for n in range(1, 13):
        for j in range(n):
            alpha = RootOfUnity(j, n)
            l1, r1 = main_theorem_sides(alpha, n, 1, EVEN)
            t1 = -polylog(3, alpha.value).real / (4 * math.pi**2)
            worst_k1 = max(worst_k1, abs(l1 - t1), abs(r1 - t1))
    records.append(CheckRecord("k = 1, all alpha: both sides equal -Re Li_3(alpha)/(4 pi^2)", "main theorem, k = 1",
                               worst_k1, tol))
    return records


def suite_induction(tol: float) -> list[CheckRecord]:
    t0 = time.perf_counter()
    worst = max(check_induction_axiom(n, s) for n in range(1, 9) for s in range(2, 8))
    return [CheckRecord("covering identity and distribution relation, n <= 8, 2 <= s <= 7", "induction axiom",
                        worst, tol, time.perf_counter() - t0)]


def suite_triviality(tol: float) -> list[CheckRecord]:
    one = RootOfUnity(0, 1)
    worst = max(abs(bl_coefficient(one, k)) for k in range(1, 16, 2))
    return [CheckRecord("alpha = 1: BL odd-degree coefficients, k <= 15", "triviality axiom", worst, tol)]


def suite_specialfn(tol: float) -> list[CheckRecord]:
    li3 = polylog(3, 1.0) + polylog(3, -1.0)
    return [
        CheckRecord("zeta'(-2) via the zeta identity", "zeta'(-2)", abs(zeta_prime_neg_even(1) - ZETA_PRIME_M2), tol),
        CheckRecord("Li_2(1) = pi^2/6", "Li_2(1)", abs(polylog(2, 1.0) - math.pi**2 / 6), tol),
        CheckRecord("Li_3(1) + Li_3(-1) = zeta(3)/4", "distribution relation n=2, s=3", abs(li3 - ZETA3 / 4), tol),
    ]


def suite_continuity(tol: float) -> list[CheckRecord]:
    records = []
    for k in (1, 2, 3):
        roots = [RootOfUnity(j, 1024) for j in range(1024)]
        h = 2 * math.pi / 1024
        dev = check_continuity_axiom(k, roots, delta=h * 1.0001)
        records.append(CheckRecord(f"continuity k={k}: adjacent 1024th roots within modulus",
                                   "continuity axiom", dev - continuity_modulus(k, h), tol))
    return records


def suite_convergence(tol: float | None = None) -> list[CheckRecord]:
    """Refine grids by 2 and halve quadrature tolerances; each result must move by less than its tolerance."""
    out = []
    t0 = time.perf_counter()
    a, b = scalar_values(1e-10), scalar_values(5e-11)
    out.append(CheckRecord("scalar values under tol/2", "convergence",
                           max(abs(a[r] - b[r]) for r in SCALAR_RS), DEFAULTS["scalar"], time.perf_counter() - t0))

    t0 = time.perf_counter()
    (fa, ra, _), (fb, rb, _) = anomaly_run(T1_GRID, 1e-9), anomaly_run(2 * T1_GRID, 5e-10)
    coarse = fb.component(())[::2]
    out.append(CheckRecord("T^1 torsion form on the shared grid points", "convergence",
                           float(np.max(np.abs(coarse - fa.component(())))), DEFAULTS["anomaly"],
                           time.perf_counter() - t0))
    out.append(CheckRecord("T^1 anomaly residual change", "convergence", abs(ra - rb), DEFAULTS["anomaly"]))

    t0 = time.perf_counter()
    m1, m2 = mod4_run(T2_GRID, 1e-10), mod4_run(2 * T2_GRID, 5e-11)
    out.append(CheckRecord("mod 4 degree-2 part under refinement", "convergence", abs(m1 - m2), DEFAULTS["mod4"],
                           time.perf_counter() - t0))

    t0 = time.perf_counter()
    f1, f2 = filtration_run(T2_GRID, 1e-9), filtration_run(2 * T2_GRID, 5e-10)
    out.append(CheckRecord("filtration harmonic values under refinement", "convergence",
                           max(abs(f1[0] - f2[0]), abs(f1[1] - f2[1])), DEFAULTS["filtration"],
                           time.perf_counter() - t0))

    t0 = time.perf_counter()
    l1, l2 = limtf_run(T2_GRID, 1e-9), limtf_run(2 * T2_GRID, 5e-10)
    out.append(CheckRecord("compatibility harmonic values under refinement", "convergence",
                           max(abs(l1[0] - l2[0]), abs(l1[1] - l2[1])), DEFAULTS["limtf"],
                           time.perf_counter() - t0))
    return out


SUITES: dict[str, Callable[[float], list[CheckRecord]]] = {
    "scalar": suite_scalar,
    "anomaly": suite_anomaly,
    "mod4": suite_mod4,
    "filtration": suite_filtration,
    "limtf": suite_limtf,
    "circle": suite_circle,
    "induction": suite_induction,
    "triviality": suite_triviality,
    "specialfn": suite_specialfn,
    "continuity": suite_continuity,
    "convergence": suite_convergence,
}


def run_suite(name: str, overrides: dict[str, float] | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    overrides = overrides or {}
    tol = overrides.get(name, DEFAULTS.get(name))
    return SuiteReport(name, SUITES[name](tol))


def run_suites(names: list[str], overrides: dict[str, float] | None = None) -> list[SuiteReport]:
    if names == ["all"]:
        names = list(SUITES)
    return [run_suite(n, overrides) for n in names]
