"""Adaptive integration of vector-valued integrands over (0, inf) against dt/t.

The substitution t = e^u turns dt/t into du.  A core u-window is integrated
adaptively with scipy's vector Gauss-Kronrod driver; the window is then
extended outward panel by panel until the newest panel contributes less than
tol/10 in sup norm.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec

from .errors import ConvergenceError

MAX_EXTENSIONS = 40


@dataclass
class QuadratureReport:
    nodes: int = 0
    est_error: float = 0.0
    interval: tuple[float, float] = (0.0, 0.0)
    breakpoints: list[float] = field(default_factory=list)
    imag_residual: float = 0.0

    def to_json(self) -> dict:
        return {
            "nodes": int(self.nodes),
            "est_error": float(self.est_error),
            "interval": [float(self.interval[0]), float(self.interval[1])],
            "breakpoints": [float(b) for b in self.breakpoints],
        }

    def merged(self, other: "QuadratureReport") -> "QuadratureReport":
        lo = min(self.interval[0], other.interval[0]) if self.nodes else other.interval[0]
        hi = max(self.interval[1], other.interval[1])
        return QuadratureReport(
            self.nodes + other.nodes,
            self.est_error + other.est_error,
            (lo, hi),
            sorted(set(self.breakpoints) | set(other.breakpoints)),
            max(self.imag_residual, other.imag_residual),
        )


def worker_count() -> int:
    """Worker processes for quadrature, capped by TORSIONLAB_WORKERS (default 1)."""
    raw = os.environ.get("TORSIONLAB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _panel(fn, a, b, tol, limit, workers):
    res, err, info = quad_vec(
        fn, a, b, epsabs=tol, epsrel=0.0, norm="max", limit=limit, workers=workers, full_output=True
    )
    if info.status != 0:
        raise ConvergenceError(
            f"quadrature on u in [{a:.3g}, {b:.3g}] stopped with error {err:.3g} > {tol:.3g}",
            QuadratureReport(info.neval, float(err), (float(np.exp(a)), float(np.exp(b)))),
        )
    cuts = sorted({float(x) for iv in info.intervals for x in iv})
    return np.asarray(res), float(err), int(info.neval), cuts


def integrate_dt_over_t(
    fn: Callable[[float], np.ndarray],
    tol: float,
    t_lo: float,
    t_hi: float,
    *,
    limit: int = 2000,
    workers: int | None = None,
    left_step: float = 4.0,
    right_step: float = float(np.log(2.0)),
) -> tuple[np.ndarray, QuadratureReport]:
    """Integral of fn(t) dt/t over (0, inf); fn returns a real vector.

    Raises ConvergenceError (carrying the partial report) if a panel fails or
    the window keeps growing past MAX_EXTENSIONS steps at either end.
    """
    workers = worker_count() if workers is None else workers
    g = _LogIntegrand(fn)
    u_lo, u_hi = float(np.log(t_lo)), float(np.log(t_hi))
    total, err, nodes, cuts = _panel(g, u_lo, u_hi, tol / 2, limit, workers)
    report = QuadratureReport(nodes, err, (t_lo, t_hi), cuts)

    for side in (-1, 1):
        step = left_step if side < 0 else right_step
        for count in range(MAX_EXTENSIONS + 1):
            if count == MAX_EXTENSIONS:
                report.interval = (float(np.exp(u_lo)), float(np.exp(u_hi)))
                raise ConvergenceError("integration window kept growing; integrand tail not decaying", report)
            a, b = (u_lo - step, u_lo) if side < 0 else (u_hi, u_hi + step)
            piece, perr, pn, pcuts = _panel(g, a, b, tol / 20, limit, workers)
            total = total + piece
            report.nodes += pn
            report.est_error += perr
            report.breakpoints = sorted(set(report.breakpoints) | set(pcuts))
            if side < 0:
                u_lo = a
            else:
                u_hi = b
            if float(np.max(np.abs(piece), initial=0.0)) < tol / 10:
                break

    report.interval = (float(np.exp(u_lo)), float(np.exp(u_hi)))
    report.breakpoints = [float(np.exp(u)) for u in report.breakpoints]
    return total, report


class _LogIntegrand:
    """u -> fn(e^u); a class rather than a closure so worker pools can pickle it."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, u):
        return np.asarray(self.fn(float(np.exp(u))), dtype=float)
