"""Closed-form torsion classes of circle bundles S^1(L^n) with flat line coefficients.

Classes are polynomials in omega = c_1(L^n).  The Bismut-Lott class has

    c(k) = (-1)^{k/2}     (2k+1)! / (2^{2k} (k!)^2 (2 pi)^k) Re Li_{k+1}(alpha)   (k even)
    c(k) = (-1)^{(k-1)/2} (2k+1)! / (2^{2k} (k!)^2 (2 pi)^k) Im Li_{k+1}(alpha)   (k odd)

for k >= 1, and the Igusa-Klein class has (-1)^{(k+2)/2} Re Li_{k+1}(alpha)/k!
for even k and (-1)^{(k+1)/2} Im Li_{k+1}(alpha)/k! for odd k.  The IK term
k = 0 would need Li_1 and is not modeled.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .special_fn import RootOfUnity, polylog, roots_of_unity, zeta

BL, IK = "BL", "IK"
EVEN, ODD = "even", "odd"


def bl_prefactor(k: int) -> float:
    """(2k+1)! / (2^{2k} (k!)^2 (2 pi)^k), without the sign."""
    return math.factorial(2 * k + 1) / (4**k * math.factorial(k) ** 2 * (2 * math.pi) ** k)


def _li_part(alpha: RootOfUnity, k: int) -> float:
    li = polylog(k + 1, alpha.value)
    return li.real if k % 2 == 0 else li.imag


def bl_coefficient(alpha: RootOfUnity, k: int) -> float:
    if k < 1:
        raise DomainError("Bismut-Lott coefficients start at degree 1")
    sign = (-1) ** (k // 2)
    return sign * bl_prefactor(k) * _li_part(alpha, k)


def ik_coefficient(alpha: RootOfUnity, k: int) -> float:
    if k < 1:
        raise DomainError("the k = 0 Igusa-Klein coefficient needs Li_1 and is not supported")
    sign = (-1) ** ((k + 2) // 2) if k % 2 == 0 else (-1) ** ((k + 1) // 2)
    return sign * _li_part(alpha, k) / math.factorial(k)


@dataclass(frozen=True)
class CircleTorsionPoly:
    """sum_k coeffs[k] omega^k for the bundle S^1(L^{twist_power}) with holonomy alpha."""

    kind: str
    alpha: RootOfUnity
    twist_power: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (BL, IK):
            raise DomainError(f"kind must be {BL!r} or {IK!r}")
        if self.twist_power < 1 or not self.alpha.order_divides(self.twist_power):
            raise DomainError(f"alpha = {self.alpha} is not a {self.twist_power}-th root of unity")
        if any(k < 1 for k in self.coeffs):
            raise DomainError("coefficients are modeled for degrees k >= 1 only")
        if any(not isinstance(v, float) or not math.isfinite(v) for v in self.coeffs.values()):
            raise DomainError("coefficients must be finite reals")

    def coefficient(self, k: int) -> float:
        return self.coeffs.get(k, 0.0)

    @property
    def kmax(self) -> int:
        return max(self.coeffs, default=0)

    def rescaled(self) -> dict[int, float]:
        """Coefficients against c_1(L) rather than c_1(L^n): multiply by n^k."""
        return {k: v * self.twist_power**k for k, v in self.coeffs.items()}


def bl_circle_class(alpha: RootOfUnity, n: int, kmax: int) -> CircleTorsionPoly:
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    return CircleTorsionPoly(BL, alpha, n, {k: bl_coefficient(alpha, k) for k in range(1, kmax + 1)})


def ik_circle_class(alpha: RootOfUnity, n: int, kmax: int) -> CircleTorsionPoly:
    if kmax < 0:
        raise DomainError("kmax must be nonnegative")
    return CircleTorsionPoly(IK, alpha, n, {k: ik_coefficient(alpha, k) for k in range(1, kmax + 1)})


def chern_normalization_exact(k: int, parity: str = EVEN) -> Fraction:
    if parity == EVEN:
        if k < 1:
            raise DomainError("even branch needs k >= 1")
        return Fraction(2 ** (4 * k) * math.factorial(2 * k) ** 2, math.factorial(4 * k + 1))
    if parity == ODD:
        if k < 0:
            raise DomainError("odd branch needs k >= 0")
        return Fraction(2 ** (4 * k + 2) * math.factorial(2 * k + 1) ** 2, math.factorial(4 * k + 3))
    raise DomainError(f"parity must be {EVEN!r} or {ODD!r}")


def chern_normalization(k: int, parity: str = EVEN) -> float:
    """2^{4k}((2k)!)^2/(4k+1)! (even) or 2^{4k+2}((2k+1)!)^2/(4k+3)! (odd)."""
    return float(chern_normalization_exact(k, parity))


def main_theorem_sides(alpha: RootOfUnity, n: int, k: int, parity: str = EVEN) -> tuple[float, float]:
    """(normalized BL coefficient, -(m!/(2 pi)^m) IK coefficient) in degree m = 2k or 2k+1.

    The fiber-integral term vanishes for circle fibers, since e(TS^1) = 0.
    """
    m = 2 * k if parity == EVEN else 2 * k + 1
    if not alpha.order_divides(n):
        raise DomainError(f"alpha = {alpha} is not an {n}-th root of unity")
    lhs = chern_normalization(k, parity) * bl_coefficient(alpha, m)
    rhs = -math.factorial(m) / (2 * math.pi) ** m * ik_coefficient(alpha, m)
    return lhs, rhs


def check_main_theorem(alpha: RootOfUnity, n: int, k: int, parity: str = EVEN) -> float:
    lhs, rhs = main_theorem_sides(alpha, n, k, parity)
    return abs(lhs - rhs)


def check_induction_axiom(n: int, s: int) -> float:
    """Residual of the covering identity for degree k = s - 1 (both kinds) and of
    the distribution relation sum_{alpha^n = 1} Li_s(alpha) = n^{1-s} zeta(s).

    For the n-fold covering S^1(L) -> S^1(L^n), pushing forward the trivial
    line gives the sum of all F_alpha, and c_1(L^n) = n c_1(L); so the degree-k
    coefficient at alpha = 1 with n = 1 must equal n^k sum_alpha c_k(alpha).
    """
    if n < 1 or s < 2:
        raise DomainError("need n >= 1 and s >= 2")
    roots = roots_of_unity(n)
    dist = abs(sum(polylog(s, a.value) for a in roots) - n ** (1 - s) * zeta(s))
    k = s - 1
    worst = dist
    one = RootOfUnity(0, 1)
    for coeff in (bl_coefficient, ik_coefficient):
        pushed = n**k * sum(coeff(a, k) for a in roots)
        worst = max(worst, abs(pushed - coeff(one, k)))
    return worst


def continuity_map(k: int, alpha: RootOfUnity, kind: str = BL) -> float:
    """alpha -> n^{-k} tau_k(S^1(L^n), F_alpha) against c_1(L)^k; equals c_k(alpha) for every admissible n."""
    return bl_coefficient(alpha, k) if kind == BL else ik_coefficient(alpha, k)


def _prefactor(k: int, kind: str) -> float:
    return bl_prefactor(k) if kind == BL else 1.0 / math.factorial(k)


def continuity_modulus(k: int, h: float, kind: str = BL) -> float:
    """Bound on |map(alpha) - map(alpha')| for roots at angular distance h.

    d/dtheta Li_{k+1}(e^{i theta}) = i Li_k(e^{i theta}), bounded by zeta(k) for
    k >= 2 (Lipschitz).  For k = 1, |Li_1(e^{iu})| <= |log|u|| + log(pi) + pi/2
    on |u| <= pi; the log term integrates to at most h (1 + log(2/h)) over an
    interval of length h <= 2 and to at most 2 beyond that.
    """
    if h < 0:
        raise DomainError("angular distance must be nonnegative")
    if h == 0:
        return 0.0
    pre = _prefactor(k, kind)
    if k >= 2:
        return pre * zeta(k) * h
    log_part = h * (1.0 + math.log(2.0 / h)) if h <= 2.0 else 2.0
    return pre * (log_part + h * (math.log(math.pi) + math.pi / 2))


def angular_distance(a: RootOfUnity, b: RootOfUnity) -> float:
    d = abs(a.angle() - b.angle()) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def check_continuity_axiom(
    k: int, rationals: Sequence[RootOfUnity], delta: float | None = None, kind: str = BL
) -> float:
    """Largest |map(alpha) - map(alpha')| over pairs within angular distance delta.

    With delta None every pair is compared.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    vals = [(a, continuity_map(k, a, kind)) for a in rationals]
    worst = 0.0
    for i, (a, va) in enumerate(vals):
        for b, vb in vals[i + 1:]:
            if delta is None or angular_distance(a, b) <= delta:
                worst = max(worst, abs(va - vb))
    return worst


def continuity_violation(k: int, rationals: Sequence[RootOfUnity], kind: str = BL) -> float:
    """max over pairs of |map(a) - map(b)| - modulus(distance); <= 0 when the bound holds."""
    vals = [(a, continuity_map(k, a, kind)) for a in rationals]
    worst = -math.inf
    for i, (a, va) in enumerate(vals):
        for b, vb in vals[i + 1:]:
            worst = max(worst, abs(va - vb) - continuity_modulus(k, angular_distance(a, b), kind))
    return worst if vals[1:] else 0.0


# -- tables -----------------------------------------------------------------

TABLE_COLUMNS = ("kind", "n", "j", "k", "coefficient", "residual")


def main_theorem_residual_for_degree(alpha: RootOfUnity, n: int, m: int) -> float:
    return check_main_theorem(alpha, n, m // 2, EVEN if m % 2 == 0 else ODD)


def circle_table_rows(n: int, kmax: int) -> list[tuple]:
    """Rows (kind, n, j, k, coefficient, residual) for every j < n, both kinds, 1 <= k <= kmax.

    ``residual`` is the main-theorem residual in degree k at that alpha.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if kmax < 1:
        raise DomainError("kmax must be positive")
    rows = []
    for j in range(n):
        alpha = RootOfUnity(j, n)
        for k in range(1, kmax + 1):
            res = main_theorem_residual_for_degree(alpha, n, k)
            rows.append((BL, n, j, k, bl_coefficient(alpha, k), res))
            rows.append((IK, n, j, k, ik_coefficient(alpha, k), res))
    return rows


def write_circle_table(rows: Iterable[tuple], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for kind, n, j, k, coef, res in rows:
        writer.writerow([kind, n, j, k, repr(float(coef) + 0.0), repr(float(res))])


__all__ = [
    "BL",
    "IK",
    "CircleTorsionPoly",
    "bl_coefficient",
    "ik_coefficient",
    "bl_circle_class",
    "ik_circle_class",
    "chern_normalization",
    "chern_normalization_exact",
    "main_theorem_sides",
    "check_main_theorem",
    "main_theorem_residual_for_degree",
    "check_induction_axiom",
    "continuity_map",
    "continuity_modulus",
    "check_continuity_axiom",
    "continuity_violation",
    "circle_table_rows",
    "write_circle_table",
]
