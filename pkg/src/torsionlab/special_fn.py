"""Polylogarithms on the closed unit disk, zeta at integers, and zeta' at negative even integers."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

_SERIES_RADIUS = 0.5
_LOG_SERIES_TERMS = 90


@dataclass(frozen=True)
class RootOfUnity:
    """alpha = exp(2 pi i j / n), stored in lowest terms with 0 <= j < n."""

    numerator: int
    denominator: int

    def __post_init__(self):
        n = int(self.denominator)
        if n < 1:
            raise DomainError(f"denominator must be positive, got {n}")
        j = int(self.numerator) % n
        g = math.gcd(j, n)
        object.__setattr__(self, "numerator", j // g)
        object.__setattr__(self, "denominator", n // g)

    @property
    def value(self) -> complex:
        return unit_root(self.numerator, self.denominator)

    def conj(self) -> "RootOfUnity":
        return RootOfUnity(-self.numerator, self.denominator)

    def is_real(self) -> bool:
        return self.denominator <= 2

    def order_divides(self, n: int) -> bool:
        return n % self.denominator == 0

    def angle(self) -> float:
        """Argument in [0, 2 pi)."""
        return 2 * math.pi * self.numerator / self.denominator

    def __str__(self) -> str:
        return f"exp(2 pi i {self.numerator}/{self.denominator})"


def unit_root(j: int, n: int) -> complex:
    """exp(2 pi i j/n) with exact values on the axes and exact conjugate symmetry."""
    j %= n
    if j == 0:
        return complex(1.0, 0.0)
    if 2 * j == n:
        return complex(-1.0, 0.0)
    if 4 * j == n:
        return complex(0.0, 1.0)
    if 4 * j == 3 * n:
        return complex(0.0, -1.0)
    if 2 * j > n:
        return unit_root(n - j, n).conjugate()
    theta = 2 * math.pi * j / n
    return complex(math.cos(theta), math.sin(theta))


def roots_of_unity(n: int) -> list[RootOfUnity]:
    """All n-th roots of unity, j = 0..n-1 (not necessarily primitive)."""
    return [RootOfUnity(j, n) for j in range(n)]


# -- zeta -------------------------------------------------------------------

_BORWEIN_N = 32


@lru_cache(maxsize=None)
def _borwein_d() -> tuple[float, ...]:
    n = _BORWEIN_N
    d, acc = [], Fraction(0)
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4**i, math.factorial(n - i) * math.factorial(2 * i))
        d.append(n * acc)
    return tuple(float(x) for x in d)


@lru_cache(maxsize=None)
def zeta(s: int) -> float:
    """Riemann zeta at an integer s >= 2 via Borwein's accelerated eta series."""
    s = _int_arg(s, 2, "zeta")
    d = _borwein_d()
    n = _BORWEIN_N
    eta = -sum((-1) ** k * (d[k] - d[n]) / (k + 1) ** s for k in range(n)) / d[n]
    return eta / (1.0 - 2.0 ** (1 - s))


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Fraction:
    """B_m with B_1 = -1/2, by the standard recurrence."""
    b = [Fraction(1)]
    for k in range(1, m + 1):
        b.append(-sum(math.comb(k + 1, i) * b[i] for i in range(k)) / (k + 1))
    return b[m]


@lru_cache(maxsize=None)
def zeta_nonpositive(n: int) -> float:
    """zeta(-n) for n >= 0."""
    if n == 0:
        return -0.5
    return float(-_bernoulli(n + 1) / (n + 1))


def zeta_any(s: int) -> float:
    """zeta at any integer other than 1."""
    if s == 1:
        raise DomainError("zeta has a pole at 1")
    return zeta(s) if s >= 2 else zeta_nonpositive(-s)


def zeta_prime_neg_even(k: int) -> float:
    """zeta'(-2k) = (-1)^k (2k)! zeta(2k+1) / (2^{2k+1} pi^{2k})."""
    k = _int_arg(k, 1, "zeta_prime_neg_even")
    return (-1) ** k * math.factorial(2 * k) * zeta(2 * k + 1) / (2.0 ** (2 * k + 1) * math.pi ** (2 * k))


# -- polylog ----------------------------------------------------------------

def _int_arg(s, lo: int, name: str) -> int:
    if isinstance(s, bool) or int(s) != s:
        raise DomainError(f"{name} needs an integer argument, got {s!r}")
    s = int(s)
    if s < lo:
        raise DomainError(f"{name} needs an argument >= {lo}, got {s}")
    return s


def _direct_series(s: int, z: complex) -> complex:
    total, power, m = 0j, z, 1
    while True:
        term = power / m**s
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            return total
        m += 1
        power *= z


def _log_series(s: int, z: complex) -> complex:
    """Expansion in mu = log z, valid for |mu| < 2 pi:

    Li_s(z) = sum_{k != s-1} zeta(s-k) mu^k/k! + mu^{s-1}/(s-1)! (H_{s-1} - log(-mu)).
    """
    mu = cmath.log(z)
    harmonic = sum(1.0 / i for i in range(1, s))
    total = 0j
    power = 1 + 0j
    for k in range(_LOG_SERIES_TERMS):
        if k == s - 1:
            if mu != 0:
                total += power / math.factorial(k) * (harmonic - cmath.log(-mu))
        else:
            total += zeta_any(s - k) * power / math.factorial(k)
        power *= mu
    return total


def polylog(s: int, z: complex) -> complex:
    """Li_s(z) = sum_{m >= 1} z^m / m^s for integer s >= 2 and |z| <= 1."""
    s = _int_arg(s, 2, "polylog")
    z = complex(z)
    r = abs(z)
    if r > 1 + 1e-12:
        raise DomainError(f"polylog is only defined here for |z| <= 1, got |z| = {r}")
    if z.imag < 0:
        return polylog(s, z.conjugate()).conjugate()
    if z == 0:
        return 0j
    if z == 1:
        return complex(zeta(s), 0.0)
    if r > 1:
        z = z / r
    val = _direct_series(s, z) if r <= _SERIES_RADIUS else _log_series(s, z)
    if z.imag == 0:
        return complex(val.real, 0.0)
    return val


def distribution_residual(n: int, s: int) -> float:
    """|sum_{alpha^n = 1} Li_s(alpha) - n^{1-s} zeta(s)|."""
    total = sum(polylog(s, a.value) for a in roots_of_unity(n))
    return abs(total - n ** (1 - s) * zeta(s))


__all__ = [
    "RootOfUnity",
    "unit_root",
    "roots_of_unity",
    "polylog",
    "zeta",
    "zeta_any",
    "zeta_nonpositive",
    "zeta_prime_neg_even",
    "distribution_residual",
]
