import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.errors import DomainError
from torsionlab.special_fn import (
    RootOfUnity,
    distribution_residual,
    polylog,
    roots_of_unity,
    unit_root,
    zeta,
    zeta_nonpositive,
    zeta_prime_neg_even,
)

mpmath.mp.dps = 30


@pytest.mark.parametrize("s", range(2, 12))
def test_zeta_against_mpmath(s):
    assert abs(zeta(s) - float(mpmath.zeta(s))) < 2e-15


@pytest.mark.parametrize("k", range(1, 6))
def test_zeta_prime_against_mpmath(k):
    ref = float(mpmath.zeta(-2 * k, derivative=1))
    assert abs(zeta_prime_neg_even(k) - ref) < 1e-14 * max(1.0, abs(ref))


def test_zeta_nonpositive():
    assert zeta_nonpositive(0) == -0.5
    assert abs(zeta_nonpositive(1) + 1 / 12) < 1e-16
    assert zeta_nonpositive(2) == 0.0


@pytest.mark.parametrize("s", [2, 3, 5, 8])
@pytest.mark.parametrize("z", [0.3, -0.45j, 0.6 + 0.2j, -1.0, 1j, unit_root(1, 7), unit_root(5, 12), 0.999])
def test_polylog_against_mpmath(s, z):
    ref = complex(mpmath.polylog(s, z))
    assert abs(polylog(s, z) - ref) < 5e-15 * max(1.0, abs(ref))


def test_catalan():
    assert abs(polylog(2, 1j).imag - float(mpmath.catalan)) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.floats(0.0, 2 * math.pi), st.floats(0.0, 1.0))
def test_conjugation_symmetry(s, theta, r):
    z = r * complex(math.cos(theta), math.sin(theta))
    assert abs(polylog(s, z.conjugate()) - polylog(s, z).conjugate()) < 1e-14


def test_real_arguments_give_real_values():
    assert polylog(3, -1.0).imag == 0.0
    assert polylog(4, 0.7).imag == 0.0


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("s", range(2, 8))
def test_distribution_relation(n, s):
    assert distribution_residual(n, s) < 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        polylog(1, 0.5)
    with pytest.raises(DomainError):
        polylog(2, 1.5)
    with pytest.raises(DomainError):
        zeta(1)
    with pytest.raises(DomainError):
        zeta(2.5)


def test_roots_of_unity():
    a = RootOfUnity(6, 8)
    assert (a.numerator, a.denominator) == (3, 4)
    assert a.value == -1j
    assert RootOfUnity(-1, 5) == RootOfUnity(4, 5)
    assert a.conj().value == 1j
    assert len(roots_of_unity(6)) == 6 and RootOfUnity(3, 6).is_real()
    assert unit_root(3, 7) == unit_root(4, 7).conjugate()
