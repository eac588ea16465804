import warnings

import mpmath
import numpy as np
import pytest
import scipy.linalg

from torsionlab.errors import StructuralError
from torsionlab.exterior import TorusBase
from torsionlab.formmatrix import (
    EVEN,
    ODD,
    FormMatrix,
    form_exp,
    form_exp_taylor,
    from_regular_column,
    regular_representation,
)
from torsionlab.linalg import exp_divdiff1, exp_divdiff2, exp_divdiff2_repeated, expm


@pytest.mark.parametrize("scale", [0.01, 1.0, 30.0])
def test_expm_matches_scipy(scale):
    rng = np.random.default_rng(0)
    a = scale * (rng.normal(size=(5, 4, 4)) + 1j * rng.normal(size=(5, 4, 4)))
    ours = expm(a)
    ref = np.array([scipy.linalg.expm(m) for m in a])
    assert np.max(np.abs(ours - ref) / np.maximum(np.abs(ref).max(axis=(1, 2), keepdims=True), 1e-300)) < 1e-11


def _dd2_mp(x, y, z):
    # Hermite-Genocchi: [x, y, z] exp = integral of exp over the 2-simplex
    with mpmath.workdps(40):
        x, y, z = (mpmath.mpf(v) for v in (x, y, z))
        inner = lambda s: mpmath.quad(lambda r: mpmath.exp(x + s * (y - x) + r * (z - y)), [0, s])
        return float(mpmath.quad(inner, [0, 1]))


def test_divided_differences_against_mpmath():
    pts = [(-0.3, -0.1, 0.0), (-5.0, -2.0, -2.0), (-40.0, -1.0, -7.0), (-1e-9, 0.0, -2e-9)]
    for x, y, z in pts:
        ref = _dd2_mp(x, y, z)
        assert abs(exp_divdiff2(x, y, z) - ref) <= 1e-13 * abs(ref)
    for x, y in [(-3.0, -1.0), (-1e-10, 0.0), (-700.0, -699.0)]:
        with mpmath.workdps(40):
            ref = float((mpmath.exp(x) - mpmath.exp(y)) / (mpmath.mpf(x) - mpmath.mpf(y)))
        assert abs(exp_divdiff1(x, y) - ref) <= 1e-13 * ref


def test_repeated_divdiff_matches_general_and_is_quiet():
    rng = np.random.default_rng(1)
    x = rng.uniform(-800, 0, 5000)
    y = np.minimum(x + rng.choice([-1, 1], 5000) * 10 ** rng.uniform(-12, 2.5, 5000), 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = exp_divdiff2_repeated(x, y)
    b = exp_divdiff2(x, x, y)
    keep = b > 1e-250
    assert np.max(np.abs(a - b)[keep] / b[keep]) < 1e-12


def _random_fm(base, ranks, parity, seed, scale=0.4):
    rng = np.random.default_rng(seed)
    size = sum(ranks)
    labels = np.repeat(np.arange(len(ranks)), ranks)
    comps = {}
    for m in base.monomials():
        a = scale * (rng.normal(size=base.shape + (size, size)) + 1j * rng.normal(size=base.shape + (size, size)))
        # keep only blocks whose total parity (form degree + degree shift) matches
        shift = (labels[None, :] - labels[:, None]) % 2
        want = 0 if parity == EVEN else 1
        mask = ((shift + len(m)) % 2) == want
        comps[m] = a * mask
    return FormMatrix(base, ranks, comps, parity)


def _close(a, b, tol):
    return (a - b).max_abs() <= tol


def test_form_exp_against_taylor():
    base = TorusBase(2, 4)
    p = _random_fm(base, (1, 2), EVEN, 2)
    assert _close(form_exp(p), form_exp_taylor(p), 1e-12)


def test_form_exp_against_regular_representation():
    base = TorusBase(2, 4)
    p = _random_fm(base, (2, 1, 1), EVEN, 3, scale=1.5)
    big = scipy.linalg.expm(regular_representation(p)[0, 0])
    ref = from_regular_column(big[None, None], FormMatrix(base, p.ranks, {}, EVEN))
    got = form_exp(p)
    for m in base.monomials():
        assert np.max(np.abs(got.component(m)[0, 0] - ref.component(m)[0, 0])) < 1e-10


def test_product_is_associative():
    base = TorusBase(2, 4)
    a, b, c = (_random_fm(base, (1, 2), par, s) for s, par in ((4, ODD), (5, EVEN), (6, ODD)))
    assert _close((a @ b) @ c, a @ (b @ c), 1e-12)


def test_regular_representation_is_multiplicative():
    base = TorusBase(2, 4)
    a, b = _random_fm(base, (1, 1), ODD, 7), _random_fm(base, (1, 1), ODD, 8)
    lhs = regular_representation(a @ b)
    rhs = regular_representation(a) @ regular_representation(b)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_parity_is_enforced():
    base = TorusBase(1, 4)
    bad = np.zeros(base.shape + (2, 2))
    bad[..., 0, 1] = 1.0  # degree shift 1 in form degree 0 is odd
    with pytest.raises(StructuralError):
        FormMatrix(base, (1, 1), {(): bad}, EVEN)


def test_form_exp_needs_even():
    base = TorusBase(1, 4)
    with pytest.raises(StructuralError):
        form_exp(_random_fm(base, (1, 1), ODD, 9))
