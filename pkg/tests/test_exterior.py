import numpy as np
import pytest

from torsionlab.errors import SchemaError, StructuralError
from torsionlab.exterior import (
    DifferentialForm,
    TorusBase,
    degree_split,
    exterior_d,
    harmonic_coefficients,
    harmonic_part,
    merge_sign,
    reassemble,
    spectral_derivative,
    wedge,
)


def random_form(base, seed, modes=3):
    rng = np.random.default_rng(seed)
    xs = base.coords()
    comps = {}
    for m in base.monomials():
        arr = np.zeros(base.shape, dtype=complex)
        for _ in range(modes):
            k = rng.integers(-3, 4, size=base.dim)
            arr = arr + (rng.normal() + 1j * rng.normal()) * np.exp(1j * sum(ki * x for ki, x in zip(k, xs)))
        comps[m] = arr
    return DifferentialForm(base, comps)


@pytest.mark.parametrize("dim,grid", [(1, 3), (2, 2), (3, 8)])
def test_bad_bases_rejected(dim, grid):
    with pytest.raises(StructuralError):
        TorusBase(dim, grid)


def test_point_base_has_no_grid():
    base = TorusBase.point()
    assert base.shape == () and base.monomials() == [()]


def test_merge_sign():
    assert merge_sign((0,), (1,)) == (1, (0, 1))
    assert merge_sign((1,), (0,)) == (-1, (0, 1))
    assert merge_sign((0,), (0,))[0] == 0


def test_spectral_derivative_exact_on_trig():
    base = TorusBase(1, 16)
    (x,) = base.coords()
    d = spectral_derivative(np.sin(3 * x), 0, base)
    assert np.max(np.abs(d - 3 * np.cos(3 * x))) < 1e-13


def test_spectral_derivative_of_real_data_is_real():
    base = TorusBase(2, 8)
    x, y = base.coords()
    # the Nyquist mode must not leak an imaginary part
    f = np.cos(4 * x) + np.sin(x + y)
    d = spectral_derivative(f, 0, base)
    assert np.max(np.abs(d.imag)) < 1e-14


def test_dd_is_zero():
    base = TorusBase(2, 16)
    a = random_form(base, 0)
    assert exterior_d(exterior_d(a)).sup_norm() < 1e-11


def test_wedge_graded_commutativity():
    base = TorusBase(2, 8)
    a = random_form(base, 1).degree_part(1)
    b = random_form(base, 2).degree_part(1)
    assert (wedge(a, b) + wedge(b, a)).sup_norm() < 1e-12


def test_leibniz():
    base = TorusBase(2, 32)
    a = random_form(base, 3).degree_part(0)
    b = random_form(base, 4).degree_part(1)
    lhs = exterior_d(wedge(a, b))
    rhs = wedge(exterior_d(a), b) + wedge(a, exterior_d(b))
    # products of modes <= 3 stay below Nyquist on 32 points
    assert (lhs - rhs).sup_norm() < 1e-10


def test_exact_forms_have_zero_harmonic_part():
    base = TorusBase(2, 16)
    a = random_form(base, 5)
    h = harmonic_coefficients(exterior_d(a))
    assert all(abs(v) < 1e-12 for v in h.values())


def test_harmonic_part_keeps_constants():
    base = TorusBase(2, 8)
    c = DifferentialForm.constant(base, 2.5, (0, 1))
    assert (harmonic_part(c) - c).sup_norm() == 0.0


def test_degree_split_roundtrip():
    base = TorusBase(2, 8)
    a = random_form(base, 6)
    assert (reassemble(degree_split(a)) - a).sup_norm() == 0.0


def test_json_roundtrip():
    base = TorusBase(2, 8)
    a = random_form(base, 7)
    b = DifferentialForm.from_json(a.to_json())
    assert (a - b).sup_norm() == 0.0


def test_json_rejects_bad_monomial():
    with pytest.raises(SchemaError):
        DifferentialForm.from_json({"dim": 1, "grid": 4, "components": {"dx2": [[0, 0]] * 4}})


def test_mixing_bases_raises():
    with pytest.raises(StructuralError):
        DifferentialForm.zero(TorusBase(1, 8)) + DifferentialForm.zero(TorusBase(1, 16))
