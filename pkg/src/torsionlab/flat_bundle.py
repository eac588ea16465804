"""Flat bundles in a global flat frame, their metrics and odd characteristic forms."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Mapping, Sequence

import numpy as np

from .errors import PositivityError, SchemaError, StructuralError
from .exterior import DifferentialForm, TorusBase, spectral_derivative
from .formmatrix import ODD, FormMatrix
from .linalg import hermitian_part_error

HERMITIAN_TOL = 1e-12


def _complex_matrix(obj) -> np.ndarray:
    """Parse a JSON matrix whose entries are numbers or [re, im] pairs."""
    try:
        rows = [[complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in row] for row in obj]
        mat = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"bad matrix entry: {exc}") from exc
    if mat.ndim != 2:
        raise SchemaError("matrix must be a list of rows")
    return mat


def matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


@dataclass(frozen=True)
class MetricFamily:
    """Grid samples of a Hermitian positive definite rank x rank matrix."""

    base: TorusBase
    rank: int
    samples: np.ndarray

    def __post_init__(self):
        if self.rank < 1:
            raise StructuralError(f"metric rank must be positive, got {self.rank}")
        shape = self.base.shape + (self.rank, self.rank)
        arr = np.array(np.broadcast_to(np.asarray(self.samples, dtype=complex), shape))
        herm = hermitian_part_error(arr)
        scale = max(1.0, float(np.max(np.abs(arr))))
        if herm > HERMITIAN_TOL * scale:
            raise PositivityError(f"metric samples are not Hermitian (defect {herm:.3g})")
        arr = 0.5 * (arr + np.conj(np.swapaxes(arr, -1, -2)))
        try:
            np.linalg.cholesky(arr)
        except np.linalg.LinAlgError:
            raise PositivityError("metric sample is not positive definite") from None
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @classmethod
    def constant(cls, base: TorusBase, matrix) -> "MetricFamily":
        mat = np.asarray(matrix, dtype=complex)
        mat = np.atleast_2d(mat)
        return cls(base, mat.shape[0], np.broadcast_to(mat, base.shape + mat.shape))

    @classmethod
    def from_fourier(cls, base: TorusBase, terms: Sequence[tuple[Sequence[int], np.ndarray]]) -> "MetricFamily":
        """g(x) = sum_terms M exp(i mode . x); the sum must be Hermitian."""
        if not terms:
            raise SchemaError("Fourier metric needs at least one term")
        xs = base.coords()
        rank = np.atleast_2d(np.asarray(terms[0][1])).shape[0]
        total = np.zeros(base.shape + (rank, rank), dtype=complex)
        for mode, mat in terms:
            mode = list(mode)
            mat = np.atleast_2d(np.asarray(mat, dtype=complex))
            if mat.shape != (rank, rank):
                raise SchemaError("all Fourier terms need the same matrix shape")
            if len(mode) != base.dim:
                raise SchemaError(f"mode {mode} does not match torus dimension {base.dim}")
            phase = np.exp(1j * sum(k * x for k, x in zip(mode, xs))) if base.dim else np.array(1.0)
            total = total + phase[..., None, None] * mat
        return cls(base, rank, total)

    @classmethod
    def from_json(cls, obj: Mapping, base: TorusBase) -> "MetricFamily":
        kind = obj.get("samples")
        if kind == "constant":
            mat = _complex_matrix(obj["matrix"])
            metric = cls.constant(base, mat)
        elif kind == "fourier":
            terms = [(t["mode"], _complex_matrix(t["matrix"])) for t in obj["terms"]]
            metric = cls.from_fourier(base, terms)
        else:
            raise SchemaError(f"metric 'samples' must be 'constant' or 'fourier', got {kind!r}")
        if "rank" in obj and int(obj["rank"]) != metric.rank:
            raise SchemaError(f"declared rank {obj['rank']} but matrices have rank {metric.rank}")
        return metric

    def is_constant(self, tol: float = 0.0) -> bool:
        ref = self.samples.reshape((-1, self.rank, self.rank))[0]
        return bool(np.max(np.abs(self.samples - ref), initial=0.0) <= tol)

    def restrict(self, basis: np.ndarray) -> np.ndarray:
        """Samples of basis^dagger g basis: the metric induced on a constant subspace."""
        basis = np.asarray(basis, dtype=complex)
        return np.conj(basis.T) @ self.samples @ basis

    def pullback(self, frame: np.ndarray) -> "MetricFamily":
        """phi^* g for a constant frame change phi."""
        return MetricFamily(self.base, self.rank, self.restrict(frame))


@dataclass(frozen=True)
class FlatBundleData:
    """Trivial flat bundle (connection d in the global frame) with a metric."""

    base: TorusBase
    rank: int
    metric: MetricFamily

    def __post_init__(self):
        if self.metric.rank != self.rank or self.metric.base != self.base:
            raise StructuralError("metric does not match bundle rank/base")

    @classmethod
    def with_metric(cls, metric: MetricFamily) -> "FlatBundleData":
        return cls(metric.base, metric.rank, metric)


def metric_derivatives(samples: np.ndarray, base: TorusBase) -> list[np.ndarray]:
    """Spectral partial derivatives of grid-sampled matrices, one per axis."""
    return [spectral_derivative(samples, axis, base) for axis in range(base.dim)]


def kamber_tondeur_components(samples: np.ndarray, base: TorusBase) -> list[np.ndarray]:
    """omega_i = g^{-1} d_i g at every grid point."""
    ginv = np.linalg.inv(samples)
    return [ginv @ dg for dg in metric_derivatives(samples, base)]


def kamber_tondeur(bundle: FlatBundleData) -> FormMatrix:
    """omega(F, g) = g^{-1} dg as a matrix of 1-forms."""
    comps = {(i,): w for i, w in enumerate(kamber_tondeur_components(bundle.metric.samples, bundle.base))}
    return FormMatrix(bundle.base, (bundle.rank,), comps, ODD)


def phi_factor(k: int) -> complex:
    """(2 pi i)^{-k/2} with the principal square root of i."""
    return (2 * np.pi) ** (-k / 2) * np.exp(-1j * np.pi * k / 4)


def phi_normalize(a: DifferentialForm) -> DifferentialForm:
    return a.map(lambda mono, arr: phi_factor(len(mono)) * arr)


def odd_char_form(bundle: FlatBundleData) -> DifferentialForm:
    """f(nabla, g) = (2 pi i)^{1/2} phi tr[f(omega/2)] with f(z) = z e^{z^2}.

    omega has form degree 1, so the series stops once (omega/2)^m exceeds
    the base dimension.
    """
    half = kamber_tondeur(bundle) * 0.5
    dim = bundle.base.dim
    total = None
    power = half
    # f(z) = sum_m z^{2m+1} / m!
    for m in range(dim // 2 + 1):
        if 2 * m + 1 > dim:
            break
        term = power * (1.0 / factorial(m))
        total = term if total is None else total + term
        power = power @ half @ half
    if total is None:
        return DifferentialForm.zero(bundle.base)
    tr = total.trace_form()
    out = phi_normalize(tr) * phi_factor(-1)
    out = DifferentialForm(bundle.base, {m: a for m, a in out.components.items() if len(m) % 2 == 1})
    imag = out.imag.sup_norm()
    scale = max(1.0, out.sup_norm())
    if imag > 1e-10 * scale:
        raise StructuralError(f"odd characteristic form is not real (imaginary part {imag:.3g})")
    return out.real


def graded_odd_char_form(bundles: Sequence[tuple[int, FlatBundleData]] | Sequence[FlatBundleData]) -> DifferentialForm:
    """sum_k (-1)^k f(nabla^{E^k}, g^{E^k}).

    Accepts (degree, bundle) pairs, or bare bundles taken in degrees 0, 1, ...
    """
    pairs = [(k, b) if isinstance(b, FlatBundleData) else tuple(b) for k, b in enumerate(bundles)]
    if not pairs:
        raise StructuralError("no bundles given")
    base = pairs[0][1].base
    total = DifferentialForm.zero(base)
    for degree, bundle in pairs:
        if bundle.base != base:
            raise StructuralError("bundles live on different bases")
        total = total + (-1) ** degree * odd_char_form(bundle)
    return total
