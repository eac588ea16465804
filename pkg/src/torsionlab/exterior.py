"""Exterior calculus on flat tori (R/2piZ)^d, d in {0, 1, 2}.

A form is stored as a dict from exterior monomials to complex grid samples.
Monomials are sorted tuples of 0-based axis indices: ``()`` is the constant
monomial, ``(0,)`` is dx1, ``(0, 1)`` is dx1^dx2.  Derivatives are spectral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import SchemaError, StructuralError

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class TorusBase:
    """Flat torus of dimension 0, 1 or 2 sampled on a uniform N^dim grid."""

    dim: int
    grid_size: int = 0

    def __post_init__(self):
        if self.dim not in (0, 1, 2):
            raise StructuralError(f"torus dimension must be 0, 1 or 2, got {self.dim}")
        if self.dim == 0:
            object.__setattr__(self, "grid_size", 0)
        elif self.grid_size < 4 or self.grid_size % 2:
            raise StructuralError(f"grid size must be even and >= 4, got {self.grid_size}")

    @classmethod
    def point(cls) -> "TorusBase":
        return cls(0, 0)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.grid_size,) * self.dim

    @property
    def npoints(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    def monomials(self, degree: int | None = None) -> list[Monomial]:
        degrees = range(self.dim + 1) if degree is None else [degree]
        return [m for k in degrees for m in combinations(range(self.dim), k)]

    def coords(self) -> tuple[np.ndarray, ...]:
        """Grid coordinates, one array of shape ``self.shape`` per axis."""
        if self.dim == 0:
            return ()
        x = 2 * np.pi * np.arange(self.grid_size) / self.grid_size
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def refine(self, factor: int = 2) -> "TorusBase":
        if self.dim == 0:
            return self
        return TorusBase(self.dim, self.grid_size * factor)


def monomial_name(m: Monomial) -> str:
    return "^".join(f"dx{i + 1}" for i in m)


def parse_monomial(name: str, dim: int) -> Monomial:
    if name == "":
        return ()
    try:
        axes = tuple(int(part[2:]) - 1 for part in name.split("^"))
    except ValueError:
        raise SchemaError(f"bad monomial name {name!r}") from None
    if any(not p.startswith("dx") for p in name.split("^")):
        raise SchemaError(f"bad monomial name {name!r}")
    if list(axes) != sorted(set(axes)) or any(a < 0 or a >= dim for a in axes):
        raise SchemaError(f"monomial {name!r} is not a sorted product of dx1..dx{dim}")
    return axes


def merge_sign(a: Monomial, b: Monomial) -> tuple[int, Monomial]:
    """Sign and result of e_a ^ e_b; sign 0 when the monomials overlap."""
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1) ** inversions, tuple(sorted(a + b))


def spectral_derivative(values: np.ndarray, axis: int, base: TorusBase) -> np.ndarray:
    """d/dx_axis of periodic samples; trailing non-grid axes are carried along.

    The Nyquist mode is dropped, which keeps derivatives of real data real.
    """
    n = base.grid_size
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    spec = np.fft.fft(values, axis=axis)
    return np.fft.ifft(1j * k.reshape(shape) * spec, axis=axis)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DifferentialForm:
    """Complex differential form on a TorusBase; absent monomials are zero."""

    base: TorusBase
    components: Mapping[Monomial, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        comps = {}
        for mono, arr in self.components.items():
            mono = tuple(mono)
            if list(mono) != sorted(set(mono)) or any(a < 0 or a >= self.base.dim for a in mono):
                raise StructuralError(f"monomial {mono} invalid on a {self.base.dim}-torus")
            arr = np.broadcast_to(np.asarray(arr, dtype=complex), self.base.shape)
            comps[mono] = _frozen(arr)
        object.__setattr__(self, "components", comps)

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, base: TorusBase) -> "DifferentialForm":
        return cls(base, {})

    @classmethod
    def constant(cls, base: TorusBase, value: complex, mono: Monomial = ()) -> "DifferentialForm":
        return cls(base, {tuple(mono): np.full(base.shape, value, dtype=complex)})

    @classmethod
    def from_callables(
        cls, base: TorusBase, funcs: Mapping[Monomial, Callable[..., np.ndarray]]
    ) -> "DifferentialForm":
        """Sample ``funcs[m](x1, ..., x_dim)`` on the grid for each monomial."""
        xs = base.coords()
        return cls(base, {m: np.asarray(f(*xs)) for m, f in funcs.items()})

    # -- queries ------------------------------------------------------------
    def component(self, mono: Monomial) -> np.ndarray:
        arr = self.components.get(tuple(mono))
        if arr is None:
            return np.zeros(self.base.shape, dtype=complex)
        return arr

    def degrees(self) -> set[int]:
        return {len(m) for m in self.components}

    def degree_part(self, k: int) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: a for m, a in self.components.items() if len(m) == k})

    def positive_part(self) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: a for m, a in self.components.items() if len(m) > 0})

    def sup_norm(self) -> float:
        if not self.components:
            return 0.0
        return max(float(np.max(np.abs(a), initial=0.0)) for a in self.components.values())

    @property
    def real(self) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: a.real for m, a in self.components.items()})

    @property
    def imag(self) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: a.imag for m, a in self.components.items()})

    def conj(self) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: np.conj(a) for m, a in self.components.items()})

    def map(self, fn: Callable[[Monomial, np.ndarray], np.ndarray]) -> "DifferentialForm":
        return DifferentialForm(self.base, {m: fn(m, a) for m, a in self.components.items()})

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "DifferentialForm"):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if other.base != self.base:
            raise StructuralError(f"forms live on different bases: {self.base} vs {other.base}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        comps = dict(self.components)
        for m, a in other.components.items():
            comps[m] = comps[m] + a if m in comps else a
        return DifferentialForm(self.base, comps)

    def __neg__(self):
        return DifferentialForm(self.base, {m: -a for m, a in self.components.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, DifferentialForm):
            return NotImplemented
        return DifferentialForm(self.base, {m: scalar * a for m, a in self.components.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        comps = {}
        for m in sorted(self.components, key=lambda m: (len(m), m)):
            a = self.components[m].ravel(order="C")
            comps[monomial_name(m)] = [[float(z.real), float(z.imag)] for z in a]
        return {"dim": self.base.dim, "grid": self.base.grid_size, "components": comps}

    @classmethod
    def from_json(cls, obj: Mapping) -> "DifferentialForm":
        try:
            base = TorusBase(int(obj["dim"]), int(obj.get("grid", 0)))
            comps = {}
            for name, pairs in obj["components"].items():
                arr = np.array([complex(re, im) for re, im in pairs], dtype=complex)
                comps[parse_monomial(name, base.dim)] = arr.reshape(base.shape)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed form JSON: {exc}") from exc
        return cls(base, comps)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Exterior product, pointwise on the grid with Koszul signs."""
    if a.base != b.base:
        raise StructuralError(f"forms live on different bases: {a.base} vs {b.base}")
    comps: dict[Monomial, np.ndarray] = {}
    for ma, xa in a.components.items():
        for mb, xb in b.components.items():
            sign, m = merge_sign(ma, mb)
            if sign == 0:
                continue
            term = sign * xa * xb
            comps[m] = comps[m] + term if m in comps else term
    return DifferentialForm(a.base, comps)


def exterior_d(a: DifferentialForm) -> DifferentialForm:
    """de Rham differential via spectral differentiation along each axis."""
    base = a.base
    comps: dict[Monomial, np.ndarray] = {}
    for mono, arr in a.components.items():
        for axis in range(base.dim):
            sign, m = merge_sign((axis,), mono)
            if sign == 0:
                continue
            term = sign * spectral_derivative(arr, axis, base)
            comps[m] = comps[m] + term if m in comps else term
    return DifferentialForm(base, comps)


def harmonic_part(a: DifferentialForm) -> DifferentialForm:
    """Projection onto constant-coefficient forms (grid mean of each component).

    On a flat torus a closed form is exact iff this projection vanishes.
    """
    return DifferentialForm(
        a.base, {m: np.full(a.base.shape, np.mean(arr), dtype=complex) for m, arr in a.components.items()}
    )


def harmonic_coefficients(a: DifferentialForm) -> dict[Monomial, complex]:
    """The constant values of ``harmonic_part(a)`` keyed by monomial."""
    return {m: complex(np.mean(arr)) for m, arr in a.components.items()}


def degree_split(a: DifferentialForm) -> dict[int, DifferentialForm]:
    """Split into pure-degree pieces, keyed by degree 0..dim."""
    return {k: a.degree_part(k) for k in range(a.base.dim + 1)}


def reassemble(pieces: Iterable[DifferentialForm] | Mapping[int, DifferentialForm]) -> DifferentialForm:
    items = list(pieces.values()) if isinstance(pieces, Mapping) else list(pieces)
    if not items:
        raise StructuralError("nothing to reassemble")
    comps: dict[Monomial, np.ndarray] = {}
    for piece in items:
        if piece.base != items[0].base:
            raise StructuralError("pieces live on different bases")
        for m, arr in piece.components.items():
            comps[m] = comps[m] + arr if m in comps else arr
    return DifferentialForm(items[0].base, comps)
