"""Matrices with differential-form entries over a graded space E = sum_k E^k.

An element is stored as ``sum_I e_I (x) M_I`` with forms on the left; ``M_I``
is a grid-sampled ``R x R`` complex matrix.  The product is the super tensor
product of the exterior algebra with End(E):

    (e_I (x) A)(e_J (x) B) = (-1)^{|A| |J|} e_I ^ e_J (x) A B,

where ``|A|`` is the degree-shift parity of A.  For homogeneous A the sign
twist ``(-1)^{|A|} A`` equals ``G A G`` with ``G = (-1)^N``, which is how it
is applied to inhomogeneous blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .errors import StructuralError
from .exterior import DifferentialForm, Monomial, TorusBase, merge_sign
from .linalg import expm

EVEN, ODD = "even", "odd"


def degree_labels(ranks: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(ranks)), ranks)


@dataclass(frozen=True)
class FormMatrix:
    """Form-valued operator on a graded vector space with declared parity."""

    base: TorusBase
    ranks: tuple[int, ...]
    components: Mapping[Monomial, np.ndarray] = field(default_factory=dict)
    parity: str = EVEN
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        if self.parity not in (EVEN, ODD):
            raise StructuralError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        size = sum(ranks)
        shape = self.base.shape + (size, size)
        comps = {}
        for mono, arr in self.components.items():
            arr = np.array(np.broadcast_to(np.asarray(arr, dtype=complex), shape))
            arr.setflags(write=False)
            comps[tuple(mono)] = arr
        object.__setattr__(self, "components", comps)
        if self.check:
            bad = self.parity_violation()
            if bad > 1e-9:
                raise StructuralError(f"entries violate declared {self.parity} parity (size {bad:.3g})")

    # -- graded structure ---------------------------------------------------
    @property
    def size(self) -> int:
        return sum(self.ranks)

    @property
    def labels(self) -> np.ndarray:
        return degree_labels(self.ranks)

    @property
    def grading(self) -> np.ndarray:
        """Diagonal of (-1)^N."""
        return (-1.0) ** self.labels

    def shift_parity(self) -> np.ndarray:
        """Entry (a, b) is 1 where E^{deg b} -> E^{deg a} is an odd shift."""
        lab = self.labels
        return (lab[:, None] - lab[None, :]) % 2

    def parity_violation(self) -> float:
        want = 0 if self.parity == EVEN else 1
        shift = self.shift_parity()
        worst = 0.0
        for mono, arr in self.components.items():
            bad = ((shift + len(mono)) % 2) != want
            if bad.any():
                worst = max(worst, float(np.max(np.abs(arr[..., bad]), initial=0.0)))
        return worst

    def component(self, mono: Monomial) -> np.ndarray:
        arr = self.components.get(tuple(mono))
        if arr is None:
            return np.zeros(self.base.shape + (self.size, self.size), dtype=complex)
        return arr

    def _like(self, comps, parity=None, check=False) -> "FormMatrix":
        return FormMatrix(self.base, self.ranks, comps, parity or self.parity, check=check)

    def _compatible(self, other: "FormMatrix"):
        if other.base != self.base or other.ranks != self.ranks:
            raise StructuralError("form matrices on different bases or gradings")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        self._compatible(other)
        if other.parity != self.parity:
            raise StructuralError("cannot add operators of different parity")
        comps = dict(self.components)
        for m, a in other.components.items():
            comps[m] = comps[m] + a if m in comps else a
        return self._like(comps)

    def __neg__(self) -> "FormMatrix":
        return self._like({m: -a for m, a in self.components.items()})

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + (-other)

    def __mul__(self, scalar) -> "FormMatrix":
        if isinstance(scalar, FormMatrix):
            return NotImplemented
        return self._like({m: scalar * a for m, a in self.components.items()})

    __rmul__ = __mul__

    def twist(self, arr: np.ndarray) -> np.ndarray:
        """G A G with G = (-1)^N."""
        g = self.grading
        return g[:, None] * arr * g[None, :]

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        self._compatible(other)
        comps: dict[Monomial, np.ndarray] = {}
        for ma, a in self.components.items():
            for mb, b in other.components.items():
                sign, m = merge_sign(ma, mb)
                if sign == 0:
                    continue
                left = self.twist(a) if len(mb) % 2 else a
                term = sign * (left @ b)
                comps[m] = comps[m] + term if m in comps else term
        parity = EVEN if self.parity == other.parity else ODD
        return self._like(comps, parity)

    def identity_like(self) -> "FormMatrix":
        eye = np.broadcast_to(np.eye(self.size, dtype=complex), self.base.shape + (self.size, self.size))
        return FormMatrix(self.base, self.ranks, {(): eye}, EVEN)

    def body(self) -> np.ndarray:
        """The form-degree-0 component."""
        return self.component(())

    def nilpotent(self) -> "FormMatrix":
        return self._like({m: a for m, a in self.components.items() if m})

    def conj_by(self, p: np.ndarray) -> "FormMatrix":
        """p^{-1} M p entrywise; p must be degree-preserving and form-degree 0."""
        pinv = np.linalg.inv(p)
        return self._like({m: pinv @ a @ p for m, a in self.components.items()})

    def trace_form(self, weight: np.ndarray | None = None) -> DifferentialForm:
        """sum_I e_I tr[W M_I] for a diagonal weight W (default identity)."""
        w = np.ones(self.size) if weight is None else np.asarray(weight)
        comps = {}
        for m, a in self.components.items():
            comps[m] = np.einsum("...aa,a->...", a, w)
        return DifferentialForm(self.base, comps)

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(a), initial=0.0)) for a in self.components.values()), default=0.0)


# -- exponentials -------------------------------------------------------------

def _chains(dim: int):
    """Ordered sequences of nonempty, pairwise disjoint monomials (length >= 1)."""
    monos = [m for k in range(1, dim + 1) for m in combinations(range(dim), k)]
    out = []

    def extend(chain, used):
        if chain:
            out.append(tuple(chain))
        for m in monos:
            if not (set(m) & used):
                extend(chain + [m], used | set(m))

    extend([], set())
    return out


def _duhamel_block(body: np.ndarray, factors: list[np.ndarray]) -> np.ndarray:
    """Iterated Duhamel integral int e^{s0 B} A1 e^{s1 B} ... Am e^{sm B} over the simplex.

    Computed as the top-right block of exp of the block bidiagonal matrix
    with B on the diagonal and A1..Am on the superdiagonal.
    """
    r = body.shape[-1]
    m = len(factors)
    big = np.zeros(body.shape[:-2] + ((m + 1) * r, (m + 1) * r), dtype=complex)
    for i in range(m + 1):
        big[..., i * r:(i + 1) * r, i * r:(i + 1) * r] = body
    for i, a in enumerate(factors):
        big[..., i * r:(i + 1) * r, (i + 1) * r:(i + 2) * r] = a
    return expm(big)[..., 0:r, m * r:(m + 1) * r]


def form_exp(p: FormMatrix) -> FormMatrix:
    """exp of an even form matrix: body by scaling and squaring, nilpotent part by
    the finite Duhamel series (terminates at order <= dim of the base)."""
    if p.parity != EVEN:
        raise StructuralError("form_exp needs an even element")
    body = p.body()
    nil = {m: a for m, a in p.components.items() if m}
    comps: dict[Monomial, np.ndarray] = {(): expm(body)}
    for chain in _chains(p.base.dim):
        if any(m not in nil for m in chain):
            continue
        sign, total = 1, ()
        for m in chain:
            s, total = merge_sign(total, m)
            sign *= s
        if sign == 0:
            continue
        factors = []
        for j, m in enumerate(chain):
            later = sum(len(c) for c in chain[j + 1:])
            factors.append(p.twist(nil[m]) if later % 2 else nil[m])
        term = sign * _duhamel_block(body, factors)
        comps[total] = comps[total] + term if total in comps else term
    return FormMatrix(p.base, p.ranks, comps, EVEN, check=False)


def form_exp_taylor(p: FormMatrix, terms: int = 60) -> FormMatrix:
    """Brute-force Taylor series of exp in the algebra; an oracle for small p."""
    result = p.identity_like()
    power = p.identity_like()
    for n in range(1, terms):
        power = (power @ p) * (1.0 / n)
        result = result + power
    return result


def regular_representation(p: FormMatrix) -> np.ndarray:
    """Matrix of left multiplication by p on Lambda(R^dim) (x) E.

    Basis ordering: monomial blocks in ``base.monomials()`` order.
    """
    monos = p.base.monomials()
    index = {m: i for i, m in enumerate(monos)}
    r = p.size
    big = np.zeros(p.base.shape + (len(monos) * r, len(monos) * r), dtype=complex)
    for mk, a in p.components.items():
        for mj in monos:
            sign, m = merge_sign(mk, mj)
            if sign == 0:
                continue
            block = p.twist(a) if len(mj) % 2 else a
            i, j = index[m], index[mj]
            big[..., i * r:(i + 1) * r, j * r:(j + 1) * r] += sign * block
    return big


def from_regular_column(big: np.ndarray, like: FormMatrix, parity: str = EVEN) -> FormMatrix:
    """Recover the element whose action sends 1 (x) w to the first block column."""
    r = like.size
    comps = {m: big[..., i * r:(i + 1) * r, 0:r] for i, m in enumerate(like.base.monomials())}
    return FormMatrix(like.base, like.ranks, comps, parity, check=False)


__all__ = [
    "EVEN",
    "ODD",
    "FormMatrix",
    "form_exp",
    "form_exp_taylor",
    "regular_representation",
    "from_regular_column",
    "degree_labels",
]
