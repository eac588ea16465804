"""Finite-dimensional Bismut-Lott torsion forms of exact flat complexes over tori.

A complex 0 -> E^0 -> ... -> E^n -> 0 has constant boundary maps in a global
flat frame (the connection is d) and grid-sampled metrics.  With
X_t = (t d^* - d)/2 + omega/2 the torsion form is

    T = - int_0^inf { phi tr[(-1)^N (N/2) f'(X_t)] - chi'/2 f'(i sqrt(t)/2) } dt/t,

f'(z) = (1 + 2 z^2) e^{z^2}.  Two evaluations of the integrand exist:

* ``"algebra"`` builds X_t as a FormMatrix and exponentiates X_t^2 in the
  exterior-algebra-valued matrix algebra (scaling and squaring on the body,
  finite Duhamel series on the nilpotent part);
* ``"spectral"`` diagonalizes the body -t Delta/4 once per grid point, after
  which every node is a handful of divided differences of exp.

They agree to rounding; the spectral path is the default inside quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import ExactnessError, PositivityError, SchemaError, StructuralError
from .exterior import DifferentialForm, TorusBase
from .flat_bundle import (
    FlatBundleData,
    MetricFamily,
    _complex_matrix,
    kamber_tondeur_components,
    matrix_to_json,
    phi_factor,
    phi_normalize,
)
from .formmatrix import ODD, FormMatrix, degree_labels, form_exp
from .linalg import exp_divdiff1, exp_divdiff2_repeated
from .quadrature import QuadratureReport, integrate_dt_over_t

EXACTNESS_TOL = 1e-10
TOL_RANGE = (1e-12, 1e-4)


def _numerical_rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > EXACTNESS_TOL * max(1.0, sv[0])))


@dataclass(frozen=True)
class FlatComplexWithMetrics:
    """Exact complex of trivial flat bundles with constant boundary maps.

    ``boundaries[k]`` is the r_{k+1} x r_k matrix of E^k -> E^{k+1};
    ``metrics[k]`` is None exactly when r_k = 0.
    """

    base: TorusBase
    ranks: tuple[int, ...]
    boundaries: tuple[np.ndarray, ...]
    metrics: tuple[MetricFamily | None, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        if len(ranks) < 2 or any(r < 0 for r in ranks) or sum(ranks) == 0:
            raise StructuralError(f"need at least two nonnegative ranks, not all zero: {ranks}")
        if len(self.boundaries) != len(ranks) - 1:
            raise StructuralError(f"{len(ranks)} degrees need {len(ranks) - 1} boundary maps, got {len(self.boundaries)}")
        bds = []
        for k, b in enumerate(self.boundaries):
            b = np.array(b, dtype=complex)
            if b.size == 0:
                b = b.reshape(ranks[k + 1], ranks[k])
            if b.shape != (ranks[k + 1], ranks[k]):
                raise StructuralError(f"boundary {k} has shape {b.shape}, expected ({ranks[k + 1]}, {ranks[k]})")
            b.setflags(write=False)
            bds.append(b)
        if len(self.metrics) != len(ranks):
            raise StructuralError("one metric per degree is required")
        for k, (r, g) in enumerate(zip(ranks, self.metrics)):
            if r == 0:
                if g is not None:
                    raise StructuralError(f"degree {k} has rank 0 but a metric was given")
                continue
            if g is None or g.rank != r or g.base != self.base:
                raise StructuralError(f"metric in degree {k} missing or of wrong rank/base")
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "boundaries", tuple(bds))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        self._validate_exact()

    def _validate_exact(self):
        for k in range(len(self.boundaries) - 1):
            comp = self.boundaries[k + 1] @ self.boundaries[k]
            scale = max(1.0, float(np.max(np.abs(self.boundaries[k]), initial=0)) * float(
                np.max(np.abs(self.boundaries[k + 1]), initial=0)))
            if comp.size and float(np.max(np.abs(comp))) > 1e-12 * scale:
                raise ExactnessError(f"boundary maps square to nonzero at degree {k} -> {k + 2}", degree=k)
        ranks_d = [_numerical_rank(b) for b in self.boundaries]
        for k, r in enumerate(self.ranks):
            incoming = ranks_d[k - 1] if k > 0 else 0
            outgoing = ranks_d[k] if k < len(ranks_d) else 0
            if incoming + outgoing != r:
                raise ExactnessError(
                    f"complex is not exact at degree {k}: cohomology of dimension {r - incoming - outgoing}",
                    degree=k,
                )

    # -- graded data --------------------------------------------------------
    @property
    def size(self) -> int:
        return sum(self.ranks)

    @property
    def labels(self) -> np.ndarray:
        return degree_labels(self.ranks)

    @property
    def grading(self) -> np.ndarray:
        return (-1.0) ** self.labels

    @property
    def chi_prime(self) -> int:
        """sum_k (-1)^k k r_k."""
        return sum((-1) ** k * k * r for k, r in enumerate(self.ranks))

    def offsets(self) -> list[int]:
        return list(np.concatenate([[0], np.cumsum(self.ranks)]).astype(int))

    def boundary_matrix(self) -> np.ndarray:
        off = self.offsets()
        d = np.zeros((self.size, self.size), dtype=complex)
        for k, b in enumerate(self.boundaries):
            d[off[k + 1]:off[k + 2], off[k]:off[k + 1]] = b
        return d

    def metric_samples(self) -> np.ndarray:
        """Block-diagonal metric of the total space, shape grid + (R, R)."""
        off = self.offsets()
        g = np.zeros(self.base.shape + (self.size, self.size), dtype=complex)
        for k, m in enumerate(self.metrics):
            if m is not None:
                g[..., off[k]:off[k + 1], off[k]:off[k + 1]] = m.samples
        return g

    def adjoint_boundary(self) -> np.ndarray:
        """d^* = g^{-1} d^dagger g pointwise."""
        g = self.metric_samples()
        d = self.boundary_matrix()
        return np.linalg.solve(g, np.conj(d.T) @ g)

    def omega_components(self) -> list[np.ndarray]:
        """Block-diagonal Kamber-Tondeur components omega_i, one per axis."""
        return kamber_tondeur_components(self.metric_samples(), self.base)

    def bundles(self) -> list[tuple[int, FlatBundleData]]:
        return [(k, FlatBundleData.with_metric(m)) for k, m in enumerate(self.metrics) if m is not None]

    # -- serialization ------------------------------------------------------
    @classmethod
    def from_json(cls, obj: Mapping, base: TorusBase) -> "FlatComplexWithMetrics":
        try:
            ranks = [int(r) for r in obj["ranks"]]
            bds = []
            for k, b in enumerate(obj["boundaries"]):
                mat = _complex_matrix(b) if np.size(b) else np.zeros((ranks[k + 1], ranks[k]), dtype=complex)
                bds.append(mat)
            metrics = [None if m is None else MetricFamily.from_json(m, base) for m in obj["metrics"]]
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed complex JSON: {exc!r}") from exc
        return cls(base, tuple(ranks), tuple(bds), tuple(metrics))


# -- superconnection ----------------------------------------------------------

def superconnection_Xt(cx: FlatComplexWithMetrics, t: float) -> FormMatrix:
    """X_t = (t d^* - d)/2 + omega/2 as an odd FormMatrix."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    d = cx.boundary_matrix()
    comps = {(): 0.5 * (t * cx.adjoint_boundary() - d)}
    for i, w in enumerate(cx.omega_components()):
        comps[(i,)] = 0.5 * w
    return FormMatrix(cx.base, cx.ranks, comps, ODD)


def fprime_of(x: FormMatrix) -> FormMatrix:
    """f'(X) = (1 + 2 X^2) e^{X^2} for an odd X."""
    if x.parity != ODD:
        raise StructuralError("f' is applied to odd elements")
    x2 = x @ x
    e = form_exp(x2)
    return e + (x2 @ e) * 2.0


def counterterm(t) -> np.ndarray:
    """f'(i sqrt(t)/2) = (1 - t/2) e^{-t/4}."""
    t = np.asarray(t, dtype=float)
    return (1.0 - t / 2.0) * np.exp(-t / 4.0)


def trace_weight(cx: FlatComplexWithMetrics) -> np.ndarray:
    """Diagonal of (-1)^N N/2."""
    return cx.grading * cx.labels / 2.0


class _SpectralIntegrand:
    """Integrand evaluator with the body diagonalized once per grid point.

    g = L L^dagger, S = L^dagger Delta L^{-dagger} is Hermitian, and a per-degree
    eigendecomposition S = U mu U^dagger gives Delta = V mu V^{-1} with V
    block-diagonal, so it commutes with (-1)^N and the trace weight.
    """

    def __init__(self, cx: FlatComplexWithMetrics):
        self.cx = cx
        self.dim = cx.base.dim
        npts = cx.base.npoints
        size = cx.size
        g = cx.metric_samples().reshape((npts, size, size))
        d = cx.boundary_matrix()
        dstar = np.linalg.solve(g, np.conj(d.T) @ g)
        lap = d @ dstar + dstar @ d

        chol = np.linalg.cholesky(g)
        v = np.zeros_like(g)
        vinv = np.zeros_like(g)
        mu = np.zeros((npts, size))
        off = cx.offsets()
        for k in range(len(cx.ranks)):
            sl = slice(off[k], off[k + 1])
            if off[k] == off[k + 1]:
                continue
            lk = chol[:, sl, sl]
            lk_h = np.conj(np.swapaxes(lk, -1, -2))
            lk_inv_h = np.linalg.inv(lk_h)
            s = lk_h @ lap[:, sl, sl] @ lk_inv_h
            s = 0.5 * (s + np.conj(np.swapaxes(s, -1, -2)))
            w, u = np.linalg.eigh(s)
            mu[:, sl] = w
            v[:, sl, sl] = lk_inv_h @ u
            vinv[:, sl, sl] = np.conj(np.swapaxes(u, -1, -2)) @ lk_h
        if np.min(mu) <= 0:
            raise ExactnessError("Laplacian of the complex has a kernel; complex is not exact")
        self.mu = mu
        self.mu_min = float(np.min(mu))
        self.weight = trace_weight(cx)
        self.gamma = cx.grading
        self.gg = self.gamma[:, None] * self.gamma[None, :]

        def tilde(a):
            return vinv @ a @ v

        omegas = [w.reshape((npts, size, size)) for w in kamber_tondeur_components(
            cx.metric_samples(), cx.base)]
        # P_i(t) = [omega_i, t d^* - d]/4 = t A_i + B_i in the eigenbasis
        self.a = [tilde(w @ dstar - dstar @ w) / 4.0 for w in omegas]
        self.b = [tilde(-(w @ d - d @ w)) / 4.0 for w in omegas]
        self.p12 = tilde(omegas[0] @ omegas[1] - omegas[1] @ omegas[0]) / 4.0 if self.dim == 2 else None

    def degree_values(self, t: float) -> dict[int, np.ndarray]:
        """Pointwise values of the integrand, keyed by form degree (complex, flat grid)."""
        lam = -t * self.mu / 4.0
        elam = np.exp(lam)
        w = self.weight
        deg0 = np.einsum("pa,a->p", (1.0 + 2.0 * lam) * elam, w)
        deg0 = deg0 - 0.5 * self.cx.chi_prime * counterterm(t)
        out = {0: deg0.astype(complex)}
        if self.dim == 2:
            p1 = t * self.a[0] + self.b[0]
            p2 = t * self.a[1] + self.b[1]
            la, lc = lam[:, :, None], lam[:, None, :]
            d1 = exp_divdiff1(la, lc)  # D1(lam_a, lam_c)
            d2 = exp_divdiff2_repeated(la, lc)  # D2(lam_a, lam_a, lam_c)
            gg = self.gg
            p12d = np.einsum("paa->pa", self.p12)
            e12d = p12d * elam + np.einsum("pac,pca,pac->pa", gg * p1, p2, d2) - np.einsum(
                "pac,pca,pac->pa", gg * p2, p1, d2)
            # E_i[c, a] = P_i[c, a] D1(lam_c, lam_a); D1 is symmetric
            e1_t = p1 * np.swapaxes(d1, -1, -2)
            e2_t = p2 * np.swapaxes(d1, -1, -2)
            cross = np.einsum("pac,pca->pa", gg * p1, e2_t) - np.einsum("pac,pca->pa", gg * p2, e1_t)
            f12 = e12d * (1.0 + 2.0 * lam) + 2.0 * (p12d * elam + cross)
            out[2] = phi_factor(2) * np.einsum("pa,a->p", f12, w)
        return out

    def vector(self, t: float) -> np.ndarray:
        vals = self.degree_values(t)
        return np.concatenate([np.concatenate([v.real, v.imag]) for _, v in sorted(vals.items())])

    __call__ = vector

    def unpack(self, vec: np.ndarray) -> dict[int, np.ndarray]:
        npts = self.cx.base.npoints
        degrees = [0, 2] if self.dim == 2 else [0]
        out = {}
        for i, k in enumerate(degrees):
            chunk = vec[2 * i * npts:2 * (i + 1) * npts]
            out[k] = chunk[:npts] + 1j * chunk[npts:]
        return out


def _monomial_for_degree(k: int, dim: int):
    return tuple(range(k)) if k <= dim else None


def _form_from_degrees(base: TorusBase, vals: Mapping[int, np.ndarray]) -> DifferentialForm:
    comps = {}
    for k, arr in vals.items():
        comps[_monomial_for_degree(k, base.dim)] = np.asarray(arr).reshape(base.shape)
    return DifferentialForm(base, comps)


def torsion_integrand(cx: FlatComplexWithMetrics, t: float, method: str = "spectral") -> DifferentialForm:
    """The braced integrand of the torsion form at time t (before the -dt/t measure)."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if method == "spectral":
        return _form_from_degrees(cx.base, _SpectralIntegrand(cx).degree_values(t))
    if method != "algebra":
        raise ValueError(f"unknown integrand method {method!r}")
    fp = fprime_of(superconnection_Xt(cx, t))
    tr = phi_normalize(fp.trace_form(trace_weight(cx)))
    ct = DifferentialForm.constant(cx.base, 0.5 * cx.chi_prime * counterterm(t))
    return tr - ct


@dataclass
class TorsionResult:
    """An even real form plus the quadrature report that produced it."""

    form: DifferentialForm
    report: QuadratureReport
    provenance: dict = field(default_factory=dict)

    def degree(self, k: int) -> DifferentialForm:
        return self.form.degree_part(k)

    def __add__(self, other: "TorsionResult") -> "TorsionResult":
        return TorsionResult(self.form + other.form, self.report.merged(other.report),
                             {"terms": [self.provenance, other.provenance]})

    def __neg__(self) -> "TorsionResult":
        return TorsionResult(-self.form, self.report, self.provenance)

    def __sub__(self, other: "TorsionResult") -> "TorsionResult":
        return self + (-other)

    def to_json(self) -> dict:
        out = {"form": self.form.to_json()}
        out.update(self.report.to_json())
        if self.provenance:
            out["provenance"] = self.provenance
        return out


def _check_tol(tol: float):
    lo, hi = TOL_RANGE
    if not lo <= tol <= hi:
        raise ValueError(f"tol must lie in [{lo:g}, {hi:g}], got {tol:g}")


def torsion_form(cx: FlatComplexWithMetrics, tol: float = 1e-9, method: str = "spectral") -> TorsionResult:
    """Torsion form by adaptive quadrature in u = log t.

    The large-t end is placed from the smallest Laplacian eigenvalue over the
    grid; the window then grows until edge panels are below tol/10.
    """
    _check_tol(tol)
    spec = _SpectralIntegrand(cx)
    if method == "spectral":
        fn = spec
    elif method == "algebra":
        fn = _AlgebraVector(cx, spec)
    else:
        raise ValueError(f"unknown integrand method {method!r}")
    rate = min(spec.mu_min, 1.0)
    t_lo = tol * 1e-2
    t_hi = 4.0 * (np.log(1.0 / tol) + 10.0) / rate
    vec, report = integrate_dt_over_t(fn, tol, t_lo, t_hi)
    vals = spec.unpack(-vec)
    imag = max(float(np.max(np.abs(v.imag))) for v in vals.values())
    report.imag_residual = imag
    if imag > 10 * tol + 1e-12:
        raise StructuralError(f"torsion form has imaginary part {imag:.3g}; sign conventions violated")
    form = _form_from_degrees(cx.base, {k: v.real for k, v in vals.items()})
    return TorsionResult(form, report, {"ranks": list(cx.ranks), "mu_min": spec.mu_min})


class _AlgebraVector:
    """Generic-algebra integrand packed like the spectral one (testing path)."""

    def __init__(self, cx, spec):
        self.cx = cx
        self.dim = cx.base.dim

    def __call__(self, t):
        form = torsion_integrand(self.cx, t, method="algebra")
        parts = [form.component(())] + ([form.component((0, 1))] if self.dim == 2 else [])
        return np.concatenate([np.concatenate([p.ravel().real, p.ravel().imag]) for p in parts])


# -- derived torsions ---------------------------------------------------------

def metric_change_torsion(g: MetricFamily, g2: MetricFamily, tol: float = 1e-9) -> TorsionResult:
    """Torsion of 0 -> E -> E -> 0 (identity map) with metrics g, g2."""
    if g.rank != g2.rank or g.base != g2.base:
        raise StructuralError("metrics differ in rank or base")
    eye = np.eye(g.rank, dtype=complex)
    cx = FlatComplexWithMetrics(g.base, (g.rank, g.rank), (eye,), (g, g2))
    return torsion_form(cx, tol)


def quotient_projection(embed: np.ndarray, complement: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Projection E -> E/F in the coordinates of a constant complement of im(embed).

    The default complement is the standard-orthogonal complement of the image.
    Returns (projection, complement).
    """
    embed = np.asarray(embed, dtype=complex)
    re, rf = embed.shape
    if _numerical_rank(embed) != rf:
        raise StructuralError("embedding is not injective")
    if complement is None:
        complement = null_space(np.conj(embed.T)) if rf else np.eye(re, dtype=complex)
    complement = np.asarray(complement, dtype=complex).reshape(re, re - rf)
    full = np.hstack([embed, complement])
    if _numerical_rank(full) != re:
        raise StructuralError("complement does not span a complement of the embedded subspace")
    proj = np.linalg.inv(full)[rf:, :]
    return proj, complement


def ses_torsion(
    gF: MetricFamily | None,
    gE: MetricFamily,
    gQ: MetricFamily,
    embed: np.ndarray,
    tol: float = 1e-9,
    complement: np.ndarray | None = None,
) -> TorsionResult:
    """Torsion of 0 -> F -> E -> E/F -> 0 in degrees 0, 1, 2.

    gQ is read in the coordinates of ``complement`` (see quotient_projection);
    gF may be None when F = 0.
    """
    embed = np.asarray(embed, dtype=complex)
    re, rf = embed.shape
    if re != gE.rank or gQ.rank != re - rf or (rf and (gF is None or gF.rank != rf)):
        raise StructuralError("metric ranks do not match the embedding")
    proj, comp = quotient_projection(embed, complement)
    cx = FlatComplexWithMetrics(gE.base, (rf, re, re - rf), (embed, proj), (gF if rf else None, gE, gQ))
    res = torsion_form(cx, tol)
    res.provenance["quotient_complement"] = matrix_to_json(comp)
    return res


@dataclass(frozen=True)
class FiltrationData:
    """Flag 0 = V_0 < V_1 < ... < V_r = C^rank of constant subspaces.

    ``flag[j-1]`` is a rank x dim(V_j) basis matrix of V_j.  The quotient
    V_j/V_{j-1} is coordinatized by the images of the trailing
    dim(V_j) - dim(V_{j-1}) columns of that basis, and ``factor_metrics[j-1]``
    is a constant metric in those coordinates.
    """

    flag: tuple[np.ndarray, ...]
    factor_metrics: tuple[np.ndarray, ...]

    def __post_init__(self):
        flag = tuple(np.array(b, dtype=complex) for b in self.flag)
        mets = tuple(np.atleast_2d(np.array(m, dtype=complex)) for m in self.factor_metrics)
        if not flag:
            raise StructuralError("flag must have at least one subspace")
        rank = flag[0].shape[0]
        dims = []
        for j, b in enumerate(flag):
            if b.ndim != 2 or b.shape[0] != rank:
                raise StructuralError(f"flag entry {j + 1} must be a {rank} x d basis matrix")
            if _numerical_rank(b) != b.shape[1]:
                raise StructuralError(f"flag entry {j + 1} has dependent columns")
            dims.append(b.shape[1])
        if any(b <= a for a, b in zip([0] + dims, dims)):
            raise StructuralError(f"flag dimensions must increase strictly, got {dims}")
        if dims[-1] != rank:
            raise StructuralError("last flag entry must span the whole fiber")
        if len(mets) != len(flag):
            raise StructuralError("one factor metric per flag step is required")
        for j, m in enumerate(mets):
            want = dims[j] - (dims[j - 1] if j else 0)
            if m.shape != (want, want):
                raise StructuralError(f"factor metric {j + 1} must be {want} x {want}")
            if np.max(np.abs(m - np.conj(m.T))) > 1e-12 * max(1.0, np.max(np.abs(m))):
                raise PositivityError(f"factor metric {j + 1} is not Hermitian")
            if np.min(np.linalg.eigvalsh(m)) <= 0:
                raise PositivityError(f"factor metric {j + 1} is not positive definite")
        object.__setattr__(self, "flag", flag)
        object.__setattr__(self, "factor_metrics", mets)
        for j in range(1, len(flag)):
            self.inclusion(j + 1)

    @property
    def rank(self) -> int:
        return self.flag[0].shape[0]

    @property
    def dims(self) -> list[int]:
        return [b.shape[1] for b in self.flag]

    def inclusion(self, j: int) -> np.ndarray:
        """Matrix of V_{j-1} -> V_j in the flag bases (j is 1-based)."""
        bj = self.flag[j - 1]
        if j == 1:
            return np.zeros((bj.shape[1], 0), dtype=complex)
        prev = self.flag[j - 2]
        coef, *_ = np.linalg.lstsq(bj, prev, rcond=None)
        if np.max(np.abs(bj @ coef - prev)) > 1e-10 * max(1.0, np.max(np.abs(prev))):
            raise StructuralError(f"flag entry {j - 1} is not contained in entry {j}")
        return coef

    def complement(self, j: int) -> np.ndarray:
        dj = self.dims[j - 1]
        dprev = self.dims[j - 2] if j > 1 else 0
        return np.eye(dj, dtype=complex)[:, dprev:]

    @classmethod
    def from_json(cls, obj: Mapping) -> "FiltrationData":
        """{"flag": [[column, ...], ...], "factor_metrics": [matrix, ...]}; columns are basis vectors."""
        try:
            flag = [_complex_matrix(cols).T for cols in obj["flag"]]
            mets = [_complex_matrix(m) for m in obj["factor_metrics"]]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed filtration JSON: {exc!r}") from exc
        return cls(tuple(flag), tuple(mets))


def filtration_torsion(bundle: FlatBundleData, filt: FiltrationData, tol: float = 1e-9) -> TorsionResult:
    """- sum_j T(g^{E_{j-1}}, g^{E_j}, g^{F_j}) with restricted metrics on the E_j."""
    if filt.rank != bundle.rank:
        raise StructuralError(f"filtration of C^{filt.rank} does not fit a rank {bundle.rank} bundle")
    base = bundle.base
    total = None
    for j in range(1, len(filt.flag) + 1):
        gj = MetricFamily(base, filt.dims[j - 1], bundle.metric.restrict(filt.flag[j - 1]))
        gprev = MetricFamily(base, filt.dims[j - 2], bundle.metric.restrict(filt.flag[j - 2])) if j > 1 else None
        gq = MetricFamily.constant(base, filt.factor_metrics[j - 1])
        term = ses_torsion(gprev, gj, gq, filt.inclusion(j), tol, complement=filt.complement(j))
        total = -term if total is None else total - term
    return total


def torsion_class_rep(bundle: FlatBundleData, filt: FiltrationData, tol: float = 1e-9) -> DifferentialForm:
    """Positive-degree part of the filtration torsion."""
    return filtration_torsion(bundle, filt, tol).form.positive_part()


def graded_torsion_class(
    items: Sequence[tuple[int, FlatBundleData, FiltrationData]], tol: float = 1e-9
) -> DifferentialForm:
    """sum_k (-1)^k torsion_class_rep of the degree-k item."""
    if not items:
        raise StructuralError("no items given")
    base = items[0][1].base
    total = DifferentialForm.zero(base)
    for degree, bundle, filt in items:
        if bundle.base != base:
            raise StructuralError("bundles live on different bases")
        total = total + (-1) ** degree * torsion_class_rep(bundle, filt, tol)
    return total


def a_double_prime_square_defect(cx: FlatComplexWithMetrics, seed: int = 0, modes: int = 3) -> float:
    """Sup norm of (A'')^2 s for a random band-limited form-valued section s.

    A'' = d + boundary, with Koszul signs: the boundary acts on e_I (x) w as
    (-1)^{|I|} e_I (x) dw and the connection as sum_i e_i ^ e_I (x) d_i w.
    """
    from .exterior import merge_sign, spectral_derivative

    base = cx.base
    rng = np.random.default_rng(seed)
    xs = base.coords()
    size = cx.size
    sec = {}
    for mono in base.monomials():
        w = np.zeros(base.shape + (size,), dtype=complex)
        for _ in range(modes):
            mode = rng.integers(-3, 4, size=base.dim)
            phase = np.exp(1j * sum(k * x for k, x in zip(mode, xs))) if base.dim else np.array(1.0)
            w = w + phase[..., None] * (rng.normal(size=size) + 1j * rng.normal(size=size))
        sec[mono] = w
    d = cx.boundary_matrix()

    def apply(s):
        out = {}
        for mono, w in s.items():
            term = (-1) ** len(mono) * (w @ d.T)
            out[mono] = out[mono] + term if mono in out else term
            for axis in range(base.dim):
                sign, m = merge_sign((axis,), mono)
                if sign:
                    term = sign * spectral_derivative(w, axis, base)
                    out[m] = out[m] + term if m in out else term
        return out

    sq = apply(apply(sec))
    return max((float(np.max(np.abs(v), initial=0.0)) for v in sq.values()), default=0.0)


__all__ = [
    "FlatComplexWithMetrics",
    "FiltrationData",
    "TorsionResult",
    "superconnection_Xt",
    "fprime_of",
    "counterterm",
    "torsion_integrand",
    "torsion_form",
    "metric_change_torsion",
    "quotient_projection",
    "ses_torsion",
    "filtration_torsion",
    "torsion_class_rep",
    "graded_torsion_class",
    "a_double_prime_square_defect",
]
