"""Batched dense linear algebra helpers used by the form-matrix algebra."""

from __future__ import annotations

import numpy as np

# Pade(13) coefficients and the theta_13 scaling threshold of Higham (2005).
_PADE13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a stack ``(..., n, n)`` by scaling and squaring.

    Each matrix gets its own number of squarings from its 1-norm.
    """
    a = np.asarray(a)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError("expm needs square matrices")
    n = a.shape[-1]
    stack = a.reshape((-1, n, n)).astype(complex if np.iscomplexobj(a) else float)
    if n == 0:
        return np.zeros_like(a)
    norms = np.abs(stack).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.ceil(np.log2(norms / _THETA13))
    s = np.where(np.isfinite(s), np.maximum(s, 0), 0).astype(int)
    x = stack / (2.0 ** s)[:, None, None]
    b = _PADE13
    ident = np.eye(n)
    x2 = x @ x
    x4 = x2 @ x2
    x6 = x4 @ x2
    u = x @ (x6 @ (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident)
    v = x6 @ (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident
    f = np.linalg.solve(v - u, v + u)
    for k in range(int(s.max(initial=0))):
        sel = s > k
        f[sel] = f[sel] @ f[sel]
    return f.reshape(a.shape)


def hermitian_part_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), initial=0.0))


def phi1(z: np.ndarray) -> np.ndarray:
    """expm1(z)/z with the removable singularity filled in."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z / 2.0, np.expm1(safe) / safe)


def exp_divdiff1(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """First divided difference of exp at real points: (e^x - e^y)/(x - y)."""
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    return np.exp(hi) * phi1(lo - hi)


def exp_divdiff2(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Second divided difference of exp at real points x, y, z.

    Shifted by the largest argument; a Taylor series in the complete
    homogeneous polynomials is used when the spread is small, the
    recursive difference formula otherwise.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    pts = np.sort(np.stack([x, y, z]), axis=0)
    top = pts[2]
    a = pts[1] - top  # <= 0
    b = pts[0] - top  # <= a
    spread = -b

    # Taylor: [0, a, b] exp = sum_n h_n(a, b) / (n + 2)!, h_n = sum_{i+j=n} a^i b^j.
    taylor = np.zeros_like(a)
    h = np.ones_like(a)
    apow = np.ones_like(a)
    fact = 2.0
    for n in range(30):
        taylor = taylor + h / fact
        apow = apow * a
        h = h * b + apow
        fact *= n + 3

    safe_b = np.where(spread < 0.5, -1.0, b)
    recursive = (phi1(a) - np.exp(a) * phi1(b - a)) / (-safe_b)
    return np.exp(top) * np.where(spread < 0.5, taylor, recursive)


def _phi2_series(u: np.ndarray, coef) -> np.ndarray:
    out = np.zeros_like(u)
    for c in reversed(coef):
        out = out * u + c
    return out


# (e^u - 1 - u)/u^2 = sum u^n/(n+2)!  and  (1 - e^u (1 - u))/u^2 = sum (n+1) u^n/(n+2)!
_PHI2 = [1.0 / factorial for factorial in np.cumprod(np.arange(1.0, 22.0))[1:]]
_PSI2 = [(n + 1) * c for n, c in enumerate(_PHI2)]


def exp_divdiff2_repeated(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second divided difference [x, x, y] of exp, for real x, y.

    Written against the larger argument so nothing overflows or cancels.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    d = y - x
    neg = d <= 0
    top = np.where(neg, x, y)
    # v = -|d| <= 0 in both branches
    v = -np.abs(d)
    small = v > -0.5
    safe = np.where(small, -1.0, v)
    # d <= 0: (e^v - 1 - v)/v^2 ; d > 0: (1 - e^v (1 - v))/v^2
    lo = np.where(small, _phi2_series(v, _PHI2), (np.expm1(safe) - safe) / safe**2)
    hi = np.where(small, _phi2_series(v, _PSI2), (1.0 - np.exp(safe) * (1.0 - safe)) / safe**2)
    return np.exp(top) * np.where(neg, lo, hi)
