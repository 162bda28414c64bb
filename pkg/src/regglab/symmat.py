"""Dense real symmetric linear algebra sized for n up to a few hundred.

Everything is built from two kernels: cyclic Jacobi rotations for the full
spectrum and a symmetric triangular factorisation for the determinant.  The
determinant is kept in log-space with a separated sign, because the matrices
of interest have entries like d^n that overflow any fixed-width float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, SizeMismatch, Singular

# A pivot this much smaller than the largest one seen is treated as zero.
_PIVOT_RTOL = 1e-13


class SymmetricMatrix:
    """n x n real matrix with exact entrywise symmetry enforced on input."""

    __slots__ = ("a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise SizeMismatch(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise SizeMismatch("matrix is not exactly symmetric")
        a.setflags(write=False)
        self.a = a

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __getitem__(self, idx):
        return self.a[idx]

    def as_array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self.a

    def __repr__(self):
        return f"SymmetricMatrix(n={self.n})"

    @staticmethod
    def identity(n: int) -> "SymmetricMatrix":
        return SymmetricMatrix(np.eye(n))


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues, sorted descending, plus the worst eigenpair residual."""

    values: np.ndarray
    basis_residual: float = field(default=0.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)


def eigenvalues(m: SymmetricMatrix, tol: float = 1e-12, max_sweeps: int = 100) -> Spectrum:
    """Full spectrum by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm drops below tol * ||M||_F,
    raising NoConvergence after max_sweeps.  n <= ~200 keeps this trivial.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = m.a.copy()
    n = a.shape[0]
    v = np.eye(n)
    norm_f = math.sqrt(float((a * a).sum()))
    if norm_f == 0.0:
        return Spectrum(values=np.zeros(n), basis_residual=0.0)
    converged = False
    for _ in range(max_sweeps):
        off = math.sqrt(float((a * a).sum() - (np.diag(a) ** 2).sum()))
        if off <= tol * norm_f:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        converged = False
    if not converged:
        off = math.sqrt(float((a * a).sum() - (np.diag(a) ** 2).sum()))
        if off > tol * norm_f:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(a).copy()
    residual = float(np.abs(m.a @ v - v * vals[np.newaxis, :]).max())
    order = np.argsort(-vals, kind="stable")
    return Spectrum(values=vals[order], basis_residual=residual)


def determinant(m: SymmetricMatrix) -> tuple[int, float]:
    """(sign, log|det|) via unpivoted symmetric elimination.

    Returns sign 0 (with log_abs = -inf) as soon as a pivot underflows below
    _PIVOT_RTOL of the largest pivot seen, which is how exact singularity
    (e.g. bipartite signless Laplacians) presents in floating point.
    """
    a = m.a.copy()
    n = a.shape[0]
    sign = 1
    log_abs = 0.0
    max_piv = 0.0
    for k in range(n):
        piv = a[k, k]
        apiv = abs(piv)
        if apiv > max_piv:
            max_piv = apiv
        if apiv <= _PIVOT_RTOL * max_piv or apiv == 0.0:
            return 0, float("-inf")
        if piv < 0.0:
            sign = -sign
        log_abs += math.log(apiv)
        if k + 1 < n:
            col = a[k + 1 :, k] / piv
            a[k + 1 :, k + 1 :] -= np.outer(col, a[k, k + 1 :])
    return sign, log_abs


def inverse(m: SymmetricMatrix) -> SymmetricMatrix:
    """Gauss-Jordan inverse with partial pivoting; requires nonzero determinant."""
    sign, _ = determinant(m)
    if sign == 0:
        raise Singular("matrix is singular to working precision")
    n = m.n
    aug = np.hstack([m.a.copy(), np.eye(n)])
    for col in range(n):
        piv_row = col + int(np.argmax(np.abs(aug[col:, col])))
        if aug[piv_row, col] == 0.0:
            raise Singular("zero pivot during elimination")
        if piv_row != col:
            aug[[col, piv_row]] = aug[[piv_row, col]]
        aug[col] /= aug[col, col]
        for r in range(n):
            if r != col and aug[r, col] != 0.0:
                aug[r] -= aug[r, col] * aug[col]
    inv = aug[:, n:]
    return SymmetricMatrix((inv + inv.T) / 2.0)
