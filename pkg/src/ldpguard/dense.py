"""Small dense kernels shared by the solver, the case generator and the oracles.

Everything works on float64 numpy arrays. Products are accumulated in a fixed
left-to-right order so that results are bit-reproducible regardless of the
BLAS build underneath numpy.
"""

from __future__ import annotations

from fractions import Fraction
import math

import numpy as np

__all__ = [
    "RankDeficient",
    "as_vec",
    "as_mat",
    "mat_vec",
    "transpose_mat_vec",
    "mat_mat",
    "mat_vec_floor",
    "ls_solve_subset",
    "is_invertible",
    "lu_solve",
]

DEFAULT_RANK_TOL = 1e-12


class RankDeficient(np.linalg.LinAlgError):
    """Raised when a least-squares sub-solve meets dependent columns."""

    def __init__(self, rank: int, ncols: int):
        super().__init__(f"column subset is rank deficient (rank {rank} < {ncols})")
        self.rank = rank
        self.ncols = ncols


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_vec(values) -> np.ndarray:
    """Copy `values` into a read-only finite float64 vector."""
    v = np.array(values, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return _frozen(v)


def as_mat(values) -> np.ndarray:
    """Copy `values` into a read-only finite float64 matrix with m, n >= 1."""
    a = np.array(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must be at least 1x1, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return _frozen(a)


def mat_vec(M, v) -> np.ndarray:
    """Return ``M @ v`` with every row summed left to right."""
    M = np.asarray(M, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise ValueError(f"mat_vec: shapes {M.shape} and {v.shape} do not agree")
    if M.shape[1] == 0:
        return np.zeros(M.shape[0])
    out = M[:, 0] * v[0]
    for j in range(1, M.shape[1]):
        out = out + M[:, j] * v[j]
    return out


def transpose_mat_vec(M, v) -> np.ndarray:
    """Return ``M.T @ v``; bit-identical to ``mat_vec(M.T, v)``."""
    M = np.asarray(M, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if M.ndim != 2 or v.ndim != 1 or M.shape[0] != v.shape[0]:
        raise ValueError(
            f"transpose_mat_vec: shapes {M.shape} and {v.shape} do not agree"
        )
    if M.shape[0] == 0:
        return np.zeros(M.shape[1])
    out = M[0, :] * v[0]
    for i in range(1, M.shape[0]):
        out = out + M[i, :] * v[i]
    return out


def mat_mat(A, B) -> np.ndarray:
    """Return ``A @ B`` built column by column from :func:`mat_vec`."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ValueError(f"mat_mat: shapes {A.shape} and {B.shape} do not agree")
    out = np.empty((A.shape[0], B.shape[1]))
    for j in range(B.shape[1]):
        out[:, j] = mat_vec(A, B[:, j])
    return out


def _floor_to_double(q: Fraction) -> float:
    d = float(q)  # correctly rounded
    if Fraction(d) > q:
        d = math.nextafter(d, -math.inf)
    return d


def mat_vec_floor(M, v, offset=None) -> np.ndarray:
    """Largest doubles not exceeding the exact rational value of ``M @ v + offset``.

    Every double is an exact rational, so the result ``y`` satisfies
    ``M @ v + offset >= y`` in exact arithmetic.
    """
    M = np.asarray(M, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise ValueError(f"mat_vec_floor: shapes {M.shape} and {v.shape} do not agree")
    vq = [Fraction(float(x)) for x in v]
    off = [Fraction(0)] * M.shape[0] if offset is None else [
        Fraction(float(c)) for c in np.asarray(offset, dtype=np.float64)
    ]
    out = np.empty(M.shape[0])
    for i, row in enumerate(M):
        acc = off[i]
        for a, x in zip(row, vq):
            if a != 0.0 and x:
                acc += Fraction(float(a)) * x
        out[i] = _floor_to_double(acc)
    return out


def _householder_r(A: np.ndarray, rhs: np.ndarray):
    """Triangularise ``A`` in place with Householder reflections, applying them to ``rhs``."""
    m, n = A.shape
    for j in range(min(m, n)):
        x = A[j:, j]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        beta = -alpha if x[0] >= 0.0 else alpha
        v = x.copy()
        v[0] -= beta
        vv = v @ v
        if vv == 0.0:
            continue
        c = 2.0 / vv
        if j + 1 < n:
            A[j:, j + 1:] -= np.outer(v, c * (v @ A[j:, j + 1:]))
        rhs[j:] -= v * (c * (v @ rhs[j:]))
        A[j, j] = beta
        A[j + 1:, j] = 0.0
    return A, rhs


def _back_substitute(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = R.shape[0]
    z = np.zeros(k)
    for i in range(k - 1, -1, -1):
        z[i] = (b[i] - R[i, i + 1:] @ z[i + 1:]) / R[i, i]
    return z


def ls_solve_subset(M, f, cols, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Least-squares fit of `f` by the columns `cols` of `M`.

    Parameters
    ----------
    M : (m, n) array_like
    f : (m,) array_like
    cols : sequence of int
        Distinct column indices, non-empty.
    tol : float
        Rank test: every diagonal entry of R must exceed ``tol * max|R_jj|``.

    Returns
    -------
    z : ndarray, shape (len(cols),)
        Minimiser of ``||M[:, cols] @ z - f||_2``.

    Raises
    ------
    RankDeficient
        If the selected columns fail the pivot ratio test.
    """
    M = np.asarray(M, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    cols = list(cols)
    if not cols:
        raise ValueError("cols must be non-empty")
    if len(set(cols)) != len(cols):
        raise ValueError("cols must be distinct")
    if min(cols) < 0 or max(cols) >= M.shape[1]:
        raise ValueError("column index out of range")
    if f.shape != (M.shape[0],):
        raise ValueError(f"ls_solve_subset: shapes {M.shape} and {f.shape} do not agree")
    k = len(cols)
    A, rhs = _householder_r(M[:, cols].copy(), f.copy())
    diag = np.abs(np.diagonal(A))
    if diag.size < k:
        raise RankDeficient(int(np.count_nonzero(diag)), k)
    dmax = diag.max()
    rank = int(np.count_nonzero(diag > tol * dmax)) if dmax > 0.0 else 0
    if rank < k:
        raise RankDeficient(rank, k)
    return _back_substitute(A[:k, :k], rhs[:k])


def _lu(B: np.ndarray):
    """Gaussian elimination with partial pivoting; returns (LU, perm)."""
    a = np.array(B, dtype=np.float64)
    n = a.shape[0]
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        piv = a[k, k]
        if piv == 0.0:
            continue
        a[k + 1:, k] /= piv
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, perm


def is_invertible(B, tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff the smallest LU pivot exceeds ``tol * max(largest pivot, 1)``."""
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"is_invertible needs a square matrix, got {B.shape}")
    lu, _ = _lu(B)
    piv = np.abs(np.diagonal(lu))
    return bool(piv.min() > tol * max(piv.max(), 1.0))


def lu_solve(B, b) -> np.ndarray:
    """Solve ``B x = b`` for square nonsingular `B`."""
    lu, perm = _lu(np.asarray(B, dtype=np.float64))
    n = lu.shape[0]
    y = np.asarray(b, dtype=np.float64)[perm].copy()
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    if np.any(np.diagonal(lu) == 0.0):
        raise np.linalg.LinAlgError("singular matrix")
    return _back_substitute(np.triu(lu), y)
