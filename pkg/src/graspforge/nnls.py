import numpy as np
from numba import njit


@njit(cache=True)
def _nnls_core(A, b, max_iter, tol):
    m, n = A.shape
    x = np.zeros(n)
    passive = np.zeros(n, np.bool_)
    w = A.T @ (b - A @ x)
    it = 0
    while True:
        j = -1
        best = tol
        for k in range(n):
            if not passive[k] and w[k] > best:
                best = w[k]
                j = k
        if j < 0:
            break
        passive[j] = True
        while True:
            it += 1
            if it > max_iter:
                break
            idx = np.flatnonzero(passive)
            z = np.zeros(n)
            sol = np.linalg.lstsq(A[:, idx], b)[0]
            z[idx] = sol
            if (sol > 0).all():
                x = z
                break
            step = np.inf
            for k in idx:
                if z[k] <= 0:
                    step = min(step, x[k] / (x[k] - z[k]))
            x = x + step * (z - x)
            cut = 1e-15 * max(1.0, np.abs(x).max())
            for k in range(n):
                if passive[k] and x[k] <= cut:
                    passive[k] = False
                    x[k] = 0.0
        if it > max_iter:
            break
        w = A.T @ (b - A @ x)
    return x


def nnls(A, b, max_iter=None, tol=None):
    """Solve ``min ||A x - b||`` subject to ``x >= 0`` (Lawson-Hanson active set).

    Parameters
    ----------
    A : (m, n) ndarray
    b : (m,) ndarray
    max_iter : int, optional
        Inner iteration cap, default ``10 * n``.
    tol : float, optional
        Dual feasibility tolerance on the gradient ``A^T (b - A x)``.

    Returns
    -------
    x : (n,) ndarray
    rnorm : float
        Residual norm ``||A x - b||``.
    """
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    m, n = A.shape
    if n == 0:
        return np.zeros(0), float(np.linalg.norm(b))
    max_iter = 10 * n if max_iter is None else max_iter
    if tol is None:
        tol = 10 * max(m, n) * np.finfo(float).eps * np.linalg.norm(A, 1) * max(np.linalg.norm(b), 1)
    x = _nnls_core(A, b, int(max_iter), float(tol))
    return x, float(np.linalg.norm(A @ x - b))


@njit(cache=True)
def _residuals_core(A, B, max_iter, tol):
    out = np.empty(B.shape[0])
    for i in range(B.shape[0]):
        x = _nnls_core(A, B[i], max_iter, tol[i])
        r = A @ x - B[i]
        out[i] = np.sqrt(r @ r)
    return out


def nnls_residuals(A, B) -> np.ndarray:
    """Residual norm of ``nnls(A, b)`` for every row ``b`` of ``B``."""
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(np.atleast_2d(B), dtype=float)
    m, n = A.shape
    if n == 0:
        return np.linalg.norm(B, axis=1)
    base = 10 * max(m, n) * np.finfo(float).eps * np.linalg.norm(A, 1)
    tol = base * np.maximum(np.linalg.norm(B, axis=1), 1.0)
    return _residuals_core(A, B, 10 * n, tol)
