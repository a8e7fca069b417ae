"""Pure numpy versions of the hot loops (used when the extension is unavailable)."""
import numpy as np

# cap on elements of any L x chunk temporary
_BLOCK = 1 << 22


def _chunk(n_rows, n_cols):
    return max(1, _BLOCK // max(1, n_cols)) if n_rows else 1


def ecf(X, T):
    """Mean of cos and sin of ``T @ x`` over the rows ``x`` of ``X``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    T = np.ascontiguousarray(T, dtype=np.float64)
    n = X.shape[0]
    L = T.shape[0]
    re = np.zeros(L)
    im = np.zeros(L)
    step = _chunk(n, L)
    for start in range(0, n, step):
        proj = X[start:start + step] @ T.T
        re += np.cos(proj).sum(axis=0)
        im += np.sin(proj).sum(axis=0)
    return re / n, im / n


def ecf_grad(Y, T, wu, wv):
    """Rows ``sum_l (-wu_l sin(t_l.y) + wv_l cos(t_l.y)) t_l`` for each ``y`` in ``Y``."""
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    T = np.ascontiguousarray(T, dtype=np.float64)
    m = Y.shape[0]
    out = np.empty_like(Y)
    step = _chunk(m, T.shape[0])
    for start in range(0, m, step):
        proj = Y[start:start + step] @ T.T
        coef = np.cos(proj) * wv - np.sin(proj) * wu
        out[start:start + step] = coef @ T
    return out


def trig(Y, T):
    """``cos`` and ``sin`` of ``Y @ T.T`` as two ``M x L`` arrays."""
    proj = np.asarray(Y, dtype=np.float64) @ np.asarray(T, dtype=np.float64).T
    return np.cos(proj), np.sin(proj)
