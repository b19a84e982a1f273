"""Second-order statistics and the Kronecker-structured matrices R_g, R_h."""
from dataclasses import dataclass

import numpy as np

from .model import mat, vec

#: largest L*M for which (g (x) I) is formed explicitly
KRON_MATERIALIZE_LIMIT = 4096


@dataclass(frozen=True)
class SecondOrderStats:
    """Covariance R = E[x x^H] of x = vec(X), cross-correlation E[X y*] and E|y|^2.

    ``r_yy`` only enters the absolute MSE value; the Wiener iterates do not
    depend on it.
    """

    r_xx: np.ndarray
    r_Xy: np.ndarray
    r_yy: float = 0.0

    def __post_init__(self):
        r_xx = np.asarray(self.r_xx, dtype=complex)
        r_Xy = np.asarray(self.r_Xy, dtype=complex)
        L, M = r_Xy.shape
        if r_xx.shape != (L * M, L * M):
            raise ValueError(f"r_xx shape {r_xx.shape} inconsistent with r_Xy shape {r_Xy.shape}")
        object.__setattr__(self, "r_xx", r_xx)
        object.__setattr__(self, "r_Xy", r_Xy)

    @property
    def shape(self):
        return self.r_Xy.shape

    def mse(self, h_hat, g_hat):
        """E|y - h^H X g|^2 evaluated through f = g (x) conj(h)."""
        f = np.kron(g_hat, np.conj(h_hat))
        r = vec(self.r_Xy)
        return float(self.r_yy - 2 * np.real(f @ r) + np.real(f @ self.r_xx @ f.conj()))


@dataclass(frozen=True)
class BlockDataset:
    """N training pairs (X_i, y_i) stored as arrays of shape (N, L, M) and (N,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        if X.ndim != 3 or X.shape[0] < 1 or y.shape != (X.shape[0],):
            raise ValueError(f"need N >= 1 matrices and N outputs, got {X.shape} and {y.shape}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.X.shape[0]

    @property
    def shape(self):
        return self.X.shape[1:]

    @property
    def regressors(self):
        """Rows vec(X_i), shape (N, L*M)."""
        N, L, M = self.X.shape
        return self.X.transpose(0, 2, 1).reshape(N, L * M)


def estimate_stats(data):
    """Sample estimates (1/N) sum x x^H and (1/N) sum x y* of a block of data."""
    N = len(data)
    M = data.shape[1]
    xt = data.regressors
    R = xt.T @ xt.conj() / N
    R = 0.5 * (R + R.conj().T)
    r = xt.T @ data.y.conj() / N
    return SecondOrderStats(R, mat(r, M), float(np.mean(np.abs(data.y) ** 2)))


def exact_stats(r_xx_channel, h, g, noise_var=0.0):
    """Exact statistics for a MISO system with i.i.d. channels.

    ``r_xx_channel`` is the L x L covariance of one channel's tap vector; the
    full covariance is I_M (x) r_xx_channel.
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    R = np.kron(np.eye(g.size), r_xx_channel)
    f = np.kron(g, h.conj())
    r = R @ f.conj()
    r_yy = float(np.real(f @ R @ f.conj())) + noise_var
    return SecondOrderStats(R, mat(r, g.size), r_yy)


def white_covariance(L, sigma=1.0):
    return sigma**2 * np.eye(L, dtype=complex)


def ma1_covariance(L, u_sigma):
    """Tap covariance of x_k = u_k + u_{k-1}: 2 s^2 on the diagonal, s^2 next to it."""
    s2 = u_sigma**2
    return (2 * s2 * np.eye(L) + s2 * (np.eye(L, k=1) + np.eye(L, k=-1))).astype(complex)


def _check_nonzero(v, name):
    if not np.any(v):
        raise ValueError(f"{name} must be nonzero")


def build_rg(stats, g_hat):
    """R_g = (g (x) I)^T R (g (x) I)^*, an L x L matrix."""
    R = stats.r_xx if isinstance(stats, SecondOrderStats) else np.asarray(stats)
    g_hat = np.asarray(g_hat, dtype=complex)
    _check_nonzero(g_hat, "g_hat")
    M = g_hat.size
    L = R.shape[0] // M
    if L * M <= KRON_MATERIALIZE_LIMIT:
        G = np.kron(g_hat[:, None], np.eye(L))
        out = G.T @ R @ G.conj()
    else:
        out = _rg_blocked(R, g_hat)
    return 0.5 * (out + out.conj().T)


def build_rh(stats, h_hat):
    """R_h = (I (x) h)^T R^* (I (x) h)^*, an M x M matrix."""
    R = stats.r_xx if isinstance(stats, SecondOrderStats) else np.asarray(stats)
    h_hat = np.asarray(h_hat, dtype=complex)
    _check_nonzero(h_hat, "h_hat")
    L = h_hat.size
    M = R.shape[0] // L
    if L * M <= KRON_MATERIALIZE_LIMIT:
        H = np.kron(np.eye(M), h_hat[:, None])
        out = H.T @ R.conj() @ H.conj()
    else:
        out = _rh_blocked(R, h_hat)
    return 0.5 * (out + out.conj().T)


def _rg_blocked(R, g_hat):
    M = g_hat.size
    L = R.shape[0] // M
    R4 = R.reshape(M, L, M, L)
    return np.einsum("m,manb,n->ab", g_hat, R4, g_hat.conj(), optimize=True)


def _rh_blocked(R, h_hat):
    L = h_hat.size
    M = R.shape[0] // L
    R4 = R.reshape(M, L, M, L)
    return np.einsum("a,manb,b->mn", h_hat, R4.conj(), h_hat.conj(), optimize=True)
