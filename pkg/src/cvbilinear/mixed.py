"""Mixed complex/real bilinear filters: complex h, real-valued g.

The h updates are those of the fully complex filters.  The g updates keep
only real parts so that g_hat never leaves R^M.
"""
from dataclasses import dataclass

import numpy as np

from .adaptive import _check_finite, _evolve, _nonzero_init, _rls_gain_update
from .model import linearize


@dataclass(frozen=True)
class MixedState:
    """Estimate state shared by the three mixed filters.

    Only the fields of the algorithm in use matter: ``mu_h``/``mu_g`` for
    LMS, ``alpha_*``/``delta_*`` for NLMS, ``p_g``/``p_h_tilde``/``lam`` for RLS.
    """

    h_hat: np.ndarray
    g_hat: np.ndarray
    mu_h: float = 0.0
    mu_g: float = 0.0
    alpha_h: float = 0.5
    alpha_g: float = 0.5
    delta_h: float = 1e-4
    delta_g: float = 1e-4
    p_g: np.ndarray = None
    p_h_tilde: np.ndarray = None
    lam: float = 1.0
    k: int = 0

    def __post_init__(self):
        if self.k:
            return
        g = np.asarray(self.g_hat)
        if np.iscomplexobj(g):
            if np.any(g.imag != 0):
                raise ValueError("g_hat of a mixed filter must be real-valued")
            g = g.real
        object.__setattr__(self, "g_hat", np.array(g, dtype=float))
        object.__setattr__(self, "h_hat", np.array(self.h_hat, dtype=complex))
        _nonzero_init(self.h_hat, self.g_hat)
        if not 0 < self.lam <= 1:
            raise ValueError(f"forgetting factor must satisfy 0 < lambda <= 1, got {self.lam}")

    @property
    def f_hat(self):
        return linearize(self.h_hat, self.g_hat)


def make_crbrls(L, M, nu_g=10.0, nu_h=10.0, lam=1.0, h0=None, g0=None):
    """CRBRLS state with P_g = nu_g I and the real matrix P~_h = nu_h I."""
    if nu_g <= 0 or nu_h <= 0:
        raise ValueError("nu_g and nu_h must be positive")
    h0 = np.ones(L, dtype=complex) if h0 is None else h0
    g0 = np.ones(M) if g0 is None else g0
    return MixedState(h0, g0, p_g=nu_g * np.eye(L, dtype=complex),
                      p_h_tilde=nu_h * np.eye(M), lam=lam)


def crblms_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    Xg = X @ g
    e = y - np.vdot(h, Xg)
    h_new = h + state.mu_h * np.conj(e) * Xg
    g_new = g + state.mu_g * 2 * (e * (X.conj().T @ h)).real
    k = state.k + 1
    _check_finite("CRBLMS", k, h_new, g_new)
    return _evolve(state, h_hat=h_new, g_hat=g_new, k=k), e


def crbnlms_g_step(e, X, h_hat):
    """Direction d = Re[e X^H h] and the step t minimizing |y - h^H X (g + t d)|^2.

    With c = X^H h the a posteriori error is e - t c^H d, whose squared
    magnitude |e|^2 - 2 t d^T d + t^2 |c^H d|^2 is smallest at
    t = d^T d / |c^H d|^2.  Returns (d, d^T d, |c^H d|^2).
    """
    c = X.conj().T @ h_hat
    d = (e * c).real
    return d, float(d @ d), float(abs(np.vdot(c, d)) ** 2)


def crbnlms_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    Xg = X @ g
    e = y - np.vdot(h, Xg)
    h_new = h + state.alpha_h * Xg * np.conj(e) / (state.delta_h + np.vdot(Xg, Xg).real)
    d, num, den = crbnlms_g_step(e, X, h)
    if num == 0.0:
        g_new = g.copy()
    else:
        g_new = g + state.alpha_g * d * num / (state.delta_g + den)
    k = state.k + 1
    _check_finite("CRBNLMS", k, h_new, g_new)
    return _evolve(state, h_hat=h_new, g_hat=g_new, k=k), e


def crbrls_gain(p_h_tilde, c, lam):
    """Two-column gain K = P X~ (lam I + X~^H P X~)^{-1} with X~ = [c, c*].

    Returns (K, X~).  K [e, e*]^T is real because the two columns of K are
    complex conjugates of each other whenever P is real.
    """
    Xt = np.stack([c, c.conj()], axis=1)
    PX = p_h_tilde @ Xt
    S = lam * np.eye(2) + Xt.conj().T @ PX
    return np.linalg.solve(S.T, PX.T).T, Xt


def crbrls_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    u = X @ g
    c = X.conj().T @ h
    e = y - np.vdot(h, u)
    k_g, p_g = _rls_gain_update(state.p_g, u, state.lam)
    K, Xt = crbrls_gain(state.p_h_tilde, c, state.lam)
    P = (state.p_h_tilde - K @ (Xt.conj().T @ state.p_h_tilde)).real / state.lam
    P = 0.5 * (P + P.T)
    h_new = h + np.conj(e) * k_g
    g_new = g + (K @ np.array([e, np.conj(e)])).real
    k = state.k + 1
    _check_finite("CRBRLS", k, h_new, g_new, p_g, P)
    return _evolve(state, h_hat=h_new, g_hat=g_new, p_g=p_g, p_h_tilde=P, k=k), e
