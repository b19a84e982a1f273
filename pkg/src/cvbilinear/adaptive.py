"""Streaming fully complex bilinear filters: CBLMS, CBNLMS and CBRLS.

Every step function is pure: it takes the current state, one input matrix
X_k and one output sample y_k, and returns the new state together with the
a priori error e_k = y_k - h^H X_k g computed with the old estimates.
"""
from dataclasses import dataclass

import numpy as np

from .model import linearize


class DivergenceError(FloatingPointError):
    """A filter update produced non-finite coefficients."""

    def __init__(self, filter_name, step):
        super().__init__(f"{filter_name} diverged at step {step}: non-finite coefficients")
        self.filter_name = filter_name
        self.step = step


def _check_finite(name, step, *arrays):
    # a single non-finite entry makes the sum non-finite
    for a in arrays:
        if not np.isfinite(a.sum()):
            raise DivergenceError(name, step)


def _evolve(state, **changes):
    """Cheap ``dataclasses.replace`` for the frozen step states (skips validation)."""
    new = object.__new__(type(state))
    new.__dict__.update(state.__dict__)
    new.__dict__.update(changes)
    return new


def _nonzero_init(h_hat, g_hat):
    if not np.any(h_hat) or not np.any(g_hat):
        raise ValueError("initial h_hat and g_hat must both be nonzero")


@dataclass(frozen=True)
class LmsState:
    h_hat: np.ndarray
    g_hat: np.ndarray
    mu_h: float
    mu_g: float
    k: int = 0

    def __post_init__(self):
        if self.k == 0:
            _nonzero_init(self.h_hat, self.g_hat)

    @property
    def f_hat(self):
        return linearize(self.h_hat, self.g_hat)


@dataclass(frozen=True)
class NlmsState:
    h_hat: np.ndarray
    g_hat: np.ndarray
    alpha_h: float = 0.5
    alpha_g: float = 0.5
    delta_h: float = 1e-4
    delta_g: float = 1e-4
    k: int = 0

    def __post_init__(self):
        if self.k:
            return
        _nonzero_init(self.h_hat, self.g_hat)
        for name in ("alpha_h", "alpha_g"):
            a = getattr(self, name)
            if not 0 <= a < 2:
                raise ValueError(f"{name} must lie in [0, 2), got {a}")
        if not self.alpha_h + self.alpha_g < 2:
            raise ValueError(
                f"alpha_h + alpha_g must be below 2, got {self.alpha_h + self.alpha_g}"
            )
        if self.delta_h < 0 or self.delta_g < 0:
            raise ValueError("regularization constants must be nonnegative")

    @property
    def f_hat(self):
        return linearize(self.h_hat, self.g_hat)


@dataclass(frozen=True)
class RlsState:
    h_hat: np.ndarray
    g_hat: np.ndarray
    p_g: np.ndarray
    p_h: np.ndarray
    lam: float = 1.0
    k: int = 0

    def __post_init__(self):
        if self.k:
            return
        _nonzero_init(self.h_hat, self.g_hat)
        if not 0 < self.lam <= 1:
            raise ValueError(f"forgetting factor must satisfy 0 < lambda <= 1, got {self.lam}")

    @property
    def f_hat(self):
        return linearize(self.h_hat, self.g_hat)


@dataclass(frozen=True)
class StepBoundReport:
    mu_h_max: float
    mu_g_max: float
    delta_value: float
    stable: bool


def instantaneous_gradients(h_hat, g_hat, X, y):
    """Gradients of |e|^2, e = y - h^H X g, with respect to h* and g*.

    Returns (-e* X g, -e X^H h); the CBLMS update moves against both.
    """
    e = y - np.vdot(h_hat, X @ g_hat)
    return -np.conj(e) * (X @ g_hat), -e * (X.conj().T @ h_hat)


def cblms_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    Xg = X @ g
    XHh = X.conj().T @ h
    e = y - np.vdot(h, Xg)
    h_new = h + state.mu_h * np.conj(e) * Xg
    g_new = g + state.mu_g * e * XHh
    k = state.k + 1
    _check_finite("CBLMS", k, h_new, g_new)
    return _evolve(state, h_hat=h_new, g_hat=g_new, k=k), e


def cbnlms_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    Xg = X @ g
    XHh = X.conj().T @ h
    e = y - np.vdot(h, Xg)
    h_new = h + state.alpha_h * Xg * np.conj(e) / (state.delta_h + np.vdot(Xg, Xg).real)
    g_new = g + state.alpha_g * XHh * e / (state.delta_g + np.vdot(XHh, XHh).real)
    k = state.k + 1
    _check_finite("CBNLMS", k, h_new, g_new)
    return _evolve(state, h_hat=h_new, g_hat=g_new, k=k), e


def _rls_gain_update(P, u, lam):
    """Gain k = P u / (lam + u^H P u) and the updated inverse correlation matrix."""
    Pu = P @ u
    gain = Pu / (lam + np.vdot(u, Pu).real)
    # u^H P = (P u)^H since P is kept Hermitian
    P_new = P - np.outer(gain, Pu.conj())
    P_new += P_new.conj().T
    P_new *= 0.5 / lam
    return gain, P_new


def cbrls_step(state, X, y):
    h, g = state.h_hat, state.g_hat
    u = X @ g
    v = X.conj().T @ h
    e = y - np.vdot(h, u)
    k_g, p_g = _rls_gain_update(state.p_g, u, state.lam)
    k_h, p_h = _rls_gain_update(state.p_h, v, state.lam)
    h_new = h + np.conj(e) * k_g
    g_new = g + e * k_h
    k = state.k + 1
    _check_finite("CBRLS", k, h_new, g_new, p_g, p_h)
    return _evolve(state, h_hat=h_new, g_hat=g_new, p_g=p_g, p_h=p_h, k=k), e


def make_cbrls(L, M, nu_g=10.0, nu_h=10.0, lam=1.0, h0=None, g0=None):
    """CBRLS state with P_g = nu_g I_L and P_h = nu_h I_M.

    Without explicit initial estimates both start as all-ones vectors.
    """
    if not 0 < lam <= 1:
        raise ValueError(f"forgetting factor must satisfy 0 < lambda <= 1, got {lam}")
    if nu_g <= 0 or nu_h <= 0:
        raise ValueError("nu_g and nu_h must be positive")
    h0 = np.ones(L, dtype=complex) if h0 is None else np.asarray(h0, dtype=complex)
    g0 = np.ones(M, dtype=complex) if g0 is None else np.asarray(g0, dtype=complex)
    return RlsState(
        h_hat=h0,
        g_hat=g0,
        p_g=nu_g * np.eye(L, dtype=complex),
        p_h=nu_h * np.eye(M, dtype=complex),
        lam=lam,
    )


def lms_step_bounds(L, M, sigma_x, g_norm_sq, h_norm_sq, mu_h, mu_g,
                    nu_abs_sq=1.0, g_true_norm_sq=None, h_true_norm_sq=None):
    """Mean-square step-size bounds of CBLMS and the steady-state constant Delta.

    ``g_norm_sq`` and ``h_norm_sq`` are the expected squared norms of the
    estimates; the true-parameter norms default to them.
    """
    for name, val in (("sigma_x", sigma_x), ("g_norm_sq", g_norm_sq),
                      ("h_norm_sq", h_norm_sq), ("nu_abs_sq", nu_abs_sq)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    g_true = g_norm_sq if g_true_norm_sq is None else g_true_norm_sq
    h_true = h_norm_sq if h_true_norm_sq is None else h_true_norm_sq
    s2 = sigma_x**2
    mu_h_max = 2.0 / (L * s2 * g_norm_sq)
    mu_g_max = 2.0 / (M * s2 * h_norm_sq)
    delta = 2.0 - s2 * (mu_h * L * g_true / nu_abs_sq + mu_g * M * nu_abs_sq * h_true)
    stable = bool(0 < mu_h < mu_h_max and 0 < mu_g < mu_g_max and delta > 0)
    return StepBoundReport(mu_h_max, mu_g_max, delta, stable)


def estimate_sigma_x(samples, n=1000):
    """Input standard deviation from the mean power of the first ``n`` samples."""
    x = np.asarray(samples).ravel()[:n]
    return float(np.sqrt(np.mean(np.abs(x) ** 2)))
