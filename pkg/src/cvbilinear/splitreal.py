"""Split-real bilinear filters (2R and 4R structures) and the linear NLMS baseline.

A split-real filter is a set of real bilinear paths.  Each path reads either
Re[X_k] or Im[X_k] and contributes to either the real or the imaginary part
of the output:

    2R: (Re -> Re), (Im -> Im)
    4R: (Re -> Re), (Im -> Re), (Re -> Im), (Im -> Im)

so the 2R structure is the 4R structure with the two cross paths removed.
The update of every path is driven by the error of the output part it
feeds.  Since the real gradient of e_Re^2 + e_Im^2 carries a factor 2, the
LMS updates below equal minus half the gradient times the step size.
"""
from dataclasses import dataclass, field

import numpy as np

from .adaptive import _check_finite, _evolve
from .model import vec

#: (input part, output part) of every path
PATHS_2R = (("re", "re"), ("im", "im"))
PATHS_4R = (("re", "re"), ("im", "re"), ("re", "im"), ("im", "im"))


def _path_array(values, n):
    a = np.broadcast_to(np.asarray(values, dtype=float), (n,))
    return a.copy()


@dataclass(frozen=True)
class SplitRealState:
    """Real coefficients of all paths, shape (P, L) and (P, M), plus per-path step sizes.

    For LMS the step sizes are mu; for NLMS they are the normalized step
    sizes alpha, used together with the regularizers ``delta_h``/``delta_g``.
    """

    paths: tuple
    h: np.ndarray
    g: np.ndarray
    step_h: np.ndarray
    step_g: np.ndarray
    delta_h: np.ndarray = field(default=None)
    delta_g: np.ndarray = field(default=None)
    k: int = 0

    def __post_init__(self):
        if self.k:
            return
        P = len(self.paths)
        h = np.array(self.h, dtype=float)
        g = np.array(self.g, dtype=float)
        if h.ndim != 2 or g.ndim != 2 or h.shape[0] != P or g.shape[0] != P:
            raise ValueError(f"expected {P} paths of coefficients, got {h.shape} and {g.shape}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "step_h", _path_array(self.step_h, P))
        object.__setattr__(self, "step_g", _path_array(self.step_g, P))
        dh = 1e-4 if self.delta_h is None else self.delta_h
        dg = 1e-4 if self.delta_g is None else self.delta_g
        object.__setattr__(self, "delta_h", _path_array(dh, P))
        object.__setattr__(self, "delta_g", _path_array(dg, P))
        if not np.all(np.isfinite(h)) or not np.all(np.isfinite(g)):
            raise ValueError("coefficients must be finite")

    def linear_equivalents(self):
        """Coefficients (a, b) of the widely linear form y = a^T vec(X) + b^T vec(X)^*."""
        L, M = self.h.shape[1], self.g.shape[1]
        a = np.zeros(L * M, dtype=complex)
        b = np.zeros(L * M, dtype=complex)
        for (src, dst), hp, gp in zip(self.paths, self.h, self.g):
            F = np.kron(gp, hp)
            c = 1.0 if dst == "re" else 1j
            if src == "re":
                a += c * F / 2
                b += c * F / 2
            else:
                a += c * F / 2j
                b -= c * F / 2j
        return a, b

    def predict(self, X):
        return _predict(self.paths, self.h, self.g, np.asarray(X))


def make_split_state(kind, h0, g0, step_h, step_g, delta_h=1e-4, delta_g=1e-4):
    """Split-real state whose paths start from real/imaginary parts of complex guesses.

    ``kind`` is ``"2r"`` or ``"4r"``.  For 4R the cross paths reuse the parts
    of the same guesses so every path starts nonzero.
    """
    h0 = np.asarray(h0, dtype=complex)
    g0 = np.asarray(g0, dtype=complex)
    if kind == "2r":
        paths = PATHS_2R
        h = np.stack([h0.real, h0.imag])
        g = np.stack([g0.real, g0.imag])
    elif kind == "4r":
        paths = PATHS_4R
        h = np.stack([h0.real, h0.imag, h0.imag, h0.real])
        g = np.stack([g0.real, g0.imag, g0.real, g0.imag])
    else:
        raise ValueError(f"unknown split-real structure {kind!r}")
    return SplitRealState(paths, h, g, step_h, step_g, delta_h, delta_g)


def split_misalignment(f_true, state):
    """Normalized misalignment of a widely linear estimate against a linear system.

    (||f - a||^2 + ||b||^2) / ||f||^2, which reduces to the usual measure when
    the conjugate part b vanishes.
    """
    a, b = state.linear_equivalents()
    f_true = np.asarray(f_true, dtype=complex)
    d = f_true - a
    return float((np.vdot(d, d).real + np.vdot(b, b).real) / np.vdot(f_true, f_true).real)


def _path_indices(paths):
    src = np.array([0 if a == "re" else 1 for a, _ in paths])
    to_re = np.array([b == "re" for _, b in paths])
    return src, to_re


def _path_terms(paths, H, G, X):
    """Per-path regressors A_p g_p, A_p^T h_p and outputs h_p^T A_p g_p."""
    src, to_re = _path_indices(paths)
    A = np.stack([X.real, X.imag])[src]  # (P, L, M)
    rh = np.matmul(A, G[:, :, None])[:, :, 0]
    rg = np.matmul(H[:, None, :], A)[:, 0, :]
    terms = np.sum(H * rh, axis=1)
    return rh, rg, terms, to_re


def _predict(paths, H, G, X):
    _, _, terms, to_re = _path_terms(paths, H, G, X)
    return complex(np.sum(terms[to_re]), np.sum(terms[~to_re]))


def _split_step(state, X, y, normalized, name):
    rh, rg, terms, to_re = _path_terms(state.paths, state.h, state.g, X)
    e_re = y.real - np.sum(terms[to_re])
    e_im = y.imag - np.sum(terms[~to_re])
    err = np.where(to_re, e_re, e_im)
    sh = state.step_h * err
    sg = state.step_g * err
    if normalized:
        sh = sh / (state.delta_h + np.sum(rh * rh, axis=1))
        sg = sg / (state.delta_g + np.sum(rg * rg, axis=1))
    H = state.h + sh[:, None] * rh
    G = state.g + sg[:, None] * rg
    k = state.k + 1
    _check_finite(name, k, H, G)
    return _evolve(state, h=H, g=G, k=k), complex(e_re, e_im)


def _require(state, paths, name):
    if tuple(state.paths) != paths:
        raise ValueError(f"{name} needs a state with paths {paths}")


def blms2r_step(state, X, y):
    _require(state, PATHS_2R, "2R LMS")
    return _split_step(state, X, y, False, "2R-BLMS")


def blms4r_step(state, X, y):
    _require(state, PATHS_4R, "4R LMS")
    return _split_step(state, X, y, False, "4R-BLMS")


def bnlms2r_step(state, X, y):
    _require(state, PATHS_2R, "2R NLMS")
    return _split_step(state, X, y, True, "2R-BNLMS")


def bnlms4r_step(state, X, y):
    _require(state, PATHS_4R, "4R NLMS")
    return _split_step(state, X, y, True, "4R-BNLMS")


@dataclass(frozen=True)
class LinearNlmsState:
    """Complex NLMS on the L*M coefficients f of the equivalent linear model."""

    f_hat: np.ndarray
    alpha_f: float = 1.0
    delta_f: float = 1e-2
    k: int = 0

    def __post_init__(self):
        if self.k == 0:
            object.__setattr__(self, "f_hat", np.array(self.f_hat, dtype=complex))
            if not 0 <= self.alpha_f < 2:
                raise ValueError(f"alpha_f must lie in [0, 2), got {self.alpha_f}")


def linear_nlms_step(state, X, y):
    x = vec(X)
    e = y - state.f_hat @ x
    f_new = state.f_hat + state.alpha_f * x.conj() * e / (state.delta_f + np.vdot(x, x).real)
    k = state.k + 1
    _check_finite("linear NLMS", k, f_new)
    return _evolve(state, f_hat=f_new, k=k), e
