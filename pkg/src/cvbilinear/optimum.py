"""Block estimators: bilinear Wiener and least-squares filters.

Both alternate two closed-form solves, first for h with g held fixed and
then for g with the new h.  The mixed variants keep g real-valued.
"""
from dataclasses import dataclass

import numpy as np

from .model import linearize, normalized_misalignment
from .stats import BlockDataset, SecondOrderStats, build_rg, build_rh, estimate_stats

__all__ = [
    "AlternatingEstimate",
    "BlockDataset",
    "SecondOrderStats",
    "SingularMatrixError",
    "cbwf_iterate",
    "cbls_iterate",
    "crbwf_iterate",
    "crbls_iterate",
    "ls_cost",
    "wiener_gradient_h",
    "wiener_gradient_g",
    "run_alternating",
    "estimate_stats",
]

#: reciprocal condition number below which a normal-equation matrix counts as singular
RCOND_THRESHOLD = 1e-12


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class AlternatingEstimate:
    h_hat: np.ndarray
    g_hat: np.ndarray
    iteration: int = 0

    @property
    def f_hat(self):
        return linearize(self.h_hat, self.g_hat)


def _solve(A, b, factor, iteration):
    """Solve A x = b, refusing (near-)singular A."""
    try:
        rcond = 1.0 / np.linalg.cond(A)
    except np.linalg.LinAlgError:
        rcond = 0.0
    if not rcond > RCOND_THRESHOLD:
        raise SingularMatrixError(
            f"{factor} is singular at iteration {iteration} "
            f"(reciprocal condition {rcond:.3e} <= {RCOND_THRESHOLD:g})"
        )
    return np.linalg.solve(A, b)


def _require_nonzero_g(est):
    if not np.any(est.g_hat):
        raise ValueError("g_hat must be nonzero before an alternation step")


def cbwf_iterate(stats, est):
    """One h-then-g alternation of the complex bilinear Wiener filter."""
    _require_nonzero_g(est)
    n = est.iteration + 1
    g = np.asarray(est.g_hat, dtype=complex)
    h = _solve(build_rg(stats, g), stats.r_Xy @ g, "R_g", n)
    g = _solve(build_rh(stats, h), stats.r_Xy.conj().T @ h, "R_h", n)
    return AlternatingEstimate(h, g, n)


def crbwf_iterate(stats, est):
    """Wiener alternation with a real-valued g."""
    _require_nonzero_g(est)
    n = est.iteration + 1
    g = np.asarray(est.g_hat, dtype=float)
    h = _solve(build_rg(stats, g), stats.r_Xy @ g, "R_g", n)
    g = _solve(build_rh(stats, h).real, (stats.r_Xy.conj().T @ h).real, "Re[R_h]", n)
    return AlternatingEstimate(h, g, n)


def _h_normal_equations(data, g):
    u = data.X @ g  # (N, L), rows X_i g
    return u.T @ u.conj(), u.T @ data.y.conj()


def _g_normal_equations(data, h):
    v = np.einsum("nlm,l->nm", data.X, h.conj()).conj()  # rows X_i^H h
    return v.T @ v.conj(), v.T @ data.y


def cbls_iterate(data, est):
    """One alternation of the complex bilinear least-squares filter."""
    _require_nonzero_g(est)
    n = est.iteration + 1
    g = np.asarray(est.g_hat, dtype=complex)
    h = _solve(*_h_normal_equations(data, g), "h Gram matrix", n)
    g = _solve(*_g_normal_equations(data, h), "g Gram matrix", n)
    return AlternatingEstimate(h, g, n)


def crbls_iterate(data, est):
    _require_nonzero_g(est)
    n = est.iteration + 1
    g = np.asarray(est.g_hat, dtype=float)
    h = _solve(*_h_normal_equations(data, g), "h Gram matrix", n)
    A, b = _g_normal_equations(data, h)
    g = _solve(A.real, b.real, "g Gram matrix", n)
    return AlternatingEstimate(h, g, n)


def ls_cost(data, h_hat, g_hat):
    """Summed squared error sum |y_i - h^H X_i g|^2."""
    e = data.y - np.einsum("l,nlm,m->n", np.conj(h_hat), data.X, g_hat)
    return float(np.sum(np.abs(e) ** 2))


def wiener_gradient_h(stats, h_hat, g_hat):
    """Conjugate-Wirtinger gradient of the MSE with respect to h: R_g h - R_Xy g."""
    return build_rg(stats, g_hat) @ h_hat - stats.r_Xy @ g_hat


def wiener_gradient_g(stats, h_hat, g_hat):
    """Conjugate-Wirtinger gradient of the MSE with respect to g: R_h g - R_Xy^H h."""
    return build_rh(stats, h_hat) @ g_hat - stats.r_Xy.conj().T @ h_hat


def run_alternating(iterate, source, est, iterations=40, tol=1e-14):
    """Apply ``iterate`` repeatedly and return every estimate, starting with ``est``.

    Stops early once the misalignment between consecutive linear
    equivalents drops below ``tol`` (``tol=None`` disables this).
    """
    history = [est]
    for _ in range(iterations):
        new = iterate(source, history[-1])
        history.append(new)
        if tol is not None:
            change = normalized_misalignment(history[-2].f_hat, new.f_hat).nm
            if change < tol:
                break
    return history
