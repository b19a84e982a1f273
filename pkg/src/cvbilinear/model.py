"""Complex-valued bilinear model y = h^H X g + n and its linear equivalent.

The linear coefficient vector is f = g (x) conj(h), so that
h^H X g = f^T vec(X) with vec stacking the columns of X.
"""
from dataclasses import dataclass

import numpy as np

#: dB value reported for an exactly zero misalignment
DB_FLOOR = -400.0


def _as_cvector(a, name):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class BilinearSystem:
    """Ground-truth parameter pair of a bilinear system.

    Parameters
    ----------
    h : array_like, shape (L,)
        Complex channel coefficients.
    g : array_like, shape (M,)
        Complex gain coefficients.
    noise_std : float
        Standard deviation of the proper complex additive noise.
    """

    h: np.ndarray
    g: np.ndarray
    noise_std: float = 0.0

    def __post_init__(self):
        h = _as_cvector(self.h, "h")
        g = _as_cvector(self.g, "g")
        if h.size < 1 or g.size < 1:
            raise ValueError("h and g must be non-empty")
        if not np.any(h) or not np.any(g):
            raise ValueError("h and g must both be nonzero; the system is unidentifiable")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be nonnegative, got {self.noise_std}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def L(self):
        return self.h.size

    @property
    def M(self):
        return self.g.size

    @property
    def f(self):
        """Linear-equivalent coefficients g (x) conj(h)."""
        return linearize(self.h, self.g)

    def output(self, X, noise_sample=0.0):
        return evaluate_bilinear(self, X, noise_sample)


@dataclass(frozen=True)
class ErrorMetrics:
    """Normalized misalignment (linear and dB) and instantaneous squared error."""

    nm: float
    nm_db: float
    ise: float = float("nan")


def to_db(value):
    """10*log10 of a power ratio, mapping exact zeros to ``DB_FLOOR``."""
    value = np.asarray(value, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(value > 0, 10.0 * np.log10(np.where(value > 0, value, 1.0)), DB_FLOOR)
    return float(out) if out.ndim == 0 else out


def vec(A):
    """Stack the columns of ``A`` into one vector."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"vec expects a matrix, got shape {A.shape}")
    return A.reshape(-1, order="F")


def mat(a, M):
    """Inverse of :func:`vec`: split ``a`` into ``M`` columns."""
    a = np.asarray(a)
    if a.ndim != 1 or M < 1 or a.size % M:
        raise ValueError(f"cannot reshape vector of length {a.size} into {M} columns")
    return a.reshape((a.size // M, M), order="F")


def linearize(h, g):
    """Return f = g (x) conj(h), the coefficients of the equivalent linear model."""
    h = _as_cvector(h, "h")
    g = _as_cvector(g, "g")
    if h.size == 0 or g.size == 0:
        raise ValueError("linearize needs non-empty h and g")
    return np.kron(g, h.conj())


def bilinear_form(h, X, g):
    """h^H X g for plain arrays."""
    return np.vdot(h, X @ g)


def evaluate_bilinear(system, X, noise_sample=0.0):
    X = np.asarray(X)
    if X.shape != (system.L, system.M):
        raise ValueError(
            f"input matrix shape {X.shape} does not match system shape {(system.L, system.M)}"
        )
    return bilinear_form(system.h, X, system.g) + noise_sample


def normalized_misalignment(f_true, f_hat, ise=float("nan")):
    """||f - f_hat||^2 / ||f||^2 together with its dB value."""
    f_true = np.asarray(f_true, dtype=complex)
    f_hat = np.asarray(f_hat, dtype=complex)
    if f_true.shape != f_hat.shape:
        raise ValueError(f"length mismatch: {f_true.shape} vs {f_hat.shape}")
    ref = np.vdot(f_true, f_true).real
    if ref == 0:
        raise ValueError("true coefficient vector is zero")
    d = f_true - f_hat
    nm = float(np.vdot(d, d).real / ref)
    return ErrorMetrics(nm=nm, nm_db=to_db(nm), ise=float(ise))


def fd_wirtinger_gradient(cost, point, step=1e-5):
    """Numerical conjugate-Wirtinger gradient dJ/dv* of a real cost.

    Uses central differences along the real and imaginary axis of each
    coordinate: dJ/dv* = (dJ/dRe v + j dJ/dIm v) / 2.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    v = np.array(point, dtype=complex)
    grad = np.empty_like(v)
    for i in range(v.size):
        parts = []
        for direction in (1.0, 1j):
            vp = v.copy()
            vm = v.copy()
            vp[i] += step * direction
            vm[i] -= step * direction
            parts.append((cost(vp) - cost(vm)) / (2 * step))
        grad[i] = 0.5 * (parts[0] + 1j * parts[1])
    return grad


def fd_real_gradient(cost, point, step=1e-5):
    """Central-difference gradient of a real cost over a real vector."""
    v = np.array(point, dtype=float)
    grad = np.empty_like(v)
    for i in range(v.size):
        vp = v.copy()
        vm = v.copy()
        vp[i] += step
        vm[i] -= step
        grad[i] = (cost(vp) - cost(vm)) / (2 * step)
    return grad
