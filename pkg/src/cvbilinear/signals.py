"""Seedable signal generation and construction of input matrices X_k.

Randomness comes from numpy's Philox generator, a counter-based bit
generator whose stream depends only on the key derived from the seed, so
identical seeds reproduce identical samples on every platform.
"""
from dataclasses import dataclass

import numpy as np


class Rng:
    """Counter-based random stream keyed by a 64-bit seed.

    Extra integers in ``stream`` select independent sub-streams, e.g. one
    per Monte-Carlo run, without touching the parent stream.
    """

    def __init__(self, seed, *stream):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        ss = np.random.SeedSequence([self.seed, *self.stream])
        self.generator = np.random.Generator(np.random.Philox(ss))

    def spawn(self, *stream):
        return Rng(self.seed, *self.stream, *stream)

    def normal(self, size):
        return self.generator.standard_normal(size)


@dataclass(frozen=True)
class SignalModel:
    """Input-signal model: white proper Gaussian or first-order moving average.

    For ``moving_average_1`` the ``sigma`` is the standard deviation of the
    driving white process u, so x = u_k + u_{k-1} has variance 2 sigma^2.
    """

    kind: str = "white_proper_gaussian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("white_proper_gaussian", "moving_average_1"):
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def variance(self):
        return self.sigma**2 * (2.0 if self.kind == "moving_average_1" else 1.0)

    def generate(self, rng, shape):
        """Draw a signal of ``shape``; the moving average runs along axis 0."""
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        if self.kind == "white_proper_gaussian":
            return sample_proper_gaussian(rng, self.sigma, shape)
        return generate_ma1(rng, self.sigma, shape)


@dataclass(frozen=True)
class IqImbalance:
    g_t: float
    phi_t: float

    def __post_init__(self):
        if not self.g_t > 0:
            raise ValueError(f"amplitude imbalance must be positive, got {self.g_t}")


def sample_proper_gaussian(rng, sigma, count):
    """I.i.d. proper complex Gaussian samples with E|x|^2 = sigma^2.

    ``count`` may be an int or a shape tuple.
    """
    shape = (count,) if np.isscalar(count) else tuple(count)
    if any(s < 0 for s in shape):
        raise ValueError(f"count must be nonnegative, got {count}")
    scale = sigma / np.sqrt(2.0)
    re = rng.normal(shape)
    im = rng.normal(shape)
    return scale * (re + 1j * im)


def ma1_from_driving(u):
    """x_k = u_k + u_{k-1} along axis 0 with u_{-1} = 0."""
    u = np.asarray(u, dtype=complex)
    x = u.copy()
    x[1:] += u[:-1]
    return x


def generate_ma1(rng, u_sigma, count):
    shape = (count,) if np.isscalar(count) else tuple(count)
    if shape[0] < 1:
        raise ValueError("moving-average process needs at least one sample")
    # one extra driving sample so x_0 already has full variance
    u = sample_proper_gaussian(rng, u_sigma, (shape[0] + 1,) + shape[1:])
    return ma1_from_driving(u)[1:]


def build_miso_matrix(history, L, k):
    """X_k for a MISO system.

    ``history`` holds one column per channel (shape (K, M)); row i of the
    result is [x_{1,k-i}, ..., x_{M,k-i}], with zeros before time 0.
    """
    history = np.asarray(history, dtype=complex)
    if history.ndim == 1:
        history = history[:, None]
    M = history.shape[1]
    X = np.zeros((L, M), dtype=complex)
    for i in range(L):
        if k - i >= 0:
            X[i] = history[k - i]
    return X


def miso_matrices(history, L):
    """All X_k, k = 0..K-1, as an array of shape (K, L, M)."""
    history = np.asarray(history, dtype=complex)
    if history.ndim == 1:
        history = history[:, None]
    K, M = history.shape
    padded = np.concatenate([np.zeros((L - 1, M), dtype=complex), history])
    windows = np.lib.stride_tricks.sliding_window_view(padded, L, axis=0)  # (K, M, L)
    return np.ascontiguousarray(windows[:, :, ::-1].transpose(0, 2, 1))


def build_hammerstein_matrix(x_history, basis, L, k):
    """X_k with entry (i, m) = basis[m](x_{k-i}); zeros before time 0."""
    if len(basis) == 0:
        raise ValueError("basis must contain at least one function")
    x_history = np.asarray(x_history, dtype=complex)
    X = np.zeros((L, len(basis)), dtype=complex)
    for i in range(L):
        if k - i >= 0:
            X[i] = [phi(x_history[k - i]) for phi in basis]
    return X


def hammerstein_matrices(x, basis, L):
    """All Hammerstein X_k for a sample sequence, shape (K, L, len(basis))."""
    if len(basis) == 0:
        raise ValueError("basis must contain at least one function")
    x = np.asarray(x, dtype=complex)
    channels = np.stack([np.asarray(phi(x), dtype=complex) for phi in basis], axis=1)
    return miso_matrices(channels, L)


#: basis {x, x*} that turns IQ imbalance into a bilinear model
IQ_BASIS = (lambda x: x, np.conj)


def iq_coefficients(imb):
    """Gains (g1, g2) of u = g1 x + g2 x* for amplitude/phase imbalance."""
    g1 = (1 + imb.g_t * np.exp(-1j * imb.phi_t)) / 2
    g2 = (1 - imb.g_t * np.exp(1j * imb.phi_t)) / 2
    return complex(g1), complex(g2)


def synthetic_multipath_channel(rng, L, decay):
    """Unit-norm channel with exponentially decaying random complex taps."""
    if L < 1:
        raise ValueError("channel length must be at least 1")
    if not decay > 0:
        raise ValueError("decay must be positive")
    taps = sample_proper_gaussian(rng, 1.0, L) * np.exp(-decay * np.arange(L))
    return taps / np.linalg.norm(taps)
