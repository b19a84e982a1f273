"""Real-multiplication counts per step of the bilinear LMS family.

``mult_count`` evaluates the closed forms.  ``instrumented_count`` runs one
error-plus-update step on scalar wrappers that tally every real
multiplication, so the closed forms can be checked against an actual
execution.  Counting rules:

* real x real costs 1, real x complex costs 2;
* complex x complex costs 3, using
  k1 = c(a + b), k2 = a(d - c), k3 = b(c + d), product = (k1 - k3) + j(k1 + k2);
* additions, subtractions and conjugation are free;
* each coefficient update builds its own regressor (nothing is shared with
  the error computation).

Variant ``v1`` forms the output by multiplying h into X first; ``v2``
multiplies X by g first.
"""
from dataclasses import dataclass

import numpy as np

from .splitreal import PATHS_2R, PATHS_4R

VARIANTS = ("two_r_v1", "two_r_v2", "four_r_v1", "four_r_v2", "fully_cv_v1", "fully_cv_v2")


@dataclass(frozen=True)
class MultCount:
    variant: str
    count: int
    big_o: str = "O(LM)"


def _check(variant, L, M):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if L < 1 or M < 1:
        raise ValueError("L and M must be at least 1")


def mult_count(variant, L, M):
    _check(variant, L, M)
    two_r = {"v1": 6 * L * M + 2 * L + 4 * M + 4, "v2": 6 * L * M + 4 * L + 2 * M + 4}
    cv = {"v1": 9 * L * M + 6 * M + 3 * L + 4, "v2": 9 * L * M + 3 * M + 6 * L + 4}
    family, order = variant.rsplit("_", 1)
    if family == "two_r":
        n = two_r[order]
    elif family == "four_r":
        n = 2 * two_r[order]
    else:
        n = cv[order]
    return MultCount(variant, n)


class Tally:
    def __init__(self):
        self.count = 0


class _R:
    __slots__ = ("v", "t")

    def __init__(self, v, tally):
        self.v = float(v)
        self.t = tally

    def __mul__(self, other):
        if isinstance(other, _C):
            return other * self
        self.t.count += 1
        return _R(self.v * other.v, self.t)

    def __add__(self, other):
        return _R(self.v + other.v, self.t)

    def __sub__(self, other):
        return _R(self.v - other.v, self.t)


class _C:
    __slots__ = ("re", "im", "t")

    def __init__(self, re, im, tally):
        self.re = float(re)
        self.im = float(im)
        self.t = tally

    @classmethod
    def of(cls, z, tally):
        return cls(np.real(z), np.imag(z), tally)

    def conj(self):
        return _C(self.re, -self.im, self.t)

    def __mul__(self, other):
        if isinstance(other, _R):
            self.t.count += 2
            return _C(self.re * other.v, self.im * other.v, self.t)
        a, b, c, d = self.re, self.im, other.re, other.im
        self.t.count += 3
        k1 = c * (a + b)
        k2 = a * (d - c)
        k3 = b * (c + d)
        return _C(k1 - k3, k1 + k2, self.t)

    def __add__(self, other):
        return _C(self.re + other.re, self.im + other.im, self.t)

    def __sub__(self, other):
        return _C(self.re - other.re, self.im - other.im, self.t)

    @property
    def value(self):
        return complex(self.re, self.im)


def _dot(a, b):
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc = acc + x * y
    return acc


def _matvec(A, v):
    """A v for A given as a list of rows."""
    return [_dot(row, v) for row in A]


def _vecmat(v, A):
    """v^T A for A given as a list of rows."""
    cols = list(zip(*A))
    return [_dot(v, list(col)) for col in cols]


def _split_step(paths, H, G, X, y, mu_h, mu_g, order, tally):
    parts = {"re": X.real, "im": X.imag}
    R = lambda v: _R(v, tally)  # noqa: E731
    A = {k: [[R(a) for a in row] for row in v] for k, v in parts.items()}
    Hs = [[R(v) for v in hp] for hp in H]
    Gs = [[R(v) for v in gp] for gp in G]
    out = {"re": None, "im": None}
    for (src, dst), hp, gp in zip(paths, Hs, Gs):
        if order == "v1":
            term = _dot(_vecmat(hp, A[src]), gp)
        else:
            term = _dot(hp, _matvec(A[src], gp))
        out[dst] = term if out[dst] is None else out[dst] + term
    err = {"re": R(y.real) - out["re"], "im": R(y.imag) - out["im"]}
    H_new, G_new = [], []
    for p, ((src, dst), hp, gp) in enumerate(zip(paths, Hs, Gs)):
        sh = R(mu_h[p]) * err[dst]
        H_new.append([a + sh * r for a, r in zip(hp, _matvec(A[src], gp))])
        sg = R(mu_g[p]) * err[dst]
        G_new.append([a + sg * r for a, r in zip(gp, _vecmat(hp, A[src]))])
    e = complex(err["re"].v, err["im"].v)
    H_new = np.array([[a.v for a in hp] for hp in H_new])
    G_new = np.array([[a.v for a in gp] for gp in G_new])
    return H_new, G_new, e


def _cv_step(h, g, X, y, mu_h, mu_g, order, tally):
    C = lambda z: _C.of(z, tally)  # noqa: E731
    Xs = [[C(a) for a in row] for row in X]
    XH = [[a.conj() for a in col] for col in zip(*Xs)]
    hs = [C(v) for v in h]
    gs = [C(v) for v in g]
    hc = [v.conj() for v in hs]
    if order == "v1":
        out = _dot(_vecmat(hc, Xs), gs)
    else:
        out = _dot(hc, _matvec(Xs, gs))
    e = C(y) - out
    sh = e.conj() * _R(mu_h, tally)
    h_new = [a + sh * r for a, r in zip(hs, _matvec(Xs, gs))]
    sg = e * _R(mu_g, tally)
    g_new = [a + sg * r for a, r in zip(gs, _matvec(XH, hs))]
    return (np.array([a.value for a in h_new]), np.array([a.value for a in g_new]), e.value)


def instrumented_step(variant, h, g, X, y, mu_h, mu_g):
    """Run one tallied LMS step and return (h_new, g_new, e, count).

    For split-real variants ``h`` and ``g`` are (P, L) and (P, M) real path
    arrays and ``mu_h``/``mu_g`` hold one step size per path; for the fully
    complex variants they are complex vectors and scalar step sizes.
    """
    family, order = variant.rsplit("_", 1)
    tally = Tally()
    X = np.asarray(X, dtype=complex)
    if family == "fully_cv":
        out = _cv_step(h, g, X, complex(y), mu_h, mu_g, order, tally)
    else:
        paths = PATHS_2R if family == "two_r" else PATHS_4R
        P = len(paths)
        mh = np.broadcast_to(np.asarray(mu_h, dtype=float), (P,))
        mg = np.broadcast_to(np.asarray(mu_g, dtype=float), (P,))
        out = _split_step(paths, h, g, X, complex(y), mh, mg, order, tally)
    return (*out, tally.count)


def instrumented_count(variant, L, M):
    """Real multiplications tallied while executing one step on a random instance."""
    _check(variant, L, M)
    rng = np.random.default_rng([L, M])
    X = rng.standard_normal((L, M)) + 1j * rng.standard_normal((L, M))
    y = complex(rng.standard_normal(), rng.standard_normal())
    if variant.startswith("fully_cv"):
        h = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    else:
        P = 2 if variant.startswith("two_r") else 4
        h = rng.standard_normal((P, L))
        g = rng.standard_normal((P, M))
    return instrumented_step(variant, h, g, X, y, 0.01, 0.01)[3]


def complexity_table(lmax, mmax):
    """Rows (L, M, variant, closed_form, instrumented) over the grid 1..lmax x 1..mmax."""
    rows = []
    for L in range(1, lmax + 1):
        for M in range(1, mmax + 1):
            for v in VARIANTS:
                rows.append((L, M, v, mult_count(v, L, M).count, instrumented_count(v, L, M)))
    return rows
