"""Identify a small MISO bilinear system with the three complex streaming filters."""
import numpy as np

from cvbilinear import (NlmsState, LmsState, Rng, cblms_step, cbnlms_step, cbrls_step,
                        linearize, make_cbrls, normalized_misalignment)
from cvbilinear.signals import miso_matrices, sample_proper_gaussian

L, M, K = 16, 4, 4000
rng = Rng(2024)
h, g = sample_proper_gaussian(rng, 1.0, L), sample_proper_gaussian(rng, 1.0, M)
h0, g0 = sample_proper_gaussian(rng, 1.0, L), sample_proper_gaussian(rng, 1.0, M)
X = miso_matrices(sample_proper_gaussian(rng, 1.0, (K, M)), L)
y = np.einsum("l,klm,m->k", h.conj(), X, g) + sample_proper_gaussian(rng, 1e-3, K)
f = linearize(h, g)

filters = {
    "CBLMS": (LmsState(h0, g0, 2e-3, 2e-3), cblms_step),
    "CBNLMS": (NlmsState(h0, g0, 0.5, 0.5), cbnlms_step),
    "CBRLS": (make_cbrls(L, M, 10.0, 10.0, 0.99, h0, g0), cbrls_step),
}
checkpoints = (100, 500, 1000, 2000, K)
print("step   " + "".join(f"{name:>10}" for name in filters))
states = {name: s for name, (s, _) in filters.items()}
k = 0
for stop in checkpoints:
    for name, (_, step) in filters.items():
        s = states[name]
        for i in range(k, stop):
            s, _ = step(s, X[i], y[i])
        states[name] = s
    k = stop
    nm = [normalized_misalignment(f, states[n].f_hat).nm_db for n in filters]
    print(f"{stop:<7}" + "".join(f"{v:10.1f}" for v in nm))
print("(normalized misalignment in dB; only f = g (x) conj(h) is identifiable)")
