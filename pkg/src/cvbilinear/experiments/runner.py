"""Monte-Carlo execution of a scenario.

Each run draws one system, one input stream and one noise stream from its
own random sub-stream; every filter of the roster then processes exactly
those samples.
"""
from dataclasses import dataclass

import numpy as np

from .. import adaptive, mixed, splitreal
from ..adaptive import DivergenceError
from ..optimum import (AlternatingEstimate, SingularMatrixError, cbls_iterate, cbwf_iterate,
                       crbls_iterate, crbwf_iterate, ls_cost)
from ..signals import (IQ_BASIS, Rng, hammerstein_matrices, iq_coefficients, miso_matrices,
                       sample_proper_gaussian, synthetic_multipath_channel)
from ..stats import BlockDataset, estimate_stats, exact_stats, ma1_covariance, white_covariance
from .trace import ConvergenceTrace, RunTrace, summarize


@dataclass
class ScenarioResult:
    config: object
    trace: ConvergenceTrace
    summary: list


@dataclass
class RunData:
    """Everything one Monte-Carlo run feeds to the filters."""

    X: np.ndarray       # (K, L, M)
    y: np.ndarray       # (K,)
    f_true: np.ndarray  # (K, L*M), the system in force at each step
    h0: np.ndarray
    g0: np.ndarray


def _draw_system(rng, cfg):
    h = sample_proper_gaussian(rng, cfg.init_std, cfg.L)
    if cfg.real_g:
        g = cfg.init_std * rng.normal(cfg.M)
    else:
        g = sample_proper_gaussian(rng, cfg.init_std, cfg.M)
    return h, g


def generate_run(cfg, run):
    """System, inputs and outputs of Monte-Carlo run ``run`` of a streaming scenario."""
    rng = Rng(cfg.seed, run)
    K, L, M = cfg.horizon, cfg.L, cfg.M
    if cfg.workload == "hammerstein":
        h = synthetic_multipath_channel(rng, L, cfg.hammerstein.decay)
        g = np.array(iq_coefficients(cfg.hammerstein.imbalance))
    else:
        h, g = _draw_system(rng, cfg)
    h0, g0 = _draw_system(rng, cfg)
    if cfg.workload == "hammerstein":
        x = cfg.signal.generate(rng, K)
        X = hammerstein_matrices(x, IQ_BASIS, L)
    else:
        X = miso_matrices(cfg.signal.generate(rng, (K, M)), L)
    noise = sample_proper_gaussian(rng, cfg.noise_std, K)
    segments = [(0, K, h, g)]
    if cfg.change_point is not None:
        h2, g2 = _draw_system(rng, cfg)
        segments = [(0, cfg.change_point, h, g), (cfg.change_point, K, h2, g2)]
    y = np.empty(K, dtype=complex)
    f_true = np.empty((K, L * M), dtype=complex)
    for a, b, hs, gs in segments:
        y[a:b] = np.einsum("l,klm,m->k", hs.conj(), X[a:b], gs)
        f_true[a:b] = np.kron(gs, hs.conj())
    return RunData(X, y + noise, f_true, h0, g0)


def _nm_rows(f_true, f_hat):
    d = f_true - f_hat
    return np.sum(np.abs(d) ** 2, axis=1) / np.sum(np.abs(f_true) ** 2, axis=1)


def _bilinear_f(H, G):
    K = H.shape[0]
    return np.einsum("km,kl->kml", G, H.conj()).reshape(K, -1)


def _split_f(paths, H, G):
    """Widely linear equivalents (a, b) of split-real snapshots H (K,P,L), G (K,P,M)."""
    K = H.shape[0]
    a = 0
    b = 0
    for p, (src, dst) in enumerate(paths):
        F = np.einsum("km,kl->kml", G[:, p], H[:, p]).reshape(K, -1)
        c = 1.0 if dst == "re" else 1j
        if src == "re":
            a = a + c * F / 2
            b = b + c * F / 2
        else:
            a = a + c * F / 2j
            b = b - c * F / 2j
    return a, b


class _Filter:
    """Uniform wrapper: initial state, step function, snapshot and batched NM."""

    def __init__(self, spec, cfg, h0, g0):
        self.spec = spec
        opts = spec.options
        kind = spec.kind
        L, M = cfg.L, cfg.M
        lam = opts.get("lam")
        if lam is None and "lam" in opts:
            lam = 1.0 - 1.0 / L
        self.kind = kind
        if kind == "cblms":
            self.state = adaptive.LmsState(h0, g0, opts["mu_h"], opts["mu_g"])
            self.step = adaptive.cblms_step
        elif kind == "cbnlms":
            self.state = adaptive.NlmsState(h0, g0, opts["alpha_h"], opts["alpha_g"],
                                            opts["delta_h"], opts["delta_g"])
            self.step = adaptive.cbnlms_step
        elif kind == "cbrls":
            self.state = adaptive.make_cbrls(L, M, opts["nu_g"], opts["nu_h"], lam, h0, g0)
            self.step = adaptive.cbrls_step
        elif kind in ("crblms", "crbnlms", "crbrls"):
            g_real = np.real(g0)
            if kind == "crblms":
                self.state = mixed.MixedState(h0, g_real, mu_h=opts["mu_h"], mu_g=opts["mu_g"])
                self.step = mixed.crblms_step
            elif kind == "crbnlms":
                self.state = mixed.MixedState(h0, g_real, alpha_h=opts["alpha_h"],
                                              alpha_g=opts["alpha_g"], delta_h=opts["delta_h"],
                                              delta_g=opts["delta_g"])
                self.step = mixed.crbnlms_step
            else:
                self.state = mixed.make_crbrls(L, M, opts["nu_g"], opts["nu_h"], lam, h0, g_real)
                self.step = mixed.crbrls_step
        elif kind in ("blms2r", "blms4r", "bnlms2r", "bnlms4r"):
            structure = kind[-2:]
            if kind.startswith("blms"):
                self.state = splitreal.make_split_state(structure, h0, g0, opts["mu_h"], opts["mu_g"])
            else:
                self.state = splitreal.make_split_state(structure, h0, g0, opts["alpha_h"],
                                                        opts["alpha_g"], opts["delta_h"],
                                                        opts["delta_g"])
            self.step = getattr(splitreal, f"{kind}_step")
        elif kind == "linear_nlms":
            self.state = splitreal.LinearNlmsState(np.zeros(L * M, dtype=complex),
                                                   opts["alpha_f"], opts["delta_f"])
            self.step = splitreal.linear_nlms_step
        else:
            raise ValueError(f"{kind!r} is not a streaming filter")

    def snapshot(self, s):
        if self.kind == "linear_nlms":
            return (s.f_hat,)
        if self.kind in ("blms2r", "blms4r", "bnlms2r", "bnlms4r"):
            return (s.h, s.g)
        return (s.h_hat, s.g_hat)

    def nm(self, snaps, f_true):
        if self.kind == "linear_nlms":
            return _nm_rows(f_true, np.array([s[0] for s in snaps]))
        H = np.array([s[0] for s in snaps])
        G = np.array([s[1] for s in snaps])
        if self.kind in ("blms2r", "blms4r", "bnlms2r", "bnlms4r"):
            a, b = _split_f(self.state.paths, H, G)
            num = np.sum(np.abs(f_true - a) ** 2, axis=1) + np.sum(np.abs(b) ** 2, axis=1)
            return num / np.sum(np.abs(f_true) ** 2, axis=1)
        return _nm_rows(f_true, _bilinear_f(H, G.astype(complex)))


def run_filter(spec, cfg, data, run):
    """Stream one run's data through one filter and return its RunTrace."""
    flt = _Filter(spec, cfg, data.h0, data.g0)
    state, step = flt.state, flt.step
    snaps = []
    errors = []
    diverged = False
    with np.errstate(all="ignore"):
        for X, y in zip(data.X, data.y):
            try:
                state, e = step(state, X, y)
            except DivergenceError:
                diverged = True
                break
            snaps.append(flt.snapshot(state))
            errors.append(e)
        n = len(snaps)
        nm = flt.nm(snaps, data.f_true[:n]) if n else np.zeros(0)
        ise = np.abs(np.asarray(errors, dtype=complex)) ** 2
    return RunTrace(spec.label, run, nm, ise, diverged)


def _channel_covariance(cfg):
    if cfg.signal.kind == "moving_average_1":
        return ma1_covariance(cfg.L, cfg.signal.sigma)
    return white_covariance(cfg.L, cfg.signal.sigma)


_BLOCK_ITERATE = {"cbwf": cbwf_iterate, "crbwf": crbwf_iterate,
                  "cbls": cbls_iterate, "crbls": crbls_iterate}


def run_block(cfg, run):
    """All block estimators of one run; index n counts alternations (n = 0 is the start)."""
    rng = Rng(cfg.seed, run)
    L, M = cfg.L, cfg.M
    h, g = _draw_system(rng, cfg)
    h0, g0 = _draw_system(rng, cfg)
    n_max = max(spec.options.get("n_factor", 1) for spec in cfg.filters) * L * M
    x = cfg.signal.generate(rng, (n_max + L - 1, M))
    X = miso_matrices(x, L)[L - 1:]  # drop windows that still contain the zero prehistory
    y = np.einsum("l,klm,m->k", h.conj(), X, g) + sample_proper_gaussian(rng, cfg.noise_std, n_max)
    f = np.kron(g, h.conj())
    traces = []
    for spec in cfg.filters:
        opts = spec.options
        N = opts["n_factor"] * L * M
        data = BlockDataset(X[:N], y[:N])
        real = spec.kind.startswith("cr")
        if spec.kind.endswith("wf"):
            if opts["stats"] == "exact":
                source = exact_stats(_channel_covariance(cfg), h, g, cfg.noise_std**2)
            else:
                source = estimate_stats(data)

            def cost(est, source=source):
                return source.mse(est.h_hat, est.g_hat)
        else:
            source = data

            def cost(est, data=data, N=N):
                return ls_cost(data, est.h_hat, est.g_hat) / N
        est = AlternatingEstimate(h0, g0.real if real else g0)
        history = [est]
        diverged = False
        for _ in range(cfg.horizon):
            try:
                est = _BLOCK_ITERATE[spec.kind](source, est)
            except SingularMatrixError:
                diverged = True
                break
            history.append(est)
        nm = np.array([np.sum(np.abs(f - e.f_hat) ** 2) for e in history]) / np.sum(np.abs(f) ** 2)
        ise = np.array([max(cost(e), 0.0) for e in history])
        traces.append(RunTrace(spec.label, run, nm, ise, diverged))
    return traces


def run_scenario(cfg, runs=None):
    """Run every Monte-Carlo repetition of ``cfg`` and summarize.

    ``runs`` optionally restricts execution to a subset of run indices.
    """
    indices = range(cfg.runs) if runs is None else runs
    trace = ConvergenceTrace(cfg.name, tuple(f.label for f in cfg.filters))
    for run in indices:
        if cfg.workload == "miso_block":
            trace.runs.extend(run_block(cfg, run))
            continue
        data = generate_run(cfg, run)
        for spec in cfg.filters:
            trace.runs.append(run_filter(spec, cfg, data, run))
    return ScenarioResult(cfg, trace, summarize(trace))
