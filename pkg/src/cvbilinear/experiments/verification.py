"""Acceptance checks: each criterion reports its measurement against a threshold.

Every check is deterministic for a given seed.  A check passes when its
condition holds and it finished within its time budget.
"""
from dataclasses import dataclass, replace
import time

import numpy as np

from ..adaptive import (DivergenceError, NlmsState, cbnlms_step, cbrls_step, estimate_sigma_x,
                        instantaneous_gradients, lms_step_bounds, make_cbrls)
from ..complexity import VARIANTS, instrumented_count, mult_count
from ..mixed import MixedState, crbnlms_g_step, crbnlms_step, crblms_step, crbrls_gain, crbrls_step, make_crbrls
from ..model import fd_real_gradient, fd_wirtinger_gradient, linearize, normalized_misalignment, to_db
from ..optimum import (AlternatingEstimate, cbls_iterate, cbwf_iterate, wiener_gradient_g,
                       wiener_gradient_h)
from ..signals import Rng, SignalModel, miso_matrices, sample_proper_gaussian
from ..stats import BlockDataset, estimate_stats, exact_stats, ma1_covariance, white_covariance
from .config import ScenarioConfig, make_filter
from .runner import generate_run, run_filter, run_scenario
from .scenarios import get_scenario
from .trace import iterations_to, steady_state


@dataclass(frozen=True)
class CriterionResult:
    number: int
    key: str
    title: str
    condition_met: bool
    measured: str
    threshold: str
    runtime: float
    limit: float = None
    details: str = ""

    @property
    def within_time(self):
        return self.limit is None or self.runtime < self.limit

    @property
    def passed(self):
        return self.condition_met and self.within_time

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        budget = "" if self.limit is None else f" / {self.limit:g} s"
        text = (f"{status} [{self.number:2d}] {self.key}: measured {self.measured}; "
                f"required {self.threshold} ({self.runtime:.1f} s{budget})")
        if not self.within_time:
            text += " [time budget exceeded]"
        return text


def _draw(rng, sigma, n):
    return sample_proper_gaussian(rng, sigma, n)


def check_cbwf_one_step(seed=1):
    """Exact statistics with i.i.d. channels: one alternation reaches the precision floor."""
    L, M = 64, 5
    worst = -np.inf
    parts = []
    for kind, cov in (("white", white_covariance(L, 1.0)),
                      ("MA(1)", ma1_covariance(L, np.sqrt(0.5)))):
        rng = Rng(seed, 1 if kind == "white" else 2)
        h, g, g0 = _draw(rng, 10, L), _draw(rng, 10, M), _draw(rng, 10, M)
        stats = exact_stats(cov, h, g)
        est = cbwf_iterate(stats, AlternatingEstimate(np.zeros(L, complex), g0))
        nm_db = normalized_misalignment(linearize(h, g), est.f_hat).nm_db
        worst = max(worst, nm_db)
        parts.append(f"{kind} {nm_db:.1f} dB")
    return worst <= -200, ", ".join(parts), "NM(f_1) <= -200 dB", ""


def check_cbls_ordering(seed=None):
    base = get_scenario("miso-wf-vs-ls")
    cfg = replace(base, filters=base.filters[1:], runs=10, noise_std=0.0,
                  seed=base.seed if seed is None else seed)

    def floors(c):
        trace = run_scenario(c).trace
        return [float(to_db(trace.mean_nm(f.label)[40])) for f in c.filters]

    quiet = floors(cfg)
    ok = quiet[0] <= quiet[1] <= quiet[2] and max(quiet) <= -80
    noisy = floors(replace(cfg, noise_std=0.01))
    measured = "noiseless N=8ML/2ML/ML: " + " / ".join(f"{v:.1f}" for v in quiet) + " dB"
    details = ("with noise std 0.01 the floors are " + " / ".join(f"{v:.1f}" for v in noisy)
               + " dB (ordered: " + str(noisy[0] <= noisy[1] <= noisy[2]) + ")")
    return ok, measured, "NM(8ML) <= NM(2ML) <= NM(ML), each <= -80 dB", details


def check_cbls_equals_cbwf(seed=3):
    L, M, N = 8, 3, 96
    rng = Rng(seed)
    h, g = _draw(rng, 1, L), _draw(rng, 1, M)
    X = miso_matrices(_draw(rng, 1, (N + L - 1, M)), L)[L - 1:]
    y = np.einsum("l,klm,m->k", h.conj(), X, g) + _draw(rng, 0.1, N)
    data = BlockDataset(X, y)
    stats = estimate_stats(data)
    a = b = AlternatingEstimate(_draw(rng, 1, L), _draw(rng, 1, M))
    worst = 0.0
    for _ in range(20):
        a = cbls_iterate(data, a)
        b = cbwf_iterate(stats, b)
        for u, v in ((a.h_hat, b.h_hat), (a.g_hat, b.g_hat)):
            worst = max(worst, np.linalg.norm(u - v) / np.linalg.norm(v))
    return worst <= 1e-10, f"max relative difference {worst:.2e}", "<= 1e-10", ""


def check_cblms_stability(seed=None):
    cfg = get_scenario("cblms-stability")
    if seed is not None:
        cfg = cfg.with_seed(seed)
    burn, window = 500, 500
    stable = 0
    diverged = 0
    long_cfg = replace(cfg, horizon=100_000)
    for run in range(cfg.runs):
        data = generate_run(cfg, run)
        sigma_x = estimate_sigma_x(data.X[:1000, 0, :])
        bounds = lms_step_bounds(cfg.L, cfg.M, sigma_x, np.vdot(data.g0, data.g0).real,
                                 np.vdot(data.h0, data.h0).real, 1.0, 1.0)
        spec = make_filter("cblms", mu_h=0.1 * bounds.mu_h_max, mu_g=0.1 * bounds.mu_g_max)
        tr = run_filter(spec, cfg, data, run)
        if not tr.diverged:
            n = (len(tr) - burn) // window * window
            w = tr.nm[burn:burn + n].reshape(-1, window).mean(axis=1)
            stable += bool(np.all(np.diff(w) <= 0))
        # step size beyond the bound: expect non-finite coefficients
        spec = make_filter("cblms", mu_h=4 * bounds.mu_h_max, mu_g=0.1 * bounds.mu_g_max)
        long_data = generate_run(long_cfg, run)
        diverged += run_filter(spec, long_cfg, long_data, run).diverged
    ok = stable >= 48 and diverged >= 45
    return (ok, f"{stable}/50 monotone at 10% of bounds, {diverged}/50 diverged at 4x mu_h bound",
            ">= 48/50 monotone, >= 45/50 diverged", "")


def check_nlms_a_posteriori(seed=5):
    L, M, steps = 8, 4, 10_000
    worst = 0.0
    for alpha_h, alpha_g in ((1.0, 0.0), (0.0, 1.0)):
        rng = Rng(seed, int(alpha_h))
        h, g = _draw(rng, 1, L), _draw(rng, 1, M)
        s = NlmsState(_draw(rng, 1, L), _draw(rng, 1, M), alpha_h, alpha_g, 0.0, 0.0)
        Xs = _draw(rng, 1, (steps, L, M))
        ys = np.einsum("l,klm,m->k", h.conj(), Xs, g) + _draw(rng, 0.1, steps)
        for X, y in zip(Xs, ys):
            h_old, g_old = s.h_hat, s.g_hat
            s, e = cbnlms_step(s, X, y)
            if alpha_h:
                post = y - np.vdot(s.h_hat, X @ g_old)
            else:
                post = y - np.vdot(h_old, X @ s.g_hat)
            if e != 0:
                worst = max(worst, abs(post) / abs(e))
    return worst <= 1e-10, f"max |e_post|/|e| = {worst:.2e}", "<= 1e-10", ""


def check_rls_woodbury(seed=6):
    L, M, lam, nu = 6, 3, 0.99, 10.0
    rng = Rng(seed)
    h, g = _draw(rng, 1, L), _draw(rng, 1, M)
    s = make_cbrls(L, M, nu, nu, lam, _draw(rng, 1, L), _draw(rng, 1, M))
    Rg = np.eye(L) / nu
    Rh = np.eye(M) / nu
    worst = 0.0
    for _ in range(1000):
        X = _draw(rng, 1, (L, M))
        y = np.vdot(h, X @ g) + _draw(rng, 0.01, 1)[0]
        u = X @ s.g_hat
        v = X.conj().T @ s.h_hat
        Rg = lam * Rg + np.outer(u, u.conj())
        Rh = lam * Rh + np.outer(v, v.conj())
        s, _ = cbrls_step(s, X, y)
        for P, R in ((s.p_g, Rg), (s.p_h, Rh)):
            ref = np.linalg.inv(R)
            worst = max(worst, np.linalg.norm(P - ref) / np.linalg.norm(ref))
    return worst <= 1e-8, f"max relative deviation {worst:.2e}", "<= 1e-8", ""


def check_miso_roster(seed=None):
    cfg = get_scenario("miso-roster")
    if seed is not None:
        cfg = cfg.with_seed(seed)
    trace = run_scenario(cfg).trace
    cp = cfg.change_point
    k = {}
    for label in ("CBRLS", "CBNLMS"):
        curve = trace.mean_nm_db(label)
        k[label] = (iterations_to(curve, -20.0, 0, cp), iterations_to(curve, -20.0, cp))
    best_split = {lab: float(np.min(trace.mean_nm_db(lab))) for lab in ("2R-BNLMS", "4R-BNLMS")}

    def faster(a, b):
        return a is not None and (b is None or a < b)

    ok = (faster(k["CBRLS"][0], k["CBNLMS"][0]) and faster(k["CBRLS"][1], k["CBNLMS"][1])
          and all(v > -10 for v in best_split.values()))
    measured = (f"steps to -20 dB before/after change: CBRLS {k['CBRLS']}, CBNLMS {k['CBNLMS']}; "
                f"best split-real NM {best_split['2R-BNLMS']:.1f} / {best_split['4R-BNLMS']:.1f} dB")
    return ok, measured, "CBRLS < CBNLMS in both segments; 2R/4R stay above -10 dB", ""


def check_hammerstein(seed=None):
    cfg = get_scenario("hammerstein-iq")
    if seed is not None:
        cfg = cfg.with_seed(seed)
    trace = run_scenario(cfg).trace
    floor = 10 * np.log10(cfg.noise_std**2)
    ss = {lab: steady_state(trace.mean_ise_db(lab)) for lab in trace.filters}
    ok = (ss["CBNLMS"] <= floor + 10 and ss["CBRLS"] <= floor + 10
          and ss["2R-BNLMS"] >= floor + 30 and ss["4R-BNLMS"] >= floor + 30)
    measured = ", ".join(f"{lab} {v:.1f} dB" for lab, v in ss.items())
    return ok, measured, f"CV <= {floor + 10:.0f} dB, split-real >= {floor + 30:.0f} dB", ""


def check_bilinear_vs_linear(seed=None):
    cfg = get_scenario("miso-bilinear-vs-linear")
    if seed is not None:
        cfg = cfg.with_seed(seed)
    trace = run_scenario(cfg).trace
    med = {}
    for label in trace.filters:
        hits = []
        for r in trace.for_filter(label):
            k = iterations_to(to_db(r.nm), -20.0)
            hits.append(np.inf if k is None else k)
        med[label] = float(np.median(hits))
    ok = med["CBNLMS"] < med["linear NLMS"]
    return (ok, f"median steps to -20 dB: CBNLMS {med['CBNLMS']:g}, linear {med['linear NLMS']:g}",
            "CBNLMS strictly fewer", "")


def check_complexity(seed=None):
    mismatches = [(v, L, M) for L in range(1, 9) for M in range(1, 9) for v in VARIANTS
                  if mult_count(v, L, M).count != instrumented_count(v, L, M)]
    return (not mismatches, f"{len(mismatches)} mismatches on the 8 x 8 grid", "0 mismatches",
            str(mismatches[:5]) if mismatches else "")


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def check_gradients(seed=11):
    rng = Rng(seed)
    worst = {"wiener h": 0.0, "wiener g": 0.0, "lms h": 0.0, "lms g": 0.0, "mixed step": 0.0}
    for _ in range(100):
        L, M = 4, 3
        h, g = _draw(rng, 1, L), _draw(rng, 1, M)
        hh, gg = _draw(rng, 1, L), _draw(rng, 1, M)
        A = _draw(rng, 1, (L, L))
        stats = exact_stats(A @ A.conj().T / L + np.eye(L), h, g, 0.01)
        worst["wiener h"] = max(worst["wiener h"], _rel(
            wiener_gradient_h(stats, hh, gg), fd_wirtinger_gradient(lambda v: stats.mse(v, gg), hh)))
        worst["wiener g"] = max(worst["wiener g"], _rel(
            wiener_gradient_g(stats, hh, gg), fd_wirtinger_gradient(lambda v: stats.mse(hh, v), gg)))
        X = _draw(rng, 1, (L, M))
        y = np.vdot(h, X @ g)
        gh, gg_ = instantaneous_gradients(hh, gg, X, y)

        def j(a, b):
            return abs(y - np.vdot(a, X @ b)) ** 2

        worst["lms h"] = max(worst["lms h"], _rel(gh, fd_wirtinger_gradient(lambda v: j(v, gg), hh)))
        worst["lms g"] = max(worst["lms g"], _rel(gg_, fd_wirtinger_gradient(lambda v: j(hh, v), gg)))
        # derivative of the a posteriori error over the mixed g step size
        g_real = gg.real
        e = y - np.vdot(hh, X @ g_real)
        d, a_, b_ = crbnlms_g_step(e, X, hh)
        t = float(np.abs(_draw(rng, 1, 1)[0]))

        def post(tv):
            return abs(y - np.vdot(hh, X @ (g_real + tv[0] * d))) ** 2

        analytic = -2 * a_ + 2 * t * b_
        numeric = fd_real_gradient(post, np.array([t]))[0]
        worst["mixed step"] = max(worst["mixed step"], abs(analytic - numeric) / abs(numeric))
    ok = all(v <= 1e-6 for v in worst.values())
    measured = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, measured, "all <= 1e-6 relative", ""


def check_mixed(seed=23):
    rng = Rng(seed)
    L, M, steps = 8, 3, 10_000
    h, g = _draw(rng, 1, L), rng.normal(M)
    Xs = _draw(rng, 1, (steps, L, M))
    ys = np.einsum("l,klm,m->k", h.conj(), Xs, g) + _draw(rng, 0.01, steps)
    h0, g0 = _draw(rng, 1, L), rng.normal(M)
    states = {
        "CRBLMS": (MixedState(h0, g0, mu_h=0.005, mu_g=0.005), crblms_step),
        "CRBNLMS": (MixedState(h0, g0), crbnlms_step),
        "CRBRLS": (make_crbrls(L, M, lam=0.99, h0=h0, g0=g0), crbrls_step),
    }
    worst_imag = 0.0
    for name, (s, step) in states.items():
        for X, y in zip(Xs, ys):
            if name == "CRBRLS":
                K, _ = crbrls_gain(s.p_h_tilde, X.conj().T @ s.h_hat, s.lam)
                e = y - np.vdot(s.h_hat, X @ s.g_hat)
                worst_imag = max(worst_imag, float(np.max(np.abs((K @ [e, np.conj(e)]).imag))))
            s, _ = step(s, X, y)
            worst_imag = max(worst_imag, float(np.max(np.abs(np.imag(s.g_hat)))))
    cfg = ScenarioConfig("mixed-real-g", "miso_adaptive", L, M,
                         SignalModel("white_proper_gaussian", 1.0), 0.01,
                         (make_filter("cblms", "CBLMS", mu_h=0.005, mu_g=0.005),
                          make_filter("crblms", "CRBLMS", mu_h=0.005, mu_g=0.005)),
                         horizon=20000, runs=10, seed=seed, init_std=1.0, real_g=True)
    trace = run_scenario(cfg).trace
    cv = steady_state(trace.mean_nm_db("CBLMS"))
    mx = steady_state(trace.mean_nm_db("CRBLMS"))
    ok = worst_imag <= 1e-12 and abs(cv - mx) <= 3
    return (ok, f"max |Im g| {worst_imag:.1e}; NM floors CBLMS {cv:.1f} dB, CRBLMS {mx:.1f} dB",
            "|Im g| <= 1e-12 and floors within 3 dB", "")


#: number -> (key, title, check, time budget in seconds)
CRITERIA = {
    1: ("cbwf-one-step", "Wiener filter converges in one alternation", check_cbwf_one_step, 5),
    2: ("cbls-ordering", "LS floors improve with more data", check_cbls_ordering, 60),
    3: ("cbls-equals-cbwf", "LS equals Wiener on sample statistics", check_cbls_equals_cbwf, 5),
    4: ("cblms-stability", "LMS step-size bounds", check_cblms_stability, 120),
    5: ("cbnlms-a-posteriori", "NLMS zeroes the a posteriori error", check_nlms_a_posteriori, 5),
    6: ("cbrls-woodbury", "RLS inverse matches the direct inverse", check_rls_woodbury, 10),
    7: ("miso-roster", "RLS faster than NLMS; split-real filters fail", check_miso_roster, 120),
    8: ("hammerstein-iq", "IQ-imbalance Hammerstein identification", check_hammerstein, 120),
    9: ("bilinear-vs-linear", "bilinear NLMS converges faster than linear NLMS",
        check_bilinear_vs_linear, 60),
    10: ("complexity", "closed-form and counted multiplications agree", check_complexity, None),
    11: ("gradients", "analytic gradients match finite differences", check_gradients, 30),
    12: ("mixed-realness", "mixed filters keep g real", check_mixed, 30),
}


def resolve(selection):
    """Criterion numbers selected by number or key; None selects all."""
    if selection is None:
        return sorted(CRITERIA)
    if isinstance(selection, (int, str)):
        selection = [selection]
    out = []
    for item in selection:
        if isinstance(item, int) or str(item).isdigit():
            n = int(item)
            if n not in CRITERIA:
                raise KeyError(f"no criterion {n}")
            out.append(n)
            continue
        hits = [n for n, c in CRITERIA.items() if item in c[0]]
        if not hits:
            raise KeyError(f"no criterion matches {item!r}")
        out.extend(hits)
    return sorted(set(out))


def run_criterion(number, seed=None):
    key, title, check, limit = CRITERIA[number]
    start = time.perf_counter()
    with np.errstate(all="ignore"):
        ok, measured, threshold, details = check() if seed is None else check(seed=seed)
    runtime = time.perf_counter() - start
    return CriterionResult(number, key, title, bool(ok), measured, threshold, runtime, limit, details)


def verify(selection=None, seed=None, report=None):
    """Run the selected criteria; ``report`` receives each result as it completes."""
    results = []
    for n in resolve(selection):
        r = run_criterion(n, seed)
        results.append(r)
        if report is not None:
            report(r)
    return results
