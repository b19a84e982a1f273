"""Builtin scenarios mirroring the MISO and Hammerstein identification experiments."""
import math

from ..signals import IqImbalance, SignalModel
from .config import HammersteinSpec, ScenarioConfig, make_filter


def _miso_wf_vs_ls(kind, name):
    return ScenarioConfig(
        name=name,
        workload="miso_block",
        L=64,
        M=5,
        # the moving average is driven by u with variance 0.5
        signal=SignalModel(kind, 1.0 if kind == "white_proper_gaussian" else math.sqrt(0.5)),
        noise_std=0.0,
        filters=(
            make_filter("cbwf", "CBWF", stats="exact"),
            make_filter("cbls", "CBLS N=8ML", n_factor=8),
            make_filter("cbls", "CBLS N=2ML", n_factor=2),
            make_filter("cbls", "CBLS N=ML", n_factor=1),
        ),
        horizon=40,
        runs=10,
        seed=11,
    )


def _miso_roster():
    return ScenarioConfig(
        name="miso-roster",
        workload="miso_adaptive",
        L=64,
        M=5,
        signal=SignalModel("white_proper_gaussian", 0.01),
        noise_std=0.01,
        filters=(
            make_filter("cbnlms", "CBNLMS", alpha_h=0.5, alpha_g=0.5, delta_h=1e-4, delta_g=1e-4),
            make_filter("cbrls", "CBRLS", lam=63 / 64, nu_g=10.0, nu_h=10.0),
            make_filter("bnlms2r", "2R-BNLMS", alpha_h=0.15, alpha_g=0.15),
            make_filter("bnlms4r", "4R-BNLMS", alpha_h=0.17, alpha_g=0.17),
        ),
        horizon=6000,
        runs=20,
        seed=7,
        change_point=3000,
    )


def _hammerstein_iq():
    return ScenarioConfig(
        name="hammerstein-iq",
        workload="hammerstein",
        L=64,
        M=2,
        signal=SignalModel("white_proper_gaussian", 1.0),
        noise_std=1e-4,
        filters=(
            make_filter("cbnlms", "CBNLMS", alpha_h=0.5, alpha_g=0.5, delta_h=1e-4, delta_g=1e-4),
            make_filter("cbrls", "CBRLS", lam=0.95, nu_g=10.0, nu_h=10.0),
            make_filter("bnlms2r", "2R-BNLMS", alpha_h=1.7e-3, alpha_g=1.7e-3),
            make_filter("bnlms4r", "4R-BNLMS", alpha_h=1e-4, alpha_g=1e-4),
        ),
        horizon=10000,
        runs=20,
        seed=5,
        hammerstein=HammersteinSpec(IqImbalance(1.15, math.pi / 18), decay=0.1),
    )


def _bilinear_vs_linear():
    return ScenarioConfig(
        name="miso-bilinear-vs-linear",
        workload="miso_adaptive",
        L=30,
        M=5,
        signal=SignalModel("white_proper_gaussian", 1.0),
        noise_std=1.0,
        filters=(
            make_filter("cbnlms", "CBNLMS", alpha_h=0.7, alpha_g=0.7, delta_h=1e-2, delta_g=1e-2),
            make_filter("linear_nlms", "linear NLMS", alpha_f=1.0, delta_f=1e-2),
        ),
        horizon=20000,
        runs=10,
        seed=3,
    )


def _cblms_stability():
    # step sizes are placeholders; the stability check sets them from the bounds
    return ScenarioConfig(
        name="cblms-stability",
        workload="miso_adaptive",
        L=16,
        M=4,
        signal=SignalModel("white_proper_gaussian", 0.01),
        noise_std=0.0,
        filters=(make_filter("cblms", "CBLMS", mu_h=1.0, mu_g=1.0),),
        horizon=2500,
        runs=50,
        seed=17,
    )


BUILTIN_SCENARIOS = {
    cfg.name: cfg
    for cfg in (
        _miso_wf_vs_ls("white_proper_gaussian", "miso-wf-vs-ls"),
        _miso_wf_vs_ls("moving_average_1", "miso-wf-vs-ls-ma1"),
        _miso_roster(),
        _hammerstein_iq(),
        _bilinear_vs_linear(),
        _cblms_stability(),
    )
}


def get_scenario(name):
    try:
        return BUILTIN_SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; builtin: {sorted(BUILTIN_SCENARIOS)}") from None
