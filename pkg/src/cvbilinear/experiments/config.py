"""Scenario descriptions and their TOML representation.

A scenario file is flat TOML::

    name = "miso-roster"
    workload = "miso_adaptive"      # miso_adaptive | miso_block | hammerstein
    L = 64
    M = 5
    noise_std = 0.01
    horizon = 6000                  # samples, or iterations for miso_block
    runs = 20
    seed = 1
    change_point = 3000             # optional
    init_std = 10.0                 # optional
    real_g = false                  # optional, draw a real-valued g

    [signal]
    kind = "white_proper_gaussian"  # or "moving_average_1"
    sigma = 0.01

    [hammerstein]                   # hammerstein workload only
    g_t = 1.15
    phi_t = 0.17453292519943295
    decay = 0.1

    [[filters]]
    kind = "cbnlms"
    label = "CBNLMS"                # optional, defaults to the upper-case kind
    alpha_h = 0.5

Unknown keys anywhere are rejected.
"""
from dataclasses import dataclass, field
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..signals import IqImbalance, SignalModel

WORKLOADS = ("miso_adaptive", "miso_block", "hammerstein")

_REQUIRED = object()

#: allowed parameters per filter kind with their defaults (None: computed from L)
FILTER_PARAMS = {
    "cblms": {"mu_h": _REQUIRED, "mu_g": _REQUIRED},
    "cbnlms": {"alpha_h": 0.5, "alpha_g": 0.5, "delta_h": 1e-4, "delta_g": 1e-4},
    "cbrls": {"lam": None, "nu_g": 10.0, "nu_h": 10.0},
    "blms2r": {"mu_h": _REQUIRED, "mu_g": _REQUIRED},
    "blms4r": {"mu_h": _REQUIRED, "mu_g": _REQUIRED},
    "bnlms2r": {"alpha_h": 0.15, "alpha_g": 0.15, "delta_h": 1e-4, "delta_g": 1e-4},
    "bnlms4r": {"alpha_h": 0.17, "alpha_g": 0.17, "delta_h": 1e-4, "delta_g": 1e-4},
    "linear_nlms": {"alpha_f": 1.0, "delta_f": 1e-2},
    "crblms": {"mu_h": _REQUIRED, "mu_g": _REQUIRED},
    "crbnlms": {"alpha_h": 0.5, "alpha_g": 0.5, "delta_h": 1e-4, "delta_g": 1e-4},
    "crbrls": {"lam": None, "nu_g": 10.0, "nu_h": 10.0},
    # block estimators; n_factor scales the sample count N = n_factor * L * M
    "cbwf": {"stats": "exact", "n_factor": 8},
    "crbwf": {"stats": "exact", "n_factor": 8},
    "cbls": {"n_factor": 1},
    "crbls": {"n_factor": 1},
}

BLOCK_KINDS = ("cbwf", "crbwf", "cbls", "crbls")

_TOP_KEYS = {
    "name", "workload", "L", "M", "noise_std", "horizon", "runs", "seed",
    "change_point", "init_std", "real_g", "signal", "hammerstein", "filters",
}


class ConfigError(ValueError):
    """Invalid scenario description."""


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    label: str
    params: tuple = ()

    @property
    def options(self):
        return dict(self.params)


@dataclass(frozen=True)
class HammersteinSpec:
    imbalance: IqImbalance
    decay: float = 0.1


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    workload: str
    L: int
    M: int
    signal: SignalModel
    noise_std: float
    filters: tuple
    horizon: int
    runs: int = 20
    seed: int = 1
    change_point: int = None
    init_std: float = 10.0
    real_g: bool = False
    hammerstein: HammersteinSpec = None

    def __post_init__(self):
        if self.workload not in WORKLOADS:
            raise ConfigError(f"workload must be one of {WORKLOADS}, got {self.workload!r}")
        if self.L < 1 or self.M < 1:
            raise ConfigError("L and M must be at least 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.noise_std < 0 or not self.init_std > 0:
            raise ConfigError("noise_std must be nonnegative and init_std positive")
        if self.change_point is not None and not 0 < self.change_point < self.horizon:
            raise ConfigError("change_point must lie strictly inside the horizon")
        if not self.filters:
            raise ConfigError("at least one filter is required")
        labels = [f.label for f in self.filters]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"filter labels must be unique, got {labels}")
        block = self.workload == "miso_block"
        for f in self.filters:
            if (f.kind in BLOCK_KINDS) != block:
                raise ConfigError(f"filter kind {f.kind!r} does not fit workload {self.workload!r}")
        if self.workload == "hammerstein":
            if self.hammerstein is None:
                raise ConfigError("hammerstein workload needs a [hammerstein] table")
            if self.M != 2:
                raise ConfigError("the IQ-imbalance Hammerstein model has M = 2")
        if block and self.change_point is not None:
            raise ConfigError("block workloads do not support change_point")

    def with_seed(self, seed):
        return _replace(self, seed=seed)

    def with_runs(self, runs):
        return _replace(self, runs=runs)


def _replace(cfg, **changes):
    from dataclasses import replace
    return replace(cfg, **changes)


def make_filter(kind, label=None, **params):
    """Validated FilterSpec with defaults filled in."""
    if kind not in FILTER_PARAMS:
        raise ConfigError(f"unknown filter kind {kind!r}; known: {sorted(FILTER_PARAMS)}")
    allowed = FILTER_PARAMS[kind]
    unknown = set(params) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for filter {kind!r}")
    merged = {}
    for key, default in allowed.items():
        if key in params:
            value = params[key]
        elif default is _REQUIRED:
            raise ConfigError(f"filter {kind!r} requires parameter {key!r}")
        else:
            value = default
        if isinstance(value, list):
            value = tuple(value)
        merged[key] = value
    return FilterSpec(kind, label or kind.upper(), tuple(sorted(merged.items())))


def _take(table, key, kind, where, default=_REQUIRED):
    if key not in table:
        if default is _REQUIRED:
            raise ConfigError(f"missing key {key!r} in {where}")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ConfigError(f"{where}.{key} must be {kind.__name__}, got {value!r}")
    return value


def parse_config(doc):
    """Build a ScenarioConfig from an already parsed TOML document."""
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")
    sig = doc.get("signal", {})
    if set(sig) - {"kind", "sigma"}:
        raise ConfigError(f"unknown key(s) in [signal]: {sorted(set(sig) - {'kind', 'sigma'})}")
    try:
        signal = SignalModel(_take(sig, "kind", str, "signal", "white_proper_gaussian"),
                             _take(sig, "sigma", float, "signal", 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ham = None
    if "hammerstein" in doc:
        t = doc["hammerstein"]
        if set(t) - {"g_t", "phi_t", "decay"}:
            raise ConfigError(f"unknown key(s) in [hammerstein]: {sorted(set(t) - {'g_t', 'phi_t', 'decay'})}")
        try:
            imb = IqImbalance(_take(t, "g_t", float, "hammerstein"),
                              _take(t, "phi_t", float, "hammerstein"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ham = HammersteinSpec(imb, _take(t, "decay", float, "hammerstein", 0.1))
    filters = []
    raw_filters = doc.get("filters", [])
    if not isinstance(raw_filters, list):
        raise ConfigError("filters must be an array of tables")
    for i, entry in enumerate(raw_filters):
        entry = dict(entry)
        if "kind" not in entry:
            raise ConfigError(f"filters[{i}] lacks a kind")
        filters.append(make_filter(entry.pop("kind"), entry.pop("label", None), **entry))
    change = doc.get("change_point")
    return ScenarioConfig(
        name=_take(doc, "name", str, "scenario"),
        workload=_take(doc, "workload", str, "scenario"),
        L=_take(doc, "L", int, "scenario"),
        M=_take(doc, "M", int, "scenario"),
        signal=signal,
        noise_std=_take(doc, "noise_std", float, "scenario", 0.0),
        filters=tuple(filters),
        horizon=_take(doc, "horizon", int, "scenario"),
        runs=_take(doc, "runs", int, "scenario", 20),
        seed=_take(doc, "seed", int, "scenario", 1),
        change_point=None if change is None else _take(doc, "change_point", int, "scenario"),
        init_std=_take(doc, "init_std", float, "scenario", 10.0),
        real_g=_take(doc, "real_g", bool, "scenario", False),
        hammerstein=ham,
    )


def loads_config(text):
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from exc
    return parse_config(doc)


def load_config(path):
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed scenario file {path}: {exc}") from exc
    return parse_config(doc)


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return str(v)


def dumps_config(cfg):
    """TOML text that ``loads_config`` maps back to ``cfg``."""
    lines = [f"name = {_toml_value(cfg.name)}", f"workload = {_toml_value(cfg.workload)}",
             f"L = {cfg.L}", f"M = {cfg.M}", f"noise_std = {_toml_value(float(cfg.noise_std))}",
             f"horizon = {cfg.horizon}", f"runs = {cfg.runs}", f"seed = {cfg.seed}"]
    if cfg.change_point is not None:
        lines.append(f"change_point = {cfg.change_point}")
    lines += [f"init_std = {_toml_value(float(cfg.init_std))}", f"real_g = {_toml_value(cfg.real_g)}",
              "", "[signal]", f"kind = {_toml_value(cfg.signal.kind)}",
              f"sigma = {_toml_value(float(cfg.signal.sigma))}"]
    if cfg.hammerstein is not None:
        h = cfg.hammerstein
        lines += ["", "[hammerstein]", f"g_t = {_toml_value(float(h.imbalance.g_t))}",
                  f"phi_t = {_toml_value(float(h.imbalance.phi_t))}",
                  f"decay = {_toml_value(float(h.decay))}"]
    for f in cfg.filters:
        lines += ["", "[[filters]]", f"kind = {_toml_value(f.kind)}", f"label = {_toml_value(f.label)}"]
        for key, value in f.params:
            if value is not None:
                lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"
