"""Scenario configuration: flat ``key = value`` files with validation."""
import dataclasses
import math
import os
from dataclasses import dataclass, fields

from .diffusion import MODES, RELAYS
from .influence import INNER_TERMS, TRANSFORMS
from .radio import RadioParams, auto_rb_count
from .shapley import METHODS


class ConfigError(ValueError):
    """Raised with an itemized list of configuration problems."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass(frozen=True)
class ScenarioConfig:
    # radio
    bandwidth_per_rb: float = 15e3
    carrier_freq: float = 2e9
    tx_power: float = 0.01
    noise_psd_dbm_hz: float = -170.0
    pathloss_exponent: float = 2.5
    target_ber: float = 1e-7
    packet_bits: float = 100.0
    slot_duration: float = 1e-3
    rb_count: int = 0  # 0: scale with the number of directed links
    rb_fraction: float = 0.53
    # topology
    n_clusters: int = 10
    mean_ues_per_cluster: float = 10.0
    total_ues: int = 0  # >0: exactly this many UEs, split multinomially over clusters
    area_radius: float = 1000.0
    cluster_spread: float = 50.0
    topology_file: str = ""
    fading_refresh: int = 0  # 1: redraw fading (and the graphs) every diffusion slot
    # social layer
    community_count: int = 5
    community_mode: str = "random"
    community_overlap: float = 0.0
    membership_file: str = ""
    ties_file: str = ""
    tie_density: float = 1.0
    # centrality
    d_fraction: float = 0.4
    alpha_mode: str = "uniform"
    methods: tuple = METHODS
    distance_transform: str = "identity"
    inner_term: str = "I_mn"
    # Monte Carlo
    master_seed: int = -1  # mandatory; -1 means unset
    runs: int = 100
    topologies: int = 10
    jobs: int = 1
    # diffusion
    diffusion_mode: str = "one-attempt"
    relay: str = "any"
    quiescence_window: int = 5
    max_slots: int = 0  # 0: ten times the number of UEs
    # mobility
    mobility_epoch_slots: int = 10000
    mobility_epochs: int = 3
    mobility_method: str = "SV"

    def radio_params(self, n_ues):
        rb = self.rb_count if self.rb_count > 0 else auto_rb_count(n_ues, self.rb_fraction)
        return RadioParams(
            bandwidth_per_rb=self.bandwidth_per_rb,
            carrier_freq=self.carrier_freq,
            tx_power=self.tx_power,
            noise_psd=10 ** (self.noise_psd_dbm_hz / 10.0) * 1e-3,
            pathloss_exponent=self.pathloss_exponent,
            target_ber=self.target_ber,
            packet_bits=self.packet_bits,
            slot_duration=self.slot_duration,
            rb_count=rb,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_POSITIVE = ("bandwidth_per_rb", "carrier_freq", "tx_power", "pathloss_exponent", "packet_bits",
             "slot_duration", "area_radius", "mean_ues_per_cluster", "d_fraction")
_AT_LEAST_ONE = ("n_clusters", "community_count", "runs", "topologies", "jobs", "quiescence_window",
                 "mobility_epoch_slots", "mobility_epochs")
_CHOICES = {
    "community_mode": ("random", "from-file"),
    "alpha_mode": ("uniform",),
    "distance_transform": TRANSFORMS,
    "inner_term": INNER_TERMS,
    "diffusion_mode": MODES,
    "relay": RELAYS,
    "mobility_method": METHODS,
}


def validate(cfg):
    """List of problems with ``cfg``; empty when valid."""
    problems = []
    for name in _POSITIVE:
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            problems.append(f"{name} must be a positive number (got {v!r})")
    for name in _AT_LEAST_ONE:
        if getattr(cfg, name) < 1:
            problems.append(f"{name} must be >= 1 (got {getattr(cfg, name)!r})")
    for name, allowed in _CHOICES.items():
        if getattr(cfg, name) not in allowed:
            problems.append(f"{name} must be one of {', '.join(allowed)} (got {getattr(cfg, name)!r})")
    if not 0.0 < cfg.target_ber < 0.2:
        problems.append(f"target_ber must lie in (0, 0.2) (got {cfg.target_ber!r})")
    if cfg.cluster_spread < 0:
        problems.append("cluster_spread must be >= 0")
    if cfg.total_ues < 0 or cfg.total_ues == 1:
        problems.append("total_ues must be 0 (Poisson per cluster) or >= 2")
    if cfg.fading_refresh not in (0, 1):
        problems.append(f"fading_refresh must be 0 or 1 (got {cfg.fading_refresh!r})")
    if cfg.rb_count < 0:
        problems.append("rb_count must be >= 0 (0 = auto)")
    if cfg.rb_count == 0 and not 0.0 < cfg.rb_fraction <= 1.0:
        problems.append("rb_fraction must lie in (0, 1]")
    if not 0.0 <= cfg.tie_density <= 1.0:
        problems.append("tie_density must lie in [0, 1]")
    if not 0.0 <= cfg.community_overlap <= 1.0:
        problems.append("community_overlap must lie in [0, 1]")
    if cfg.max_slots < 0:
        problems.append("max_slots must be >= 0 (0 = auto)")
    if cfg.master_seed < 0:
        problems.append("master_seed is mandatory and must be a non-negative integer")
    if not cfg.methods:
        problems.append("methods must list at least one method")
    for m in cfg.methods:
        if m not in METHODS:
            problems.append(f"unknown method {m!r}; expected any of {', '.join(METHODS)}")
    if cfg.community_mode == "from-file":
        if not cfg.membership_file:
            problems.append("community_mode = from-file requires membership_file")
        for name in ("membership_file", "ties_file", "topology_file"):
            path = getattr(cfg, name)
            if path and not os.path.isfile(path):
                problems.append(f"{name}: no such file {path!r}")
    elif cfg.topology_file and not os.path.isfile(cfg.topology_file):
        problems.append(f"topology_file: no such file {cfg.topology_file!r}")
    return problems


def check(cfg):
    problems = validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


_FIELDS = {f.name: f for f in fields(ScenarioConfig)}


def parse_value(name, text):
    """Convert the string form of field ``name`` to its typed value."""
    if name not in _FIELDS:
        raise ConfigError([f"unknown key {name!r}"])
    kind = _FIELDS[name].type
    text = text.strip()
    try:
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float"):
            return float(text)
        if kind in (tuple, "tuple"):
            return tuple(t.strip() for t in text.split(",") if t.strip())
        return text
    except ValueError:
        raise ConfigError([f"{name}: cannot parse {text!r} as {getattr(kind, '__name__', kind)}"]) from None


def format_value(value):
    if isinstance(value, tuple):
        return ", ".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def loads(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values, problems = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            values[key] = parse_value(key, val)
        except ConfigError as exc:
            problems.extend(f"line {lineno}: {p}" for p in exc.problems)
    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(**values)


def dumps(cfg):
    return "".join(f"{f.name} = {format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def save(cfg, path):
    with open(path, "w") as fh:
        fh.write(dumps(cfg))
