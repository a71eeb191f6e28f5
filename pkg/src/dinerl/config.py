"""Run configuration: dataclass bundle + INI-style config files + overrides.

Config files use configparser sections mapping 1:1 onto the dataclasses:

    [sim]       SimConfig fields        (tau, max_servers, dimmer_step, ...)
    [agent]     AgentHyper fields       (gamma, epsilon_start, batch_size, ...)
    [dine]      thresholds              (rho, phi)
    [workload]  WorkloadSpec fields     (kind, base_rate, amplitude, ...)
    [model]     dynamics-model schedule (interval, epochs, holdout_fraction, ...)
    [run]       everything else        (total_steps, seed, trace, port, ...)

Values are coerced to the type of the field's default. Command-line
overrides use the same addressing: ``--set sim.tau=30``.
"""

from __future__ import annotations

import configparser
import dataclasses
import json
from dataclasses import dataclass, field

from .agent import AgentHyper
from .dine import DineThresholds
from .errors import ConfigurationError
from .swimsim import SimConfig, WorkloadSpec


@dataclass
class ModelSchedule:
    """Retraining cadence for the learned dynamics model."""

    interval: int = 1000
    epochs: int = 20
    holdout_fraction: float = 0.1
    min_size: int = 100
    learning_rate: float = 1e-3

    def __post_init__(self) -> None:
        if self.interval < 1:
            raise ConfigurationError(f"model interval must be >= 1: {self.interval}")


@dataclass
class RunConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    hyper: AgentHyper = field(default_factory=AgentHyper)
    thresholds: DineThresholds = field(default_factory=DineThresholds)
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    model: ModelSchedule = field(default_factory=ModelSchedule)
    total_steps: int = 20_000
    seed: int = 0
    # one global factor on every channel before the agent learns from it;
    # keeps Q-targets reachable at the fixed learning rate and leaves every
    # explanation quantity invariant (uniform positive scaling)
    reward_scale: float = 1e-4
    replay_capacity: int = 50_000
    hidden: tuple[int, ...] = (64, 64)
    trace: str | None = None
    workload_csv: str | None = None
    host: str = "127.0.0.1"
    port: int = 7364

    def validate(self) -> None:
        if self.total_steps < 0:
            raise ConfigurationError(f"total_steps must be >= 0: {self.total_steps}")
        if self.reward_scale <= 0:
            raise ConfigurationError(f"reward_scale must be positive: {self.reward_scale}")
        if self.replay_capacity < 1:
            raise ConfigurationError(f"replay_capacity must be >= 1: {self.replay_capacity}")
        if not (0 <= self.port < 65536):  # 0 = bind an ephemeral port
            raise ConfigurationError(f"port out of range: {self.port}")
        try:
            self.thresholds.validate()
        except ValueError as exc:  # bad thresholds in a config file are a config problem
            raise ConfigurationError(str(exc)) from exc

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["hidden"] = list(self.hidden)
        out["workload"]["spikes"] = [list(s) for s in self.workload.spikes]
        return out


_SECTIONS = {
    "sim": "sim",
    "agent": "hyper",
    "dine": "thresholds",
    "workload": "workload",
    "model": "model",
    "run": None,
}

# [run] keys that do not share the attribute name
_RUN_ALIASES = {"trace": "trace", "workload_csv": "workload_csv"}


def _coerce(name: str, default, text: str):
    text = text.strip()
    if name == "spikes":
        try:
            parsed = json.loads(text)
            return tuple(tuple(entry) for entry in parsed)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigurationError(f"spikes must be a JSON list of [start, duration, rate]: {text!r}") from exc
    if isinstance(default, bool):
        if text.lower() in ("true", "1", "yes", "on"):
            return True
        if text.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigurationError(f"{name}: not a boolean: {text!r}")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigurationError(f"{name}: not an integer: {text!r}") from exc
    if isinstance(default, float):
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigurationError(f"{name}: not a number: {text!r}") from exc
    if isinstance(default, tuple):
        try:
            return tuple(int(part) for part in text.split(",") if part.strip())
        except ValueError as exc:
            raise ConfigurationError(f"{name}: not a comma-separated int list: {text!r}") from exc
    if default is None:
        if text.lower() in ("none", ""):
            return None
        for caster in (int, float):
            try:
                return caster(text)
            except ValueError:
                continue
        return text
    return text


def _declared_default(obj, key: str):
    """Field default from the dataclass definition, not the live value.

    Coercion must stay stable: once trace='x.jsonl' is set, a later
    'trace=none' still has to map back to None.
    """
    for f in dataclasses.fields(obj):
        if f.name == key:
            if f.default is not dataclasses.MISSING:
                return f.default
            if f.default_factory is not dataclasses.MISSING:
                return f.default_factory()
    return getattr(obj, key)


def _set_field(obj, key: str, text: str) -> None:
    if not hasattr(obj, key):
        raise ConfigurationError(f"unknown config key: {key}")
    setattr(obj, key, _coerce(key, _declared_default(obj, key), text))


def _apply(cfg: RunConfig, section: str, key: str, text: str) -> None:
    if section not in _SECTIONS:
        raise ConfigurationError(f"unknown config section: {section}")
    attr = _SECTIONS[section]
    if attr is None:
        target = cfg
        key = _RUN_ALIASES.get(key, key)
    else:
        target = getattr(cfg, attr)
    if dataclasses.is_dataclass(target) and type(target).__dataclass_params__.frozen:
        # frozen dataclasses (WorkloadSpec) are rebuilt with replace()
        if not any(f.name == key for f in dataclasses.fields(target)):
            raise ConfigurationError(f"unknown config key: {section}.{key}")
        value = _coerce(key, _declared_default(target, key), text)
        setattr(cfg, attr, dataclasses.replace(target, **{key: value}))
    else:
        _set_field(target, key, text)


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    for section in parser.sections():
        for key, text in parser.items(section):
            _apply(cfg, section, key, text)
    _revalidate(cfg)
    return cfg


def apply_overrides(cfg: RunConfig, overrides: list[str]) -> RunConfig:
    """Each override is 'section.key=value', e.g. 'sim.tau=30'."""
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigurationError(f"override must look like section.key=value: {item!r}")
        address, text = item.split("=", 1)
        section, key = address.split(".", 1)
        _apply(cfg, section.strip(), key.strip(), text)
    _revalidate(cfg)
    return cfg


def _revalidate(cfg: RunConfig) -> None:
    # mutated in place, so dataclass __post_init__ hooks must be re-run
    cfg.sim.__post_init__()
    cfg.hyper.__post_init__()
    cfg.model.__post_init__()
    cfg.validate()
