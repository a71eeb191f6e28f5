"""Discrete-time simulator of a self-adaptive multi-tier web application.

A pool of identical servers handles a request stream; each server behaves
like an M/M/1 queue with a hard latency cap. The dimmer sets the fraction
of requests served with optional (heavier, higher-revenue) content. Actions
adjust the pool size and dimmer; rewards come back as a three-channel
vector (user satisfaction, revenue, running costs).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, EpisodeEnd


class Action(enum.IntEnum):
    NO_ADAPTATION = 0
    ADD_SERVER = 1
    REMOVE_SERVER = 2
    INCREASE_DIMMER = 3
    DECREASE_DIMMER = 4


N_ACTIONS = len(Action)
ACTION_NAMES = ("NoAdaptation", "AddServer", "RemoveServer", "IncreaseDimmer", "DecreaseDimmer")

CHANNEL_NAMES = ("user_satisfaction", "revenue", "costs")
N_CHANNELS = len(CHANNEL_NAMES)

_BOUND_EPS = 1e-12


@dataclass
class SimConfig:
    tau: float = 60.0                      # seconds per control step
    max_servers: int = 12
    boot_delay_steps: int = 1
    dimmer_step: float = 0.05
    service_time_mandatory: float = 0.02   # seconds per request, mandatory content
    service_time_optional: float = 0.05    # extra seconds when optional content is served
    latency_cap: float = 10.0
    revenue_optional: float = 1.5          # per request served with optional content
    revenue_mandatory: float = 1.0         # per mandatory-only request
    server_cost_rate: float = 1.0          # cost per server-second
    weight_user: float = 4.0
    weight_revenue: float = 2.0
    weight_cost: float = 1.0
    action_penalty: float = 0.1            # per channel, any action except NoAdaptation
    illegal_penalty: float = 1.0           # per channel, on top of the action penalty
    initial_servers: int = 4
    initial_dimmer: float = 0.5
    interarrival_norm: float = 0.05        # seconds mapping to observation value 1.0
    throughput_norm: float = 100.0         # requests/second mapping to observation value 1.0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigurationError(f"tau must be positive: {self.tau}")
        if self.max_servers < 1:
            raise ConfigurationError(f"max_servers must be >= 1: {self.max_servers}")
        if not (0.0 < self.dimmer_step <= 1.0):
            raise ConfigurationError(f"dimmer_step must be in (0, 1]: {self.dimmer_step}")
        if not (self.revenue_optional > self.revenue_mandatory > 0.0):
            raise ConfigurationError(
                f"need revenue_optional > revenue_mandatory > 0: "
                f"{self.revenue_optional}, {self.revenue_mandatory}"
            )
        if self.latency_cap <= self.service_time_mandatory:
            raise ConfigurationError("latency_cap must exceed the mandatory service time")
        if self.boot_delay_steps < 0:
            raise ConfigurationError(f"boot_delay_steps must be >= 0: {self.boot_delay_steps}")
        if not (1 <= self.initial_servers <= self.max_servers):
            raise ConfigurationError(f"initial_servers out of range: {self.initial_servers}")
        if not (0.0 <= self.initial_dimmer <= 1.0):
            raise ConfigurationError(f"initial_dimmer out of range: {self.initial_dimmer}")


@dataclass
class SimState:
    arrival_rate: float
    active_servers: int
    booting_servers: int
    dimmer: float
    response_time: float
    throughput: float
    step_index: int

    def to_dict(self) -> dict:
        return {
            "arrival_rate": self.arrival_rate,
            "active_servers": self.active_servers,
            "booting_servers": self.booting_servers,
            "dimmer": self.dimmer,
            "response_time": self.response_time,
            "throughput": self.throughput,
            "step_index": self.step_index,
        }


def mean_service_time(dimmer: float, cfg: SimConfig) -> float:
    return cfg.service_time_mandatory + dimmer * cfg.service_time_optional


def compute_latency(arrival_rate: float, active_servers: int, dimmer: float, cfg: SimConfig) -> float:
    """Average response time of the pool: per-server M/M/1 delay, capped.

    Load is split evenly, so per-server utilization is lambda * E[S] / s.
    At or beyond saturation the queue is pinned at the latency cap.
    """
    es = mean_service_time(dimmer, cfg)
    if arrival_rate <= 0.0:
        return es
    utilization = arrival_rate * es / active_servers
    if utilization >= 1.0:
        return cfg.latency_cap
    return min(es / (1.0 - utilization), cfg.latency_cap)


def compute_throughput(arrival_rate: float, active_servers: int, dimmer: float, cfg: SimConfig) -> float:
    if arrival_rate <= 0.0:
        return 0.0
    return min(arrival_rate, active_servers / mean_service_time(dimmer, cfg))


def reward_user_satisfaction(x: float) -> float:
    """Piecewise satisfaction of the average latency x (seconds)."""
    if x <= 0.02:
        return 0.5
    if x >= 1.0:
        return -0.5 - (x - 1.0) / 20.0
    return 0.5 - (x - 0.02) / 0.98


def reward_revenue(tau: float, arrival_rate: float, dimmer: float, cfg: SimConfig) -> float:
    return tau * arrival_rate * (dimmer * cfg.revenue_optional + (1.0 - dimmer) * cfg.revenue_mandatory)


def reward_costs(tau: float, servers: int, cfg: SimConfig) -> float:
    """Negative running cost; servers counts active plus booting (billed while booting)."""
    return -(tau * cfg.server_cost_rate * servers)


def compose_reward(
    channels: tuple[float, float, float], action: int, legal: bool, cfg: SimConfig
) -> np.ndarray:
    """Weighted channel vector with per-channel action/illegal penalties applied."""
    r_user, r_rev, r_cost = channels
    vec = np.array(
        [cfg.weight_user * r_user, cfg.weight_revenue * r_rev, cfg.weight_cost * r_cost]
    )
    if action != Action.NO_ADAPTATION:
        vec -= cfg.action_penalty
    if not legal:
        vec -= cfg.illegal_penalty
    return vec


@dataclass(frozen=True)
class WorkloadSpec:
    """Synthetic arrival-rate generator: base + sinusoid + spikes + noise."""

    kind: str = "sinusoid"  # "constant" | "sinusoid"
    base_rate: float = 50.0
    amplitude: float = 25.0
    period_steps: int = 2000
    noise_sigma: float = 2.0
    spikes: tuple[tuple[int, int, float], ...] = ()  # (start, duration, extra_rate)
    seed: int | None = None
    length: int = 20_000


def generate_workload(spec: WorkloadSpec) -> np.ndarray:
    if spec.length < 1:
        raise ConfigurationError(f"workload length must be >= 1: {spec.length}")
    if spec.kind not in ("constant", "sinusoid"):
        raise ConfigurationError(f"unknown workload kind: {spec.kind!r}")
    t = np.arange(spec.length, dtype=np.float64)
    rates = np.full(spec.length, spec.base_rate)
    if spec.kind == "sinusoid":
        rates += spec.amplitude * np.sin(2.0 * np.pi * t / spec.period_steps)
    for start, duration, extra in spec.spikes:
        rates[start : start + duration] += extra
    if spec.noise_sigma > 0.0:
        rng = np.random.default_rng(0 if spec.seed is None else spec.seed)
        rates += rng.normal(0.0, spec.noise_sigma, size=spec.length)
    return np.maximum(rates, 0.0)


def load_workload_csv(path: str) -> np.ndarray:
    """One positive decimal arrival rate per line; blank lines ignored."""
    rates = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{line_no}: not a number: {text!r}") from exc
            if value < 0:
                raise ConfigurationError(f"{path}:{line_no}: negative arrival rate: {value}")
            rates.append(value)
    if not rates:
        raise ConfigurationError(f"{path}: empty workload")
    return np.array(rates)


class SwimSim:
    """Step interface over the queueing model; rewards come back as a vector."""

    def __init__(self, cfg: SimConfig, workload: np.ndarray):
        self.cfg = cfg
        self.workload = np.asarray(workload, dtype=np.float64)
        if self.workload.ndim != 1 or self.workload.shape[0] < 1:
            raise ConfigurationError("workload must be a non-empty 1-d trace")
        self.reset()

    def reset(self) -> np.ndarray:
        cfg = self.cfg
        self._consumed = 0
        self._boot_timers: list[int] = []
        lam = float(self.workload[0])
        x = compute_latency(lam, cfg.initial_servers, cfg.initial_dimmer, cfg)
        tp = compute_throughput(lam, cfg.initial_servers, cfg.initial_dimmer, cfg)
        self._state = SimState(
            arrival_rate=lam,
            active_servers=cfg.initial_servers,
            booting_servers=0,
            dimmer=float(cfg.initial_dimmer),
            response_time=x,
            throughput=tp,
            step_index=0,
        )
        return self.observe()

    @property
    def done(self) -> bool:
        return self._consumed >= self.workload.shape[0]

    def state(self) -> SimState:
        return replace(self._state)

    def observe(self) -> np.ndarray:
        """Normalized observation [1/lambda, latency, throughput, servers, dimmer]."""
        cfg = self.cfg
        s = self._state
        interarrival = 1.0 / s.arrival_rate if s.arrival_rate > 0.0 else float("inf")
        return np.array(
            [
                min(1.0, interarrival / cfg.interarrival_norm),
                s.response_time / cfg.latency_cap,
                s.throughput / cfg.throughput_norm,
                s.active_servers / cfg.max_servers,
                s.dimmer,
            ]
        )

    def _apply_action(self, action: Action) -> bool:
        cfg, s = self.cfg, self._state
        if action == Action.NO_ADAPTATION:
            return True
        if action == Action.ADD_SERVER:
            if s.active_servers + s.booting_servers >= cfg.max_servers:
                return False
            if cfg.boot_delay_steps == 0:
                s.active_servers += 1
            else:
                self._boot_timers.append(cfg.boot_delay_steps)
                s.booting_servers += 1
            return True
        if action == Action.REMOVE_SERVER:
            if s.active_servers <= 1:
                return False
            s.active_servers -= 1
            return True
        if action == Action.INCREASE_DIMMER:
            if s.dimmer >= 1.0 - _BOUND_EPS:
                return False
            s.dimmer = min(1.0, s.dimmer + cfg.dimmer_step)
            if s.dimmer > 1.0 - _BOUND_EPS:
                s.dimmer = 1.0
            return True
        if action == Action.DECREASE_DIMMER:
            if s.dimmer <= _BOUND_EPS:
                return False
            s.dimmer = max(0.0, s.dimmer - cfg.dimmer_step)
            if s.dimmer < _BOUND_EPS:
                s.dimmer = 0.0
            return True
        raise ConfigurationError(f"unknown action: {action}")

    def _progress_boots(self) -> None:
        s = self._state
        remaining = []
        for timer in self._boot_timers:
            timer -= 1
            if timer <= 0:
                s.active_servers += 1
                s.booting_servers -= 1
            else:
                remaining.append(timer)
        self._boot_timers = remaining

    def step(self, action: int) -> tuple[np.ndarray, np.ndarray, dict]:
        """Advance one control interval; returns (observation, reward vector, info)."""
        if self.done:
            raise EpisodeEnd("workload trace exhausted")
        act = Action(action)
        cfg, s = self.cfg, self._state

        self._progress_boots()
        legal = self._apply_action(act)

        lam = float(self.workload[self._consumed])
        self._consumed += 1
        x = compute_latency(lam, s.active_servers, s.dimmer, cfg)
        tp = compute_throughput(lam, s.active_servers, s.dimmer, cfg)

        r_user = reward_user_satisfaction(x)
        r_rev = reward_revenue(cfg.tau, lam, s.dimmer, cfg)
        r_cost = reward_costs(cfg.tau, s.active_servers + s.booting_servers, cfg)
        reward = compose_reward((r_user, r_rev, r_cost), act, legal, cfg)

        s.arrival_rate = lam
        s.response_time = x
        s.throughput = tp
        s.step_index = self._consumed

        info = {
            "legal": legal,
            "action": int(act),
            "action_name": ACTION_NAMES[int(act)],
            "raw_rewards": (r_user, r_rev, r_cost),
            "done": self.done,
            "state": self.state(),
        }
        return self.observe(), reward, info
