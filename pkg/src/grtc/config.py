"""Run configuration: one JSON object describing policy, strategies,
weights, seed, schedule and the initial pool.

    {"d": 2, "max_multiplier": 2,
     "choose": "balanced",
     "find": {"order": "pred-first", "horizon": "unlimited"},
     "weights": {"alpha": 1.0, "beta": 0.25, "gamma": 0.5},
     "seed": 42,
     "schedule": {"interval": 1.0, "count": 100},   # or {"times": [...]}
     "initial": {"workers": 8}}                     # or explicit groups

The environment variable GRTC_SEED overrides the config seed.
"""

from __future__ import annotations

import json
import os

from .errors import ConfigError, InvalidState
from .generator import TaskSchedule, build_initial_state
from .metrics import StressWeights
from .operators import OperatorPolicy
from .state import RotationState, build_state
from .strategies import CHOOSE_KINDS, FIND_ORDERS, StrategySet


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: {e.msg}") from None


def parse_horizon(value) -> int | None:
    if value in (None, "unlimited"):
        return None
    if isinstance(value, int) and value >= 1:
        return value
    raise ConfigError(f"horizon must be a positive integer or 'unlimited', got {value!r}")


def effective_seed(config: dict):
    env = os.environ.get("GRTC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            return env
    return config.get("seed", 0)


class RunSetup:
    """Everything needed to execute one run, parsed and validated."""

    def __init__(self, config: dict):
        self.config = config
        try:
            self.policy = OperatorPolicy(
                d=int(config.get("d", 2)),
                max_multiplier=int(config.get("max_multiplier", 2)),
                find_horizon=parse_horizon(config.get("find", {}).get("horizon")),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None

        choose = config.get("choose", "balanced")
        if choose not in CHOOSE_KINDS:
            raise ConfigError(f"unknown choose strategy {choose!r}; "
                              f"expected one of {CHOOSE_KINDS}")
        order = config.get("find", {}).get("order", "pred-first")
        if order not in FIND_ORDERS:
            raise ConfigError(f"unknown find order {order!r}; "
                              f"expected one of {FIND_ORDERS}")
        self.seed = effective_seed(config)
        self.strategies = StrategySet.seeded(choose, order, self.seed)

        w = config.get("weights", {})
        try:
            self.weights = StressWeights(
                alpha=float(w.get("alpha", 1.0)),
                beta=float(w.get("beta", 0.25)),
                gamma=float(w.get("gamma", 0.5)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None

        self.schedule = parse_schedule(config.get("schedule"))

    def echo(self) -> dict:
        """Config as recorded in run records (with the effective seed)."""
        out = dict(self.config)
        out["d"] = self.policy.d
        out["max_multiplier"] = self.policy.max_multiplier
        out["choose"] = self.strategies.choose
        out["find"] = {
            "order": self.strategies.find_order,
            "horizon": ("unlimited" if self.policy.find_horizon is None
                        else self.policy.find_horizon),
        }
        out["weights"] = {"alpha": self.weights.alpha, "beta": self.weights.beta,
                          "gamma": self.weights.gamma}
        out["seed"] = self.seed
        return out

    def initial_state(self, roster: list[str] | None = None) -> RotationState:
        """Build the starting state from an explicit roster (e.g. a trace
        header) or from the config's "initial" section."""
        spec = self.config.get("initial", {})
        if "groups" in spec:
            groups = [(g, list(ws)) for g, ws in spec["groups"]]
            if "current" not in spec:
                raise ConfigError("explicit initial groups need a 'current' field")
            built = build_state(groups, current=spec["current"])
            if not isinstance(built, RotationState):
                raise InvalidState(built)
            if roster is not None and built.tokens() != set(roster):
                raise ConfigError(
                    "explicit initial groups do not match the trace roster")
            return built
        if roster is None:
            count = spec.get("workers")
            if not isinstance(count, int) or count < 2:
                raise ConfigError(
                    "config needs initial.workers >= 2 (or an explicit trace)")
            roster = [f"w{i + 1}" for i in range(count)]
        return build_initial_state(roster, self.policy)


def parse_schedule(spec) -> TaskSchedule:
    if not isinstance(spec, dict):
        raise ConfigError("config needs a 'schedule' object")
    try:
        if "times" in spec:
            return TaskSchedule.explicit(spec["times"])
        start = float(spec["start"]) if "start" in spec else None
        return TaskSchedule.periodic(float(spec["interval"]), int(spec["count"]),
                                     start=start)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad schedule: {e}") from None
