"""Agent registry and pool specifications.

A pool entry is (algo, name, instance_seed, params). `name` is the grouping
key for scores and metrics; parameter variants of one class should use
distinct names so aggregation never mixes different behaviors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .base import Agent, RandomBot
from .external import ExternalPolicy, ExternalPolicyError
from .rules import HolmesBot, SimpleBot, ValueBot
from .smart import SmartBot

ALGORITHMS: dict[str, type[Agent]] = {
    cls.algo: cls for cls in (RandomBot, SimpleBot, ValueBot, HolmesBot, SmartBot, ExternalPolicy)
}


@dataclass(frozen=True)
class AgentSpec:
    algo: str
    name: str = ""
    instance_seed: int = 0
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}; have {sorted(ALGORITHMS)}")
        if not self.name:
            object.__setattr__(self, "name", self.algo)

    @property
    def label(self) -> str:
        """Unique instance label within a pool."""
        return f"{self.name}#{self.instance_seed}"

    @property
    def seeded(self) -> bool:
        return ALGORITHMS[self.algo].seeded

    def build(self) -> Agent:
        return ALGORITHMS[self.algo](instance_seed=self.instance_seed, **dict(self.params))

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "name": self.name,
            "instance_seed": self.instance_seed,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AgentSpec":
        params = data.get("params", {})
        return cls(
            algo=data["algo"],
            name=data.get("name", ""),
            instance_seed=int(data.get("instance_seed", 0)),
            params=tuple(sorted(params.items())),
        )


def make_agent(spec: AgentSpec) -> Agent:
    return spec.build()


# Eight instances over seven behaviors: two random seeds (so intra-algorithm
# cross-play has a defined row), the ladder, a bolder risk threshold, and the
# two hint-tie-break flavors of the conventions bot.
DEFAULT_POOL: tuple[AgentSpec, ...] = (
    AgentSpec("random", instance_seed=11),
    AgentSpec("random", instance_seed=12),
    AgentSpec("simple", instance_seed=1),
    AgentSpec("value", instance_seed=1),
    AgentSpec("holmes", instance_seed=1, params=(("theta", 0.6),)),
    AgentSpec("holmes", name="holmes-bold", instance_seed=1, params=(("theta", 0.45),)),
    AgentSpec("smart", instance_seed=1, params=(("hint_attribute_order", "color"),)),
    AgentSpec(
        "smart", name="smart-rank", instance_seed=1, params=(("hint_attribute_order", "rank"),)
    ),
)

# Algorithms whose policy is a fixed rule system (no training); used by the
# regression layer's cohort filters.
RULE_BASED_ALGOS = frozenset({"random", "simple", "value", "holmes", "smart"})


def load_pool(path: str | Path) -> list[AgentSpec]:
    """Read a pool file: a JSON array of spec objects."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not data:
        raise ValueError(f"pool file {path} must hold a non-empty JSON array")
    specs = [AgentSpec.from_dict(entry) for entry in data]
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate pool labels in {path}")
    return specs


def save_pool(specs: list[AgentSpec] | tuple[AgentSpec, ...], path: str | Path) -> None:
    Path(path).write_text(json.dumps([s.to_dict() for s in specs], indent=2) + "\n")


__all__ = [
    "Agent",
    "AgentSpec",
    "ALGORITHMS",
    "DEFAULT_POOL",
    "RULE_BASED_ALGOS",
    "ExternalPolicy",
    "ExternalPolicyError",
    "HolmesBot",
    "RandomBot",
    "SimpleBot",
    "SmartBot",
    "ValueBot",
    "load_pool",
    "make_agent",
    "save_pool",
]
