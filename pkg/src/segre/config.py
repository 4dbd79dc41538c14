"""Run configuration shared by the engine and the command-line frontend."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

DEFAULT_SEED = 0x5E62E


@dataclass(frozen=True)
class RankOptions:
    """Knobs of the randomized rank screen and the escalation policy."""

    seed: int = DEFAULT_SEED
    trials: int = 3
    value_bound: int = 1 << 16
    escalation_step: int = 4
    escalations: int = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved defaults: J_max falls back to d + 2, bracket depth and degree
    bound to values derived from the truncation order."""

    kappa: int = 8
    J_max: Optional[int] = None
    bracket_depth: Optional[int] = None
    degree_bound: Optional[int] = None
    seed: int = DEFAULT_SEED
    jobs: int = 1
    escalation_step: int = 4
    escalations: int = 2
    pushforward_samples: int = 20

    def __post_init__(self):
        if self.kappa < 2:
            raise ValueError("kappa must be at least 2")
        if self.J_max is not None and self.J_max < 2:
            raise ValueError("J_max must be at least 2")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")

    def resolve_jmax(self, d: int) -> int:
        return self.J_max if self.J_max is not None else d + 2

    def resolve_depth(self) -> int:
        return self.bracket_depth if self.bracket_depth is not None else self.kappa

    def resolve_degree(self) -> int:
        if self.degree_bound is not None:
            return self.degree_bound
        return min(4, self.kappa // 2)

    def rank_options(self) -> RankOptions:
        return RankOptions(
            seed=self.seed,
            escalation_step=self.escalation_step,
            escalations=self.escalations,
        )

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)
