"""Hyperparameter bundle shared by the three agents; each uses its own subset."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from ..errors import ValidationError


@dataclass
class AgentConfig:
    lr: float = 5e-4
    gamma: float = 0.99
    batch_size: int = 128
    entropy_coef: float = 0.03
    hidden_dim: int = 64
    buffer_capacity: int = 100_000
    # dqn
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_fraction: float = 0.5          # fraction of the episode budget spent annealing
    exploration_horizon: int | None = None  # episodes; filled from the run budget when None
    target_update_every: int = 100
    # ppo
    clip_ratio: float = 0.2
    gae_lambda: float = 0.95
    ppo_epochs: int = 4
    update_every_episodes: int = 2
    # sac
    tau: float = 0.005
    sac_entropy_coef: float = 0.2
    log_std_min: float = -20.0
    log_std_max: float = 2.0

    def __post_init__(self):
        positive = ["lr", "gamma", "batch_size", "hidden_dim", "buffer_capacity",
                    "target_update_every", "clip_ratio", "ppo_epochs",
                    "update_every_episodes", "tau"]
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValidationError(f"agent config field {name} must be positive")
        if not 0.0 < self.gamma <= 1.0:
            raise ValidationError("gamma must be in (0, 1]")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known - {"algo"}
        if unknown:
            raise ValidationError(f"unknown agent config fields: {sorted(unknown)}")
        return cls(**{k: v for k, v in d.items() if k in known})
