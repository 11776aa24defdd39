"""Run configuration shared by the command line and the experiment scripts."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class RunConfig:
    """Caps and sampling for one run. Same config and seed, same output."""

    seed: int = 0
    exhaustive_cap: int = 2
    random_cap: int = 3
    vietoris_cap: int = 10
    samples: int = 500
    relations: int = 200
    format: str = "text"

    def __post_init__(self):
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")
        for name in ("exhaustive_cap", "random_cap", "vietoris_cap", "samples", "relations"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.format not in ("text", "json"):
            raise ValidationError(f"format must be text or json, not {self.format!r}")

    def verify_config(self):
        from .duality import VerifyConfig

        return VerifyConfig(self.exhaustive_cap, self.random_cap, self.samples, self.relations)
