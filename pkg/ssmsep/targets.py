"""
Target LTI mappings, represented by their truncated impulse responses.

Random targets are drawn with numpy's PCG64 generator (``default_rng(seed)``),
so the same seed yields the same series on every platform.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .config import logger
from .errors import ValidationError
from .ssm import ScalarSeries


class TargetKind(str, enum.Enum):
    DELAY = "delay"
    RANDOM_UNIFORM = "random_uniform"
    OSCILLATORY = "oscillatory"
    ALTERNATING = "alternating"
    CUSTOM = "custom"


TARGET_KEYS = frozenset({"kind", "horizon", "k", "alpha", "seed", "values"})


def copy_delay(horizon: int) -> int:
    """Default copy-task delay floor((t-1)/2)."""
    return (horizon - 1) // 2


@dataclass(frozen=True)
class TargetSpec:
    kind: TargetKind
    horizon: int
    k: Optional[int] = None
    alpha: float = 1.0
    seed: int = 0
    values: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TargetKind(self.kind))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.kind is TargetKind.DELAY:
            k = copy_delay(self.horizon) if self.k is None else self.k
            if k < 0:
                raise ValidationError(f"delay k must be nonnegative, got {k}")
            object.__setattr__(self, "k", int(k))
        if self.kind is TargetKind.RANDOM_UNIFORM and not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.kind is TargetKind.CUSTOM and self.horizon != len(self.values):
            raise ValidationError(
                f"custom target has {len(self.values)} values but horizon {self.horizon}"
            )

    @classmethod
    def delay(cls, k: int, horizon: int) -> "TargetSpec":
        return cls(TargetKind.DELAY, horizon, k=k)

    @classmethod
    def copy(cls, horizon: int) -> "TargetSpec":
        return cls(TargetKind.DELAY, horizon, k=copy_delay(horizon))

    @classmethod
    def random_uniform(cls, alpha: float, seed: int, horizon: int) -> "TargetSpec":
        return cls(TargetKind.RANDOM_UNIFORM, horizon, alpha=alpha, seed=seed)

    @classmethod
    def oscillatory(cls, horizon: int) -> "TargetSpec":
        return cls(TargetKind.OSCILLATORY, horizon)

    @classmethod
    def alternating(cls, horizon: int) -> "TargetSpec":
        return cls(TargetKind.ALTERNATING, horizon)

    @classmethod
    def custom(cls, values) -> "TargetSpec":
        values = tuple(float(v) for v in values)
        return cls(TargetKind.CUSTOM, len(values), values=values)

    @property
    def flagged(self) -> bool:
        """A delay at or past the horizon truncates to all zeros."""
        return self.kind is TargetKind.DELAY and self.k >= self.horizon

    def with_seed(self, seed: int) -> "TargetSpec":
        if self.kind is not TargetKind.RANDOM_UNIFORM:
            return self
        return TargetSpec(self.kind, self.horizon, alpha=self.alpha, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind.value, "horizon": self.horizon}
        if self.kind is TargetKind.DELAY:
            out["k"] = self.k
        elif self.kind is TargetKind.RANDOM_UNIFORM:
            out["alpha"] = self.alpha
            out["seed"] = self.seed
        elif self.kind is TargetKind.CUSTOM:
            out["values"] = list(self.values)
        return out

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "TargetSpec":
        unknown = set(raw) - TARGET_KEYS
        if unknown:
            raise ValidationError(f"unknown target keys: {sorted(unknown)}")
        try:
            kind = TargetKind(raw["kind"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"target needs a valid 'kind', got {raw.get('kind')!r}") from exc
        if kind is TargetKind.CUSTOM:
            return cls.custom(raw.get("values", []))
        if "horizon" not in raw:
            raise ValidationError("target needs 'horizon'")
        return cls(
            kind,
            int(raw["horizon"]),
            k=raw.get("k"),
            alpha=float(raw.get("alpha", 1.0)),
            seed=int(raw.get("seed", 0)),
        )

    def label(self) -> str:
        if self.kind is TargetKind.DELAY:
            return f"delay{self.k}"
        return self.kind.value


def generate(spec: TargetSpec) -> ScalarSeries:
    """Truncated impulse response of the target mapping."""
    t = spec.horizon
    if t < 1:
        raise ValidationError(f"target horizon must be >= 1, got {t}")

    if spec.kind is TargetKind.DELAY:
        if spec.flagged:
            logger.warning("delay k=%s >= horizon %s: target is all zeros", spec.k, t)
        values = np.zeros(t)
        if spec.k < t:
            values[spec.k] = 1.0
    elif spec.kind is TargetKind.RANDOM_UNIFORM:
        rng = np.random.default_rng(spec.seed)
        values = rng.uniform(-spec.alpha, spec.alpha, size=t)
    elif spec.kind is TargetKind.OSCILLATORY:
        values = np.resize(np.array([1.0, 0.0, -1.0, 0.0]), t)
    elif spec.kind is TargetKind.ALTERNATING:
        values = np.resize(np.array([1.0, -1.0]), t)
    else:
        values = np.array(spec.values, dtype=np.float64)
    return ScalarSeries(values)


def normalized_error(candidate: ScalarSeries, spec_target: ScalarSeries) -> float:
    """||candidate - target||_1 / ||target||_1; the zero mapping scores exactly 1."""
    if candidate.length != spec_target.length:
        raise ValidationError(
            f"normalized_error needs equal lengths, got {candidate.length} and {spec_target.length}"
        )
    denom = spec_target.l1()
    if denom == 0:
        raise ValidationError("normalized_error is undefined for an all-zero target")
    return float(np.sum(np.abs(candidate.values - spec_target.values)) / denom)
