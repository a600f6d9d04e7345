"""
First-order optimizers over a flat float64 parameter vector.

Adam, AdamW and RAdam follow their usual published update rules with
beta1 = 0.9, beta2 = 0.999 and eps = 1e-8. Weight decay is an L2 term added to
the gradient for Adam and RAdam, and decoupled for AdamW. GD is plain gradient
descent, needed for the parameter-growth experiment.
"""

from __future__ import annotations

import enum
import math
from typing import Tuple

import numpy as np

from .errors import ValidationError


class OptimizerKind(str, enum.Enum):
    ADAM = "adam"
    ADAMW = "adamw"
    RADAM = "radam"
    GD = "gd"


class Schedule(str, enum.Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


def scheduled_lr(base_lr: float, schedule: Schedule, step: int, total_steps: int) -> float:
    """Learning rate for the 0-based ``step``; cosine decays from base_lr to 0."""
    if Schedule(schedule) is Schedule.CONSTANT:
        return base_lr
    return 0.5 * base_lr * (1.0 + math.cos(math.pi * step / total_steps))


class GD:
    def __init__(self, size: int, weight_decay: float = 0.0):
        self.size = size
        self.weight_decay = weight_decay
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        self.t += 1
        if self.weight_decay:
            grad = grad + self.weight_decay * params
        return params - lr * grad


class Adam:
    def __init__(
        self,
        size: int,
        weight_decay: float = 0.0,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.size = size
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.first_moment = np.zeros(size)
        self.second_moment = np.zeros(size)
        self.t = 0

    def _moments(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        self.t += 1
        self.first_moment = self.beta1 * self.first_moment + (1 - self.beta1) * grad
        self.second_moment = self.beta2 * self.second_moment + (1 - self.beta2) * grad ** 2
        m_hat = self.first_moment / (1 - self.beta1 ** self.t)
        v_hat = self.second_moment / (1 - self.beta2 ** self.t)
        return m_hat, v_hat

    def step(self, params: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        if self.weight_decay:
            grad = grad + self.weight_decay * params
        m_hat, v_hat = self._moments(grad)
        return params - lr * m_hat / (np.sqrt(v_hat) + self.eps)


class AdamW(Adam):
    def step(self, params: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        params = params - lr * self.weight_decay * params
        m_hat, v_hat = self._moments(grad)
        return params - lr * m_hat / (np.sqrt(v_hat) + self.eps)


class RAdam(Adam):
    # Rectify only once the variance estimate is tractable.
    RHO_THRESHOLD = 5.0

    def step(self, params: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        if self.weight_decay:
            grad = grad + self.weight_decay * params
        m_hat, _ = self._moments(grad)
        beta2_t = self.beta2 ** self.t
        rho_inf = 2.0 / (1.0 - self.beta2) - 1.0
        rho_t = rho_inf - 2.0 * self.t * beta2_t / (1.0 - beta2_t)
        if rho_t <= self.RHO_THRESHOLD:
            return params - lr * m_hat
        rect = math.sqrt(
            (rho_t - 4) * (rho_t - 2) * rho_inf / ((rho_inf - 4) * (rho_inf - 2) * rho_t)
        )
        adaptive = math.sqrt(1.0 - beta2_t) / (np.sqrt(self.second_moment) + self.eps)
        return params - lr * rect * m_hat * adaptive


def make_optimizer(kind: OptimizerKind, size: int, weight_decay: float = 0.0):
    kind = OptimizerKind(kind)
    if weight_decay < 0:
        raise ValidationError(f"weight_decay must be nonnegative, got {weight_decay}")
    if kind is OptimizerKind.ADAM:
        return Adam(size, weight_decay)
    if kind is OptimizerKind.ADAMW:
        return AdamW(size, weight_decay)
    if kind is OptimizerKind.RADAM:
        return RAdam(size, weight_decay)
    return GD(size, weight_decay)
