"""
Exact parameter assignments realizing a given truncated impulse response.

Two constructions are provided:

- ``construct_real_vandermonde``: a real system with distinct nodes on the
  diagonal of A, C = 1 and B solving the Vandermonde system V(a) B = target.
  It always exists for n = t, but its conditioning degrades exponentially in t.
- ``construct_complex_dft``: a complex system whose diagonal holds scaled roots
  of unity; B is read off a DFT of the descaled target, with
  ||B||_2 <= 2 ||target||_2 and ||C||_2 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import logger
from .errors import SolverError, ValidationError
from .ssm import DiagonalSSM, ScalarSeries, approximation_error, impulse_response

# Above this condition number the Vandermonde solve carries no correct digits.
ILL_CONDITIONED = 1.0 / np.finfo(np.float64).eps


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    ssm: DiagonalSSM
    b_norm2: float
    c_norm2: float
    residual_l1: float
    condition: float = math.nan

    @property
    def cb_inf(self) -> float:
        return float(np.max(np.abs(self.ssm.c * self.ssm.b)))

    def to_dict(self) -> dict:
        return {
            "mode": self.ssm.mode.value,
            "dim": self.ssm.dim,
            "b_norm2": self.b_norm2,
            "c_norm2": self.c_norm2,
            "cb_inf": self.cb_inf,
            "residual_l1": self.residual_l1,
            "condition": self.condition,
        }


def _finish(ssm: DiagonalSSM, target: ScalarSeries, condition: float = math.nan) -> ConstructionResult:
    residual = approximation_error(impulse_response(ssm, target.length), target)
    return ConstructionResult(
        ssm=ssm,
        b_norm2=float(np.linalg.norm(ssm.b)),
        c_norm2=float(np.linalg.norm(ssm.c)),
        residual_l1=residual,
        condition=condition,
    )


def default_nodes(n: int) -> np.ndarray:
    """n equispaced nodes in [-0.95, 0.95]."""
    if n < 1:
        raise ValidationError(f"need at least one node, got {n}")
    if n == 1:
        return np.zeros(1)
    return np.linspace(-0.95, 0.95, n)


def vandermonde(nodes: np.ndarray, t: int) -> np.ndarray:
    """V[k, j] = nodes[j] ** k for k < t."""
    return np.vander(np.asarray(nodes, dtype=np.float64), N=t, increasing=True).T


def construct_real_vandermonde(
    target: ScalarSeries, nodes: Optional[Sequence[float]] = None
) -> ConstructionResult:
    t = target.length
    if t < 1:
        raise ValidationError("target must be non-empty")
    a = default_nodes(t) if nodes is None else np.asarray(nodes, dtype=np.float64).reshape(-1)
    if a.shape[0] != t:
        raise ValidationError(f"need exactly {t} nodes for a length-{t} target, got {a.shape[0]}")
    if not np.all(np.isfinite(a)) or np.any(np.abs(a) >= 1):
        raise ValidationError("nodes must lie strictly inside (-1, 1)")
    if np.unique(a).shape[0] != t:
        raise ValidationError("nodes must be pairwise distinct")

    v = vandermonde(a, t)
    condition = float(np.linalg.cond(v))
    try:
        b = np.linalg.solve(v, target.values)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"Vandermonde system of size {t} is singular") from exc
    if not np.all(np.isfinite(b)):
        raise SolverError(f"Vandermonde solve of size {t} produced non-finite entries (cond={condition:.3e})")
    if condition > ILL_CONDITIONED:
        logger.warning("Vandermonde system of size %s is near-singular (cond=%.3e)", t, condition)

    result = _finish(DiagonalSSM.real(a, b, np.ones(t)), target, condition)
    logger.info(
        "real Vandermonde construction: t=%s residual_l1=%.3e cond=%.3e cb_inf=%.3e",
        t, result.residual_l1, condition, result.cb_inf,
    )
    return result


def dft_radius(t: int) -> float:
    """alpha = (1/2)**(1/(t-1)), and 1/2 when t = 1."""
    if t == 1:
        return 0.5
    return 0.5 ** (1.0 / (t - 1))


def _dft(x: np.ndarray) -> np.ndarray:
    """Direct O(t^2) DFT with the positive-exponent kernel exp(2 pi i jk / t)."""
    t = x.shape[0]
    idx = np.arange(t)
    # Reduce jk mod t before scaling so large t keeps exact phases.
    phase = np.outer(idx, idx) % t
    return np.exp(2j * np.pi * phase / t) @ x


def construct_complex_dft(target: ScalarSeries) -> ConstructionResult:
    t = target.length
    if t < 1:
        raise ValidationError("target must be non-empty")
    alpha = dft_radius(t)
    k = np.arange(t)
    descaled = target.values / alpha ** k
    spectrum = _dft(descaled)

    a = alpha * np.exp(2j * np.pi * k / t)
    b = np.conj(spectrum) / math.sqrt(t)
    c = np.full(t, 1.0 / math.sqrt(t), dtype=np.complex128)

    result = _finish(DiagonalSSM.complex(a, b, c), target)
    logger.info(
        "complex DFT construction: t=%s residual_l1=%.3e b_norm2=%.3e target_norm2=%.3e",
        t, result.residual_l1, result.b_norm2, target.l2(),
    )
    return result
