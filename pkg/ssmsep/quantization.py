"""
Robustness to q-quantization: the probability that a system keeps
eps-approximating its target when every entry of (A, B, C) is multiplied by an
independent factor drawn uniformly from [1 - q/2, 1 + q/2].

For a real system the probability is at most 2 eps / (q ||C^T (.) B||_inf).
The quantization model relates q to the number of significand bits only
asymptotically, q = Theta(2^-bits); ``q_from_bits`` takes the constant as 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import logger
from .errors import ValidationError
from .ssm import DiagonalSSM, Mode, ScalarSeries, approximation_error, cb_inf_norm, impulse_response

Z_95 = 1.959963984540054
# Upper bound on perturbed-parameter elements held in memory per block.
BLOCK_ELEMENTS = 2_000_000
MAX_BLOCK = 10_000


@dataclass(frozen=True, eq=False)
class QuantizationSpec:
    q: float
    epsilon: float
    target: ScalarSeries
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.q <= 1:
            raise ValidationError(f"q must lie in [0, 1], got {self.q}")
        if not self.epsilon >= 0:
            raise ValidationError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}")


@dataclass(frozen=True)
class QuantizationReport:
    q: float
    epsilon: float
    samples: int
    successes: int
    empirical_robustness: float
    wilson_halfwidth: float
    theoretical_ceiling: Optional[float]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "epsilon": self.epsilon,
            "samples": self.samples,
            "successes": self.successes,
            "empirical_robustness": self.empirical_robustness,
            "wilson_halfwidth": self.wilson_halfwidth,
            "theoretical_ceiling": self.theoretical_ceiling,
        }


def wilson_interval(successes: int, n: int, z: float = Z_95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    p = successes / n
    z_sq = z * z
    denominator = 1 + z_sq / n
    center = (p + z_sq / (2 * n)) / denominator
    margin = z * math.sqrt((p * (1 - p) + z_sq / (4 * n)) / n) / denominator
    return max(0.0, center - margin), min(1.0, center + margin)


def q_from_bits(bits: int) -> float:
    if bits < 0:
        raise ValidationError(f"bits must be nonnegative, got {bits}")
    return 2.0 ** -bits


def quantization_ceiling(ssm: DiagonalSSM, q: float, epsilon: float) -> float:
    """min(1, 2 eps / (q ||C^T (.) B||_inf))."""
    scale = q * cb_inf_norm(ssm)
    if scale == 0:
        return 1.0
    return min(1.0, 2.0 * epsilon / scale)


def _block_sizes(samples: int, dim: int, t: int) -> List[int]:
    block = max(1, min(MAX_BLOCK, BLOCK_ELEMENTS // max(1, dim * t)))
    sizes = [block] * (samples // block)
    if samples % block:
        sizes.append(samples % block)
    return sizes


def _count_block(ssm: DiagonalSSM, spec: QuantizationSpec, size: int, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    lo, hi = 1.0 - spec.q / 2, 1.0 + spec.q / 2
    shape = (size, ssm.dim)
    a = ssm.a * rng.uniform(lo, hi, size=shape)
    b = ssm.b * rng.uniform(lo, hi, size=shape)
    c = ssm.c * rng.uniform(lo, hi, size=shape)

    t = spec.target.length
    pw = np.ones(shape + (t,), dtype=np.complex128)
    if t > 1:
        pw[..., 1:] = np.cumprod(np.broadcast_to(a[..., None], shape + (t - 1,)), axis=-1)
    ir = np.real(np.einsum("sn,snk->sk", c * b, pw))
    errors = np.sum(np.abs(ir - spec.target.values), axis=1)
    return int(np.count_nonzero(errors <= spec.epsilon))


def _simulate(ssm: DiagonalSSM, spec: QuantizationSpec, workers: int) -> int:
    sizes = _block_sizes(spec.samples, ssm.dim, spec.target.length)
    streams = np.random.SeedSequence(spec.seed).spawn(len(sizes))
    if workers <= 1:
        return sum(_count_block(ssm, spec, size, s) for size, s in zip(sizes, streams))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        counts = pool.map(lambda job: _count_block(ssm, spec, *job), zip(sizes, streams))
        return sum(counts)


def _report(ssm: DiagonalSSM, spec: QuantizationSpec, successes: int, ceiling: Optional[float]) -> QuantizationReport:
    low, high = wilson_interval(successes, spec.samples)
    return QuantizationReport(
        q=spec.q,
        epsilon=spec.epsilon,
        samples=spec.samples,
        successes=successes,
        empirical_robustness=successes / spec.samples,
        wilson_halfwidth=(high - low) / 2,
        theoretical_ceiling=ceiling,
    )


def _check_approximates(ssm: DiagonalSSM, spec: QuantizationSpec) -> None:
    error = approximation_error(impulse_response(ssm, spec.target.length), spec.target)
    if error > spec.epsilon:
        raise ValidationError(
            f"system does not eps-approximate the target unperturbed (error {error:.3e} > eps {spec.epsilon:.3e})"
        )


def estimate_robustness(ssm: DiagonalSSM, spec: QuantizationSpec, workers: int = 1) -> QuantizationReport:
    """Monte-Carlo robustness of a real system, with the analytic ceiling."""
    if ssm.mode is not Mode.REAL:
        raise ValidationError("the quantization ceiling is stated for real systems; use diagnose_robustness")
    _check_approximates(ssm, spec)
    successes = _simulate(ssm, spec, workers)
    report = _report(ssm, spec, successes, quantization_ceiling(ssm, spec.q, spec.epsilon))
    logger.info(
        "quantization q=%s eps=%.3e: robustness=%.5f +- %.5f, ceiling=%.5f",
        spec.q, spec.epsilon, report.empirical_robustness, report.wilson_halfwidth, report.theoretical_ceiling,
    )
    return report


def diagnose_robustness(ssm: DiagonalSSM, spec: QuantizationSpec, workers: int = 1) -> QuantizationReport:
    """Monte-Carlo robustness for any mode; no ceiling is claimed."""
    _check_approximates(ssm, spec)
    successes = _simulate(ssm, spec, workers)
    return _report(ssm, spec, successes, None)


def q_sweep(ssm: DiagonalSSM, spec: QuantizationSpec, qs: Sequence[float], workers: int = 1) -> List[QuantizationReport]:
    run = estimate_robustness if ssm.mode is Mode.REAL else diagnose_robustness
    return [run(ssm, replace(spec, q=q), workers) for q in qs]
