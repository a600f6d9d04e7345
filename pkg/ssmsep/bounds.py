"""
Forward differences and lower bounds on the parameter magnitude of real SSMs.

A real diagonal SSM that eps-approximates a target up to time t satisfies

    n ||C^T (.) B||_inf >= 2^(d + 2 min(d, m)) * (2^-d |(phi|_sigma)^(d)_m| - eps)

for every d, m >= 1 with d + m <= floor(t/2) and sigma in {odd, even}, where
phi|_sigma is the target restricted to odd or even (1-indexed) positions and
(.)^(d)_m is the d-th forward difference at 0-based index m, i.e. the entry
that starts at element m + 1 of the restricted series. ``lower_bound_general``
searches that grid; the closed forms for the copy, random and oscillatory
targets are provided alongside.

Forward differences are evaluated exactly: every float in a series is an
integer multiple of a common power of two, so the alternating binomial sums
are carried out over Python integers and rounded once at the end.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import logger
from .errors import ValidationError
from .ssm import DiagonalSSM, ScalarSeries, impulse_response, is_stable

CLOSED_FORM_MAX_ORDER = 64
DEADBAND = 1e-12


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


def _as_integers(values: Sequence[float]) -> Tuple[List[int], int]:
    """Write each value as k_i / 2**shift with integer k_i."""
    ratios = [float(v).as_integer_ratio() for v in values]
    shift = max((den.bit_length() - 1 for _, den in ratios), default=0)
    ints = [num << (shift - (den.bit_length() - 1)) for num, den in ratios]
    return ints, shift


def _to_float(k: int, scale: int) -> float:
    try:
        # int / int is correctly rounded in Python.
        return k / scale
    except OverflowError:
        return math.inf if k > 0 else -math.inf


def _to_floats(ints: Sequence[int], shift: int) -> List[float]:
    scale = 1 << shift
    return [_to_float(k, scale) for k in ints]


def _closed_form(ints: Sequence[int], order: int) -> List[int]:
    coefs = [(-1) ** (order - j) * math.comb(order, j) for j in range(order + 1)]
    return [
        sum(coef * ints[m + j] for j, coef in enumerate(coefs))
        for m in range(len(ints) - order)
    ]


def _iterated(ints: Sequence[int], order: int) -> List[int]:
    cur = list(ints)
    for _ in range(order):
        cur = [cur[i + 1] - cur[i] for i in range(len(cur) - 1)]
    return cur


def forward_difference(series: ScalarSeries, order: int) -> ScalarSeries:
    """
    d-th forward difference, entry m = sum_j (-1)^(d-j) binom(d, j) S_(m+j).

    Uses exact integer binomials up to order 64 and exact iterated differencing
    beyond; both are carried out on the exact integer image of the series.
    """
    if order < 1:
        raise ValidationError(f"difference order must be >= 1, got {order}")
    if order >= series.length:
        raise ValidationError(
            f"difference order {order} needs a series longer than {order}, got length {series.length}"
        )
    ints, shift = _as_integers(series.values)
    if order <= CLOSED_FORM_MAX_ORDER:
        diffs = _closed_form(ints, order)
    else:
        diffs = _iterated(ints, order)
    return ScalarSeries(_to_floats(diffs, shift))


def difference_table(series: ScalarSeries) -> Dict[int, List[float]]:
    """All forward differences of orders 1..len-1, keyed by order (exact)."""
    ints, shift = _as_integers(series.values)
    table: Dict[int, List[float]] = {}
    cur = ints
    for order in range(1, series.length):
        cur = [cur[i + 1] - cur[i] for i in range(len(cur) - 1)]
        table[order] = _to_floats(cur, shift)
    return table


def restrict_parity(series: ScalarSeries, parity: Parity) -> ScalarSeries:
    """Odd keeps entries 1, 3, 5, ...; Even keeps 2, 4, 6, ... (1-indexed)."""
    parity = Parity(parity)
    start = 0 if parity is Parity.ODD else 1
    return ScalarSeries(series.values[start::2])


@dataclass(frozen=True, eq=False)
class BoundQuery:
    target: ScalarSeries
    epsilon: float
    horizon: Optional[int] = None

    def __post_init__(self) -> None:
        horizon = self.target.length if self.horizon is None else self.horizon
        if horizon != self.target.length:
            raise ValidationError(f"horizon {horizon} does not match target length {self.target.length}")
        if horizon < 2:
            raise ValidationError(f"horizon must be >= 2, got {horizon}")
        if not self.epsilon >= 0:
            raise ValidationError(f"epsilon must be nonnegative, got {self.epsilon}")
        object.__setattr__(self, "horizon", horizon)


@dataclass(frozen=True)
class BoundReport:
    bound: float
    best_d: int
    best_m: int
    best_parity: Parity
    witness_difference: float
    saturated: bool = False

    @property
    def vacuous(self) -> bool:
        return self.bound <= 0

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "best_d": self.best_d,
            "best_m": self.best_m,
            "best_parity": self.best_parity.value,
            "witness_difference": self.witness_difference,
            "saturated": self.saturated,
            "vacuous": self.vacuous,
        }


def _bound_value(d: int, m: int, difference: float, epsilon: float) -> Tuple[float, bool]:
    if math.isinf(difference):
        return math.inf, True
    inner = math.ldexp(difference, -d) - epsilon
    try:
        return math.ldexp(inner, d + 2 * min(d, m)), False
    except OverflowError:
        return math.copysign(math.inf, inner), True


def lower_bound_general(query: BoundQuery) -> BoundReport:
    """
    Exhaustive search of the (d, m, parity) grid. Ties go to the smallest d,
    then the smallest m, then Odd. Vacuous (<= 0) bounds are returned as-is.
    """
    t = query.horizon
    if t < 5:
        raise ValidationError(f"the lower-bound search needs horizon >= 5, got {t}")
    half = t // 2
    tables = {
        parity: difference_table(restrict_parity(query.target, parity))
        for parity in (Parity.ODD, Parity.EVEN)
    }

    best: Optional[BoundReport] = None
    saturated = False
    for d in range(1, half):
        for m in range(1, half - d + 1):
            for parity in (Parity.ODD, Parity.EVEN):
                diffs = tables[parity].get(d)
                if diffs is None or m >= len(diffs):
                    continue
                witness = abs(diffs[m])
                value, overflowed = _bound_value(d, m, witness, query.epsilon)
                saturated = saturated or overflowed
                if best is None or value > best.bound:
                    best = BoundReport(value, d, m, parity, witness)

    report = BoundReport(
        best.bound, best.best_d, best.best_m, best.best_parity, best.witness_difference, saturated
    )
    if saturated:
        logger.warning("lower-bound search overflowed float range at t=%s; bound saturates to inf", t)
    logger.info(
        "lower bound t=%s eps=%.3e: %.6e at d=%s m=%s parity=%s",
        t, query.epsilon, report.bound, report.best_d, report.best_m, report.best_parity.value,
    )
    return report


def copy_epsilon_threshold(t: int) -> float:
    return 1.0 / (8.0 * math.sqrt(t))


def lower_bound_copy(t: int, epsilon: float) -> Optional[float]:
    """2^(t/2) / (32 sqrt t) for the copy target; None when epsilon > 1/(8 sqrt t)."""
    if t < 9:
        raise ValidationError(f"the copy bound needs t >= 9, got {t}")
    if epsilon > copy_epsilon_threshold(t):
        return None
    return 2.0 ** (t / 2) / (32.0 * math.sqrt(t))


def lower_bound_random(t: int, alpha: float, p: float) -> float:
    """2^(t/2) alpha sqrt(p) / (8 sqrt t), holding with probability >= 1 - p."""
    if t < 8:
        raise ValidationError(f"the random-target bound needs t >= 8, got {t}")
    if alpha < 0:
        raise ValidationError(f"alpha must be nonnegative, got {alpha}")
    if not 0 < p <= 1:
        raise ValidationError(f"p must lie in (0, 1], got {p}")
    return 2.0 ** (t / 2) * alpha * math.sqrt(p) / (8.0 * math.sqrt(t))


def lower_bound_oscillatory(t: int) -> float:
    """2^(3t/4 - 4), valid for epsilon <= 0.5."""
    if t < 1:
        raise ValidationError(f"t must be positive, got {t}")
    return 2.0 ** (3 * t / 4 - 4)


def count_alternations(series: ScalarSeries, threshold: float) -> int:
    """
    Number of moves between the bands >= +threshold and <= -threshold,
    scanning left to right; entries strictly between the bands are skipped.
    """
    if not threshold > 0:
        raise ValidationError(f"threshold must be positive, got {threshold}")
    count = 0
    state = 0
    for v in series:
        if v >= threshold:
            band = 1
        elif v <= -threshold:
            band = -1
        else:
            continue
        if state and band != state:
            count += 1
        state = band
    return count


def sign_changes(series: ScalarSeries, deadband: float = DEADBAND) -> int:
    """Sign flips between consecutive entries whose magnitude exceeds ``deadband``."""
    if not deadband > 0:
        raise ValidationError(f"deadband must be positive, got {deadband}")
    count = 0
    prev = 0
    for v in series:
        if abs(v) <= deadband:
            continue
        sign = 1 if v > 0 else -1
        if prev and sign != prev:
            count += 1
        prev = sign
    return count


def alternating_witness(t: int, epsilon: float) -> DiagonalSSM:
    """
    n = 1 real system with a = min(0, -1 + eps/t^2) and b = c = 1; it
    eps-approximates the alternating target (+1, -1, +1, ...) up to time t.
    """
    if t < 1 or not epsilon > 0:
        raise ValidationError("alternating witness needs t >= 1 and epsilon > 0")
    a = min(0.0, -1.0 + epsilon / t ** 2)
    return DiagonalSSM.real([a], [1.0], [1.0])


def random_real_stable(rng: np.random.Generator, n: int) -> DiagonalSSM:
    """Real stable system with a ~ U(-1, 1) and b, c ~ N(0, 1)."""
    a = rng.uniform(-1.0, 1.0, size=n)
    a = np.clip(a, -1.0 + 1e-12, 1.0 - 1e-12)
    return DiagonalSSM.real(a, rng.standard_normal(n), rng.standard_normal(n))


def oscillation_separation(
    complex_ssm: DiagonalSSM,
    t: int,
    threshold: float,
    real_dim: int,
    seeds: Sequence[int],
    deadband: float = DEADBAND,
) -> dict:
    """
    Alternations of ``complex_ssm`` on odd impulse-response entries versus the
    largest number of sign changes over a seeded corpus of real stable systems.
    """
    odd = restrict_parity(impulse_response(complex_ssm, t), Parity.ODD)
    alternations = count_alternations(odd, threshold)

    worst = 0
    for seed in seeds:
        ssm = random_real_stable(np.random.default_rng(seed), real_dim)
        assert is_stable(ssm)
        changes = sign_changes(restrict_parity(impulse_response(ssm, t), Parity.ODD), deadband)
        worst = max(worst, changes)

    logger.info(
        "oscillation separation t=%s: complex alternations=%s, real max sign changes=%s (ceiling %s)",
        t, alternations, worst, real_dim - 1,
    )
    return {
        "t": t,
        "threshold": threshold,
        "complex_alternations": alternations,
        "real_dim": real_dim,
        "real_corpus_size": len(seeds),
        "real_max_sign_changes": worst,
        "real_ceiling": real_dim - 1,
    }
