"""
Diagonal state space models: representation, impulse response and simulation.

A diagonal SSM of dimension n maps an input series u to an output series y via

    x(t) = A x(t-1) + B u(t),    y(t) = Re(C x(t)),    x(0) = 0

with A diagonal. Real and complex systems share every code path: parameters are
always held as complex128 arrays and a Real system asserts zero imaginary parts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from .errors import ValidationError


class Mode(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1)
    arr.setflags(write=False)
    return arr


class ScalarSeries:
    """
    Finite series of real scalars (impulse responses, inputs, outputs, targets).

    Values are stored in a read-only float64 array and must be finite.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float]):
        if isinstance(values, ScalarSeries):
            arr = values.values
        else:
            arr = np.asarray(values)
            if np.iscomplexobj(arr):
                raise ValidationError("ScalarSeries holds real values only")
            arr = _frozen(arr, np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("ScalarSeries values must be finite (no NaN/Inf)")
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def length(self) -> int:
        return int(self._values.shape[0])

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[float]:
        return iter(self._values.tolist())

    def __getitem__(self, idx):
        return self._values[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"ScalarSeries({self._values.tolist()!r})"

    def to_list(self) -> list:
        return self._values.tolist()

    def l1(self) -> float:
        return float(np.sum(np.abs(self._values)))

    def l2(self) -> float:
        return float(np.linalg.norm(self._values))

    def scaled(self, factor: float) -> "ScalarSeries":
        return ScalarSeries(self._values * factor)

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        if other.length != self.length:
            raise ValidationError(f"length mismatch: {self.length} vs {other.length}")
        return ScalarSeries(self._values + other._values)

    def __sub__(self, other: "ScalarSeries") -> "ScalarSeries":
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        if other.length != self.length:
            raise ValidationError(f"length mismatch: {self.length} vs {other.length}")
        return ScalarSeries(self._values - other._values)


@dataclass(frozen=True, eq=False)
class DiagonalSSM:
    """
    Parameters (A, B, C) of a diagonal SSM over the reals or the complex numbers.

    ``a`` is the diagonal of A, ``b`` the input matrix and ``c`` the output row,
    each a length-``dim`` complex128 array. Stability is a derived property
    (see ``is_stable``) and is not enforced here.
    """

    mode: Mode
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        mode = Mode(self.mode)
        a = _frozen(self.a, np.complex128)
        b = _frozen(self.b, np.complex128)
        c = _frozen(self.c, np.complex128)
        if a.shape[0] == 0:
            raise ValidationError("DiagonalSSM needs dim >= 1")
        if not (a.shape == b.shape == c.shape):
            raise ValidationError(
                f"a, b, c must have equal length, got {a.shape[0]}, {b.shape[0]}, {c.shape[0]}"
            )
        if mode is Mode.REAL and (np.any(a.imag != 0) or np.any(b.imag != 0) or np.any(c.imag != 0)):
            raise ValidationError("Real mode parameters must have zero imaginary part")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def real(cls, a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> "DiagonalSSM":
        return cls(Mode.REAL, a, b, c)

    @classmethod
    def complex(cls, a: Sequence[complex], b: Sequence[complex], c: Sequence[complex]) -> "DiagonalSSM":
        return cls(Mode.COMPLEX, a, b, c)

    @classmethod
    def zeros(cls, mode: Mode, dim: int) -> "DiagonalSSM":
        z = np.zeros(dim)
        return cls(mode, z, z, z)

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    @property
    def is_real(self) -> bool:
        return self.mode is Mode.REAL

    def replace(self, a=None, b=None, c=None) -> "DiagonalSSM":
        return DiagonalSSM(
            self.mode,
            self.a if a is None else a,
            self.b if b is None else b,
            self.c if c is None else c,
        )

    def to_dict(self) -> dict:
        def enc(arr):
            if self.is_real:
                return arr.real.tolist()
            return [[z.real, z.imag] for z in arr.tolist()]

        return {"mode": self.mode.value, "dim": self.dim, "a": enc(self.a), "b": enc(self.b), "c": enc(self.c)}


@dataclass(frozen=True, eq=False)
class StateTrace:
    """States x(0), x(1), ..., x(T) of a simulation; row 0 is the zero vector."""

    states: np.ndarray
    mode: Mode

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=np.complex128)
        if states.ndim != 2:
            raise ValidationError("StateTrace.states must be a (T+1, n) array")
        if np.any(states[0] != 0):
            raise ValidationError("StateTrace must start from the zero state")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return int(self.states.shape[0])


def _check_finite(ssm: DiagonalSSM) -> None:
    for name in ("a", "b", "c"):
        if not np.all(np.isfinite(getattr(ssm, name))):
            raise ValidationError(f"non-finite entries in {name}")


def powers(a: np.ndarray, t: int) -> np.ndarray:
    """(n, t) matrix whose column k holds a**k, built by running products."""
    a = np.asarray(a, dtype=np.complex128)
    out = np.ones((a.shape[0], t), dtype=np.complex128)
    if t > 1:
        out[:, 1:] = np.cumprod(np.broadcast_to(a[:, None], (a.shape[0], t - 1)), axis=1)
    return out


def impulse_response(ssm: DiagonalSSM, t: int) -> ScalarSeries:
    """
    First ``t`` entries of the impulse response: entry k (1-indexed) is
    Re(sum_j c_j * a_j**(k-1) * b_j).
    """
    if t < 1:
        raise ValidationError(f"impulse response length must be >= 1, got {t}")
    _check_finite(ssm)
    weights = ssm.c * ssm.b
    return ScalarSeries(np.real(weights @ powers(ssm.a, t)))


def impulse(t: int) -> ScalarSeries:
    if t < 1:
        raise ValidationError(f"impulse length must be >= 1, got {t}")
    values = np.zeros(t)
    values[0] = 1.0
    return ScalarSeries(values)


def convolve(series: ScalarSeries, kernel: ScalarSeries) -> ScalarSeries:
    """Causal convolution of ``series`` with ``kernel``, truncated to len(series)."""
    n = series.length
    k = kernel.values[:n]
    # np.convolve sums directly, no transform.
    return ScalarSeries(np.convolve(series.values, k)[:n])


def delay_series(series: ScalarSeries, k: int) -> ScalarSeries:
    """delta_k on a finite series: prepend k zeros and keep the original length."""
    if k < 0:
        raise ValidationError(f"delay must be nonnegative, got {k}")
    n = series.length
    out = np.zeros(n)
    if k < n:
        out[k:] = series.values[: n - k]
    return ScalarSeries(out)


def apply(ssm: DiagonalSSM, input: ScalarSeries) -> Tuple[ScalarSeries, StateTrace]:
    """
    Run the system on ``input`` from the zero state.

    The output is the direct convolution of the input with the truncated impulse
    response; the trace comes from the state recursion.
    """
    if input.length < 1:
        raise ValidationError("apply needs a non-empty input")
    _check_finite(ssm)
    n_steps = input.length
    states = np.zeros((n_steps + 1, ssm.dim), dtype=np.complex128)
    for step, u in enumerate(input.values, start=1):
        states[step] = ssm.a * states[step - 1] + ssm.b * u
    output = convolve(input, impulse_response(ssm, n_steps))
    return output, StateTrace(states, ssm.mode)


def readout(ssm: DiagonalSSM, trace: StateTrace) -> ScalarSeries:
    """y(t) = Re(C x(t)) for every recorded state after x(0)."""
    return ScalarSeries(np.real(trace.states[1:] @ ssm.c))


def is_stable(ssm: DiagonalSSM) -> bool:
    return bool(np.max(np.abs(ssm.a)) < 1.0)


def cb_inf_norm(ssm: DiagonalSSM) -> float:
    """||C^T (.) B||_inf, the magnitude every real lower bound speaks about."""
    return float(np.max(np.abs(ssm.c * ssm.b)))


def approximation_error(candidate: ScalarSeries, target: ScalarSeries) -> float:
    """l1 distance between two series of equal length."""
    if candidate.length != target.length:
        raise ValidationError(
            f"approximation_error needs equal lengths, got {candidate.length} and {target.length}"
        )
    return float(np.sum(np.abs(candidate.values - target.values)))


def bilinear_discretize(
    a_cont: Sequence[complex],
    b_cont: Sequence[complex],
    c_cont: Sequence[complex],
    delta: float,
) -> DiagonalSSM:
    """
    Bilinear (Tustin) discretization of a continuous diagonal system:
    a' = (1 + delta/2 a) / (1 - delta/2 a), b' = delta b / (1 - delta/2 a), c' = c.
    """
    if not delta > 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    a = np.asarray(a_cont, dtype=np.complex128).reshape(-1)
    b = np.asarray(b_cont, dtype=np.complex128).reshape(-1)
    c = np.asarray(c_cont, dtype=np.complex128).reshape(-1)
    if np.any(a.real >= 0):
        raise ValidationError("continuous poles must have negative real part")
    denom = 1.0 - 0.5 * delta * a
    a_bar = (1.0 + 0.5 * delta * a) / denom
    b_bar = delta * b / denom
    real = not (np.any(a.imag) or np.any(b.imag) or np.any(c.imag))
    if real:
        return DiagonalSSM.real(a_bar.real, b_bar.real, c.real)
    return DiagonalSSM.complex(a_bar, b_bar, c)
