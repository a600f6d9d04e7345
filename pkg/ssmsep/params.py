"""
Stable parameterization of diagonal SSMs, the impulse-response loss and its
analytic gradient.

The diagonal of A is never stored directly. Each entry is realized as

    Real:    a_j = sign_j * exp(-exp(nu_j))            (sign_j fixed at init)
    Complex: a_j = exp(-exp(nu_j)) * exp(i theta_j)

so |a_j| < 1 for every finite nu_j. B and C are trained as raw values; in
Complex mode their real and imaginary parts are independent real coordinates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ValidationError
from .ssm import DiagonalSSM, Mode, ScalarSeries, powers

# exp(-exp(nu)) rounds to exactly 1.0 below nu ~ -36.7; clamp well above that.
NU_FLOOR = -27.0
MIN_MAGNITUDE = 1e-6
MAX_MAGNITUDE = 1.0 - 1e-6


class Init(str, enum.Enum):
    UNIFORM_FULL = "uniform_full"
    UNIFORM_RING = "uniform_ring"


def _readonly(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class StableParams:
    mode: Mode
    nu: np.ndarray
    theta: np.ndarray
    sign: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        for name, dtype in (("nu", np.float64), ("theta", np.float64), ("sign", np.float64),
                            ("b", np.complex128), ("c", np.complex128)):
            object.__setattr__(self, name, _readonly(getattr(self, name), dtype))
        n = self.nu.shape[0]
        if any(getattr(self, name).shape[0] != n for name in ("theta", "sign", "b", "c")):
            raise ValidationError("all StableParams fields must have length dim")
        if self.mode is Mode.REAL:
            if np.any(self.theta != 0) or np.any(self.b.imag != 0) or np.any(self.c.imag != 0):
                raise ValidationError("Real mode StableParams carry no phases or imaginary parts")
            if not np.all(np.abs(self.sign) == 1):
                raise ValidationError("Real mode signs must be +1 or -1")

    @property
    def dim(self) -> int:
        return int(self.nu.shape[0])

    def magnitude(self) -> np.ndarray:
        return np.exp(-np.exp(np.maximum(self.nu, NU_FLOOR)))

    def diagonal(self) -> np.ndarray:
        mag = self.magnitude()
        if self.mode is Mode.REAL:
            return (self.sign * mag).astype(np.complex128)
        return mag * np.exp(1j * self.theta)

    def to_ssm(self) -> DiagonalSSM:
        if self.mode is Mode.REAL:
            return DiagonalSSM.real(self.diagonal().real, self.b.real, self.c.real)
        return DiagonalSSM.complex(self.diagonal(), self.b, self.c)

    @classmethod
    def from_ssm(cls, ssm: DiagonalSSM) -> "StableParams":
        """Re-express a system with 0 < |a_j| < 1 in the stable chart."""
        mag = np.abs(ssm.a)
        if np.any(mag <= 0) or np.any(mag >= 1):
            raise ValidationError("only systems with 0 < |a_j| < 1 have a stable parameterization")
        nu = np.log(-np.log(mag))
        if ssm.mode is Mode.REAL:
            sign = np.where(ssm.a.real < 0, -1.0, 1.0)
            return cls(Mode.REAL, nu, np.zeros(ssm.dim), sign, ssm.b.real, ssm.c.real)
        return cls(Mode.COMPLEX, nu, np.angle(ssm.a), np.ones(ssm.dim), ssm.b, ssm.c)

    @property
    def size(self) -> int:
        return self.dim * (3 if self.mode is Mode.REAL else 6)

    def flatten(self) -> np.ndarray:
        """Real: [nu, b, c]; Complex: [nu, theta, Re b, Im b, Re c, Im c]."""
        if self.mode is Mode.REAL:
            return np.concatenate([self.nu, self.b.real, self.c.real])
        return np.concatenate([self.nu, self.theta, self.b.real, self.b.imag, self.c.real, self.c.imag])

    def unflatten(self, flat: np.ndarray) -> "StableParams":
        """New parameters with the same mode and signs, values taken from ``flat``."""
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.size,):
            raise ValidationError(f"expected a flat vector of size {self.size}, got shape {flat.shape}")
        parts = np.split(flat, 3 if self.mode is Mode.REAL else 6)
        if self.mode is Mode.REAL:
            nu, b, c = parts
            return StableParams(Mode.REAL, nu, np.zeros(self.dim), self.sign, b, c)
        nu, theta, b_re, b_im, c_re, c_im = parts
        return StableParams(Mode.COMPLEX, nu, theta, self.sign, b_re + 1j * b_im, c_re + 1j * c_im)


def init_params(mode: Mode, dim: int, init: Init, rng: np.random.Generator) -> StableParams:
    """
    Random initialization.

    UNIFORM_FULL: Real draws a ~ U[-1, 1]; Complex draws |a| ~ U[0, 1) and a
    phase ~ U[0, 2 pi). UNIFORM_RING: |a| ~ U[0.99, 1) with a random sign (Real)
    or a phase ~ U[0, 2 pi) (Complex). Magnitudes are clamped to
    [1e-6, 1 - 1e-6]. B and C entries (both parts in Complex mode) are
    U[-1/sqrt(n), 1/sqrt(n)].
    """
    mode, init = Mode(mode), Init(init)
    if dim < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    theta = np.zeros(dim)
    sign = np.ones(dim)
    if init is Init.UNIFORM_FULL:
        if mode is Mode.REAL:
            a = rng.uniform(-1.0, 1.0, size=dim)
            sign = np.where(a < 0, -1.0, 1.0)
            mag = np.abs(a)
        else:
            mag = rng.uniform(0.0, 1.0, size=dim)
            theta = rng.uniform(0.0, 2 * np.pi, size=dim)
    else:
        mag = rng.uniform(0.99, 1.0, size=dim)
        if mode is Mode.REAL:
            sign = rng.choice(np.array([-1.0, 1.0]), size=dim)
        else:
            theta = rng.uniform(0.0, 2 * np.pi, size=dim)
    mag = np.clip(mag, MIN_MAGNITUDE, MAX_MAGNITUDE)
    nu = np.log(-np.log(mag))

    scale = 1.0 / np.sqrt(dim)
    b = rng.uniform(-scale, scale, size=dim)
    c = rng.uniform(-scale, scale, size=dim)
    if mode is Mode.COMPLEX:
        b = b + 1j * rng.uniform(-scale, scale, size=dim)
        c = c + 1j * rng.uniform(-scale, scale, size=dim)
    return StableParams(mode, nu, theta, sign, b, c)


def loss(ssm: DiagonalSSM, target: ScalarSeries) -> float:
    """
    ||IR_{:t} - target||_2^2, the closed form of the expected squared output
    error at time t under i.i.d. standard normal inputs.
    """
    t = target.length
    if t < 1:
        raise ValidationError("loss needs a non-empty target")
    weights = ssm.c * ssm.b
    residual = np.real(weights @ powers(ssm.a, t)) - target.values
    return float(residual @ residual)


def loss_and_gradient(params: StableParams, target: ScalarSeries) -> Tuple[float, np.ndarray]:
    """Loss and its gradient with respect to ``params.flatten()``."""
    t = target.length
    a = params.diagonal()
    pw = powers(a, t)
    w = params.c * params.b
    residual = np.real(w @ pw) - target.values
    value = float(residual @ residual)

    two_r = 2.0 * residual
    # g_j = sum_k 2 r_k a_j^k ; ha_j = w_j sum_k 2 r_k k a_j^k
    g = pw @ two_r
    ha = w * (pw @ (two_r * np.arange(t)))

    active = params.nu > NU_FLOOR
    d_nu = np.where(active, -np.exp(params.nu) * ha.real, 0.0)
    grad_b = np.conj(params.c * g)
    grad_c = np.conj(params.b * g)

    if params.mode is Mode.REAL:
        return value, np.concatenate([d_nu, grad_b.real, grad_c.real])
    d_theta = -ha.imag
    return value, np.concatenate([d_nu, d_theta, grad_b.real, grad_b.imag, grad_c.real, grad_c.imag])


def gradient(params: StableParams, target: ScalarSeries) -> np.ndarray:
    return loss_and_gradient(params, target)[1]
