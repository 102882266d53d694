"""Single-polarizer response laws and angle canonicalization.

All angles are radians.  A polarizer axis is a line, so every response is
pi-periodic and even in the deviation between photon polarization and axis.
Laws are vectorized: they accept a float or a numpy array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

HALF_PI = 0.5 * math.pi


def _check_finite(x) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"angle must be finite, got {x!r}")


def fold_deviation(angle: ArrayLike) -> ArrayLike:
    """Reduce an angle modulo pi into (-pi/2, pi/2]."""
    _check_finite(angle)
    x = np.asarray(angle, dtype=float)
    d = x - math.pi * np.ceil(x / math.pi - 0.5)
    # rounding in the line above can land a hair outside the interval
    d = np.where(d > HALF_PI, d - math.pi, d)
    d = np.where(d <= -HALF_PI, d + math.pi, d)
    return float(d) if d.ndim == 0 else d


def canonical_axis(angle: ArrayLike) -> ArrayLike:
    """Reduce an axis angle modulo pi into [0, pi)."""
    _check_finite(angle)
    r = np.mod(np.asarray(angle, dtype=float), math.pi)
    r = np.where(r >= math.pi, 0.0, r)
    return float(r) if r.ndim == 0 else r


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")


def malus(deviation: ArrayLike, epsilon: float = 0.0) -> ArrayLike:
    """Generalized Malus law (1 - eps) cos^2(d) + eps."""
    _check_epsilon(epsilon)
    c = np.cos(fold_deviation(deviation))
    return (1.0 - epsilon) * c * c + epsilon


@dataclass(frozen=True)
class HvResponseParams:
    a: float = 1.95
    e: float = 3.56
    c: float = 500.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"hv.a must be > 0, got {self.a}")
        if not (math.isfinite(self.e) and self.e > 0):
            raise ValueError(f"hv.e must be > 0, got {self.e}")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise ValueError(f"hv.c must be >= 0, got {self.c}")


DEFAULT_HV = HvResponseParams()


def hv_response(deviation: ArrayLike, params: HvResponseParams = DEFAULT_HV) -> ArrayLike:
    """Hidden-variable step response 1 - (1 - E) / (1 + c E), E = exp(-a |d|^e)."""
    if not isinstance(params, HvResponseParams):
        raise ValueError("params must be an HvResponseParams")
    x = np.abs(fold_deviation(deviation))
    E = np.exp(-params.a * x**params.e)
    p = 1.0 - (1.0 - E) / (1.0 + params.c * E)
    return np.clip(p, 0.0, 1.0)


@dataclass(frozen=True)
class IdealMalus:
    def __call__(self, deviation: ArrayLike) -> ArrayLike:
        return malus(deviation, 0.0)


@dataclass(frozen=True)
class GeneralizedMalus:
    epsilon: float

    def __post_init__(self):
        _check_epsilon(self.epsilon)

    def __call__(self, deviation: ArrayLike) -> ArrayLike:
        return malus(deviation, self.epsilon)


@dataclass(frozen=True)
class HvStep:
    params: HvResponseParams = DEFAULT_HV

    def __call__(self, deviation: ArrayLike) -> ArrayLike:
        return hv_response(deviation, self.params)


class Evaluation(NamedTuple):
    value: ArrayLike
    clamped: bool


@dataclass(frozen=True)
class Tabulated:
    """Measured response on |deviation| in [0, pi/2], linearly interpolated.

    Deviations past the last grid point (after folding) take the endpoint
    value; ``evaluate_detailed`` reports when that happened.
    """

    grid: tuple[tuple[float, float], ...]

    def __post_init__(self):
        grid = tuple((float(d), float(p)) for d, p in self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) < 2:
            raise ValueError("tabulated response needs at least two points")
        xs = np.array([g[0] for g in grid])
        ps = np.array([g[1] for g in grid])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("tabulated deviations must be strictly increasing")
        if xs[0] < 0 or xs[-1] > HALF_PI + 1e-12:
            raise ValueError("tabulated deviations must lie in [0, pi/2]")
        if np.any((ps < 0) | (ps > 1)) or not np.all(np.isfinite(ps)):
            raise ValueError("tabulated probabilities must lie in [0, 1]")

    @classmethod
    def constant(cls, value: float) -> "Tabulated":
        return cls(((0.0, value), (HALF_PI, value)))

    def evaluate_detailed(self, deviation: ArrayLike) -> Evaluation:
        x = np.abs(fold_deviation(deviation))
        xs = np.array([g[0] for g in self.grid])
        ps = np.array([g[1] for g in self.grid])
        clamped = bool(np.any((x < xs[0]) | (x > xs[-1])))
        v = np.interp(x, xs, ps)
        return Evaluation(float(v) if np.ndim(v) == 0 else v, clamped)

    def __call__(self, deviation: ArrayLike) -> ArrayLike:
        return self.evaluate_detailed(deviation).value


ResponseLaw = Union[IdealMalus, GeneralizedMalus, HvStep, Tabulated]


def evaluate(law: ResponseLaw, deviation: ArrayLike) -> ArrayLike:
    """Transmission probability of ``law`` at ``deviation``."""
    if isinstance(law, IdealMalus):
        return malus(deviation, 0.0)
    if isinstance(law, GeneralizedMalus):
        return malus(deviation, law.epsilon)
    if isinstance(law, HvStep):
        return hv_response(deviation, law.params)
    if isinstance(law, Tabulated):
        return law(deviation)
    raise TypeError(f"not a response law: {law!r}")


def evaluate_detailed(law: ResponseLaw, deviation: ArrayLike) -> Evaluation:
    """Like :func:`evaluate`, also flagging endpoint clamping of tabulated laws."""
    if isinstance(law, Tabulated):
        return law.evaluate_detailed(deviation)
    return Evaluation(evaluate(law, deviation), False)


def kink_points(law: ResponseLaw) -> tuple[float, ...]:
    """Deviations in [0, pi) where the folded law may lose smoothness.

    Folding makes |d| non-smooth at pi/2; tabulated laws also break at nodes.
    """
    if isinstance(law, IdealMalus) or isinstance(law, GeneralizedMalus):
        return ()
    pts = [HALF_PI]
    if isinstance(law, HvStep):
        pts.append(0.0)
    elif isinstance(law, Tabulated):
        for d, _ in law.grid:
            pts.extend((d, math.pi - d))
    return tuple(sorted({canonical_axis(p) for p in pts}))
