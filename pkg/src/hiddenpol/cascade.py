"""Polarizer cascades under quantum mechanics and the hidden-variable model,
plus the minimum-transmission sweep over the third polarizer angle."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model import (
    GeneralizedMalus,
    HvStep,
    IdealMalus,
    ResponseLaw,
    canonical_axis,
    evaluate,
    fold_deviation,
    kink_points,
)
from .numerics import integrate_period, minimize_scalar


class InputLight(enum.Enum):
    UNPOLARIZED = "unpolarized"  # hidden polarization uniform over one period
    POLARIZED_FIRST_AXIS = "polarized"  # light already polarized along axis 1


@dataclass(frozen=True)
class CascadeSpec:
    axes: tuple[float, ...]
    responses: tuple[ResponseLaw, ...]
    input_light: InputLight = InputLight.UNPOLARIZED

    def __post_init__(self):
        axes = tuple(canonical_axis(float(a)) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "responses", tuple(self.responses))
        if not axes:
            raise ValueError("cascade needs at least one polarizer")
        if len(self.responses) != len(axes):
            raise ValueError("one response law per polarizer required")
        if axes[0] != 0.0:
            raise ValueError("first polarizer axis is the reference and must be 0")

    @classmethod
    def uniform(cls, axes, law: ResponseLaw, input_light=InputLight.UNPOLARIZED):
        axes = tuple(axes)
        return cls(axes, (law,) * len(axes), input_light)


def _breakpoints(axes, laws):
    pts = []
    for theta, law in zip(axes, laws):
        pts.extend(canonical_axis(theta + k) for k in kink_points(law))
    return pts


def _hv_integral(axes, laws, tol):
    def integrand(lam):
        out = np.ones_like(lam)
        for theta, law in zip(axes, laws):
            out *= evaluate(law, lam - theta)
        return out

    res = integrate_period(integrand, tol, breakpoints=_breakpoints(axes, laws))
    return float(min(max(res.value, 0.0), 1.0))


def hv_two(alpha: float, p1: ResponseLaw, p2: ResponseLaw, tol: float = 1e-10) -> float:
    """Two-polarizer transmission (1/pi) * int p1(lam) p2(lam - alpha) dlam."""
    return _hv_integral((0.0, float(alpha)), (p1, p2), tol)


def hv_cascade(spec: CascadeSpec, tol: float = 1e-10) -> float:
    """Persistent-lambda cascade: one integral over the product of responses."""
    if spec.input_light is not InputLight.UNPOLARIZED:
        raise ValueError("hidden-variable cascade requires unpolarized input")
    return _hv_integral(spec.axes, spec.responses, tol)


def qm_three(alpha: float, beta: float) -> float:
    """Ideal three-polarizer transmission cos^2(a) cos^2(a - b)."""
    return math.cos(alpha) ** 2 * math.cos(alpha - beta) ** 2


def qm_cascade(spec: CascadeSpec) -> float:
    """Product of Malus links for light polarized along the first axis."""
    if spec.input_light is not InputLight.POLARIZED_FIRST_AXIS:
        raise ValueError("quantum cascade requires input polarized along axis 1")
    for law in spec.responses:
        if not isinstance(law, (IdealMalus, GeneralizedMalus)):
            raise ValueError(f"quantum cascade needs Malus-type laws, got {law!r}")
    p = 1.0
    for prev, cur, law in zip(spec.axes, spec.axes[1:], spec.responses[1:]):
        p *= float(evaluate(law, fold_deviation(cur - prev)))
    return p


@dataclass(frozen=True)
class QmModel:
    epsilon: float = 0.0

    name = "QM"

    def three(self, alpha: float, beta: float) -> float:
        law = IdealMalus() if self.epsilon == 0 else GeneralizedMalus(self.epsilon)
        return qm_cascade(
            CascadeSpec.uniform((0.0, alpha, beta), law, InputLight.POLARIZED_FIRST_AXIS)
        )


@dataclass(frozen=True)
class HvModel:
    laws: tuple[ResponseLaw, ResponseLaw, ResponseLaw] = (HvStep(),) * 3
    quad_tol: float = 1e-10

    name = "HV"

    def three(self, alpha: float, beta: float) -> float:
        return _hv_integral((0.0, alpha, beta), self.laws, self.quad_tol)


SweepModel = Union[QmModel, HvModel]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    beta_star: float
    p_min: float
    model: str


COARSE_POINTS = 181


def min_beta(alpha: float, model: SweepModel, tol: float = 1e-8) -> SweepRow:
    """Global minimizer over beta of the (0, alpha, beta) cascade."""
    alpha = canonical_axis(alpha)
    grid = np.linspace(0.0, math.pi, COARSE_POINTS)
    values = np.array([model.three(alpha, b) for b in grid])
    k = int(np.argmin(values))
    step = grid[1] - grid[0]
    # f is pi-periodic in beta, so the bracket may straddle 0 or pi
    res = minimize_scalar(lambda b: model.three(alpha, b), grid[k] - step, grid[k] + step, tol)
    beta, p = res.argmin, res.min_value
    if values[k] < p:
        beta, p = grid[k], float(values[k])
    return SweepRow(alpha, canonical_axis(beta), float(min(max(p, 0.0), 1.0)), model.name)


def min_beta_sweep(
    alpha_grid: Sequence[float],
    model: SweepModel,
    tol: float = 1e-8,
    threads: int = 1,
) -> list[SweepRow]:
    """One minimum-transmission row per alpha, in grid order."""
    if len(alpha_grid) == 0:
        raise ValueError("alpha grid must not be empty")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda a: min_beta(a, model, tol), alpha_grid))
    return [min_beta(a, model, tol) for a in alpha_grid]
