"""Seeded Monte Carlo of the two-analyzer coincidence experiment in the
hidden-variable model.

Each pair carries one hidden polarization lam, uniform on [0, pi).  Given
lam the two photons pass their analyzers independently, with probabilities
law1(lam - alpha) and law2(lam - beta).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .cascade import hv_two
from .model import HvStep, ResponseLaw, evaluate
from .numerics import integrate_period, mix_seed, uniform_stream

CHUNK = 1 << 18


@dataclass(frozen=True)
class EprConfig:
    n_pairs: int
    alpha: float
    beta: float
    law1: ResponseLaw = HvStep()
    law2: ResponseLaw = HvStep()
    seed: int = 0

    def __post_init__(self):
        if int(self.n_pairs) < 1:
            raise ValueError(f"n_pairs must be >= 1, got {self.n_pairs}")


@dataclass(frozen=True)
class CoincidenceTally:
    n_pairs: int
    n_coincidence: int
    n_first_only: int
    n_second_only: int
    n_neither: int

    @property
    def first_passed(self) -> int:
        return self.n_coincidence + self.n_first_only

    @property
    def second_passed(self) -> int:
        return self.n_coincidence + self.n_second_only


def simulate_pairs(config: EprConfig) -> CoincidenceTally:
    """Tally the four outcomes of ``config.n_pairs`` simulated photon pairs.

    Every pair consumes three consecutive uniforms from the seeded stream
    (lam, photon 1, photon 2).  Pairs are drawn in fixed-size chunks, which
    reads the stream in the same order as one large draw.
    """
    stream = uniform_stream(config.seed)
    both = first = second = 0
    left = int(config.n_pairs)
    while left:
        m = min(left, CHUNK)
        u = stream.random((m, 3))
        lam = math.pi * u[:, 0]
        pass1 = u[:, 1] < evaluate(config.law1, lam - config.alpha)
        pass2 = u[:, 2] < evaluate(config.law2, lam - config.beta)
        both += int(np.count_nonzero(pass1 & pass2))
        first += int(np.count_nonzero(pass1 & ~pass2))
        second += int(np.count_nonzero(~pass1 & pass2))
        left -= m
    n = int(config.n_pairs)
    return CoincidenceTally(n, both, first, second, n - both - first - second)


class Estimate(NamedTuple):
    p_hat: float
    stderr: float


def binomial_estimate(successes: int, n: int) -> Estimate:
    if n < 1:
        raise ValueError("need at least one trial")
    p = successes / n
    return Estimate(p, math.sqrt(p * (1.0 - p) / n))


def coincidence_estimate(tally: CoincidenceTally) -> Estimate:
    return binomial_estimate(tally.n_coincidence, tally.n_pairs)


def single_pass_prediction(law: ResponseLaw, axis: float = 0.0, tol: float = 1e-10) -> float:
    """(1/pi) * int law(lam - axis) dlam, the single-arm pass probability."""
    return integrate_period(lambda lam: evaluate(law, lam - axis), tol).value


@dataclass(frozen=True)
class CurvePoint:
    angle: float
    p_hat: float
    stderr: float
    p_quadrature: float
    n_pairs: int


def point_seed(seed: int, index: int) -> int:
    return mix_seed(seed, index)


def epr_curve(
    relative_angles: Sequence[float],
    n_pairs: int,
    law1: ResponseLaw = HvStep(),
    law2: ResponseLaw = HvStep(),
    seed: int = 0,
    tol: float = 1e-10,
    threads: int = 1,
) -> list[CurvePoint]:
    """Simulated and quadrature coincidence probability per relative angle.

    Analyzer 1 sits at 0 and analyzer 2 at the relative angle; grid point i
    runs with seed ``point_seed(seed, i)``.
    """
    if len(relative_angles) == 0:
        raise ValueError("angle grid must not be empty")

    def one(item):
        i, angle = item
        cfg = EprConfig(n_pairs, 0.0, float(angle), law1, law2, point_seed(seed, i))
        est = coincidence_estimate(simulate_pairs(cfg))
        return CurvePoint(float(angle), est.p_hat, est.stderr, hv_two(angle, law1, law2, tol), n_pairs)

    items = list(enumerate(relative_angles))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]
