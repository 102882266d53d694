"""Bell combination in three regimes: {0,1} classical vertices, quantum
pair correlations, and operator-norm maximization of

    B = a1 b1 + a2 b1 + a1 b2 - a2 b2

over dichotomic observables under a chosen commutation scenario.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .model import canonical_axis
from .numerics import mix_seed, uniform_stream

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2


def bell_combination(pa: float, pa2: float, pb: float, pb2: float) -> float:
    """p1(a) p2(b) + p1(a) p2(b') + p1(a') p2(b) - p1(a') p2(b')."""
    return pa * pb + pa * pb2 + pa2 * pb - pa2 * pb2


def chsh_sum(e_ab: float, e_ab2: float, e_a2b: float, e_a2b2: float) -> float:
    """Correlation form of the same combination: E(a,b)+E(a,b')+E(a',b)-E(a',b')."""
    return e_ab + e_ab2 + e_a2b - e_a2b2


def classical_max(values: tuple[float, float] = (0.0, 1.0)) -> float:
    """Maximum of :func:`bell_combination` over the 16 vertices of values^4."""
    return max(bell_combination(*v) for v in itertools.product(values, repeat=4))


def qm_pair_correlation(relative_angle: float) -> float:
    """E(theta) = cos 2 theta for equally polarized photon pairs."""
    return math.cos(2.0 * canonical_axis(relative_angle))


@dataclass(frozen=True)
class BellSettings:
    alpha: float
    alpha_prime: float
    beta: float
    beta_prime: float

    def __post_init__(self):
        for name in ("alpha", "alpha_prime", "beta", "beta_prime"):
            object.__setattr__(self, name, canonical_axis(float(getattr(self, name))))

    @classmethod
    def from_degrees(cls, *angles: float) -> "BellSettings":
        return cls(*(math.radians(a) for a in angles))


OPTIMAL_SETTINGS = BellSettings.from_degrees(0.0, 45.0, 22.5, 157.5)


def chsh_from_correlations(
    settings: BellSettings, correlation: Callable[[float], float] = qm_pair_correlation
) -> float:
    s = settings
    return chsh_sum(
        correlation(s.alpha - s.beta),
        correlation(s.alpha - s.beta_prime),
        correlation(s.alpha_prime - s.beta),
        correlation(s.alpha_prime - s.beta_prime),
    )


class Scenario(enum.Enum):
    CLASSICAL = "classical"  # all four observables jointly diagonal
    TENSOR = "tensor"  # a's on one tensor factor, b's on the other
    FREE = "free"  # no commutation constraint


@dataclass(frozen=True)
class HermitianInvolution:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("involution must be a square matrix")
        if not np.allclose(m, m.conj().T, atol=1e-10, rtol=0):
            raise ValueError("involution must be Hermitian")
        if not np.allclose(m @ m, np.eye(len(m)), atol=1e-10, rtol=0):
            raise ValueError("involution must square to the identity")
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def bell_operator(a1, a2, b1, b2) -> np.ndarray:
    ops = [np.asarray(getattr(o, "matrix", o), dtype=complex) for o in (a1, a2, b1, b2)]
    if len({o.shape for o in ops}) != 1:
        raise ValueError("all four operators must share one dimension")
    a1, a2, b1, b2 = ops
    return a1 @ b1 + a2 @ b1 + a1 @ b2 - a2 @ b2


def _norm(B: np.ndarray) -> float:
    # largest eigenvalue of B^dagger B, batched over leading axes
    top = np.linalg.eigvalsh(np.swapaxes(B.conj(), -1, -2) @ B)[..., -1]
    return np.sqrt(np.maximum(top, 0.0))


def bell_operator_norm(a1, a2, b1, b2) -> float:
    """Largest singular value of the Bell operator."""
    return float(_norm(bell_operator(a1, a2, b1, b2)))


@dataclass(frozen=True)
class BellSearchResult:
    scenario: Scenario
    dimension: int
    achieved_max: float
    witness: tuple[HermitianInvolution, ...]
    restarts_used: int


@functools.lru_cache(maxsize=None)
def _layout(d: int):
    pairs = np.array(list(itertools.combinations(range(d), 2)))
    eye = np.broadcast_to(np.eye(d, dtype=complex), (len(pairs), d, d))
    return np.arange(len(pairs)), pairs[:, 0], pairs[:, 1], eye


def unitaries(params: np.ndarray, d: int) -> np.ndarray:
    """Batch of d x d unitaries from two-level rotations.

    ``params`` has shape (k, d (d - 1)): one (angle, phase) per index pair,
    U = G_01 G_02 ... G_(d-2)(d-1).  A trailing diagonal phase matrix is
    omitted; it commutes with the diagonal signature and drops out of
    U D U^dagger.
    """
    n, I, J, eye = _layout(d)
    theta, phi = params[:, 0::2], params[:, 1::2]
    c = np.cos(theta)
    s = np.sin(theta) * np.exp(1j * phi)
    G = np.repeat(eye[None], params.shape[0], axis=0)
    G[:, n, I, I] = c
    G[:, n, J, J] = c
    G[:, n, J, I] = s
    G[:, n, I, J] = -s.conj()
    U = G[:, 0]
    for m in range(1, len(n)):
        U = U @ G[:, m]
    return U


def involutions(params: np.ndarray, signatures: np.ndarray) -> np.ndarray:
    """U D U^dagger for each row of params and each +/-1 signature row."""
    d = signatures.shape[1]
    U = unitaries(params, d)
    return (U * signatures[:, None, :]) @ np.swapaxes(U.conj(), -1, -2)


def _signatures(rng: np.random.Generator, d: int, balanced: bool) -> np.ndarray:
    sig = np.ones((4, d))
    for row in sig:
        n_minus = d // 2 if balanced else int(rng.integers(0, d + 1))
        row[:n_minus] = -1.0
    return sig


def _local_max(objective, x0):
    res = minimize(
        lambda x: -objective(x), x0, method="Powell", options={"xtol": 1e-6, "ftol": 1e-11}
    )
    return -float(res.fun), res.x


def _restart_tensor(rng, d):
    d_a, d_b = 2, d // 2
    sig_a = _signatures(rng, d_a, True)[:2]
    sig_b = _signatures(rng, d_b, rng.random() < 0.5)[:2]
    n_a, n_b = d_a * (d_a - 1), d_b * (d_b - 1)
    eye_a, eye_b = np.eye(d_a), np.eye(d_b)

    def build(x):
        A = involutions(x[: 2 * n_a].reshape(2, n_a), sig_a)
        B = involutions(x[2 * n_a :].reshape(2, n_b), sig_b)
        return (
            np.kron(A[0], eye_b), np.kron(A[1], eye_b),
            np.kron(eye_a, B[0]), np.kron(eye_a, B[1]),
        )

    def objective(x):
        return float(_norm(bell_operator(*build(x))))

    x0 = rng.uniform(0.0, 2.0 * math.pi, 2 * n_a + 2 * n_b)
    value, x = _local_max(objective, x0)
    return value, build(x)


def _restart_free(rng, d, balanced):
    sig = _signatures(rng, d, balanced)
    n = d * (d - 1)

    def build(x):
        return involutions(x.reshape(4, n), sig)

    def objective(x):
        ops = build(x)
        B = ops[0] @ ops[2] + ops[1] @ ops[2] + ops[0] @ ops[3] - ops[1] @ ops[3]
        return float(_norm(B))

    x0 = rng.uniform(0.0, 2.0 * math.pi, 4 * n)
    value, x = _local_max(objective, x0)
    return value, tuple(build(x))


def _restart_classical(rng, d):
    # jointly diagonal in a common random basis; the norm only sees the signs
    sig = rng.choice([-1.0, 1.0], size=(4, d))

    def value_of(s):
        return float(np.max(np.abs(s[0] * s[2] + s[1] * s[2] + s[0] * s[3] - s[1] * s[3])))

    best = value_of(sig)
    improved = True
    while improved:
        improved = False
        for idx in itertools.product(range(4), range(d)):
            trial = sig.copy()
            trial[idx] *= -1.0
            v = value_of(trial)
            if v > best:
                sig, best, improved = trial, v, True
    U = unitaries(rng.uniform(0.0, 2.0 * math.pi, (1, d * (d - 1))), d)[0]
    ops = tuple((U * s) @ U.conj().T for s in sig)
    return best, ops


SUPPORTED_DIMENSIONS = (2, 4, 8)


def search_operator_max(
    scenario: Scenario, dimension: int, restarts: int, seed: int = 0
) -> BellSearchResult:
    """Seeded multi-start maximization of the Bell operator norm.

    Restart r draws from its own stream seeded with ``mix_seed(seed, r)``;
    the best restart wins, ties going to the lowest index.  Even restarts use
    balanced signatures, odd restarts random ones.  The tensor scenario
    factors the space as C^2 (x) C^(d/2).
    """
    scenario = Scenario(scenario)
    if dimension not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {dimension}")
    if scenario is Scenario.TENSOR and dimension < 4:
        raise ValueError("tensor scenario needs dimension 4 or 8")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    best_value, best_ops = -math.inf, None
    for r in range(restarts):
        rng = uniform_stream(mix_seed(seed, r))
        if scenario is Scenario.CLASSICAL:
            value, ops = _restart_classical(rng, dimension)
        elif scenario is Scenario.TENSOR:
            value, ops = _restart_tensor(rng, dimension)
        else:
            value, ops = _restart_free(rng, dimension, r % 2 == 0)
        if value > best_value:
            best_value, best_ops = value, ops
    witness = tuple(HermitianInvolution(_hermitize(o)) for o in best_ops)
    return BellSearchResult(scenario, dimension, best_value, witness, restarts)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def commutator_norm(x, y) -> float:
    x = np.asarray(getattr(x, "matrix", x))
    y = np.asarray(getattr(y, "matrix", y))
    return float(np.linalg.norm(x @ y - y @ x, 2))


def witness_violations(result: BellSearchResult) -> float:
    """Largest constraint residual of a search witness (0 when exact)."""
    a1, a2, b1, b2 = (w.matrix for w in result.witness)
    eye = np.eye(result.dimension)
    worst = max(float(np.linalg.norm(o @ o - eye, 2)) for o in (a1, a2, b1, b2))
    if result.scenario is Scenario.CLASSICAL:
        pairs = itertools.combinations((a1, a2, b1, b2), 2)
    elif result.scenario is Scenario.TENSOR:
        pairs = itertools.product((a1, a2), (b1, b2))
    else:
        pairs = ()
    for x, y in pairs:
        worst = max(worst, commutator_norm(x, y))
    return worst


def tensor_witness() -> tuple[HermitianInvolution, ...]:
    """Textbook tensor-local operators reaching 2 sqrt 2."""
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    I = np.eye(2)
    return tuple(
        HermitianInvolution(m)
        for m in (
            np.kron(Z, I),
            np.kron(X, I),
            np.kron(I, (Z + X) / SQRT2),
            np.kron(I, (Z - X) / SQRT2),
        )
    )
