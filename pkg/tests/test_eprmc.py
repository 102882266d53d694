import math

import numpy as np
import pytest

from hiddenpol import eprmc
from hiddenpol.cascade import hv_two
from hiddenpol.eprmc import (
    CoincidenceTally,
    EprConfig,
    coincidence_estimate,
    epr_curve,
    simulate_pairs,
    single_pass_prediction,
)
from hiddenpol.model import GeneralizedMalus, HvStep, Tabulated

ONE = Tabulated.constant(1.0)
ZERO = Tabulated.constant(0.0)


def test_certain_transmission():
    t = simulate_pairs(EprConfig(1000, 0.2, 1.1, ONE, ONE, seed=1))
    assert t == CoincidenceTally(1000, 1000, 0, 0, 0)


def test_certain_absorption():
    t = simulate_pairs(EprConfig(1000, 0.2, 1.1, ZERO, ZERO, seed=1))
    assert t.n_neither == 1000


def test_config_validation():
    with pytest.raises(ValueError):
        EprConfig(0, 0.0, 0.0)


def test_parallel_analyzers_match_quadrature():
    t = simulate_pairs(EprConfig(1_000_000, 0.4, 0.4, seed=17))
    p, se = coincidence_estimate(t)
    assert abs(p - hv_two(0.0, HvStep(), HvStep())) <= 4 * se


@pytest.mark.parametrize("n, k, p, se", [(4, 2, 0.5, 0.25), (10**6, 0, 0.0, 0.0), (100, 25, 0.25, 0.0433)])
def test_coincidence_estimate(n, k, p, se):
    est = coincidence_estimate(CoincidenceTally(n, k, 0, 0, n - k))
    assert est.p_hat == pytest.approx(p)
    assert est.stderr == pytest.approx(se, abs=5e-5)


def test_counts_sum_to_pairs():
    rng = np.random.default_rng(31)
    for _ in range(10):
        cfg = EprConfig(int(rng.integers(1, 5000)), rng.uniform(0, 3), rng.uniform(0, 3),
                        HvStep(), GeneralizedMalus(0.1), int(rng.integers(0, 2**63)))
        t = simulate_pairs(cfg)
        assert t.n_coincidence + t.n_first_only + t.n_second_only + t.n_neither == t.n_pairs


def test_chunking_does_not_change_tally(monkeypatch):
    cfg = EprConfig(10_000, 0.1, 0.9, seed=5)
    whole = simulate_pairs(cfg)
    monkeypatch.setattr(eprmc, "CHUNK", 333)
    assert simulate_pairs(cfg) == whole


def test_estimator_consistency():
    rng = np.random.default_rng(32)
    for i in range(20):
        a, b = rng.uniform(0, math.pi, 2)
        small = coincidence_estimate(simulate_pairs(EprConfig(20_000, a, b, seed=2 * i)))
        large = coincidence_estimate(simulate_pairs(EprConfig(40_000, a, b, seed=2 * i + 1)))
        combined = math.hypot(small.stderr, large.stderr)
        assert abs(small.p_hat - large.p_hat) <= 6 * combined


def test_marginal_independent_of_other_arm():
    expected = single_pass_prediction(HvStep(), 0.3)
    n = 400_000
    for beta in (0.3, 1.0, 2.2):
        t = simulate_pairs(EprConfig(n, 0.3, beta, seed=int(beta * 100)))
        p = t.first_passed / n
        assert abs(p - expected) <= 4 * math.sqrt(p * (1 - p) / n)


def test_curve_trivial_laws():
    (pt,) = epr_curve([0.0], 100, ONE, ONE, seed=3)
    assert pt.p_hat == 1.0 and pt.p_quadrature == pytest.approx(1.0, abs=1e-12)


def test_curve_deterministic_and_thread_independent():
    angles = [math.radians(a) for a in (0, 30, 60)]
    a = epr_curve(angles, 50_000, seed=9)
    assert a == epr_curve(angles, 50_000, seed=9)
    assert a == epr_curve(angles, 50_000, seed=9, threads=3)
    assert a != epr_curve(angles, 50_000, seed=10)


def test_curve_empty_grid():
    with pytest.raises(ValueError):
        epr_curve([], 10)
