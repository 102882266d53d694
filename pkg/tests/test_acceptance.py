"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

import itertools
import math

import numpy as np
import pytest

from hiddenpol.bell import (
    OPTIMAL_SETTINGS,
    TSIRELSON,
    Scenario,
    bell_combination,
    bell_operator_norm,
    chsh_from_correlations,
    classical_max,
    search_operator_max,
    tensor_witness,
    witness_violations,
)
from hiddenpol.cascade import QmModel, hv_two, min_beta_sweep
from hiddenpol.cli import main
from hiddenpol.eprmc import EprConfig, binomial_estimate, epr_curve, simulate_pairs, single_pass_prediction
from hiddenpol.model import HvStep, IdealMalus, hv_response, malus
from hiddenpol.numerics import fit_malus

from conftest import ALPHA_GRID_DEG

# tools/oracles.py, 50-digit mpmath evaluation of the response formula
HV_QUARTER = 0.9974470192086293
HV_HALF = 0.028866940754018824

FREE_CEILING = 2 * math.sqrt(3)
EPR_SEED = 20240601


def test_criterion_1_hv_response_values():
    assert hv_response(0.0) == 1.0
    assert abs(hv_response(math.pi / 4) - HV_QUARTER) <= 1e-3
    assert abs(hv_response(math.pi / 2) - HV_HALF) <= 1e-3


def test_criterion_2_malus_fit(hv_p2_curve, record_property):
    fit = fit_malus(list(zip(np.radians(ALPHA_GRID_DEG), hv_p2_curve)))
    record_property("fit_epsilon", fit.epsilon)
    record_property("fit_sup_residual", fit.sup_residual)
    assert fit.epsilon > 0
    assert fit.sup_residual <= 0.02


def test_criterion_3_belinfante_counterexample():
    law = IdealMalus()
    angles = np.linspace(0, math.pi, 50)
    values = np.array([hv_two(a, law, law) for a in angles])
    assert np.max(np.abs(values - (0.25 + np.cos(2 * angles) / 8))) <= 1e-9
    hi, lo = hv_two(0.0, law, law), hv_two(math.pi / 2, law, law)
    visibility = (hi - lo) / (hi + lo)
    malus_visibility = (malus(0.0) - malus(math.pi / 2)) / (malus(0.0) + malus(math.pi / 2))
    # analytic: (3/8 - 1/8) / (3/8 + 1/8)
    assert visibility == pytest.approx(0.5, abs=1e-9)
    assert malus_visibility == 1.0


def test_criterion_4_bell_limits(free_search, record_property):
    assert classical_max() == 2
    assert max(bell_combination(*v) for v in itertools.product((0, 1), repeat=4)) == 2
    assert abs(chsh_from_correlations(OPTIMAL_SETTINGS) - TSIRELSON) <= 1e-9
    assert abs(bell_operator_norm(*tensor_witness()) - TSIRELSON) <= 1e-9
    for seed in range(20):
        res = search_operator_max(Scenario.TENSOR, 4, 4, seed)
        assert res.achieved_max <= TSIRELSON + 1e-6
    record_property("free_achieved_max", free_search.achieved_max)
    record_property("free_gap_to_2sqrt3", FREE_CEILING - free_search.achieved_max)
    assert witness_violations(free_search) <= 1e-8
    assert TSIRELSON - 1e-6 <= free_search.achieved_max <= FREE_CEILING + 1e-6


def test_criterion_5_mc_matches_quadrature():
    law = HvStep()
    angles = np.radians([0.0, 22.5, 45.0, 67.5, 90.0])
    n = 1_000_000
    for pt in epr_curve(angles, n, law, law, seed=EPR_SEED):
        assert pt.n_pairs == n
        assert abs(pt.p_hat - pt.p_quadrature) <= 4 * pt.stderr
    # marginal of the first arm ignores the second analyzer
    expected = single_pass_prediction(law, 0.0)
    for i, beta in enumerate(angles):
        tally = simulate_pairs(EprConfig(n, 0.0, beta, law, law, seed=EPR_SEED + i))
        est = binomial_estimate(tally.first_passed, n)
        assert abs(est.p_hat - expected) <= 4 * est.stderr


def test_criterion_6_sweep(hv_p2_curve, hv_sweep_rows, record_property):
    eps = 0.02
    alphas = np.radians(ALPHA_GRID_DEG)
    for row in min_beta_sweep(alphas, QmModel(eps)):
        assert abs(math.remainder(row.beta_star - row.alpha - math.pi / 2, math.pi)) <= 1e-6
        assert abs(row.p_min - eps * malus(row.alpha, eps)) <= 1e-6
    fit = fit_malus(list(zip(alphas, hv_p2_curve)))
    qm_curve = fit.amplitude * fit.epsilon * malus(alphas, fit.epsilon)
    hv_curve = np.array([row.p_min for row in hv_sweep_rows])
    gap = float(np.max(np.abs(hv_curve - qm_curve)))
    record_property("sweep_max_gap", gap)
    assert gap > 0.01


CLI_RUNS = (
    ["sweep", "--model", "both", "--alpha", "0:90:15"],
    ["cascade", "--axes", "0,30,120"],
    ["epr", "--angles", "0,45,90", "--n", "200000", "--seed", "5"],
    ["bell", "--scenario", "free", "--dim", "4", "--restarts", "6", "--seed", "3"],
)


def test_criterion_7_cli_determinism(tmp_path):
    path = tmp_path / "run.csv"
    for argv in CLI_RUNS:
        outputs = []
        for threads in ("1", "1", "3"):
            assert main([*argv, "--threads", threads, "--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2], argv[0]
