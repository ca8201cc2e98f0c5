"""Value iteration: convergence, stopping analysis, and solution certification."""

import json

import numpy as np
import pytest

from smgsolve import (
    AssumptionCertificate,
    AssumptionCheck,
    CertificateError,
    ConvergenceError,
    ShapleyOperator,
    StationaryStrategyPair,
    certify_solution,
    check_assumptions,
    iteration_bound,
    load_model,
    solve_matrix_game,
    strategy_tables,
    trace_csv,
    value_iterate,
)

from conftest import random_model


def halving_model():
    """Single state, single action, continuation factor exactly 1/2, T(0) = 1."""
    doc = {
        "states": ["s"],
        "actions1": {"s": ["a"]},
        "actions2": {"s": ["b"]},
        "triples": [
            {"state": "s", "a": "a", "b": "b", "alpha": 1.0, "reward": 2.0,
             "sojourn": {"kind": "direct", "d": 0.5, "lam": 0.5}, "transition": {"s": 1.0}}
        ],
    }
    return load_model(json.dumps(doc))


def exact_half_certificate(m) -> AssumptionCertificate:
    """Certificate whose modulus equals the model's true contraction rate 1/2."""
    base = check_assumptions(m)
    return AssumptionCertificate(
        theta=base.theta, delta=base.delta, alpha0=base.alpha0, gamma=base.gamma,
        eta=0.5 / base.gamma, eta_gamma=0.5, lambda_max=base.lambda_max,
        checks=base.checks, passed=True,
    )


def test_single_state_converges_to_closed_form(single_state_model):
    report = value_iterate(single_state_model, 1e-10)
    np.testing.assert_allclose(report.epsilon_value, [4.0], atol=1e-9)
    np.testing.assert_allclose(report.equilibrium.f["only"], [1.0])
    np.testing.assert_allclose(report.equilibrium.g["only"], [1.0])
    assert report.error_trace[-1] < 1e-10
    assert report.iterations <= report.n_epsilon_bound


def test_start_at_fixed_point_stops_immediately(single_state_model):
    report = value_iterate(single_state_model, 1e-8, v0=[4.0])
    assert len(report.error_trace) == 1
    assert report.iterations == 0
    assert report.error_trace[0] < 1e-8


def test_error_trace_obeys_the_geometric_envelope(investment_model):
    report = value_iterate(investment_model, 1e-4, v0=np.ones(3))
    rate = report.certificate.eta_gamma
    lam_max = report.certificate.lambda_max
    trace = report.error_trace
    for k in range(len(trace) - 1):
        assert trace[k + 1] <= rate * trace[k] + 1e-15
        assert trace[k + 1] <= lam_max * trace[k] + 1e-15  # unit weights
    assert trace[-1] < 1e-4
    assert all(a > b for a, b in zip(trace, trace[1:]))


def test_iteration_bound_zero_at_fixed_point(single_state_model):
    assert iteration_bound(single_state_model, 1e-8, v0=[4.0]) == 0


def test_iteration_bound_formula_and_sharp_case():
    m = halving_model()
    cert = exact_half_certificate(m)
    # first residual from zero is exactly 1, so the bound is 1 + floor(log_0.5 0.1) = 4
    assert iteration_bound(m, 0.1, v0=[0.0], certificate=cert) == 4
    report = value_iterate(m, 0.1, v0=[0.0], certificate=cert)
    # residuals halve exactly: 1, .5, .25, .125, .0625 -> stop on the 5th application
    assert report.error_trace == (1.0, 0.5, 0.25, 0.125, 0.0625)
    assert report.iterations == 4
    assert report.iterations <= report.n_epsilon_bound == 4


def test_iteration_bound_clamped_when_epsilon_exceeds_first_residual():
    m = halving_model()
    cert = exact_half_certificate(m)
    assert iteration_bound(m, 10.0, v0=[0.0], certificate=cert) == 0
    report = value_iterate(m, 10.0, v0=[0.0], certificate=cert)
    assert report.iterations == 0


def test_observed_iterations_within_bound_on_random_models():
    rng = np.random.default_rng(43)
    done = 0
    while done < 15:
        m = random_model(rng, unit_weight=bool(rng.integers(0, 2)))
        cert = check_assumptions(m)
        if not cert.passed:
            continue
        done += 1
        report = value_iterate(m, 1e-6, certificate=cert)
        assert report.iterations <= report.n_epsilon_bound
        # every converged report admits no profitable one-shot deviation
        assert certify_solution(m, report, tol=2.0 * report.epsilon_nash).passed


def test_final_strategies_match_the_equalization_oracle(investment_model):
    # the returned pair solves the per-state games at the second-to-last
    # iterate; for 2x2 games the equalizing mix is an independent oracle
    from conftest import solve_2x2_by_equalizing

    report = value_iterate(investment_model, 1e-4, v0=np.ones(3))
    previous = np.array(report.value_trace[-2])
    op = ShapleyOperator(investment_model)
    for xi, x in enumerate(investment_model.states):
        v, fv, gv = solve_2x2_by_equalizing(op.payoff_matrix(previous, xi))
        assert report.epsilon_value[xi] == pytest.approx(v, abs=1e-9)
        np.testing.assert_allclose(report.equilibrium.f[x], fv, atol=1e-9)
        np.testing.assert_allclose(report.equilibrium.g[x], gv, atol=1e-9)


def test_unique_fixed_point_from_random_starts(investment_model):
    epsilon = 1e-6
    reports = []
    rng = np.random.default_rng(47)
    for _ in range(10):
        v0 = rng.uniform(-20.0, 20.0, size=3)
        reports.append(value_iterate(investment_model, epsilon, v0=v0))
    radius = 2.0 * epsilon / (1.0 - reports[0].certificate.eta_gamma)
    reference = reports[0].epsilon_value
    for rep in reports[1:]:
        assert np.max(np.abs(rep.epsilon_value - reference)) <= radius


def test_per_state_results_do_not_depend_on_sweep_order(investment_model):
    op = ShapleyOperator(investment_model)
    u = np.array([3.0, -2.0, 0.25])
    updated, pair = op.apply(u)
    for xi in reversed(range(investment_model.n_states)):
        sol = solve_matrix_game(op.payoff_matrix(u, xi))
        assert sol.value == updated[xi]
        x = investment_model.states[xi]
        np.testing.assert_array_equal(sol.row_strategy, pair.f[x])
        np.testing.assert_array_equal(sol.col_strategy, pair.g[x])


def test_max_iter_raises_convergence_error(investment_model):
    with pytest.raises(ConvergenceError, match="no convergence within 2"):
        value_iterate(investment_model, 1e-12, max_iter=2)


def test_failed_certificate_refuses_to_run():
    lam = 0.999999
    doc = {
        "states": ["s0"],
        "actions1": {"s0": ["a1", "a2"]},
        "actions2": {"s0": ["b"]},
        "triples": [
            {"state": "s0", "a": "a1", "b": "b", "alpha": 1.0, "reward": 1.0,
             "sojourn": {"kind": "exponential", "rate": 1.0}, "transition": {"s0": 1.0}},
            {"state": "s0", "a": "a2", "b": "b", "alpha": 1.0, "reward": 1.0,
             "sojourn": {"kind": "direct", "d": 1.0 - lam, "lam": lam}, "transition": {"s0": 1.0}},
        ],
    }
    m = load_model(json.dumps(doc))
    with pytest.raises(CertificateError, match="coefficient_bound"):
        value_iterate(m, 1e-6)


def test_certify_solution_single_state(single_state_model):
    report = value_iterate(single_state_model, 1e-10)
    result = certify_solution(single_state_model, report, tol=1e-8)
    assert result.passed
    assert result.worst_violation == pytest.approx(0.0, abs=1e-9)


def test_certify_solution_investment_and_corrupted_pair(investment_model):
    report = value_iterate(investment_model, 1e-4, v0=np.ones(3))
    result = certify_solution(investment_model, report, tol=2.0 * report.epsilon_nash)
    assert result.passed
    assert set(result.per_state) == {"1", "2", "3"}

    wrong_g = dict(report.equilibrium.g)
    wrong_g["1"] = np.array([0.0, 1.0])  # point mass on the wrong column
    corrupted = SolveReportProxy(report, StationaryStrategyPair(f=report.equilibrium.f, g=wrong_g))
    bad = certify_solution(investment_model, corrupted, tol=2.0 * report.epsilon_nash)
    assert not bad.passed
    assert bad.worst_violation > 0.1


class SolveReportProxy:
    """Report stand-in carrying a replaced equilibrium."""

    def __init__(self, report, pair):
        self.equilibrium = pair
        self._report = report

    def __getattr__(self, name):
        return getattr(self._report, name)


def test_trace_csv_layout(investment_model):
    report = value_iterate(investment_model, 1e-3, v0=np.ones(3))
    text = trace_csv(investment_model, report)
    lines = text.strip().splitlines()
    assert lines[0] == "iteration,delta,V_1,V_2,V_3"
    assert len(lines) == 1 + len(report.error_trace)
    first = lines[1].split(",")
    assert int(first[0]) == 1
    assert float(first[1]) == report.error_trace[0]
    assert [float(v) for v in first[2:]] == list(report.value_trace[0])


def test_strategy_tables_layout(investment_model):
    report = value_iterate(investment_model, 1e-4, v0=np.ones(3))
    tables = strategy_tables(investment_model, report.equilibrium)
    assert set(tables) == {"1", "2", "3"}
    assert set(tables["1"]["f"]) == {"a11", "a12"}
    assert sum(tables["2"]["g"].values()) == pytest.approx(1.0, abs=1e-10)
    assert tables["3"]["f"]["a31"] == pytest.approx(1.0, abs=1e-10)


def test_epsilon_nash_radii(investment_model):
    report = value_iterate(investment_model, 1e-4, v0=np.ones(3))
    cert = report.certificate
    assert report.epsilon_nash == pytest.approx(1e-4 / (1.0 - cert.eta_gamma), rel=1e-14)
    assert report.epsilon_nash_tight == pytest.approx(1e-4 / (1.0 - cert.lambda_max), rel=1e-14)
    assert report.epsilon_nash_tight < report.epsilon_nash


def test_invalid_epsilon_rejected(single_state_model):
    with pytest.raises(ValueError, match="epsilon must be positive"):
        value_iterate(single_state_model, 0.0)
    with pytest.raises(ValueError, match="epsilon must be positive"):
        iteration_bound(single_state_model, -1.0)
