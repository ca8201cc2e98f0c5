"""Value iteration over per-state matrix games, with a stopping certificate.

The loop applies the value-update operator until successive iterates differ
by less than the threshold ``epsilon`` in the weighted sup-norm.  Because the
operator contracts with modulus ``eta_gamma`` from the model's certificate,
stopping at threshold ``epsilon`` leaves the returned pair within
``epsilon / (1 - eta_gamma)`` of the true game value, and the number of
applications needed is bounded a priori by ``iteration_bound``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import GameModel
from .shapley import (
    ShapleyOperator,
    StationaryStrategyPair,
    evaluate_stationary_pair,
    omega_norm,
)
from .verify import AssumptionCertificate, check_assumptions

MAX_ITER_CAP = 10**6
_ZERO_RESIDUAL = 1e-14


class CertificateError(RuntimeError):
    """The model's certificate failed; the contraction argument is void."""


class ConvergenceError(RuntimeError):
    """The iteration limit was reached before the stopping rule fired."""


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Result of one value-iteration run.

    ``iterations`` is the index ``n`` of the update ``V_{n+1} = T(V_n)`` at
    which the stopping rule fired, so ``n + 1`` operator applications were
    made and ``error_trace`` has ``n + 1`` entries (the weighted sup-norm of
    each successive difference).  ``epsilon_nash`` is the certified distance
    bound ``epsilon / (1 - eta_gamma)``; ``epsilon_nash_tight`` is a sharper
    diagnostic using the largest continuation factor as the per-step rate,
    meaningful when all state weights are 1 and not backed by the
    certificate.  ``value_trace`` records the iterate after each application
    (one row per ``error_trace`` entry).
    """

    epsilon_value: np.ndarray
    equilibrium: StationaryStrategyPair
    iterations: int
    error_trace: tuple[float, ...]
    value_trace: tuple[tuple[float, ...], ...]
    epsilon_target: float
    epsilon_nash: float
    epsilon_nash_tight: float
    certificate: AssumptionCertificate
    n_epsilon_bound: int


class CertificationResult(NamedTuple):
    passed: bool
    worst_violation: float
    per_state: dict[str, float]


def _bound_from(delta0: float, epsilon: float, eta_gamma: float) -> int:
    if delta0 <= _ZERO_RESIDUAL:
        return 0
    # raw formula can go negative when epsilon already exceeds delta0
    return max(0, 1 + math.floor(math.log(epsilon / delta0) / math.log(eta_gamma)))


def _nash_radius(epsilon: float, rate: float) -> float:
    return epsilon / (1.0 - rate) if rate < 1.0 else float("inf")


def value_iterate(
    m: GameModel,
    epsilon: float,
    v0=None,
    max_iter: int | None = None,
    certificate: AssumptionCertificate | None = None,
) -> SolveReport:
    """Iterate the value-update operator from ``v0`` until it settles.

    ``v0`` defaults to all zeros; any start vector works, and all ones is a
    common choice.  ``max_iter`` caps the number of operator applications and
    defaults to ten times the a-priori bound.
    Raises :class:`CertificateError` when the model's certificate fails and
    :class:`ConvergenceError` when the cap is hit first.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    cert = certificate if certificate is not None else check_assumptions(m)
    if not cert.passed:
        failed = [name for name, c in cert.checks.items() if not c.passed]
        raise CertificateError(f"model certificate failed: {', '.join(failed)}")

    op = ShapleyOperator(m)
    if v0 is None:
        current = np.zeros(op.n)
    else:
        current = np.asarray(v0, dtype=float).copy()
        if current.shape != (op.n,):
            raise ValueError(f"v0 must have length {op.n}")

    updated, pair = op.apply(current)
    delta = omega_norm(updated - current, op.weights)
    bound = _bound_from(delta, epsilon, cert.eta_gamma)
    if max_iter is None:
        max_iter = max(1, min(10 * max(bound, 1), MAX_ITER_CAP))

    trace = [delta]
    values = [tuple(float(v) for v in updated)]
    current = updated
    while trace[-1] >= epsilon:
        if len(trace) >= max_iter:
            raise ConvergenceError(
                f"no convergence within {max_iter} applications "
                f"(last delta {trace[-1]!r}, epsilon {epsilon!r})"
            )
        updated, pair = op.apply(current)
        trace.append(omega_norm(updated - current, op.weights))
        values.append(tuple(float(v) for v in updated))
        current = updated

    return SolveReport(
        epsilon_value=current,
        equilibrium=pair,
        iterations=len(trace) - 1,
        error_trace=tuple(trace),
        value_trace=tuple(values),
        epsilon_target=epsilon,
        epsilon_nash=_nash_radius(epsilon, cert.eta_gamma),
        epsilon_nash_tight=_nash_radius(epsilon, cert.lambda_max),
        certificate=cert,
        n_epsilon_bound=bound,
    )


def iteration_bound(
    m: GameModel,
    epsilon: float,
    v0=None,
    certificate: AssumptionCertificate | None = None,
) -> int:
    """A-priori bound on the stopping index for the given start vector.

    Zero when the start vector is already fixed (first residual below
    1e-14), else ``1 + floor(log(epsilon / delta0) / log(eta_gamma))``
    clamped at zero, with ``delta0`` the first residual norm.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    cert = certificate if certificate is not None else check_assumptions(m)
    if not cert.passed:
        raise CertificateError("model certificate failed")
    op = ShapleyOperator(m)
    start = np.zeros(op.n) if v0 is None else np.asarray(v0, dtype=float)
    updated, _ = op.apply(start)
    return _bound_from(omega_norm(updated - start, op.weights), epsilon, cert.eta_gamma)


def certify_solution(m: GameModel, report: SolveReport, tol: float) -> CertificationResult:
    """Check the returned pair for profitable one-shot stationary deviations.

    Evaluates the pair exactly, then at every state compares the best pure
    response of each player against the pair's own value.  A positive
    violation means some deviation gains more than ``tol``.
    """
    values = evaluate_stationary_pair(m, report.equilibrium)
    op = ShapleyOperator(m)
    per_state: dict[str, float] = {}
    for xi, x in enumerate(m.states):
        c = op.payoff_matrix(values, xi)
        fv = np.asarray(report.equilibrium.f[x], dtype=float)
        gv = np.asarray(report.equilibrium.g[x], dtype=float)
        gain_row = float(np.max(c @ gv)) - values[xi]
        gain_col = values[xi] - float(np.min(fv @ c))
        per_state[x] = max(gain_row, gain_col, 0.0)
    worst = max(per_state.values())
    return CertificationResult(passed=worst <= tol, worst_violation=worst, per_state=per_state)


def trace_csv(m: GameModel, report: SolveReport) -> str:
    """Per-iteration trace as CSV: ``iteration,delta,V_<state>,...``."""
    header = "iteration,delta," + ",".join(f"V_{x}" for x in m.states)
    lines = [header]
    for k, (delta, row) in enumerate(zip(report.error_trace, report.value_trace), start=1):
        lines.append(f"{k},{delta!r}," + ",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def strategy_tables(m: GameModel, pair: StationaryStrategyPair) -> dict:
    """JSON-ready ``{state: {"f": {action: prob}, "g": {action: prob}}}``."""
    return {
        x: {
            "f": {a: float(p) for a, p in zip(m.actions1[x], pair.f[x])},
            "g": {b: float(p) for b, p in zip(m.actions2[x], pair.g[x])},
        }
        for x in m.states
    }


def report_as_dict(m: GameModel, report: SolveReport) -> dict:
    """JSON-ready summary of a solve run (trace excluded, exported as CSV)."""
    return {
        "values": {x: float(v) for x, v in zip(m.states, report.epsilon_value)},
        "equilibrium": strategy_tables(m, report.equilibrium),
        "iterations": report.iterations,
        "applications": len(report.error_trace),
        "final_delta": report.error_trace[-1],
        "epsilon_target": report.epsilon_target,
        "epsilon_nash": report.epsilon_nash,
        "epsilon_nash_tight": report.epsilon_nash_tight,
        "n_epsilon_bound": report.n_epsilon_bound,
        "certificate": report.certificate.as_dict(),
    }
