"""Exact zero-sum matrix game solver via linear programming.

The maximizing player's problem

    max v   subject to   sum_i A[i, j] x_i >= v  for every column j,
                         x in the probability simplex

is solved as a standard-form LP by a dense two-phase primal simplex, with
Bland's rule as the anti-cycling fallback.  Every pivoting rule is
deterministic, so when the optimal face is not a single point the returned
strategy is still reproducible across runs.  The free game value is split as
``v = v_plus - v_minus``, and the matrix is pre-normalized by its largest
magnitude so the absolute pivot tolerance is meaningful at any payoff scale.
The minimizing player's problem is the same LP applied to ``-A.T``; solving
both sides independently gives a duality-gap certificate for free.

Single-row and single-column games are solved by direct scan, which avoids
degenerate simplex bases.
"""

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
_FEAS_TOL = 1e-10


class MatrixGameError(RuntimeError):
    """The LP machinery failed (unbounded or infeasible program)."""


@dataclass(frozen=True, eq=False)
class MatrixGameSolution:
    """Game value, a mixed saddle point, and the primal/dual agreement gap."""

    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    duality_gap: float


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    # reimpose an exact unit column so reduced costs of basics are exactly 0
    tableau[:, col] = 0.0
    tableau[row, col] = 1.0


def _bland(tableau: np.ndarray, basis: list[int], objective_floor: float | None = None) -> None:
    """Run the simplex to optimality on a feasible tableau (objective row last).

    Normal pivoting: most negative reduced cost enters (ties at the lowest
    index), and the leaving row takes the minimum ratio with exact ties
    preferring the largest pivot coefficient, then the lowest basis index
    (pivoting on a tiny coefficient scales its row, and the priced objective,
    up by the reciprocal, drowning later reduced costs in rounding noise).
    Should that stall on a degenerate basis, the rules switch to Bland's
    lowest-index/lowest-basis-index pair, which cannot cycle, so termination
    is guaranteed.  Every rule is deterministic.

    ``objective_floor`` stops early once the true objective cannot sit above
    it; phase 1 passes its feasibility tolerance, since its objective is
    nonnegative by construction and apparent progress below the floor is
    rounding noise, not improvement.
    """
    n_rows = tableau.shape[0] - 1
    stall_limit = 100 + 10 * (tableau.shape[0] + tableau.shape[1])
    hard_limit = 100 * stall_limit
    for pivots in range(hard_limit):
        if objective_floor is not None and -tableau[-1, -1] <= objective_floor:
            return
        reduced = tableau[-1, :-1]
        anti_cycling = pivots >= stall_limit
        if anti_cycling:
            enter = -1
            for j in range(reduced.shape[0]):
                if reduced[j] < -PIVOT_TOL:
                    enter = j
                    break
        else:
            enter = int(np.argmin(reduced))
            if reduced[enter] >= -PIVOT_TOL:
                enter = -1
        if enter < 0:
            return
        leave = -1
        best = np.inf
        for i in range(n_rows):
            coef = tableau[i, enter]
            if coef > PIVOT_TOL:
                ratio = tableau[i, -1] / coef
                if leave < 0 or ratio < best:
                    best, leave = ratio, i
                elif ratio == best:
                    if anti_cycling:
                        better = basis[i] < basis[leave]
                    else:
                        better = coef > tableau[leave, enter] or (
                            coef == tableau[leave, enter] and basis[i] < basis[leave]
                        )
                    if better:
                        leave = i
        if leave < 0:
            raise MatrixGameError("linear program is unbounded")
        _pivot(tableau, leave, enter)
        basis[leave] = enter
    raise MatrixGameError("simplex failed to terminate")


def _solve_standard_lp(
    c: np.ndarray, eq: np.ndarray, rhs: np.ndarray
) -> tuple[np.ndarray, float]:
    """Minimize ``c @ z`` subject to ``eq @ z == rhs``, ``z >= 0``.

    Requires ``rhs >= 0`` (callers arrange signs).  Returns the optimal
    vector and objective value.
    """
    n_rows, n_cols = eq.shape
    tab = np.zeros((n_rows + 1, n_cols + n_rows + 1))
    tab[:n_rows, :n_cols] = eq
    tab[:n_rows, n_cols : n_cols + n_rows] = np.eye(n_rows)
    tab[:n_rows, -1] = rhs
    basis = list(range(n_cols, n_cols + n_rows))
    tab[-1, n_cols : n_cols + n_rows] = 1.0
    for i in range(n_rows):
        tab[-1] -= tab[i]
    scale = max(1.0, float(np.max(np.abs(eq))), float(np.max(np.abs(rhs))))
    _bland(tab, basis, objective_floor=_FEAS_TOL * scale)
    if -tab[-1, -1] > _FEAS_TOL * scale:
        raise MatrixGameError("linear program is infeasible")
    np.clip(tab[:n_rows, -1], 0.0, None, out=tab[:n_rows, -1])

    # pivot any artificial still basic (at value 0) onto a real column
    keep_rows = []
    for i in range(n_rows):
        if basis[i] >= n_cols:
            piv = next(
                (j for j in range(n_cols) if abs(tab[i, j]) > PIVOT_TOL), None
            )
            if piv is None:
                continue  # redundant zero row
            _pivot(tab, i, piv)
            basis[i] = piv
        keep_rows.append(i)

    phase2 = np.zeros((len(keep_rows) + 1, n_cols + 1))
    phase2[:-1, :n_cols] = tab[keep_rows, :n_cols]
    phase2[:-1, -1] = tab[keep_rows, -1]
    basis2 = [basis[i] for i in keep_rows]
    phase2[-1, :n_cols] = c
    for r in range(len(basis2)):
        phase2[-1] -= phase2[-1, basis2[r]] * phase2[r]
    _bland(phase2, basis2)

    z = np.zeros(n_cols)
    for r, var in enumerate(basis2):
        z[var] = phase2[r, -1]
    return z, float(-phase2[-1, -1])


def _maximin(payoff: np.ndarray) -> tuple[float, np.ndarray]:
    """Value and optimal mixture for the row player of ``payoff``.

    The matrix is normalized by its largest magnitude first, so the absolute
    pivot tolerance means the same thing whatever the payoff scale; optimal
    strategies are unchanged by positive scaling and the value scales back.
    """
    m, l = payoff.shape
    norm = float(np.max(np.abs(payoff)))
    scaled = payoff / norm if norm > 0.0 else payoff
    n_vars = m + 2 + l  # x_1..x_m, v_plus, v_minus, one surplus per column
    eq = np.zeros((l + 1, n_vars))
    rhs = np.zeros(l + 1)
    for j in range(l):
        eq[j, :m] = scaled[:, j]
        eq[j, m] = -1.0
        eq[j, m + 1] = 1.0
        eq[j, m + 2 + j] = -1.0
    eq[l, :m] = 1.0
    rhs[l] = 1.0
    c = np.zeros(n_vars)
    c[m] = -1.0
    c[m + 1] = 1.0
    z, objective = _solve_standard_lp(c, eq, rhs)
    strategy = np.maximum(z[:m], 0.0)
    strategy /= strategy.sum()
    return -objective * (norm if norm > 0.0 else 1.0), strategy


def _point_mass(size: int, index: int) -> np.ndarray:
    e = np.zeros(size)
    e[index] = 1.0
    return e


def solve_matrix_game(payoff) -> MatrixGameSolution:
    """Solve the zero-sum game with the row player maximizing ``payoff``.

    Both players' programs are solved; their optima agree up to rounding and
    the difference is reported as ``duality_gap``.  Raises ``ValueError`` for
    empty or non-finite matrices.
    """
    a = np.asarray(payoff, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("payoff must be a nonempty 2-d matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff entries must be finite")
    m, l = a.shape
    if l == 1:
        i = int(np.argmax(a[:, 0]))
        return MatrixGameSolution(
            value=float(a[i, 0]),
            row_strategy=_point_mass(m, i),
            col_strategy=np.ones(1),
            duality_gap=0.0,
        )
    if m == 1:
        j = int(np.argmin(a[0]))
        return MatrixGameSolution(
            value=float(a[0, j]),
            row_strategy=np.ones(1),
            col_strategy=_point_mass(l, j),
            duality_gap=0.0,
        )
    v_row, x = _maximin(a)
    v_col_neg, y = _maximin(-a.T)
    v_col = -v_col_neg
    return MatrixGameSolution(
        value=v_row,
        row_strategy=x,
        col_strategy=y,
        duality_gap=abs(v_row - v_col),
    )


def verify_saddle_point(payoff, row_strategy, col_strategy, tol: float) -> tuple[bool, float]:
    """Check that no pure deviation beats the mixed pair by more than ``tol``.

    Returns ``(ok, worst_violation)`` where the violation is the largest gain
    available to either player from a single pure-strategy deviation.
    """
    a = np.asarray(payoff, dtype=float)
    x = np.asarray(row_strategy, dtype=float)
    y = np.asarray(col_strategy, dtype=float)
    if a.ndim != 2 or x.shape != (a.shape[0],) or y.shape != (a.shape[1],):
        raise ValueError(
            f"dimension mismatch: payoff {a.shape}, row {x.shape}, col {y.shape}"
        )
    value = float(x @ a @ y)
    gain_row = float(np.max(a @ y)) - value
    gain_col = value - float(np.min(x @ a))
    violation = max(gain_row, gain_col, 0.0)
    return violation <= tol, violation
