"""Monte Carlo simulation of the continuous-time discounted payoff.

Trajectories alternate sojourns and jumps under a fixed stationary pair.
Within one sojourn of length ``tau`` at discount rate ``alpha`` the running
reward integrates in closed form, so each sojourn contributes

    D * r * (1 - exp(-alpha * tau)) / alpha

to the realized payoff, where ``D`` is the discount accumulated before the
sojourn; no within-sojourn discretization is involved.  A trajectory is
truncated once ``D`` falls below a floor, and the discarded tail is bounded
by ``M * omega_max * D / alpha0`` (``M`` the weighted payoff bound), which is
reported alongside every estimate.

Randomness is organized as one independent stream per trajectory, derived
from ``(seed, trajectory_index)``, with a fixed draw order of four uniforms
per sojourn (both actions, the holding time, the successor).  The batched
driver and the single-trajectory entry point share one implementation, so an
estimate is reproducible and independent of batching.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Deterministic,
    DirectWeights,
    Exponential,
    GameModel,
    SojournLaw,
    Uniform,
)
from .shapley import StationaryStrategyPair, _pair_arrays

DEFAULT_DISCOUNT_FLOOR = 1e-8
_BLOCK_STEPS = 64
_BATCH = 16384
_KIND_EXPONENTIAL, _KIND_UNIFORM, _KIND_DETERMINISTIC = 0, 1, 2


class NotSamplableError(ValueError):
    """The model carries direct-weight laws, which have no distribution to draw."""


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean of the discounted payoff with its uncertainty budget."""

    mean: float
    std_error: float
    trajectories: int
    truncation_bound: float
    seed: int


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """The independent stream driving trajectory ``index`` of a run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_sojourn(law: SojournLaw, rng: np.random.Generator) -> float:
    """One holding-time draw.

    Consumes exactly one uniform for every law, including the deterministic
    one, so stream positions do not depend on which laws a trajectory visits.
    """
    u = rng.random()
    if isinstance(law, Exponential):
        return -math.log1p(-u) / law.rate
    if isinstance(law, Uniform):
        return u * law.upper
    if isinstance(law, Deterministic):
        return law.duration
    raise NotSamplableError(f"sojourn law {law!r} cannot be sampled")


class _Sampler:
    """Flat per-triple tables for fast trajectory stepping."""

    def __init__(self, m: GameModel, pair: StationaryStrategyPair):
        n = m.n_states
        vecs = _pair_arrays(m, pair)
        sizes1 = [len(m.actions1[x]) for x in m.states]
        sizes2 = [len(m.actions2[x]) for x in m.states]
        self.f_cum = np.ones((n, max(sizes1)))
        self.g_cum = np.ones((n, max(sizes2)))
        for xi in range(n):
            fv, gv = vecs[xi]
            self.f_cum[xi, : sizes1[xi]] = _cumulative(fv)
            self.g_cum[xi, : sizes2[xi]] = _cumulative(gv)
        self.cols = np.asarray(sizes2)
        offsets, count = [], 0
        for xi in range(n):
            offsets.append(count)
            count += sizes1[xi] * sizes2[xi]
        self.offset = np.asarray(offsets)
        self.alpha = np.empty(count)
        self.reward = np.empty(count)
        self.kind = np.empty(count, dtype=np.int8)
        self.param = np.empty(count)
        self.p_cum = np.empty((count, n))
        for xi, x in enumerate(m.states):
            for i, a in enumerate(m.actions1[x]):
                for j, b in enumerate(m.actions2[x]):
                    t = (x, a, b)
                    tid = offsets[xi] + i * sizes2[xi] + j
                    law = m.sojourn[t]
                    if isinstance(law, Exponential):
                        self.kind[tid], self.param[tid] = _KIND_EXPONENTIAL, law.rate
                    elif isinstance(law, Uniform):
                        self.kind[tid], self.param[tid] = _KIND_UNIFORM, law.upper
                    elif isinstance(law, Deterministic):
                        self.kind[tid], self.param[tid] = _KIND_DETERMINISTIC, law.duration
                    else:
                        raise NotSamplableError(
                            f"triple {t!r} carries direct weights; simulation unavailable"
                        )
                    self.alpha[tid] = m.discount[t]
                    self.reward[tid] = m.payoff[t]
                    self.p_cum[tid] = _cumulative(np.asarray(m.transition[t]))
        omega = np.asarray(m.weight_vector())
        payoff_bound = max(abs(m.payoff[t]) / m.weight[t[0]] for t in m.triples())
        self.tail_coef = payoff_bound * float(omega.max()) / float(self.alpha.min())


def _cumulative(probs: np.ndarray) -> np.ndarray:
    c = np.cumsum(probs)
    c[-1] = 1.0  # guard searchsorted against rounding in the row sum
    return c


def _run_batch(sampler: _Sampler, streams: list, x0: int, floor: float):
    """Drive all streams to truncation; returns (payoffs, tail_bounds).

    Uniforms are pulled from each stream in blocks; trajectory ``i`` consumes
    slots ``[4k, 4k+4)`` of its own stream at sojourn ``k``, identically
    however many trajectories run together.
    """
    total = len(streams)
    payoffs = np.empty(total)
    tails = np.empty(total)
    ids = np.arange(total)
    state = np.full(total, x0)
    discount = np.ones(total)
    acc = np.zeros(total)
    while ids.size:
        width = ids.size
        block = np.empty((width, 4 * _BLOCK_STEPS))
        for i in range(width):
            block[i] = streams[i].random(4 * _BLOCK_STEPS)
        alive = np.ones(width, dtype=bool)
        for pos in range(_BLOCK_STEPS):
            u = block[:, 4 * pos : 4 * pos + 4]
            a = (sampler.f_cum[state] <= u[:, 0, None]).sum(axis=1)
            b = (sampler.g_cum[state] <= u[:, 1, None]).sum(axis=1)
            tid = sampler.offset[state] + a * sampler.cols[state] + b
            par = sampler.param[tid]
            kind = sampler.kind[tid]
            tau = np.where(
                kind == _KIND_EXPONENTIAL,
                -np.log1p(-u[:, 2]) / par,
                np.where(kind == _KIND_UNIFORM, u[:, 2] * par, par),
            )
            rate = sampler.alpha[tid]
            step = np.exp(-rate * tau)
            acc_now = discount * sampler.reward[tid] * (1.0 - step) / rate
            acc += np.where(alive, acc_now, 0.0)
            discount = np.where(alive, discount * step, discount)
            state = (sampler.p_cum[tid] <= u[:, 3, None]).sum(axis=1)
            done = alive & (discount < floor)
            if done.any():
                payoffs[ids[done]] = acc[done]
                tails[ids[done]] = sampler.tail_coef * discount[done]
                alive &= ~done
                if not alive.any():
                    break
        keep = np.flatnonzero(alive)
        ids = ids[keep]
        state = state[keep]
        discount = discount[keep]
        acc = acc[keep]
        streams = [streams[i] for i in keep]
    return payoffs, tails


def simulate_trajectory(
    m: GameModel,
    pair: StationaryStrategyPair,
    x0: str,
    rng: np.random.Generator,
    discount_floor: float = DEFAULT_DISCOUNT_FLOOR,
) -> tuple[float, float]:
    """One realized discounted payoff from ``x0`` plus its truncation bound."""
    if not 0.0 < discount_floor < 1.0:
        raise ValueError(f"discount floor must lie in (0, 1), got {discount_floor!r}")
    sampler = _Sampler(m, pair)
    payoffs, tails = _run_batch(sampler, [rng], m.state_index(x0), discount_floor)
    return float(payoffs[0]), float(tails[0])


def estimate_value(
    m: GameModel,
    pair: StationaryStrategyPair,
    x0: str,
    trajectories: int,
    seed: int,
    discount_floor: float = DEFAULT_DISCOUNT_FLOOR,
) -> MCEstimate:
    """Estimate the expected discounted payoff from ``x0`` under ``pair``.

    Trajectory ``i`` always uses the stream ``trajectory_rng(seed, i)``, so
    the estimate depends only on the arguments, not on batch sizes.
    """
    if trajectories < 2:
        raise ValueError(f"need at least 2 trajectories, got {trajectories!r}")
    if not 0.0 < discount_floor < 1.0:
        raise ValueError(f"discount floor must lie in (0, 1), got {discount_floor!r}")
    sampler = _Sampler(m, pair)
    x0i = m.state_index(x0)
    payoffs = np.empty(trajectories)
    tails = np.empty(trajectories)
    for start in range(0, trajectories, _BATCH):
        stop = min(start + _BATCH, trajectories)
        streams = [trajectory_rng(seed, i) for i in range(start, stop)]
        payoffs[start:stop], tails[start:stop] = _run_batch(
            sampler, streams, x0i, discount_floor
        )
    return MCEstimate(
        mean=float(payoffs.mean()),
        std_error=float(payoffs.std(ddof=1) / math.sqrt(trajectories)),
        trajectories=trajectories,
        truncation_bound=float(tails.mean()),
        seed=seed,
    )


@dataclass(frozen=True)
class DeviationRow:
    """One pure-deviation experiment against the baseline pair."""

    deviation: tuple[int, str, str]  # (player, state, action)
    estimate: MCEstimate
    difference: float  # estimate mean minus baseline mean at the deviated state


def pure_deviations(m: GameModel) -> list[tuple[int, str, str]]:
    """Every meaningful pure override: states where the player has a choice."""
    out = []
    for x in m.states:
        if len(m.actions1[x]) > 1:
            out.extend((1, x, a) for a in m.actions1[x])
        if len(m.actions2[x]) > 1:
            out.extend((2, x, b) for b in m.actions2[x])
    return out


def _override(m: GameModel, pair: StationaryStrategyPair, player: int, x: str, action: str):
    acts = m.actions1[x] if player == 1 else m.actions2[x]
    try:
        idx = acts.index(action)
    except ValueError:
        raise ValueError(f"unknown action {action!r} for player {player} at state {x!r}") from None
    mass = np.zeros(len(acts))
    mass[idx] = 1.0
    if player == 1:
        return StationaryStrategyPair(f={**pair.f, x: mass}, g=pair.g)
    return StationaryStrategyPair(f=pair.f, g={**pair.g, x: mass})


def check_equilibrium_deviation(
    m: GameModel,
    pair: StationaryStrategyPair,
    deviations: list[tuple[int, str, str]],
    trajectories: int,
    seed: int,
    discount_floor: float = DEFAULT_DISCOUNT_FLOOR,
) -> list[DeviationRow]:
    """Estimate each pure deviation's payoff against the baseline pair.

    Each deviation is simulated from the deviated state with the same seed as
    its baseline (common random numbers), and reported without judgment; at
    an equilibrium, player 1 deviations should not estimate above the
    baseline nor player 2 deviations below it, beyond sampling error.
    """
    baselines: dict[str, MCEstimate] = {}
    rows = []
    for player, x, action in deviations:
        if player not in (1, 2):
            raise ValueError(f"player must be 1 or 2, got {player!r}")
        if x not in baselines:
            baselines[x] = estimate_value(m, pair, x, trajectories, seed, discount_floor)
        changed = _override(m, pair, player, x, action)
        est = estimate_value(m, changed, x, trajectories, seed, discount_floor)
        rows.append(
            DeviationRow(
                deviation=(player, x, action),
                estimate=est,
                difference=est.mean - baselines[x].mean,
            )
        )
    return rows
