"""Shared fixtures: reference models, random model generation, oracles."""

import json
from pathlib import Path

import numpy as np
import pytest

from smgsolve import GameModel, StationaryStrategyPair, load_model

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"

# Three-state investment game: two exponential-sojourn states, one uniform,
# 2x2 actions everywhere.  Doubles as the serialization reference document.
INVESTMENT_DOC = {
    "states": ["1", "2", "3"],
    "actions1": {"1": ["a11", "a12"], "2": ["a21", "a22"], "3": ["a31", "a32"]},
    "actions2": {"1": ["b11", "b12"], "2": ["b21", "b22"], "3": ["b31", "b32"]},
    "weight": {"1": 1.0, "2": 1.0, "3": 1.0},
    "triples": [
        {"state": "1", "a": "a11", "b": "b11", "alpha": 0.98, "reward": 40,
         "sojourn": {"kind": "exponential", "rate": 20}, "transition": {"2": 0.5, "3": 0.5}},
        {"state": "1", "a": "a11", "b": "b12", "alpha": 0.96, "reward": 24,
         "sojourn": {"kind": "exponential", "rate": 30}, "transition": {"2": 0.43, "3": 0.57}},
        {"state": "1", "a": "a12", "b": "b11", "alpha": 0.92, "reward": 18,
         "sojourn": {"kind": "exponential", "rate": 11}, "transition": {"2": 0.32, "3": 0.68}},
        {"state": "1", "a": "a12", "b": "b12", "alpha": 0.9, "reward": 33,
         "sojourn": {"kind": "exponential", "rate": 13}, "transition": {"2": 0.62, "3": 0.38}},
        {"state": "2", "a": "a21", "b": "b21", "alpha": 0.78, "reward": 12,
         "sojourn": {"kind": "exponential", "rate": 7}, "transition": {"1": 0.46, "3": 0.54}},
        {"state": "2", "a": "a21", "b": "b22", "alpha": 0.76, "reward": 8,
         "sojourn": {"kind": "exponential", "rate": 8}, "transition": {"1": 0.48, "3": 0.52}},
        {"state": "2", "a": "a22", "b": "b21", "alpha": 0.73, "reward": 10,
         "sojourn": {"kind": "exponential", "rate": 6.5}, "transition": {"1": 0.39, "3": 0.61}},
        {"state": "2", "a": "a22", "b": "b22", "alpha": 0.7, "reward": 17,
         "sojourn": {"kind": "exponential", "rate": 4}, "transition": {"1": 0.3, "3": 0.7}},
        {"state": "3", "a": "a31", "b": "b31", "alpha": 0.86, "reward": 3,
         "sojourn": {"kind": "uniform", "upper": 0.34}, "transition": {"1": 0.45, "2": 0.55}},
        {"state": "3", "a": "a31", "b": "b32", "alpha": 0.84, "reward": 5,
         "sojourn": {"kind": "uniform", "upper": 0.44}, "transition": {"1": 0.24, "2": 0.76}},
        {"state": "3", "a": "a32", "b": "b31", "alpha": 0.89, "reward": 2,
         "sojourn": {"kind": "uniform", "upper": 0.55}, "transition": {"1": 0.43, "2": 0.57}},
        {"state": "3", "a": "a32", "b": "b32", "alpha": 0.82, "reward": 6,
         "sojourn": {"kind": "uniform", "upper": 0.15}, "transition": {"1": 0.4, "2": 0.6}},
    ],
}

SINGLE_STATE_DOC = {
    "states": ["only"],
    "actions1": {"only": ["stay"]},
    "actions2": {"only": ["stay"]},
    "triples": [
        {"state": "only", "a": "stay", "b": "stay", "alpha": 0.5, "reward": 2,
         "sojourn": {"kind": "exponential", "rate": 1.5}, "transition": {"only": 1.0}}
    ],
}

# Reference solution of the investment game (the value vector at the 1e-4
# stop; the reference strategy attribution is player-swapped, see
# test_acceptance).
INVESTMENT_VALUES = (12.6054, 12.1271, 11.1653)


@pytest.fixture(scope="session")
def investment_model() -> GameModel:
    return load_model(json.dumps(INVESTMENT_DOC))


@pytest.fixture(scope="session")
def single_state_model() -> GameModel:
    return load_model(json.dumps(SINGLE_STATE_DOC))


def random_model(
    rng: np.random.Generator,
    max_states: int = 5,
    max_actions: int = 4,
    kinds: tuple[str, ...] = ("exponential", "uniform", "deterministic"),
    unit_weight: bool = True,
) -> GameModel:
    """A random valid finite game, built through the document loader."""
    n = int(rng.integers(1, max_states + 1))
    states = [f"s{i}" for i in range(n)]
    actions1 = {x: [f"a{k}" for k in range(rng.integers(1, max_actions + 1))] for x in states}
    actions2 = {x: [f"b{k}" for k in range(rng.integers(1, max_actions + 1))] for x in states}
    triples = []
    for x in states:
        for a in actions1[x]:
            for b in actions2[x]:
                alpha = float(rng.uniform(0.3, 3.0))
                kind = kinds[rng.integers(0, len(kinds))]
                if kind == "exponential":
                    sojourn = {"kind": "exponential", "rate": float(rng.uniform(0.2, 20.0))}
                elif kind == "uniform":
                    sojourn = {"kind": "uniform", "upper": float(rng.uniform(0.05, 3.0))}
                elif kind == "deterministic":
                    sojourn = {"kind": "deterministic", "duration": float(rng.uniform(0.05, 2.0))}
                else:
                    lam = float(rng.uniform(0.2, 0.9))
                    sojourn = {"kind": "direct", "d": (1.0 - lam) / alpha, "lam": lam}
                raw = rng.uniform(0.05, 1.0, size=n)
                probs = raw / raw.sum()
                triples.append(
                    {
                        "state": x, "a": a, "b": b,
                        "alpha": alpha,
                        "reward": float(rng.uniform(-10.0, 10.0)),
                        "sojourn": sojourn,
                        "transition": {y: float(p) for y, p in zip(states, probs)},
                    }
                )
    doc = {
        "states": states,
        "actions1": actions1,
        "actions2": actions2,
        "triples": triples,
    }
    if not unit_weight:
        doc["weight"] = {x: float(rng.uniform(1.0, 1.002)) for x in states}
    return load_model(json.dumps(doc))


def random_pair(rng: np.random.Generator, m: GameModel) -> StationaryStrategyPair:
    """A random fully mixed stationary pair for ``m``."""
    f, g = {}, {}
    for x in m.states:
        fa = rng.uniform(0.05, 1.0, size=len(m.actions1[x]))
        gb = rng.uniform(0.05, 1.0, size=len(m.actions2[x]))
        f[x] = fa / fa.sum()
        g[x] = gb / gb.sum()
    return StationaryStrategyPair(f=f, g=g)


def solve_2x2_by_equalizing(a: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Independent 2x2 oracle: pure saddle scan, else the equalizing mix."""
    a = np.asarray(a, dtype=float)
    maximin = a.min(axis=1).max()
    minimax = a.max(axis=0).min()
    if maximin == minimax:  # pure saddle
        i = int(a.min(axis=1).argmax())
        j = int(a.max(axis=0).argmin())
        x = np.zeros(2); x[i] = 1.0
        y = np.zeros(2); y[j] = 1.0
        return float(a[i, j]), x, y
    denom = a[0, 0] + a[1, 1] - a[0, 1] - a[1, 0]
    p = (a[1, 1] - a[1, 0]) / denom
    q = (a[1, 1] - a[0, 1]) / denom
    value = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]) / denom
    return float(value), np.array([p, 1.0 - p]), np.array([q, 1.0 - q])
