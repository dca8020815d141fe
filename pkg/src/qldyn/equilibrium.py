"""Quantal response equilibrium: residuals, damped logit solver, gaps."""

from dataclasses import dataclass

import numpy as np

from .game_core import (StrategyProfile, TemperatureVector, as_temperatures,
                        rewards_matrix)

SOLVER_TOL = 1e-10
MAX_ITERATIONS = 100_000
DAMPING = 0.5
DAMPING_FLOOR = 1.0 / 64


@dataclass
class QreSolution:
    profile: StrategyProfile
    residual: float
    iterations: int
    converged: bool
    temperature: TemperatureVector


def _positive_temps(game, T):
    T = as_temperatures(T, game.player_count)
    if np.any(T.values <= 0):
        raise ValueError("QRE operations require all T_k > 0")
    return T


def _logit_cols(R, T, n, noff):
    """Column-wise softmax(R_k / T_k) per player block; T is (N, B)."""
    Z = np.empty_like(R)
    for k in range(len(n)):
        s = slice(noff[k], noff[k + 1])
        Y = R[s] / T[k]
        e = np.exp(Y - Y.max(axis=0))
        Z[s] = e / e.sum(axis=0)
    return Z


def qre_residual(game, x, T):
    """Sup-norm deviation of x from the logit response to its own rewards."""
    T = _positive_temps(game, T)
    pack = game.pack
    R = rewards_matrix(game, x.flat[:, None])
    Z = _logit_cols(R, T.values[:, None], pack["n"], pack["noff"])
    return float(np.abs(x.flat[:, None] - Z).max())


def solve_batch(game, T_cols, X0, tol=SOLVER_TOL, max_iterations=MAX_ITERATIONS):
    """Damped logit fixed-point iteration over a batch of temperature
    columns.  T_cols is (N, B), X0 is (rows, B).  Returns
    (X_best, residual, iterations, converged) with per-column entries.

    Starts at damping 0.5, halves the per-column damping whenever that
    column's residual increases, with floor 1/64; keeps the best iterate.
    """
    pack = game.pack
    n, noff = pack["n"], pack["noff"]
    X = np.array(X0, dtype=np.float64)
    B = X.shape[1]
    alpha = np.full(B, DAMPING)
    prev = np.full(B, np.inf)
    best = np.full(B, np.inf)
    X_best = X.copy()
    iters = np.zeros(B, dtype=np.int64)
    conv = np.zeros(B, dtype=bool)

    for it in range(max_iterations + 1):
        R = rewards_matrix(game, X)
        Z = _logit_cols(R, T_cols, n, noff)
        resid = np.abs(X - Z).max(axis=0)
        improved = resid < best
        if improved.any():
            best[improved] = resid[improved]
            X_best[:, improved] = X[:, improved]
        newly = (~conv) & (resid < tol)
        iters[newly] = it
        conv |= newly
        if conv.all() or it == max_iterations:
            break
        worse = (~conv) & (resid > prev)
        alpha[worse] = np.maximum(alpha[worse] / 2, DAMPING_FLOOR)
        prev = np.where(conv, prev, resid)
        act = ~conv
        X[:, act] = (1 - alpha[act]) * X[:, act] + alpha[act] * Z[:, act]
        iters[act] = it + 1
    return X_best, best, iters, conv


def qre_solve(game, T, x_init=None, tol=SOLVER_TOL,
              max_iterations=MAX_ITERATIONS):
    """Solve for a QRE by damped logit iteration; reports rather than
    throws on non-convergence."""
    T = _positive_temps(game, T)
    if x_init is None:
        x_init = StrategyProfile.uniform(game.action_counts)
    X, resid, iters, conv = solve_batch(
        game, T.values[:, None], x_init.flat[:, None], tol, max_iterations)
    profile = StrategyProfile.from_flat(X[:, 0], game.action_counts)
    return QreSolution(profile=profile, residual=float(resid[0]),
                       iterations=int(iters[0]), converged=bool(conv[0]),
                       temperature=T)


def equilibrium_gap(game, x):
    """Best unilateral deviation gain: max_k (max_i r_ki - <x_k, r_k>).

    Accepts a PerturbedGameView, in which case the gap is measured in
    the entropy-perturbed game.
    """
    pack = game.pack
    noff = pack["noff"]
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    gap = 0.0
    for k in range(game.player_count):
        rk = R[noff[k]:noff[k + 1]]
        gap = max(gap, float(rk.max() - x[k] @ rk))
    return gap


def solution_to_json(sol):
    return {
        "profile": [b.tolist() for b in sol.profile.blocks],
        "residual": sol.residual,
        "iterations": sol.iterations,
        "converged": sol.converged,
    }
