"""Monotonicity certificates, divergence monitors, regret and welfare."""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SCHEMA_COMMENT
from .game_core import (NormalFormGame, PerturbedGameView, PolymatrixGame,
                        StrategyProfile, WeightVector, as_temperatures,
                        as_weights, pseudo_gradient, rewards_matrix,
                        social_welfare)
from .zoo import seeded_profiles

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

EIG_TOL = 1e-10
SAMPLE_TOL = 1e-9


@dataclass
class MonotonicityReport:
    verdict: str
    weights: WeightVector
    certificate: float
    sample_count: int = 0
    witness: object = None


@dataclass
class WelfareReport:
    tsw: float
    sw_at_equilibrium: float
    normalized_tsw: float
    regrets: list
    time_average: StrategyProfile
    tsw_tail_slope: float


def weighted_kl(x, y, w=None):
    """Sum_k w_k KL(x_k || y_k); zero x entries contribute 0, a zero y
    entry opposite positive x mass yields +inf."""
    w = as_weights(w, len(x))
    total = 0.0
    for k in range(len(x)):
        xk, yk = x[k], y[k]
        m = xk > 0
        if np.any(yk[m] == 0):
            return math.inf
        total += w[k] * float(np.sum(xk[m] * (np.log(xk[m]) - np.log(yk[m]))))
    return total


def _per_player_regs(reg, N):
    from .dynamics import Regularizer
    if isinstance(reg, Regularizer):
        return [reg] * N
    regs = list(reg)
    if len(regs) != N:
        raise ValueError(f"expected {N} regularizers, got {len(regs)}")
    return regs


def bregman_divergence(x, y, reg, w=None):
    """Sum_k w_k [h_k(y_k) - h_k(x_k) - <grad h_k(x_k), y_k - x_k>]."""
    w = as_weights(w, len(x))
    regs = _per_player_regs(reg, len(x))
    total = 0.0
    for k in range(len(x)):
        r = regs[k]
        g = r.gradient(x[k])
        total += w[k] * (r.value(y[k]) - r.value(x[k])
                         - float(g @ (y[k] - x[k])))
    return total


def fenchel_coupling(x, y, reg, w=None):
    """Sum_k w_k [h_k(x_k) + h*_k(y_k) - <x_k, y_k>]; y is a flat
    payoff-space vector over the player blocks."""
    w = as_weights(w, len(x))
    regs = _per_player_regs(reg, len(x))
    y = np.asarray(y, dtype=np.float64)
    noff = np.concatenate(([0], np.cumsum(x.action_counts)))
    total = 0.0
    for k in range(len(x)):
        yk = y[noff[k]:noff[k + 1]]
        r = regs[k]
        total += w[k] * (r.value(x[k]) + r.conjugate(yk) - float(x[k] @ yk))
    return total


def _tangent_basis(nk):
    """Orthonormal basis (nk, nk-1) of the zero-sum subspace (Helmert)."""
    Q = np.zeros((nk, nk - 1))
    for j in range(1, nk):
        Q[:j, j - 1] = 1.0
        Q[j, j - 1] = -j
        Q[:, j - 1] /= math.sqrt(j * (j + 1))
    return Q


def _poly_block_operator(game):
    noff = np.concatenate(([0], np.cumsum(game.action_counts)))
    rows = noff[-1]
    M = np.zeros((rows, rows))
    for (k, l), A in game.edges.items():
        M[noff[k]:noff[k + 1], noff[l]:noff[l + 1]] = A
    return M, noff


def _exact_verdict(game, M, noff, w):
    """Min tangent-space eigenvalue of -(WM + M^T W)/2 and its verdict."""
    rows = M.shape[0]
    Wd = np.empty(rows)
    for k in range(game.player_count):
        Wd[noff[k]:noff[k + 1]] = w[k]
    S = -(Wd[:, None] * M + M.T * Wd[None, :]) / 2.0
    blocks = [_tangent_basis(nk) for nk in game.action_counts]
    dim = sum(b.shape[1] for b in blocks)
    P = np.zeros((rows, dim))
    col = 0
    for k, b in enumerate(blocks):
        P[noff[k]:noff[k + 1], col:col + b.shape[1]] = b
        col += b.shape[1]
    vals, vecs = np.linalg.eigh(P.T @ S @ P)
    lam = float(vals[0])
    witness = P @ vecs[:, 0]
    if lam < -EIG_TOL:
        return "not_monotone", lam, witness
    if lam > EIG_TOL:
        return "weighted_strictly_monotone", lam, None
    return "weighted_monotone", lam, None


def monotonicity_exact_polymatrix(game, w=None):
    """Exact monotonicity certificate for polymatrix games.

    With explicit weights, tests those; otherwise tries all-ones and, for
    N <= 4, a coarse log-spaced weight grid, reporting the first weights
    that certify (strict preferred).  Never returns inconclusive.
    """
    if not isinstance(game, PolymatrixGame):
        raise TypeError("exact monotonicity requires a PolymatrixGame")
    M, noff = _poly_block_operator(game)
    if w is not None:
        w = as_weights(w, game.player_count)
        verdict, lam, witness = _exact_verdict(game, M, noff, w)
        return MonotonicityReport(verdict=verdict, weights=w,
                                  certificate=lam, witness=witness)
    ones = WeightVector.ones(game.player_count)
    verdict, lam, witness = _exact_verdict(game, M, noff, ones)
    if verdict != "not_monotone":
        return MonotonicityReport(verdict=verdict, weights=ones,
                                  certificate=lam, witness=witness)
    best = MonotonicityReport(verdict=verdict, weights=ones,
                              certificate=lam, witness=witness)
    if game.player_count <= 4:
        grid = (0.25, 0.5, 1.0, 2.0, 4.0)
        monotone_hit = None
        for combo in itertools.product(grid, repeat=game.player_count):
            wv = WeightVector(np.array(combo))
            verdict, lam, witness = _exact_verdict(game, M, noff, wv)
            if verdict == "weighted_strictly_monotone":
                return MonotonicityReport(verdict=verdict, weights=wv,
                                          certificate=lam, witness=None)
            if verdict == "weighted_monotone" and monotone_hit is None:
                monotone_hit = MonotonicityReport(verdict=verdict, weights=wv,
                                                  certificate=lam,
                                                  witness=None)
        if monotone_hit is not None:
            return monotone_hit
    return best


def monotonicity_sampled(game, w=None, pair_count=10_000, seed=0):
    """Refutation-only sampled check of the monotonicity inner product.

    Draws pair_count seeded profile pairs and evaluates
    <F(x; w) - F(y; w), x - y>; any value below -1e-9 refutes monotonicity
    (witness attached); otherwise the result is inconclusive.
    """
    w = as_weights(w, game.player_count)
    counts = game.action_counts
    profs = seeded_profiles(counts, 2 * pair_count, seed)
    X = np.stack([p.flat for p in profs[:pair_count]], axis=1)
    Y = np.stack([p.flat for p in profs[pair_count:]], axis=1)
    noff = np.concatenate(([0], np.cumsum(counts)))
    GX = rewards_matrix(game, X)
    GY = rewards_matrix(game, Y)
    for k in range(game.player_count):
        s = slice(noff[k], noff[k + 1])
        GX[s] *= -w[k]
        GY[s] *= -w[k]
    margins = ((GX - GY) * (X - Y)).sum(axis=0)
    i = int(np.argmin(margins))
    lo = float(margins[i])
    if lo < -SAMPLE_TOL:
        witness = (StrategyProfile.from_flat(X[:, i], counts),
                   StrategyProfile.from_flat(Y[:, i], counts))
        return MonotonicityReport(verdict="not_monotone", weights=w,
                                  certificate=lo, sample_count=pair_count,
                                  witness=witness)
    return MonotonicityReport(verdict="inconclusive", weights=w,
                              certificate=lo, sample_count=pair_count)


def perturbed_monotonicity_margin(game, x, y, w=None, T=1.0):
    """Monotonicity inner product of the entropy-perturbed game, split as
    base term + sum_k w_k T_k <x_k - y_k, ln x_k - ln y_k>."""
    if not (x.interior and y.interior):
        raise ValueError("margin requires interior profiles")
    w = as_weights(w, game.player_count)
    T = as_temperatures(T, game.player_count)
    gx = pseudo_gradient(game, x, w)
    gy = pseudo_gradient(game, y, w)
    base = float((gx - gy) @ (x.flat - y.flat))
    extra = 0.0
    for k in range(game.player_count):
        dx = x[k] - y[k]
        dl = np.log(x[k]) - np.log(y[k])
        extra += w[k] * T[k] * float(dx @ dl)
    return base + extra


def _reward_series(traj, game):
    """Rewards at every recorded sample: (rows, nrec)."""
    return rewards_matrix(game, np.ascontiguousarray(traj.states.T))


def regret(traj, game, k, t_max=None):
    """Undivided external regret of player k over the recorded horizon:
    max_i int r_ki dt - int <x_k, r_k> dt by trapezoidal quadrature."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    times = traj.times
    sel = slice(None) if t_max is None else times <= t_max + 1e-12
    times = times[sel]
    states = traj.states[sel]
    R = rewards_matrix(game, np.ascontiguousarray(states.T))
    noff = np.concatenate(([0], np.cumsum(traj.action_counts)))
    s = slice(noff[k], noff[k + 1])
    rk = R[s]
    realized = (states.T[s] * rk).sum(axis=0)
    per_action = _trapezoid(rk, times, axis=1)
    return float(per_action.max() - _trapezoid(realized, times))


def time_average(traj):
    """Trapezoidal time average of the recorded profiles."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if len(traj) == 1 or traj.times[-1] == traj.times[0]:
        return traj.profile(0)
    avg = _trapezoid(traj.states, traj.times, axis=0)
    avg /= traj.times[-1] - traj.times[0]
    return StrategyProfile.from_flat(avg, traj.action_counts)


def _sw_series(traj, game):
    R = _reward_series(traj, game)
    return (traj.states.T * R).sum(axis=0)


def tsw(traj, game):
    """Finite-horizon time-averaged social welfare along the trajectory."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    sw = _sw_series(traj, game)
    if len(traj) == 1 or traj.times[-1] == traj.times[0]:
        return float(sw[0])
    return float(_trapezoid(sw, traj.times) / (traj.times[-1] - traj.times[0]))


def welfare_normalizer(game):
    """Max |SW| over pure joint profiles (0 for the identically-zero game)."""
    if isinstance(game, PolymatrixGame):
        game = game.to_normal_form()
    if not isinstance(game, NormalFormGame):
        raise TypeError("normalizer requires a concrete game")
    total = np.zeros(game.action_counts)
    for U in game.payoffs:
        total = total + U
    return float(np.abs(total).max())


def running_tsw(traj, game):
    """Running time-average of SW at each recorded sample (index 0 carries
    the instantaneous value)."""
    sw = _sw_series(traj, game)
    times = traj.times
    out = np.empty_like(sw)
    out[0] = sw[0]
    if len(sw) > 1:
        increments = np.diff(times) * (sw[1:] + sw[:-1]) / 2.0
        cum = np.cumsum(increments)
        span = times[1:] - times[0]
        out[1:] = cum / span
    return out


def welfare_report(traj, game, equilibrium):
    """Bundle TSW, equilibrium welfare, normalized TSW, regrets, the
    time-averaged profile, and the slope of a linear fit to the last 20%
    of the running-TSW series (finite-horizon surrogate for the t -> inf
    limit)."""
    profile = getattr(equilibrium, "profile", equilibrium)
    sw_eq = social_welfare(game, profile)
    value = tsw(traj, game)
    norm = welfare_normalizer(game)
    normalized = value / norm if norm > 0 else 0.0
    regrets = [regret(traj, game, k) for k in range(game.player_count)]
    series = running_tsw(traj, game)
    if len(series) < 2:
        slope = 0.0
    else:
        tail = max(2, int(math.ceil(0.2 * len(series))))
        slope = float(np.polyfit(traj.times[-tail:], series[-tail:], 1)[0])
    return WelfareReport(tsw=value, sw_at_equilibrium=sw_eq,
                         normalized_tsw=normalized, regrets=regrets,
                         time_average=time_average(traj),
                         tsw_tail_slope=slope)


def welfare_csv(traj, game, path):
    """Write t,sw,running_tsw rows plus the schema comment."""
    sw = _sw_series(traj, game)
    run = running_tsw(traj, game)
    lines = ["t,sw,running_tsw"]
    for i, t in enumerate(traj.times):
        lines.append(f"{t:.10g},{sw[i]:.17g},{run[i]:.17g}")
    lines.append(SCHEMA_COMMENT)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def monotonicity_report_json(report):
    data = {
        "verdict": report.verdict,
        "weights": report.weights.values.tolist(),
        "certificate": report.certificate,
        "sample_count": report.sample_count,
    }
    if report.witness is not None:
        if isinstance(report.witness, tuple):
            data["witness"] = [[b.tolist() for b in p.blocks]
                               for p in report.witness]
        else:
            data["witness"] = np.asarray(report.witness).tolist()
    return data


def welfare_report_json(report):
    return {
        "tsw": report.tsw,
        "sw_at_equilibrium": report.sw_at_equilibrium,
        "normalized_tsw": report.normalized_tsw,
        "regrets": report.regrets,
        "time_average": [b.tolist() for b in report.time_average.blocks],
        "tsw_tail_slope": report.tsw_tail_slope,
    }
