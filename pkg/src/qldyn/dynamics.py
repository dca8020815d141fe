"""Learning-dynamics vector fields and a fixed-step RK4 integrator.

Three dynamics are provided: smooth Q-learning on the simplex, replicator
(plain, or with entropy-perturbed rewards), and entropic FTRL integrated
in payoff space.  The integrator runs a compiled batched kernel when the
field is one of the provided classes and falls back to a generic Python
RK4 loop for arbitrary callables.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels
from .game_core import (PerturbedGameView, StrategyProfile, as_temperatures,
                        rewards_matrix)


class IntegrationError(RuntimeError):
    """Raised when a step produces a non-finite state."""

    def __init__(self, message, last_valid_time):
        super().__init__(message)
        self.last_valid_time = last_valid_time


@dataclass(frozen=True)
class IntegratorConfig:
    h: float = 0.01
    t_end: float = 500.0
    record_stride: int = 10
    floor: float = 1e-12
    renormalize: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be > 0")
        if not self.t_end > 0:
            raise ValueError("t_end must be > 0")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if not 0 < self.floor < 1e-6:
            raise ValueError("floor must lie in (0, 1e-6)")

    @property
    def steps(self):
        steps = round(self.t_end / self.h)
        if steps < 1:
            raise ValueError("t_end must cover at least one step")
        return steps


@dataclass(frozen=True)
class Regularizer:
    """Per-player regularizer contract for FTRL.

    value/gradient act on simplex points, choice/conjugate on payoff-space
    vectors; strong_convexity is kappa, lipschitz the gradient Lipschitz
    constant (inf when the gradient blows up at the boundary).
    """

    identifier: str
    value: object = dc_field(repr=False)
    gradient: object = dc_field(repr=False)
    choice: object = dc_field(repr=False)
    conjugate: object = dc_field(repr=False)
    strong_convexity: float = 1.0
    lipschitz: float = math.inf
    scale: float = 1.0


def entropic_choice_map(y, T):
    """softmax(y / T) with max subtraction; requires T > 0."""
    if not T > 0:
        raise ValueError("choice map temperature must be > 0")
    y = np.asarray(y, dtype=np.float64)
    z = y / T
    e = np.exp(z - z.max())
    return e / e.sum()


def entropic_regularizer(tau=1.0):
    """Negative entropy scaled by tau: h(x) = tau * sum x ln x."""
    if not tau > 0:
        raise ValueError("tau must be > 0")

    def value(x):
        x = np.asarray(x, dtype=np.float64)
        return float(tau * np.sum(np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)))

    def gradient(x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0):
            raise ValueError("entropic gradient needs interior x")
        return tau * (np.log(x) + 1.0)

    def conjugate(y):
        y = np.asarray(y, dtype=np.float64) / tau
        m = y.max()
        return float(tau * (m + np.log(np.exp(y - m).sum())))

    return Regularizer(identifier="entropic", value=value, gradient=gradient,
                       choice=lambda y: entropic_choice_map(y, tau),
                       conjugate=conjugate, strong_convexity=tau,
                       lipschitz=math.inf, scale=tau)


def _interior_or_raise(x):
    if not x.interior:
        raise ValueError("field evaluation requires a strictly interior x")


def _split(flat, noff, N):
    return [flat[noff[k]:noff[k + 1]] for k in range(N)]


def ql_field(game, x, T):
    """Smooth Q-learning field, one tangent block per player:
    x_ki (r_ki - <x_k,r_k> - T_k (ln x_ki - <x_k, ln x_k>))."""
    _interior_or_raise(x)
    T = as_temperatures(T, game.player_count)
    pack = game.pack
    noff = pack["noff"]
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    out = []
    for k in range(game.player_count):
        xk = x[k]
        rk = R[noff[k]:noff[k + 1]]
        lk = np.log(xk)
        adv = rk - xk @ rk - T[k] * (lk - xk @ lk)
        out.append(xk * adv)
    return out


def replicator_field(game, x):
    """Replicator field x_ki (r_ki - <x_k, r_k>); pass a PerturbedGameView
    to run replicator on the entropy-perturbed rewards."""
    _interior_or_raise(x)
    pack = game.pack
    noff = pack["noff"]
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    out = []
    for k in range(game.player_count):
        xk = x[k]
        rk = R[noff[k]:noff[k + 1]]
        out.append(xk * (rk - xk @ rk))
    return out


def ftrl_field(game, y, reg):
    """FTRL in payoff space: returns (ydot = r(Q(y)), x = Q(y)).

    y is a flat vector over all players' blocks; reg is one Regularizer
    applied to every player or a per-player sequence.
    """
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("payoff-space state must be finite")
    regs = _per_player_regs(reg, game.player_count)
    pack = game.pack
    noff = pack["noff"]
    if y.shape != (pack["rows"],):
        raise ValueError("payoff-space state has the wrong length")
    xs = [regs[k].choice(y[noff[k]:noff[k + 1]])
          for k in range(game.player_count)]
    x = StrategyProfile(xs)
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    return R, x


def _per_player_regs(reg, N):
    if isinstance(reg, Regularizer):
        return [reg] * N
    regs = list(reg)
    if len(regs) != N:
        raise ValueError(f"expected {N} regularizers, got {len(regs)}")
    return regs


class QLField:
    """Smooth Q-learning flow on a game at fixed temperatures."""

    def __init__(self, game, T):
        self.game = game
        self.temps = as_temperatures(T, game.player_count)

    def __call__(self, x_flat):
        x = StrategyProfile.from_flat(x_flat, self.game.action_counts)
        return np.concatenate(ql_field(self.game, x, self.temps))


class ReplicatorField:
    """Replicator flow; with a PerturbedGameView this is the replicator
    dynamic of the entropy-perturbed game (a distinct evaluation route
    from QLField)."""

    def __init__(self, game):
        self.game = game

    def __call__(self, x_flat):
        x = StrategyProfile.from_flat(x_flat, self.game.action_counts)
        return np.concatenate(replicator_field(self.game, x))


class FTRLField:
    """Entropic-FTRL flow in payoff space."""

    def __init__(self, game, reg):
        self.game = game
        self.regs = _per_player_regs(reg, game.player_count)
        if any(r.identifier != "entropic" for r in self.regs):
            raise ValueError("only the entropic regularizer is shipped")

    @property
    def scales(self):
        return np.array([r.scale for r in self.regs])

    def y_from_profile(self, x):
        """Payoff-space start matching x: y_k = tau_k ln x_k."""
        _interior_or_raise(x)
        return np.concatenate([self.regs[k].scale * np.log(x[k])
                               for k in range(len(self.regs))])

    def __call__(self, y_flat):
        ydot, _ = ftrl_field(self.game, y_flat, self.regs)
        return ydot


@dataclass
class Trajectory:
    """Recorded samples of one integration run.

    states holds the simplex projection at each sample; ystates (FTRL
    only) the payoff-space states.  residual is the sup-norm of the
    simplex-state velocity at the endpoint.
    """

    times: np.ndarray
    states: np.ndarray
    action_counts: tuple
    residual: float
    ystates: np.ndarray = None

    def __len__(self):
        return len(self.times)

    def profile(self, i):
        return StrategyProfile.from_flat(self.states[i], self.action_counts)

    @property
    def final_profile(self):
        return self.profile(len(self.times) - 1)

    @property
    def t_end(self):
        return float(self.times[-1])


def _mode_and_temps(field):
    if isinstance(field, QLField):
        return _kernels.MODE_QL, field.temps.values, field.game
    if isinstance(field, ReplicatorField):
        if isinstance(field.game, PerturbedGameView):
            return (_kernels.MODE_RDH, field.game.temps.values,
                    field.game.game)
        return _kernels.MODE_RD, np.ones(field.game.player_count), field.game
    if isinstance(field, FTRLField):
        return _kernels.MODE_FTRL, field.scales, field.game
    return None


def integrate(field, x0, cfg):
    """Fixed-step RK4 integration of a dynamics field.

    x0 is a StrategyProfile (simplex dynamics, or a matched FTRL start
    mapped through y_k = tau_k ln x_k) or a raw payoff-space vector for
    FTRLField.  Simplex states are clamped to >= cfg.floor and
    renormalized after every step when cfg.renormalize is set.
    """
    steps = cfg.steps
    fast = _mode_and_temps(field)
    if fast is not None:
        mode, temps, game = fast
        if mode == _kernels.MODE_FTRL:
            if isinstance(x0, StrategyProfile):
                y0 = field.y_from_profile(x0)
            else:
                y0 = np.asarray(x0, dtype=np.float64)
                if not np.all(np.isfinite(y0)):
                    raise ValueError("payoff-space start must be finite")
            state0 = y0[:, None]
        else:
            if not isinstance(x0, StrategyProfile):
                x0 = StrategyProfile.from_flat(x0, game.action_counts)
            _interior_or_raise(x0)
            state0 = x0.flat[:, None]
        out = _kernels.integrate_batch(
            game.pack, mode, state0, temps[:, None], cfg.h, steps,
            cfg.record_stride, cfg.floor, int(cfg.renormalize),
            want_traj=True, want_sw=False, want_y=(mode == _kernels.MODE_FTRL))
        if out["status"][0] >= 0:
            bad_step = int(out["status"][0])
            raise IntegrationError(
                f"non-finite state at step {bad_step}",
                last_valid_time=(bad_step - 1) * cfg.h)
        times = out["rec_steps"] * cfg.h
        ys = out["traj_y"][:, :, 0] if mode == _kernels.MODE_FTRL else None
        return Trajectory(times=times, states=out["traj"][:, :, 0],
                          action_counts=tuple(game.action_counts),
                          residual=float(out["resid"][0]), ystates=ys)
    return _integrate_generic(field, x0, cfg)


def _integrate_generic(field, x0, cfg):
    """Python RK4 for arbitrary callables field(flat_state) -> derivative.

    When x0 is a StrategyProfile the state is treated as a simplex state
    (clamped and renormalized per player); a raw vector is integrated
    without projection.
    """
    steps = cfg.steps
    simplex = isinstance(x0, StrategyProfile)
    if simplex:
        counts = x0.action_counts
        noff = np.concatenate(([0], np.cumsum(counts)))
        z = x0.flat
    else:
        counts = None
        z = np.array(x0, dtype=np.float64)
    h = cfg.h

    def clamp(v):
        return np.maximum(v, cfg.floor) if simplex else v

    rec_t = []
    rec_x = []
    f1 = np.asarray(field(z), dtype=np.float64)
    for i in range(steps + 1):
        if i % cfg.record_stride == 0 or i == steps:
            rec_t.append(i * h)
            rec_x.append(z.copy())
        if i == steps:
            break
        f2 = np.asarray(field(clamp(z + (h / 2) * f1)), dtype=np.float64)
        f3 = np.asarray(field(clamp(z + (h / 2) * f2)), dtype=np.float64)
        f4 = np.asarray(field(clamp(z + h * f3)), dtype=np.float64)
        z = z + (h / 6) * (f1 + 2 * (f2 + f3) + f4)
        if simplex:
            z = np.maximum(z, cfg.floor)
            if cfg.renormalize:
                for k in range(len(counts)):
                    s = slice(noff[k], noff[k + 1])
                    z[s] /= z[s].sum()
        if not np.all(np.isfinite(z)):
            raise IntegrationError(f"non-finite state at step {i + 1}",
                                   last_valid_time=i * h)
        f1 = np.asarray(field(z), dtype=np.float64)
    states = np.asarray(rec_x)
    return Trajectory(times=np.asarray(rec_t), states=states,
                      action_counts=tuple(counts) if simplex else
                      (states.shape[1],),
                      residual=float(np.abs(f1).max()))


SCHEMA_COMMENT = "# schema-version: 1"


def trajectory_to_csv(traj, path):
    """Write t,player,action,probability rows plus the schema comment."""
    lines = ["t,player,action,probability"]
    noff = np.concatenate(([0], np.cumsum(traj.action_counts)))
    for i, t in enumerate(traj.times):
        row = traj.states[i]
        for k, nk in enumerate(traj.action_counts):
            for a in range(nk):
                lines.append(f"{t:.10g},{k},{a},{row[noff[k] + a]:.17g}")
    lines.append(SCHEMA_COMMENT)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def trajectory_summary(traj):
    final = traj.final_profile
    return {
        "final_profile": [b.tolist() for b in final.blocks],
        "endpoint_residual": traj.residual,
        "samples": len(traj),
    }
