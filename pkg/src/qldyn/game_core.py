"""Finite games: payoff evaluation, rewards, pseudo-gradients, influence.

Two game representations are supported: dense payoff tensors
(NormalFormGame) and pairwise edge matrices (PolymatrixGame).  Both are
immutable after construction and expose the same reward interface.
"""

import numpy as np

from . import _kernels

SIMPLEX_TOL = 1e-12
RENORM_TOL = 1e-9


def _as_float_array(a, name):
    arr = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


class NormalFormGame:
    """Dense payoff tensors, one per player, indexed by the joint action."""

    def __init__(self, payoffs):
        payoffs = [_as_float_array(u, f"payoff tensor {k}")
                   for k, u in enumerate(payoffs)]
        if len(payoffs) < 2:
            raise ValueError("a game needs at least 2 players")
        shape = payoffs[0].shape
        if len(shape) != len(payoffs):
            raise ValueError("tensor rank must equal the player count")
        if any(u.shape != shape for u in payoffs):
            raise ValueError("all payoff tensors must share one shape")
        if any(nk < 2 for nk in shape):
            raise ValueError("every player needs at least 2 actions")
        for u in payoffs:
            u.setflags(write=False)
        self.payoffs = tuple(payoffs)
        self.action_counts = tuple(int(nk) for nk in shape)
        self.player_count = len(shape)
        self._pack = _kernels.make_nf_pack(self.action_counts, self.payoffs)

    @property
    def pack(self):
        return self._pack


class PolymatrixGame:
    """Pairwise bilinear payoffs along directed edges.

    Edges are (k, l, matrix) with matrix shaped (n_k, n_l); a missing
    reverse edge is filled with zeros so payoff flows both ways.
    """

    def __init__(self, action_counts, edges):
        counts = tuple(int(nk) for nk in action_counts)
        if len(counts) < 2:
            raise ValueError("a game needs at least 2 players")
        if any(nk < 2 for nk in counts):
            raise ValueError("every player needs at least 2 actions")
        mats = {}
        for k, l, M in edges:
            k, l = int(k), int(l)
            if not (0 <= k < len(counts)) or not (0 <= l < len(counts)):
                raise ValueError(f"edge ({k},{l}) out of range")
            if k == l:
                raise ValueError("self-edges are not allowed")
            if (k, l) in mats:
                raise ValueError(f"duplicate edge ({k},{l})")
            M = _as_float_array(M, f"edge ({k},{l}) matrix")
            if M.shape != (counts[k], counts[l]):
                raise ValueError(
                    f"edge ({k},{l}) matrix must be "
                    f"{(counts[k], counts[l])}, got {M.shape}")
            mats[(k, l)] = M
        for (k, l) in list(mats):
            if (l, k) not in mats:
                mats[(l, k)] = np.zeros((counts[l], counts[k]))
        for M in mats.values():
            M.setflags(write=False)
        self.action_counts = counts
        self.player_count = len(counts)
        self.edges = {kl: mats[kl] for kl in sorted(mats)}
        self._pack = _kernels.make_poly_pack(
            counts, [(k, l, M) for (k, l), M in self.edges.items()])

    @property
    def pack(self):
        return self._pack

    def to_normal_form(self):
        """Materialize the equivalent dense tensor game."""
        n = self.action_counts
        N = self.player_count
        payoffs = []
        for k in range(N):
            U = np.zeros(n)
            for (a, l), M in self.edges.items():
                if a != k:
                    continue
                shape = [1] * N
                shape[k] = n[k]
                shape[l] = n[l]
                # tensor axes run in player order; blocks store (own, opp)
                block = M if k < l else M.T
                U = U + block.reshape(shape)
            payoffs.append(U)
        return NormalFormGame(payoffs)


class StrategyProfile:
    """One probability vector per player.

    Construction renormalizes inputs whose per-player sum deviates from 1
    by at most 1e-9 and rejects anything worse; entries must be >= 0.
    """

    def __init__(self, blocks):
        fixed = []
        for k, b in enumerate(blocks):
            v = _as_float_array(b, f"strategy block {k}")
            if v.ndim != 1 or v.size < 2:
                raise ValueError(f"strategy block {k} must be a vector "
                                 "with at least 2 entries")
            if np.any(v < 0):
                raise ValueError(f"strategy block {k} has negative entries")
            s = v.sum()
            if abs(s - 1.0) > RENORM_TOL:
                raise ValueError(
                    f"strategy block {k} sums to {s!r}, outside the "
                    f"renormalization tolerance {RENORM_TOL}")
            if abs(s - 1.0) > SIMPLEX_TOL:
                v = v / s
            v.setflags(write=False)
            fixed.append(v)
        if len(fixed) < 2:
            raise ValueError("a profile needs at least 2 players")
        self.blocks = tuple(fixed)
        self.action_counts = tuple(b.size for b in self.blocks)

    @classmethod
    def from_flat(cls, flat, action_counts):
        flat = np.asarray(flat, dtype=np.float64)
        off = np.concatenate(([0], np.cumsum(action_counts)))
        if flat.size != off[-1]:
            raise ValueError("flat length does not match action counts")
        return cls([flat[off[k]:off[k + 1]] for k in range(len(action_counts))])

    @classmethod
    def uniform(cls, action_counts):
        return cls([np.full(nk, 1.0 / nk) for nk in action_counts])

    @property
    def flat(self):
        return np.concatenate(self.blocks)

    @property
    def interior(self):
        return all(np.all(b > 0) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, k):
        return self.blocks[k]

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=6) for b in self.blocks)
        return f"StrategyProfile({inner})"


class TemperatureVector:
    """Per-player exploration rates T_k >= 0."""

    def __init__(self, values):
        v = _as_float_array(values, "temperatures")
        if v.ndim != 1:
            raise ValueError("temperatures must be a vector")
        if np.any(v < 0):
            raise ValueError("temperatures must be >= 0")
        v.setflags(write=False)
        self.values = v

    @classmethod
    def constant(cls, T, player_count):
        return cls(np.full(player_count, float(T)))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


class WeightVector:
    """Per-player positive weights w_k > 0."""

    def __init__(self, values):
        v = _as_float_array(values, "weights")
        if v.ndim != 1:
            raise ValueError("weights must be a vector")
        if np.any(v <= 0):
            raise ValueError("weights must be > 0")
        v.setflags(write=False)
        self.values = v

    @classmethod
    def ones(cls, player_count):
        return cls(np.ones(player_count))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


class PerturbedGameView:
    """Entropy-perturbed game: rewards r_k - T_k (ln x_k + 1), T_k > 0."""

    def __init__(self, game, temps):
        temps = as_temperatures(temps, game.player_count)
        if np.any(temps.values <= 0):
            raise ValueError("perturbed view requires all T_k > 0")
        self.game = game
        self.temps = temps
        self.action_counts = game.action_counts
        self.player_count = game.player_count

    @property
    def pack(self):
        return self.game.pack


def as_temperatures(T, player_count):
    if isinstance(T, TemperatureVector):
        t = T
    elif np.isscalar(T):
        t = TemperatureVector.constant(T, player_count)
    else:
        t = TemperatureVector(T)
    if len(t) != player_count:
        raise ValueError(f"expected {player_count} temperatures, got {len(t)}")
    return t


def as_weights(w, player_count):
    if w is None:
        return WeightVector.ones(player_count)
    if not isinstance(w, WeightVector):
        w = WeightVector(w)
    if len(w) != player_count:
        raise ValueError(f"expected {player_count} weights, got {len(w)}")
    return w


def _check_profile(game, x):
    if x.action_counts != tuple(game.action_counts):
        raise ValueError(f"profile shape {x.action_counts} does not match "
                         f"game shape {tuple(game.action_counts)}")


def rewards_matrix(game, X):
    """All players' rewards for a batch of flat states X (rows, B).

    Accepts NormalFormGame, PolymatrixGame, or PerturbedGameView (which
    adds the entropic perturbation -T_k (ln x_k + 1) per player block).
    """
    if isinstance(game, PerturbedGameView):
        base = game.game
        R = _kernels.rewards_batch(base.pack, X)
        noff = base.pack["noff"]
        with np.errstate(divide="ignore"):
            L = np.log(X)
        for k in range(base.player_count):
            s = slice(noff[k], noff[k + 1])
            R[s] -= game.temps[k] * (L[s] + 1.0)
        return R
    return _kernels.rewards_batch(game.pack, X)


def reward_vector(game, x, k):
    """Expected reward of each of player k's actions at profile x."""
    _check_profile(game, x)
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    noff = game.pack["noff"]
    return R[noff[k]:noff[k + 1]]


def payoff(game, x, k):
    """Expected payoff of player k at profile x: <x_k, r_k(x)>."""
    return float(x[k] @ reward_vector(game, x, k))


def perturbed_reward(view, x, k):
    """Rewards of the entropy-perturbed game: r_k - T_k (ln x_k + 1)."""
    if not isinstance(view, PerturbedGameView):
        raise TypeError("perturbed_reward expects a PerturbedGameView")
    if np.any(x[k] <= 0):
        raise ValueError("perturbed rewards need a strictly interior x_k")
    return reward_vector(view, x, k)


def pseudo_gradient(game, x, w=None):
    """Concatenation of -w_k r_k(x) over players (w defaults to ones)."""
    _check_profile(game, x)
    w = as_weights(w, game.player_count)
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    noff = game.pack["noff"]
    out = np.empty_like(R)
    for k in range(game.player_count):
        out[noff[k]:noff[k + 1]] = -w[k] * R[noff[k]:noff[k + 1]]
    return out


def influence_bound(game):
    """Largest reward change a single opponent's action switch can cause."""
    if isinstance(game, PolymatrixGame):
        delta = 0.0
        for M in game.edges.values():
            if M.size:
                delta = max(delta,
                            float((M.max(axis=1) - M.min(axis=1)).max()))
        return delta
    if not isinstance(game, NormalFormGame):
        raise TypeError("influence_bound expects a game, not a view")
    delta = 0.0
    for k, U in enumerate(game.payoffs):
        for l in range(game.player_count):
            if l == k:
                continue
            delta = max(delta,
                        float((U.max(axis=l) - U.min(axis=l)).max()))
    return delta


def social_welfare(game, x):
    """Sum of all players' payoffs at profile x."""
    _check_profile(game, x)
    R = rewards_matrix(game, x.flat[:, None])[:, 0]
    return float(x.flat @ R)


def game_to_json(game):
    """Serializable dict for the game file format."""
    if isinstance(game, NormalFormGame):
        return {
            "type": "normal_form",
            "action_counts": list(game.action_counts),
            "payoffs": [u.tolist() for u in game.payoffs],
        }
    if isinstance(game, PolymatrixGame):
        return {
            "type": "polymatrix",
            "action_counts": list(game.action_counts),
            "edges": [
                {"from": k, "to": l, "matrix": M.tolist()}
                for (k, l), M in game.edges.items()
            ],
        }
    raise TypeError(f"cannot serialize {type(game).__name__}")


def game_from_json(data):
    """Inverse of game_to_json; validates the declared type tag."""
    kind = data.get("type")
    if kind == "normal_form":
        return NormalFormGame(data["payoffs"])
    if kind == "polymatrix":
        counts = data["action_counts"]
        edges = [(e["from"], e["to"], e["matrix"]) for e in data["edges"]]
        return PolymatrixGame(counts, edges)
    raise ValueError(f"unknown game type: {kind!r}")
