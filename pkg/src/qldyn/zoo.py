"""Example games, structured families, and seeded random generators.

All constructors are pure functions of their parameters.  Randomness comes
from SplitMix64 (documented below), so identical seeds give bit-identical
games on every platform.
"""

from dataclasses import dataclass, field

import numpy as np

from .game_core import (NormalFormGame, PolymatrixGame, StrategyProfile,
                        WeightVector, as_weights)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea & Flood 2014).

    state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
    output z ^ (z >> 31), all arithmetic mod 2^64.

    Floats take the top 53 bits: next_float() is uniform on [0, 1) and
    next_float_pos() on (0, 1] (safe for logarithms).
    """

    def __init__(self, seed):
        self._state = int(seed) & _MASK64

    def next_u64(self):
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self):
        return (self.next_u64() >> 11) * 2.0 ** -53

    def next_float_pos(self):
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.next_float()

    def fill_uniform(self, shape, lo, hi):
        """C-order array of uniforms; consumption order is documented."""
        out = np.empty(int(np.prod(shape)))
        for i in range(out.size):
            out[i] = self.uniform(lo, hi)
        return out.reshape(shape)


@dataclass(frozen=True)
class RandomGameSpec:
    """Parameters of a random dense game: N players, n actions each,
    i.i.d. uniform payoffs on [lo, hi), seeded."""

    N: int
    n: int
    lo: float = -1.0
    hi: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.lo < self.hi:
            raise ValueError("lo must be < hi")


def mismatching_pennies(M):
    """Three-player pennies cycle: player k observes player k-1 (mod 3)
    through the edge matrix [[0, 1], [M, 0]]."""
    M = float(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    A = np.array([[0.0, 1.0], [M, 0.0]])
    edges = [(k, (k - 1) % 3, A) for k in range(3)]
    return PolymatrixGame([2, 2, 2], edges)


def shapley_network(beta):
    """Three-player, three-action Shapley cycle: u_k = x_k A x_{k-1}
    + x_k B^T x_{k+1} with the classical Shapley A, B at parameter beta."""
    beta = float(beta)
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    A = np.array([[1.0, 0.0, beta],
                  [beta, 1.0, 0.0],
                  [0.0, beta, 1.0]])
    B = np.array([[-beta, 1.0, 0.0],
                  [0.0, -beta, 1.0],
                  [1.0, 0.0, -beta]])
    edges = []
    for k in range(3):
        edges.append((k, (k - 1) % 3, A))
        edges.append((k, (k + 1) % 3, B.T))
    return PolymatrixGame([3, 3, 3], edges)


def random_normal_form(spec):
    """Random dense game from a RandomGameSpec.

    Entry order: player 0's tensor first, filled in C (row-major) order,
    then player 1's, and so on, consuming one SplitMix64 draw per entry.
    """
    rng = SplitMix64(spec.seed)
    shape = (spec.n,) * spec.N
    payoffs = [rng.fill_uniform(shape, spec.lo, spec.hi)
               for _ in range(spec.N)]
    return NormalFormGame(payoffs)


def weighted_zero_sum_cycle(N, n, seed, w=None):
    """Weighted zero-sum polymatrix cycle.

    Forward matrices A^{k,k+1} (indices mod N) get uniform [-1, 1) entries
    in C order for k = 0, 1, ...; each reverse matrix is fixed to
    A^{l,k} = -(w_k/w_l) (A^{k,l})^T, which makes sum_k w_k u_k(x)
    vanish identically.  N = 2 degenerates to a single matrix pair.
    """
    N = int(N)
    if N < 2:
        raise ValueError("N must be >= 2")
    counts = [int(n)] * N
    w = as_weights(w, N)
    rng = SplitMix64(seed)
    edges = {}
    for k in range(N):
        l = (k + 1) % N
        if (k, l) in edges or (l, k) in edges:
            continue
        A = rng.fill_uniform((counts[k], counts[l]), -1.0, 1.0)
        edges[(k, l)] = A
        edges[(l, k)] = -(w[k] / w[l]) * A.T
    game = PolymatrixGame(counts, [(k, l, M) for (k, l), M in edges.items()])
    return game


@dataclass
class WeightedPotentialGame:
    """A weighted potential game in both representations, with its
    potential evaluator: potential(x'_k, x_{-k}) - potential(x_k, x_{-k})
    equals w_k (u_k(x'_k, .) - u_k(x_k, .)) exactly."""

    normal_form: NormalFormGame
    polymatrix: PolymatrixGame
    potential: object = field(repr=False)
    weights: WeightVector = None


def weighted_potential_quadratic(N, n, seed, w=None):
    """Seeded weighted potential game with a concave potential.

    The potential is U(x) = sum_k <c_k, x_k> + sum_{k<l} x_k^T C^{kl} x_l
    with rank-structured cross blocks C^{kl} = u 1^T + 1 v^T, which vanish
    on the tangent space (the only way a pure cross-block quadratic can be
    concave), so U is effectively linear and its maximizer unique.  Player
    payoffs are the 1/w_k-scaled x_k-terms of U, realized as a polymatrix
    game with A^{kl} = C^{kl}/w_k and the linear term folded into player
    k's first outgoing edge.

    Draw order from SplitMix64(seed): c_0..c_{N-1}, then for pairs (k, l)
    in lexicographic order the vectors u then v, all uniform [-1, 1).
    """
    N = int(N)
    if N < 2:
        raise ValueError("N must be >= 2")
    counts = [int(n)] * N
    w = as_weights(w, N)
    rng = SplitMix64(seed)
    c = [rng.fill_uniform((counts[k],), -1.0, 1.0) for k in range(N)]
    cross = {}
    for k in range(N):
        for l in range(k + 1, N):
            u = rng.fill_uniform((counts[k],), -1.0, 1.0)
            v = rng.fill_uniform((counts[l],), -1.0, 1.0)
            C = np.outer(u, np.ones(counts[l])) + np.outer(np.ones(counts[k]), v)
            cross[(k, l)] = C
            cross[(l, k)] = C.T

    edges = {}
    for k in range(N):
        for l in range(N):
            if l == k:
                continue
            edges[(k, l)] = cross[(k, l)] / w[k]
        l0 = 0 if k > 0 else 1
        edges[(k, l0)] = edges[(k, l0)] + np.outer(
            c[k] / w[k], np.ones(counts[l0]))
    poly = PolymatrixGame(counts, [(k, l, M) for (k, l), M in edges.items()])

    def potential(x):
        if isinstance(x, StrategyProfile):
            blocks = x.blocks
        else:
            blocks = x
        val = sum(float(c[k] @ blocks[k]) for k in range(N))
        for k in range(N):
            for l in range(k + 1, N):
                val += float(blocks[k] @ cross[(k, l)] @ blocks[l])
        return val

    return WeightedPotentialGame(normal_form=poly.to_normal_form(),
                                 polymatrix=poly, potential=potential,
                                 weights=w)


def seeded_profiles(action_counts, count, seed):
    """Deterministic interior starting profiles.

    Each profile draws, per player and action, e = -ln(u) with u from
    SplitMix64 on (0, 1], normalized per player (flat Dirichlet).
    """
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        blocks = []
        for nk in action_counts:
            g = np.array([-np.log(rng.next_float_pos()) for _ in range(nk)])
            total = g.sum()
            if total <= 0:  # astronomically unlikely; keep interior anyway
                g = np.ones(nk)
                total = float(nk)
            blocks.append(g / total)
        out.append(StrategyProfile(blocks))
    return out
