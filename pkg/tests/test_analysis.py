"""Divergence monitors, monotonicity certificates, regret and welfare
against hand-computed and identity-based oracles."""

import math

import numpy as np
import pytest

from qldyn.analysis import (bregman_divergence, fenchel_coupling,
                            monotonicity_exact_polymatrix,
                            monotonicity_report_json, monotonicity_sampled,
                            perturbed_monotonicity_margin, regret,
                            running_tsw, time_average, tsw, weighted_kl,
                            welfare_csv, welfare_normalizer, welfare_report,
                            welfare_report_json)
from qldyn.dynamics import (FTRLField, IntegratorConfig, QLField,
                            ReplicatorField, entropic_regularizer, integrate)
from qldyn.equilibrium import qre_solve
from qldyn.game_core import (NormalFormGame, PerturbedGameView,
                             PolymatrixGame, StrategyProfile, WeightVector,
                             pseudo_gradient, social_welfare)
from qldyn.zoo import (RandomGameSpec, random_normal_form, seeded_profiles,
                       weighted_potential_quadratic, weighted_zero_sum_cycle)


def test_weighted_kl_hand_values():
    x = StrategyProfile([[0.5, 0.5], [0.25, 0.75]])
    y = StrategyProfile([[0.25, 0.75], [0.25, 0.75]])
    want = 0.5 * math.log(2.0) + 0.5 * math.log(0.5 / 0.75)
    assert abs(weighted_kl(x, y) - want) < 1e-12
    assert abs(weighted_kl(x, y, [2.0, 5.0]) - 2 * want) < 1e-12
    assert weighted_kl(x, x) == 0.0


def test_weighted_kl_boundary_rules():
    # zero mass in x contributes nothing
    x = StrategyProfile([[1.0, 0.0], [0.5, 0.5]])
    y = StrategyProfile([[0.5, 0.5], [0.5, 0.5]])
    assert abs(weighted_kl(x, y) - math.log(2.0)) < 1e-12
    # positive x mass where y vanishes diverges
    z = StrategyProfile([[0.5, 0.5], [1.0, 0.0]])
    assert weighted_kl(y, z) == math.inf


def test_bregman_divergence_is_kl_for_entropy():
    rng = np.random.default_rng(0)
    counts = (3, 4)
    for tau in (0.5, 1.0, 2.0):
        reg = entropic_regularizer(tau)
        for _ in range(30):
            a = rng.random(7) + 1e-3
            b = rng.random(7) + 1e-3
            x = StrategyProfile([a[:3] / a[:3].sum(), a[3:] / a[3:].sum()])
            y = StrategyProfile([b[:3] / b[:3].sum(), b[3:] / b[3:].sum()])
            w = WeightVector(rng.random(2) + 0.5)
            got = bregman_divergence(x, y, reg, w)
            want = tau * weighted_kl(y, x, w)
            assert abs(got - want) < 1e-12


def test_fenchel_coupling_properties():
    reg = entropic_regularizer(1.0)
    x = StrategyProfile([[0.2, 0.8], [0.4, 0.3, 0.3]])
    # h*(0) = ln n_k
    zero = np.zeros(5)
    u = StrategyProfile.uniform((2, 3))
    want = (reg.value(u[0]) + math.log(2)) + (reg.value(u[1]) + math.log(3))
    assert abs(fenchel_coupling(u, zero, reg) - want) < 1e-12
    # coupling vanishes at the matched pair y = ln x
    y = np.log(x.flat)
    assert abs(fenchel_coupling(x, y, reg)) < 1e-12
    # and is nonnegative everywhere
    rng = np.random.default_rng(1)
    for _ in range(25):
        yr = rng.standard_normal(5) * 2
        assert fenchel_coupling(x, yr, reg) > -1e-12


def test_fenchel_coupling_tracks_kl_along_ftrl():
    """Along entropic FTRL the coupling to any fixed x equals
    tau * KL(x || Q(y)) plus a constant only when tau = 1; check the
    direct identity C(x, y) = h(x) + h*(y) - <x, y> numerically against
    weighted KL at the induced point."""
    game = random_normal_form(RandomGameSpec(N=2, n=3, seed=9))
    f = FTRLField(game, entropic_regularizer(1.0))
    x_ref = seeded_profiles(game.action_counts, 1, 5)[0]
    x0 = seeded_profiles(game.action_counts, 1, 6)[0]
    traj = integrate(f, x0, IntegratorConfig(h=0.01, t_end=3.0,
                                             record_stride=30))
    reg = entropic_regularizer(1.0)
    for i in range(len(traj)):
        y = traj.ystates[i]
        xq = traj.profile(i)
        got = fenchel_coupling(x_ref, y, reg)
        # for tau=1 entropic: C(x, y) = KL(x || Q(y)) when y is the exact
        # dual of Q(y); the integrator keeps y unprojected so the identity
        # holds up to the logsumexp offset, which cancels per player
        want = weighted_kl(x_ref, xq)
        assert abs(got - want) < 1e-9


def test_monotone_two_player_zero_sum_certificate_zero():
    A = np.array([[1.0, -2.0], [0.5, 3.0]])
    g = PolymatrixGame([2, 2], [(0, 1, A), (1, 0, -A.T)])
    rep = monotonicity_exact_polymatrix(g)
    assert rep.verdict == "weighted_monotone"
    assert abs(rep.certificate) < 1e-10
    data = monotonicity_report_json(rep)
    assert data["verdict"] == "weighted_monotone"


def test_coordination_game_refuted_with_witness():
    I2 = np.eye(2)
    g = PolymatrixGame([2, 2], [(0, 1, I2), (1, 0, I2)])
    rep = monotonicity_exact_polymatrix(g)
    assert rep.verdict == "not_monotone"
    assert rep.certificate < -1e-10
    assert rep.witness is not None
    # witness direction realizes the negative quadratic form
    z = np.asarray(rep.witness)
    M = np.zeros((4, 4))
    M[:2, 2:] = I2
    M[2:, :2] = I2
    S = -(M + M.T) / 2.0
    assert z @ S @ z < -1e-10
    assert abs(z[:2].sum()) < 1e-12 and abs(z[2:].sum()) < 1e-12


def test_weight_grid_search_recovers_scaling():
    """A cycle that is zero-sum only under weights (1, 2, 4) must be
    certified via the weight grid, not the all-ones default."""
    g = weighted_zero_sum_cycle(3, 3, seed=2, w=[1.0, 2.0, 4.0])
    ones = monotonicity_exact_polymatrix(g, [1.0, 1.0, 1.0])
    assert ones.verdict == "not_monotone"
    rep = monotonicity_exact_polymatrix(g)
    assert rep.verdict == "weighted_monotone"
    w = rep.weights.values
    assert abs(w[1] / w[0] - 2.0) < 1e-12
    assert abs(w[2] / w[0] - 4.0) < 1e-12


def test_exact_checker_rejects_dense_games():
    g = random_normal_form(RandomGameSpec(N=2, n=2, seed=3))
    with pytest.raises(TypeError):
        monotonicity_exact_polymatrix(g)


def test_sampled_checker_refutes_coordination():
    I2 = np.eye(2)
    g = PolymatrixGame([2, 2], [(0, 1, I2), (1, 0, I2)])
    rep = monotonicity_sampled(g, pair_count=500, seed=0)
    assert rep.verdict == "not_monotone"
    assert rep.sample_count == 500
    x, y = rep.witness
    d = pseudo_gradient(g, x) - pseudo_gradient(g, y)
    margin = float(d @ (x.flat - y.flat))
    assert abs(margin - rep.certificate) < 1e-12
    assert margin < -1e-9


def test_sampled_checker_inconclusive_on_zero_sum():
    A = np.array([[1.0, -2.0], [0.5, 3.0]])
    g = PolymatrixGame([2, 2], [(0, 1, A), (1, 0, -A.T)])
    rep = monotonicity_sampled(g, pair_count=400, seed=1)
    assert rep.verdict == "inconclusive"
    assert rep.certificate > -1e-10


def test_sampled_checker_deterministic():
    g = weighted_zero_sum_cycle(3, 3, 7)
    a = monotonicity_sampled(g, pair_count=200, seed=3)
    b = monotonicity_sampled(g, pair_count=200, seed=3)
    assert a.certificate == b.certificate


def test_perturbed_margin_matches_view_gradient():
    game = random_normal_form(RandomGameSpec(N=3, n=3, seed=11))
    view = PerturbedGameView(game, 1.3)
    profs = seeded_profiles(game.action_counts, 2, 8)
    x, y = profs
    w = WeightVector([1.0, 2.0, 0.5])
    got = perturbed_monotonicity_margin(game, x, y, w, 1.3)
    d = pseudo_gradient(view, x, w) - pseudo_gradient(view, y, w)
    want = float(d @ (x.flat - y.flat))
    assert abs(got - want) < 1e-10


def test_perturbed_margin_positive_above_threshold_on_monotone_base():
    """Entropy perturbation of a monotone game is strictly monotone:
    margins stay positive for distinct interior pairs."""
    g = weighted_zero_sum_cycle(3, 3, 7)
    profs = seeded_profiles(g.action_counts, 40, 2)
    for i in range(20):
        x, y = profs[2 * i], profs[2 * i + 1]
        m = perturbed_monotonicity_margin(g, x, y, None, 0.5)
        assert m > 0.0


def make_traj(states, times, counts):
    from qldyn.dynamics import Trajectory
    return Trajectory(times=np.asarray(times, dtype=float),
                      states=np.asarray(states, dtype=float),
                      action_counts=tuple(counts), residual=0.0)


def test_regret_constant_trajectory_oracle():
    game = random_normal_form(RandomGameSpec(N=2, n=3, seed=13))
    x = StrategyProfile([[0.2, 0.5, 0.3], [0.6, 0.2, 0.2]])
    times = np.linspace(0.0, 8.0, 33)
    traj = make_traj(np.tile(x.flat, (33, 1)), times, (3, 3))
    from qldyn.game_core import reward_vector
    for k in range(2):
        r = reward_vector(game, x, k)
        want = 8.0 * (r.max() - float(x[k] @ r))
        assert abs(regret(traj, game, k) - want) < 1e-10
        assert regret(traj, game, k) >= 0.0
        half = regret(traj, game, k, t_max=4.0)
        assert abs(half - want / 2) < 1e-10


def test_time_average_and_tsw_two_sample_oracle():
    game = NormalFormGame([np.array([[2.0, 0.0], [0.0, 0.0]]),
                           np.array([[1.0, 0.0], [0.0, 0.0]])])
    a = np.array([1.0, 0.0, 1.0, 0.0])
    b = np.array([0.0, 1.0, 0.0, 1.0])
    traj = make_traj([a, b], [0.0, 2.0], (2, 2))
    mu = time_average(traj)
    assert np.abs(mu.flat - 0.5).max() < 1e-12
    # SW interpolates 3 -> 0 linearly in the product, but the trapezoid
    # rule only sees the endpoint values
    assert abs(tsw(traj, game) - (3.0 + 0.0) / 2.0) < 1e-12
    run = running_tsw(traj, game)
    assert run[0] == 3.0
    assert abs(run[-1] - 1.5) < 1e-12


def test_single_sample_trajectory_edge():
    game = NormalFormGame([np.ones((2, 2)), np.ones((2, 2))])
    x = StrategyProfile([[0.5, 0.5], [0.5, 0.5]])
    traj = make_traj([x.flat], [0.0], (2, 2))
    assert abs(tsw(traj, game) - 2.0) < 1e-12
    assert np.abs(time_average(traj).flat - x.flat).max() == 0.0


def test_welfare_normalizer_enumeration():
    U0 = np.array([[1.0, -4.0], [2.0, 0.5]])
    U1 = np.array([[2.0, 1.0], [-3.0, 0.25]])
    game = NormalFormGame([U0, U1])
    assert abs(welfare_normalizer(game) - np.abs(U0 + U1).max()) < 1e-15
    zero = NormalFormGame([np.zeros((2, 2)), np.zeros((2, 2))])
    assert welfare_normalizer(zero) == 0.0
    poly = weighted_zero_sum_cycle(3, 2, 4)
    dense = poly.to_normal_form()
    assert abs(welfare_normalizer(poly) - welfare_normalizer(dense)) < 1e-12


def test_welfare_report_fields_and_bounds():
    game = random_normal_form(RandomGameSpec(N=3, n=3, seed=19))
    sol = qre_solve(game, 1.0)
    assert sol.converged
    x0 = seeded_profiles(game.action_counts, 1, 0)[0]
    traj = integrate(QLField(game, 1.0), x0,
                     IntegratorConfig(h=0.01, t_end=50.0, record_stride=10))
    rep = welfare_report(traj, game, sol)
    assert -1.0 <= rep.normalized_tsw <= 1.0
    assert abs(rep.sw_at_equilibrium - social_welfare(game, sol.profile)) < 1e-12
    assert abs(rep.tsw - tsw(traj, game)) == 0.0
    assert len(rep.regrets) == 3
    assert rep.time_average.action_counts == (3, 3, 3)
    # converged run: the running TSW has settled, so the tail is flat
    assert abs(rep.tsw_tail_slope) < 1e-2
    data = welfare_report_json(rep)
    assert set(data) == {"tsw", "sw_at_equilibrium", "normalized_tsw",
                         "regrets", "time_average", "tsw_tail_slope"}


def test_welfare_csv_golden(tmp_path):
    game = NormalFormGame([np.ones((2, 2)), np.zeros((2, 2))])
    x = StrategyProfile([[0.5, 0.5], [0.5, 0.5]])
    traj = make_traj([x.flat, x.flat, x.flat], [0.0, 1.0, 2.0], (2, 2))
    path = tmp_path / "w.csv"
    welfare_csv(traj, game, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,sw,running_tsw"
    assert lines[-1] == "# schema-version: 1"
    assert len(lines) == 5
    t, sw, run = lines[1].split(",")
    assert float(sw) == 1.0 and float(run) == 1.0


def test_running_tsw_final_matches_tsw():
    game = random_normal_form(RandomGameSpec(N=2, n=2, seed=23))
    x0 = seeded_profiles(game.action_counts, 1, 1)[0]
    traj = integrate(ReplicatorField(game), x0,
                     IntegratorConfig(h=0.01, t_end=5.0, record_stride=10))
    run = running_tsw(traj, game)
    assert abs(run[-1] - tsw(traj, game)) < 1e-12
