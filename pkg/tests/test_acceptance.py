"""Acceptance gate: one test per shipped numerical claim, in order.

Criteria 1 and 13 run through the command-line interface and leave their
CSV outputs under artifacts/ for the plotting package to consume.
"""

import csv
import json
import time
from pathlib import Path

import numpy as np
import pytest

from qldyn import (
    IntegratorConfig,
    NormalFormGame,
    PerturbedGameView,
    PolymatrixGame,
    QLField,
    RandomGameSpec,
    ReplicatorField,
    FTRLField,
    StrategyProfile,
    entropic_regularizer,
    influence_bound,
    integrate,
    mismatching_pennies,
    monotonicity_exact_polymatrix,
    monotonicity_sampled,
    pseudo_gradient,
    qre_residual,
    qre_solve,
    random_normal_form,
    regret,
    seeded_profiles,
    shapley_network,
    social_welfare,
    time_average,
    tsw,
    weighted_potential_quadratic,
    weighted_zero_sum_cycle,
)
from qldyn.cli import main as cli_main

ARTIFACTS = Path(__file__).resolve().parents[1] / "artifacts"
CFG = IntegratorConfig(h=0.01, t_end=500.0, record_stride=10)


@pytest.fixture(scope="module")
def high_temp_run():
    """Criterion-1 run, shared with criterion 2: QL on Mismatching
    Pennies M=2 at T=4.4 (above the 2*(3-1)=4 contraction threshold),
    through the CLI so the trajectory CSVs land in artifacts/."""
    out = ARTIFACTS / "high_temp_trajectories"
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    rc = cli_main(["simulate", "--game", "mismatching:M=2",
                   "--temps", "4.4", "--inits", "3", "--seed", "0",
                   "--out", str(out)])
    elapsed = time.monotonic() - t0
    assert rc == 0
    summary = json.loads((out / "summary.json").read_text())
    return summary, elapsed


def test_c01_contraction_regime_unique_limit(high_temp_run):
    summary, elapsed = high_temp_run
    runs = summary["runs"]
    assert len(runs) == 3
    ends = [np.asarray(r["endpoint"]) for r in runs]
    gap = max(np.abs(a - b).max() for i, a in enumerate(ends)
              for b in ends[i + 1:])
    resid = max(r["qre_residual"] for r in runs)
    assert gap < 1e-4, f"endpoints spread {gap:.3e}"
    assert resid < 1e-6, f"worst qre residual {resid:.3e}"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"


def test_c02_kl_descent_along_contraction_run(high_temp_run):
    summary, _ = high_temp_run
    worst = -np.inf
    for run in summary["runs"]:
        values = np.asarray(run["lyapunov"]["value"])
        assert len(values) > 100
        worst = max(worst, float(np.diff(values).max()))
    assert worst < 1e-7, f"largest KL increase {worst:.3e}"


def test_c03_zero_sum_network_converges_at_any_temperature():
    game = weighted_zero_sum_cycle(3, 3, 45)
    starts = seeded_profiles(game.action_counts, 3, 0)
    worst = 0.0
    for T in (0.01, 0.1, 1.0):
        for x0 in starts:
            traj = integrate(QLField(game, T), x0, CFG)
            worst = max(worst, qre_residual(game, traj.final_profile, T))
    assert worst < 1e-5, f"worst endpoint residual {worst:.3e}"


def test_c04_potential_game_converges_at_any_temperature():
    wpg = weighted_potential_quadratic(3, 3, 7)
    game = wpg.polymatrix
    x0 = seeded_profiles(game.action_counts, 1, 0)[0]
    worst = 0.0
    for T in (0.05, 1.0):
        sol = qre_solve(game, T)
        assert sol.converged
        traj = integrate(QLField(game, T), x0, CFG)
        gap = np.abs(traj.final_profile.flat - sol.profile.flat).max()
        worst = max(worst, float(gap))
    assert worst < 1e-5, f"worst endpoint-vs-solver gap {worst:.3e}"


def test_c05_low_temperature_cycling_resists_convergence():
    game = shapley_network(0.5)
    sol = qre_solve(game, 0.01)
    assert sol.converged
    dists = []
    for x0 in seeded_profiles(game.action_counts, 3, 0):
        traj = integrate(QLField(game, 0.01), x0, CFG)
        dists.append(np.abs(traj.final_profile.flat - sol.profile.flat).max())
    assert max(dists) > 0.05, f"endpoint distances {dists}"


def test_c06_q_learning_matches_replicator_on_perturbed_game():
    cfg = IntegratorConfig(h=0.01, t_end=50.0, record_stride=10)
    shapes = [(2, 3), (3, 2), (3, 3), (2, 2), (4, 2)]
    worst = 0.0
    for seed, (N, n) in enumerate(shapes):
        game = random_normal_form(RandomGameSpec(N=N, n=n, seed=seed))
        x0 = seeded_profiles(game.action_counts, 1, seed)[0]
        ql = integrate(QLField(game, 0.8), x0, cfg)
        rd = integrate(ReplicatorField(PerturbedGameView(game, 0.8)),
                       x0, cfg)
        worst = max(worst, float(np.abs(ql.states - rd.states).max()))
    assert worst < 1e-8, f"sup-norm gap {worst:.3e}"


def test_c07_entropic_ftrl_projects_onto_replicator():
    cfg = IntegratorConfig(h=0.01, t_end=50.0, record_stride=10)
    reg = entropic_regularizer(1.0)
    worst = 0.0
    for seed in range(5):
        game = random_normal_form(RandomGameSpec(N=2, n=2, seed=seed))
        x0 = seeded_profiles(game.action_counts, 1, 10 + seed)[0]
        ftrl = integrate(FTRLField(game, reg), x0, cfg)
        rd = integrate(ReplicatorField(game), x0, cfg)
        worst = max(worst, float(np.abs(ftrl.states - rd.states).max()))
    assert worst < 1e-6, f"sup-norm gap {worst:.3e}"


def test_c08_replicator_conserves_kl_in_matching_pennies():
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    game = NormalFormGame([A, -A])
    x0 = StrategyProfile([np.array([0.35, 0.65]), np.array([0.7, 0.3])])
    cfg = IntegratorConfig(h=0.01, t_end=100.0, record_stride=10)
    traj = integrate(ReplicatorField(game), x0, cfg)
    # sum_k KL(uniform || x_k) = -2 ln 2 - 0.5 * sum_i ln x_i
    series = -2.0 * np.log(2.0) - 0.5 * np.log(traj.states).sum(axis=1)
    drift = float(series.max() - series.min())
    assert drift < 1e-6, f"KL drift {drift:.3e}"


def _payoff_oracle(payoffs, blocks, k):
    """Multilinear payoff from the raw tensor, independent of the
    library's reward contraction (valid off the simplex)."""
    letters = "abcdefgh"[:len(blocks)]
    sub = letters + "," + ",".join(letters) + "->"
    return float(np.einsum(sub, payoffs[k], *blocks))


def test_c09_pseudo_gradient_matches_finite_differences():
    games = [
        random_normal_form(RandomGameSpec(N=2, n=3, seed=0)),
        random_normal_form(RandomGameSpec(N=3, n=2, seed=1)),
        random_normal_form(RandomGameSpec(N=3, n=3, seed=2)),
        weighted_zero_sum_cycle(3, 3, 3),
        shapley_network(0.5),
    ]
    h = 1e-5
    worst = 0.0
    for gi, game in enumerate(games):
        nf = game.to_normal_form() if isinstance(game, PolymatrixGame) \
            else game
        for x in seeded_profiles(game.action_counts, 20, 100 + gi):
            F = pseudo_gradient(game, x)
            fd = []
            for k, nk in enumerate(game.action_counts):
                for i in range(nk):
                    plus = [b.copy() for b in x.blocks]
                    minus = [b.copy() for b in x.blocks]
                    plus[k][i] += h
                    minus[k][i] -= h
                    du = (_payoff_oracle(nf.payoffs, plus, k)
                          - _payoff_oracle(nf.payoffs, minus, k)) / (2 * h)
                    fd.append(-du)
            err = np.abs(np.asarray(fd) - F).max()
            worst = max(worst, float(err / max(np.abs(F).max(), 1e-12)))
    assert worst < 1e-6, f"worst relative error {worst:.3e}"


def test_c10_monotonicity_certificates():
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    zs = PolymatrixGame([2, 2], [(0, 1, A), (1, 0, -A.T)])
    rep = monotonicity_exact_polymatrix(zs)
    assert rep.verdict == "weighted_monotone"
    assert abs(rep.certificate) < 1e-10

    coord = PolymatrixGame([2, 2], [(0, 1, np.eye(2)), (1, 0, np.eye(2))])
    rep = monotonicity_exact_polymatrix(coord)
    assert rep.verdict == "not_monotone"
    assert rep.certificate < -1e-10
    assert rep.witness is not None

    rep = monotonicity_exact_polymatrix(weighted_zero_sum_cycle(3, 3, 45))
    assert rep.verdict == "weighted_monotone"
    wpg = weighted_potential_quadratic(3, 3, 7)
    rep = monotonicity_exact_polymatrix(wpg.polymatrix, w=wpg.weights)
    assert rep.verdict == "weighted_monotone"

    game = random_normal_form(RandomGameSpec(N=3, n=3, seed=0))
    T = 1.1 * influence_bound(game) * (game.player_count - 1)
    rep = monotonicity_sampled(PerturbedGameView(game, T),
                               pair_count=10_000, seed=0)
    assert rep.sample_count == 10_000
    assert rep.certificate >= -1e-9, f"margin {rep.certificate:.3e}"


def test_c11_time_averaged_welfare_beats_average_point():
    game = weighted_zero_sum_cycle(3, 3, 45, w=[1.0, 2.0, 4.0])
    x0 = seeded_profiles(game.action_counts, 1, 0)[0]
    traj = integrate(ReplicatorField(game), x0, CFG)
    realized = tsw(traj, game)
    at_mean = social_welfare(game, time_average(traj))
    assert realized >= at_mean - 0.01, \
        f"tsw {realized:.6f} vs sw(mean) {at_mean:.6f}"


def test_c12_welfare_drops_from_low_to_high_temperature():
    game = mismatching_pennies(3)
    starts = seeded_profiles(game.action_counts, 3, 0)
    means = {}
    for T in (0.1, 3.0):
        vals = [tsw(integrate(QLField(game, T), x0, CFG), game)
                for x0 in starts]
        means[T] = float(np.mean(vals))
    assert means[0.1] > means[3.0], f"means {means}"


def test_c13_welfare_trend_across_random_game_ensemble():
    ARTIFACTS.mkdir(parents=True, exist_ok=True)
    out = ARTIFACTS / "welfare_sweep.csv"
    t0 = time.monotonic()
    rc = cli_main(["sweep", "--game", "random:N=5,n=5,seed=0,count=35",
                   "--temps", "0.05,0.1,0.2,0.4,0.8,1.6,3.2,6.4",
                   "--inits", "10", "--seed", "0", "--out", str(out)])
    elapsed = time.monotonic() - t0
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[-1] == "# schema-version: 1"
    rows = list(csv.reader(lines[1:-1]))
    assert len(rows) == 35 * 8
    values = np.asarray([float(r[2]) for r in rows])
    assert np.all(np.isfinite(values))
    assert np.all(values >= -1.0) and np.all(values <= 1.0)

    temps = sorted({float(r[1]) for r in rows})
    assert len(temps) == 8
    means = [np.mean([float(r[2]) for r in rows if float(r[1]) == T])
             for T in temps]
    # Spearman rank correlation of the 8 (T, mean) pairs
    rt = np.argsort(np.argsort(temps)).astype(float)
    rm = np.argsort(np.argsort(means)).astype(float)
    rho = float(np.corrcoef(rt, rm)[0, 1])
    assert rho < 0.0, f"Spearman {rho:+.3f}, means {means}"
    assert elapsed < 900.0, f"took {elapsed:.0f}s"


def test_c14_regret_rate_decays_on_shapley_cycle():
    game = shapley_network(0.5)
    view = PerturbedGameView(game, 0.1)
    for x0 in seeded_profiles(game.action_counts, 3, 0):
        traj = integrate(QLField(game, 0.1), x0, CFG)
        r50 = max(regret(traj, view, k, t_max=50.0) for k in range(3))
        r500 = max(regret(traj, view, k) for k in range(3))
        assert r50 > 0 and r500 > 0
        ratio = (r500 / 500.0) / (r50 / 50.0)
        assert ratio < 0.5, f"rate ratio {ratio:.3f}"
