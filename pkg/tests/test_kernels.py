"""Compiled kernel backend against the pure-numpy reference."""

import os
import subprocess
import sys

import numpy as np
import pytest

from qldyn import _kernels
from qldyn._kernels import pyref
from qldyn.zoo import (RandomGameSpec, random_normal_form, seeded_profiles,
                       weighted_zero_sum_cycle)

try:
    from qldyn._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None,
                                    reason="compiled backend not built")


def batch_states(counts, B, seed):
    profs = seeded_profiles(counts, B, seed)
    return np.stack([p.flat for p in profs], axis=1)


@needs_compiled
def test_rewards_parity_normal_form():
    for N, n in ((2, 3), (3, 3), (4, 2), (5, 5)):
        game = random_normal_form(RandomGameSpec(N=N, n=n, seed=N * 10 + n))
        for B in (1, 3, 8, 13):
            X = batch_states(game.action_counts, B, 0)
            a = _core.rewards_batch(game.pack, X)
            b = pyref.rewards_batch(game.pack, X)
            assert np.abs(a - b).max() < 1e-13


@needs_compiled
def test_rewards_parity_polymatrix():
    game = weighted_zero_sum_cycle(4, 3, seed=6)
    for B in (1, 5, 8, 17):
        X = batch_states(game.action_counts, B, 1)
        a = _core.rewards_batch(game.pack, X)
        b = pyref.rewards_batch(game.pack, X)
        assert np.abs(a - b).max() < 1e-13


@needs_compiled
@pytest.mark.parametrize("mode", [_kernels.MODE_QL, _kernels.MODE_RD,
                                  _kernels.MODE_RDH, _kernels.MODE_FTRL])
def test_integrate_parity_all_modes(mode):
    game = random_normal_form(RandomGameSpec(N=3, n=3, seed=77))
    B = 5
    if mode == _kernels.MODE_FTRL:
        state = np.log(batch_states(game.action_counts, B, 2))
    else:
        state = batch_states(game.action_counts, B, 2)
    T = np.full((3, B), 1.5)
    args = (game.pack, mode, state, T, 0.01, 200, 20, 1e-12, 1)
    a = _core.integrate_batch(*args, want_traj=True, want_sw=True,
                              want_y=(mode == _kernels.MODE_FTRL))
    b = pyref.integrate_batch(*args, want_traj=True, want_sw=True,
                              want_y=(mode == _kernels.MODE_FTRL))
    assert np.abs(a["final"] - b["final"]).max() < 1e-12
    assert np.abs(a["traj"] - b["traj"]).max() < 1e-12
    assert np.abs(a["sw"] - b["sw"]).max() < 1e-12
    assert np.abs(a["resid"] - b["resid"]).max() < 1e-12
    assert np.array_equal(a["status"], b["status"])
    assert np.array_equal(a["rec_steps"], b["rec_steps"])
    if mode == _kernels.MODE_FTRL:
        assert np.abs(a["traj_y"] - b["traj_y"]).max() < 1e-10


@needs_compiled
def test_batch_padding_isolation():
    """Results must not depend on how many columns ride in the batch."""
    game = random_normal_form(RandomGameSpec(N=3, n=4, seed=5))
    X = batch_states(game.action_counts, 11, 3)
    T = np.full((3, 11), 2.0)
    full = _core.integrate_batch(game.pack, _kernels.MODE_QL, X, T,
                                 0.01, 100, 100, 1e-12, 1)
    for c in (0, 7, 10):
        single = _core.integrate_batch(game.pack, _kernels.MODE_QL,
                                       X[:, c:c + 1], T[:, c:c + 1],
                                       0.01, 100, 100, 1e-12, 1)
        assert np.abs(full["final"][:, c] - single["final"][:, 0]).max() == 0.0


@needs_compiled
def test_failing_column_does_not_poison_batch():
    big = 1e200 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    game_bad = random_normal_form(RandomGameSpec(N=2, n=2, seed=1))
    import qldyn.game_core as gc
    game = gc.NormalFormGame([big, -big])
    sane = gc.NormalFormGame([big * 1e-200, -big * 1e-200])
    # same pack, one benign and one exploding temperature column: use the
    # FTRL mode where a huge tau keeps things finite and tau -> 0 blows up
    X = batch_states((2, 2), 2, 4)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _core.integrate_batch(game.pack, _kernels.MODE_RD, X,
                                    np.ones((2, 2)), 0.01, 50, 50, 1e-12, 1)
        ref = _core.integrate_batch(sane.pack, _kernels.MODE_RD, X,
                                    np.ones((2, 2)), 0.01, 50, 50, 1e-12, 1)
    assert np.all(out["status"] >= 0)  # every column of the 1e200 game dies
    assert np.all(ref["status"] == -1)  # the scaled-down twin is fine
    assert np.all(np.isfinite(ref["final"]))


def test_backend_env_selection():
    env = dict(os.environ)
    code = ("import qldyn._kernels as k; print(k.backend_name)")
    env["QLDYN_BACKEND"] = "python"
    got = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert got.stdout.strip() == "python"
    if _core is not None:
        env["QLDYN_BACKEND"] = "compiled"
        got = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        assert got.stdout.strip() == "compiled"
    env["QLDYN_BACKEND"] = "nonsense"
    got = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert got.returncode != 0


def test_pack_contents():
    game = random_normal_form(RandomGameSpec(N=3, n=2, seed=2))
    pack = game.pack
    assert pack["kind"] == "nf"
    assert list(pack["n"]) == [2, 2, 2]
    assert list(pack["noff"]) == [0, 2, 4, 6]
    assert pack["rows"] == 6
    g2 = weighted_zero_sum_cycle(3, 2, 0)
    p2 = g2.pack
    assert p2["kind"] == "poly"
    assert p2["rows"] == 6
