"""Command-line harness: simulations, temperature sweeps, QRE solves,
monotonicity checks, and influence bounds, emitting CSV/JSON artifacts.

Exit codes: 0 success, 2 configuration/parse error, 3 numeric failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _kernels
from .analysis import (monotonicity_exact_polymatrix, monotonicity_report_json,
                       monotonicity_sampled, regret, tsw, welfare_normalizer)
from .dynamics import (SCHEMA_COMMENT, FTRLField, IntegrationError,
                       IntegratorConfig, QLField, ReplicatorField,
                       entropic_regularizer, integrate, trajectory_to_csv)
from .equilibrium import qre_residual, qre_solve, solution_to_json, solve_batch
from .game_core import (PerturbedGameView, PolymatrixGame, StrategyProfile,
                        game_from_json, game_to_json, influence_bound,
                        social_welfare)
from .zoo import (RandomGameSpec, mismatching_pennies, random_normal_form,
                  seeded_profiles, shapley_network,
                  weighted_potential_quadratic, weighted_zero_sum_cycle)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class CliError(Exception):
    """Configuration or parse problem; maps to exit code 2."""


_DEFAULTS = {
    "game": None,
    "dynamic": "ql",
    "temps": [1.0],
    "inits": 3,
    "seed": 0,
    "t_end": 500.0,
    "step": 0.01,
    "stride": 10,
    "floor": 1e-12,
    "out": None,
    "jobs": None,
    "samples": 10_000,
}


def _parse_kv(body, casts, selector):
    out = {}
    for part in body.split(","):
        if not part:
            continue
        key, sep, val = part.partition("=")
        if not sep or key not in casts:
            raise CliError(f"bad selector {selector!r}: unexpected {part!r}")
        try:
            out[key] = casts[key](val)
        except ValueError:
            raise CliError(f"bad selector {selector!r}: cannot parse {part!r}")
    return out


def _require(kv, keys, selector):
    for key in keys:
        if key not in kv:
            raise CliError(f"bad selector {selector!r}: missing {key}=")


def load_games(selector):
    """Resolve a game selector to ([(game_id, game), ...], weights).

    weights are the construction weights when the family defines them
    (wzs, potential) and None otherwise.  Only random:...,count=K yields
    more than one game (seeds seed..seed+K-1).
    """
    if selector is None:
        raise CliError("--game is required")
    name, sep, body = selector.partition(":")
    if sep and name == "mismatching":
        kv = _parse_kv(body, {"M": float}, selector)
        _require(kv, ("M",), selector)
        gid = f"mismatching:M={kv['M']:g}"
        return [(gid, mismatching_pennies(kv["M"]))], None
    if sep and name == "shapley":
        kv = _parse_kv(body, {"beta": float}, selector)
        _require(kv, ("beta",), selector)
        gid = f"shapley:beta={kv['beta']:g}"
        return [(gid, shapley_network(kv["beta"]))], None
    if sep and name == "random":
        casts = {"N": int, "n": int, "seed": int, "lo": float, "hi": float,
                 "count": int}
        kv = _parse_kv(body, casts, selector)
        _require(kv, ("N", "n", "seed"), selector)
        count = kv.pop("count", 1)
        if count < 1:
            raise CliError(f"bad selector {selector!r}: count must be >= 1")
        games = []
        for s in range(kv["seed"], kv["seed"] + count):
            spec = RandomGameSpec(N=kv["N"], n=kv["n"],
                                  lo=kv.get("lo", -1.0), hi=kv.get("hi", 1.0),
                                  seed=s)
            gid = f"random:N={spec.N},n={spec.n},seed={s}"
            games.append((gid, random_normal_form(spec)))
        return games, None
    if sep and name == "wzs":
        kv = _parse_kv(body, {"N": int, "n": int, "seed": int}, selector)
        _require(kv, ("N", "n", "seed"), selector)
        game = weighted_zero_sum_cycle(kv["N"], kv["n"], kv["seed"])
        gid = f"wzs:N={kv['N']},n={kv['n']},seed={kv['seed']}"
        return [(gid, game)], np.ones(kv["N"])
    if sep and name == "potential":
        kv = _parse_kv(body, {"N": int, "n": int, "seed": int}, selector)
        _require(kv, ("N", "n", "seed"), selector)
        wpg = weighted_potential_quadratic(kv["N"], kv["n"], kv["seed"])
        gid = f"potential:N={kv['N']},n={kv['n']},seed={kv['seed']}"
        return [(gid, wpg.polymatrix)], wpg.weights.values
    if sep and name in ("mismatching", "shapley", "random", "wzs",
                        "potential"):
        raise CliError(f"bad selector {selector!r}")
    try:
        with open(selector) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read game file {selector!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in {selector!r} at line {exc.lineno}, "
                       f"column {exc.colno}: {exc.msg}")
    try:
        game = game_from_json(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"invalid game file {selector!r}: {exc}")
    return [(os.path.basename(selector), game)], None


def _load_config_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in {path!r} at line {exc.lineno}, "
                       f"column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise CliError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(_DEFAULTS))
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _settings(args):
    """Merge hard defaults, config file, and explicit flags (in that
    order of increasing precedence)."""
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    temps = merged["temps"]
    if isinstance(temps, str):
        temps = _parse_temps(temps)
    temps = [float(t) for t in temps]
    if not temps:
        raise CliError("temperature grid is empty")
    if any(t < 0 for t in temps):
        raise CliError("temperature grid values must be >= 0")
    merged["temps"] = temps
    if merged["dynamic"] not in ("ql", "rd", "ftrl"):
        raise CliError(f"unknown dynamic {merged['dynamic']!r}")
    if merged["dynamic"] == "ftrl" and any(t <= 0 for t in temps):
        raise CliError("ftrl requires strictly positive temperatures")
    try:
        merged["icfg"] = IntegratorConfig(h=float(merged["step"]),
                                          t_end=float(merged["t_end"]),
                                          record_stride=int(merged["stride"]),
                                          floor=float(merged["floor"]))
    except ValueError as exc:
        raise CliError(str(exc))
    return merged


def _parse_temps(text):
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise CliError(f"cannot parse temperature grid {text!r}")


def _initial_profiles(spec, action_counts, seed):
    """spec is a count (seeded Dirichlet draws) or an explicit list of
    per-player block lists."""
    if isinstance(spec, int):
        if spec < 1:
            raise CliError("inits count must be >= 1")
        return seeded_profiles(action_counts, spec, seed)
    if not isinstance(spec, list) or not spec:
        raise CliError("inits must be a count or a non-empty list")
    profiles = []
    for entry in spec:
        try:
            profiles.append(StrategyProfile(entry))
        except (ValueError, TypeError) as exc:
            raise CliError(f"bad initial condition {entry!r}: {exc}")
        if profiles[-1].action_counts != tuple(action_counts):
            raise CliError("initial condition shape does not match the game")
    return profiles


def _single_game(selector):
    games, weights = load_games(selector)
    if len(games) != 1:
        raise CliError("this subcommand takes a single game, not an ensemble")
    return games[0][0], games[0][1], weights


def _emit_json(data, out):
    text = json.dumps(data, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _make_field(dynamic, game, T):
    if dynamic == "ql":
        return QLField(game, T)
    if dynamic == "rd":
        return ReplicatorField(game)
    return FTRLField(game, entropic_regularizer(T))


def _lyapunov_series(traj, equilibrium, weights):
    """Sum_k w_k KL(xbar_k || x_k(t)) at each recorded sample."""
    xbar = equilibrium.flat
    counts = traj.action_counts
    w_row = np.repeat(weights, counts)
    const = float((w_row * xbar * np.log(xbar)).sum())
    vals = const - np.log(traj.states) @ (w_row * xbar)
    return [float(v) for v in vals]


def cmd_simulate(args):
    cfg = _settings(args)
    if cfg["out"] is None:
        raise CliError("simulate requires --out (output directory)")
    game_id, game, gweights = _single_game(cfg["game"])
    weights = np.ones(game.player_count) if gweights is None else gweights
    os.makedirs(cfg["out"], exist_ok=True)
    inits = _initial_profiles(cfg["inits"], game.action_counts, cfg["seed"])
    icfg = cfg["icfg"]
    runs = []
    failures = 0
    for T in cfg["temps"]:
        field = _make_field(cfg["dynamic"], game, T)
        sol = None
        if cfg["dynamic"] == "ql" and T > 0:
            sol = qre_solve(game, T)
        for j, x0 in enumerate(inits):
            name = f"traj_T{T:g}_x{j}.csv"
            entry = {"T": T, "init": j, "csv": name}
            try:
                traj = integrate(field, x0, icfg)
            except IntegrationError as exc:
                failures += 1
                entry["status"] = f"failed: {exc}"
                entry["last_valid_time"] = exc.last_valid_time
                runs.append(entry)
                continue
            trajectory_to_csv(traj, os.path.join(cfg["out"], name))
            final = traj.final_profile
            entry["status"] = "ok"
            entry["endpoint"] = [b.tolist() for b in final.blocks]
            entry["endpoint_residual"] = traj.residual
            entry["qre_residual"] = (qre_residual(game, final, T)
                                     if T > 0 else None)
            entry["tsw"] = tsw(traj, game)
            entry["regrets"] = [regret(traj, game, k)
                                for k in range(game.player_count)]
            if sol is not None and sol.converged:
                entry["lyapunov"] = {
                    "t": [float(t) for t in traj.times],
                    "value": _lyapunov_series(traj, sol.profile, weights),
                }
            else:
                entry["lyapunov"] = None
            runs.append(entry)
    summary = {
        "game": game_id,
        "dynamic": cfg["dynamic"],
        "temperatures": cfg["temps"],
        "t_end": icfg.t_end,
        "h": icfg.h,
        "record_stride": icfg.record_stride,
        "seed": cfg["seed"],
        "runs": runs,
    }
    with open(os.path.join(cfg["out"], "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return 3 if failures == len(runs) else 0


def _csv_field(value):
    """Minimal CSV quoting: ids may contain commas."""
    if "," in value or '"' in value:
        return '"' + value.replace('"', '""') + '"'
    return value


def _sweep_game(payload):
    """Rows for one game of a sweep: every run for the whole temperature
    grid shares one batched kernel call (one column per (T, x0))."""
    game = game_from_json(payload["game"])
    temps = payload["temps"]
    icfg = IntegratorConfig(h=payload["h"], t_end=payload["t_end"],
                            record_stride=payload["stride"],
                            floor=payload["floor"])
    if payload["inits_list"] is not None:
        inits = [StrategyProfile(entry) for entry in payload["inits_list"]]
    else:
        inits = seeded_profiles(game.action_counts, payload["inits"],
                                payload["seed"])
    count = len(inits)
    X0 = np.stack([p.flat for p in inits], axis=1)
    B = len(temps) * count
    state0 = np.tile(X0, (1, len(temps)))
    Tcols = np.repeat(np.asarray(temps, dtype=np.float64), count)
    Tmat = np.broadcast_to(Tcols, (game.player_count, B))
    dynamic = payload["dynamic"]
    if dynamic == "ql":
        mode = _kernels.MODE_QL
    elif dynamic == "rd":
        mode = _kernels.MODE_RD
        Tmat = np.ones((game.player_count, B))
    else:
        mode = _kernels.MODE_FTRL
        state0 = np.log(np.maximum(state0, icfg.floor)) * Tcols
    out = _kernels.integrate_batch(game.pack, mode, state0, Tmat, icfg.h,
                                   icfg.steps, icfg.record_stride, icfg.floor,
                                   1, want_traj=False, want_sw=True)
    times = out["rec_steps"] * icfg.h
    span = times[-1] - times[0]
    sw = out["sw"]
    col_tsw = _trapezoid(sw, times, axis=0) / span
    norm = welfare_normalizer(game)
    scale = 1.0 / norm if norm > 0 else 0.0
    status = out["status"]

    pos = [i for i, T in enumerate(temps) if T > 0]
    sw_eq = np.full(len(temps), np.nan)
    if pos:
        Tgrid = np.broadcast_to(np.asarray([temps[i] for i in pos]),
                                (game.player_count, len(pos)))
        rows = int(np.sum(game.action_counts))
        U0 = np.concatenate([np.full(nk, 1.0 / nk)
                             for nk in game.action_counts])
        Xb, _, _, conv = solve_batch(game, np.ascontiguousarray(Tgrid),
                                     np.tile(U0[:, None], (1, len(pos))))
        for slot, i in enumerate(pos):
            if conv[slot]:
                prof = StrategyProfile.from_flat(Xb[:, slot],
                                                 game.action_counts)
                sw_eq[i] = social_welfare(game, prof) * scale

    lines = []
    for t_idx, T in enumerate(temps):
        cols = slice(t_idx * count, (t_idx + 1) * count)
        ok = status[cols] < 0
        if np.any(ok):
            mean = float(np.mean(col_tsw[cols][ok])) * scale
        else:
            mean = float("nan")
        lines.append(f"{_csv_field(payload['game_id'])},{T:.10g},"
                     f"{mean:.17g},{sw_eq[t_idx]:.17g}")
    return lines


def cmd_sweep(args):
    cfg = _settings(args)
    if cfg["out"] is None:
        raise CliError("sweep requires --out (CSV path)")
    games, _ = load_games(cfg["game"])
    inits_list = cfg["inits"] if isinstance(cfg["inits"], list) else None
    if inits_list is None and int(cfg["inits"]) < 1:
        raise CliError("inits count must be >= 1")
    icfg = cfg["icfg"]
    payloads = [{
        "game_id": gid,
        "game": game_to_json(game),
        "temps": cfg["temps"],
        "dynamic": cfg["dynamic"],
        "inits": cfg["inits"] if inits_list is None else 0,
        "inits_list": inits_list,
        "seed": cfg["seed"],
        "h": icfg.h,
        "t_end": icfg.t_end,
        "stride": icfg.record_stride,
        "floor": icfg.floor,
    } for gid, game in games]
    jobs = cfg["jobs"]
    if jobs is None:
        jobs = min(os.cpu_count() or 1, len(payloads))
    jobs = max(1, int(jobs))
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_rows = list(pool.map(_sweep_game, payloads))
    else:
        all_rows = [_sweep_game(p) for p in payloads]
    lines = ["game_id,T,mean_tsw,sw_equilibrium"]
    for rows in all_rows:
        lines.extend(rows)
    lines.append(SCHEMA_COMMENT)
    with open(cfg["out"], "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def cmd_qre(args):
    cfg = _settings(args)
    game_id, game, _ = _single_game(cfg["game"])
    if any(t <= 0 for t in cfg["temps"]):
        raise CliError("qre requires strictly positive temperatures")
    solutions = []
    failed = 0
    for T in cfg["temps"]:
        sol = qre_solve(game, T)
        failed += 0 if sol.converged else 1
        solutions.append({"T": T, **solution_to_json(sol)})
    _emit_json({"game": game_id, "solutions": solutions}, cfg["out"])
    return 3 if failed else 0


def cmd_check_monotone(args):
    cfg = _settings(args)
    game_id, game, gweights = _single_game(cfg["game"])
    explicit_temps = getattr(args, "temps", None) is not None or (
        getattr(args, "config", None) and "temps" in
        _load_config_file(args.config))
    temps = cfg["temps"] if explicit_temps else []
    if len(temps) > 1:
        raise CliError("check-monotone takes at most one temperature")
    target = game
    method = "exact"
    if temps and temps[0] > 0:
        target = PerturbedGameView(game, temps[0])
        method = "sampled"
    elif not isinstance(game, PolymatrixGame):
        method = "sampled"
    if method == "exact":
        report = monotonicity_exact_polymatrix(game, gweights)
    else:
        report = monotonicity_sampled(target, gweights,
                                      pair_count=int(cfg["samples"]),
                                      seed=cfg["seed"])
    data = {"game": game_id, "method": method,
            **monotonicity_report_json(report)}
    if temps:
        data["T"] = temps[0]
    _emit_json(data, cfg["out"])
    return 0


def cmd_influence(args):
    cfg = _settings(args)
    game_id, game, _ = _single_game(cfg["game"])
    delta = influence_bound(game)
    data = {"game": game_id, "delta": delta,
            "threshold": delta * (game.player_count - 1)}
    _emit_json(data, cfg["out"])
    return 0


def _add_common(sub):
    sub.add_argument("--game", help="zoo selector or game JSON path")
    sub.add_argument("--dynamic", choices=("ql", "rd", "ftrl"))
    sub.add_argument("--temps", help="comma-separated temperature grid")
    sub.add_argument("--inits", type=int,
                     help="number of seeded initial conditions")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--t-end", dest="t_end", type=float)
    sub.add_argument("--step", type=float, help="integrator step size")
    sub.add_argument("--out", help="output file or directory")
    sub.add_argument("--jobs", type=int, help="parallel worker cap")
    sub.add_argument("--config", help="JSON config file (flags override)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qldyn",
        description="Q-learning / replicator / FTRL dynamics on finite games")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, func in (("simulate", cmd_simulate), ("sweep", cmd_sweep),
                       ("qre", cmd_qre), ("check-monotone", cmd_check_monotone),
                       ("influence", cmd_influence)):
        sub = subs.add_parser(name)
        _add_common(sub)
        sub.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
