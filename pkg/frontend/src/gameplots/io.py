"""Schema-checked readers for the simulator's CSV outputs.

The plotting side never recomputes dynamics; these readers are the only
data path in, and they reject anything that does not match the writer's
schema exactly (header row plus trailing schema-version comment).
"""

import csv

import numpy as np

SCHEMA_LINE = "# schema-version: 1"
TRAJECTORY_HEADER = ["t", "player", "action", "probability"]
WELFARE_HEADER = ["game_id", "T", "mean_tsw", "sw_equilibrium"]


class SchemaError(ValueError):
    """Input file does not match the expected CSV schema."""


def _checked_rows(path, header):
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 2:
        raise SchemaError(f"{path}: too short to carry the schema")
    if lines[-1].strip() != SCHEMA_LINE:
        raise SchemaError(f"{path}: expected trailing {SCHEMA_LINE!r}, "
                          f"found {lines[-1]!r}")
    got = next(csv.reader([lines[0]]))
    if got != header:
        raise SchemaError(f"{path}: expected header {','.join(header)!r}, "
                          f"found {lines[0]!r}")
    return list(csv.reader(lines[1:-1]))


def read_trajectory(path):
    """Long-format trajectory CSV -> (times, per-player probability blocks).

    times has shape (samples,); blocks is a list with one (samples, n_k)
    array per player, rows in recorded order.
    """
    rows = _checked_rows(path, TRAJECTORY_HEADER)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    times = []
    series = {}
    try:
        for t_str, p_str, a_str, v_str in rows:
            if not times or t_str != times[-1]:
                times.append(t_str)
            series.setdefault((int(p_str), int(a_str)),
                              []).append(float(v_str))
    except ValueError as exc:
        raise SchemaError(f"{path}: malformed row ({exc})") from None
    players = sorted({p for p, _ in series})
    if players != list(range(len(players))):
        raise SchemaError(f"{path}: player indices not contiguous")
    nrec = len(times)
    blocks = []
    for p in players:
        actions = sorted(a for q, a in series if q == p)
        if actions != list(range(len(actions))):
            raise SchemaError(f"{path}: action indices not contiguous")
        block = np.empty((nrec, len(actions)))
        for a in actions:
            col = series[(p, a)]
            if len(col) != nrec:
                raise SchemaError(f"{path}: ragged sample grid")
            block[:, a] = col
        blocks.append(block)
    return np.array([float(t) for t in times]), blocks


def read_welfare(path):
    """Welfare CSV -> (game_ids, T, mean_tsw, sw_equilibrium) columns,
    rows in file order."""
    rows = _checked_rows(path, WELFARE_HEADER)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    ids, temps, means, sw = [], [], [], []
    try:
        for gid, t_str, m_str, s_str in rows:
            ids.append(gid)
            temps.append(float(t_str))
            means.append(float(m_str))
            sw.append(float(s_str))
    except ValueError as exc:
        raise SchemaError(f"{path}: malformed row ({exc})") from None
    return ids, np.asarray(temps), np.asarray(means), np.asarray(sw)
