"""Pure-numpy kernel backend, API-compatible with the compiled extension.

Used automatically when the compiled module is unavailable and selectable
via QLDYN_BACKEND=python.  Semantics (clamping, renormalization, record
points, failure status) match the compiled driver; only operation order
differs, so results agree to rounding.
"""

import numpy as np

from .pack import MODE_FTRL, MODE_QL, MODE_RD, MODE_RDH

name = "python"


def _kron_cols(cols):
    K = cols[0]
    for c in cols[1:]:
        K = (K[:, None, :] * c[None, :, :]).reshape(-1, K.shape[1])
    return K


def rewards_batch(pack, X):
    """Expected rewards (rows, B) for states X (rows, B)."""
    X = np.asarray(X, dtype=np.float64)
    n, noff = pack["n"], pack["noff"]
    N = len(n)
    R = np.zeros((pack["rows"], X.shape[1]))
    if pack["kind"] == "poly":
        for k, l, M in zip(pack["ek"], pack["el"], pack["edge_mats"]):
            R[noff[k]:noff[k + 1]] += M @ X[noff[l]:noff[l + 1]]
    else:
        for k in range(N):
            cols = [X[noff[l]:noff[l + 1]] for l in range(N) if l != k]
            K = _kron_cols(cols)
            R[noff[k]:noff[k + 1]] = pack["U_mats"][k] @ K
    return R


def _softmax(pack, Y, T):
    n, noff = pack["n"], pack["noff"]
    X = np.empty_like(Y)
    for k in range(len(n)):
        Yk = Y[noff[k]:noff[k + 1]]
        e = np.exp((Yk - Yk.max(axis=0)) / T[k])
        X[noff[k]:noff[k + 1]] = e / e.sum(axis=0)
    return X


def _field(pack, mode, Z, T):
    """Returns (F, X, R): derivative, simplex projection, rewards."""
    n, noff = pack["n"], pack["noff"]
    N = len(n)
    if mode == MODE_FTRL:
        X = _softmax(pack, Z, T)
        R = rewards_batch(pack, X)
        return R.copy(), X, R
    X = Z
    R = rewards_batch(pack, X)
    F = np.empty_like(R)
    for k in range(N):
        s = slice(noff[k], noff[k + 1])
        Xk, Rk = X[s], R[s]
        if mode == MODE_RD:
            F[s] = Xk * (Rk - (Xk * Rk).sum(axis=0))
        elif mode == MODE_QL:
            Lk = np.log(Xk)
            mr = (Xk * Rk).sum(axis=0)
            ml = (Xk * Lk).sum(axis=0)
            F[s] = Xk * (Rk - mr - T[k] * (Lk - ml))
        elif mode == MODE_RDH:
            Rh = Rk - T[k] * (np.log(Xk) + 1.0)
            F[s] = Xk * (Rh - (Xk * Rh).sum(axis=0))
        else:
            raise ValueError(f"unknown mode {mode}")
    return F, X, R


def integrate_batch(pack, mode, state, T, h, steps, stride, eps, renorm,
                    want_traj=False, want_sw=False, want_y=False):
    """Fixed-step RK4 over a batch of trajectories; see the compiled twin."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n, noff = pack["n"], pack["noff"]
    N = len(n)
    rows = pack["rows"]
    state = np.array(state, dtype=np.float64, copy=True)
    if state.ndim != 2 or state.shape[0] != rows:
        raise ValueError("state shape mismatch")
    B = state.shape[1]
    T = np.ascontiguousarray(np.broadcast_to(T, (N, B)), dtype=np.float64)
    simplex = mode != MODE_FTRL

    rec = list(range(0, steps + 1, stride))
    if rec[-1] != steps:
        rec.append(steps)
    nrec = len(rec)
    traj = np.empty((nrec, rows, B)) if want_traj else None
    trajy = np.empty((nrec, rows, B)) if want_y else None
    sw = np.empty((nrec, B)) if want_sw else None
    status = np.full(B, -1, dtype=np.int64)

    irec = 0
    F1 = X = R = None
    for i in range(steps + 1):
        F1, X, R = _field(pack, mode, state, T)
        if i % stride == 0 or i == steps:
            if want_traj:
                traj[irec] = X
            if want_y:
                trajy[irec] = state
            if want_sw:
                sw[irec] = (X * R).sum(axis=0)
            irec += 1
        if i == steps:
            break
        if simplex:
            F2 = _field(pack, mode, np.maximum(state + (h / 2) * F1, eps), T)[0]
            F3 = _field(pack, mode, np.maximum(state + (h / 2) * F2, eps), T)[0]
            F4 = _field(pack, mode, np.maximum(state + h * F3, eps), T)[0]
        else:
            F2 = _field(pack, mode, state + (h / 2) * F1, T)[0]
            F3 = _field(pack, mode, state + (h / 2) * F2, T)[0]
            F4 = _field(pack, mode, state + h * F3, T)[0]
        state += (h / 6) * (F1 + 2.0 * (F2 + F3) + F4)
        if simplex:
            np.maximum(state, eps, out=state)
            bad = np.zeros(B, dtype=bool)
            for k in range(N):
                s = slice(noff[k], noff[k + 1])
                tot = state[s].sum(axis=0)
                if renorm:
                    state[s] /= tot
                bad |= ~np.isfinite(tot)
        else:
            bad = ~np.isfinite(state.sum(axis=0))
        status[(status < 0) & bad] = i + 1

    if mode == MODE_FTRL:
        V = X * (R - (np.add.reduceat(X * R, noff[:-1], axis=0)
                      .repeat(n, axis=0)))
        V /= T.repeat(n, axis=0)
        resid = np.abs(V).max(axis=0)
    else:
        resid = np.abs(F1).max(axis=0)

    out = {
        "final": state,
        "resid": resid,
        "status": status,
        "rec_steps": np.asarray(rec, dtype=np.int64),
    }
    if want_traj:
        out["traj"] = traj
    if want_y:
        out["traj_y"] = trajy
    if want_sw:
        out["sw"] = sw
    return out
