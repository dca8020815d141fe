# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel backend: batched rewards and a fixed-step RK4 driver.

The C kernels require the batch width to be a multiple of 8; this wrapper
pads by replicating the first column and slices the padding back off.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "kern.h":
    void qd_nf_rewards(const double* U, const long* uoff, const long* n,
                       const long* noff, long N, const double* X, double* R,
                       long B, double* s1, double* s2, double* kt) nogil
    void qd_poly_rewards(const double* A, const long* aoff, const long* ek,
                         const long* el, long nedges, const long* n,
                         const long* noff, long N, const double* X, double* R,
                         long B) nogil
    long qd_integrate(int is_poly, const double* U, const long* uoff,
                      const double* A, const long* aoff, const long* ek,
                      const long* el, long nedges, const long* n,
                      const long* noff, long N, int mode, double* state,
                      const double* T, long B, double h, long steps,
                      long stride, double eps, int renorm, double* traj,
                      double* traj_y, double* sw, double* resid, long* status,
                      double* XS, double* X, double* R, double* L, double* K1,
                      double* K2, double* K3, double* K4, double* s1,
                      double* s2, double* kt, double* w1, double* w2) nogil

name = "compiled"


cdef _pad8(arr):
    """Pad the last axis to a multiple of 8 by replicating column 0."""
    B0 = arr.shape[arr.ndim - 1]
    B = -(-B0 // 8) * 8
    if B == B0:
        return np.ascontiguousarray(arr), B0
    out = np.empty(arr.shape[:arr.ndim - 1] + (B,), dtype=np.float64)
    out[..., :B0] = arr
    out[..., B0:] = arr[..., :1]
    return out, B0


def rewards_batch(pack, X):
    """Expected rewards (rows, B) for states X (rows, B)."""
    cdef double[:, ::1] xv, rv
    cdef double[::1] Uv, Av, s1v, s2v, ktv
    cdef long[::1] nv, noffv, uoffv, aoffv, ekv, elv
    cdef long N = len(pack["n"]), B, B0, nedges
    cdef int is_poly = pack["kind"] == "poly"

    Xc = np.ascontiguousarray(X, dtype=np.float64)
    Xp, B0 = _pad8(Xc)
    B = Xp.shape[1]
    rows = pack["rows"]
    R = np.empty((rows, B), dtype=np.float64)
    xv = Xp
    rv = R
    nv = pack["n"]
    noffv = pack["noff"]

    scr = np.empty(max(pack["scr_rows"], 1) * B, dtype=np.float64)
    scr2 = np.empty(max(pack["scr_rows"], 1) * B, dtype=np.float64)
    kt = np.empty(max(pack["kt_rows"], 1) * B, dtype=np.float64)
    s1v = scr
    s2v = scr2
    ktv = kt

    if is_poly:
        Av = pack["A"]
        aoffv = pack["aoff"]
        ekv = pack["ek"]
        elv = pack["el"]
        nedges = len(pack["ek"])
        with nogil:
            qd_poly_rewards(&Av[0] if Av.shape[0] else NULL, &aoffv[0],
                            &ekv[0] if nedges else NULL,
                            &elv[0] if nedges else NULL, nedges, &nv[0],
                            &noffv[0], N, &xv[0, 0], &rv[0, 0], B)
    else:
        Uv = pack["U"]
        uoffv = pack["uoff"]
        with nogil:
            qd_nf_rewards(&Uv[0], &uoffv[0], &nv[0], &noffv[0], N,
                          &xv[0, 0], &rv[0, 0], B, &s1v[0], &s2v[0], &ktv[0])
    if B != B0:
        return np.ascontiguousarray(R[:, :B0])
    return R


def integrate_batch(pack, int mode, state, T, double h, long steps,
                    long stride, double eps, int renorm, want_traj=False,
                    want_sw=False, want_y=False):
    """Fixed-step RK4 over a batch of trajectories.

    state: (rows, B) initial condition (simplex state, or payoff-space
    state for the FTRL mode).  T: (N, B) temperatures.  Returns a dict
    with final state, optional recordings, endpoint residual, per-column
    failure status and the recorded step indices.
    """
    cdef double[:, ::1] sv, Tv
    cdef double[::1] Uv, Av, residv, s1v, s2v, ktv, w1v, w2v
    cdef double[::1] XSv, Xv, Rv, Lv, K1v, K2v, K3v, K4v
    cdef double[:, :, ::1] trajv, trajyv
    cdef double[:, ::1] swv
    cdef long[::1] nv, noffv, uoffv, aoffv, ekv, elv, statusv
    cdef long N = len(pack["n"]), B, B0, nedges = 0, rows, nrec
    cdef int is_poly = pack["kind"] == "poly"
    cdef double* traj_p = NULL
    cdef double* trajy_p = NULL
    cdef double* sw_p = NULL
    cdef double* U_p = NULL
    cdef double* A_p = NULL
    cdef long* uoff_p = NULL
    cdef long* aoff_p = NULL
    cdef long* ek_p = NULL
    cdef long* el_p = NULL

    if stride < 1:
        raise ValueError("stride must be >= 1")
    rows = pack["rows"]
    state = np.array(state, dtype=np.float64, order="C", copy=True)
    if state.ndim != 2 or state.shape[0] != rows:
        raise ValueError("state shape mismatch")
    Sp, B0 = _pad8(state)
    B = Sp.shape[1]
    Tc = np.array(np.broadcast_to(T, (N, B0)), dtype=np.float64, order="C")
    Tp, _ = _pad8(Tc)

    rec = list(range(0, steps + 1, stride))
    if rec[len(rec) - 1] != steps:
        rec.append(steps)
    nrec = len(rec)

    traj = np.empty((nrec, rows, B)) if want_traj else None
    trajy = np.empty((nrec, rows, B)) if want_y else None
    swarr = np.empty((nrec, B)) if want_sw else None
    resid = np.empty(B)
    status = np.empty(B, dtype=np.int64)

    sv = Sp
    Tv = Tp
    nv = pack["n"]
    noffv = pack["noff"]
    residv = resid
    statusv = status

    if is_poly:
        Av = pack["A"]
        aoffv = pack["aoff"]
        ekv = pack["ek"]
        elv = pack["el"]
        nedges = len(pack["ek"])
        if Av.shape[0]:
            A_p = &Av[0]
        aoff_p = &aoffv[0]
        if nedges:
            ek_p = &ekv[0]
            el_p = &elv[0]
    else:
        Uv = pack["U"]
        uoffv = pack["uoff"]
        U_p = &Uv[0]
        uoff_p = &uoffv[0]

    scr_n = max(pack["scr_rows"], 1) * B
    work = [np.empty(rows * B) for _ in range(8)]
    XSv, Xv, Rv, Lv, K1v, K2v, K3v, K4v = work
    s1 = np.empty(scr_n)
    s2 = np.empty(scr_n)
    kt = np.empty(max(pack["kt_rows"], 1) * B)
    w1 = np.empty(B)
    w2 = np.empty(B)
    s1v = s1
    s2v = s2
    ktv = kt
    w1v = w1
    w2v = w2

    if want_traj:
        trajv = traj
        traj_p = &trajv[0, 0, 0]
    if want_y:
        trajyv = trajy
        trajy_p = &trajyv[0, 0, 0]
    if want_sw:
        swv = swarr
        sw_p = &swv[0, 0]

    with nogil:
        qd_integrate(is_poly, U_p, uoff_p, A_p, aoff_p, ek_p, el_p, nedges,
                     &nv[0], &noffv[0], N, mode, &sv[0, 0], &Tv[0, 0], B, h,
                     steps, stride, eps, renorm, traj_p, trajy_p, sw_p,
                     &residv[0], &statusv[0], &XSv[0], &Xv[0], &Rv[0], &Lv[0],
                     &K1v[0], &K2v[0], &K3v[0], &K4v[0], &s1v[0], &s2v[0],
                     &ktv[0], &w1v[0], &w2v[0])

    out = {
        "final": np.ascontiguousarray(Sp[:, :B0]),
        "resid": resid[:B0].copy(),
        "status": status[:B0].copy(),
        "rec_steps": np.asarray(rec, dtype=np.int64),
    }
    if want_traj:
        out["traj"] = np.ascontiguousarray(traj[:, :, :B0])
    if want_y:
        out["traj_y"] = np.ascontiguousarray(trajy[:, :, :B0])
    if want_sw:
        out["sw"] = np.ascontiguousarray(swarr[:, :B0])
    return out
