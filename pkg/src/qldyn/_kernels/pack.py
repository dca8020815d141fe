"""Flat-array packing of game data shared by both kernel backends.

A pack is a dict of contiguous numpy arrays describing one game:

* ``kind``      "nf" or "poly"
* ``n``         int64 (N,) action counts
* ``noff``      int64 (N+1,) row offsets of each player's block
* nf:   ``U`` flat float64 payoffs, ``uoff`` int64 (N+1,) offsets; player k's
        block is (n_k, m_k) with the player's own axis first and opponent
        axes in increasing player order; ``U_mats`` keeps the per-player
        matrices for the reference backend.
* poly: ``A`` flat float64 edge matrices, ``aoff`` offsets, ``ek``/``el``
        int64 endpoint players; ``edge_mats`` for the reference backend.
* ``scr_rows``/``kt_rows`` scratch sizing for the compiled contraction.
"""

import numpy as np

MODE_QL = 0
MODE_RD = 1
MODE_RDH = 2
MODE_FTRL = 3


def make_nf_pack(n, payoffs):
    n = np.ascontiguousarray(n, dtype=np.int64)
    N = len(n)
    noff = np.zeros(N + 1, np.int64)
    noff[1:] = np.cumsum(n)
    mats = []
    flat = []
    uoff = [0]
    for k in range(N):
        Uk = np.moveaxis(np.asarray(payoffs[k], dtype=np.float64), k, 0)
        Uk = np.ascontiguousarray(Uk.reshape(int(n[k]), -1))
        mats.append(Uk)
        flat.append(Uk.ravel())
        uoff.append(uoff[-1] + Uk.size)
    scr = 0
    ktmax = 1
    for k in range(N):
        opp = [l for l in range(N) if l != k]
        m = 1
        for l in opp:
            m *= int(n[l])
        i = 0
        while i < len(opp):
            if len(opp) - i >= 2:
                c = int(n[opp[i]]) * int(n[opp[i + 1]])
                ktmax = max(ktmax, c)
                i += 2
            else:
                c = int(n[opp[i]])
                i += 1
            m //= c
            if i < len(opp):
                scr = max(scr, int(n[k]) * m)
    return {
        "kind": "nf",
        "n": n,
        "noff": noff,
        "rows": int(noff[-1]),
        "U": np.concatenate(flat),
        "uoff": np.asarray(uoff, dtype=np.int64),
        "U_mats": mats,
        "scr_rows": scr,
        "kt_rows": ktmax,
    }


def make_poly_pack(n, edges):
    """edges: iterable of (k, l, matrix) with matrix shaped (n_k, n_l)."""
    n = np.ascontiguousarray(n, dtype=np.int64)
    N = len(n)
    noff = np.zeros(N + 1, np.int64)
    noff[1:] = np.cumsum(n)
    mats = []
    flat = []
    aoff = [0]
    ek = []
    el = []
    for k, l, M in edges:
        M = np.ascontiguousarray(M, dtype=np.float64)
        mats.append(M)
        flat.append(M.ravel())
        aoff.append(aoff[-1] + M.size)
        ek.append(k)
        el.append(l)
    return {
        "kind": "poly",
        "n": n,
        "noff": noff,
        "rows": int(noff[-1]),
        "A": np.concatenate(flat) if flat else np.zeros(0),
        "aoff": np.asarray(aoff, dtype=np.int64),
        "ek": np.asarray(ek, dtype=np.int64),
        "el": np.asarray(el, dtype=np.int64),
        "edge_mats": mats,
        "scr_rows": 0,
        "kt_rows": 1,
    }
