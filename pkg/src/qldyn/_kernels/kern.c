/* Batched numerical kernels for game-dynamics integration.
 *
 * Layout conventions (all arrays C-contiguous doubles):
 *   X, R, L, F : (rows, B) where rows = sum of action counts, grouped by
 *                player in index order; B is the trajectory batch width,
 *                required to be a multiple of 8 (callers pad).
 *   U_k        : (n_k, m_k) per-player payoff block, m_k = product of the
 *                opponents' action counts with opponent axes in increasing
 *                player order, fastest axis last.
 *   K          : (arity, B) table of per-trajectory contraction weights,
 *                either one opponent's strategy rows or the elementwise
 *                product of two opponents' rows (Kronecker pair).
 *
 * Expected-reward evaluation contracts U_k against opponents two axes at a
 * time: pairing axes keeps every intermediate small (cache-resident) and
 * roughly halves the flop count versus one-axis-at-a-time contraction.
 */
#include <math.h>
#include <stddef.h>
#include <string.h>

typedef double v8 __attribute__((vector_size(64)));
typedef double v8u __attribute__((vector_size(64), aligned(8)));
typedef long long v8i __attribute__((vector_size(64)));

static inline v8 loadu(const double* p) { return *(const v8u*)p; }
static inline void storeu(double* p, v8 v) { *(v8u*)p = v; }
static inline v8 bcast(double w) { return (v8){w, w, w, w, w, w, w, w}; }
static inline v8 vzero(void) { return (v8){0, 0, 0, 0, 0, 0, 0, 0}; }

/* max(z, fl) that lets NaN through (z < fl is false for NaN). */
static inline v8 vfloor(v8 z, v8 fl) {
    v8i m = z < fl;
    return (v8)(((v8i)fl & m) | ((v8i)z & ~m));
}

/* out[j,s,b] (+)= sum_a U[(j*c+a)*S + s] * K[a*B + b].
 * First contraction stage: U entries are plain scalars.  The s loop is
 * unrolled so several accumulator chains run per K load. */
void qd_contract_first(const double* restrict U, const double* restrict K,
                       double* restrict out, long nk, long c, long S, long B,
                       int acc) {
    for (long j = 0; j < nk; j++) {
        const double* uj = U + (size_t)j * c * S;
        double* oj = out + (size_t)j * S * B;
        for (long b = 0; b < B; b += 8) {
            long s = 0;
            for (; s + 8 <= S; s += 8) {
                const double* u0 = uj + s;
                double* o = oj + (size_t)s * B + b;
                v8 p[8];
                for (int r = 0; r < 8; r++)
                    p[r] = acc ? loadu(o + (size_t)r * B) : vzero();
                for (long a = 0; a < c; a++) {
                    const double* ua = u0 + (size_t)a * S;
                    v8 kv = loadu(K + (size_t)a * B + b);
                    for (int r = 0; r < 8; r++) p[r] += bcast(ua[r]) * kv;
                }
                for (int r = 0; r < 8; r++) storeu(o + (size_t)r * B, p[r]);
            }
            for (; s + 4 <= S; s += 4) {
                const double* u0 = uj + s;
                double* o = oj + (size_t)s * B + b;
                v8 p[4];
                for (int r = 0; r < 4; r++)
                    p[r] = acc ? loadu(o + (size_t)r * B) : vzero();
                for (long a = 0; a < c; a++) {
                    const double* ua = u0 + (size_t)a * S;
                    v8 kv = loadu(K + (size_t)a * B + b);
                    for (int r = 0; r < 4; r++) p[r] += bcast(ua[r]) * kv;
                }
                for (int r = 0; r < 4; r++) storeu(o + (size_t)r * B, p[r]);
            }
            for (; s < S; s++) {
                const double* u0 = uj + s;
                double* o = oj + (size_t)s * B + b;
                v8 p = acc ? loadu(o) : vzero();
                for (long a = 0; a < c; a++)
                    p += bcast(u0[(size_t)a * S]) * loadu(K + (size_t)a * B + b);
                storeu(o, p);
            }
        }
    }
}

/* out[j,s,b] = sum_a V[((j*c+a)*S + s)*B + b] * K[a*B + b].
 * Later stages: V carries a batch axis.  S == 1 takes a j-unrolled path. */
void qd_contract_next(const double* restrict V, const double* restrict K,
                      double* restrict out, long nk, long c, long S, long B) {
    if (S == 1) {
        long j = 0;
        for (; j + 4 <= nk; j += 4) {
            for (long b = 0; b < B; b += 8) {
                v8 p[4];
                for (int r = 0; r < 4; r++) p[r] = vzero();
                for (long a = 0; a < c; a++) {
                    v8 kv = loadu(K + (size_t)a * B + b);
                    for (int r = 0; r < 4; r++)
                        p[r] += loadu(V + (((size_t)(j + r) * c + a)) * B + b) * kv;
                }
                for (int r = 0; r < 4; r++)
                    storeu(out + (size_t)(j + r) * B + b, p[r]);
            }
        }
        for (; j < nk; j++) {
            for (long b = 0; b < B; b += 8) {
                v8 p = vzero();
                for (long a = 0; a < c; a++)
                    p += loadu(V + ((size_t)j * c + a) * B + b)
                       * loadu(K + (size_t)a * B + b);
                storeu(out + (size_t)j * B + b, p);
            }
        }
        return;
    }
    for (long j = 0; j < nk; j++) {
        const double* vj = V + (size_t)j * c * S * B;
        double* oj = out + (size_t)j * S * B;
        for (long b = 0; b < B; b += 8) {
            long s = 0;
            for (; s + 4 <= S; s += 4) {
                v8 p[4];
                for (int r = 0; r < 4; r++) p[r] = vzero();
                for (long a = 0; a < c; a++) {
                    const double* va = vj + ((size_t)a * S + s) * B + b;
                    v8 kv = loadu(K + (size_t)a * B + b);
                    for (int r = 0; r < 4; r++)
                        p[r] += loadu(va + (size_t)r * B) * kv;
                }
                for (int r = 0; r < 4; r++)
                    storeu(oj + (size_t)(s + r) * B + b, p[r]);
            }
            for (; s < S; s++) {
                v8 p = vzero();
                for (long a = 0; a < c; a++)
                    p += loadu(vj + ((size_t)a * S + s) * B + b)
                       * loadu(K + (size_t)a * B + b);
                storeu(oj + (size_t)s * B + b, p);
            }
        }
    }
}

/* K[(a1*c2 + a2), b] = X1[a1,b] * X2[a2,b] */
void qd_kron_pair(const double* restrict X1, const double* restrict X2,
                  double* restrict K, long c1, long c2, long B) {
    for (long a1 = 0; a1 < c1; a1++)
        for (long a2 = 0; a2 < c2; a2++) {
            const double* x1 = X1 + (size_t)a1 * B;
            const double* x2 = X2 + (size_t)a2 * B;
            double* k = K + ((size_t)a1 * c2 + a2) * B;
            for (long b = 0; b < B; b += 8)
                storeu(k + b, loadu(x1 + b) * loadu(x2 + b));
        }
}

/* Expected rewards for one player of a dense tensor game.  Contracts the
 * opponent axes (increasing player order) two at a time, single axis last
 * when the opponent count is odd.  s1/s2 are ping-pong scratch buffers,
 * kt holds the current Kronecker pair table. */
static void nf_player_rewards(const double* restrict U, long nk,
                              const long* restrict n, const long* restrict noff,
                              long N, long k, const double* restrict X,
                              double* restrict Rk, long B,
                              double* restrict s1, double* restrict s2,
                              double* restrict kt) {
    long opp[64];
    long nopp = 0;
    for (long l = 0; l < N; l++)
        if (l != k) opp[nopp++] = l;
    long m = 1;
    for (long i = 0; i < nopp; i++) m *= n[opp[i]];

    const double* src = U;
    double* dst = s1;
    double* spare = s2;
    int first = 1;
    long i = 0;
    while (i < nopp) {
        long c, S;
        const double* table;
        if (nopp - i >= 2) {
            long c1 = n[opp[i]], c2 = n[opp[i + 1]];
            qd_kron_pair(X + (size_t)noff[opp[i]] * B,
                         X + (size_t)noff[opp[i + 1]] * B, kt, c1, c2, B);
            c = c1 * c2;
            table = kt;
            i += 2;
        } else {
            c = n[opp[i]];
            table = X + (size_t)noff[opp[i]] * B;
            i += 1;
        }
        m /= c;
        S = m;
        double* out = (i == nopp) ? Rk : dst;
        if (first) {
            qd_contract_first(src, table, out, nk, c, S, B, 0);
            first = 0;
        } else {
            qd_contract_next(src, table, out, nk, c, S, B);
        }
        src = out;
        dst = (out == s1) ? s2 : s1;
        spare = dst;
        (void)spare;
    }
}

/* Full reward matrix R (rows, B) for a dense tensor game. */
void qd_nf_rewards(const double* restrict U, const long* restrict uoff,
                   const long* restrict n, const long* restrict noff, long N,
                   const double* restrict X, double* restrict R, long B,
                   double* restrict s1, double* restrict s2,
                   double* restrict kt) {
    for (long k = 0; k < N; k++)
        nf_player_rewards(U + uoff[k], n[k], n, noff, N, k, X,
                          R + (size_t)noff[k] * B, B, s1, s2, kt);
}

/* Rewards for a polymatrix game: R_k += A_e @ X_l over edges e = (k, l). */
void qd_poly_rewards(const double* restrict A, const long* restrict aoff,
                     const long* restrict ek, const long* restrict el,
                     long nedges, const long* restrict n,
                     const long* restrict noff, long N,
                     const double* restrict X, double* restrict R, long B) {
    memset(R, 0, (size_t)noff[N] * B * sizeof(double));
    for (long e = 0; e < nedges; e++) {
        long k = ek[e], l = el[e];
        qd_contract_first(A + aoff[e], X + (size_t)noff[l] * B,
                          R + (size_t)noff[k] * B, n[k], n[l], 1, B, 1);
    }
}

void qd_log_rows(const double* restrict X, double* restrict L, long rows,
                 long B) {
    size_t total = (size_t)rows * B;
    for (size_t i = 0; i < total; i++) L[i] = log(X[i]);
}

/* Smooth Q-learning field:
 * F_ki = X_ki * (R_ki - <X_k,R_k> - T_k (L_ki - <X_k,L_k>)). */
void qd_ql_field(const double* restrict X, const double* restrict R,
                 const double* restrict L, const double* restrict T,
                 double* restrict F, const long* restrict n,
                 const long* restrict noff, long N, long B,
                 double* restrict mr, double* restrict ml) {
    for (long k = 0; k < N; k++) {
        const double* xk = X + (size_t)noff[k] * B;
        const double* rk = R + (size_t)noff[k] * B;
        const double* lk = L + (size_t)noff[k] * B;
        const double* tk = T + (size_t)k * B;
        double* fk = F + (size_t)noff[k] * B;
        for (long b = 0; b < B; b += 8) {
            v8 amr = vzero(), aml = vzero();
            for (long i = 0; i < n[k]; i++) {
                v8 xv = loadu(xk + (size_t)i * B + b);
                amr += xv * loadu(rk + (size_t)i * B + b);
                aml += xv * loadu(lk + (size_t)i * B + b);
            }
            storeu(mr + b, amr);
            storeu(ml + b, aml);
        }
        for (long i = 0; i < n[k]; i++) {
            const double* xi = xk + (size_t)i * B;
            const double* ri = rk + (size_t)i * B;
            const double* li = lk + (size_t)i * B;
            double* fi = fk + (size_t)i * B;
            for (long b = 0; b < B; b += 8) {
                v8 xv = loadu(xi + b);
                v8 d = loadu(ri + b) - loadu(mr + b)
                     - loadu(tk + b) * (loadu(li + b) - loadu(ml + b));
                storeu(fi + b, xv * d);
            }
        }
    }
}

/* Replicator field F_ki = X_ki * (R_ki - <X_k,R_k>). */
void qd_rd_field(const double* restrict X, const double* restrict R,
                 double* restrict F, const long* restrict n,
                 const long* restrict noff, long N, long B,
                 double* restrict mr) {
    for (long k = 0; k < N; k++) {
        const double* xk = X + (size_t)noff[k] * B;
        const double* rk = R + (size_t)noff[k] * B;
        double* fk = F + (size_t)noff[k] * B;
        for (long b = 0; b < B; b += 8) {
            v8 amr = vzero();
            for (long i = 0; i < n[k]; i++)
                amr += loadu(xk + (size_t)i * B + b)
                     * loadu(rk + (size_t)i * B + b);
            storeu(mr + b, amr);
        }
        for (long i = 0; i < n[k]; i++) {
            const double* xi = xk + (size_t)i * B;
            const double* ri = rk + (size_t)i * B;
            double* fi = fk + (size_t)i * B;
            for (long b = 0; b < B; b += 8)
                storeu(fi + b,
                       loadu(xi + b) * (loadu(ri + b) - loadu(mr + b)));
        }
    }
}

/* Replicator field on the entropy-perturbed rewards
 * Rh_ki = R_ki - T_k (L_ki + 1):  F_ki = X_ki * (Rh_ki - <X_k,Rh_k>).
 * Kept as a separate evaluation route from qd_ql_field on purpose. */
void qd_rdh_field(const double* restrict X, const double* restrict R,
                  const double* restrict L, const double* restrict T,
                  double* restrict F, const long* restrict n,
                  const long* restrict noff, long N, long B,
                  double* restrict mr) {
    for (long k = 0; k < N; k++) {
        const double* xk = X + (size_t)noff[k] * B;
        const double* rk = R + (size_t)noff[k] * B;
        const double* lk = L + (size_t)noff[k] * B;
        const double* tk = T + (size_t)k * B;
        double* fk = F + (size_t)noff[k] * B;
        for (long b = 0; b < B; b += 8) {
            v8 amr = vzero();
            v8 tv = loadu(tk + b);
            for (long i = 0; i < n[k]; i++) {
                v8 rh = loadu(rk + (size_t)i * B + b)
                      - tv * (loadu(lk + (size_t)i * B + b) + bcast(1.0));
                amr += loadu(xk + (size_t)i * B + b) * rh;
            }
            storeu(mr + b, amr);
        }
        for (long i = 0; i < n[k]; i++) {
            const double* xi = xk + (size_t)i * B;
            const double* ri = rk + (size_t)i * B;
            const double* li = lk + (size_t)i * B;
            double* fi = fk + (size_t)i * B;
            for (long b = 0; b < B; b += 8) {
                v8 tv = loadu(tk + b);
                v8 rh = loadu(ri + b) - tv * (loadu(li + b) + bcast(1.0));
                storeu(fi + b, loadu(xi + b) * (rh - loadu(mr + b)));
            }
        }
    }
}

/* Per-player softmax with max subtraction: X = softmax(Y / T) rowwise. */
void qd_softmax_rows(const double* restrict Y, const double* restrict T,
                     double* restrict X, const long* restrict n,
                     const long* restrict noff, long N, long B,
                     double* restrict wm, double* restrict ws) {
    for (long k = 0; k < N; k++) {
        const double* yk = Y + (size_t)noff[k] * B;
        const double* tk = T + (size_t)k * B;
        double* xk = X + (size_t)noff[k] * B;
        for (long b = 0; b < B; b++) {
            double m = yk[b];
            for (long i = 1; i < n[k]; i++) {
                double v = yk[(size_t)i * B + b];
                if (v > m) m = v;
            }
            wm[b] = m;
            ws[b] = 0.0;
        }
        for (long i = 0; i < n[k]; i++)
            for (long b = 0; b < B; b++) {
                double e = exp((yk[(size_t)i * B + b] - wm[b]) / tk[b]);
                xk[(size_t)i * B + b] = e;
                ws[b] += e;
            }
        for (long i = 0; i < n[k]; i++)
            for (long b = 0; b < B; b++) xk[(size_t)i * B + b] /= ws[b];
    }
}

/* dst = max(x + alpha * f, floor), elementwise. */
static void stage_state(const double* restrict X, const double* restrict F,
                        double alpha, double floorv, double* restrict dst,
                        size_t total) {
    v8 fl = bcast(floorv);
    for (size_t i = 0; i < total; i += 8) {
        v8 z = loadu(X + i) + bcast(alpha) * loadu(F + i);
        storeu(dst + i, vfloor(z, fl));
    }
}

static void stage_state_nofloor(const double* restrict X,
                                const double* restrict F, double alpha,
                                double* restrict dst, size_t total) {
    for (size_t i = 0; i < total; i += 8)
        storeu(dst + i, loadu(X + i) + bcast(alpha) * loadu(F + i));
}

/* Game dispatch bundled for the integrator. */
typedef struct {
    int is_poly;
    const double* U;
    const long* uoff;
    const double* A;
    const long* aoff;
    const long* ek;
    const long* el;
    long nedges;
    const long* n;
    const long* noff;
    long N;
    double* s1;
    double* s2;
    double* kt;
} GamePack;

static void eval_rewards(const GamePack* g, const double* X, double* R,
                         long B) {
    if (g->is_poly)
        qd_poly_rewards(g->A, g->aoff, g->ek, g->el, g->nedges, g->n, g->noff,
                        g->N, X, R, B);
    else
        qd_nf_rewards(g->U, g->uoff, g->n, g->noff, g->N, X, R, B, g->s1,
                      g->s2, g->kt);
}

#define QD_MODE_QL 0
#define QD_MODE_RD 1
#define QD_MODE_RDH 2
#define QD_MODE_FTRL 3

/* One field evaluation.  Z is the integration state (x, or y for the
 * payoff-space mode); X receives the simplex projection, R the rewards,
 * F the state derivative. */
static void eval_field(const GamePack* g, int mode, const double* Z,
                       const double* T, double* X, double* R, double* L,
                       double* F, long B, double* w1, double* w2) {
    long rows = g->noff[g->N];
    size_t total = (size_t)rows * B;
    if (mode == QD_MODE_FTRL) {
        qd_softmax_rows(Z, T, X, g->n, g->noff, g->N, B, w1, w2);
        eval_rewards(g, X, R, B);
        memcpy(F, R, total * sizeof(double));
        return;
    }
    memcpy(X, Z, total * sizeof(double));
    eval_rewards(g, X, R, B);
    if (mode == QD_MODE_QL) {
        qd_log_rows(X, L, rows, B);
        qd_ql_field(X, R, L, T, F, g->n, g->noff, g->N, B, w1, w2);
    } else if (mode == QD_MODE_RD) {
        qd_rd_field(X, R, F, g->n, g->noff, g->N, B, w1);
    } else {
        qd_log_rows(X, L, rows, B);
        qd_rdh_field(X, R, L, T, F, g->n, g->noff, g->N, B, w1);
    }
}

/* Fixed-step RK4 over `steps` steps of size h.
 *
 * state   : (rows, B), x for simplex modes, y for the payoff-space mode.
 * T       : (N, B) per-player, per-trajectory temperature (or payoff-space
 *           regularizer scale).
 * traj    : optional (nrec, rows, B) recording of the simplex state.
 * traj_y  : optional (nrec, rows, B) recording of the payoff-space state.
 * sw      : optional (nrec, B) social welfare at record points.
 * resid   : optional (B,) sup-norm of the simplex-state derivative at the
 *           final state (payoff-space mode reports the induced simplex
 *           velocity x * (R - <x,R>) / T).
 * status  : (B,) first step index producing a non-finite state, -1 if none.
 * Records happen at steps i with i % stride == 0, plus the final step.
 * Returns the number of records written. */
long qd_integrate(/* game */
                  int is_poly, const double* U, const long* uoff,
                  const double* A, const long* aoff, const long* ek,
                  const long* el, long nedges, const long* n,
                  const long* noff, long N,
                  /* run */
                  int mode, double* state, const double* T, long B, double h,
                  long steps, long stride, double eps, int renorm,
                  /* outputs */
                  double* traj, double* traj_y, double* sw, double* resid,
                  long* status,
                  /* scratch: each (rows, B) unless noted */
                  double* XS, double* X, double* R, double* L, double* K1,
                  double* K2, double* K3, double* K4,
                  double* s1, double* s2, double* kt, /* contraction scratch */
                  double* w1, double* w2 /* (B,) */) {
    GamePack g = {is_poly, U, uoff, A, aoff, ek, el, nedges, n, noff, N,
                  s1, s2, kt};
    long rows = noff[N];
    size_t total = (size_t)rows * B;
    int simplex = (mode != QD_MODE_FTRL);
    long nrec = 0;

    for (long b = 0; b < B; b++) status[b] = -1;

    for (long i = 0; i <= steps; i++) {
        eval_field(&g, mode, state, T, X, R, L, K1, B, w1, w2);
        if (i % stride == 0 || i == steps) {
            if (traj)
                memcpy(traj + (size_t)nrec * total, X, total * sizeof(double));
            if (traj_y)
                memcpy(traj_y + (size_t)nrec * total, state,
                       total * sizeof(double));
            if (sw) {
                double* swr = sw + (size_t)nrec * B;
                for (long b = 0; b < B; b += 8) storeu(w1 + b, vzero());
                for (long r = 0; r < rows; r++)
                    for (long b = 0; b < B; b += 8)
                        storeu(w1 + b,
                               loadu(w1 + b)
                                   + loadu(X + (size_t)r * B + b)
                                         * loadu(R + (size_t)r * B + b));
                memcpy(swr, w1, (size_t)B * sizeof(double));
            }
            nrec++;
        }
        if (i == steps) break;

        if (simplex) {
            stage_state(state, K1, h / 2, eps, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K2, B, w1, w2);
            stage_state(state, K2, h / 2, eps, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K3, B, w1, w2);
            stage_state(state, K3, h, eps, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K4, B, w1, w2);
        } else {
            stage_state_nofloor(state, K1, h / 2, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K2, B, w1, w2);
            stage_state_nofloor(state, K2, h / 2, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K3, B, w1, w2);
            stage_state_nofloor(state, K3, h, XS, total);
            eval_field(&g, mode, XS, T, X, R, L, K4, B, w1, w2);
        }

        {
            v8 c = bcast(h / 6.0);
            for (size_t t = 0; t < total; t += 8) {
                v8 incr = c * (loadu(K1 + t)
                               + bcast(2.0) * (loadu(K2 + t) + loadu(K3 + t))
                               + loadu(K4 + t));
                storeu(state + t, loadu(state + t) + incr);
            }
        }

        if (simplex) {
            v8 fl = bcast(eps);
            for (size_t t = 0; t < total; t += 8) {
                v8 z = loadu(state + t);
                storeu(state + t, vfloor(z, fl));
            }
            for (long k = 0; k < N; k++) {
                double* xk = state + (size_t)noff[k] * B;
                for (long b = 0; b < B; b += 8) storeu(w1 + b, vzero());
                for (long r = 0; r < n[k]; r++)
                    for (long b = 0; b < B; b += 8)
                        storeu(w1 + b,
                               loadu(w1 + b) + loadu(xk + (size_t)r * B + b));
                if (renorm)
                    for (long r = 0; r < n[k]; r++)
                        for (long b = 0; b < B; b += 8)
                            storeu(xk + (size_t)r * B + b,
                                   loadu(xk + (size_t)r * B + b)
                                       / loadu(w1 + b));
                for (long b = 0; b < B; b++)
                    if (status[b] < 0 && !isfinite(w1[b])) status[b] = i + 1;
            }
        } else {
            for (long b = 0; b < B; b += 8) storeu(w1 + b, vzero());
            for (long r = 0; r < rows; r++)
                for (long b = 0; b < B; b += 8)
                    storeu(w1 + b,
                           loadu(w1 + b) + loadu(state + (size_t)r * B + b));
            for (long b = 0; b < B; b++)
                if (status[b] < 0 && !isfinite(w1[b])) status[b] = i + 1;
        }
    }

    if (resid) {
        if (mode == QD_MODE_FTRL) {
            /* induced simplex velocity: x*(R - <x,R>)/T, from final eval */
            qd_rd_field(X, R, K2, n, noff, N, B, w1);
            for (long k = 0; k < N; k++)
                for (long r = 0; r < n[k]; r++)
                    for (long b = 0; b < B; b++)
                        K2[((size_t)noff[k] + r) * B + b] /=
                            T[(size_t)k * B + b];
            for (long b = 0; b < B; b++) resid[b] = 0.0;
            for (size_t t = 0; t < total; t++) {
                double v = fabs(K2[t]);
                long b = (long)(t % B);
                if (v > resid[b]) resid[b] = v;
            }
        } else {
            for (long b = 0; b < B; b++) resid[b] = 0.0;
            for (size_t t = 0; t < total; t++) {
                double v = fabs(K1[t]);
                long b = (long)(t % B);
                if (v > resid[b]) resid[b] = v;
            }
        }
    }
    return nrec;
}
