#ifndef QLDYN_KERN_H
#define QLDYN_KERN_H

void qd_nf_rewards(const double* U, const long* uoff, const long* n,
                   const long* noff, long N, const double* X, double* R,
                   long B, double* s1, double* s2, double* kt);

void qd_poly_rewards(const double* A, const long* aoff, const long* ek,
                     const long* el, long nedges, const long* n,
                     const long* noff, long N, const double* X, double* R,
                     long B);

long qd_integrate(int is_poly, const double* U, const long* uoff,
                  const double* A, const long* aoff, const long* ek,
                  const long* el, long nedges, const long* n,
                  const long* noff, long N, int mode, double* state,
                  const double* T, long B, double h, long steps, long stride,
                  double eps, int renorm, double* traj, double* traj_y,
                  double* sw, double* resid, long* status, double* XS,
                  double* X, double* R, double* L, double* K1, double* K2,
                  double* K3, double* K4, double* s1, double* s2, double* kt,
                  double* w1, double* w2);

#endif
