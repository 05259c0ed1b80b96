# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled stepping kernels; semantics mirror ``_kernels_py``.

The numeric core lives in ``_kernel_core.h`` (plain C with restrict
pointers; Cython's generated indexing was measurably slower).  This module
owns buffers, ghost bookkeeping and the time loop.
"""

import numpy as np

from libc.string cimport memcpy

BACKEND = "compiled"

cdef extern from "_kernel_core.h" nogil:
    enum:
        SL_TILE
        SL_CAP
    double sl_flux_f(int code, const double* p, double u)
    double sl_mean_excess(int n, const double* u, int code, const double* p,
                          double fbar)
    void sl_stage_field(int n, int periodic, const double* y, double gl,
                        double gr, const double* ubase, double* acc,
                        double* out, int mode, double c_out, int code,
                        const double* p, double dnu, double idx, double* tb,
                        double* tf, double* fb, double* pb, double* mm)
    void sl_rk4_line_tile(int a, int b, int n, const double* u, double* unew,
                          const double* gl4, const double* gr4, int code,
                          const double* p, double dnu, double idx, double dt,
                          double* mm, double* v, double* tf, double* bk,
                          double* bacc, double* fb, double* pb)


def advance_periodic(double[::1] u, int code, double[::1] par, double nu,
                     double dx, double dt, long nsteps, double ubar,
                     bint accumulate):
    """See ``_kernels_py.advance_periodic``."""
    cdef int n = u.shape[0]
    cdef double[::1] acc = np.empty(n)
    cdef double[::1] st = np.empty(n)
    cdef double[::1] tb = np.empty(SL_TILE + 2)
    cdef double[::1] tf = np.empty(SL_TILE + 1)
    cdef double[::1] fbs = np.empty(SL_CAP)
    cdef double[::1] pbs = np.empty(SL_CAP)
    cdef double excess = 0.0, i_prev = 0.0, i_cur, fbar = 0.0
    cdef double mm[2]
    cdef long step
    cdef double dnu = nu / (dx * dx)
    cdef double idx = 1.0 / dx
    cdef const double* p = &par[0]
    mm[0] = 1e300
    mm[1] = -1e300
    if accumulate:
        fbar = sl_flux_f(code, p, ubar)
        i_prev = sl_mean_excess(n, &u[0], code, p, fbar)
    with nogil:
        for step in range(nsteps):
            sl_stage_field(n, 1, &u[0], 0, 0, &u[0], &acc[0], &st[0], 0,
                           0.5 * dt, code, p, dnu, idx, &tb[0], &tf[0], &fbs[0], &pbs[0], mm)
            sl_stage_field(n, 1, &st[0], 0, 0, &u[0], &acc[0], &st[0], 1,
                           0.5 * dt, code, p, dnu, idx, &tb[0], &tf[0], &fbs[0], &pbs[0], mm)
            sl_stage_field(n, 1, &st[0], 0, 0, &u[0], &acc[0], &st[0], 1,
                           dt, code, p, dnu, idx, &tb[0], &tf[0], &fbs[0], &pbs[0], mm)
            sl_stage_field(n, 1, &st[0], 0, 0, &u[0], &acc[0], &u[0], 2,
                           dt / 6.0, code, p, dnu, idx, &tb[0], &tf[0], &fbs[0], &pbs[0], mm)
            if accumulate:
                i_cur = sl_mean_excess(n, &u[0], code, p, fbar)
                excess += 0.5 * (i_prev + i_cur) * dt
                i_prev = i_cur
    return excess, mm[0], mm[1]


def advance_coupled(double[::1] ul, double[::1] ur, double[::1] u, int code,
                    double[::1] par, double nu, double dx, double dt, long nsteps,
                    int gl_idx, int gr_idx, double ubar_l, double ubar_r,
                    bint accumulate):
    """See ``_kernels_py.advance_coupled``."""
    cdef int nl = ul.shape[0]
    cdef int nr = ur.shape[0]
    cdef int n = u.shape[0]
    cdef double[::1] acc_l = np.empty(nl), st_l = np.empty(nl)
    cdef double[::1] acc_r = np.empty(nr), st_r = np.empty(nr)
    cdef double[::1] ualt = np.empty(n)
    cdef double[::1] tb = np.empty(SL_TILE + 2)
    cdef double[::1] tfp = np.empty(SL_TILE + 1)
    cdef double[::1] v = np.empty(SL_CAP)
    cdef double[::1] tf = np.empty(SL_CAP)
    cdef double[::1] bk = np.empty(SL_CAP)
    cdef double[::1] bacc = np.empty(SL_TILE)
    cdef double[::1] fbs = np.empty(SL_CAP)
    cdef double[::1] pbs = np.empty(SL_CAP)
    cdef double excess_l = 0.0, excess_r = 0.0
    cdef double il_prev = 0.0, ir_prev = 0.0, il, ir
    cdef double fbar_l = 0.0, fbar_r = 0.0
    cdef double gl4[4]
    cdef double gr4[4]
    cdef double mmp[2]
    cdef double mm[2]
    cdef long step
    cdef int t, a, b, ntiles
    cdef double* cur
    cdef double* nxt
    cdef double* tmp
    cdef double dnu = nu / (dx * dx)
    cdef double idx = 1.0 / dx
    cdef const double* p = &par[0]
    mmp[0] = 1e300
    mmp[1] = -1e300
    mm[0] = 1e300
    mm[1] = -1e300
    if accumulate:
        fbar_l = sl_flux_f(code, p, ubar_l)
        fbar_r = sl_flux_f(code, p, ubar_r)
        il_prev = sl_mean_excess(nl, &ul[0], code, p, fbar_l)
        ir_prev = sl_mean_excess(nr, &ur[0], code, p, fbar_r)
    ntiles = (n + SL_TILE - 1) // SL_TILE
    cur = &u[0]
    nxt = &ualt[0]
    with nogil:
        for step in range(nsteps):
            # periodic trace fields (small, staged form); capture the
            # per-stage ghost values the fused line tiles need
            gl4[0] = ul[gl_idx]
            gr4[0] = ur[gr_idx]
            sl_stage_field(nl, 1, &ul[0], 0, 0, &ul[0], &acc_l[0], &st_l[0], 0,
                           0.5 * dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            sl_stage_field(nr, 1, &ur[0], 0, 0, &ur[0], &acc_r[0], &st_r[0], 0,
                           0.5 * dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            gl4[1] = st_l[gl_idx]
            gr4[1] = st_r[gr_idx]
            sl_stage_field(nl, 1, &st_l[0], 0, 0, &ul[0], &acc_l[0], &st_l[0],
                           1, 0.5 * dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            sl_stage_field(nr, 1, &st_r[0], 0, 0, &ur[0], &acc_r[0], &st_r[0],
                           1, 0.5 * dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            gl4[2] = st_l[gl_idx]
            gr4[2] = st_r[gr_idx]
            sl_stage_field(nl, 1, &st_l[0], 0, 0, &ul[0], &acc_l[0], &st_l[0],
                           1, dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            sl_stage_field(nr, 1, &st_r[0], 0, 0, &ur[0], &acc_r[0], &st_r[0],
                           1, dt, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            gl4[3] = st_l[gl_idx]
            gr4[3] = st_r[gr_idx]
            sl_stage_field(nl, 1, &st_l[0], 0, 0, &ul[0], &acc_l[0], &ul[0], 2,
                           dt / 6.0, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            sl_stage_field(nr, 1, &st_r[0], 0, 0, &ur[0], &acc_r[0], &ur[0], 2,
                           dt / 6.0, code, p, dnu, idx, &tb[0], &tfp[0], &fbs[0], &pbs[0], mmp)
            # fused line step
            for t in range(ntiles):
                a = t * SL_TILE
                b = a + SL_TILE
                if b > n:
                    b = n
                sl_rk4_line_tile(a, b, n, cur, nxt, gl4, gr4, code, p, dnu,
                                 idx, dt, mm, &v[0], &tf[0], &bk[0], &bacc[0],
                                 &fbs[0], &pbs[0])
            tmp = cur
            cur = nxt
            nxt = tmp
            if accumulate:
                il = sl_mean_excess(nl, &ul[0], code, p, fbar_l)
                ir = sl_mean_excess(nr, &ur[0], code, p, fbar_r)
                excess_l += 0.5 * (il_prev + il) * dt
                excess_r += 0.5 * (ir_prev + ir) * dt
                il_prev = il
                ir_prev = ir
        if cur != &u[0]:
            memcpy(&u[0], cur, n * sizeof(double))
    return excess_l, excess_r, mm[0], mm[1]
