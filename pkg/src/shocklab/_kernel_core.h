/* Numeric core of the stepping kernels.
 *
 * Conservative finite volumes with a central + local Lax-Friedrichs
 * interface flux, explicit second-difference diffusion, classical RK4.
 * Included by the Cython wrapper (_kernels.pyx); the wrapper owns all
 * buffer allocation and the time loop bookkeeping.
 */
#ifndef SHOCKLAB_KERNEL_CORE_H
#define SHOCKLAB_KERNEL_CORE_H

#include <math.h>
#include <string.h>

#define SL_TILE 1024
#define SL_HALO 4
#define SL_CAP (SL_TILE + 2 * SL_HALO + 4)

/* flux kinds: 0 burgers, 1 quadratic, 2 gap.
 * gap params p = [u_lo, u_hi, h, c, d, omega, theta, f_lo, fp_lo] */

static inline double sl_gap_f(const double *restrict p, double u) {
    if (u <= p[0]) return 0.5 * p[3] * u * u;
    if (u >= p[1]) return 0.5 * u * u;
    double s = (u - p[0]) / p[2];
    double i2s = s * s * s * s * s * (0.5 + s * (-0.5 + s / 7.0));
    double is = s * s * s * s * (2.5 + s * (-3.0 + s));
    double iw = s * s * s * s * s * s * s *
                (1.0 / 7.0 + s * (-3.0 / 8.0 + s * (1.0 / 3.0 - s / 10.0)));
    return p[7] + p[8] * p[2] * s +
           p[2] * p[2] * (0.5 * p[3] * s * s + p[4] * (i2s + p[5] * is - p[6] * iw));
}

static inline double sl_gap_fp(const double *restrict p, double u) {
    if (u <= p[0]) return p[3] * u;
    if (u >= p[1]) return u;
    double s = (u - p[0]) / p[2];
    double is = s * s * s * s * (2.5 + s * (-3.0 + s));
    double ss = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    double oms = 1.0 - s;
    double w = s * s * s * s * s * s * oms * oms * oms;
    return p[8] + p[2] * (p[3] * s + p[4] * (is + p[5] * ss - p[6] * w));
}

static inline double sl_flux_f(int code, const double *restrict p, double u) {
    if (code == 0) return 0.5 * u * u;
    if (code == 1) return 0.5 * p[0] * u * u;
    return sl_gap_f(p, u);
}

/* sl_mean_excess defined after the branchless gap helpers */

/* branchless gap f and |f'|: evaluate the blend polynomial at the clamped
 * coordinate and select the quadratic pieces by comparison, so the loops
 * vectorize. Values match sl_gap_f / sl_gap_fp exactly. */
static inline double sl_gap_f_bl(const double *restrict p, double u) {
    double s = (u - p[0]) / p[2];
    s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
    double i2s = s * s * s * s * s * (0.5 + s * (-0.5 + s / 7.0));
    double is = s * s * s * s * (2.5 + s * (-3.0 + s));
    double iw = s * s * s * s * s * s * s *
                (1.0 / 7.0 + s * (-3.0 / 8.0 + s * (1.0 / 3.0 - s / 10.0)));
    double blend = p[7] + p[8] * p[2] * s +
                   p[2] * p[2] * (0.5 * p[3] * s * s + p[4] * (i2s + p[5] * is - p[6] * iw));
    double lowq = 0.5 * p[3] * u * u;
    double highq = 0.5 * u * u;
    double out = u <= p[0] ? lowq : blend;
    return u >= p[1] ? highq : out;
}

static inline double sl_gap_absfp_bl(const double *restrict p, double u) {
    double s = (u - p[0]) / p[2];
    s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
    double is = s * s * s * s * (2.5 + s * (-3.0 + s));
    double ss = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    double oms = 1.0 - s;
    double w = s * s * s * s * s * s * oms * oms * oms;
    double blend = p[8] + p[2] * (p[3] * s + p[4] * (is + p[5] * ss - p[6] * w));
    double out = u <= p[0] ? p[3] * u : blend;
    out = u >= p[1] ? u : out;
    return fabs(out);
}

__attribute__((noinline)) static double sl_mean_excess(int n, const double *restrict u, int code,
                             const double *restrict p, double fbar) {
    double acc = 0.0;
    if (code == 0) {
        for (int i = 0; i < n; i++) acc += 0.5 * u[i] * u[i] - fbar;
    } else if (code == 1) {
        for (int i = 0; i < n; i++) acc += 0.5 * p[0] * u[i] * u[i] - fbar;
    } else {
        for (int i = 0; i < n; i++) acc += sl_gap_f_bl(p, u[i]) - fbar;
    }
    return acc / n;
}

/* tf[j] = interface flux between v[j] and v[j+1], j in [0, nv-1).
 * fb/pb are caller scratch (>= nv) used by the gap kind to cache the
 * per-point flux values instead of evaluating them twice. */
__attribute__((noinline)) static void sl_flux_pass(int nv, const double *restrict v, double *restrict tf,
                         int code, const double *restrict p,
                         double *restrict fb, double *restrict pb) {
    if (code == 0) {
        for (int j = 0; j < nv - 1; j++) {
            double uL = v[j], uR = v[j + 1];
            double pL = fabs(uL), pR = fabs(uR);
            double a = pL > pR ? pL : pR;
            tf[j] = 0.25 * (uL * uL + uR * uR) - 0.5 * a * (uR - uL);
        }
    } else if (code == 1) {
        double q = p[0];
        for (int j = 0; j < nv - 1; j++) {
            double uL = v[j], uR = v[j + 1];
            double pL = fabs(q * uL), pR = fabs(q * uR);
            double a = pL > pR ? pL : pR;
            tf[j] = 0.25 * q * (uL * uL + uR * uR) - 0.5 * a * (uR - uL);
        }
    } else {
        for (int j = 0; j < nv; j++) {
            fb[j] = sl_gap_f_bl(p, v[j]);
            pb[j] = sl_gap_absfp_bl(p, v[j]);
        }
        for (int j = 0; j < nv - 1; j++) {
            double a = pb[j] > pb[j + 1] ? pb[j] : pb[j + 1];
            tf[j] = 0.5 * (fb[j] + fb[j + 1]) - 0.5 * a * (v[j + 1] - v[j]);
        }
    }
}

/* One RK stage of one full field (periodic wrap or ghost-closed line),
 * k = L(y), tiled so scratch stays in L1.
 *   mode 0:  acc[i]  = k;            out[i] = ubase[i] + c_out * k
 *   mode 1:  acc[i] += 2 k;          out[i] = ubase[i] + c_out * k
 *   mode 2:  out[i]  = ubase[i] + c_out * (acc[i] + k), min/max into mm
 */
__attribute__((noinline)) static void sl_stage_field(int n, int periodic, const double *restrict y,
                           double gl, double gr, const double *restrict ubase,
                           double *restrict acc, double *restrict out, int mode,
                           double c_out, int code, const double *restrict p,
                           double dnu, double idx, double *restrict tb,
                           double *restrict tf, double *restrict fb,
                           double *restrict pb, double *restrict mm) {
    for (int a = 0; a < n; a += SL_TILE) {
        int b = a + SL_TILE > n ? n : a + SL_TILE;
        int m = b - a;
        /* tb[j] = y[a-1+j] for j in [0, m+1] */
        memcpy(tb + 1, y + a, (size_t)m * sizeof(double));
        tb[0] = (a == 0) ? (periodic ? y[n - 1] : gl) : y[a - 1];
        tb[m + 1] = (b == n) ? (periodic ? y[0] : gr) : y[b];
        sl_flux_pass(m + 2, tb, tf, code, p, fb, pb);
        if (mode == 0) {
            for (int j = 0; j < m; j++) {
                double k = -(tf[j + 1] - tf[j]) * idx +
                           dnu * (tb[j + 2] - 2.0 * tb[j + 1] + tb[j]);
                acc[a + j] = k;
                out[a + j] = ubase[a + j] + c_out * k;
            }
        } else if (mode == 1) {
            for (int j = 0; j < m; j++) {
                double k = -(tf[j + 1] - tf[j]) * idx +
                           dnu * (tb[j + 2] - 2.0 * tb[j + 1] + tb[j]);
                acc[a + j] += 2.0 * k;
                out[a + j] = ubase[a + j] + c_out * k;
            }
        } else {
            for (int j = 0; j < m; j++) {
                double k = -(tf[j + 1] - tf[j]) * idx +
                           dnu * (tb[j + 2] - 2.0 * tb[j + 1] + tb[j]);
                double val = ubase[a + j] + c_out * (acc[a + j] + k);
                out[a + j] = val;
                if (val < mm[0]) mm[0] = val;
                if (val > mm[1]) mm[1] = val;
            }
        }
    }
}

/* All four RK stages of the line field on the tile [a, b); intermediates
 * never leave the local buffers, so u is read and unew written once per
 * cell and step.  gl4/gr4 are the per-stage ghost values from the periodic
 * trace fields.  Arithmetic identical to the staged form. */
__attribute__((noinline)) static void sl_rk4_line_tile(int a, int b, int n, const double *restrict u,
                             double *restrict unew, const double *restrict gl4,
                             const double *restrict gr4, int code,
                             const double *restrict p, double dnu, double idx,
                             double dt, double *restrict mm, double *restrict v,
                             double *restrict tf, double *restrict bk,
                             double *restrict bacc, double *restrict fb,
                             double *restrict pb) {
    const double cs[4] = {0.5 * dt, 0.5 * dt, dt, dt / 6.0};
    int base = a - SL_HALO;
    for (int ell = 0; ell < 4; ell++) {
        int lo = a - (3 - ell);
        int hi = b + (3 - ell);
        if (lo < 0) lo = 0;
        if (hi > n) hi = n;
        /* stage input on [lo-1, hi] into v, ghosts closing the ends */
        if (ell == 0) {
            v[0] = (lo - 1 == -1) ? gl4[0] : u[lo - 1];
            memcpy(v + 1, u + lo, (size_t)(hi - lo) * sizeof(double));
            v[hi - (lo - 1)] = (hi == n) ? gr4[0] : u[hi];
        } else {
            double c = cs[ell - 1];
            v[0] = (lo - 1 == -1) ? gl4[ell] : u[lo - 1] + c * bk[lo - 1 - base];
            for (int q = lo; q < hi; q++)
                v[q - (lo - 1)] = u[q] + c * bk[q - base];
            v[hi - (lo - 1)] = (hi == n) ? gr4[ell] : u[hi] + c * bk[hi - base];
        }
        sl_flux_pass(hi - lo + 2, v, tf, code, p, fb, pb);
#define SL_K(q) (-(tf[(q) - lo + 1] - tf[(q) - lo]) * idx + \
                 dnu * (v[(q) - lo + 2] - 2.0 * v[(q) - lo + 1] + v[(q) - lo]))
        if (ell == 0) {
            for (int q = lo; q < a; q++) bk[q - base] = SL_K(q);
            for (int q = a; q < b; q++) {
                double k = SL_K(q);
                bk[q - base] = k;
                bacc[q - a] = k;
            }
            for (int q = b; q < hi; q++) bk[q - base] = SL_K(q);
        } else if (ell < 3) {
            for (int q = lo; q < a; q++) bk[q - base] = SL_K(q);
            for (int q = a; q < b; q++) {
                double k = SL_K(q);
                bk[q - base] = k;
                bacc[q - a] += 2.0 * k;
            }
            for (int q = b; q < hi; q++) bk[q - base] = SL_K(q);
        } else {
            /* final stage: only [a, b) matters and bk is dead afterwards */
            for (int q = a; q < b; q++) {
                double val = u[q] + cs[3] * (bacc[q - a] + SL_K(q));
                unew[q] = val;
                if (val < mm[0]) mm[0] = val;
                if (val > mm[1]) mm[1] = val;
            }
        }
#undef SL_K
    }
}

#endif /* SHOCKLAB_KERNEL_CORE_H */
