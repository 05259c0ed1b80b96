"""Pure-numpy stepping kernels (fallback when the compiled core is absent).

Semantics match ``_kernels.pyx``: conservative finite volumes with a
central + local Lax-Friedrichs interface flux, explicit second-difference
diffusion, and classical RK4 in time.  The coupled kernel advances the two
periodic trace fields and the truncated-line field in lockstep; the line
ghost cells read the *staged* periodic values so the full system is one
RK4 integration.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _f(code, par, u):
    if code == 0:
        return 0.5 * u * u
    if code == 1:
        return 0.5 * par[0] * u * u
    if code == 2:
        return _gap_f(par, u)
    raise ValueError(f"unsupported flux code {code}")


def _fp(code, par, u):
    if code == 0:
        return u
    if code == 1:
        return par[0] * u
    if code == 2:
        return _gap_fp(par, u)
    raise ValueError(f"unsupported flux code {code}")


def _gap_f(par, u):
    u_lo, u_hi, h, c, d, omega, theta, f_lo, fp_lo = par
    out = np.where(u <= u_lo, 0.5 * c * u * u, 0.5 * u * u)
    mid = (u > u_lo) & (u < u_hi)
    if mid.any():
        s = (u[mid] - u_lo) / h
        i2s = s**5 * (0.5 - 0.5 * s + s * s / 7.0)
        is_ = s**4 * (2.5 + s * (-3.0 + s))
        iw = s**7 / 7.0 - 3.0 * s**8 / 8.0 + s**9 / 3.0 - s**10 / 10.0
        out[mid] = f_lo + fp_lo * h * s + h * h * (
            0.5 * c * s * s + d * (i2s + omega * is_ - theta * iw)
        )
    return out


def _gap_fp(par, u):
    u_lo, u_hi, h, c, d, omega, theta, f_lo, fp_lo = par
    out = np.where(u <= u_lo, c * u, u)
    mid = (u > u_lo) & (u < u_hi)
    if mid.any():
        s = (u[mid] - u_lo) / h
        is_ = s**4 * (2.5 + s * (-3.0 + s))
        ss = s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        w = s**6 * (1.0 - s) ** 3
        out[mid] = fp_lo + h * (c * s + d * (is_ + omega * ss - theta * w))
    return out


def _rhs_periodic(u, code, par, nu, dx):
    up = np.roll(u, -1)
    f = _f(code, par, u)
    fup = np.roll(f, -1)
    a = np.maximum(np.abs(_fp(code, par, u)), np.abs(_fp(code, par, up)))
    flux = 0.5 * (f + fup) - 0.5 * a * (up - u)  # F_{i+1/2}
    um = np.roll(u, 1)
    return -(flux - np.roll(flux, 1)) / dx + nu * (up - 2.0 * u + um) / (dx * dx)


def _rhs_line(u, gl, gr, code, par, nu, dx):
    ue = np.empty(u.size + 2)
    ue[0] = gl
    ue[1:-1] = u
    ue[-1] = gr
    f = _f(code, par, ue)
    fp = np.abs(_fp(code, par, ue))
    a = np.maximum(fp[:-1], fp[1:])
    flux = 0.5 * (f[:-1] + f[1:]) - 0.5 * a * (ue[1:] - ue[:-1])
    return -np.diff(flux) / dx + nu * (ue[2:] - 2.0 * ue[1:-1] + ue[:-2]) / (dx * dx)


def _excess(u, code, par, ubar):
    return float(np.mean(_f(code, par, u) - _f(code, par, np.asarray(ubar))))


def advance_periodic(u, code, par, nu, dx, dt, nsteps, ubar, accumulate):
    """RK4-advance a periodic field in place for nsteps.

    Returns (excess_integral, umin, umax): the trapezoid-in-time integral
    of the per-period mean flux excess over the advanced window, and the
    post-step extremes seen during it.
    """
    par = np.asarray(par, dtype=float)
    excess = 0.0
    umin = np.inf
    umax = -np.inf
    i_prev = _excess(u, code, par, ubar) if accumulate else 0.0
    for _ in range(nsteps):
        k1 = _rhs_periodic(u, code, par, nu, dx)
        k2 = _rhs_periodic(u + 0.5 * dt * k1, code, par, nu, dx)
        k3 = _rhs_periodic(u + 0.5 * dt * k2, code, par, nu, dx)
        k4 = _rhs_periodic(u + dt * k3, code, par, nu, dx)
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if accumulate:
            i_cur = _excess(u, code, par, ubar)
            excess += 0.5 * (i_prev + i_cur) * dt
            i_prev = i_cur
        umin = min(umin, float(u.min()))
        umax = max(umax, float(u.max()))
    return excess, umin, umax


def advance_coupled(
    ul, ur, u, code, par, nu, dx, dt, nsteps, gl_idx, gr_idx, ubar_l, ubar_r, accumulate
):
    """Lockstep RK4 of (left periodic, right periodic, line) fields.

    The line ghost cells are the staged periodic values at the grid-aligned
    wrap indices gl_idx / gr_idx.  Returns (excess_l, excess_r, umin, umax)
    where the excess integrals cover the advanced window and umin/umax are
    post-step line-field extremes.
    """
    par = np.asarray(par, dtype=float)
    excess_l = excess_r = 0.0
    umin = np.inf
    umax = -np.inf
    il_prev = _excess(ul, code, par, ubar_l) if accumulate else 0.0
    ir_prev = _excess(ur, code, par, ubar_r) if accumulate else 0.0
    for _ in range(nsteps):
        k1l = _rhs_periodic(ul, code, par, nu, dx)
        k1r = _rhs_periodic(ur, code, par, nu, dx)
        k1 = _rhs_line(u, ul[gl_idx], ur[gr_idx], code, par, nu, dx)

        sl = ul + 0.5 * dt * k1l
        sr = ur + 0.5 * dt * k1r
        su = u + 0.5 * dt * k1
        k2l = _rhs_periodic(sl, code, par, nu, dx)
        k2r = _rhs_periodic(sr, code, par, nu, dx)
        k2 = _rhs_line(su, sl[gl_idx], sr[gr_idx], code, par, nu, dx)

        sl = ul + 0.5 * dt * k2l
        sr = ur + 0.5 * dt * k2r
        su = u + 0.5 * dt * k2
        k3l = _rhs_periodic(sl, code, par, nu, dx)
        k3r = _rhs_periodic(sr, code, par, nu, dx)
        k3 = _rhs_line(su, sl[gl_idx], sr[gr_idx], code, par, nu, dx)

        sl = ul + dt * k3l
        sr = ur + dt * k3r
        su = u + dt * k3
        k4l = _rhs_periodic(sl, code, par, nu, dx)
        k4r = _rhs_periodic(sr, code, par, nu, dx)
        k4 = _rhs_line(su, sl[gl_idx], sr[gr_idx], code, par, nu, dx)

        ul += (dt / 6.0) * (k1l + 2.0 * k2l + 2.0 * k3l + k4l)
        ur += (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if accumulate:
            il = _excess(ul, code, par, ubar_l)
            ir = _excess(ur, code, par, ubar_r)
            excess_l += 0.5 * (il_prev + il) * dt
            excess_r += 0.5 * (ir_prev + ir) * dt
            il_prev, ir_prev = il, ir
        umin = min(umin, float(u.min()))
        umax = max(umax, float(u.max()))
    return excess_l, excess_r, umin, umax
