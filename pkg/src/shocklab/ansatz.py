"""Two-sided ansatz, shift ODE, and closed-form asymptotic shift.

The ansatz blends the two periodic solutions through the normalized
profile g centered at a shift xi:

    psi_xi(x,t) = u_l(x,t) g(x - xi) + u_r(x,t) (1 - g(x - xi)).

Requiring the ansatz defect to have zero total mass gives the shift ODE
X' = F(X, t) with

    F(xi,t) = int [ nu (u_l-u_r) g''_xi + (f(u_l)-f(u_r)) g'_xi ] dx
              / int (u_l-u_r) g'_xi dx,

initialized by the mass-balance selection at the first time the periodic
fields are separated by half the jump.  Before that time the denominator
may vanish; subtracting a large constant M from it gives the backward
extension used to relate the initializer to the t=0 data.

The asymptotic shift splits into a localized part (a spatial quadrature of
the initial data) and a periodic-oscillation part built from the two
excess-flux time integrals and antiderivative period averages; its
vanishing-viscosity limit is  -min W0l + min W0r  for the antiderivatives
W0 of the perturbations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .cauchy import LineRun, measure_shift
from .flux import FluxModel, evaluate
from .periodic import (
    PerturbationSpec,
    antiderivative_period_average,
    excess_flux_time_integral,
)
from .profile import ProfileTable, profile_at

__all__ = [
    "AnsatzContext",
    "ShiftTrajectory",
    "ShiftReport",
    "PreSeparationError",
    "ansatz_eval",
    "source_eval",
    "shift_rhs",
    "solve_shift_ode",
    "shift_formula",
    "inviscid_shift",
    "viscosity_rate_study",
]


class PreSeparationError(RuntimeError):
    """Shift ODE queried before the separation condition holds."""


@dataclass
class AnsatzContext:
    """Read-only bundle: profile + recorded periodic evolutions.

    Built from a line run that kept periodic snapshots; quadratures are
    truncated to |x - xi| <= R where the g-weights certify the error.
    """

    profile: ProfileTable
    times: np.ndarray
    ul_snaps: np.ndarray
    ur_snaps: np.ndarray
    dx: float
    p_l: float
    p_r: float
    nu: float
    model: FluxModel
    R: float = 0.0
    quad_tol: float = 1e-14

    @classmethod
    def from_line_run(cls, run: LineRun, quad_tol: float = 1e-12):
        if run.periodic_snaps_l is None:
            raise ValueError("line run must keep periodic snapshots")
        ctx = cls(
            run.profile,
            run.times,
            run.periodic_snaps_l,
            run.periodic_snaps_r,
            run.dx,
            run.w0l.period,
            run.w0r.period,
            run.nu,
            run.model,
            quad_tol=quad_tol,
        )
        return ctx

    def __post_init__(self):
        if self.R == 0.0:
            beta = self.profile.states.jump * self.profile.beta1
            self.R = math.log(1.0 / self.quad_tol) / beta + max(self.p_l, self.p_r)

    def _ext(self, snaps, p, x):
        n = snaps.shape[-1]
        idx = np.round(np.mod(x, p) / self.dx - 0.5).astype(int) % n
        return snaps[..., idx]

    def fields_at(self, t_index: int, x):
        """(u_l, u_r) sampled on arbitrary dx-lattice points x."""
        ul = self._ext(self.ul_snaps[t_index], self.p_l, x)
        ur = self._ext(self.ur_snaps[t_index], self.p_r, x)
        return ul, ur

    def window(self, xi: float):
        """dx-lattice quadrature window |x - xi| <= R (4k+1 points for the
        composite Boole rule)."""
        m = int(math.ceil(self.R / self.dx))
        m += (-m) % 4
        i0 = math.floor(xi / self.dx)
        return (np.arange(i0 - m, i0 + m + 1) + 0.5) * self.dx

    def dfield_at(self, t_index: int, x):
        """Spectral x-derivatives of the periodic fields on lattice x."""
        out = []
        for snaps, p in ((self.ul_snaps, self.p_l), (self.ur_snaps, self.p_r)):
            u = snaps[t_index]
            n = u.size
            k = 2.0j * np.pi * np.fft.rfftfreq(n, d=p / n)
            du = np.fft.irfft(k * np.fft.rfft(u), n)
            out.append(self._ext(du, p, x))
        return out


def ansatz_eval(ctx: AnsatzContext, xi: float, x, t_index: int):
    """psi_xi on lattice points x at record index t_index."""
    ul, ur = ctx.fields_at(t_index, np.asarray(x))
    g = profile_at(ctx.profile, np.asarray(x), xi)[1]
    return ul * g + ur * (1.0 - g)


def source_eval(ctx: AnsatzContext, xi: float, xi_dot: float, x, t_index: int):
    """Ansatz defect h_xi(x,t): the residual of psi_xi in the equation.

    Four terms: two transport mismatches weighted by g and 1-g, the
    cross-diffusion term on g', and the speed mismatch term on g'.
    """
    x = np.asarray(x, dtype=float)
    st = ctx.profile.states
    ul, ur = ctx.fields_at(t_index, x)
    dul, dur = ctx.dfield_at(t_index, x)
    phi, g, gp, _ = profile_at(ctx.profile, x, xi)
    psi = ul * g + ur * (1.0 - g)
    fp_psi = evaluate(ctx.model, psi, 1)
    fp_ul = evaluate(ctx.model, ul, 1)
    fp_ur = evaluate(ctx.model, ur, 1)
    fp_phi = evaluate(ctx.model, phi, 1)
    return (
        (fp_psi - fp_ul) * dul * g
        + (fp_psi - fp_ur) * dur * (1.0 - g)
        - 2.0 * ctx.nu * (dul - dur) * gp
        - (ul - ur) * (xi_dot - st.s + fp_phi - fp_psi) * gp
    )


def _boole(y, dx):
    """Composite Boole rule on 4k+1 equispaced samples (O(h^6))."""
    w = np.full(y.shape[-1], 32.0)
    w[0::4] = 14.0
    w[2::4] = 12.0
    w[0] = w[-1] = 7.0
    return float(np.dot(y, w) * (2.0 * dx / 45.0))


def _quadratures(ctx: AnsatzContext, xi: float, t_index: int):
    x = ctx.window(xi)
    ul, ur = ctx.fields_at(t_index, x)
    _, _, gp, gpp = profile_at(ctx.profile, x, xi)
    fl = evaluate(ctx.model, ul, 0)
    fr = evaluate(ctx.model, ur, 0)
    num = _boole(ctx.nu * (ul - ur) * gpp + (fl - fr) * gp, ctx.dx)
    den = _boole((ul - ur) * gp, ctx.dx)
    return num, den


def shift_rhs(ctx: AnsatzContext, xi: float, t_index: int,
              M: float = 0.0) -> float:
    """F(xi, t) (or its M-modified extension when M > 0)."""
    num, den = _quadratures(ctx, xi, t_index)
    den -= M
    if den >= 0.0:
        raise PreSeparationError(
            f"shift denominator {den:.3e} >= 0 at t index {t_index}"
        )
    return num / den


@dataclass
class ShiftTrajectory:
    t0: float
    x0: float
    times: np.ndarray
    X: np.ndarray
    shift_minus_st: np.ndarray
    x_inf: float
    back_times: np.ndarray | None = None
    back_X: np.ndarray | None = None
    M: float = 0.0
    xhat0: float = math.nan
    mass_residuals: np.ndarray = field(default_factory=lambda: np.empty(0))


def solve_shift_ode(ctx: AnsatzContext, run: LineRun, t_end: float | None = None,
                    backward: bool = False) -> ShiftTrajectory:
    """Integrate X' = F(X,t) forward from the mass-balance initializer.

    RK4 with steps spanning two record intervals so every stage lands on a
    recorded periodic snapshot.  With ``backward=True`` the M-modified ODE
    is integrated on [0, T0] as well and the t=0 identity residual
    M (X0 - Xhat0) + int (u0 - psi_{Xhat0}(.,0)) dx is reported.
    """
    times = ctx.times
    i0 = run.t0_index
    if i0 < 0:
        raise PreSeparationError("separation condition never held in the run")
    t0 = times[i0]
    x_grid = run.x
    ul_ext = ctx._ext(ctx.ul_snaps[i0], ctx.p_l, x_grid)
    ur_ext = ctx._ext(ctx.ur_snaps[i0], ctx.p_r, x_grid)
    usnap = run.snapshots.get(float(t0))
    if usnap is None and t0 == 0.0:
        from .cauchy import make_initial

        usnap = make_initial(ctx.profile, run.w0l, run.w0r, x_grid)
    if usnap is None:
        raise ValueError(f"line snapshot at T0={t0} required to initialize X0")
    x0 = measure_shift(usnap, ul_ext, ur_ext, ctx.profile, x_grid, ctx.dx,
                       guess=run.states.s * t0)

    i_last = len(times) - 1
    if t_end is not None:
        i_last = int(np.searchsorted(times, t_end + 1e-12))
        i_last = min(i_last, len(times) - 1)
    if (i_last - i0) % 2 == 1:
        i_last -= 1

    ts = [t0]
    xs = [x0]
    mass = []
    X = x0
    for j in range(i0, i_last, 2):
        h = times[j + 2] - times[j]
        k1 = shift_rhs(ctx, X, j)
        k2 = shift_rhs(ctx, X + 0.5 * h * k1, j + 1)
        k3 = shift_rhs(ctx, X + 0.5 * h * k2, j + 1)
        k4 = shift_rhs(ctx, X + h * k3, j + 2)
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ts.append(times[j + 2])
        xs.append(X)
    ts = np.asarray(ts)
    xs = np.asarray(xs)
    s = run.states.s
    drift = xs - s * ts
    x_inf = float(drift[-1])

    bt = bX = None
    M = 0.0
    xhat0 = math.nan
    if backward and i0 > 0:
        # M = 2 max_t sup_xi |denominator| + 1 satisfies the margin condition
        peak = 0.0
        xi_probe = np.linspace(x0 - 2.0, x0 + 2.0, 9)
        for j in range(0, i0 + 1):
            for xp in xi_probe:
                peak = max(peak, abs(_quadratures(ctx, xp, j)[1]))
        M = 2.0 * peak + 1.0
        Xb = x0
        bts = [t0]
        bxs = [x0]
        j = i0
        if j % 2 == 1:
            # one trapezoidal step so the remaining pairs land on index 0
            h = times[j - 1] - times[j]
            k1 = shift_rhs(ctx, Xb, j, M)
            k2 = shift_rhs(ctx, Xb + h * k1, j - 1, M)
            Xb = Xb + 0.5 * h * (k1 + k2)
            j -= 1
            bts.append(times[j])
            bxs.append(Xb)
        while j >= 2:
            h = times[j - 2] - times[j]  # negative
            k1 = shift_rhs(ctx, Xb, j, M)
            k2 = shift_rhs(ctx, Xb + 0.5 * h * k1, j - 1, M)
            k3 = shift_rhs(ctx, Xb + 0.5 * h * k2, j - 1, M)
            k4 = shift_rhs(ctx, Xb + h * k3, j - 2, M)
            Xb = Xb + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            j -= 2
            bts.append(times[j])
            bxs.append(Xb)
        bt = np.asarray(bts[::-1])
        bX = np.asarray(bxs[::-1])
        xhat0 = float(bX[0])

    return ShiftTrajectory(float(t0), float(x0), ts, xs, drift, x_inf,
                           bt, bX, M, xhat0)


@dataclass
class ShiftReport:
    nu: float
    x_inf_1: float
    x_inf_2: float
    x_inf: float
    x_inf_2_inviscid: float
    err_bound: float
    excess_left: float
    excess_right: float
    antideriv_avg_left: float
    antideriv_avg_right: float


def localized_shift_part(profile: ProfileTable, w0l: PerturbationSpec,
                         w0r: PerturbationSpec, u0=None, x=None) -> float:
    """int_-inf^0 (u0 - phi - w0l) + int_0^inf (u0 - phi - w0r).

    For the blended initial data this reduces to integrals of
    (w0r - w0l)(1-g) and (w0l - w0r) g, which vanish identically for equal
    perturbations.
    """
    if u0 is not None:
        x = np.asarray(x, dtype=float)
        phi = profile_at(profile, x)[0]
        corr = np.where(x < 0, w0l.sample(x), w0r.sample(x))
        return float(simpson(np.asarray(u0) - phi - corr, x=x))
    beta = profile.states.jump * profile.beta1
    R = math.log(1e14) / beta + max(w0l.period, w0r.period)
    n = max(2001, int(R / min(w0l.period, w0r.period) * 512) | 1)
    xl = np.linspace(-R, 0.0, n)
    xr = np.linspace(0.0, R, n)
    g_l = profile_at(profile, xl)[1]
    g_r = profile_at(profile, xr)[1]
    dl = (w0r.sample(xl) - w0l.sample(xl)) * (1.0 - g_l)
    dr = (w0l.sample(xr) - w0r.sample(xr)) * g_r
    return float(simpson(dl, x=xl) + simpson(dr, x=xr))


def shift_formula(
    model: FluxModel,
    profile: ProfileTable,
    w0l: PerturbationSpec,
    w0r: PerturbationSpec,
    dx: float,
    tol: float = 1e-13,
    u0=None,
    x=None,
    excess: tuple | None = None,
) -> ShiftReport:
    """Closed-form asymptotic shift: localized part + oscillation part.

    The oscillation part runs the two periodic problems to convergence
    (or reuses precomputed excess integrals passed as
    ``excess = (value_l, err_l, value_r, err_r)``).
    """
    st = profile.states
    x1 = localized_shift_part(profile, w0l, w0r, u0=u0, x=x)
    if excess is None:
        el, eel, _ = excess_flux_time_integral(model, w0l, st.u_l, profile.nu, dx, tol)
        er, eer, _ = excess_flux_time_integral(model, w0r, st.u_r, profile.nu, dx, tol)
    else:
        el, eel, er, eer = excess
    al = antiderivative_period_average(w0l)
    ar = antiderivative_period_average(w0r)
    x2 = (el - al) - (er - ar)
    err = eel + eer + 1e-12
    x_inf = (x1 + x2) / st.jump
    x20 = inviscid_shift(w0l, w0r)
    return ShiftReport(profile.nu, x1, x2, x_inf, x20, err, el, er, al, ar)


def _refined_min(W, xs):
    i = int(np.argmin(W))
    if 0 < i < W.size - 1:
        y0, y1, y2 = W[i - 1], W[i], W[i + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom > 0:
            # vertex of the parabola through the three samples
            delta = 0.5 * (y0 - y2) / denom
            return float(y1 - 0.25 * (y0 - y2) * delta)
    return float(W[i])


def inviscid_shift(w0l: PerturbationSpec, w0r: PerturbationSpec,
                   samples: int = 100_000) -> float:
    """Vanishing-viscosity limit of the oscillation shift:
    -min_x W0l(x) + min_x W0r(x), minima over one period by dense
    sampling refined with a local quadratic fit."""
    out = []
    for spec in (w0l, w0r):
        xs = np.linspace(0.0, spec.period, samples, endpoint=False)
        W = spec.antiderivative(xs)
        out.append(_refined_min(W, xs))
    return -out[0] + out[1]


@dataclass
class RateStudy:
    nus: np.ndarray
    x2: np.ndarray
    x2_inviscid: float
    discrepancy: np.ndarray
    err_bounds: np.ndarray
    order: float
    order_stderr: float
    decreasing_in_nu: bool
    degenerate: bool
    trajectories: list = field(default_factory=list)


def viscosity_rate_study(
    model: FluxModel,
    w0: PerturbationSpec,
    ubar_l: float,
    ubar_r: float,
    nus,
    dx: float,
    tol: float = 1e-13,
) -> RateStudy:
    """|X_inf2(nu) - X_inf2(0)| across a viscosity sweep with a log-log
    order fit.  The discrepancy sequence may be non-monotone (the theory
    gives only an upper bound); that is flagged, not fatal."""
    nus = np.asarray(sorted(nus, reverse=True), dtype=float)
    if nus.size < 4 or nus.max() / nus.min() < 10.0:
        raise ValueError("need >= 4 viscosities spanning at least one decade")
    al = antiderivative_period_average(w0)
    x20 = inviscid_shift(w0, w0)
    x2s, errs, trajs = [], [], []
    for nu in nus:
        el, eel, tl = excess_flux_time_integral(model, w0, ubar_l, nu, dx, tol)
        er, eer, tr = excess_flux_time_integral(model, w0, ubar_r, nu, dx, tol)
        x2s.append((el - al) - (er - al))
        errs.append(eel + eer)
        trajs.append((tl, tr))
    x2s = np.asarray(x2s)
    errs = np.asarray(errs)
    d = np.abs(x2s - x20)
    degenerate = bool(np.all(d <= 10.0 * (errs + 1e-12)))
    if degenerate:
        return RateStudy(nus, x2s, x20, d, errs, math.inf, 0.0, True, True, trajs)
    ln, ld = np.log(nus), np.log(np.maximum(d, 1e-300))
    coef, cov = np.polyfit(ln, ld, 1, cov=True)
    order = float(coef[0])
    stderr = float(np.sqrt(cov[0, 0]))
    decreasing = bool(np.all(np.diff(d) <= 0))  # along decreasing nu
    return RateStudy(nus, x2s, x20, d, errs, order, stderr, decreasing, False,
                     trajs)
