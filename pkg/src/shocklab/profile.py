"""Viscous shock profiles from the first-integral ODE.

A profile connecting u_l at -inf to u_r at +inf (u_l > u_r) satisfies

    nu * phi'(x) = f(phi) - f(u_l) - s * (phi - u_l),   phi(0) = (u_l+u_r)/2,

where s is the Rankine-Hugoniot speed.  The table stores phi on a uniform
grid wide enough that both tails have decayed below 1e-12 of the jump;
beyond the table the exact linearized exponential asymptote is used.  The
normalized profile g = (phi - u_r)/(u_l - u_r) and its derivatives follow
from phi in closed form:

    g'  = G(phi) / (nu * (u_l - u_r)),        G(phi) := f(phi)-f(u_l)-s(phi-u_l)
    g'' = (f'(phi) - s) * G(phi) / (nu^2 * (u_l - u_r)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .flux import FluxModel, StatePair, evaluate

__all__ = [
    "ProfileError",
    "ProfileTable",
    "compute_profile",
    "profile_at",
    "g_ratio_bounds",
]

TAIL_TARGET = 1e-12  # required tail decay of g at the table edge


class ProfileError(Exception):
    pass


@dataclass
class ProfileTable:
    model: FluxModel
    states: StatePair
    nu: float
    grid: np.ndarray
    phi: np.ndarray
    g: np.ndarray
    gp: np.ndarray
    gpp: np.ndarray
    beta1: float
    beta2: float
    kappa_l: float  # tail rate of 1-g as x -> -inf
    kappa_r: float  # tail rate of g as x -> +inf
    _interp: PchipInterpolator = field(default=None, repr=False)

    def __post_init__(self):
        if self._interp is None:
            self._interp = PchipInterpolator(self.grid, self.phi, extrapolate=False)

    @property
    def jump(self) -> float:
        return self.states.jump

    def phi_at(self, y):
        """phi evaluated at arbitrary points, asymptote beyond the table."""
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        lo, hi = self.grid[0], self.grid[-1]
        inside = (y >= lo) & (y <= hi)
        out[inside] = self._interp(y[inside])
        left = y < lo
        right = y > hi
        if left.any():
            d0 = self.states.u_l - self.phi[0]
            out[left] = self.states.u_l - d0 * np.exp(self.kappa_l * (y[left] - lo))
        if right.any():
            d1 = self.phi[-1] - self.states.u_r
            out[right] = self.states.u_r + d1 * np.exp(-self.kappa_r * (y[right] - hi))
        return out


def _first_integral(model, states, nu):
    fl = evaluate(model, states.u_l, 0)
    s = states.s

    def G(phi):
        return evaluate(model, phi, 0) - fl - s * (phi - states.u_l)

    return G


def compute_profile(
    model: FluxModel,
    states: StatePair,
    nu: float,
    half_width: float | None = None,
    tol: float = 1e-10,
) -> ProfileTable:
    """Integrate the profile ODE both ways from x=0 and tabulate."""
    if states.u_l <= states.u_r:
        raise ProfileError(
            f"profile needs u_l > u_r, got ({states.u_l}, {states.u_r})"
        )
    if nu <= 0:
        raise ProfileError(f"viscosity must be positive, got {nu}")
    u_l, u_r, s = states.u_l, states.u_r, states.s
    delta = u_l - u_r
    G = _first_integral(model, states, nu)

    # exact linearized tail rates
    kappa_r = (s - evaluate(model, u_r, 1)) / nu
    kappa_l = (evaluate(model, u_l, 1) - s) / nu
    if kappa_r <= 0 or kappa_l <= 0:
        raise ProfileError("states do not satisfy the Lax entropy condition")

    if half_width is None:
        half_width = np.log(1.0 / TAIL_TARGET) / min(kappa_l, kappa_r) + 2.0 / min(
            kappa_l, kappa_r
        )

    # grid fine enough for the steepest interior slope and both tails
    phi_dense = np.linspace(u_r + 1e-9 * delta, u_l - 1e-9 * delta, 4001)
    slope_max = float(np.max(-np.asarray(G(phi_dense))) / nu)
    core_scale = delta / slope_max
    h = min(core_scale, 1.0 / max(kappa_l, kappa_r)) / 320.0
    n_half = int(np.ceil(half_width / h))
    n_half = min(n_half, 400_000)
    h = half_width / n_half

    def rhs(x, y):
        return G(y[0]) / nu

    cut = tol * delta

    def make_event(target, sign):
        def ev(x, y):
            return sign * (y[0] - target) - cut

        ev.terminal = True
        ev.direction = -1
        return ev

    mid = 0.5 * (u_l + u_r)
    xs_right = np.arange(0, n_half + 1) * h
    sol_r = solve_ivp(
        rhs,
        (0.0, half_width),
        [mid],
        method="DOP853",
        rtol=tol,
        atol=tol * delta,
        dense_output=True,
        events=make_event(u_r, +1.0),
    )
    xs_left = -xs_right
    sol_l = solve_ivp(
        rhs,
        (0.0, -half_width),
        [mid],
        method="DOP853",
        rtol=tol,
        atol=tol * delta,
        dense_output=True,
        events=make_event(u_l, -1.0),
    )
    if not (sol_r.success and sol_l.success):
        raise ProfileError("profile integration failed (stiffness / step underflow)")

    phi_r = _fill_half(sol_r, xs_right, u_r, -kappa_r)
    phi_l = _fill_half(sol_l, xs_left, u_l, kappa_l)

    grid = np.concatenate([xs_left[:0:-1], xs_right])
    phi = np.concatenate([phi_l[:0:-1], phi_r])
    phi = np.minimum(np.maximum(phi, u_r + 0.0), u_l - 0.0)

    g = (phi - u_r) / delta
    gp = np.asarray(G(phi)) / (nu * delta)
    gpp = (np.asarray(evaluate(model, phi, 1)) - s) * np.asarray(G(phi)) / (nu * nu * delta)

    beta1, beta2 = _ratio_extrema(g, gp, delta, kappa_l, kappa_r)
    return ProfileTable(
        model, states, nu, grid, phi, g, gp, gpp, beta1, beta2, kappa_l, kappa_r
    )


def _fill_half(sol, xs, end_state, rate):
    """Dense-output values on xs, exponential asymptote past the event."""
    x_stop = sol.t[-1]
    out = np.empty_like(xs)
    inside = np.abs(xs) <= np.abs(x_stop)
    out[inside] = sol.sol(xs[inside])[0]
    outside = ~inside
    if outside.any():
        d = sol.y[0, -1] - end_state
        out[outside] = end_state + d * np.exp(rate * (xs[outside] - x_stop))
    return out


def _ratio_extrema(g, gp, delta, kappa_l, kappa_r):
    w = g * (1.0 - g)
    safe = w > 1e-7
    ratio = -gp[safe] / (delta * w[safe])
    # the tail limits of the ratio are exact and free
    lims = (kappa_r / delta, kappa_l / delta)
    beta1 = float(min(ratio.min(), *lims))
    beta2 = float(max(ratio.max(), *lims))
    return beta1, beta2


def g_ratio_bounds(profile: ProfileTable) -> tuple[float, float]:
    """(beta1, beta2): grid min/max of -g' / ((u_l-u_r) g (1-g))."""
    return profile.beta1, profile.beta2


def profile_at(profile: ProfileTable, x, shift: float = 0.0):
    """(phi, g, g', g'') at x - shift, interpolating the table.

    Derivatives come from the first-integral closed forms applied to the
    interpolated phi, so the translation identity holds exactly.
    """
    y = np.asarray(x, dtype=float) - shift
    scalar = np.isscalar(x) or getattr(x, "ndim", 0) == 0
    phi = profile.phi_at(y)
    st = profile.states
    delta = st.jump
    G = _first_integral(profile.model, st, profile.nu)
    g = (phi - st.u_r) / delta
    gval = np.asarray(G(phi))
    gp = gval / (profile.nu * delta)
    gpp = (
        (np.asarray(evaluate(profile.model, phi, 1)) - st.s)
        * gval
        / (profile.nu**2 * delta)
    )
    if scalar:
        return float(phi), float(g), float(gp), float(gpp)
    return phi, g, gp, gpp
