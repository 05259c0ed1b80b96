"""Exact-solution oracle for viscous Burgers via the Hopf integral formula

    u(x,t) = ( int u0(y) exp(E(y)) dy ) / ( int exp(E(y)) dy ),
    E(y)   = -(x-y)^2 / (4 nu t) - (1/(2 nu)) int_0^y u0,

evaluated by composite Simpson quadrature over a window that covers every
saddle (|y - x| <= max|u0| t plus the Gaussian support), with running-max
subtraction in the exponent for overflow safety.

For shock-plus-periodic data u0 = phi + w0 the antiderivative of the
profile part is closed-form:

    int_0^x g = (1/(2 lambda)) [ log(1 - g(x)) + log 2 ],   lambda = (u_l-u_r)/(4 nu),

so only the periodic part needs a table.  The periodic components
u_l = P_l/Q_l, u_r = P_r/Q_r use the same machinery with u0 = ubar + w0.

``periodic_exact`` solves the same periodic problems via the heat-kernel
Fourier series of the Cole-Hopf potential in mpmath arbitrary precision;
that is what makes decay measurable far below double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .flux import StatePair
from .periodic import PerturbationSpec

__all__ = [
    "HopfData",
    "hopf_eval",
    "periodic_component_eval",
    "periodic_component_log_q",
    "coincidence_check",
    "coincidence_times",
    "burgers_profile",
    "burgers_g",
    "PeriodicExact",
]

TAIL_LOG = math.log(1e16)


def burgers_profile(x, states: StatePair, nu: float):
    """Closed-form Burgers profile: midpoint - (jump/2) tanh(lambda x)."""
    lam = states.jump / (4.0 * nu)
    mid = 0.5 * (states.u_l + states.u_r)
    return mid - 0.5 * states.jump * np.tanh(lam * np.asarray(x, dtype=float))


def burgers_g(x, states: StatePair, nu: float):
    lam = states.jump / (4.0 * nu)
    return 0.5 * (1.0 - np.tanh(lam * np.asarray(x, dtype=float)))


def _int_g(y, lam):
    """int_0^y g for the Burgers profile, stable in both tails."""
    y = np.asarray(y, dtype=float)
    z = 2.0 * lam * y
    # log(1 - g) = -log(1 + e^{-z}), written to avoid overflow
    log1mg = np.where(z >= 0, -np.log1p(np.exp(-np.abs(z))), z - np.log1p(np.exp(-np.abs(z))))
    return (log1mg + math.log(2.0)) / (2.0 * lam)


@dataclass(frozen=True)
class HopfData:
    """Initial data descriptor for the Hopf formula."""

    nu: float
    kind: str  # constant | profile | profile-plus-periodic | periodic | tabulated
    constant: float = 0.0
    states: StatePair | None = None
    spec: PerturbationSpec | None = None
    ubar: float = 0.0  # for kind == "periodic"
    table_x: tuple = ()
    table_u: tuple = ()

    @property
    def lam(self) -> float:
        if self.states is None:
            return 0.0
        return self.states.jump / (4.0 * self.nu)

    def u0(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return np.full_like(y, self.constant)
        if self.kind == "periodic":
            return self.ubar + self.spec.sample(y)
        if self.kind == "tabulated":
            return np.interp(y, np.asarray(self.table_x), np.asarray(self.table_u))
        out = burgers_profile(y, self.states, self.nu)
        if self.kind == "profile-plus-periodic":
            out = out + self.spec.sample(y)
        return out

    def u0_antiderivative(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return self.constant * y
        if self.kind == "periodic":
            return self.ubar * y + self.spec.antiderivative(y)
        if self.kind == "tabulated":
            xs = np.asarray(self.table_x)
            us = np.asarray(self.table_u)
            cum = np.concatenate([[0.0], np.cumsum(0.5 * (us[1:] + us[:-1]) * np.diff(xs))])
            i0 = np.searchsorted(xs, 0.0)
            base = np.interp(0.0, xs, cum)
            return np.interp(y, xs, cum) - base
        st = self.states
        out = st.u_r * y + st.jump * _int_g(y, self.lam)
        if self.kind == "profile-plus-periodic":
            out = out + self.spec.antiderivative(y)
        return out

    def max_abs_u0(self) -> float:
        if self.kind == "constant":
            return abs(self.constant)
        if self.kind == "periodic":
            return abs(self.ubar) + abs(self.spec.amplitude) * 1.5
        if self.kind == "tabulated":
            return float(np.max(np.abs(self.table_u)))
        st = self.states
        amp = abs(self.spec.amplitude) * 1.5 if self.spec is not None else 0.0
        return max(abs(st.u_l), abs(st.u_r)) + amp

    def length_scales(self) -> list[float]:
        scales = []
        if self.spec is not None:
            scales.append(self.spec.period)
        if self.states is not None:
            scales.append(2.0 / abs(self.lam))
        return scales or [1.0]


def _window(data: HopfData, t: float):
    """(half-width, node spacing) of the quadrature window around each x."""
    nu = data.nu
    gauss = math.sqrt(4.0 * nu * t * TAIL_LOG)
    R = gauss + data.max_abs_u0() * t + 4.0 * math.sqrt(4.0 * nu * t)
    h = min(min(data.length_scales()) / 256.0, math.sqrt(4.0 * nu * t) / 16.0)
    return R, h


def _log_simpson(weights_log, h):
    """log of a Simpson sum with log-space inputs: M + log(sum w e^(E-M))."""
    M = np.max(weights_log)
    n = weights_log.size
    coef = np.ones(n)
    coef[1:-1:2] = 4.0
    coef[2:-1:2] = 2.0
    return M + math.log(np.sum(coef * np.exp(weights_log - M)) * h / 3.0)


def _pq_arrays(data: HopfData, x, t, R, h):
    """Return (y, E(y)) for one evaluation point; y has odd length."""
    n = int(math.ceil(2.0 * R / h))
    if n % 2 == 1:
        n += 1
    y = np.linspace(x - R, x + R, n + 1)
    E = -((x - y) ** 2) / (4.0 * data.nu * t) - data.u0_antiderivative(y) / (
        2.0 * data.nu
    )
    return y, E


def hopf_eval(data: HopfData, x, t: float):
    """u(x, t) for t > 0; x scalar or 1-D array."""
    if t <= 0:
        raise ValueError(f"Hopf formula needs t > 0, got t={t}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    R, h = _window(data, t)
    n = int(math.ceil(2.0 * R / h))
    if n % 2 == 1:
        n += 1
    offs = np.linspace(-R, R, n + 1)
    coef = np.ones(n + 1)
    coef[1:-1:2] = 4.0
    coef[2:-1:2] = 2.0
    gauss = -(offs**2) / (4.0 * data.nu * t)
    out = np.empty_like(xs)
    # chunk the x sweep to bound the (len(x), len(offs)) temporary
    chunk = max(1, int(2e6) // (n + 1))
    for i0 in range(0, xs.size, chunk):
        xb = xs[i0 : i0 + chunk, None]
        y = xb + offs[None, :]
        E = gauss[None, :] - data.u0_antiderivative(y) / (2.0 * data.nu)
        M = np.max(E, axis=1, keepdims=True)
        w = coef[None, :] * np.exp(E - M)
        denom = np.sum(w, axis=1)
        numer = np.sum(w * data.u0(y), axis=1)
        out[i0 : i0 + chunk] = numer / denom
    return out[0] if np.isscalar(x) or getattr(x, "ndim", 1) == 0 else out


def _component_data(data: HopfData, side: str) -> HopfData:
    if data.states is None:
        raise ValueError("component evaluation needs shock-type data")
    ubar = data.states.u_l if side == "left" else data.states.u_r
    return HopfData(data.nu, "periodic", ubar=ubar, spec=data.spec)


def periodic_component_eval(data: HopfData, side: str, x, t: float):
    """u_side(x,t) = P_side/Q_side: the periodic solution with data
    ubar_side + w0, via the same Hopf quadrature."""
    return hopf_eval(_component_data(data, side), x, t)


def periodic_component_log_q(data: HopfData, side: str, x: float, t: float):
    """log Q_side(x, t) up to one common additive constant per (x, t):
    log of the Hopf denominator for the side's effective data."""
    comp = _component_data(data, side)
    R, h = _window(comp, t)
    y, E = _pq_arrays(comp, x, t, R, h)
    return _log_simpson(E, h)


def coincidence_times(data: HopfData, ks):
    p = data.spec.period
    return [k * p / data.states.jump for k in np.atleast_1d(ks)]


def coincidence_check(data: HopfData, k: int, x=None):
    """sup_x |u(x, t_k) - psi_{s t_k}(x, t_k)| at the lattice time
    t_k = k p / (u_l - u_r), with psi assembled from the two periodic
    components and the profile's g."""
    if data.states is None or data.spec is None:
        raise ValueError("coincidence check needs profile-plus-periodic data")
    st = data.states
    t_k = k * data.spec.period / st.jump
    if x is None:
        core = np.linspace(-6.0, 6.0, 1201)
        x = core + st.s * t_k
    x = np.asarray(x, dtype=float)
    u = hopf_eval(data, x, t_k)
    ul = periodic_component_eval(data, "left", x, t_k)
    ur = periodic_component_eval(data, "right", x, t_k)
    g = burgers_g(x - st.s * t_k, st, data.nu)
    psi = ul * g + ur * (1.0 - g)
    return float(np.max(np.abs(u - psi)))


class PeriodicExact:
    """Periodic viscous Burgers solution by Cole-Hopf + heat Fourier series,
    in mpmath arbitrary precision.

    With v solving the periodic heat equation from v(x,0) =
    exp(-W0(x)/(2 nu)), the solution with mean ubar is

        u(x,t) = ubar - 2 nu d/dx log v(x - ubar t, t),

    and v's Fourier modes decay exactly like exp(-nu (2 pi k / p)^2 t), so
    amplitudes far below double precision remain computable.
    """

    def __init__(self, spec: PerturbationSpec, nu: float, ubar: float,
                 modes: int = 6, dps: int = 40):
        if spec.kind not in ("sine", "cosine"):
            raise ValueError("exact periodic series supports sine/cosine data")
        self.spec = spec
        self.nu = nu
        self.ubar = ubar
        self.modes = modes
        self.dps = dps
        p = spec.period
        with mp.workdps(dps + 10):
            nuM = mp.mpf(repr(nu))
            pM = mp.mpf(repr(p))
            aM = mp.mpf(repr(spec.amplitude))
            phM = mp.mpf(repr(spec.phase))
            w = 2 * mp.pi / pM

            if spec.kind == "sine":
                def W0(xm):
                    return aM / w * (mp.cos(w * (0 - phM)) - mp.cos(w * (xm - phM)))
            else:
                def W0(xm):
                    return aM / w * (mp.sin(w * (xm - phM)) - mp.sin(w * (0 - phM)))

            def v0(xm):
                return mp.e ** (-W0(xm) / (2 * nuM))

            self._vhat = []
            for kk in range(modes + 1):
                re = mp.quad(lambda s: v0(s) * mp.cos(kk * w * s), [0, pM / 2, pM]) / pM
                im = mp.quad(lambda s: -v0(s) * mp.sin(kk * w * s), [0, pM / 2, pM]) / pM
                self._vhat.append(mp.mpc(re, im))
            self._w = w
            self._nuM = nuM

    def _dps_for(self, t: float) -> int:
        decay = self.nu * float(self._w) ** 2 * t
        return int(self.dps + decay / math.log(10.0)) + 10

    def w_eval(self, x, t: float):
        """Zero-mean perturbation w(x,t) = u(x,t) - ubar as mpf values."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = []
        with mp.workdps(self._dps_for(t)):
            tM = mp.mpf(repr(float(t)))
            shift = mp.mpf(repr(self.ubar)) * tM
            for xv in xs:
                xm = mp.mpf(repr(float(xv))) - shift
                v = self._vhat[0]
                vx = mp.mpc(0)
                for kk in range(1, self.modes + 1):
                    ek = mp.e ** (-self._nuM * (kk * self._w) ** 2 * tM)
                    ph = mp.e ** (mp.mpc(0, 1) * kk * self._w * xm)
                    term = self._vhat[kk] * ek * ph
                    v += term + mp.conj(term)
                    vx += mp.mpc(0, 1) * kk * self._w * (term - mp.conj(term))
                out.append(-2 * self._nuM * (vx / v).real)
        return out

    def sup_w(self, t: float, samples: int = 768) -> mp.mpf:
        """sup_x |w(x,t)| over a dense one-period grid."""
        xs = np.linspace(0.0, self.spec.period, samples, endpoint=False)
        vals = self.w_eval(xs, t)
        with mp.workdps(self._dps_for(t)):
            return max(abs(v) for v in vals)
