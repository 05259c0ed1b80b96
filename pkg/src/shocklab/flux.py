"""Strictly convex flux models for scalar conservation laws.

Supported kinds:

* ``burgers``      -- f(u) = u^2/2
* ``quadratic``    -- f(u) = a*u^2/2 with a > 0
* ``gap``          -- f(u) = u^2/(2n) for u <= u_lo and f(u) = u^2/2 for
  u >= u_hi, joined by a C^2 strictly convex blend (see
  :func:`build_gap_flux`)
* ``tabulated``    -- user-supplied samples, spline-evaluated

Every model carries an evaluation domain and a convexity certificate
``c0 = min f''`` obtained by dense sampling; ``c0 > 0`` is enforced at
construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FluxError",
    "FluxDomainError",
    "FluxConstructionError",
    "FluxModel",
    "StatePair",
    "burgers_flux",
    "quadratic_flux",
    "build_gap_flux",
    "tabulated_flux",
    "evaluate",
    "shock_speed",
]

KIND_CODES = {"burgers": 0, "quadratic": 1, "gap": 2, "tabulated": 3}

CERT_SAMPLES = 10_000


class FluxError(Exception):
    pass


class FluxDomainError(FluxError):
    pass


class FluxConstructionError(FluxError):
    pass


def _smoothstep(s):
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s))


def _smoothstep_int(s):
    # int_0^s S
    return s**4 * (2.5 + s * (-3.0 + s))


def _smoothstep_int2(s):
    # int_0^s int S
    return s**5 * (0.5 - 0.5 * s + s * s / 7.0)


def _vee(s):
    # S'(s) = 30 s^2 (1-s)^2
    return 30.0 * (s * (1.0 - s)) ** 2


def _dub(s):
    # W(s) = s^6 (1-s)^3
    return s**6 * (1.0 - s) ** 3


def _dub_prime(s):
    return 3.0 * s**5 * (1.0 - s) ** 2 * (2.0 - 3.0 * s)


def _dub_int(s):
    # int_0^s W
    return s**7 / 7.0 - 3.0 * s**8 / 8.0 + s**9 / 3.0 - s**10 / 10.0


@dataclass(frozen=True)
class FluxModel:
    """A smooth strictly convex flux with a certified convexity floor."""

    kind: str
    u_min: float
    u_max: float
    c0: float
    params: tuple = ()
    _spline: object = field(default=None, repr=False, compare=False)

    def __call__(self, u, order: int = 0):
        return evaluate(self, u, order)

    def kernel_params(self) -> np.ndarray:
        """Flat parameter vector consumed by the stepping kernels."""
        if self.kind == "burgers":
            return np.zeros(1)
        if self.kind == "quadratic":
            return np.array([self.params[0]])
        if self.kind == "gap":
            return np.asarray(self.params, dtype=float)
        raise FluxError(f"kind {self.kind!r} has no compiled kernel support")

    @property
    def kind_code(self) -> int:
        return KIND_CODES[self.kind]

    def max_abs_slope(self, lo: float, hi: float) -> float:
        """max |f'| over [lo, hi]; exact because f' is increasing."""
        return max(abs(float(evaluate(self, lo, 1))), abs(float(evaluate(self, hi, 1))))


def _check_domain(model: FluxModel, u):
    arr = np.asarray(u, dtype=float)
    lo = arr.min() if arr.size else model.u_min
    hi = arr.max() if arr.size else model.u_min
    if lo < model.u_min or hi > model.u_max:
        bad = lo if lo < model.u_min else hi
        raise FluxDomainError(
            f"u={bad!r} outside evaluation domain [{model.u_min}, {model.u_max}]"
        )
    return arr


def evaluate(model: FluxModel, u, order: int = 0):
    """Return f, f' or f'' at u (scalar or array).

    Quadratic pieces of the gap flux are evaluated in closed form.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    arr = _check_domain(model, u)
    scalar = np.isscalar(u) or getattr(u, "ndim", 0) == 0
    if model.kind == "burgers":
        out = {0: 0.5 * arr * arr, 1: arr, 2: np.ones_like(arr)}[order]
    elif model.kind == "quadratic":
        a = model.params[0]
        out = {0: 0.5 * a * arr * arr, 1: a * arr, 2: np.full_like(arr, a)}[order]
    elif model.kind == "gap":
        out = _gap_eval(model.params, arr, order)
    elif model.kind == "tabulated":
        out = model._spline(arr, nu=order)
    else:  # pragma: no cover
        raise FluxError(f"unknown kind {model.kind!r}")
    return float(out) if scalar else out


def _gap_eval(params, u, order):
    u_lo, u_hi, h, c, d, omega, theta, f_lo, fp_lo = params
    u = np.asarray(u, dtype=float)
    left = u <= u_lo
    right = u >= u_hi
    mid = ~(left | right)
    out = np.empty_like(u)
    if order == 0:
        out[left] = 0.5 * c * u[left] ** 2
        out[right] = 0.5 * u[right] ** 2
    elif order == 1:
        out[left] = c * u[left]
        out[right] = u[right]
    else:
        out[left] = c
        out[right] = 1.0
    if mid.any():
        s = (u[mid] - u_lo) / h
        if order == 2:
            blend = _smoothstep(s) + omega * _vee(s) - theta * _dub_prime(s)
            out[mid] = c + d * blend
        elif order == 1:
            iblend = _smoothstep_int(s) + omega * _smoothstep(s) - theta * _dub(s)
            out[mid] = fp_lo + h * (c * s + d * iblend)
        else:
            i2 = (
                _smoothstep_int2(s)
                + omega * _smoothstep_int(s)
                - theta * _dub_int(s)
            )
            out[mid] = f_lo + fp_lo * h * s + h * h * (0.5 * c * s * s + d * i2)
    return out


def _certify(model: FluxModel, resolution: int = CERT_SAMPLES) -> FluxModel:
    grid = np.linspace(model.u_min, model.u_max, resolution)
    fpp = evaluate(model, grid, 2)
    c0 = float(np.min(fpp))
    if c0 <= 0.0:
        raise FluxConstructionError(f"convexity violated: min f'' = {c0}")
    object.__setattr__(model, "c0", c0)
    return model


def burgers_flux(u_min: float = -50.0, u_max: float = 50.0) -> FluxModel:
    return _certify(FluxModel("burgers", u_min, u_max, 1.0))


def quadratic_flux(a: float, u_min: float = -50.0, u_max: float = 50.0) -> FluxModel:
    if a <= 0:
        raise FluxConstructionError(f"quadratic coefficient must be positive, got {a}")
    return _certify(FluxModel("quadratic", u_min, u_max, a, params=(a,)))


def build_gap_flux(
    n: float,
    u_lo: float,
    u_hi: float,
    blend_resolution: int = CERT_SAMPLES,
    u_min: float | None = None,
    u_max: float | None = None,
) -> FluxModel:
    """Flux equal to u^2/(2n) below u_lo and u^2/2 above u_hi, exactly.

    The second derivative on (u_lo, u_hi) is a quintic smoothstep from 1/n
    to 1 plus two closed-form correction terms whose first and second
    cumulative integrals make f' and f hit the upper quadratic piece
    exactly.  Matching both pieces forces f'' to overshoot 1 in part of
    the blend (no smooth f'' confined to [1/n, 1] can satisfy the two
    moment constraints); strict convexity f'' > 0 is certified on a dense
    grid of ``blend_resolution`` points and the achieved floor is recorded
    as ``c0``.
    """
    if n < 1:
        raise FluxConstructionError(f"gap exponent n must be >= 1, got {n}")
    if u_lo >= u_hi:
        raise FluxConstructionError(f"need u_lo < u_hi, got ({u_lo}, {u_hi})")
    h = u_hi - u_lo
    c = 1.0 / n
    d = 1.0 - c
    f_lo = 0.5 * c * u_lo**2
    fp_lo = c * u_lo
    if d == 0.0:  # n == 1: the two pieces already agree
        omega = theta = 0.0
    else:
        a1 = ((u_hi - fp_lo) / h - c) / d
        rhs = (0.5 * u_hi**2 - f_lo - fp_lo * h) / (h * h)
        a2 = a1 - (rhs - 0.5 * c) / d
        omega = a1 - 0.5
        theta = 840.0 * (a2 - 5.0 / 14.0 - 0.5 * omega)
    if u_min is None:
        u_min = u_lo - 2.0
    if u_max is None:
        u_max = u_hi + 2.0
    model = FluxModel(
        "gap",
        u_min,
        u_max,
        0.0,
        params=(u_lo, u_hi, h, c, d, omega, theta, f_lo, fp_lo),
    )
    model = _certify(model, blend_resolution)
    # both quadratic pieces are exact by the moment construction; keep a
    # record of the (machine-precision) residuals at the upper knot
    res_fp = abs(evaluate(model, u_hi, 1) - u_hi)
    res_f = abs(evaluate(model, u_hi, 0) - 0.5 * u_hi**2)
    if max(res_fp, res_f) > 1e-10 * max(1.0, abs(u_hi)):
        raise FluxConstructionError(
            f"upper-knot mismatch: |df'|={res_fp:.3e}, |df|={res_f:.3e}"
        )
    return model


def tabulated_flux(u_samples, f_samples, u_min=None, u_max=None) -> FluxModel:
    """Convex flux from samples; cubic-spline evaluated, convexity certified."""
    from scipy.interpolate import CubicSpline

    u_samples = np.asarray(u_samples, dtype=float)
    f_samples = np.asarray(f_samples, dtype=float)
    if u_samples.ndim != 1 or u_samples.size < 4 or np.any(np.diff(u_samples) <= 0):
        raise FluxConstructionError("need >= 4 strictly increasing sample points")
    spline = CubicSpline(u_samples, f_samples)
    model = FluxModel(
        "tabulated",
        u_samples[0] if u_min is None else u_min,
        u_samples[-1] if u_max is None else u_max,
        0.0,
        _spline=spline,
    )
    return _certify(model)


@dataclass(frozen=True)
class StatePair:
    """End states and the Rankine-Hugoniot speed of the connecting wave."""

    u_l: float
    u_r: float
    s: float

    @property
    def jump(self) -> float:
        return self.u_l - self.u_r

    @property
    def is_lax(self) -> bool:
        return self.u_l > self.u_r


def shock_speed(model: FluxModel, u_l: float, u_r: float) -> float:
    if u_l == u_r:
        raise FluxError(f"degenerate state pair: u_l == u_r == {u_l}")
    fl = evaluate(model, u_l, 0)
    fr = evaluate(model, u_r, 0)
    return (fl - fr) / (u_l - u_r)


def make_states(model: FluxModel, u_l: float, u_r: float) -> StatePair:
    return StatePair(u_l, u_r, shock_speed(model, u_l, u_r))
