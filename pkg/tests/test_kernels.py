"""Compiled kernels against the pure-numpy reference, plus determinism."""

import numpy as np
import pytest

import shocklab._kernels_py as kpy
from shocklab import kernels
from shocklab.flux import build_gap_flux, quadratic_flux


def _periodic_setup(n=96, amp=0.2):
    u0 = 1.0 + amp * np.sin(2 * np.pi * (np.arange(n) + 0.5) / n)
    dx = 1.0 / n
    return u0, dx


def _coupled_setup(nl=64, n=700, dx=1.0 / 64):
    ul = 1.0 + 0.2 * np.sin(2 * np.pi * (np.arange(nl) + 0.5) / nl)
    ur = -1.0 + 0.15 * np.cos(2 * np.pi * (np.arange(nl) + 0.5) / nl)
    x = (np.arange(n) + 0.5) * dx - n * dx / 2
    u = -np.tanh(x)
    return ul, ur, u, dx


KINDS = [
    (0, np.zeros(1)),
    (1, np.array([0.7])),
    (2, build_gap_flux(50, -0.9, 0.9).kernel_params()),
]


@pytest.mark.parametrize("code,par", KINDS)
def test_periodic_equivalence(code, par):
    u0, dx = _periodic_setup()
    nu = 0.15
    dt = 0.4 * min(dx / 1.3, dx * dx / (2 * nu))
    uc, upy = u0.copy(), u0.copy()
    rc = kernels.advance_periodic(uc, code, par, nu, dx, dt, 1501, 1.0, True)
    rp = kpy.advance_periodic(upy, code, par, nu, dx, dt, 1501, 1.0, True)
    assert np.max(np.abs(uc - upy)) < 1e-12
    assert abs(rc[0] - rp[0]) < 1e-14
    assert rc[1] == pytest.approx(rp[1], abs=1e-12)
    assert rc[2] == pytest.approx(rp[2], abs=1e-12)


@pytest.mark.parametrize("code,par", KINDS)
def test_coupled_equivalence(code, par):
    ul0, ur0, u0, dx = _coupled_setup()
    nu = 0.3
    dt = 0.4 * min(dx / 1.3, dx * dx / (2 * nu))
    a1, b1, c1 = ul0.copy(), ur0.copy(), u0.copy()
    a2, b2, c2 = ul0.copy(), ur0.copy(), u0.copy()
    r1 = kernels.advance_coupled(a1, b1, c1, code, par, nu, dx, dt, 901, 63, 0,
                                 1.0, -1.0, True)
    r2 = kpy.advance_coupled(a2, b2, c2, code, par, nu, dx, dt, 901, 63, 0,
                             1.0, -1.0, True)
    for p, q in ((a1, a2), (b1, b2), (c1, c2)):
        assert np.max(np.abs(p - q)) < 1e-12
    assert abs(r1[0] - r2[0]) < 1e-14 and abs(r1[1] - r2[1]) < 1e-14


def test_mass_conservation_exact():
    u0, dx = _periodic_setup(n=128)
    nu = 0.1
    dt = 0.4 * dx * dx / (2 * nu)
    u = u0.copy()
    kernels.advance_periodic(u, 0, np.zeros(1), nu, dx, dt, 4000, 1.0, False)
    assert abs(u.mean() - u0.mean()) < 1e-13


def test_determinism_bitwise():
    ul0, ur0, u0, dx = _coupled_setup()
    outs = []
    for _ in range(2):
        a, b, c = ul0.copy(), ur0.copy(), u0.copy()
        kernels.advance_coupled(a, b, c, 0, np.zeros(1), 0.25, dx,
                                0.4 * dx * dx / 0.5, 500, 63, 0, 1.0, -1.0, False)
        outs.append(c.copy())
    assert np.array_equal(outs[0], outs[1])


def test_backend_reports():
    assert kernels.BACKEND in ("compiled", "python")


def test_quadratic_params_roundtrip():
    m = quadratic_flux(0.7)
    assert m.kernel_params()[0] == 0.7 and m.kind_code == 1
