import numpy as np
import pytest

from shocklab.flux import evaluate, make_states, quadratic_flux
from shocklab.profile import ProfileError, compute_profile, g_ratio_bounds, profile_at


def test_burgers_profile_matches_tanh(burgers, lax_states, profile_nu1):
    # nu = 1, states (1,-1): phi(x) = -tanh(x/2)
    xs = np.array([-3.0, -1.0, 0.0, 0.5, 2.0, 4.0])
    phi = profile_at(profile_nu1, xs)[0]
    assert np.max(np.abs(phi + np.tanh(xs / 2))) < 5e-9
    assert profile_at(profile_nu1, 2.0)[0] == pytest.approx(-np.tanh(1.0), abs=1e-6)
    assert profile_at(profile_nu1, 0.0)[0] == 0.0


def test_normalized_profile_value(profile_nu1):
    # g(2) = (1 - tanh 1)/2 at nu = 1
    g = profile_at(profile_nu1, 2.0)[1]
    assert g == pytest.approx((1 - np.tanh(1.0)) / 2, abs=1e-8)


def test_ratio_identity_burgers(burgers, lax_states):
    for nu, want in ((1.0, 0.5), (0.25, 2.0)):
        prof = compute_profile(burgers, lax_states, nu)
        b1, b2 = g_ratio_bounds(prof)
        assert b1 == pytest.approx(want, abs=1e-8)
        assert b2 == pytest.approx(want, abs=1e-8)


def test_gap_ratio_window(gap50):
    states = make_states(gap50, 1.0, -1.0)
    nu = 0.5
    prof = compute_profile(gap50, states, nu)
    b1, b2 = g_ratio_bounds(prof)
    fpp = evaluate(gap50, np.linspace(-1, 1, 4001), 2)
    assert b1 >= float(np.min(fpp)) / (2 * nu) - 1e-10
    assert b2 <= float(np.max(fpp)) / (2 * nu) + 1e-10
    assert b1 > 0 and b2 > 0


def test_profile_limits_and_monotonicity(profile_nu_half):
    st = profile_nu_half.states
    x = np.linspace(-60, 60, 7001)
    phi, g, gp, _ = profile_at(profile_nu_half, x)
    assert abs(phi[0] - st.u_l) < 1e-12 and abs(phi[-1] - st.u_r) < 1e-12
    assert np.all(np.diff(phi) <= 1e-15)  # decreasing up to round-off
    core = (g > 1e-12) & (g < 1 - 1e-12)
    assert np.all(np.diff(phi[core]) < 0)
    assert np.all((g >= 0) & (g <= 1)) and np.all(gp <= 0)


def test_translation_identity(profile_nu_half):
    xs = np.linspace(-4, 4, 41)
    shifted = profile_at(profile_nu_half, xs + 3.0, shift=3.0)
    plain = profile_at(profile_nu_half, xs)
    for a, b in zip(shifted, plain):
        assert np.array_equal(a, b)


def test_ode_residual(profile_nu_half):
    # nu phi'' - (f'(phi) - s) phi' = 0 in a second-difference sense
    p = profile_nu_half
    h = p.grid[1] - p.grid[0]
    phi = p.phi
    core = slice(1, -1)
    d1 = (phi[2:] - phi[:-2]) / (2 * h)
    d2 = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / (h * h)
    fp = evaluate(p.model, phi[core], 1)
    resid = p.nu * d2 - (fp - p.states.s) * d1
    assert float(np.max(np.abs(resid))) < 1e-5  # h^2-limited second difference


def test_exponential_tails(profile_nu_half):
    p = profile_nu_half
    delta = p.states.jump
    xs = np.linspace(1.0, 10.0, 200)
    g = profile_at(p, xs)[1]
    b1, b2 = g_ratio_bounds(p)
    up = g * np.exp(delta * p.beta1 * xs)
    lo = g * np.exp(delta * p.beta2 * xs)
    # C fitted once per profile: both scaled tails stay bounded
    assert np.max(up) < 10 * np.max(up[:5])
    assert np.min(lo) > 0.1 * np.min(lo[:5])


def test_non_lax_states_rejected(burgers):
    bad = make_states(burgers, -1.0, 1.0)
    with pytest.raises(ProfileError, match="u_l > u_r"):
        compute_profile(burgers, bad, 0.5)
    with pytest.raises(ProfileError, match="positive"):
        compute_profile(burgers, make_states(burgers, 1.0, -1.0), -0.1)


def test_quadratic_flux_profile_scaling():
    # f = a u^2/2 rescales the Burgers profile width by 1/a
    a = 2.5
    model = quadratic_flux(a)
    states = make_states(model, 1.0, -1.0)
    prof = compute_profile(model, states, 1.0)
    b1, b2 = g_ratio_bounds(prof)
    assert b1 == pytest.approx(a / 2, abs=1e-7)
    assert b2 == pytest.approx(a / 2, abs=1e-7)
