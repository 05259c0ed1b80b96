import numpy as np
import pytest

from shocklab.cauchy import (
    NotYetValid,
    TruncationError,
    antiderivative_diagnostic,
    distance_to_shifted_profile,
    evolve_line,
    make_initial,
    measure_shift,
)
from shocklab.periodic import PerturbationSpec
from shocklab.profile import profile_at


@pytest.fixture(scope="module")
def quick_run(burgers, lax_states, profile_nu_half, sine02):
    return evolve_line(
        burgers, lax_states, 0.5, 8.0, 1.0 / 256, 0.6, sine02, sine02,
        profile=profile_nu_half, record_dt=0.02, keep_periodic_snaps=True,
        snapshot_times=(0.0, 0.5), accumulate=True,
    )


def test_blend_identity(profile_nu_half, sine02):
    # w0l = w0r = w0: u0 - phi - w0 vanishes identically
    x = np.linspace(-6, 6, 1201)
    u0 = make_initial(profile_nu_half, sine02, sine02, x)
    phi = profile_at(profile_nu_half, x)[0]
    assert np.max(np.abs(u0 - phi - sine02.sample(x))) < 1e-15


def test_blend_zero_perturbation(profile_nu_half, zero_spec):
    x = np.linspace(-6, 6, 1201)
    u0 = make_initial(profile_nu_half, zero_spec, zero_spec, x)
    assert np.array_equal(u0, profile_at(profile_nu_half, x)[0])


def test_blend_one_sided_tail(profile_nu_half, sine02, zero_spec):
    # w0l != 0, w0r = 0: |u0 - u_r| <= C e^{-beta x} for x > 0
    st = profile_nu_half.states
    x = np.linspace(0.5, 12, 400)
    u0 = make_initial(profile_nu_half, sine02, zero_spec, x)
    beta = st.jump * profile_nu_half.beta1
    scaled = np.abs(u0 - st.u_r) * np.exp(beta * x)
    c_fit = scaled[:40].max()
    assert np.all(scaled <= 4 * c_fit)


def test_unperturbed_profile_is_stationary(burgers, lax_states, profile_nu_half,
                                           zero_spec):
    run = evolve_line(burgers, lax_states, 0.5, 8.0, 1.0 / 256, 2.0,
                      zero_spec, zero_spec, profile=profile_nu_half,
                      record_dt=0.25)
    assert np.nanmax(run.sup_dist) <= 5e-3
    assert np.nanmax(np.abs(run.shift)) <= 1e-6


def test_measured_shift_tracks_st(quick_run):
    # symmetric burgers perturbation: a(t) = s t = 0 at every record
    assert np.nanmax(np.abs(quick_run.shift)) < 2e-3


def test_mass_residual_small(quick_run):
    assert np.nanmax(np.abs(quick_run.mass_residual)) <= 1e-8


def test_boundary_matches_traces(quick_run):
    assert np.max(quick_run.boundary_gap) <= 100 * quick_run.boundary_tol + 1e-12


def test_exact_shift_recovered(profile_nu_half, quick_run):
    # u = psi_xi0 exactly: the mass balance returns xi0
    run = quick_run
    j = 5
    ul_ext = run.periodic_snaps_l[j][run._ext_index_l]
    ur_ext = run.periodic_snaps_r[j][run._ext_index_r]
    xi0 = 0.37
    g = profile_at(profile_nu_half, run.x, xi0)[1]
    psi = ul_ext * g + ur_ext * (1 - g)
    a = measure_shift(psi, ul_ext, ur_ext, profile_nu_half, run.x, run.dx, 0.0)
    assert a == pytest.approx(xi0, abs=1e-9)


def test_measure_shift_requires_separation(profile_nu_half, quick_run):
    run = quick_run
    ul_ext = run.periodic_snaps_l[0][run._ext_index_l]
    with pytest.raises(NotYetValid):
        measure_shift(run.u, ul_ext, ul_ext - 0.5, profile_nu_half,
                      run.x, run.dx, 0.0)


def test_distance_functions(profile_nu_half):
    x = -8.0 + (np.arange(4096) + 0.5) / 256
    c = 0.8
    u = profile_at(profile_nu_half, x, c)[0]
    assert distance_to_shifted_profile(u, x, profile_nu_half, c) == 0.0
    d1 = distance_to_shifted_profile(u, x, profile_nu_half, c + 0.05)
    d2 = distance_to_shifted_profile(u, x, profile_nu_half, c + 0.15)
    assert 0 < d1 < d2


def test_antiderivative_diagnostic_exact():
    u = np.ones(100)
    sup, tot = antiderivative_diagnostic(u, u, 0.1)
    assert sup == 0.0 and tot == 0.0


def test_comparison_principle(burgers, lax_states, profile_nu_half, zero_spec):
    # ordered initial data stay ordered under the scheme
    x = -8.0 + (np.arange(int(16 / (1 / 128))) + 0.5) / 128
    lo = profile_at(profile_nu_half, x)[0]
    hi = lo + 0.1 / np.cosh(x) ** 2
    runs = []
    for u0 in (lo, hi):
        runs.append(evolve_line(
            burgers, lax_states, 0.5, 8.0, 1.0 / 128, 0.4, zero_spec,
            zero_spec, profile=profile_nu_half, u0=u0, measure=False,
            record_dt=0.4, snapshot_times=(0.4,),
        ))
    assert np.all(runs[1].snapshots[0.4] >= runs[0].snapshots[0.4] - 1e-12)


def test_truncation_sentinel_fires(burgers, lax_states, profile_nu_half, sine02):
    # a domain too small for the horizon must abort with a diagnostic
    with pytest.raises((TruncationError, ValueError)):
        evolve_line(burgers, lax_states, 0.5, 2.0, 1.0 / 128, 3.0,
                    sine02, sine02, profile=profile_nu_half, record_dt=0.05)


def test_oleinik_series_bounded(quick_run):
    assert np.nanmax(quick_run.oleinik[1:]) <= 2.0


def test_dx_must_divide(burgers, lax_states, profile_nu_half, sine02):
    with pytest.raises(ValueError, match="divide"):
        evolve_line(burgers, lax_states, 0.5, 8.0, 0.013, 0.5, sine02, sine02,
                    profile=profile_nu_half)
