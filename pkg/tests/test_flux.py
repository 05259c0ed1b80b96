import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shocklab.flux import (
    FluxConstructionError,
    FluxDomainError,
    FluxError,
    build_gap_flux,
    burgers_flux,
    evaluate,
    make_states,
    quadratic_flux,
    shock_speed,
    tabulated_flux,
)


def test_burgers_values(burgers):
    assert evaluate(burgers, 2.0, 0) == 2.0
    assert evaluate(burgers, 3.0, 2) == 1.0
    assert evaluate(burgers, -1.5, 1) == -1.5


def test_domain_error_names_value(burgers):
    with pytest.raises(FluxDomainError, match="99"):
        evaluate(burgers, 99.0, 0)


def test_shock_speeds(burgers, gap50):
    assert shock_speed(burgers, 1.0, -1.0) == 0.0
    assert shock_speed(burgers, 2.0, 0.0) == 1.0
    # both end states lie on the exact quadratic pieces
    assert shock_speed(gap50, 1.0, -1.0) == pytest.approx(0.245, abs=1e-15)
    with pytest.raises(FluxError, match="degenerate"):
        shock_speed(burgers, 0.3, 0.3)


def test_gap_flux_exact_pieces(gap50):
    # outside the knots the closed quadratic formulas hold to machine eps
    assert evaluate(gap50, -1.0, 0) == pytest.approx(0.01, abs=1e-16)
    assert evaluate(gap50, 1.0, 0) == pytest.approx(0.5, abs=1e-15)
    assert evaluate(gap50, -0.95, 2) == pytest.approx(0.02, abs=1e-16)
    assert evaluate(gap50, 0.95, 2) == pytest.approx(1.0, abs=1e-15)
    us = np.linspace(-2.9, -0.9, 500)
    assert np.allclose(evaluate(gap50, us, 0), 0.5 * us**2 / 50, rtol=0, atol=1e-15)
    us = np.linspace(0.9, 2.9, 500)
    assert np.allclose(evaluate(gap50, us, 0), 0.5 * us**2, rtol=0, atol=1e-14)


def test_gap_flux_convexity_floor(gap50):
    grid = np.linspace(gap50.u_min, gap50.u_max, 10_000)
    fpp = evaluate(gap50, grid, 2)
    assert float(np.min(fpp)) == pytest.approx(0.02, abs=1e-12)
    assert np.all(fpp > 0)
    assert gap50.c0 == pytest.approx(0.02, abs=1e-12)


def test_gap_flux_continuity_at_knots(gap50):
    for knot in (-0.9, 0.9):
        for order in (0, 1, 2):
            lo = evaluate(gap50, knot - 1e-12, order)
            hi = evaluate(gap50, knot + 1e-12, order)
            assert lo == pytest.approx(hi, abs=1e-8)


def test_gap_construction_errors():
    with pytest.raises(FluxConstructionError):
        build_gap_flux(0.5, -0.9, 0.9)
    with pytest.raises(FluxConstructionError):
        build_gap_flux(50, 0.9, -0.9)


@pytest.mark.parametrize("model_name", ["burgers", "quadratic", "gap"])
def test_derivative_consistency(model_name, burgers, gap50):
    # centered differences of f match f' (and f' matches f'') at order >= 1.9
    model = {"burgers": burgers, "quadratic": quadratic_flux(0.7), "gap": gap50}[
        model_name
    ]
    pts = np.array([-1.3, -0.5, 0.11, 0.77, 1.21])
    for order in (0, 1):
        errs = []
        for h in (1e-3, 1e-4):
            fd = (evaluate(model, pts + h, order) - evaluate(model, pts - h, order)) / (
                2 * h
            )
            errs.append(np.max(np.abs(fd - evaluate(model, pts, order + 1))) + 1e-16)
        observed = np.log10(errs[0] / errs[1])
        assert observed >= 1.9 or errs[0] < 1e-12


def test_tabulated_flux_roundtrip():
    us = np.linspace(-2, 2, 600)
    model = tabulated_flux(us, 0.5 * us**2)
    assert evaluate(model, 1.0, 0) == pytest.approx(0.5, abs=1e-10)
    assert model.c0 > 0.9


def test_tabulated_flux_rejects_nonconvex():
    us = np.linspace(-2, 2, 400)
    with pytest.raises(FluxConstructionError):
        tabulated_flux(us, np.sin(us))


@settings(max_examples=25, deadline=None)
@given(
    a=st.floats(0.05, 10.0),
    ul=st.floats(-3.0, 3.0),
    ur=st.floats(-3.0, 3.0),
)
def test_rh_speed_between_characteristic_speeds(a, ul, ur):
    # convexity puts the shock speed between the end characteristic speeds
    if abs(ul - ur) < 1e-6:
        return
    model = quadratic_flux(a)
    s = shock_speed(model, ul, ur)
    lo = min(evaluate(model, ul, 1), evaluate(model, ur, 1))
    hi = max(evaluate(model, ul, 1), evaluate(model, ur, 1))
    assert lo - 1e-12 <= s <= hi + 1e-12


def test_states_container(burgers):
    stp = make_states(burgers, 2.0, 0.0)
    assert stp.s == 1.0 and stp.jump == 2.0 and stp.is_lax
