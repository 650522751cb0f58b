import math
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from substatic import ADS0, EUCLID, SCHW3, WarpedProductModel
from substatic.errors import DomainError, MeanConvexityError
from substatic.flow import (
    TRACE_COLUMNS,
    HorizonClampWarning,
    codazzi_check,
    flow_step_graph,
    flow_step_radial,
    monotonicity_report,
    numeric_derivative,
    q_functional,
    q_prime_formula,
    q_prime_residual,
    run_flow,
    write_trace_csv,
)
from substatic.hypersurface import cosine_coefficients, perturbed_graph, sphere_graph
from substatic.warped import ClosedFormProfile

from conftest import eta_model


def schw_radius(s_start, t):
    # s + log(s - 1) decreases at unit rate under ds/dt = -(1 - 1/s)
    from scipy.optimize import brentq
    c = s_start + math.log(s_start - 1) - t
    return brentq(lambda s: s + math.log(s - 1) - c, 1 + 1e-15, s_start)


def test_radial_step_exact():
    assert flow_step_radial(EUCLID, 2.0, 0.5) == pytest.approx(1.5, abs=1e-13)
    scaled = WarpedProductModel("E2", 3, 1.0, 1.0, ClosedFormProfile(0.0, 0.0), 4.0, potential_scale=0.7)
    assert flow_step_radial(scaled, 2.0, 1.0) == pytest.approx(1.3, abs=1e-13)
    assert flow_step_radial(SCHW3, 3.0, 1.0) == pytest.approx(schw_radius(3.0, 1.0), abs=1e-11)
    assert flow_step_radial(SCHW3, 3.0, 0.0) == 3.0


def test_radial_clamp_warns(monkeypatch):
    import types

    import substatic.flow as flow_mod

    def overshoot(*args, **kw):
        return types.SimpleNamespace(success=True, y=np.array([[0.9]]), message="")

    monkeypatch.setattr(flow_mod, "solve_ivp", overshoot)
    with pytest.warns(HorizonClampWarning):
        assert flow_step_radial(SCHW3, 1.01, 1.0) == SCHW3.s0


def test_graph_step_sphere_matches_radial():
    g = sphere_graph(SCHW3, 3.0)
    out = flow_step_graph(SCHW3, g, 1.0)
    assert out.is_constant(1e-12)
    assert out.u[0] == pytest.approx(schw_radius(3.0, 1.0), abs=1e-10)
    assert flow_step_graph(SCHW3, g, 0.0) is g


def test_q_values_on_sphere():
    s = 2.0
    g = sphere_graph(SCHW3, s)
    F = 1 - 1 / s
    assert q_functional(SCHW3, g) == pytest.approx(4 * math.pi * s**3 / 2, rel=1e-13)
    assert q_prime_formula(SCHW3, g) == pytest.approx(-6 * math.pi * s**2 * F, rel=1e-12)


def test_sphere_flow_conserves_and_stays_umbilic():
    tr = run_flow(SCHW3, sphere_graph(SCHW3, 2.0), 1.0, 1e-2)
    assert tr.stop_reason == "t_end"
    assert np.ptp(tr.conserved_quantity()) < 1e-11
    assert tr.conserved_quantity()[0] == pytest.approx(2 * math.pi, rel=1e-12)
    assert q_prime_residual(tr) < 1e-6
    assert max(st.graph.is_constant(1e-12) for st in tr.states)
    assert tr.column("umbilicity_max").max() < 1e-20
    s_end = tr.states[-1].graph.u[0]
    assert s_end == pytest.approx(schw_radius(2.0, 1.0), abs=1e-10)


def test_perturbed_flow_frozen():
    tr = run_flow(SCHW3, perturbed_graph(SCHW3, 2.0, {1: 0.1}), 1.0, 1e-2)
    a_half = cosine_coefficients(tr.states[50].graph.u)
    a_end = cosine_coefficients(tr.states[-1].graph.u)
    assert a_half[0] == pytest.approx(1.76626797, abs=1e-7)
    assert a_half[1] == pytest.approx(0.0867553983, abs=1e-8)
    assert a_end[1] == pytest.approx(0.0723569393, abs=1e-8)
    rep = monotonicity_report(tr)
    assert rep["monotone_quantity_nonincreasing"] and not rep["violation"]
    assert q_prime_residual(tr) < 1e-6


def test_negative_control_flags_violation(negative_model):
    tr = run_flow(negative_model, perturbed_graph(negative_model, 2.5, {1: 0.2}), 1.0, 1e-2)
    rep = monotonicity_report(tr)
    assert rep["violation"] and rep["max_increase"] > 1e-4
    # the static inequality alone does not see the failure
    assert rep["min_hk_deficit"] > 0


def test_horizon_stop():
    tr = run_flow(SCHW3, sphere_graph(SCHW3, 1.5), 20.0, 0.1, horizon_stop=0.02)
    assert tr.stop_reason == "horizon"
    assert tr.times[-1] < 20.0
    with pytest.raises(DomainError):
        run_flow(SCHW3, sphere_graph(SCHW3, 1.01), 1.0, 0.1, horizon_stop=0.01)


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_flow(SCHW3, sphere_graph(SCHW3, 2.0), 1.0, 0.0)


def test_numeric_derivative_exact_on_quartics():
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(numeric_derivative(t, t**4 - t), 4 * t**3 - 1, atol=1e-12)


def test_codazzi_on_spheres():
    gH, ric, mismatch = codazzi_check(SCHW3, sphere_graph(SCHW3, 2.0))
    assert gH < 1e-12 and ric < 1e-14 and mismatch < 1e-12


def test_trace_csv(tmp_path):
    tr = run_flow(SCHW3, sphere_graph(SCHW3, 2.0), 0.1, 1e-2)
    path = tmp_path / "trace.csv"
    write_trace_csv(tr, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRACE_COLUMNS)
    assert len(lines) == len(tr) + 1


@given(amp=st.floats(-0.15, 0.15), k=st.integers(1, 3), s=st.floats(1.8, 3.0))
def test_monotone_on_schwarzschild_property(amp, k, s):
    try:
        tr = run_flow(SCHW3, perturbed_graph(SCHW3, s, {k: amp}), 0.3, 0.05)
    except MeanConvexityError:
        assume(False)
    assert not monotonicity_report(tr)["violation"]


@given(s=st.floats(1.5, 3.5))
def test_ads_sphere_conservation_property(s):
    tr = run_flow(ADS0, sphere_graph(ADS0, s), 0.05, 0.01)
    assert np.ptp(tr.conserved_quantity()) < 1e-9 * tr.column("Q").max()
