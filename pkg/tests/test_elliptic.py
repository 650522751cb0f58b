import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from substatic import ADS0, DSS, EUCLID, SCHW3
from substatic.elliptic import (
    cheb,
    conformal_hessian_residual,
    conformal_split_monotone,
    hopf_check,
    recover_horizon_datum,
    solve_torsion_radial,
    write_torsion_csv,
)
from substatic.errors import DomainError
from substatic.functionals import horizon_constant_closed


def schwarzschild_slope_oracle(s_hat, c_n=2 / 3):
    """``u_x(0)`` from the first integral ``s^2 sqrt(F) u' = C - int s^2/sqrt(F)`` (L = 0).

    With ``s = 1 + y^2`` both integrals are smooth; ``u ~ c_n + 2 C sqrt(s - 1)``.
    """
    Y = math.sqrt(s_hat - 1)
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    inner = lambda y: quad(lambda x: 2 * (1 + x * x) ** 2.5, 0, y, **opts)[0]
    a = quad(lambda y: 2 / (1 + y * y) ** 1.5, 0, Y, **opts)[0]
    b = quad(lambda y: 2 * inner(y) / (1 + y * y) ** 1.5, 0, Y, **opts)[0]
    return 2 * (b - c_n) / a


def test_cheb_differentiates_polynomials():
    D, x = cheb(8)
    np.testing.assert_allclose(D @ x**5, 5 * x**4, atol=1e-12)


def test_schwarzschild_torsion():
    sol = solve_torsion_radial(SCHW3, 2.0)
    assert sol.u[0] == pytest.approx(2 / 3, abs=1e-14) and sol.u[-1] == 0.0
    assert sol.horizon_slope == pytest.approx(schwarzschild_slope_oracle(2.0), abs=1e-9)
    assert sol.horizon_slope == pytest.approx(1.4552703743735, abs=1e-9)
    # linear coefficient at the horizon is forced to -1/k
    assert sol.du_ds[0] == pytest.approx(-2.0, abs=1e-8)
    assert abs(sol.robin_residual()) < 1e-8
    assert sol.residual < 1e-8
    assert conformal_hessian_residual(SCHW3, sol) < 1e-8
    assert hopf_check(sol) and conformal_split_monotone(sol)


def test_spectral_convergence():
    res = [solve_torsion_radial(SCHW3, 2.0, N).residual for N in (8, 16, 32)]
    assert res[0] > res[1] > res[2]
    assert res[1] < 1e-6


def test_ads_and_dss():
    sol = solve_torsion_radial(ADS0, 2.0)
    assert sol.u[0] == pytest.approx(1 / 3)
    assert abs(sol.du_ds[0]) < 1e-9
    assert conformal_hessian_residual(ADS0, sol) < 1e-8
    sol = solve_torsion_radial(DSS, 0.6)
    assert conformal_hessian_residual(DSS, sol) < 1e-8


def test_euclidean_ball_exact():
    sol = solve_torsion_radial(EUCLID, 2.0)
    np.testing.assert_allclose(sol.u, (4 - sol.s**2) / 6, atol=1e-13)
    assert sol.horizon_slope == 0.0 and sol.robin_residual() == 0.0


def test_wrong_datum_detected():
    c = horizon_constant_closed(SCHW3)
    sol = solve_torsion_radial(SCHW3, 2.0, horizon_value=1.01 * c)
    assert conformal_hessian_residual(SCHW3, sol) > 1e-3
    assert recover_horizon_datum(SCHW3, 2.0) == pytest.approx(c, abs=1e-8)


def test_errors():
    with pytest.raises(DomainError):
        solve_torsion_radial(SCHW3, 1.0)
    with pytest.raises(DomainError):
        solve_torsion_radial(SCHW3, 5.0)
    with pytest.raises(ValueError):
        solve_torsion_radial(SCHW3, 2.0, grid_size=2)


def test_hopf_rejects_trivial_solution():
    sol = solve_torsion_radial(SCHW3, 2.0, horizon_value=0.0)
    zero = type(sol)(sol.model, sol.s_hat, 0.0, sol.z, sol.s, np.zeros_like(sol.u), np.zeros_like(sol.u),
                     np.zeros_like(sol.u), np.zeros_like(sol.u), 0.0)
    assert not hopf_check(zero)


def test_csv(tmp_path):
    sol = solve_torsion_radial(SCHW3, 2.0, grid_size=16)
    path = tmp_path / "t.csv"
    write_torsion_csv(SCHW3, sol, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "s,u,du_ds,residual" and len(lines) == 18


@given(s_hat=st.floats(1.2, 3.8))
def test_equality_case_property(s_hat):
    sol = solve_torsion_radial(SCHW3, s_hat)
    assert conformal_hessian_residual(SCHW3, sol) < 1e-7
    assert hopf_check(sol)
