r"""Radial torsion problem ``Lap u = -1 + (Lap f/f) u`` between the horizon and a sphere.

In ``s`` the operator is ``F u'' + (F'/2 + (n-1) F/s) u'`` with ``F = f^2``
vanishing at ``s0``, so the horizon is a regular singular point with exponents
0 and 1/2.  Writing ``s = s0 + x^2`` (``x`` is proportional to geodesic
distance near the horizon) turns the problem into a regular two-point problem

    (G/4) u_xx + [D/(4x) + (n-1) G x/(2s)] u_x - L u = -1,
    G = F/x^2,  D = F' - G,  L = Lap f / f,

with Dirichlet data ``u(0) = c_N`` and ``u(X) = 0``.  Both coefficients are
smooth on ``[0, X]``; near ``x = 0`` they come from Taylor series of ``F``.
Near the horizon ``u = u(s0) + u_x(0) sqrt(s - s0) + a_1 (s - s0) + ...``.  The
ODE at ``x = 0`` forces ``k a_1 = -1 + L(s0) u(s0)`` (``k = F'(s0)/2``) for any
Dirichlet data, and ``a_1`` is what ``du_ds`` holds at the horizon node.  The
``sqrt`` coefficient ``u_x(0)`` is free; it equals ``|grad u|`` on the horizon up
to the factor ``sqrt(k/2)`` and is nonzero for coordinate spheres, so ``u`` is
smooth in geodesic distance but not in ``s``.

Discretisation is Chebyshev collocation in ``x``.  Boundaryless models use
``y = s^2`` instead, which removes the centre singularity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .functionals import horizon_constant_closed
from .warped import WarpedProductModel, hessian_over_f_components, laplacian_f_over_f

__all__ = [
    "cheb",
    "TorsionSolution",
    "solve_torsion_radial",
    "torsion_residual",
    "conformal_hessian_residual",
    "hopf_check",
    "recover_horizon_datum",
    "conformal_split_monotone",
    "write_torsion_csv",
]


def cheb(N: int):
    """Differentiation matrix and Chebyshev-Lobatto points on ``[-1, 1]`` (descending), as ``(D, x)``."""
    if N == 0:
        return np.zeros((1, 1)), np.array([1.0])
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


def _mapped(N: int, length: float):
    """Nodes ascending on ``[0, length]`` and the first two derivative matrices."""
    D, x = cheb(N)
    z = (1.0 - x) / 2 * length  # x = 1 -> 0, x = -1 -> length
    D1 = -2.0 / length * D
    return z, D1, D1 @ D1


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


def _horizon_coefficients(model: WarpedProductModel, x: np.ndarray):
    """``G = F/x^2``, ``D/(4x)`` and ``L`` at ``s = s0 + x^2``."""
    s0 = model.s0
    e = x**2
    s = s0 + e
    F, F1, F2, F3 = model.f2(s, check=False)
    H0, H1, H2, H3 = (float(v) for v in model.f2(s0, check=False))
    span = model.s_max - s0
    small = e < 1e-4 * span
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.where(small, H1 + H2 * e / 2 + H3 * e**2 / 6, (F - H0) / np.where(small, 1.0, e))
        Dq = np.where(small, x * (H2 / 2 + H3 * e / 3) / 4, (F1 - G) / (4 * np.where(small, 1.0, x)))
    L = laplacian_f_over_f(model, s)
    return s, G, Dq, L


def _ball_coefficients(model: WarpedProductModel, y: np.ndarray):
    """Operator ``4 y F u_yy + (2 n F + s F') u_y`` in ``y = s^2``."""
    s = np.sqrt(y)
    F, F1, F2, _ = model.f2(s, check=False)
    sF1 = s * F1
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.where(s > 0, F2 / 2 + (model.n - 1) * F1 / (2 * np.where(s > 0, s, 1.0)), model.n * F2 / 2)
    return s, F, sF1, L


# ---------------------------------------------------------------------------
# solution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionSolution:
    """Collocation solution; ``z`` is ``x = sqrt(s - s0)`` (horizon) or ``y = s^2`` (ball)."""

    model: WarpedProductModel
    s_hat: float
    c_n: float
    z: np.ndarray
    s: np.ndarray
    u: np.ndarray
    du_ds: np.ndarray
    du_dz: np.ndarray
    d2u_dz2: np.ndarray
    residual: float
    ball: bool = False

    @property
    def horizon_slope(self) -> float:
        """``u_x(0)``: the coefficient of the ``sqrt(s - s0)`` branch; 0 for smooth solutions."""
        return float(self.du_dz[0]) if not self.ball else 0.0

    @property
    def grid_size(self) -> int:
        return self.z.size - 1

    def robin_residual(self) -> float:
        """``k u'(s0) + 1 - L(s0) u(s0)`` with ``k = F'(s0)/2``."""
        if self.ball:
            return 0.0
        m = self.model
        k = float(m.f2(m.s0)[1]) / 2
        return float(k * self.du_ds[0] + 1 - float(laplacian_f_over_f(m, m.s0)) * self.u[0])


def _assemble(model, length, N, ball):
    z, D1, D2 = _mapped(N, length)
    if ball:
        s, F, sF1, L = _ball_coefficients(model, z)
        A = (4 * z * F)[:, None] * D2 + (2 * model.n * F + sF1)[:, None] * D1 - np.diag(L)
    else:
        s, G, Dq, L = _horizon_coefficients(model, z)
        A = (G / 4)[:, None] * D2 + (Dq + (model.n - 1) * G * z / (2 * s))[:, None] * D1 - np.diag(L)
    return z, s, D1, D2, A


def solve_torsion_radial(model: WarpedProductModel, s_hat: float, grid_size: int = 32,
                         horizon_value: float | None = None) -> TorsionSolution:
    """Solve the radial torsion problem on ``[s0, s_hat]`` (or the ball ``[0, s_hat]``).

    ``horizon_value`` overrides ``c_N`` as the horizon datum.
    """
    ball = not model.has_horizon
    lo = model.s_lo
    if not (lo < s_hat <= model.s_max * (1 + 1e-12)):
        raise DomainError(f"s_hat={s_hat:g} must lie in ({lo:g}, {model.s_max:g}]")
    if grid_size < 4:
        raise ValueError("grid_size must be at least 4")
    c_n = horizon_constant_closed(model) if horizon_value is None else float(horizon_value)
    length = s_hat**2 if ball else np.sqrt(s_hat - lo)
    z, s, D1, D2, A = _assemble(model, length, grid_size, ball)
    rhs = -np.ones_like(z)
    A[-1] = 0.0
    A[-1, -1] = 1.0
    rhs[-1] = 0.0
    if not ball:
        A[0] = 0.0
        A[0, 0] = 1.0
        rhs[0] = c_n
    u = np.linalg.solve(A, rhs)
    if not np.all(np.isfinite(u)):
        raise np.linalg.LinAlgError("torsion collocation system is singular")
    du = D1 @ u
    d2u = D2 @ u
    if ball:
        du_ds = 2 * s * du
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            du_ds = np.where(z > 0, du / (2 * np.where(z > 0, z, 1.0)), d2u / 2)
    sol = TorsionSolution(model, float(s_hat), c_n, z, s, u, du_ds, du, d2u, float("nan"), ball)
    res = torsion_residual(model, sol)
    return TorsionSolution(model, float(s_hat), c_n, z, s, u, du_ds, du, d2u, res, ball)


def _bary_weights(N: int) -> np.ndarray:
    w = (-1.0) ** np.arange(N + 1)
    w[0] /= 2
    w[-1] /= 2
    return w


def _interp(z_src: np.ndarray, values: np.ndarray, z_dst: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from Chebyshev-Lobatto nodes."""
    w = _bary_weights(z_src.size - 1)
    diff = z_dst[:, None] - z_src[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15 * max(1.0, float(np.max(np.abs(z_src)))))
    diff[exact] = 1.0
    tmp = w / diff
    out = tmp @ values / tmp.sum(axis=1)
    rows, cols = np.nonzero(exact)
    out[rows] = values[cols]
    return out


def _fine(sol: TorsionSolution):
    """Solution and its derivatives on the grid with twice as many points."""
    length = sol.z[-1]
    N = 2 * sol.grid_size
    z, D1, D2 = _mapped(N, length)
    u = _interp(sol.z, sol.u, z)
    return z, u, D1 @ u, D2 @ u


def torsion_residual(model: WarpedProductModel, sol: TorsionSolution) -> float:
    """Max interior ``|Lap u - L u + 1|`` on a grid twice as fine as the collocation grid."""
    z, u, du, d2u = _fine(sol)
    if sol.ball:
        s, F, sF1, L = _ball_coefficients(model, z)
        r = 4 * z * F * d2u + (2 * model.n * F + sF1) * du - L * u + 1
    else:
        s, G, Dq, L = _horizon_coefficients(model, z)
        r = G / 4 * d2u + (Dq + (model.n - 1) * G * z / (2 * s)) * du - L * u + 1
    return float(np.max(np.abs(r[1:-1])))


def _traceless_components(model: WarpedProductModel, sol: TorsionSolution):
    """Radial and tangential unit components of ``Hess u - Lap u/n g - u (Hess f/f - Lap f/(n f) g)``."""
    n = model.n
    z, u, du, d2u = _fine(sol)
    if sol.ball:
        s, F, sF1, _ = _ball_coefficients(model, z)
        # u_s = 2 s u_y, u_ss = 2 u_y + 4 y u_yy
        us = 2 * s * du
        rad_u = F * (2 * du + 4 * z * d2u) + sF1 * du
        tan_u = 2 * F * du
    else:
        s, G, Dq, _ = _horizon_coefficients(model, z)
        rad_u = G * d2u / 4 + Dq * du
        tan_u = G * z * du / (2 * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        rad_f, tan_f = hessian_over_f_components(model, s)
    tan_f = np.where(s > 0, tan_f, rad_f)  # isotropic at the centre of a ball
    T_rad = (n - 1) / n * ((rad_u - tan_u) - u * (rad_f - tan_f))
    return T_rad, -T_rad / (n - 1)


def conformal_hessian_residual(model: WarpedProductModel, sol: TorsionSolution) -> float:
    """Max over interior points and both directions of the traceless conformal Hessian."""
    T_rad, T_tan = _traceless_components(model, sol)
    return float(max(np.max(np.abs(T_rad[1:-1])), np.max(np.abs(T_tan[1:-1]))))


def hopf_check(sol: TorsionSolution, tol: float = 1e-10) -> bool:
    """Strictly negative outward derivative ``u'(s_hat)`` on the sphere."""
    if not np.any(sol.u[:-1] != 0):
        return False
    return bool(sol.du_ds[-1] < -tol)


def recover_horizon_datum(model: WarpedProductModel, s_hat: float, grid_size: int = 32,
                          bracket: tuple[float, float] | None = None, xatol: float = 1e-12) -> float:
    """Horizon datum minimising :func:`conformal_hessian_residual` (bounded scalar search)."""
    c = horizon_constant_closed(model)
    lo, hi = bracket if bracket is not None else (0.5 * c, 1.5 * c)

    def obj(d):
        return conformal_hessian_residual(model, solve_torsion_radial(model, s_hat, grid_size, horizon_value=d))

    res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": xatol * max(1.0, abs(c))})
    return float(res.x)


def conformal_split_monotone(sol: TorsionSolution) -> bool:
    """``phi = u/f`` strictly monotone on the open interval (checked on the nodes)."""
    m = sol.model
    inner = slice(1, -1)
    s = sol.s[inner]
    f = m.potential_scale * np.sqrt(m.f2(s)[0])
    phi = sol.u[inner] / f
    d = np.diff(phi)
    return bool(np.all(d > 0) or np.all(d < 0))


def write_torsion_csv(model: WarpedProductModel, sol: TorsionSolution, path) -> None:
    """Columns ``s, u, du_ds, residual`` (pointwise ODE residual at the nodes)."""
    n = model.n
    if sol.ball:
        s, F, sF1, L = _ball_coefficients(model, sol.z)
        r = 4 * sol.z * F * sol.d2u_dz2 + (2 * n * F + sF1) * sol.du_dz - L * sol.u + 1
    else:
        s, G, Dq, L = _horizon_coefficients(model, sol.z)
        r = G / 4 * sol.d2u_dz2 + (Dq + (n - 1) * G * sol.z / (2 * s)) * sol.du_dz - L * sol.u + 1
    r[-1] = sol.u[-1]
    if not sol.ball:
        r[0] = sol.u[0] - sol.c_n
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "u", "du_ds", "residual"])
        for row in zip(sol.s, sol.u, sol.du_ds, r):
            w.writerow([f"{v:.12e}" for v in row])
