r"""Conformal-distance flow of radial graphs and its monotone quantities.

The level sets of the distance to ``Sigma`` in ``f^-2 g`` move inwards with
``g``-normal speed ``f``.  For a graph ``s = u(theta)`` this is the first-order
equation ``u_t = -f W`` with ``W = sqrt(f^2/sigma^2 + u'^2/u^2)`` (see
:mod:`substatic.hypersurface`), which reduces to ``s' = -sigma F(s)`` for
coordinate spheres.  Nodal values are advanced by the method of lines with an
adaptive 8th order Runge-Kutta scheme (``scipy.integrate.solve_ivp``, DOP853).

Along the flow

    Q(t) = int f/H,
    Q'(t) = -n/(n-1) int f^2 - int (f/H)^2 [|h_0|^2 + (Ric - Hess f/f + Lap f/f g)(nu, nu)],

and ``Q - n/(n-1) int_{Omega_t} f`` is nonincreasing on substatic models.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, GraphError, MeanConvexityError
from .functionals import horizon_constant_closed, horizon_flux
from .hypersurface import (
    RadialGraph,
    SurfaceGeometry,
    cosine_coefficients,
    geometry_at,
    quadrature,
    weighted_volume,
)
from .warped import (
    WarpedProductModel,
    hessian_over_f_components,
    laplacian_f_over_f,
    ricci_components,
    substatic_tangential_eigenvalue,
)

__all__ = [
    "FlowState",
    "FlowTrace",
    "HorizonClampWarning",
    "q_functional",
    "q_prime_formula",
    "flow_step_radial",
    "flow_step_graph",
    "run_flow",
    "q_prime_residual",
    "monotonicity_report",
    "equality_flow_diagnostics",
    "codazzi_check",
    "numeric_derivative",
    "write_trace_csv",
]

TRACE_COLUMNS = ("t", "s_mean", "Q", "dQdt_numeric", "dQdt_formula", "umbilicity_max", "substatic_nu_max", "minH")


class HorizonClampWarning(RuntimeWarning):
    """A radial step would have crossed the horizon and was clamped."""


# ---------------------------------------------------------------------------
# Q and its derivative
# ---------------------------------------------------------------------------


def _substatic_nu(model: WarpedProductModel, geo: SurfaceGeometry) -> np.ndarray:
    """``(f Ric - Hess f + Lap f g)(nu, nu)``.

    The radial eigenvalue vanishes identically for ``f = sigma h'``; it is still
    assembled from its pieces so rounding shows up in the diagnostics.
    """
    s = geo.s
    rad = geo.f * (ricci_components(model, s)[0] - hessian_over_f_components(model, s)[0]
                   + laplacian_f_over_f(model, s))
    tan = substatic_tangential_eigenvalue(model, s)
    return geo.nu_radial**2 * rad + geo.nu_angular**2 * tan


def _quad_geometry(model, graph, quad):
    th, w = quadrature(quad if quad is not None else max(64, 2 * graph.node_count))
    return geometry_at(model, graph.coefficients, th), w


def q_functional(model: WarpedProductModel, graph: RadialGraph, quad: int | None = None) -> float:
    """``Q = int f/H dsigma`` (no ``(n-1)/n`` factor)."""
    geo, w = _quad_geometry(model, graph, quad)
    if np.any(geo.H <= 0):
        raise MeanConvexityError("Q needs H > 0")
    return float(np.sum(w * geo.area_density * geo.f / geo.H))


def q_prime_formula(model: WarpedProductModel, graph: RadialGraph, quad: int | None = None) -> float:
    geo, w = _quad_geometry(model, graph, quad)
    if np.any(geo.H <= 0):
        raise MeanConvexityError("Q' needs H > 0")
    return _q_prime(model, geo, w)


def _q_prime(model, geo, w) -> float:
    n = model.n
    rem = (geo.f / geo.H) ** 2 * (geo.traceless_defect + _substatic_nu(model, geo) / geo.f)
    return float(-n / (n - 1) * np.sum(w * geo.area_density * geo.f**2) - np.sum(w * geo.area_density * rem))


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------


def flow_step_radial(model: WarpedProductModel, s: float, dt: float, rtol: float = 1e-12) -> float:
    """Advance a coordinate sphere by ``dt``: ``ds/dt = -f sqrt(F) = -sigma F(s)``.

    Crossing the horizon is impossible for the exact flow (``F(s0) = 0``); if the
    discrete step lands below ``s0`` the radius is clamped there and a
    :class:`HorizonClampWarning` is issued.
    """
    if dt == 0:
        return float(s)
    sig = model.potential_scale

    def rhs(_t, y):
        F = model.f2(np.maximum(y, model.s_lo), check=False)[0]
        return -sig * F

    sol = solve_ivp(rhs, (0.0, dt), [float(s)], method="DOP853", rtol=rtol, atol=1e-14 * max(1.0, abs(s)))
    if not sol.success:
        raise DomainError(f"radial step failed: {sol.message}")
    out = float(sol.y[0, -1])
    if model.has_horizon and out <= model.s0:
        warnings.warn(f"radial step crossed the horizon; clamped to s0={model.s0:g}", HorizonClampWarning)
        out = model.s0
    return out


@lru_cache(maxsize=16)
def _diff_matrix(size: int) -> np.ndarray:
    """Nodal values -> nodal theta-derivative of the interpolating cosine series."""
    theta = np.linspace(0.0, np.pi, size)
    k = np.arange(size)
    to_coef = np.column_stack([cosine_coefficients(e) for e in np.eye(size)])
    D = -np.sin(np.outer(theta, k)) * k @ to_coef
    D.setflags(write=False)
    return D


def _graph_rhs(model: WarpedProductModel, size: int):
    D = _diff_matrix(size)
    sig = model.potential_scale

    def rhs(_t, u):
        p = D @ u
        F = model.f2(u, check=False)[0]
        F = np.clip(F, 0.0, None)
        return -sig * np.sqrt(F) * np.sqrt(F + p**2 / u**2)

    return rhs


def _check_graph(model: WarpedProductModel, u: np.ndarray, slope_limit: float = 1e3) -> None:
    if not np.all(np.isfinite(u)):
        raise GraphError("flow produced non-finite values")
    p = _diff_matrix(u.size) @ u
    if np.max(np.abs(p) / u) > slope_limit:
        raise GraphError(f"graph property lost: max |u'|/u = {np.max(np.abs(p) / u):.3g}")
    if np.any(u <= model.s_lo):
        raise GraphError("flow reached the inner boundary")


def flow_step_graph(model: WarpedProductModel, graph: RadialGraph, dt: float, rtol: float = 1e-11) -> RadialGraph:
    """Advance a graph by ``dt`` under ``u_t = -f W``."""
    if dt == 0:
        return graph
    sol = solve_ivp(_graph_rhs(model, graph.node_count), (0.0, dt), graph.u, method="DOP853",
                    rtol=rtol, atol=1e-13 * float(np.max(graph.u)))
    if not sol.success:
        raise GraphError(f"graph step failed: {sol.message}")
    u = sol.y[:, -1]
    _check_graph(model, u)
    return RadialGraph(u)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowState:
    t: float
    graph: RadialGraph
    diagnostics: dict


@dataclass(frozen=True)
class FlowTrace:
    states: tuple
    dt: float
    model: WarpedProductModel
    stop_reason: str = "t_end"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    def column(self, key: str) -> np.ndarray:
        return np.array([st.diagnostics[key] for st in self.states])

    def conserved_quantity(self) -> np.ndarray:
        """``Q - n/(n-1) int_{Omega_t} f``, constant on equality flows."""
        n = self.model.n
        return self.column("Q") - n / (n - 1) * self.column("weighted_volume")


def _diagnostics(model: WarpedProductModel, graph: RadialGraph, quad: int | None, hor: float) -> dict:
    geo, w = _quad_geometry(model, graph, quad)
    node_geo = geometry_at(model, graph.coefficients, graph.theta)
    H = np.concatenate([geo.H, node_geo.H])
    n = model.n
    if np.any(H <= 0):
        Q = dQ = float("nan")
    else:
        Q = float(np.sum(w * geo.area_density * geo.f / geo.H))
        dQ = _q_prime(model, geo, w)
    vol = weighted_volume(model, graph, quad)
    sub = _substatic_nu(model, geo)
    return {
        "Q": Q,
        "dQdt_formula": dQ,
        "umbilicity_max": float(max(geo.traceless_defect.max(), node_geo.traceless_defect.max())),
        "substatic_nu_max": float(np.max(np.abs(sub))),
        "substatic_nu_min": float(np.min(sub)),
        "min_H": float(H.min()),
        "max_second_ff": float(max(geo.second_ff_norm.max(), node_geo.second_ff_norm.max())),
        "weighted_volume": vol,
        "hk_deficit": (n - 1) / n * Q - vol - hor,
        "s_mean": float(np.mean(graph.u)),
        "s_min": float(np.min(graph.u)),
    }


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    steps = int(round(t_end / dt))
    if steps < 1:
        raise ValueError("t_end must be at least one step")
    if abs(steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        return np.append(np.arange(steps) * dt, t_end)
    return np.linspace(0.0, t_end, steps + 1)


def run_flow(model: WarpedProductModel, graph: RadialGraph, t_end: float, dt: float,
             horizon_stop: float = 1e-3, rtol: float = 1e-12, quad: int | None = None) -> FlowTrace:
    """Integrate the flow and sample diagnostics every ``dt``.

    The run stops early when ``min u - s_lo < horizon_stop (s_max - s_lo)`` (the
    horizon is at infinite conformal distance, so it is never reached), when
    the mean curvature stops being positive, or when the graph property is lost.
    """
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    if not graph.is_constant() and model.c_cross != 1.0:
        raise GraphError("non-constant axisymmetric graphs need a round cross-section (c_cross = 1)")
    span = model.s_max - model.s_lo
    floor = model.s_lo + horizon_stop * span
    if np.min(graph.u) <= floor:
        raise DomainError("initial graph is already within the horizon stop distance")
    rhs = _graph_rhs(model, graph.node_count)
    coef_rows = np.column_stack([cosine_coefficients(e) for e in np.eye(graph.node_count)])
    th_q, _ = quadrature(quad if quad is not None else max(64, 2 * graph.node_count))
    n = model.n

    def near_horizon(_t, u):
        return float(np.min(u) - floor)

    near_horizon.terminal = True
    near_horizon.direction = -1

    def convexity(_t, u):
        a = coef_rows @ u
        try:
            return float(geometry_at(model, a, th_q).H.min())
        except DomainError:
            return -1.0

    convexity.terminal = True
    convexity.direction = -1

    t_eval = _time_grid(t_end, dt)
    sol = solve_ivp(rhs, (0.0, t_end), graph.u, method="DOP853", t_eval=t_eval, rtol=rtol,
                    atol=rtol * 1e-2 * float(np.max(graph.u)), events=(near_horizon, convexity))
    reason = "t_end"
    if sol.status == 1:
        reason = "horizon" if sol.t_events[0].size else "mean_convexity"
    elif not sol.success:
        raise GraphError(f"flow integration failed: {sol.message}")
    hor = horizon_constant_closed(model) * horizon_flux(model)
    states = []
    for t, u in zip(sol.t, sol.y.T):
        try:
            _check_graph(model, u)
        except GraphError as exc:
            reason = f"graph_lost: {exc}"
            break
        g = RadialGraph(u.copy())
        d = _diagnostics(model, g, quad, hor)
        if not d["min_H"] > 0:
            reason = "mean_convexity"
            break
        states.append(FlowState(float(t), g, d))
    if not states:
        raise MeanConvexityError(f"initial graph is not admissible for the flow ({reason})")
    meta = {"n": n, "horizon_term": hor, "t_end_requested": t_end, "horizon_stop": horizon_stop}
    return FlowTrace(tuple(states), dt, model, reason, meta)


# ---------------------------------------------------------------------------
# checks on traces
# ---------------------------------------------------------------------------


def numeric_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative of uniformly sampled data.

    Centered 4th order stencils in the interior; the two samples at each end
    use the one-sided 4th order stencils on five points.  Fewer than five
    samples fall back to second order (``numpy.gradient``).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("need at least 3 samples")
    h = t[1] - t[0]
    if y.size < 5:
        return np.gradient(y, h, edge_order=2)
    out = np.empty_like(y)
    out[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    a, b = y[:5], y[-5:][::-1]
    out[0] = (-25 * a[0] + 48 * a[1] - 36 * a[2] + 16 * a[3] - 3 * a[4]) / (12 * h)
    out[1] = (-3 * a[0] - 10 * a[1] + 18 * a[2] - 6 * a[3] + a[4]) / (12 * h)
    out[-1] = -(-25 * b[0] + 48 * b[1] - 36 * b[2] + 16 * b[3] - 3 * b[4]) / (12 * h)
    out[-2] = -(-3 * b[0] - 10 * b[1] + 18 * b[2] - 6 * b[3] + b[4]) / (12 * h)
    return out


def _uniform_part(trace: FlowTrace) -> int:
    """Number of leading states on the uniform ``dt`` grid (the last sample may be short)."""
    t = trace.times
    if t.size >= 3 and not math.isclose(t[-1] - t[-2], trace.dt, rel_tol=1e-6):
        return t.size - 1
    return t.size


def q_prime_residual(trace: FlowTrace) -> float:
    """``max |dQ/dt_numeric - dQ/dt_formula| / (1 + |formula|)`` over interior samples."""
    m = _uniform_part(trace)
    if m < 3:
        raise ValueError("q_prime_residual needs at least 3 states")
    t = trace.times[:m]
    Q = trace.column("Q")[:m]
    formula = trace.column("dQdt_formula")[:m]
    num = numeric_derivative(t, Q)
    rel = np.abs(num - formula) / (1 + np.abs(formula))
    return float(np.max(rel[1:-1]))


def monotonicity_report(trace: FlowTrace, model: WarpedProductModel | None = None, tol: float = 1e-10) -> dict:
    """Monotonicity of ``Q`` and of ``Q - n/(n-1) int_{Omega_t} f`` plus the HK limit gap.

    ``limit_gap = Q(t_end) - n/(n-1) [int_{Omega_t} f + c_N int |grad f|]``; it is
    nonnegative on substatic models and tends to 0 along equality flows.
    ``violation`` is raised when the combined quantity increases or the HK
    deficit turns negative at some sample.
    """
    model = trace.model if model is None else model
    n = model.n
    Q = trace.column("Q")
    cons = trace.conserved_quantity()
    scale = max(1.0, float(np.max(np.abs(Q))))
    dq = np.diff(Q)
    dc = np.diff(cons)
    hor = horizon_constant_closed(model) * horizon_flux(model)
    deficits = trace.column("hk_deficit")
    limit_gap = float(Q[-1] - n / (n - 1) * (trace.column("weighted_volume")[-1] + hor))
    mono = bool(np.all(dc <= tol * scale))
    hk_ok = bool(np.all(deficits >= -tol * scale))
    return {
        "nonincreasing": bool(np.all(dq <= tol * scale)),
        "monotone_quantity_nonincreasing": mono,
        "max_increase": float(max(0.0, dc.max(initial=0.0))),
        "limit_gap": limit_gap,
        "min_hk_deficit": float(deficits.min()),
        "violation": not (mono and hk_ok and limit_gap >= -tol * scale),
        "t_final": float(trace.times[-1]),
        "stop_reason": trace.stop_reason,
    }


def equality_flow_diagnostics(trace: FlowTrace, model: WarpedProductModel | None = None) -> dict:
    """Largest ``|h_0|^2`` and ``|(f Ric - Hess f + Lap f g)(nu, nu)|`` along the trace."""
    return {
        "umbilicity_max": float(trace.column("umbilicity_max").max()),
        "substatic_nu_max": float(trace.column("substatic_nu_max").max()),
    }


def codazzi_check(model: WarpedProductModel, graph: RadialGraph):
    """Both sides of ``grad_i H = -(n-2)/(n-1) Ric(e_i, nu)`` along the meridian.

    The identity holds on umbilic hypersurfaces.  Returns
    ``(max |grad H|, max |Ric(e, nu)|, max |grad H + (n-2)/(n-1) Ric(e, nu)|)``.
    """
    n = model.n
    th = graph.theta
    a = graph.coefficients
    geo = geometry_at(model, a, th)
    # d/dtheta of H from its nodal values, divided by the meridian line element
    dH = _diff_matrix(graph.node_count) @ geo.H
    F = model.f2(geo.s, check=False)[0]
    p = _diff_matrix(graph.node_count) @ graph.u
    grad_H = dH / np.sqrt(p**2 / F + geo.s**2)
    rad, coeff = ricci_components(model, geo.s)
    tan = ((n - 2) * model.c_cross + coeff) / geo.s**2
    # unit meridian tangent is (nu_theta, -nu_s) in the orthonormal (e_s, e_theta) frame
    mixed = (rad - tan) * geo.nu_radial * geo.nu_angular
    rhs = -(n - 2) / (n - 1) * mixed
    return float(np.max(np.abs(grad_H))), float(np.max(np.abs(mixed))), float(np.max(np.abs(grad_H - rhs)))


def write_trace_csv(trace: FlowTrace, path) -> None:
    m = len(trace)
    t = trace.times
    Q = trace.column("Q")
    if m >= 3:
        k = _uniform_part(trace)
        num = np.full(m, np.nan)
        num[:k] = numeric_derivative(t[:k], Q[:k])
    else:
        num = np.full(m, np.nan)
    cols = [t, trace.column("s_mean"), Q, num, trace.column("dQdt_formula"),
            trace.column("umbilicity_max"), trace.column("substatic_nu_max"), trace.column("min_H")]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in zip(*cols):
            w.writerow([f"{v:.12e}" for v in row])
