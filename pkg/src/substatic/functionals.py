"""Heintze-Karcher functional, horizon constant and the multi-horizon identity."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import MeanConvexityError, ModelError
from .hypersurface import RadialGraph, geometry_at, quadrature, surface_integral, weighted_volume
from .warped import (
    WarpedProductModel,
    hessian_over_f_horizon_limits,
    laplacian_f_over_f,
    metric_surface_gravity,
    surface_gravity,
)

__all__ = [
    "HKReport",
    "MultiHorizonData",
    "MinkowskiResult",
    "hk_lhs",
    "horizon_constant_closed",
    "horizon_constant_integral",
    "horizon_flux",
    "horizon_term",
    "hk_deficit",
    "hk_scale",
    "minkowski_cmc_check",
    "multi_horizon_equality_check",
]


def _require_mean_convex(model: WarpedProductModel, graph: RadialGraph, quad: int | None) -> None:
    th, _ = quadrature(quad if quad is not None else max(64, 2 * graph.node_count))
    H_q = geometry_at(model, graph.coefficients, th).H
    H_n = geometry_at(model, graph.coefficients, graph.theta).H
    if min(H_q.min(), H_n.min()) <= 0:
        raise MeanConvexityError("hypersurface is not strictly mean-convex")


def hk_lhs(model: WarpedProductModel, graph: RadialGraph, quad: int | None = None) -> float:
    """``(n-1)/n * int_Sigma f/H dsigma``."""
    _require_mean_convex(model, graph, quad)
    n = model.n
    return (n - 1) / n * surface_integral(model, graph, lambda g: g.f / g.H, quad)


def horizon_constant_closed(model: WarpedProductModel) -> float:
    """``c_N = s0 / (n k)`` with ``k`` the surface gravity of ``f = h'``; 0 without a horizon."""
    if not model.has_horizon:
        return 0.0
    surface_gravity(model)
    return model.s0 / (model.n * metric_surface_gravity(model))


def horizon_constant_integral(model: WarpedProductModel) -> float:
    """``c_N`` from its integral definition over the horizon.

    The bracket ``Lap f/f - Hess f/f(nu_f, nu_f)`` is evaluated through its
    finite horizon limits; ``|grad f|`` is constant on the horizon, so both
    horizon integrals are ``k |N| s0^(n-1)`` times a constant.
    """
    if not model.has_horizon:
        return 0.0
    n = model.n
    k = surface_gravity(model)
    flux = k * model.cross_volume * model.s0 ** (n - 1)
    radial, _ = hessian_over_f_horizon_limits(model)
    bracket = float(laplacian_f_over_f(model, model.s0)) - radial
    if bracket <= 0:
        raise ModelError(f"horizon bracket {bracket:g} is not positive for {model.name}")
    return (n - 1) / n * flux / (flux * bracket)


def horizon_flux(model: WarpedProductModel) -> float:
    """``int_{dM} |grad f| dsigma = k |N| s0^(n-1)``."""
    if not model.has_horizon:
        return 0.0
    return surface_gravity(model) * model.cross_volume * model.s0 ** (model.n - 1)


def horizon_term(model: WarpedProductModel, c_n: float | None = None) -> float:
    if not model.has_horizon:
        return 0.0
    if c_n is None:
        c_n = horizon_constant_closed(model)
    return c_n * horizon_flux(model)


def hk_scale(model: WarpedProductModel, s_hat: float) -> float:
    """Natural size ``|N| s_hat^n / n`` of the HK terms for a sphere of radius ``s_hat``."""
    return model.cross_volume * s_hat**model.n / model.n


@dataclass(frozen=True)
class HKReport:
    lhs: float
    weighted_volume: float
    horizon_term: float
    deficit: float
    c_n: float
    model: str
    graph_hash: str
    horizon_present: bool = True

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "volume": self.weighted_volume,
            "horizon": self.horizon_term,
            "deficit": self.deficit,
            "cn": self.c_n,
            "model": self.model,
            "graph_hash": self.graph_hash,
        }


def hk_deficit(model: WarpedProductModel, graph: RadialGraph, c_n: float | None = None,
               quad: int | None = None) -> HKReport:
    """Assemble the three Heintze-Karcher terms and their deficit.

    ``c_n`` overrides the horizon constant (used to inject errors in checks).
    """
    lhs = hk_lhs(model, graph, quad)
    vol = weighted_volume(model, graph, quad)
    cn = horizon_constant_closed(model) if c_n is None else c_n
    hor = horizon_term(model, cn)
    return HKReport(float(lhs), float(vol), float(hor), float(lhs - vol - hor), float(cn), model.name, graph.digest(), model.has_horizon)


@dataclass(frozen=True)
class MinkowskiResult:
    passed: bool
    is_cmc: bool
    deficit: float

    @property
    def note(self) -> str:
        return "" if self.is_cmc else "not CMC"


def minkowski_cmc_check(model: WarpedProductModel, graph: RadialGraph, tol_h: float = 1e-8,
                        tol: float = 1e-9, c_n: float | None = None) -> MinkowskiResult:
    """A CMC hypersurface must saturate the HK inequality; non-CMC input passes vacuously."""
    th, _ = quadrature(max(64, 2 * graph.node_count))
    H = geometry_at(model, graph.coefficients, th).H
    is_cmc = float(np.max(np.abs(H - H.mean()))) < tol_h * max(1.0, float(np.abs(H).max()))
    if not is_cmc:
        return MinkowskiResult(True, False, float("nan"))
    rep = hk_deficit(model, graph, c_n=c_n)
    scale = max(abs(rep.lhs), 1.0)
    return MinkowskiResult(bool(abs(rep.deficit) < tol * scale), True, rep.deficit)


@dataclass(frozen=True)
class MultiHorizonData:
    """Per horizon component: surface gravity ``k``, radius ``s0`` and ``|N_j|``."""

    k: np.ndarray
    s0: np.ndarray
    vol: np.ndarray

    def __post_init__(self):
        arrs = [np.atleast_1d(np.asarray(v, dtype=float)) for v in (self.k, self.s0, self.vol)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
            raise ValueError("k, s0 and vol must be 1-d arrays of equal length")
        if any(np.any(a <= 0) for a in arrs):
            raise ValueError("multi-horizon data must be positive")
        for name, a in zip(("k", "s0", "vol"), arrs):
            object.__setattr__(self, name, a)

    def sides(self):
        """``((sum k|N|)^2, (sum k^2/s0 |N|)(sum s0 |N|))``."""
        lhs = np.sum(self.k * self.vol) ** 2
        rhs = np.sum(self.k**2 / self.s0 * self.vol) * np.sum(self.s0 * self.vol)
        return float(lhs), float(rhs)


def multi_horizon_equality_check(data: MultiHorizonData, tol: float = 1e-12):
    """Gap in ``(sum k|N|)^2 <= (sum k^2/s0 |N|)(sum s0 |N|)``.

    With ``alpha_j = k_j |N_j|`` and ``beta_j = k_j / s0_j`` the gap is
    ``sum_{i<j} alpha_i alpha_j (beta_i - beta_j)^2 / (beta_i beta_j)``, which is
    nonnegative term by term and vanishes exactly when all ``beta_j`` agree.
    Returns ``(holds, gap)``.
    """
    alpha = data.k * data.vol
    beta = data.k / data.s0
    i, j = np.triu_indices(alpha.size, k=1)
    gap = float(np.sum(alpha[i] * alpha[j] * (beta[i] - beta[j]) ** 2 / (beta[i] * beta[j])))
    return gap < tol, gap


def to_dict(report: HKReport) -> dict:
    return asdict(report)
