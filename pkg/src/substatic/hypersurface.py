r"""Axisymmetric radial graphs ``s = u(theta)`` over the round cross-section.

A graph is stored by its values on the nodes ``theta_j = j pi / N``
(Chebyshev-Lobatto points of ``x = cos theta``).  It is represented as an even
cosine series ``u = sum_k a_k cos(k theta)``, so ``u'(0) = u'(pi) = 0`` holds by
construction and derivatives are exact for the series.  Surface integrals use
Gauss-Legendre quadrature in ``theta``.

With ``W = sqrt(f^2 + u'^2/u^2)`` the outward unit normal is
``nu = (f^2 d_s - u'/u^2 d_theta) / W`` and the principal curvatures are

* meridian: ``kappa_m = (f^2/s + (f^2)'/2 - u''/s^2)/W
  - (f^2 (f^2)'/2 - f^2 u'^2/s^3 - u'^2 u''/s^4)/W^3``
* rotational (multiplicity n-2): ``kappa_r = (f^2/s - cot(theta) u'/s^2)/W``

so that ``H = kappa_m + (n-2) kappa_r`` and
``|h_0|^2 = (n-2)/(n-1) (kappa_m - kappa_r)^2``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.fft import dct

from .errors import DomainError, GraphError
from .warped import WarpedProductModel, sphere_volume

__all__ = [
    "RadialGraph",
    "SurfaceGeometry",
    "cosine_coefficients",
    "cosine_eval",
    "sphere_graph",
    "perturbed_graph",
    "graph_from_function",
    "graph_geometry",
    "geometry_at",
    "quadrature",
    "area",
    "weighted_volume",
    "mean_curvature_fd_check",
    "write_graph_csv",
    "read_graph_csv",
]


def cosine_coefficients(u: np.ndarray) -> np.ndarray:
    """Coefficients ``a_k`` with ``u_j = sum_k a_k cos(k theta_j)`` (DCT-I)."""
    u = np.asarray(u, dtype=float)
    N = u.size - 1
    a = dct(u, type=1) / N
    a[0] /= 2
    a[-1] /= 2
    return a


def cosine_eval(a: np.ndarray, theta, deriv: int = 0) -> np.ndarray:
    """Evaluate the cosine series (or its first / second theta-derivative)."""
    k = np.arange(a.size)
    kt = np.outer(np.atleast_1d(theta), k)
    if deriv == 0:
        return np.cos(kt) @ a
    if deriv == 1:
        return -np.sin(kt) @ (k * a)
    if deriv == 2:
        return -np.cos(kt) @ (k**2 * a)
    raise ValueError("deriv must be 0, 1 or 2")


@dataclass(frozen=True, eq=False)
class RadialGraph:
    """Axisymmetric graph ``s = u(theta)`` sampled at ``theta_j = j pi / N``."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 1 or u.size < 3:
            raise GraphError("a graph needs at least 3 nodes")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def node_count(self) -> int:
        return self.u.size

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.u.size)

    @property
    def coefficients(self) -> np.ndarray:
        return cosine_coefficients(self.u)

    def is_constant(self, tol: float = 1e-13) -> bool:
        return float(np.ptp(self.u)) <= tol * max(1.0, float(np.max(np.abs(self.u))))

    def digest(self) -> str:
        return hashlib.sha256(self.u.tobytes()).hexdigest()[:16]


def _check_inside(model: WarpedProductModel, u: np.ndarray) -> None:
    if np.any(u <= model.s_lo):
        raise DomainError(f"graph touches or crosses the inner boundary s={model.s_lo:g}")
    if np.any(u > model.s_max * (1 + 1e-12)):
        raise DomainError(f"graph exceeds s_max={model.s_max:g}")


def sphere_graph(model: WarpedProductModel, s_hat: float, node_count: int = 65) -> RadialGraph:
    """Coordinate sphere ``{s = s_hat}``."""
    u = np.full(node_count, float(s_hat))
    _check_inside(model, u)
    return RadialGraph(u)


def perturbed_graph(model: WarpedProductModel, s_hat: float, modes, node_count: int = 65) -> RadialGraph:
    """``s_hat + sum_k amp_k cos(k theta)`` for ``modes = {k: amp_k}`` (or a list of pairs)."""
    items = modes.items() if isinstance(modes, dict) else modes
    theta = np.linspace(0.0, np.pi, node_count)
    u = np.full(node_count, float(s_hat))
    for k, amp in items:
        u = u + amp * np.cos(int(k) * theta)
    _check_inside(model, u)
    return RadialGraph(u)


def graph_from_function(model: WarpedProductModel, func, node_count: int = 65) -> RadialGraph:
    u = np.asarray(func(np.linspace(0.0, np.pi, node_count)), dtype=float)
    _check_inside(model, u)
    return RadialGraph(u)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Pointwise extrinsic geometry, evaluated at the angles ``theta``.

    ``area_density`` integrates against ``dtheta`` to the area (the fibre
    sphere and the cross-section volume factor are folded in).
    """

    theta: np.ndarray
    s: np.ndarray
    area_density: np.ndarray
    H: np.ndarray
    kappa_meridian: np.ndarray
    kappa_rotation: np.ndarray
    traceless_defect: np.ndarray
    nu_radial: np.ndarray
    nu_angular: np.ndarray
    f: np.ndarray
    speed_factor: np.ndarray
    n: int

    @property
    def second_ff_norm(self) -> np.ndarray:
        return np.sqrt(self.kappa_meridian**2 + (self.n - 2) * self.kappa_rotation**2)


def _fibre_factor(model: WarpedProductModel) -> float:
    """|S^{n-2}| scaled so constant graphs see the model's cross-section volume."""
    n = model.n
    return sphere_volume(n - 2) * model.cross_volume / sphere_volume(n - 1)


def geometry_at(model: WarpedProductModel, a: np.ndarray, theta) -> SurfaceGeometry:
    """Geometry of the graph with cosine coefficients ``a`` at arbitrary angles."""
    n = model.n
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = cosine_eval(a, theta)
    p = cosine_eval(a, theta, 1)
    q = cosine_eval(a, theta, 2)
    F, F1, _, _ = model.f2(s, check=False)
    if np.any(~np.isfinite(F)) or np.any(F <= 0):
        raise DomainError("graph left the region where f > 0")
    sin = np.sin(theta)
    cos = np.cos(theta)
    on_axis = sin < 1e-12
    cot_p = np.where(on_axis, q, cos * p / np.where(on_axis, 1.0, sin))
    W = np.sqrt(F + p**2 / s**2)
    k_rot = (F / s - cot_p / s**2) / W
    k_mer = (F / s + F1 / 2 - q / s**2) / W - (F * F1 / 2 - F * p**2 / s**3 - p**2 * q / s**4) / W**3
    H = k_mer + (n - 2) * k_rot
    defect = (n - 2) / (n - 1) * (k_mer - k_rot) ** 2
    dens = np.sqrt(p**2 / F + s**2) * (s * sin) ** (n - 2) * _fibre_factor(model)
    f = model.potential_scale * np.sqrt(F)
    return SurfaceGeometry(
        theta=theta,
        s=s,
        area_density=dens,
        H=H,
        kappa_meridian=k_mer,
        kappa_rotation=k_rot,
        traceless_defect=defect,
        nu_radial=np.sqrt(F) / W,
        nu_angular=-p / (s * W),
        f=f,
        speed_factor=W,
        n=n,
    )


def _check_resolved(graph: RadialGraph, rtol: float = 1e-6) -> None:
    a = graph.coefficients
    N = a.size - 1
    tail = np.abs(a[int(0.75 * N) + 1:])
    if tail.size and np.max(tail) > rtol * max(1.0, float(np.max(np.abs(a[1:])) if N > 0 else 0.0)):
        raise GraphError("graph is not smooth at this resolution (cosine tail too large)")


def graph_geometry(model: WarpedProductModel, graph: RadialGraph) -> SurfaceGeometry:
    """Geometry at the graph's own nodes (H w.r.t. the outward normal)."""
    if not graph.is_constant() and model.c_cross != 1.0:
        raise GraphError("non-constant axisymmetric graphs need a round cross-section (c_cross = 1)")
    _check_resolved(graph)
    return geometry_at(model, graph.coefficients, graph.theta)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def quadrature(count: int):
    """Gauss-Legendre nodes and weights on ``[0, pi]``."""
    if count not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(count)
        _GL_CACHE[count] = (np.pi / 2 * (x + 1), np.pi / 2 * w)
    return _GL_CACHE[count]


def _quad_count(graph: RadialGraph, quad: int | None) -> int:
    return quad if quad is not None else max(64, 2 * graph.node_count)


def surface_integral(model: WarpedProductModel, graph: RadialGraph, integrand, quad: int | None = None) -> float:
    """``int_Sigma integrand(geometry) dsigma`` by Gauss-Legendre in theta."""
    if not graph.is_constant() and model.c_cross != 1.0:
        raise GraphError("non-constant axisymmetric graphs need a round cross-section (c_cross = 1)")
    th, w = quadrature(_quad_count(graph, quad))
    geo = geometry_at(model, graph.coefficients, th)
    return float(np.sum(w * geo.area_density * integrand(geo)))


def area(model: WarpedProductModel, graph: RadialGraph, quad: int | None = None) -> float:
    return surface_integral(model, graph, lambda g: 1.0, quad)


def weighted_volume(model: WarpedProductModel, graph: RadialGraph, quad: int | None = None) -> float:
    """``int_Omega f dmu`` between the inner boundary and the graph.

    The volume density is ``s^(n-1)/f`` times the cross-section density, so the
    radial integrand collapses to ``sigma s^(n-1)`` and is integrated exactly.
    """
    n = model.n
    th, w = quadrature(_quad_count(graph, quad))
    u = cosine_eval(graph.coefficients, th)
    radial = (u**n - model.s_lo**n) / n
    fib = _fibre_factor(model) * np.sin(th) ** (n - 2)
    return float(model.potential_scale * np.sum(w * fib * radial))


def mean_curvature_fd_check(model: WarpedProductModel, graph: RadialGraph, bump=None, step: float = 1e-5) -> float:
    """Relative mismatch between d/de Area(Sigma + e bump nu) and ``int H bump dsigma``.

    A normal displacement ``e bump nu`` is the graph change ``e bump W`` to first
    order.  ``bump`` is a callable of theta or an array of nodal values
    (default 1).
    """
    theta = graph.theta
    if bump is None:
        phi = np.ones_like(theta)
    elif callable(bump):
        phi = np.asarray(bump(theta), dtype=float)
    else:
        phi = np.asarray(bump, dtype=float)
    geo = geometry_at(model, graph.coefficients, theta)
    du = phi * geo.speed_factor
    scale = float(np.max(np.abs(graph.u)))
    e = step * scale / max(1e-300, float(np.max(np.abs(du))))
    a_plus = area(model, RadialGraph(graph.u + e * du))
    a_minus = area(model, RadialGraph(graph.u - e * du))
    fd = (a_plus - a_minus) / (2 * e)
    bump_coef = cosine_coefficients(phi)
    th, _ = quadrature(_quad_count(graph, None))
    bump_q = cosine_eval(bump_coef, th)
    exact = surface_integral(model, graph, lambda g: g.H * bump_q)
    return abs(fd - exact) / abs(exact)


def write_graph_csv(graph: RadialGraph, path) -> None:
    data = np.column_stack([graph.theta, graph.u])
    np.savetxt(path, data, delimiter=",", header="theta,u", comments="", fmt="%.17g")


def read_graph_csv(path) -> RadialGraph:
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    theta, u = data[:, 0], data[:, 1]
    if not np.allclose(theta, np.linspace(0.0, np.pi, theta.size), atol=1e-12):
        raise GraphError("graph CSV must be sampled at theta_j = j*pi/N")
    return RadialGraph(u)
