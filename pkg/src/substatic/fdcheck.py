"""Finite-difference curvature from the metric components, used as an oracle.

The warped metric ``ds^2/F(s) + s^2 g_N`` is written out in coordinates
``(s, phi_1, ..., phi_{n-1})`` with ``g_N = dphi_1^2 + sn(phi_1)^2 g_{S^{n-2}}``
(``sn`` the generalised sine of curvature ``c_cross``), Christoffel symbols
are central differences of the metric and Ricci is a central difference of
the Christoffel symbols.  Nothing here uses the closed-form curvature
expressions in :mod:`substatic.warped`.
"""

from __future__ import annotations

import numpy as np

from .warped import (
    WarpedProductModel,
    hessian_over_f_components,
    laplacian_f_over_f,
    ricci_components,
)

__all__ = ["metric_tensor", "christoffel", "ricci_fd", "curvature_fd", "curvature_mismatch"]


def _sn(kappa: float, x: float) -> float:
    if kappa > 0:
        r = np.sqrt(kappa)
        return np.sin(r * x) / r
    if kappa < 0:
        r = np.sqrt(-kappa)
        return np.sinh(r * x) / r
    return x


def metric_tensor(model: WarpedProductModel, x: np.ndarray) -> np.ndarray:
    n = model.n
    s = x[0]
    g = np.zeros((n, n))
    g[0, 0] = 1.0 / float(model.f2(s, check=False)[0])
    warp = s**2
    g[1, 1] = warp
    w = warp * _sn(model.c_cross, x[1]) ** 2
    for i in range(2, n):
        g[i, i] = w
        w = w * np.sin(x[i]) ** 2
    return g


def _d(func, x, i, h):
    e = np.zeros_like(x)
    e[i] = h
    return (func(x + e) - func(x - e)) / (2 * h)


def _steps(x, rel):
    # radial step relative to s, angular steps absolute
    return [rel * abs(x[0])] + [rel] * (len(x) - 1)


def christoffel(model: WarpedProductModel, x: np.ndarray, rel: float = 1e-5) -> np.ndarray:
    """``Gamma[k, i, j]`` from central differences of the metric."""
    n = model.n
    g = metric_tensor(model, x)
    ginv = np.linalg.inv(g)
    h = _steps(x, rel)
    dg = np.array([_d(lambda y: metric_tensor(model, y), x, l, h[l]) for l in range(n)])  # dg[l, i, j]
    # lower[i, j, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    lower = 0.5 * (np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg))
    return np.einsum("kl,ijl->kij", ginv, lower)


def ricci_fd(model: WarpedProductModel, x: np.ndarray, rel: float = 1e-4, rel_inner: float = 1e-5) -> np.ndarray:
    """Coordinate Ricci tensor ``R_ij`` by differencing the Christoffel symbols."""
    n = model.n
    G = christoffel(model, x, rel_inner)
    h = _steps(x, rel)
    dG = np.array([_d(lambda y: christoffel(model, y, rel_inner), x, m, h[m]) for m in range(n)])  # dG[m, k, i, j]
    term1 = np.einsum("kkij->ij", dG)
    term2 = np.einsum("jkik->ij", dG)
    term3 = np.einsum("kkl,lij->ij", G, G)
    term4 = np.einsum("kjl,lik->ij", G, G)
    return term1 - term2 + term3 - term4


def curvature_fd(model: WarpedProductModel, s: float, phi: float = 1.0, rel: float = 1e-4,
                 rel_inner: float = 1e-5) -> dict:
    """Unit-frame radial/tangential Ricci, ``Hess f/f`` and ``Lap f/f`` at radius ``s``."""
    n = model.n
    x = np.concatenate([[float(s)], [phi], np.full(n - 2, np.pi / 2)])
    g = metric_tensor(model, x)
    R = ricci_fd(model, x, rel, rel_inner)
    G = christoffel(model, x, rel_inner)

    def f(y):
        return model.potential_scale * np.sqrt(float(model.f2(y[0], check=False)[0]))

    h = _steps(x, rel_inner)
    grad = np.array([_d(f, x, i, h[i]) for i in range(n)])
    h2 = rel * abs(s)
    e = np.zeros(n)
    e[0] = h2
    f0 = f(x)
    d2 = (f(x + e) - 2 * f0 + f(x - e)) / h2**2
    hess = -np.einsum("kij,k->ij", G, grad)
    hess[0, 0] += d2
    lap = float(np.einsum("ij,ij->", np.linalg.inv(g), hess))
    return {
        "ricci_radial": R[0, 0] / g[0, 0],
        "ricci_tangential": R[1, 1] / g[1, 1],
        "ricci_mixed": float(np.max(np.abs(R - np.diag(np.diag(R))))),
        "hess_radial": hess[0, 0] / g[0, 0] / f0,
        "hess_tangential": hess[1, 1] / g[1, 1] / f0,
        "laplacian": lap / f0,
    }


def curvature_mismatch(model: WarpedProductModel, s: float, **kw) -> dict:
    """Relative errors of the closed-form curvature against :func:`curvature_fd`."""
    n = model.n
    fd = curvature_fd(model, s, **kw)
    rad, coeff = ricci_components(model, s)
    tan = ((n - 2) * model.c_cross + coeff) / s**2
    h_rad, h_tan = hessian_over_f_components(model, s)
    lap = laplacian_f_over_f(model, s)
    exact = {
        "ricci_radial": float(rad),
        "ricci_tangential": float(tan),
        "hess_radial": float(h_rad),
        "hess_tangential": float(h_tan),
        "laplacian": float(lap),
    }
    # components that vanish (flat directions) are compared against the largest one
    floor = max(abs(v) for v in exact.values()) or 1.0 / s**2
    return {key: abs(fd[key] - val) / max(abs(val), floor) for key, val in exact.items()}
