r"""Substatic warped products in area-radius form.

Models are metrics

    g = ds^2 / f(s)^2 + s^2 g_N ,      s in [s0, s_max],

on ``[s0, s_max] x N`` where ``N`` is an (n-1)-dimensional cross-section with
``Ric_N >= (n-2) c_cross g_N`` and total volume ``|N|``.  The warping function
is ``h(r) = s`` and ``dh/dr = f``.  Every quantity is computed from the squared
profile ``F2(s) = f(s)^2`` and its s-derivatives, which stay smooth across the
horizon ``{f = 0}`` while ``f'`` itself blows up there.

A constant ``potential_scale`` (sigma) lets the substatic potential differ from
the metric profile by a positive factor, ``f_pot = sigma * dh/dr``.  Ratios such
as Hess(f)/f and Lap(f)/f do not see sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import gamma

from .errors import DegenerateHorizonError, DomainError, ModelError

__all__ = [
    "ClosedFormProfile",
    "TabulatedProfile",
    "CallableProfile",
    "EtaDefinedProfile",
    "WarpedProductModel",
    "EtaProfile",
    "SubstaticReport",
    "sphere_volume",
    "potential_eval",
    "horizon_radius",
    "surface_gravity",
    "metric_surface_gravity",
    "eta_extract",
    "substatic_check",
    "warping_function",
    "ricci_components",
    "hessian_over_f_components",
    "hessian_over_f_horizon_limits",
    "hessian_continuity_probe",
    "laplacian_f_over_f",
    "substatic_tangential_eigenvalue",
    "substatic_radial_gap",
    "montiel_potential_residual",
    "fit_desitter_schwarzschild",
    "cylinder_substatic_check",
]

SUBSTATIC_TOL = 1e-9


def sphere_volume(dim: int) -> float:
    """Volume of the unit round sphere S^dim."""
    return 2.0 * math.pi ** ((dim + 1) / 2) / gamma((dim + 1) / 2)


# ---------------------------------------------------------------------------
# potential profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormProfile:
    """``f^2 = c - lam s^2 - 2 m s^(2-n)`` (de Sitter / anti de Sitter-Schwarzschild)."""

    lam: float
    m: float
    kind: str = field(default="closed_form", init=False)

    def f2(self, s, c, n):
        s = np.asarray(s, dtype=float)
        lam, m = self.lam, self.m
        F = c - lam * s**2
        F1 = -2.0 * lam * s
        F2 = np.full_like(s, -2.0 * lam)
        F3 = np.zeros_like(s)
        if m != 0.0:
            # mass terms are singular at the origin; skip them when absent
            F = F - 2.0 * m * s ** (2 - n)
            F1 = F1 - 2.0 * m * (2 - n) * s ** (1 - n)
            F2 = F2 - 2.0 * m * (2 - n) * (1 - n) * s ** (-n)
            F3 = F3 + 2.0 * m * (2 - n) * (1 - n) * n * s ** (-n - 1)
        return F, F1, F2, F3

    @property
    def bounds(self):
        return (0.0, math.inf)


class TabulatedProfile:
    """Samples ``(s_i, f_i)`` interpolated by a monotone cubic (PCHIP) in ``f^2``.

    Interpolating ``f^2`` rather than ``f`` keeps the interpolant smooth through
    a horizon sample where ``f = 0``.
    """

    kind = "tabulated"

    def __init__(self, s: Sequence[float], f: Sequence[float]):
        s = np.asarray(s, dtype=float)
        f = np.asarray(f, dtype=float)
        if s.ndim != 1 or s.shape != f.shape or s.size < 4:
            raise ModelError("tabulated profile needs >= 4 matching (s, f) samples")
        if np.any(np.diff(s) <= 0):
            raise ModelError("tabulated samples must be strictly increasing in s")
        self.s = s
        self.f = f
        self._interp = PchipInterpolator(s, f**2, extrapolate=False)
        self._d = [self._interp.derivative(k) for k in (1, 2, 3)]

    def f2(self, s, c, n):
        s = np.asarray(s, dtype=float)
        return (self._interp(s), self._d[0](s), self._d[1](s), self._d[2](s))

    @property
    def bounds(self):
        return (float(self.s[0]), float(self.s[-1]))

    def __repr__(self):
        return f"TabulatedProfile(<{self.s.size} samples on [{self.s[0]:g}, {self.s[-1]:g}]>)"


class CallableProfile:
    """User potential given as ``s -> (f, f', f'')``.

    ``f^2`` derivatives are rebuilt as ``2 f f'`` and ``2 (f'^2 + f f'')``; the
    third derivative comes from a central difference of the second.
    """

    kind = "callable"

    def __init__(self, func: Callable, bounds=(0.0, math.inf)):
        self.func = func
        self._bounds = bounds

    def _second(self, s):
        f, f1, f2 = self.func(s)
        return np.asarray(f**2), 2.0 * f * f1, 2.0 * (f1**2 + f * f2)

    def f2(self, s, c, n):
        s = np.asarray(s, dtype=float)
        F, F1, F2 = self._second(s)
        h = 1e-4 * np.maximum(np.abs(s), 1.0)
        F3 = (self._second(s + h)[2] - self._second(s - h)[2]) / (2 * h)
        return F, F1, F2, F3

    @property
    def bounds(self):
        return self._bounds


class EtaDefinedProfile:
    """Profile given through its classification function: ``f^2 = c + s^2 eta(s^-n)``.

    ``eta`` maps ``t`` to ``(eta, eta', eta'', eta''')``.  Useful for synthetic
    (possibly non-substatic) models whose derivatives are known exactly.
    """

    kind = "eta"

    def __init__(self, eta: Callable, bounds=(0.0, math.inf)):
        self.eta = eta
        self._bounds = bounds

    def f2(self, s, c, n):
        s = np.asarray(s, dtype=float)
        t = s ** (-n)
        e0, e1, e2, e3 = self.eta(t)
        # derivatives of t = s^-n
        t1 = -n * s ** (-n - 1)
        t2 = n * (n + 1) * s ** (-n - 2)
        t3 = -n * (n + 1) * (n + 2) * s ** (-n - 3)
        # E(s) = eta(t(s)) and its s-derivatives (Faa di Bruno)
        E1 = e1 * t1
        E2 = e2 * t1**2 + e1 * t2
        E3 = e3 * t1**3 + 3 * e2 * t1 * t2 + e1 * t3
        F = c + s**2 * e0
        F1 = 2 * s * e0 + s**2 * E1
        F2 = 2 * e0 + 4 * s * E1 + s**2 * E2
        F3 = 6 * E1 + 6 * s * E2 + s**2 * E3
        return F, F1, F2, F3

    @property
    def bounds(self):
        return self._bounds


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------


def _largest_horizon(F2func, lo: float, hi: float, samples: int = 4001):
    """Largest root of F2 in [lo, hi] beyond which F2 > 0, or None if F2 > 0 throughout."""
    grid = np.linspace(lo, hi, samples)
    vals = F2func(grid)
    if not np.all(np.isfinite(vals)):
        raise ModelError("f^2 is not finite on the search bracket")
    if vals[-1] <= 0:
        raise ModelError(f"f^2 <= 0 at the outer end s={hi:g} of the bracket")
    # samples at round-off level count as zeros (tabulated data ending on a horizon)
    bad = np.nonzero(vals <= 1e-14 * vals[-1])[0]
    if bad.size == 0:
        return None
    i = bad[-1]
    if vals[i] >= 0.0:
        return float(grid[i])
    root = brentq(lambda x: float(F2func(x)), grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps,
                  maxiter=500)
    return float(root)


@dataclass(frozen=True)
class WarpedProductModel:
    """Warped product ``ds^2/f^2 + s^2 g_N`` with potential ``sigma * f``.

    ``s0`` is located automatically as the outermost zero of ``f^2`` below
    ``s_max``; models with ``f^2 > 0`` all the way down are boundaryless and get
    ``s0 = None`` (the domain then starts at the origin ``s = 0``).
    """

    name: str
    n: int
    c_cross: float
    c_pot: float
    potential: object
    s_max: float
    cross_volume: float | None = None
    s0: float | None = None
    potential_scale: float = 1.0
    boundaryless: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise ModelError("dimension n must be >= 3")
        if self.potential_scale <= 0:
            raise ModelError("potential_scale must be positive")
        if self.cross_volume is None:
            object.__setattr__(self, "cross_volume", sphere_volume(self.n - 1))
        elif self.cross_volume <= 0:
            raise ModelError("cross_volume must be positive")
        if self.s0 is None and not self.boundaryless:
            lo, hi = self.potential.bounds
            lo = max(lo, 1e-6 * self.s_max)
            hi = min(hi, self.s_max)
            s0 = _largest_horizon(lambda x: self.f2(x, check=False)[0], lo, hi)
            object.__setattr__(self, "s0", s0)
            if s0 is None:
                object.__setattr__(self, "boundaryless", True)
        if self.s0 is not None and self.s0 >= self.s_max:
            raise ModelError("s_max must exceed the horizon radius")

    # -- basic evaluation ------------------------------------------------
    @property
    def has_horizon(self) -> bool:
        return self.s0 is not None

    @property
    def s_lo(self) -> float:
        """Inner end of the domain: the horizon, or the origin for boundaryless models."""
        return self.s0 if self.s0 is not None else 0.0

    def f2(self, s, check: bool = True):
        """``(F, F', F'', F''')`` for ``F = (dh/dr)^2`` as functions of s."""
        if check:
            s_arr = np.asarray(s, dtype=float)
            span = self.s_max - self.s_lo
            if np.any(s_arr < self.s_lo - 1e-12 * span) or np.any(s_arr > self.s_max * (1 + 1e-12)):
                raise DomainError(f"s outside [{self.s_lo:g}, {self.s_max:g}] for model {self.name}")
        return self.potential.f2(s, self.c_pot, self.n)

    def describe(self) -> dict:
        d = {
            "name": self.name,
            "n": self.n,
            "c_cross": self.c_cross,
            "c_pot": self.c_pot,
            "kind": self.potential.kind,
            "s_max": self.s_max,
            "cross_volume": self.cross_volume,
            "s0": self.s0,
        }
        if isinstance(self.potential, ClosedFormProfile):
            d["lambda"] = self.potential.lam
            d["m"] = self.potential.m
        if self.potential_scale != 1.0:
            d["potential_scale"] = self.potential_scale
        return d


def potential_eval(model: WarpedProductModel, s):
    """Value and first two s-derivatives of the potential ``f`` at ``s``.

    Within ``1e-4 (s_max - s0)`` of the horizon the series ``f ~ sqrt(2 k (s - s0))``
    is used, since ``f'`` diverges there.

    Raises
    ------
    DomainError
        If ``s`` is outside ``[s0, s_max]``.
    ModelError
        If ``f^2`` is negative somewhere in the request.
    """
    s = np.asarray(s, dtype=float)
    F, F1, F2, _ = model.f2(s)
    span = model.s_max - model.s_lo
    if np.any(F < -1e-12 * max(1.0, float(np.max(np.abs(F1))) * span)):
        raise ModelError(f"negative f^2 inside the domain of {model.name}")
    sig = model.potential_scale
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.sqrt(np.clip(F, 0.0, None))
        f1 = F1 / (2 * f)
        f2 = (F2 / 2 - f1**2) / f
        if model.has_horizon:
            x = s - model.s0
            near = x < 1e-4 * span
            if np.any(near):
                k = metric_surface_gravity(model)
                fs = np.sqrt(2 * k * x)
                f = np.where(near, fs, f)
                f1 = np.where(near, k / fs, f1)
                f2 = np.where(near, -(k**2) / fs**3, f2)
    out = (sig * f, sig * f1, sig * f2)
    if out[0].ndim == 0:
        return tuple(float(v) for v in out)
    return out


def horizon_radius(profile, c_pot: float, n: int, bracket: tuple[float, float]) -> float:
    """Outermost zero of ``f^2`` in ``bracket`` with ``f > 0`` on ``(s0, bracket[1]]``."""
    lo, hi = bracket
    root = _largest_horizon(lambda x: profile.f2(x, c_pot, n)[0], lo, hi)
    if root is None:
        raise ModelError(f"f^2 has no zero in [{lo:g}, {hi:g}]")
    return root


def metric_surface_gravity(model: WarpedProductModel) -> float:
    """``lim f f'`` for the normalised potential ``f = dh/dr``: ``F'(s0)/2``."""
    if not model.has_horizon:
        raise DomainError(f"model {model.name} has no horizon")
    return float(model.f2(model.s0)[1]) / 2.0


def surface_gravity(model: WarpedProductModel, tol: float = 1e-12) -> float:
    """Constant value ``k`` of ``|grad f|`` on the horizon."""
    k = model.potential_scale * metric_surface_gravity(model)
    if k <= tol:
        raise DegenerateHorizonError(f"surface gravity {k:g} of {model.name} is not positive")
    return k


# ---------------------------------------------------------------------------
# classification function eta
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EtaProfile:
    """``eta(t)`` with ``f^2 = c + s^2 eta(s^-n)``, on ``t in [t_lo, t_hi]``."""

    t_lo: float
    t_hi: float
    n: int
    c_pot: float
    model: WarpedProductModel

    def _s(self, t):
        return np.asarray(t, dtype=float) ** (-1.0 / self.n)

    def __call__(self, t):
        return self.derivatives(t)[0]

    def derivatives(self, t):
        """``(eta, eta', eta'')`` by the chain rule through ``s = t^(-1/n)``."""
        n, c = self.n, self.c_pot
        s = self._s(t)
        F, F1, F2, _ = self.model.f2(s, check=False)
        E = (F - c) / s**2
        E1 = F1 / s**2 - 2 * (F - c) / s**3
        E2 = F2 / s**2 - 4 * F1 / s**3 + 6 * (F - c) / s**4
        ds = -(s ** (n + 1)) / n
        dds = (n + 1) / n**2 * s ** (2 * n + 1)
        return E, E1 * ds, E2 * ds**2 + E1 * dds

    def grid(self, count: int = 401):
        return np.linspace(self.t_lo, self.t_hi, count)


def eta_extract(model: WarpedProductModel, s_inner: float | None = None) -> EtaProfile:
    """Classification function of ``model``.

    For boundaryless models ``t = s^-n`` is unbounded at the origin, so the
    profile is cut at ``s_inner`` (default ``0.05 s_max``).
    """
    if model.has_horizon:
        s_lo = model.s0
    else:
        s_lo = s_inner if s_inner is not None else 0.05 * model.s_max
    return EtaProfile(model.s_max ** (-model.n), s_lo ** (-model.n), model.n, model.c_pot, model)


# ---------------------------------------------------------------------------
# pointwise curvature
# ---------------------------------------------------------------------------


def ricci_components(model: WarpedProductModel, s):
    """Ricci on the unit radial vector and the ``g_N`` coefficient beyond ``Ric_N``.

    Returns ``(-(n-1) f f'/s, -[s f f' + (n-2) f^2])``; the unit tangential Ricci
    of an Einstein cross-section is ``((n-2) c_cross + coeff) / s^2``.
    """
    n = model.n
    F, F1, _, _ = model.f2(s)
    return -(n - 1) * F1 / (2 * s), -(s * F1 / 2 + (n - 2) * F)


def hessian_over_f_components(model: WarpedProductModel, s):
    """``Hess f / f`` on unit radial and unit tangential vectors: ``(f'^2 + f f'', f f'/s)``."""
    _, F1, F2, _ = model.f2(s)
    return F2 / 2, F1 / (2 * s)


def hessian_over_f_horizon_limits(model: WarpedProductModel):
    """Horizon limits of :func:`hessian_over_f_components`: ``((f^2)''(s0)/2, k/s0)``."""
    if not model.has_horizon:
        raise DomainError(f"model {model.name} has no horizon")
    _, F1, F2, _ = model.f2(model.s0)
    return float(F2) / 2, float(F1) / (2 * model.s0)


def hessian_continuity_probe(model: WarpedProductModel, levels: int = 7, rtol: float = 1e-3):
    """Probe continuity of ``Hess f / f`` up to the horizon.

    Evaluates both unit components at ``s0 + 10^-j (s_max - s0)`` for
    ``j = 1..levels`` and reports whether the sequence settles (successive
    changes shrink below ``rtol`` relative to the values).  Returns
    ``(continuous, radial_values, tangential_values)``.
    """
    if not model.has_horizon:
        raise DomainError(f"model {model.name} has no horizon")
    span = model.s_max - model.s0
    s = model.s0 + span * 10.0 ** -np.arange(1, levels + 1)
    rad, tan = hessian_over_f_components(model, s)
    ok = True
    for v in (rad, tan):
        if not np.all(np.isfinite(v)):
            ok = False
            continue
        jumps = np.abs(np.diff(v))
        scale = 1.0 + np.abs(v[-1])
        if jumps[-1] > rtol * scale or jumps[-1] > jumps[-2] * 1.01 + 1e-14:
            ok = False
    return ok, rad, tan


def laplacian_f_over_f(model: WarpedProductModel, s):
    """``Lap f / f = f'^2 + f f'' + (n-1) f f'/s``, finite at the horizon."""
    _, F1, F2, _ = model.f2(s)
    return F2 / 2 + (model.n - 1) * F1 / (2 * s)


def substatic_radial_gap(model: WarpedProductModel, s):
    """``h' (f'/f) - h''`` in r-coordinates (zero when the potential is ``sigma h'``)."""
    F, F1, _, _ = model.f2(s)
    hdot = np.sqrt(F)
    hddot = F1 / 2
    f, fs, _ = potential_eval(model, s)
    fdot = fs * hdot
    return hdot * fdot / f - hddot


def substatic_tangential_eigenvalue(model: WarpedProductModel, s, c_cross: float | None = None):
    r"""Substatic tensor ``f Ric - Hess f + Lap f g`` on a unit tangent vector.

    Equals ``[sigma (n-2)(c_cross - c_pot) h' + h^3 F_dot / 2] / s^2`` where
    ``F`` is the warping function of :func:`warping_function`; written out,
    ``f [(n-2)(c_cross - f^2)/s^2 + (f^2)''/2 + (n-3)(f^2)'/(2s)]``.
    """
    n = model.n
    cc = model.c_cross if c_cross is None else c_cross
    F, F1, F2, _ = model.f2(s)
    f = model.potential_scale * np.sqrt(np.clip(F, 0.0, None))
    return f * ((n - 2) * (cc - F) / s**2 + F2 / 2 + (n - 3) * F1 / (2 * s))


def warping_function(model: WarpedProductModel, s):
    """Warping function ``F = 2 h''/h - (n-2)(c - h'^2)/h^2`` with ``h = s``, ``h' = f``, ``h'' = f f'``."""
    F, F1, _, _ = model.f2(s)
    return F1 / s - (model.n - 2) * (model.c_pot - F) / s**2


# ---------------------------------------------------------------------------
# substatic classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubstaticReport:
    radial_gap_min: float
    tangential_gap_min: float
    H1: bool
    H2: bool
    H3: bool
    H4: bool
    eta_convexity_min: float
    eta_slope_max: float
    tol: float

    @property
    def substatic(self) -> bool:
        return self.radial_gap_min >= -self.tol and self.tangential_gap_min >= -self.tol

    def as_dict(self) -> dict:
        return {
            "radial_gap_min": self.radial_gap_min,
            "tangential_gap_min": self.tangential_gap_min,
            "H1": self.H1,
            "H2": self.H2,
            "H3": self.H3,
            "H4": self.H4,
            "eta_convexity_min": self.eta_convexity_min,
            "eta_slope_max": self.eta_slope_max,
            "substatic": self.substatic,
        }


def _radial_grid(model: WarpedProductModel, grid) -> np.ndarray:
    if grid is None:
        grid = 401
    if np.isscalar(grid):
        lo = model.s_lo if model.has_horizon else 0.05 * model.s_max
        return np.linspace(lo, model.s_max, int(grid) + 1)[1:]
    return np.asarray(grid, dtype=float)


def substatic_check(model: WarpedProductModel, grid=None, tol_scale: float = 1.0) -> SubstaticReport:
    """Sample the substatic inequalities and the warping conditions (H1)-(H4) on a radial grid.

    ``grid`` is an explicit array of radii or a point count (default 401,
    uniform on ``(s0, s_max]``).
    """
    s = _radial_grid(model, grid)
    F, F1, _, _ = model.f2(s)
    if np.any(F <= 0):
        raise ModelError(f"f vanishes or is negative inside the domain of {model.name}")
    rad = substatic_radial_gap(model, s)
    tan = substatic_tangential_eigenvalue(model, s)
    tol = SUBSTATIC_TOL * tol_scale * (1.0 + max(float(np.max(np.abs(tan))), float(np.max(np.abs(F1)))))

    eta = eta_extract(model)
    t = s ** (-model.n)
    e0, e1, e2 = eta.derivatives(t)

    if model.has_horizon:
        try:
            surface_gravity(model)
            h1 = True
        except DegenerateHorizonError:
            h1 = False
    else:
        h1 = False
    h2 = bool(np.all(F > 0))
    Fb = warping_function(model, s)
    h3 = bool(np.all(np.diff(Fb) >= -tol * (1.0 + np.abs(Fb[1:]))))
    # (H4): h''/h + (c - h'^2)/h^2 > 0
    h4_expr = F1 / (2 * s) + (model.c_pot - F) / s**2
    h4_tol = 1e-10 * (1.0 + float(np.max(np.abs(F1 / (2 * s)))))
    h4 = bool(np.all(h4_expr > h4_tol))
    return SubstaticReport(
        radial_gap_min=float(np.min(rad)),
        tangential_gap_min=float(np.min(tan)),
        H1=h1,
        H2=h2,
        H3=h3,
        H4=h4,
        eta_convexity_min=float(np.min(e2)),
        eta_slope_max=float(np.max(e1)),
        tol=tol,
    )


def fit_desitter_schwarzschild(eta: EtaProfile, samples: int = 401):
    """Least-squares fit ``eta(t) ~ -lam - 2 m t``.

    Returns ``(lam, m, residual)`` with ``residual`` the largest deviation on the
    sampling grid; a tiny residual certifies the de Sitter-Schwarzschild form.
    """
    t = eta.grid(samples)
    e = eta(t)
    A = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(A, e, rcond=None)
    residual = float(np.max(np.abs(A @ coef - e)))
    return float(-coef[0]), float(-coef[1] / 2), residual


def montiel_potential_residual(model: WarpedProductModel, grid=None, phi_prime: Callable | None = None) -> float:
    """Max deviation of ``Hess phi`` from ``f g`` for ``phi' = s/f``.

    Both independent unit components (radial and tangential) are compared
    with the metric profile ``f = h'``.  A custom ``phi_prime`` may be passed;
    its derivative is then taken by a central difference.
    """
    s = _radial_grid(model, grid)
    F, F1, _, _ = model.f2(s)
    f = np.sqrt(F)
    if phi_prime is None:
        p1 = s / f
        p2 = 1 / f - s * F1 / (2 * f * F)
    else:
        h = 1e-5 * (model.s_max - model.s_lo)
        p1 = phi_prime(s)
        p2 = (phi_prime(s + h) - phi_prime(s - h)) / (2 * h)
    # Gamma^s_ss = -F'/(2F),  Gamma^s_ij = -F s (g_N)_ij
    radial = F * (p2 + F1 / (2 * F) * p1)
    tangential = F * p1 / s
    return float(max(np.max(np.abs(radial - f)), np.max(np.abs(tangential - f))))


def cylinder_substatic_check(f_profile: Callable, c_cross: float, n: int, grid, tol: float = 1e-6) -> bool:
    """Product case ``dr^2 + g_N``: substatic iff ``f'' + (n-2) c f >= 0`` on the grid.

    ``f''`` is a central difference with step ``1e-4`` times the grid scale.
    """
    r = np.asarray(grid, dtype=float)
    h = 1e-4 * max(1.0, float(np.max(np.abs(r))))
    f = np.asarray(f_profile(r), dtype=float)
    fdd = (np.asarray(f_profile(r + h)) - 2 * f + np.asarray(f_profile(r - h))) / h**2
    return bool(np.all(fdd + (n - 2) * c_cross * f >= -tol * (1.0 + np.abs(f))))
