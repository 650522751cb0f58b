"""
Which warped products are substatic?
====================================

A warped product ``ds^2/f^2 + s^2 g_N`` is written through its eta profile,
``f^2 = c + s^2 eta(s^-n)``.  The substatic condition comes down to ``eta'' >= 0``,
and an affine eta is exactly the (Anti-)de Sitter-Schwarzschild family.
"""

import numpy as np

from substatic import builtin_models, eta_extract, fit_desitter_schwarzschild, substatic_check
from substatic.warped import EtaDefinedProfile, WarpedProductModel

for name, model in builtin_models().items():
    rep = substatic_check(model)
    lam, m, resid = fit_desitter_schwarzschild(eta_extract(model))
    print(f"{name:7s} s0={model.s0!s:22s} substatic={rep.substatic!s:5s} H4={rep.H4!s:5s} "
          f"fit: lambda={lam:+.3f} m={m:.3f} (residual {resid:.1e})")


# %%
# A concave eta breaks the condition.  Here eta(t) = -t^2, so f^2 = 1 - s^-4.


def eta(t):
    t = np.asarray(t, dtype=float)
    return -t**2, -2 * t, np.full_like(t, -2.0), np.zeros_like(t)


bad = WarpedProductModel("CONCAVE", 3, 1.0, 1.0, EtaDefinedProfile(eta), s_max=4.0)
rep = substatic_check(bad)
print()
print("CONCAVE", "substatic =", rep.substatic)
print("  most negative tangential eigenvalue:", f"{rep.tangential_gap_min:.4f}")
print("  min eta'' on the grid:", rep.eta_convexity_min)
