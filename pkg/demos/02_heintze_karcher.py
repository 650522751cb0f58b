"""
The Heintze-Karcher inequality on Schwarzschild
===============================================

For a mean-convex hypersurface homologous to the horizon,

    (n-1)/n int f/H  >=  int_Omega f + c_N int_horizon |grad f|,

with equality only on coordinate spheres.  On Schwarzschild (m = 1/2, n = 3)
the sphere s = 2 gives 32 pi/3 = 28 pi/3 + 4 pi/3.
"""

import numpy as np

from substatic import SCHW3, hk_deficit, perturbed_graph, sphere_graph
from substatic.errors import MeanConvexityError
from substatic.functionals import hk_scale, horizon_constant_closed, horizon_constant_integral

print("c_N closed form:", horizon_constant_closed(SCHW3), " integral form:", horizon_constant_integral(SCHW3))

rep = hk_deficit(SCHW3, sphere_graph(SCHW3, 2.0))
print(f"sphere s=2: lhs {rep.lhs / np.pi:.6f} pi, volume {rep.weighted_volume / np.pi:.6f} pi, "
      f"horizon {rep.horizon_term / np.pi:.6f} pi, deficit {rep.deficit:.1e}")

# %%
# Wobbling the sphere makes the deficit strictly positive, roughly
# quadratically in the amplitude.

scale = hk_scale(SCHW3, 2.0)
for k in (1, 2, 3):
    row = []
    for amp in (0.025, 0.05, 0.1, 0.2):
        try:
            d = hk_deficit(SCHW3, perturbed_graph(SCHW3, 2.0, {k: amp})).deficit
            row.append(f"{d / scale:9.2e}")
        except MeanConvexityError:
            row.append("   H <= 0")
    print(f"mode {k}: deficit/scale at amplitudes .025 .05 .1 .2 ->", " ".join(row))
