"""
Darcy flow samples.

Draws a few coefficient fields, solves the pressure equation and checks the
solver on a manufactured solution.

    python notebooks/02_darcy_data.py
"""

import numpy as np

from isofno import darcy
from isofno.checks import manufactured_errors
from isofno.grid import D4, apply_group

# %% A sample at 64 x 64
s = darcy.generate_sample(seed=0, n=64)
print(f"coefficient values {np.unique(s.a)}, high fraction {np.mean(s.a == darcy.A_HIGH):.2f}")
print(f"pressure range [{s.u.min():.2e}, {s.u.max():.2e}], boundary max {np.abs(s.u[[0, -1]]).max():g}")

# %% Coarse text picture of a and u
for field, chars in ((s.a, " #"), (s.u / s.u.max(), " .:-=+*#")):
    small = field[::4, ::4]
    idx = np.clip(((small - small.min()) / (np.ptp(small) or 1) * (len(chars) - 1)).round().astype(int), 0, len(chars) - 1)
    print("\n".join("".join(chars[i] * 2 for i in row) for row in idx))
    print()

# %% Second-order accuracy on sin(pi x) sin(pi y)
errs = manufactured_errors((16, 32, 64, 128))
print("max errors:", ", ".join(f"{e:.2e}" for e in errs))
print("observed orders:", np.round(np.log2(errs[:-1] / errs[1:]), 3))

# %% The data respects the symmetries of the square
worst = max(np.abs(darcy.solve_darcy(apply_group(g, s.a), 1.0, 1e-10) - apply_group(g, darcy.solve_darcy(s.a, 1.0, 1e-10))).max() for g in D4)
print(f"solver D4 violation {worst:.1e}")
