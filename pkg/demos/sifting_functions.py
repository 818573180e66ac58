# Walk through the one- and two-dimensional sifting functions.
# Run from anywhere after installing the package: python3 demos/sifting_functions.py
import numpy as np

from dhrsieve import default_evaluator
from dhrsieve.sievefn import method_of_steps

sf = default_evaluator()

# The upper functions decrease to 1 and the lower ones increase to 1.
# Both sit far from 1 at the small arguments the optimization uses.
grid = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
print("s      F1        f1        F2        f2")
for s, a, b, c, d in zip(grid, sf.F1(grid), sf.f1(grid), sf.F2(grid), sf.f2(grid)):
    print(f"{s:.1f}  {a:.6f}  {b:.6f}  {c:.6f}  {d:.6f}")

# f1(6) normalizes the whole bound, so it is worth seeing to full precision.
print("f1(6) =", repr(sf.f1(6.0)))

# Crossing values for the two-dimensional sieve: F2 stops being 1/sigma2
# at alpha2 and f2 leaves zero at beta2.
a2, b2 = sf.constants.alpha2, sf.constants.beta2
print(f"F2(alpha2) = {sf.F2(a2):.9f}, f2(beta2 + 0.01) = {sf.f2(b2 + 0.01):.3e}")

# Every junction between formulas is continuous.
for name, rows in sf.junctions().items():
    print(name, [f"{s:.4f}: {abs(l - r):.1e}" for s, l, r in rows])

# A plain trapezoid march of the delay system lands on the same curves.
g, F, f = method_of_steps(2, sf.F2, lambda s: 0 * s, a2, b2, 6.9, 1e-4)
sel = g > 1
print("max |march - table| for F2:", np.max(np.abs(F[sel] - sf.F2(g[sel]))))

# And the delay equations hold pointwise.
for which, s in (("F1", 4.3), ("f1", 5.5), ("F2", 6.2), ("f2", 5.1)):
    print(f"residual {which}({s}) = {sf.dde_residual(which, s):.2e}")
