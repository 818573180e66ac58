# From the sifting functions to the exponent r(k).
import math

from dhrsieve import optimize
from dhrsieve.rbound import BETA_SIEVE_R0, default_optimizer

opt = default_optimizer()

# delta0 balances the one- and two-dimensional sieves; it does not depend on k.
print(f"delta0 = {opt.delta0:.8f}")
print(f"F1 side - F2 side at delta0: {opt.delta_condition(opt.delta0):.2e}")

# Named constants of the large-k closed form beta0 = 1 - 1/(c1 k + c2).
for name, value in opt.constants.as_dict().items():
    print(f"{name:8s} {value:.8f}")

# The optimum per degree.  For k <= 6 beta0 is found numerically; from k = 7
# on the root passes 5/6 and the closed form takes over.
report = optimize(range(2, 11))
print(" k  beta0     r(k,beta0)  r   beta-sieve r0  branch")
for row in report.per_k:
    print(f"{row.k:2d}  {row.beta0:.5f}  {row.r_real:9.5f}  {row.r_int:2d}  "
          f"{BETA_SIEVE_R0[row.k]:13d}  {row.branch}")

# r(k) grows like k + c log k; the remainder settles quickly.
for k in (7, 20, 100, 1000):
    r = opt.asymptotic_r(k)
    print(f"k={k:5d}  r(k, 1-1/k) - k - c log k = {r - k - opt.constants.c * math.log(k):.5f}")
