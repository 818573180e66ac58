# The weighted sieve on f(p) for x < p <= 2x, with every element factored.

from dhrsieve.empirical import build_sequence, omega_statistics, verify_Pr_deduction
from dhrsieve.localdensity import IntPolynomial, mertens_report, singular_series
from dhrsieve.rbound import default_optimizer

f = IntPolynomial.parse("1,1,1")
k = f.degree
best = default_optimizer().result(k)
alpha, beta, r = 1 / (12 * k), best.beta0 / k, best.r_int
print(f"f = {f}, r = {r}, alpha = {alpha:.5f}, beta = {beta:.5f}")

# Elements with positive weight and no repeated medium prime always have at
# most r prime factors.  The check is exact, so the count below must be zero.
for x in (10 ** 3, 10 ** 4, 10 ** 5):
    seq = build_sequence(f, x)
    rep = verify_Pr_deduction(seq, r, alpha, beta)
    stats = omega_statistics(seq, r)
    print(f"x={x:>7d}  X={rep.X:6d}  W={rep.W:10.2f}  flagged={rep.flagged:6d}  "
          f"max Omega={rep.max_omega_flagged}  violations={rep.pr_violations}  "
          f"square hits/X={rep.square_hit / rep.X:.4f}")
    print("           Omega histogram:", stats.histogram)

# At this scale z = N^alpha is tiny, so the asymptotic count x/(log x)^2 is
# not visible; the ratio below just drifts.
print("count(Omega <= r) / (x/log^2 x):", f"{stats.density_ratio:.3f}")

# The local densities behave as the Mertens-type estimates predict.
for x in (10 ** 4, 10 ** 5, 10 ** 6):
    m = mertens_report(f, x)
    print(f"x={x:>7d}  sum residuals {m.nu1_sum_residual:+.4f} {m.nu2_sum_residual:+.4f}  "
          f"product ratios {m.nu1_product_ratio:.5f} {m.nu2_product_ratio:.5f}")
s = singular_series(f, 10 ** 6)
print(f"singular series ~ {s.value:.6f} (tail heuristic {s.tail_bound:.1e})")
